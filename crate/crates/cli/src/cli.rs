use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use stab_core::spectral::Family;

#[derive(Debug, Parser)]
#[command(name = "stab", version, about = "Stability quotients for the fractional Sobolev inequality on spheres")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate a quotient curve as CSV, optionally with an SVG plot.
    Curve(Options),
    /// Check a curve against a threshold and its expected monotonicity.
    Verify(Options),
    /// Sweep s on the circle and compare min over β of the modified quotient with c_loc(s).
    ScanS(Options),
    /// Fit the small-parameter behaviour of the quotient near the optimizers.
    Expansion(Options),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Above,
    Below,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Options {
    /// Sphere dimension.
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Order s, or an s-grid `start:stop:count` for scan-s.
    #[arg(long, conflicts_with = "p")]
    pub s: Option<String>,
    /// Critical exponent shorthand, s = d(p−2)/(2p).
    #[arg(long, value_parser = clap::value_parser!(u8).range(3..=4))]
    pub p: Option<u8>,
    /// two-bubble, sign-changing, second-harmonic or prop41-rho.
    #[arg(long, value_parser = parse_family)]
    pub family: Option<Family>,
    /// `start:stop:count` or a comma-separated list.
    #[arg(long)]
    pub grid: Option<String>,
    /// Harmonic truncation degree L.
    #[arg(long, default_value_t = 512)]
    pub truncation: usize,
    /// Quadrature order for the spectral evaluator.
    #[arg(long, default_value_t = 4096)]
    pub quad_order: usize,
    /// Use the spectral evaluator instead of the closed forms.
    #[arg(long)]
    pub spectral: bool,
    /// CSV output path (stdout when absent, for curve).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// SVG plot path (curve only).
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Report numerator − c_loc·denominator instead of the ratio.
    #[arg(long)]
    pub regularized: bool,
    /// Threshold value, or `c_loc` (the default).
    #[arg(long)]
    pub threshold: Option<String>,
    #[arg(long, value_enum)]
    pub direction: Option<Direction>,
    /// JSON report path (stdout when absent).
    #[arg(long)]
    pub json: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: stab_core::Error| e.to_string())
}
