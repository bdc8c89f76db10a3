use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use stab_core::spectral::SearchOptions;

use crate::cli::Direction;
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

/// Everything needed to rerun a computation.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub d: usize,
    /// `null` for scan-s, whose orders are in `s_grid`.
    pub s: Option<f64>,
    pub p: Option<f64>,
    pub c_loc: Option<f64>,
    pub s_grid: Option<Grid>,
    pub family: &'static str,
    pub method: &'static str,
    pub curve: Option<&'static str>,
    pub grid: Grid,
    pub truncation: usize,
    pub quad_order: usize,
    pub threshold: Option<f64>,
    pub direction: Option<Direction>,
    pub regularized: bool,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub monotone_slack: f64,
    pub monotone_from: f64,
    pub closed_form_agreement: f64,
    pub fit_relative: f64,
    pub scaling_relative: f64,
    pub search: Option<SearchOptions>,
}

/// One evaluated grid point.
#[derive(Debug, Clone, Serialize)]
pub struct Point {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    pub parameter: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub value: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Monotonicity {
    pub expected: &'static str,
    pub holds: bool,
    pub first_violation: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub min_margin: f64,
    pub argmin: Option<f64>,
    pub violations: usize,
    pub first_violation: Option<f64>,
    pub monotonicity: Option<Monotonicity>,
}

impl Aggregate {
    pub fn of(points: &[Point]) -> Self {
        let mut min_margin = f64::INFINITY;
        let mut argmin = None;
        for p in points {
            if p.margin < min_margin || p.margin.is_nan() {
                min_margin = p.margin;
                argmin = Some(p.parameter);
            }
        }
        let bad: Vec<&Point> = points.iter().filter(|p| !(p.margin > 0.0)).collect();
        Self {
            min_margin,
            argmin,
            violations: bad.len(),
            first_violation: bad.first().map(|p| p.parameter),
            monotonicity: None,
        }
    }
}

/// Per-order summary of scan-s.
#[derive(Debug, Clone, Serialize)]
pub struct SRow {
    pub s: f64,
    pub p: f64,
    pub c_loc: f64,
    pub min_value: f64,
    pub argmin_beta: f64,
    pub margin: f64,
    pub closed_form_max_diff: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Fit {
    /// μ²-coefficient of ℰ(1 + μ sin 2θ) − c_loc.
    LocalSlope {
        fitted: f64,
        check: f64,
        predicted: f64,
        lower_bound: f64,
        relative_deviation: f64,
        residual: f64,
    },
    /// Behaviour of ℰ(1 + ερ) and the small-β coefficients of the two-bubble family.
    Prop41 {
        exponents: Vec<f64>,
        expected_exponent: f64,
        c2_fitted: f64,
        c2_predicted: f64,
        c2_relative_deviation: f64,
        c1_quadratic_fitted: f64,
        c1_quadratic_predicted: f64,
        c1_quadratic_relative_deviation: f64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub status: Status,
    pub pass: bool,
    pub provenance: Provenance,
    pub aggregate: Aggregate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<SRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<Fit>,
    pub errors: Vec<String>,
    pub points: Vec<Point>,
}

impl VerificationReport {
    pub fn summary(&self) -> String {
        let label = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        let at = self.aggregate.argmin.map(|a| format!(" at {} = {a}", self.provenance.grid.name)).unwrap_or_default();
        let mut s = format!("{}: {label} (min margin {:.6e}{at})", self.provenance.command, self.aggregate.min_margin);
        if let Some(m) = &self.aggregate.monotonicity {
            s.push_str(&format!(", {} {}", m.expected, if m.holds { "holds" } else { "violated" }));
        }
        if let Some(e) = self.errors.first() {
            s.push_str(&format!(", first error: {e}"));
        }
        s
    }
}

/// Write `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| format!("cannot write to stdout: {e}"))
        }
    }
}

pub fn to_json(report: &VerificationReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// CSV with the given header and rows written with 17 significant digits.
pub fn to_csv(header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_seventeen_digits() {
        let csv = to_csv(&["a", "b"], vec![vec![0.1, 1.0 / 3.0]].into_iter());
        let line = csv.lines().nth(1).unwrap();
        assert_eq!(line, "1.0000000000000001e-1,3.3333333333333331e-1");
        let back: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(back, vec![0.1, 1.0 / 3.0]);
    }

    #[test]
    fn aggregate_finds_minimum_and_violations() {
        let pt = |x: f64, m: f64| Point {
            s: None,
            parameter: x,
            beta: None,
            value: 0.0,
            numerator: 0.0,
            denominator: 0.0,
            margin: m,
        };
        let a = Aggregate::of(&[pt(0.1, 0.3), pt(0.2, -0.1), pt(0.3, 0.0)]);
        assert_eq!(a.min_margin, -0.1);
        assert_eq!(a.argmin, Some(0.2));
        assert_eq!(a.violations, 2);
        assert_eq!(a.first_violation, Some(0.2));
    }
}
