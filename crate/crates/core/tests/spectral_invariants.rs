use stab_core::closedform::{curve_limit_at_one, curve_point, Curve};
use stab_core::conformal::{bubble_mass, gamma_compose, two_bubble_limit, y_of_beta, Bubble, SobolevContext};
use stab_core::spectral::{
    analyze, be_quotient, energy_inner, family_function, Family, SearchOptions, SpectralConfig,
};

fn two_centers(ctx: &SobolevContext, cfg: &SpectralConfig, b1: f64, b2: f64) -> stab_core::spectral::SphereFunction {
    let (v1, v2) = (Bubble::new(b1).unwrap(), Bubble::new(b2).unwrap());
    let ctx2 = *ctx;
    analyze(ctx, cfg, move |th| v1.value(&ctx2, th.cos()) + v2.value(&ctx2, th.cos())).unwrap()
}

#[test]
fn composition_law() {
    let cfg = SpectralConfig::new(256, 2048);
    let betas = [-0.6, -0.3, 0.3, 0.6];
    for (d, s) in [(1, 1.0 / 6.0), (2, 0.5), (3, 0.5)] {
        let ctx = SobolevContext::new(d, s).unwrap();
        let fs: Vec<_> = betas
            .iter()
            .map(|&b| {
                let v = Bubble::new(b).unwrap();
                analyze(&ctx, &cfg, move |th| v.value(&ctx, th.cos())).unwrap()
            })
            .collect();
        for (i, &b) in betas.iter().enumerate() {
            for (j, &bp) in betas.iter().enumerate() {
                let lhs = energy_inner(&ctx, &fs[i], &fs[j]).unwrap();
                let g = gamma_compose(b, bp);
                let rhs = ctx.alpha(0) * ctx.sphere_measure() * bubble_mass(&ctx, 1.0, g).unwrap();
                assert!((lhs - rhs).abs() < 1e-8, "d={d} β={b} β'={bp}: {lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn recentering_leaves_quotient_unchanged() {
    let cfg = SpectralConfig::default();
    let opts = SearchOptions::default();
    let ctx = SobolevContext::new(1, 0.25).unwrap();
    let c = 0.3;
    for beta in [0.4, 0.7] {
        let plain = two_centers(&ctx, &cfg, beta, -beta);
        let moved = two_centers(&ctx, &cfg, gamma_compose(beta, c), gamma_compose(-beta, c));
        let e0 = be_quotient(&ctx, &plain, "plain", &opts).unwrap().e.unwrap();
        let e1 = be_quotient(&ctx, &moved, "moved", &opts).unwrap().e.unwrap();
        assert!((e0 - e1).abs() < 1e-6, "β={beta}: {e0} vs {e1}");
    }
}

#[test]
fn truncation_robustness() {
    let opts = SearchOptions::default();
    let coarse = SpectralConfig::new(256, 2048);
    let fine = SpectralConfig::new(512, 4096);
    let cases = [
        (1, 1.0 / 6.0, Family::TwoBubble, 0.6),
        (1, 0.25, Family::SignChanging, 0.6),
        (1, 0.25, Family::SecondHarmonic, 0.05),
        (2, 0.5, Family::Prop41Rho, 0.05),
        (2, 0.5, Family::TwoBubble, 0.5),
    ];
    for (d, s, fam, param) in cases {
        let ctx = SobolevContext::new(d, s).unwrap();
        let a = be_quotient(&ctx, &family_function(&ctx, &coarse, fam, param).unwrap(), "", &opts).unwrap();
        let b = be_quotient(&ctx, &family_function(&ctx, &fine, fam, param).unwrap(), "", &opts).unwrap();
        let (ea, eb) = (a.e.unwrap(), b.e.unwrap());
        assert!((ea - eb).abs() < 1e-7, "{} d={d} s={s}: {ea} vs {eb}", fam.name());
    }
}

#[test]
fn modified_quotient_never_exceeds_full() {
    let cfg = SpectralConfig::new(256, 2048);
    let opts = SearchOptions::default();
    for (d, s, fam, param) in [
        (1, 1.0 / 6.0, Family::TwoBubble, 0.95),
        (1, 0.25, Family::SignChanging, 0.5),
        (2, 0.5, Family::TwoBubble, 0.8),
        (3, 0.5, Family::Prop41Rho, 0.1),
    ] {
        let ctx = SobolevContext::new(d, s).unwrap();
        let r = be_quotient(&ctx, &family_function(&ctx, &cfg, fam, param).unwrap(), "", &opts).unwrap();
        assert!(r.deficit >= -1e-9);
        assert!(r.e.unwrap() >= r.e_tilde - 1e-12, "{}: {:?} < {}", fam.name(), r.e, r.e_tilde);
    }
}

#[test]
fn limits_are_half_the_two_bubble_value() {
    let e = SobolevContext::new(1, 1.0 / 6.0).unwrap();
    let f = SobolevContext::new(1, 0.25).unwrap();
    let e1 = curve_limit_at_one(&e, Curve::TwoBubble).unwrap();
    let g1 = curve_limit_at_one(&f, Curve::SignChanging).unwrap();
    assert!((e1 - 0.5 * two_bubble_limit(&e)).abs() < 1e-15);
    assert!((g1 - 0.5 * two_bubble_limit(&f)).abs() < 1e-15);
    assert!((e1 - (1.0 - 2f64.powf(-1.0 / 3.0))).abs() < 1e-15);
    assert!((g1 - (1.0 - 0.5f64.sqrt())).abs() < 1e-15);
}

#[test]
fn sign_changing_distance_ratio_grows_toward_the_edge() {
    let cfg = SpectralConfig::default();
    let opts = SearchOptions::default();
    let ctx = SobolevContext::new(1, 0.25).unwrap();
    let ratios: Vec<f64> = [0.9, 0.99, 0.995]
        .iter()
        .map(|&b| {
            let r = be_quotient(&ctx, &family_function(&ctx, &cfg, Family::SignChanging, b).unwrap(), "", &opts)
                .unwrap();
            r.dist_sq_c / r.dist_sq_m.unwrap()
        })
        .collect();
    assert!(ratios.windows(2).all(|w| w[1] > w[0]), "{ratios:?}");
    assert!(ratios.iter().all(|&r| r > 1.0 && r < 2.0), "{ratios:?}");
}

#[test]
fn closed_form_and_spectral_agree_in_two_dimensions() {
    // d = 2, p = 3 is s = 1/3.
    let ctx = SobolevContext::new(2, 1.0 / 3.0).unwrap();
    let cfg = SpectralConfig::default();
    for beta in [0.2, 0.5, 0.8] {
        let u = family_function(&ctx, &cfg, Family::TwoBubble, beta).unwrap();
        let r = stab_core::spectral::modified_quotient(&ctx, &u, "").unwrap();
        let c = curve_point(&ctx, Curve::TwoBubble, y_of_beta(beta)).unwrap().value;
        assert!((r.e_tilde - c).abs() < 1e-8, "β={beta}: {} vs {c}", r.e_tilde);
    }
}

#[test]
fn off_axis_centers_never_win_on_the_circle() {
    let cfg = SpectralConfig::new(256, 2048);
    let ctx = SobolevContext::new(1, 1.0 / 6.0).unwrap();
    let axis = SearchOptions { full: Some(false), ..SearchOptions::default() };
    let full = SearchOptions { full: Some(true), ..SearchOptions::default() };
    for (fam, param) in [(Family::TwoBubble, 0.3), (Family::TwoBubble, 0.8), (Family::SignChanging, 0.5)] {
        let u = family_function(&ctx, &cfg, fam, param).unwrap();
        let a = stab_core::spectral::dist_to_manifold_with(&ctx, &u, &axis).unwrap();
        let b = stab_core::spectral::dist_to_manifold_with(&ctx, &u, &full).unwrap();
        assert!(b.dist_sq >= a.dist_sq - 1e-9 * a.dist_sq, "{} {param}: {} < {}", fam.name(), b.dist_sq, a.dist_sq);
    }
}
