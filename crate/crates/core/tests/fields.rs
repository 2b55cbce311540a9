use std::f64::consts::PI;

use cliffdirac::constants::OmegaConvention;
use cliffdirac::dirac::{dirac_apply, heat_evolve, laplacian_apply, SpectralPlan};
use cliffdirac::families::{FieldKind, TestFamily};
use cliffdirac::grid::{CliffordField, GridSpec};
use cliffdirac::harness::{run_suite, Suite, SuiteConfig};
use cliffdirac::report::{canonical_report_text, VerificationReport};
use cliffdirac::{AlgebraSignature, Multivector};

fn gaussian(grid: GridSpec, sig: AlgebraSignature, mask: usize) -> CliffordField {
    CliffordField::from_profile(grid, &Multivector::blade(sig, mask, 1.0), |x| {
        (-0.5 * x.iter().map(|t| t * t).sum::<f64>()).exp()
    })
    .unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn gaussian_lp_norms_match_closed_form() {
    let grid = GridSpec::new(3, 48, 8.0).unwrap();
    let sig = AlgebraSignature::real(3, 3).unwrap();
    let f = gaussian(grid, sig, 0b101);
    for p in [1.0, 1.5, 2.0, 4.0] {
        // ∫ exp(-p r²/2) d³x = (2π/p)^{3/2}
        let exact = (2.0 * PI / p).powf(1.5 / p);
        assert!(rel(f.norm(p).unwrap(), exact) < 1e-8, "p = {p}");
    }
    assert!((f.norm(f64::INFINITY).unwrap() - (-0.5 * 3.0 * grid.spacing().powi(2) / 4.0).exp()).abs() < 1e-12);
}

#[test]
fn dirac_squares_to_minus_laplacian_on_every_family() {
    let grid = GridSpec::new(3, 24, 10.0).unwrap();
    let sig = AlgebraSignature::real(3, 3).unwrap();
    for kind in FieldKind::ALL {
        let f = TestFamily::new(7, kind, 2).generate(grid, sig, 1).unwrap();
        let dd = dirac_apply(&dirac_apply(&f).unwrap()).unwrap();
        let lap = laplacian_apply(&f).unwrap().scale(-1.0);
        let err = dd.try_sub(&lap).unwrap().norm(2.0).unwrap();
        assert!(err <= 1e-10 * lap.norm(2.0).unwrap(), "{kind:?}");
        let plan = SpectralPlan::new(grid);
        let df = dirac_apply(&f).unwrap().norm(2.0).unwrap();
        assert!(rel(df, plan.gradient_norm(&f).unwrap()) < 1e-10, "{kind:?}");
    }
}

#[test]
fn heat_semigroup_and_contraction() {
    let grid = GridSpec::new(3, 24, 10.0).unwrap();
    let sig = AlgebraSignature::complex(3, 4).unwrap();
    let f = TestFamily::new(3, FieldKind::MultivectorGaussian, 1).generate(grid, sig, 0).unwrap();
    let once = heat_evolve(&f, 0.7).unwrap();
    let twice = heat_evolve(&heat_evolve(&f, 0.3).unwrap(), 0.4).unwrap();
    assert!(once.try_sub(&twice).unwrap().norm(2.0).unwrap() < 1e-12 * once.norm(2.0).unwrap());
    let mut last = f.norm(2.0).unwrap();
    for t in [0.1, 0.5, 1.0, 2.0] {
        let now = heat_evolve(&f, t).unwrap().norm(2.0).unwrap();
        assert!(now <= last);
        last = now;
    }
    assert_eq!(heat_evolve(&f, 0.0).unwrap(), f);
}

#[test]
fn heat_of_gaussian_is_wider_gaussian() {
    // e^{tΔ} e^{-r²/2} = (1+2t)^{-3/2} e^{-r²/(2(1+2t))}
    let grid = GridSpec::new(3, 64, 12.0).unwrap();
    let sig = AlgebraSignature::real(3, 3).unwrap();
    let f = gaussian(grid, sig, 0);
    let t = 0.5;
    let s: f64 = 1.0 + 2.0 * t;
    let exact = CliffordField::from_profile(grid, &Multivector::scalar(sig, 1.0), |x| {
        s.powf(-1.5) * (-x.iter().map(|v| v * v).sum::<f64>() / (2.0 * s)).exp()
    })
    .unwrap();
    let err = heat_evolve(&f, t).unwrap().try_sub(&exact).unwrap().norm(f64::INFINITY).unwrap();
    assert!(err < 1e-10);
}

#[test]
fn norms_are_homogeneous_and_subadditive() {
    let grid = GridSpec::new(3, 16, 8.0).unwrap();
    let sig = AlgebraSignature::real(3, 3).unwrap();
    let fam = TestFamily::new(11, FieldKind::BandlimitedRandom, 2);
    let (f, g) = (fam.generate(grid, sig, 0).unwrap(), fam.generate(grid, sig, 1).unwrap());
    for p in [1.0, 2.0, 3.0] {
        let nf = f.norm(p).unwrap();
        assert!(rel(f.scale(-2.5).norm(p).unwrap(), 2.5 * nf) < 1e-12);
        assert!(f.try_add(&g).unwrap().norm(p).unwrap() <= nf + g.norm(p).unwrap() + 1e-12);
    }
    assert!(f.weak_lq_norm(2.0).unwrap() <= f.weak_lq_norm_upper(2.0).unwrap());
    assert!(f.weak_lq_norm_upper(2.0).unwrap() <= f.norm(2.0).unwrap() * (1.0 + 1e-12));
}

#[test]
fn families_are_seed_deterministic() {
    let grid = GridSpec::new(3, 16, 8.0).unwrap();
    let sig = AlgebraSignature::real(3, 3).unwrap();
    for kind in FieldKind::ALL {
        let a = TestFamily::new(42, kind, 3).generate(grid, sig, 2).unwrap();
        let b = TestFamily::new(42, kind, 3).generate(grid, sig, 2).unwrap();
        let c = TestFamily::new(43, kind, 3).generate(grid, sig, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
    assert!(TestFamily::new(42, FieldKind::Bump, 3).generate(grid, sig, 3).is_err());
}

#[test]
fn suite_reports_are_reproducible_and_round_trip() {
    let grid = GridSpec::new(3, 16, 8.0).unwrap();
    let sig = AlgebraSignature::real(3, 3).unwrap();
    let mut cfg = SuiteConfig::new(Suite::LogSobolev, grid, sig, 5, 4);
    cfg.omega = OmegaConvention::Paper;
    let a = run_suite(&cfg).unwrap();
    let b = run_suite(&cfg).unwrap();
    let (ta, tb) = (a.to_json().unwrap(), b.to_json().unwrap());
    assert_eq!(canonical_report_text(&ta).unwrap(), canonical_report_text(&tb).unwrap());
    // three log-Hölder pairs and one log-Sobolev check per case
    assert_eq!(a.results.len(), 16);
    let back = VerificationReport::from_json(&ta).unwrap();
    assert_eq!(back.results, a.results);
    assert!(a.all_pass());
}
