//! Decay estimates for zero modes, checked on synthetic algebraically
//! decaying fields `ψ(x) = (1+|x|²)^{−a} (1 + x) u₀`.
//!
//! `|ψ| ~ |x|^{1−2a}`, so `ψ ∈ L²(R^n)` exactly when `a > (n+2)/4`.

use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{AlgebraSignature, Multivector};
use crate::constants::{sobolev_c1_with, zero_mode_thresholds};
use crate::error::{Error, Result};
use crate::families::case_rng;
use crate::grid::{CliffordField, GridSpec};
use crate::harness::{Checker, SuiteConfig};
use crate::report::{CheckForm, CheckResult};
use crate::summation::chunked_sum;

/// Decay exponents exercised by the suite.
pub const DECAY_EXPONENTS: [f64; 3] = [1.6, 2.0, 3.0];

/// Smallest decay exponent for which `ψ` is square integrable.
pub fn l2_threshold(n: usize) -> f64 {
    (n as f64 + 2.0) / 4.0
}

#[derive(Debug, Clone)]
pub struct SyntheticMode {
    pub a: f64,
    pub u0: Multivector,
    pub q0: f64,
}

impl SyntheticMode {
    pub fn new(a: f64, u0: Multivector, q0: f64, n: usize) -> Result<Self> {
        if u0.is_zero() {
            return Err(Error::Degenerate("direction u0 is zero".into()));
        }
        if !(a > l2_threshold(n)) {
            return Err(Error::Domain(format!("decay exponent a = {a} must exceed (n+2)/4 = {}", l2_threshold(n))));
        }
        if n > u0.sig().m() {
            return Err(Error::Domain(format!("grid dimension {n} exceeds m = {}", u0.sig().m())));
        }
        Ok(Self { a, u0, q0 })
    }

    /// `ψ` sampled on `grid`, built blade by blade from `u₀` and `e_j u₀`.
    pub fn sample_psi(&self, grid: GridSpec) -> Result<CliffordField> {
        let a = self.a;
        let envelope = move |x: &[f64]| (1.0 + x.iter().map(|v| v * v).sum::<f64>()).powf(-a);
        let mut psi = CliffordField::from_profile(grid, &self.u0, envelope)?;
        let sig = self.u0.sig();
        for j in 0..grid.n() {
            let ej_u0 = Multivector::blade(sig, 1 << j, 1.0).geometric_product(&self.u0)?;
            psi = psi.try_add(&CliffordField::from_profile(grid, &ej_u0, move |x| x[j] * envelope(x))?)?;
        }
        Ok(psi)
    }

    /// Scalar potential envelope `Q(x) = q₀ (1+|x|²)^{−1/2}`.
    pub fn potential(&self, grid: GridSpec) -> Result<CliffordField> {
        let q0 = self.q0;
        CliffordField::from_profile(grid, &Multivector::scalar(self.u0.sig(), 1.0), move |x| {
            q0 / (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt()
        })
    }
}

/// `ψ` and its spectral Dirac derivative. `Dψ = −Qψ` is not claimed.
pub fn synthesize_mode(a: f64, u0: &Multivector, q0: f64, grid: GridSpec) -> Result<(CliffordField, CliffordField)> {
    let mode = SyntheticMode::new(a, u0.clone(), q0, grid.n())?;
    let psi = mode.sample_psi(grid)?;
    let dpsi = crate::dirac::dirac_apply(&psi)?;
    Ok((psi, dpsi))
}

fn radius(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Weighted Sobolev step `‖|x|ψ‖_{2n/(n−2)} <= C₁ ‖D(|x|ψ)‖₂` and Leibniz step
/// `‖D(|x|ψ)‖₂ <= ‖|x|Dψ‖₂ + ‖ψ‖₂`.
pub fn check_weighted_chain(checker: &Checker, case: &str, psi: &CliffordField, dpsi: &CliffordField) -> Result<[CheckResult; 2]> {
    psi.grid().ensure_same(dpsi.grid())?;
    if psi.max_norm() == 0.0 {
        return Err(Error::Degenerate("zero mode field vanishes".into()));
    }
    let n = psi.grid().n();
    let nf = n as f64;
    let c1 = sobolev_c1_with(n, psi.sig().m(), psi.sig().field(), checker.flags().omega_variant)?.min;
    let weighted = psi.multiply_profile(radius);
    let d_weighted = crate::dirac::dirac_apply(&weighted)?;
    let d_norm = d_weighted.norm(2.0)?;
    let sobolev = checker
        .result("zero_weighted_sobolev", case, CheckForm::Multiplicative, weighted.norm(2.0 * nf / (nf - 2.0))?, c1 * d_norm)
        .with_extra("C1", c1);
    let leibniz_rhs = dpsi.multiply_profile(radius).norm(2.0)? + psi.norm(2.0)?;
    let leibniz = checker.result("zero_leibniz", case, CheckForm::Multiplicative, d_norm, leibniz_rhs);
    Ok([sobolev, leibniz])
}

/// Partial sums `I(R_j) = Σ_{1<|x|<R_j} |ψ|^k |x|^{2k−α} h^n` over the
/// cells whose centres lie in each shell.
pub fn weighted_integral_sums(psi: &CliffordField, k: f64, alpha: f64, radii: &[f64]) -> Result<Vec<f64>> {
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] <= 1.0 {
        return Err(Error::Parameter("box radii must be increasing and exceed 1".into()));
    }
    let grid = *psi.grid();
    radii
        .iter()
        .map(|&r| {
            let r2max = r * r;
            Ok(chunked_sum(grid.len(), |i| {
                let r2 = grid.radius_sqr(i);
                if r2 <= 1.0 || r2 >= r2max {
                    return 0.0;
                }
                psi.norm_sqr_at(i).powf(0.5 * k) * r2.powf(0.5 * (2.0 * k - alpha))
            }) * grid.cell_volume())
        })
        .collect()
}

/// Ratios of consecutive increments `I(R_{j+1}) − I(R_j)`.
pub fn increment_ratios(sums: &[f64]) -> Vec<f64> {
    let inc: Vec<f64> = sums.windows(2).map(|w| w[1] - w[0]).collect();
    inc.windows(2).map(|w| w[1] / w[0]).collect()
}

/// Dyadic radii `2, 4, ...` that fit inside the box.
pub fn dyadic_radii(extent: f64) -> Vec<f64> {
    std::iter::successors(Some(2.0), |r| Some(r * 2.0)).take_while(|r| *r <= extent).collect()
}

/// Discrete Hölder split with `p = 6/k`:
/// `I(R) <= ‖|ψ||x|‖_{pk}^k (Σ_{1<|x|<R} |x|^{(k−α)p/(p−1)} h^n)^{(p−1)/p}`.
pub fn holder_split(psi: &CliffordField, k: f64, alpha: f64, radius_max: f64) -> Result<(f64, f64)> {
    let p = 6.0 / k;
    let grid = *psi.grid();
    let lhs = *weighted_integral_sums(psi, k, alpha, &[radius_max])?.first().expect("one radius");
    let weight_norm = psi.lp_norm(p * k, crate::grid::Measure::Lebesgue, 1.0)?;
    let r2max = radius_max * radius_max;
    let e = (k - alpha) * p / (p - 1.0);
    let tail = chunked_sum(grid.len(), |i| {
        let r2 = grid.radius_sqr(i);
        if r2 <= 1.0 || r2 >= r2max {
            0.0
        } else {
            r2.powf(0.5 * e)
        }
    }) * grid.cell_volume();
    Ok((lhs, weight_norm.powf(k) * tail.powf((p - 1.0) / p)))
}

fn check_weighted_range(n: usize, k: f64, alpha: f64) -> Result<()> {
    if n != 3 {
        return Err(Error::Domain(format!("the weighted integral estimate is stated for n = 3, got {n}")));
    }
    if !(k > 0.0 && k < 6.0) {
        return Err(Error::Parameter(format!("k = {k} outside (0, 6)")));
    }
    let (threshold, _) = zero_mode_thresholds(k)?;
    if !(alpha > threshold) {
        return Err(Error::Parameter(format!("alpha = {alpha} must exceed 3 + k/2 = {threshold}")));
    }
    Ok(())
}

/// Geometric decay of the Cauchy increments together with the Hölder split.
///
/// The ratio is the largest increment ratio; the split bound must also hold.
pub fn check_weighted_integral(checker: &Checker, case: &str, psi: &CliffordField, k: f64, alpha: f64, radii: &[f64]) -> Result<CheckResult> {
    check_weighted_range(psi.grid().n(), k, alpha)?;
    if radii.len() < 3 {
        return Err(Error::Parameter("need at least three radii for an increment ratio".into()));
    }
    let sums = weighted_integral_sums(psi, k, alpha, radii)?;
    let ratios = increment_ratios(&sums);
    let worst = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (split_lhs, split_rhs) = holder_split(psi, k, alpha, *radii.last().expect("nonempty"))?;
    let mut r = checker
        .result("weighted_integral", case, CheckForm::Multiplicative, worst, 1.0)
        .with_extra("k", k)
        .with_extra("alpha", alpha)
        .with_extra("integral", *sums.last().expect("nonempty"))
        .with_extra("holder_split_lhs", split_lhs)
        .with_extra("holder_split_rhs", split_rhs);
    if worst >= 1.0 {
        r = r.fail_with("Cauchy increments do not decay");
    } else if split_lhs > split_rhs * (1.0 + checker.tolerance("weighted_integral")) {
        r = r.fail_with("Hölder split bound violated");
    }
    Ok(r)
}

/// Observed increment behaviour of the weighted integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    pub k: f64,
    pub alpha: f64,
    pub a: f64,
    pub radii: Vec<f64>,
    pub sums: Vec<f64>,
    pub ratios: Vec<f64>,
    /// All increment ratios below one.
    pub decays: bool,
    /// All increment ratios at least one.
    pub stalls: bool,
    /// Decay predicted from the tail exponent: `α > 3 + 3k − 2ak`.
    pub predicted_decay: bool,
}

/// Increment behaviour of `I(R)` for a scalar mode with decay exponent `a`,
/// without the parameter range enforced by `check_weighted_integral`. Radii from `radii[0]`
/// onwards enter the ratios.
pub fn probe_weighted_integral(grid: GridSpec, a: f64, k: f64, alpha: f64, radii: &[f64]) -> Result<ProbeOutcome> {
    if grid.n() != 3 {
        return Err(Error::Domain("the probe is three-dimensional".into()));
    }
    let sig = AlgebraSignature::real(3, 3)?;
    let psi = SyntheticMode::new(a, Multivector::scalar(sig, 1.0), 0.0, 3)?.sample_psi(grid)?;
    let sums = weighted_integral_sums(&psi, k, alpha, radii)?;
    let ratios = increment_ratios(&sums);
    if ratios.is_empty() {
        return Err(Error::Parameter("need at least three radii".into()));
    }
    Ok(ProbeOutcome {
        k,
        alpha,
        a,
        radii: radii.to_vec(),
        decays: ratios.iter().all(|r| *r < 1.0),
        stalls: ratios.iter().all(|r| *r >= 1.0),
        predicted_decay: alpha > 3.0 + 3.0 * k - 2.0 * a * k,
        sums,
        ratios,
    })
}

/// Grid, decay exponent and radii of the sharpness probe. `a` sits just above
/// the square-integrability threshold, where the predicted cut-off in `α`
/// approaches `3 + k/2`.
pub const PROBE_GRID: (usize, f64) = (128, 32.0);
pub const PROBE_A: f64 = 1.26;
pub const PROBE_RADII: [f64; 4] = [4.0, 8.0, 16.0, 32.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub k: f64,
    pub alpha_new: f64,
    pub alpha_prior: f64,
    pub improvement: bool,
}

pub fn compare_thresholds_table(k_grid: &[f64]) -> Result<Vec<ThresholdRow>> {
    k_grid
        .iter()
        .map(|&k| {
            if !(1.0..4.0 / 3.0).contains(&k) {
                return Err(Error::Parameter(format!("k = {k} outside [1, 4/3)")));
            }
            let (alpha_new, alpha_prior) = zero_mode_thresholds(k)?;
            Ok(ThresholdRow { k, alpha_new, alpha_prior, improvement: alpha_new < alpha_prior })
        })
        .collect()
}

/// Evenly spaced `k` values covering `[1, 4/3)`.
pub fn default_k_grid(count: usize) -> Vec<f64> {
    (0..count).map(|i| 1.0 + (1.0 / 3.0) * i as f64 / count as f64).collect()
}

pub fn write_threshold_csv<W: Write>(rows: &[ThresholdRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["k", "alpha_new", "alpha_prior", "improvement"])?;
    for r in rows {
        w.write_record([format!("{:.17e}", r.k), format!("{:.17e}", r.alpha_new), format!("{:.17e}", r.alpha_prior), r.improvement.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Random complex direction in `C_{n+1}`.
pub fn random_direction(sig: AlgebraSignature, seed: u64, index: usize) -> Result<Multivector> {
    let mut rng = case_rng(seed, 500, index as u64);
    let coeffs = (0..sig.blade_count()).map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))).collect();
    Multivector::from_coeffs(sig, coeffs)
}

pub(crate) fn run_zero_modes(cfg: &SuiteConfig, checker: &Checker) -> Vec<CheckResult> {
    let n = cfg.grid.n();
    let directions = cfg.cases.min(20);
    let mut out = Vec::new();
    let sig = match AlgebraSignature::complex(n, n + 1) {
        Ok(s) => s,
        Err(e) => return vec![checker.errored("zero_modes", "setup", &e)],
    };
    let cases: Vec<(f64, usize)> = DECAY_EXPONENTS.iter().flat_map(|&a| (0..directions).map(move |i| (a, i))).collect();
    let chain = crate::harness::over_cases(cases.len(), |c| {
        let (a, i) = cases[c];
        let case = format!("a{a}#{i}");
        crate::harness::timed(checker, "zero_weighted_sobolev", &case, || {
            let u0 = random_direction(sig, cfg.seed, i)?;
            let (psi, dpsi) = synthesize_mode(a, &u0, 1.0, cfg.grid)?;
            let mut r = check_weighted_chain(checker, &case, &psi, &dpsi)?.to_vec();
            if n == 3 && a == 2.0 {
                r.push(check_weighted_integral(checker, &case, &psi, 1.0, 3.6, &dyadic_radii(cfg.grid.extent()))?);
            }
            Ok(r)
        })
    });
    out.extend(chain);

    out.extend(crate::harness::timed(checker, "weighted_integral_probe", "probe", || {
        let grid = GridSpec::new(3, PROBE_GRID.0, PROBE_GRID.1)?;
        let mut r = Vec::new();
        for alpha in [3.6, 3.4] {
            let p = probe_weighted_integral(grid, PROBE_A, 1.0, alpha, &PROBE_RADII)?;
            let observed: f64 = if p.decays {
                1.0
            } else if p.stalls {
                0.0
            } else {
                0.5
            };
            let expected = if p.predicted_decay { 1.0 } else { 0.0 };
            let mut res = checker
                .result("weighted_integral_probe", &format!("alpha{alpha}"), CheckForm::Identity, (observed - expected).abs(), 0.0)
                .with_extra("a", p.a)
                .with_extra("alpha", alpha)
                .with_extra("k", p.k);
            for (j, ratio) in p.ratios.iter().enumerate() {
                res = res.with_extra(&format!("ratio_{j}"), *ratio);
            }
            r.push(res.with_note(if p.decays {
                "increments decay"
            } else if p.stalls {
                "increments stall"
            } else {
                "increments mixed"
            }));
        }
        Ok(r)
    }));

    out.extend(crate::harness::timed(checker, "threshold_table", "k_grid", || {
        let rows = compare_thresholds_table(&default_k_grid(10))?;
        let violations = rows.iter().filter(|r| !r.improvement).count();
        let gap = rows.iter().map(|r| r.alpha_prior - r.alpha_new).fold(f64::INFINITY, f64::min);
        Ok(vec![checker
            .result("threshold_table", "k_grid", CheckForm::Identity, violations as f64, 0.0)
            .with_extra("min_gap", gap)])
    }));
    out
}
