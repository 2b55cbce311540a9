//! Closed-form constants: ω_n, HLS constants, Sobolev constants, the
//! fundamental-solution coefficients c_l, the Gaussian normalizer and the
//! heat-decay envelope.

use std::f64::consts::{E, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::clifford::{kn_constant, AlgebraSignature, ScalarField};
use crate::error::{Error, Result};
use crate::gamma::{gamma, gamma_ratio};

/// Which normalisation of ω_n is in force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OmegaConvention {
    /// `Γ(n/2) / π^{n/2}`
    #[default]
    Paper,
    /// Area of the unit sphere in R^n, `2π^{n/2} / Γ(n/2)`.
    Sphere,
}

impl fmt::Display for OmegaConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OmegaConvention::Paper => "paper",
            OmegaConvention::Sphere => "sphere",
        })
    }
}

impl std::str::FromStr for OmegaConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(OmegaConvention::Paper),
            "sphere" => Ok(OmegaConvention::Sphere),
            other => Err(Error::Parameter(format!("unknown omega convention `{other}`"))),
        }
    }
}

/// Surface area of the unit sphere in R^n.
pub fn sphere_area(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// ω_n = Γ(n/2)/π^{n/2}, the default normalisation.
pub fn omega_n(n: usize) -> Result<f64> {
    omega_with(n, OmegaConvention::Paper)
}

/// ω_n under an explicit convention.
pub fn omega_with(n: usize, convention: OmegaConvention) -> Result<f64> {
    if n < 2 {
        return Err(Error::Parameter(format!("omega_n needs n >= 2, got {n}")));
    }
    let h = n as f64 / 2.0;
    Ok(match convention {
        OmegaConvention::Paper => gamma(h) / PI.powf(h),
        OmegaConvention::Sphere => sphere_area(n),
    })
}

/// Exponent pairing of the HLS inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HlsMode {
    /// `p = q = 2n/(2n − λ)`, valid for `0 < λ < n`.
    Diagonal,
    /// `q = 2`, `p = 2n/(3n − 2λ)`, valid for `n < 2λ < 2n`.
    L2,
}

impl fmt::Display for HlsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HlsMode::Diagonal => "diagonal",
            HlsMode::L2 => "l2",
        })
    }
}

fn check_hls_range(n: usize, lambda: f64, mode: HlsMode) -> Result<()> {
    let nf = n as f64;
    let ok = match mode {
        HlsMode::Diagonal => lambda > 0.0 && lambda < nf,
        HlsMode::L2 => nf < 2.0 * lambda && 2.0 * lambda < 2.0 * nf,
    };
    if ok && n >= 1 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("lambda = {lambda} outside the {mode} range for n = {n}")))
    }
}

/// Exponents `(p, q)` of the two factors in the HLS pairing.
pub fn hls_exponents(n: usize, lambda: f64, mode: HlsMode) -> Result<(f64, f64)> {
    check_hls_range(n, lambda, mode)?;
    let nf = n as f64;
    Ok(match mode {
        HlsMode::Diagonal => {
            let p = 2.0 * nf / (2.0 * nf - lambda);
            (p, p)
        }
        HlsMode::L2 => (2.0 * nf / (3.0 * nf - 2.0 * lambda), 2.0),
    })
}

/// HLS constant without the algebra factor K_m.
fn hls_scalar_part(n: usize, lambda: f64, mode: HlsMode) -> Result<f64> {
    check_hls_range(n, lambda, mode)?;
    let nf = n as f64;
    let base = PI.powf(lambda / 2.0)
        * gamma_ratio(nf / 2.0 - lambda / 2.0, nf - lambda / 2.0)
        * gamma_ratio(nf / 2.0, nf).powf(-1.0 + lambda / nf);
    Ok(match mode {
        HlsMode::Diagonal => base,
        HlsMode::L2 => base * gamma_ratio(lambda - nf / 2.0, 1.5 * nf - lambda).sqrt(),
    })
}

/// HLS constant `C_{p,λ,n,m}` for Clifford-valued functions.
pub fn hls_constant(n: usize, lambda: f64, m: usize, field: ScalarField, mode: HlsMode) -> Result<f64> {
    Ok(kn_constant(m, field) * hls_scalar_part(n, lambda, mode)?)
}

/// The two Sobolev constants for `‖f‖_{2n/(n−2)} ≤ C ‖Df‖₂` and their minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevC1 {
    pub plancherel: f64,
    pub young: f64,
    pub min: f64,
}

/// Sobolev constants with the default ω_n.
pub fn sobolev_c1(n: usize, m: usize, field: ScalarField) -> Result<SobolevC1> {
    sobolev_c1_with(n, m, field, OmegaConvention::Paper)
}

/// Sobolev constants with an explicit ω_n convention.
///
/// The Plancherel route gives `C₁² = K³ C_HLS(λ = n−2) / ((n−2) ω_n)` where
/// `C_HLS` excludes its K factor; the Young route is `C_1` of [`sobolev_cl`].
pub fn sobolev_c1_with(n: usize, m: usize, field: ScalarField, convention: OmegaConvention) -> Result<SobolevC1> {
    if n < 3 {
        return Err(Error::Parameter(format!("sobolev constants need n >= 3, got {n}")));
    }
    if m < n {
        return Err(Error::Parameter(format!("sobolev constants need m >= n, got n={n}, m={m}")));
    }
    let k = kn_constant(m, field);
    let nf = n as f64;
    let hls = hls_scalar_part(n, nf - 2.0, HlsMode::Diagonal)?;
    let plancherel = (k.powi(3) * hls / ((nf - 2.0) * omega_with(n, convention)?)).sqrt();
    let young = sobolev_cl_with(1, n, convention)?;
    Ok(SobolevC1 { plancherel, young, min: plancherel.min(young) })
}

/// Coefficient c_l of the fundamental solution `k_l = c_l x̄^l / (ω_n |x|^n)`.
pub fn fundamental_coefficient(l: usize, n: usize) -> Result<f64> {
    if l == 0 {
        return Err(Error::Parameter("fundamental_coefficient needs l >= 1".into()));
    }
    let j = l / 2;
    let mut prod = 1.0;
    for h in 1..=j {
        let factor = 2.0 * h as f64 - n as f64;
        if factor == 0.0 {
            return Err(Error::Singular(format!("c_{l} has a vanishing factor 2h - n at h = {h}, n = {n}")));
        }
        prod *= factor;
    }
    let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
    let lead = if l.is_multiple_of(2) {
        2f64.powi(j as i32 - 1) * fact(j - 1)
    } else {
        2f64.powi(j as i32) * fact(j)
    };
    Ok(1.0 / (lead * prod))
}

/// `C_l = c_l n^{(l−n)/n} ω_n^{−l/n}` with the default ω_n.
pub fn sobolev_cl(l: usize, n: usize) -> Result<f64> {
    sobolev_cl_with(l, n, OmegaConvention::Paper)
}

/// `C_l` under an explicit ω_n convention.
pub fn sobolev_cl_with(l: usize, n: usize, convention: OmegaConvention) -> Result<f64> {
    if l >= n {
        return Err(Error::Parameter(format!("sobolev_cl needs 1 <= l < n, got l={l}, n={n}")));
    }
    let c = fundamental_coefficient(l, n)?;
    let (lf, nf) = (l as f64, n as f64);
    Ok(c * nf.powf((lf - nf) / nf) * omega_with(n, convention)?.powf(-lf / nf))
}

/// Normaliser `k = (C₁ √(n e) / 2)^n` of the Gaussian measure.
pub fn gaussian_normalizer(n: usize, m: usize, field: ScalarField) -> Result<f64> {
    gaussian_normalizer_with(n, m, field, OmegaConvention::Paper)
}

pub fn gaussian_normalizer_with(n: usize, m: usize, field: ScalarField, convention: OmegaConvention) -> Result<f64> {
    let c1 = sobolev_c1_with(n, m, field, convention)?.min;
    Ok((c1 * (n as f64 * E).sqrt() / 2.0).powi(n as i32))
}

/// Heat-flow envelope `(16/(nC₁²) ‖f₀‖₁^{−4/n} t + ‖f₀‖₂^{−4/n})^{−n/4}`.
pub fn heat_decay_bound(t: f64, l1_0: f64, l2_0: f64, n: usize, c1: f64) -> Result<f64> {
    if !(l1_0 > 0.0 && l2_0 > 0.0) {
        return Err(Error::Parameter(format!("heat_decay_bound needs positive norms, got {l1_0}, {l2_0}")));
    }
    if !(t >= 0.0) {
        return Err(Error::Parameter(format!("heat_decay_bound needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(l2_0);
    }
    let nf = n as f64;
    let e = -4.0 / nf;
    Ok((16.0 / (nf * c1 * c1) * l1_0.powf(e) * t + l2_0.powf(e)).powf(-nf / 4.0))
}

/// `(3 + k/2, 6 − 11k/10)`: the new and the previously known integrability
/// thresholds on the weight exponent α.
pub fn zero_mode_thresholds(k: f64) -> Result<(f64, f64)> {
    if !(k > 0.0 && k < 6.0) {
        return Err(Error::Parameter(format!("zero_mode_thresholds needs 0 < k < 6, got {k}")));
    }
    Ok((3.0 + k / 2.0, 6.0 - 11.0 * k / 10.0))
}

/// One row of the C₁ comparison sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct C1SweepRow {
    pub n: usize,
    pub plancherel: f64,
    pub young: f64,
}

/// Evaluate both C₁ variants for `n` in `range`, with `m = n`.
pub fn c1_sweep(range: std::ops::RangeInclusive<usize>, field: ScalarField, convention: OmegaConvention) -> Result<Vec<C1SweepRow>> {
    range
        .map(|n| {
            let c = sobolev_c1_with(n, n, field, convention)?;
            Ok(C1SweepRow { n, plancherel: c.plancherel, young: c.young })
        })
        .collect()
}

/// First dimension in the sweep where the Plancherel constant is the smaller one.
pub fn c1_crossover(rows: &[C1SweepRow]) -> Option<usize> {
    rows.iter().find(|r| r.plancherel < r.young).map(|r| r.n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HlsEntry {
    pub mode: HlsMode,
    pub p: f64,
    pub q: f64,
    pub lambda: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevClEntry {
    pub l: usize,
    pub c_l: f64,
    #[serde(rename = "C_l")]
    pub big_c_l: f64,
}

/// Every constant relevant to a signature, in one serialisable table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsTable {
    pub n: usize,
    pub m: usize,
    pub field: ScalarField,
    pub omega_n: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "C1_plancherel")]
    pub c1_plancherel: f64,
    #[serde(rename = "C1_young")]
    pub c1_young: f64,
    #[serde(rename = "C1_min")]
    pub c1_min: f64,
    pub gaussian_k: f64,
    pub hls: Vec<HlsEntry>,
    pub sobolev_cl: Vec<SobolevClEntry>,
}

impl ConstantsTable {
    pub fn build(sig: AlgebraSignature, convention: OmegaConvention) -> Result<Self> {
        let (n, m, field) = (sig.n(), sig.m(), sig.field());
        let c1 = sobolev_c1_with(n, m, field, convention)?;
        let nf = n as f64;

        let mut hls = Vec::new();
        let mut push = |mode: HlsMode, lambda: f64| -> Result<()> {
            if check_hls_range(n, lambda, mode).is_err() || hls.iter().any(|e: &HlsEntry| e.mode == mode && e.lambda == lambda) {
                return Ok(());
            }
            let (p, q) = hls_exponents(n, lambda, mode)?;
            let value = hls_constant(n, lambda, m, field, mode)?;
            hls.push(HlsEntry { mode, p, q, lambda, value });
            Ok(())
        };
        for lambda in [1.0, 2.0, nf - 2.0, nf - 1.0] {
            push(HlsMode::Diagonal, lambda)?;
        }
        for lambda in [nf - 1.0, 2.0, 0.75 * nf] {
            push(HlsMode::L2, lambda)?;
        }

        let mut sobolev = Vec::new();
        for l in 1..n {
            if let (Ok(c_l), Ok(big)) = (fundamental_coefficient(l, n), sobolev_cl_with(l, n, convention)) {
                sobolev.push(SobolevClEntry { l, c_l, big_c_l: big });
            }
        }

        Ok(ConstantsTable {
            n,
            m,
            field,
            omega_n: omega_with(n, convention)?,
            k: kn_constant(m, field),
            c1_plancherel: c1.plancherel,
            c1_young: c1.young,
            c1_min: c1.min,
            gaussian_k: gaussian_normalizer_with(n, m, field, convention)?,
            hls,
            sobolev_cl: sobolev,
        })
    }
}
