//! The Dirac operator `D = Σ e_j ∂_j` on sampled fields, its powers and heat
//! flow as Fourier multipliers, the fundamental solutions `k_l`, Riesz
//! potentials, and zero-padded kernel convolution.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{blade_mul, AlgebraSignature, Multivector};
use crate::constants::{fundamental_coefficient, omega_with, sphere_area, OmegaConvention};
use crate::error::{Error, Result};
use crate::fft::NdFft;
use crate::grid::{CliffordField, GridSpec};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Fourier-space calculus on one grid.
#[derive(Debug, Clone)]
pub struct SpectralPlan {
    grid: GridSpec,
    fft: NdFft,
    wavenumbers: Vec<f64>,
}

impl SpectralPlan {
    pub fn new(grid: GridSpec) -> Self {
        let wavenumbers = (0..grid.points()).map(|i| grid.wavenumber(i)).collect();
        Self { grid, fft: NdFft::new(grid.n(), grid.points()), wavenumbers }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn forward(&self, samples: &[Complex64]) -> Vec<Complex64> {
        let mut buf = samples.to_vec();
        self.fft.forward(&mut buf);
        buf
    }

    pub fn inverse(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        let mut buf = spectrum.to_vec();
        self.fft.inverse(&mut buf);
        buf
    }

    /// Wave vector of bin `flat`, written to `xi`; returns `|ξ|²`.
    fn xi(&self, flat: usize, xi: &mut [f64]) -> f64 {
        let np = self.grid.points();
        let mut rest = flat;
        let mut s = 0.0;
        for k in (0..self.grid.n()).rev() {
            let w = self.wavenumbers[rest % np];
            xi[k] = w;
            s += w * w;
            rest /= np;
        }
        s
    }

    /// Component `axis` of the wave vector of bin `flat`.
    fn xi_axis(&self, flat: usize, axis: usize) -> f64 {
        let np = self.grid.points();
        self.wavenumbers[(flat / np.pow((self.grid.n() - 1 - axis) as u32)) % np]
    }

    fn check(&self, f: &CliffordField) -> Result<()> {
        self.grid.ensure_same(f.grid())
    }

    /// Apply the multiplier `s(|ξ|²)` or, with `vector`, `s(|ξ|²) Σ_j i ξ_j e_j`
    /// acting from the left.
    pub fn apply_symbol<S>(&self, f: &CliffordField, symbol: S, vector: bool) -> Result<CliffordField>
    where
        S: Fn(f64) -> f64 + Sync,
    {
        self.check(f)?;
        let n = self.grid.n();
        let len = self.grid.len();
        let factors: Vec<f64> = (0..len)
            .into_par_iter()
            .map_init(|| vec![0.0; n], |xi, i| symbol(self.xi(i, xi)))
            .collect();
        let mut out: Vec<Option<Vec<Complex64>>> = vec![None; f.sig().blade_count()];
        for (mask, comp) in f.components().iter().enumerate() {
            let Some(comp) = comp else { continue };
            let spec = self.forward(comp);
            if !vector {
                out[mask] = Some(spec.par_iter().zip(&factors).map(|(z, s)| z * s).collect());
                continue;
            }
            for j in 0..n {
                let (sign, target) = blade_mul(1 << j, mask);
                let slot = out[target].get_or_insert_with(|| vec![ZERO; len]);
                slot.par_iter_mut().enumerate().for_each(|(i, t)| {
                    *t += I * (sign * self.xi_axis(i, j) * factors[i]) * spec[i];
                });
            }
        }
        let components = out
            .into_iter()
            .map(|c| {
                c.map(|mut s| {
                    self.fft.inverse(&mut s);
                    s
                })
            })
            .collect();
        Ok(CliffordField::from_raw(self.grid, f.sig(), components))
    }

    pub fn dirac(&self, f: &CliffordField) -> Result<CliffordField> {
        self.apply_symbol(f, |_| 1.0, true)
    }

    /// `D^l` as one multiplier: `|ξ|^{2j}` for `l = 2j`, `|ξ|^{2j} iξ` for `l = 2j + 1`.
    pub fn dirac_power(&self, f: &CliffordField, l: usize) -> Result<CliffordField> {
        if l == 0 {
            return Err(Error::Parameter("dirac_power needs l >= 1".into()));
        }
        let j = (l / 2) as i32;
        self.apply_symbol(f, move |k2| k2.powi(j), l % 2 == 1)
    }

    pub fn laplacian(&self, f: &CliffordField) -> Result<CliffordField> {
        self.apply_symbol(f, |k2| -k2, false)
    }

    /// Heat semigroup `e^{tΔ}`.
    pub fn heat(&self, f: &CliffordField, t: f64) -> Result<CliffordField> {
        if !(t >= 0.0) {
            return Err(Error::Parameter(format!("heat flow needs t >= 0, got {t}")));
        }
        if t == 0.0 {
            self.check(f)?;
            return Ok(f.clone());
        }
        self.apply_symbol(f, move |k2| (-k2 * t).exp(), false)
    }

    /// Component-wise partial derivative along `axis`.
    pub fn partial(&self, f: &CliffordField, axis: usize) -> Result<CliffordField> {
        self.check(f)?;
        if axis >= self.grid.n() {
            return Err(Error::Parameter(format!("axis {axis} outside dimension {}", self.grid.n())));
        }
        let components = f
            .components()
            .iter()
            .map(|c| {
                c.as_ref().map(|c| {
                    let mut spec = self.forward(c);
                    spec.par_iter_mut().enumerate().for_each(|(i, z)| *z *= I * self.xi_axis(i, axis));
                    self.fft.inverse(&mut spec);
                    spec
                })
            })
            .collect();
        Ok(CliffordField::from_raw(self.grid, f.sig(), components))
    }

    /// `‖∇f‖₂ = (Σ_j ‖∂_j f‖₂²)^{1/2}`, from physical-space partials.
    pub fn gradient_norm(&self, f: &CliffordField) -> Result<f64> {
        let mut total = 0.0;
        for axis in 0..self.grid.n() {
            total += self.partial(f, axis)?.norm(2.0)?.powi(2);
        }
        Ok(total.sqrt())
    }
}

pub fn dirac_apply(f: &CliffordField) -> Result<CliffordField> {
    SpectralPlan::new(*f.grid()).dirac(f)
}

pub fn dirac_power(f: &CliffordField, l: usize) -> Result<CliffordField> {
    SpectralPlan::new(*f.grid()).dirac_power(f, l)
}

pub fn laplacian_apply(f: &CliffordField) -> Result<CliffordField> {
    SpectralPlan::new(*f.grid()).laplacian(f)
}

pub fn heat_evolve(f: &CliffordField, t: f64) -> Result<CliffordField> {
    SpectralPlan::new(*f.grid()).heat(f, t)
}

/// Overall sign of the kernel `k_l = ∓(c_l/ω_n) x̄^l/|x|^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelSign {
    /// Leading minus sign.
    #[default]
    Printed,
    /// Leading plus sign.
    Flipped,
}

impl KernelSign {
    pub fn factor(&self) -> f64 {
        match self {
            KernelSign::Printed => -1.0,
            KernelSign::Flipped => 1.0,
        }
    }
}

impl fmt::Display for KernelSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelSign::Printed => "printed",
            KernelSign::Flipped => "flipped",
        })
    }
}

/// Normalisation of `k_l`: which ω_n divides it and which sign leads it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KernelConvention {
    pub omega: OmegaConvention,
    pub sign: KernelSign,
}

impl KernelConvention {
    pub const ALL: [KernelConvention; 4] = [
        KernelConvention { omega: OmegaConvention::Paper, sign: KernelSign::Printed },
        KernelConvention { omega: OmegaConvention::Paper, sign: KernelSign::Flipped },
        KernelConvention { omega: OmegaConvention::Sphere, sign: KernelSign::Printed },
        KernelConvention { omega: OmegaConvention::Sphere, sign: KernelSign::Flipped },
    ];
}

impl fmt::Display for KernelConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "omega={}, sign={}", self.omega, self.sign)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// `k_1`, the Cauchy kernel.
    Cauchy,
    /// `k_l` with `D^l k_l = δ`.
    Fundamental(usize),
    /// `|x|^{-λ}`
    Riesz(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub convention: KernelConvention,
}

impl KernelSpec {
    pub fn cauchy(convention: KernelConvention) -> Self {
        Self { kind: KernelKind::Cauchy, convention }
    }

    pub fn fundamental(l: usize, convention: KernelConvention) -> Self {
        Self { kind: KernelKind::Fundamental(l), convention }
    }

    pub fn riesz(lambda: f64) -> Self {
        Self { kind: KernelKind::Riesz(lambda), convention: KernelConvention::default() }
    }

    fn order(&self) -> Option<usize> {
        match self.kind {
            KernelKind::Cauchy => Some(1),
            KernelKind::Fundamental(l) => Some(l),
            KernelKind::Riesz(_) => None,
        }
    }

    /// Check admissibility for dimension `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self.kind {
            KernelKind::Riesz(lambda) => {
                if !(lambda > 0.0 && lambda < n as f64) {
                    return Err(Error::Parameter(format!("riesz exponent {lambda} outside (0, {n})")));
                }
            }
            _ => {
                let l = self.order().unwrap_or(1);
                if l == 0 || l >= n {
                    return Err(Error::Parameter(format!("kernel order l = {l} must satisfy 1 <= l < n = {n}")));
                }
                fundamental_coefficient(l, n)?;
            }
        }
        Ok(())
    }

    /// `±c_l / ω_n` for the fundamental kernels.
    fn coefficient(&self, n: usize) -> Result<f64> {
        let l = self.order().expect("fundamental kernel");
        Ok(self.convention.sign.factor() * fundamental_coefficient(l, n)? / omega_with(n, self.convention.omega)?)
    }

    /// Kernel value at `x ≠ 0`, with `x̄^l` formed by repeated Clifford products.
    pub fn value(&self, sig: AlgebraSignature, x: &[f64]) -> Result<Multivector> {
        let n = x.len();
        self.validate(n)?;
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if r == 0.0 {
            return Err(Error::Singular("kernel evaluated at the origin".into()));
        }
        match self.kind {
            KernelKind::Riesz(lambda) => Ok(Multivector::scalar(sig, r.powf(-lambda))),
            _ => {
                let l = self.order().unwrap_or(1);
                let xbar = Multivector::vector(sig, x)?.conjugate();
                let mut power = xbar.clone();
                for _ in 1..l {
                    power = power.geometric_product(&xbar)?;
                }
                Ok(power.scale(self.coefficient(n)? / r.powi(n as i32)))
            }
        }
    }

    /// Closed radial form: `(scalar amplitude, vector amplitude)` such that the
    /// kernel equals `a(r)` (even order, Riesz) or `b(r) x` (odd order).
    fn radial(&self, n: usize, r: f64) -> Result<(f64, f64)> {
        match self.kind {
            KernelKind::Riesz(lambda) => Ok((r.powf(-lambda), 0.0)),
            _ => {
                let l = self.order().unwrap_or(1);
                let j = (l / 2) as i32;
                let c = self.coefficient(n)?;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                if l.is_multiple_of(2) {
                    // x̄^{2j} = (-1)^j |x|^{2j}
                    Ok((c * sign * r.powi(l as i32 - n as i32), 0.0))
                } else {
                    // x̄^{2j+1} = (-1)^{j+1} |x|^{2j} x
                    Ok((0.0, -c * sign * r.powi(2 * j - n as i32)))
                }
            }
        }
    }

    /// Cell-average of the kernel over the ball of volume `h^n` centred at 0.
    fn singular_cell(&self, n: usize, h: f64) -> Result<(f64, f64)> {
        let nf = n as f64;
        let rc = (h.powi(n as i32) * nf / sphere_area(n)).powf(1.0 / nf);
        match self.kind {
            KernelKind::Riesz(lambda) => Ok((nf / (nf - lambda) * rc.powf(-lambda), 0.0)),
            _ => {
                let l = self.order().unwrap_or(1);
                if l % 2 == 1 {
                    return Ok((0.0, 0.0));
                }
                let (a, _) = self.radial(n, rc)?;
                Ok((a * nf / l as f64, 0.0))
            }
        }
    }
}

/// Sample a kernel at every cell centre of `grid`.
pub fn kernel_field(grid: GridSpec, sig: AlgebraSignature, spec: KernelSpec) -> Result<CliffordField> {
    spec.validate(grid.n())?;
    if grid.n() > sig.m() {
        return Err(Error::Domain(format!("grid dimension {} exceeds m = {}", grid.n(), sig.m())));
    }
    crate::grid::sample_field(grid, sig, |x| spec.value(sig, x).expect("cell centres avoid the origin"))
}

/// Output of a kernel convolution, with the truncation diagnostic.
#[derive(Debug, Clone)]
pub struct Convolved {
    pub field: CliffordField,
    pub truncation_warning: Option<String>,
}

/// Linear convolution `k * f` on `grid`, evaluated on the doubled grid
/// `[-2L, 2L)^n` where the kernel is sampled once and kept in Fourier space.
#[derive(Debug, Clone)]
pub struct ConvolutionPlan {
    grid: GridSpec,
    padded: GridSpec,
    fft: NdFft,
    spec: KernelSpec,
    kernel_hat: Vec<(usize, Vec<Complex64>)>,
}

/// Relative level above which the outer shell counts as not decayed.
pub const TRUNCATION_LEVEL: f64 = 1e-8;

impl ConvolutionPlan {
    pub fn new(grid: GridSpec, spec: KernelSpec) -> Result<Self> {
        let n = grid.n();
        spec.validate(n)?;
        let np = grid.points();
        let padded = GridSpec::new(n, 2 * np, 2.0 * grid.extent())?;
        let fft = NdFft::new(n, 2 * np);
        let h = grid.spacing();
        let total = padded.len();
        let singular = spec.singular_cell(n, h)?;
        let vector = matches!(spec.order(), Some(l) if l % 2 == 1);

        // displacement of wrap-ordered index i along one axis
        let disp = |i: usize| if i < np { i as f64 * h } else { (i as f64 - 2.0 * np as f64) * h };
        let sample = |flat: usize, x: &mut [f64]| -> Result<(f64, f64)> {
            let mut rest = flat;
            for k in (0..n).rev() {
                x[k] = disp(rest % (2 * np));
                rest /= 2 * np;
            }
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            if r == 0.0 {
                Ok(singular)
            } else {
                spec.radial(n, r)
            }
        };

        let mut kernel_hat = Vec::new();
        if vector {
            for j in 0..n {
                let mut comp: Vec<Complex64> = (0..total)
                    .into_par_iter()
                    .map_init(|| vec![0.0; n], |x, i| {
                        let (_, b) = sample(i, x).expect("validated kernel");
                        Complex64::new(b * x[j], 0.0)
                    })
                    .collect();
                fft.forward(&mut comp);
                kernel_hat.push((1usize << j, comp));
            }
        } else {
            let mut comp: Vec<Complex64> = (0..total)
                .into_par_iter()
                .map_init(|| vec![0.0; n], |x, i| Complex64::new(sample(i, x).expect("validated kernel").0, 0.0))
                .collect();
            fft.forward(&mut comp);
            kernel_hat.push((0, comp));
        }
        Ok(Self { grid, padded, fft, spec, kernel_hat })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn padded_grid(&self) -> &GridSpec {
        &self.padded
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    /// Copy samples into the centre of the doubled grid.
    pub fn embed(&self, samples: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.n();
        let mut out = vec![ZERO; self.padded.len()];
        let off = self.grid.points() / 2;
        let mut idx = vec![0; n];
        for (i, &z) in samples.iter().enumerate() {
            self.grid.unflatten(i, &mut idx);
            idx.iter_mut().for_each(|k| *k += off);
            out[self.padded.flatten(&idx)] = z;
        }
        out
    }

    /// Restrict a field on the doubled grid to the original box.
    pub fn crop(&self, f: &CliffordField) -> Result<CliffordField> {
        self.padded.ensure_same(f.grid())?;
        let n = self.grid.n();
        let off = self.grid.points() / 2;
        let components = f
            .components()
            .iter()
            .map(|c| {
                c.as_ref().map(|c| {
                    (0..self.grid.len())
                        .into_par_iter()
                        .map_init(|| vec![0; n], |idx, i| {
                            self.grid.unflatten(i, idx);
                            idx.iter_mut().for_each(|k| *k += off);
                            c[self.padded.flatten(idx)]
                        })
                        .collect()
                })
            })
            .collect();
        Ok(CliffordField::from_raw(self.grid, f.sig(), components))
    }

    /// `k * f` on the whole doubled grid. Values are exact linear-convolution
    /// sums inside the original box.
    pub fn convolve_padded(&self, f: &CliffordField) -> Result<Convolved> {
        self.grid.ensure_same(f.grid())?;
        if self.grid.n() > f.sig().m() {
            return Err(Error::Domain("field algebra too small for the kernel".into()));
        }
        let ratio = f.boundary_ratio(0.1);
        let truncation_warning = (ratio > TRUNCATION_LEVEL)
            .then(|| format!("field is {ratio:.3e} of its maximum on the outer shell; truncation error not controlled"));
        let len = self.padded.len();
        let mut out: Vec<Option<Vec<Complex64>>> = vec![None; f.sig().blade_count()];
        for (b, comp) in f.components().iter().enumerate() {
            let Some(comp) = comp else { continue };
            let mut spec = self.embed(comp);
            self.fft.forward(&mut spec);
            for (a, khat) in &self.kernel_hat {
                let (sign, target) = blade_mul(*a, b);
                let slot = out[target].get_or_insert_with(|| vec![ZERO; len]);
                slot.par_iter_mut().zip(khat.par_iter().zip(&spec)).for_each(|(t, (k, s))| *t += k * s * sign);
            }
        }
        let dv = self.grid.cell_volume();
        let components = out
            .into_iter()
            .map(|c| {
                c.map(|mut s| {
                    self.fft.inverse(&mut s);
                    s.par_iter_mut().for_each(|z| *z *= dv);
                    s
                })
            })
            .collect();
        Ok(Convolved { field: CliffordField::from_raw(self.padded, f.sig(), components), truncation_warning })
    }

    /// `k * f` restricted to the original box.
    pub fn convolve(&self, f: &CliffordField) -> Result<Convolved> {
        let padded = self.convolve_padded(f)?;
        Ok(Convolved { field: self.crop(&padded.field)?, truncation_warning: padded.truncation_warning })
    }
}

pub fn convolve(f: &CliffordField, spec: KernelSpec) -> Result<Convolved> {
    ConvolutionPlan::new(*f.grid(), spec)?.convolve(f)
}

/// `‖D(k_1 * g) − g‖₂ / ‖g‖₂` for the Cauchy kernel under `convention`.
///
/// `D` is applied spectrally on the doubled grid and the result cropped, so the
/// periodic seam of the doubled grid stays away from the box.
pub fn teodorescu_residual(plan: &ConvolutionPlan, g: &CliffordField) -> Result<f64> {
    if plan.spec().kind != KernelKind::Cauchy {
        return Err(Error::Parameter("teodorescu_residual needs a Cauchy-kernel plan".into()));
    }
    let tg = plan.convolve_padded(g)?;
    let dtg = SpectralPlan::new(*plan.padded_grid()).dirac(&tg.field)?;
    let back = plan.crop(&dtg)?;
    let norm = g.norm(2.0)?;
    if norm == 0.0 {
        return Err(Error::Degenerate("teodorescu residual of a zero field".into()));
    }
    Ok(back.try_sub(g)?.norm(2.0)? / norm)
}

/// Worst Teodorescu residual of each kernel convention over a set of fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionScan {
    pub residuals: Vec<(KernelConvention, f64)>,
    pub tolerance: f64,
    /// The unique convention within tolerance, if exactly one is.
    pub selected: Option<KernelConvention>,
}

pub fn scan_kernel_conventions(fields: &[CliffordField], tolerance: f64) -> Result<ConventionScan> {
    let grid = *fields.first().ok_or_else(|| Error::Parameter("no fields to scan".into()))?.grid();
    let mut residuals = Vec::new();
    for conv in KernelConvention::ALL {
        let plan = ConvolutionPlan::new(grid, KernelSpec::cauchy(conv))?;
        let mut worst = 0.0f64;
        for g in fields {
            worst = worst.max(teodorescu_residual(&plan, g)?);
        }
        residuals.push((conv, worst));
    }
    let passing: Vec<_> = residuals.iter().filter(|(_, r)| *r <= tolerance).map(|(c, _)| *c).collect();
    let selected = (passing.len() == 1).then(|| passing[0]);
    Ok(ConventionScan { residuals, tolerance, selected })
}

/// `x̄^p / |x|^n` in `R_{0,n}`; negative `p` uses `x̄^{-1}`.
fn kernel_power(sig: AlgebraSignature, x: &[f64], p: i32) -> Result<Multivector> {
    let xbar = Multivector::vector(sig, x)?.conjugate();
    let base = if p < 0 { xbar.vector_inverse()? } else { xbar };
    let mut acc = Multivector::scalar(sig, 1.0);
    for _ in 0..p.unsigned_abs() {
        acc = acc.geometric_product(&base)?;
    }
    let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    Ok(acc.scale(r.powi(-(x.len() as i32))))
}

/// Finite-difference check of
/// `D(x̄^{2j}/|x|^n) = (2j − n) x̄^{2j−1}/|x|^n` and
/// `D(x̄^{2j+1}/|x|^n) = 2j x̄^{2j}/|x|^n`.
///
/// Central differences with step `1e-4`; the error at each point is relative
/// to `max(|rhs|, Σ_k |∂_k F|, |F|/|x|)`, which stays meaningful when the
/// right side vanishes (e.g. `F` constant when `2j = n`). Returns the largest
/// error over both identities and all points.
pub fn kernel_recursion_check(j: usize, n: usize, points: &[Vec<f64>]) -> Result<f64> {
    const STEP: f64 = 1e-4;
    let sig = AlgebraSignature::real(n, n)?;
    let j = j as i32;
    let nf = n as f64;
    let mut worst = 0.0f64;
    for x in points {
        if x.len() != n {
            return Err(Error::Domain(format!("sample point has {} coordinates, expected {n}", x.len())));
        }
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if r < 0.5 {
            return Err(Error::Domain(format!("sample point at |x| = {r} is closer than 0.5 to the origin")));
        }
        for (power, rhs_power, factor) in [(2 * j, 2 * j - 1, 2.0 * j as f64 - nf), (2 * j + 1, 2 * j, 2.0 * j as f64)] {
            let mut lhs = Multivector::zero(sig);
            let mut scale = 0.0;
            for k in 0..n {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[k] += STEP;
                xm[k] -= STEP;
                let d = kernel_power(sig, &xp, power)?.try_sub(&kernel_power(sig, &xm, power)?)?.scale(0.5 / STEP);
                scale += d.norm();
                lhs = lhs.try_add(&Multivector::blade(sig, 1 << k, 1.0).geometric_product(&d)?)?;
            }
            let rhs = kernel_power(sig, x, rhs_power)?.scale(factor);
            let denom = rhs.norm().max(scale).max(kernel_power(sig, x, power)?.norm() / r);
            worst = worst.max(lhs.try_sub(&rhs)?.norm() / denom);
        }
    }
    Ok(worst)
}

/// `Re⟨x v, D v⟩` for `v` rescaled to unit `L²` norm.
pub fn radial_identity_check(v: &CliffordField) -> Result<f64> {
    let norm = v.norm(2.0)?;
    if norm == 0.0 {
        return Err(Error::Degenerate("radial identity of a zero field".into()));
    }
    let v = v.scale(1.0 / norm);
    let x = CliffordField::position(*v.grid(), v.sig())?;
    let xv = x.pointwise_product(&v)?;
    let dv = dirac_apply(&v)?;
    Ok(xv.inner_product_scalar(&dv)?.re)
}
