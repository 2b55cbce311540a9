//! Uniform cell-centred grids on `[-L, L)^n` and Clifford-valued fields sampled on them.

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{blade_mul, conjugation_sign, AlgebraSignature, Multivector};
use crate::error::{Error, Result};
use crate::summation::{chunked_max, chunked_sum, chunked_sum_complex};

/// Upper bound on the number of cells of a single grid.
pub const MAX_CELLS: usize = 1 << 27;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn is_three_smooth(mut k: usize) -> bool {
    for p in [2, 3] {
        while k.is_multiple_of(p) {
            k /= p;
        }
    }
    k == 1
}

/// `N` points per axis covering `[-L, L)`, cell centres at `-L + (i + 1/2) h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    points: usize,
    extent: f64,
}

impl GridSpec {
    /// `points` must be even, at least 8, and have no prime factor other than 2 and 3.
    pub fn new(n: usize, points: usize, extent: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Grid("dimension must be at least 1".into()));
        }
        if points < 8 || !points.is_multiple_of(2) || !is_three_smooth(points) {
            return Err(Error::Grid(format!(
                "N = {points} must be even, at least 8, and a product of powers of 2 and 3"
            )));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::Grid(format!("half-extent L = {extent} must be positive")));
        }
        match points.checked_pow(n as u32) {
            Some(c) if c <= MAX_CELLS => {}
            _ => return Err(Error::Grid(format!("{points}^{n} cells exceed the limit {MAX_CELLS}"))),
        }
        Ok(Self { n, points, extent })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.points as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.n as i32)
    }

    /// Number of cells, `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of cell centre `i` along any axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.extent + (i as f64 + 0.5) * self.spacing()
    }

    /// Per-axis indices of a flat row-major index (last axis fastest).
    pub fn unflatten(&self, mut flat: usize, idx: &mut [usize]) {
        for k in (0..self.n).rev() {
            idx[k] = flat % self.points;
            flat /= self.points;
        }
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.points + i)
    }

    /// Cell centre of flat index `flat`, written to `x`.
    pub fn point(&self, flat: usize, x: &mut [f64]) {
        let mut rest = flat;
        for k in (0..self.n).rev() {
            x[k] = self.coord(rest % self.points);
            rest /= self.points;
        }
    }

    /// `|x|^2` at cell `flat`.
    pub fn radius_sqr(&self, flat: usize) -> f64 {
        let mut rest = flat;
        let mut r2 = 0.0;
        for _ in 0..self.n {
            let c = self.coord(rest % self.points);
            r2 += c * c;
            rest /= self.points;
        }
        r2
    }

    /// Angular wavenumber of FFT bin `i`; the Nyquist bin maps to zero.
    pub fn wavenumber(&self, i: usize) -> f64 {
        let np = self.points;
        let dk = std::f64::consts::PI / self.extent;
        if i < np / 2 {
            i as f64 * dk
        } else if i == np / 2 {
            0.0
        } else {
            (i as f64 - np as f64) * dk
        }
    }

    pub fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "(n={}, N={}, L={}) vs (n={}, N={}, L={})",
                self.n, self.points, self.extent, other.n, other.points, other.extent
            )));
        }
        Ok(())
    }
}

/// Integration measure for norms and functionals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Lebesgue,
    /// `k e^{-|x|^2/2} dx`
    Gaussian { k: f64 },
}

impl Measure {
    pub fn gaussian(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Parameter(format!("gaussian measure needs k > 0, got {k}")));
        }
        Ok(Measure::Gaussian { k })
    }

    /// Density relative to Lebesgue measure at `|x|^2 = r2`.
    pub fn density(&self, r2: f64) -> f64 {
        match *self {
            Measure::Lebesgue => 1.0,
            Measure::Gaussian { k } => k * (-0.5 * r2).exp(),
        }
    }
}

/// Clifford-valued field on a grid, stored per blade.
///
/// `components[A]` is `None` when the `e_A` coefficient vanishes identically,
/// which keeps vector- and scalar-valued fields cheap in large algebras.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordField {
    grid: GridSpec,
    sig: AlgebraSignature,
    components: Vec<Option<Vec<Complex64>>>,
}

impl CliffordField {
    pub fn zeros(grid: GridSpec, sig: AlgebraSignature) -> Self {
        Self { grid, sig, components: vec![None; sig.blade_count()] }
    }

    /// Build from per-blade arrays of length `grid.len()`.
    pub fn from_components(grid: GridSpec, sig: AlgebraSignature, components: Vec<Option<Vec<Complex64>>>) -> Result<Self> {
        if components.len() != sig.blade_count() {
            return Err(Error::Domain(format!(
                "expected {} blade components, got {}",
                sig.blade_count(),
                components.len()
            )));
        }
        for (mask, c) in components.iter().enumerate() {
            if let Some(v) = c {
                if v.len() != grid.len() {
                    return Err(Error::GridMismatch(format!("component {mask} has {} samples, grid has {}", v.len(), grid.len())));
                }
                if v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                    return Err(Error::NonFinite(format!("component {mask}")));
                }
                if sig.is_real() && v.iter().any(|z| z.im != 0.0) {
                    return Err(Error::Domain("complex sample in a real algebra".into()));
                }
            }
        }
        Ok(Self { grid, sig, components })
    }

    /// Unchecked constructor for operator outputs. Imaginary parts are
    /// dropped for real signatures.
    pub(crate) fn from_raw(grid: GridSpec, sig: AlgebraSignature, mut components: Vec<Option<Vec<Complex64>>>) -> Self {
        if sig.is_real() {
            for v in components.iter_mut().flatten() {
                for z in v.iter_mut() {
                    z.im = 0.0;
                }
            }
        }
        Self { grid, sig, components }
    }

    /// Scalar profile times a constant multivector, `f(x) = g(x) a`.
    pub fn from_profile<F>(grid: GridSpec, coefficient: &Multivector, profile: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let sig = coefficient.sig();
        let n = grid.n();
        let samples: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map_init(|| vec![0.0; n], |x, i| {
                grid.point(i, x);
                profile(x)
            })
            .collect();
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("profile sample".into()));
        }
        let components = coefficient
            .coeffs()
            .iter()
            .map(|&c| if c == ZERO { None } else { Some(samples.iter().map(|&s| c * s).collect()) })
            .collect();
        Ok(Self { grid, sig, components })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn sig(&self) -> AlgebraSignature {
        self.sig
    }

    pub fn component(&self, mask: usize) -> Option<&[Complex64]> {
        self.components.get(mask).and_then(|c| c.as_deref())
    }

    pub fn components(&self) -> &[Option<Vec<Complex64>>] {
        &self.components
    }

    /// Blades with stored samples.
    pub fn active_blades(&self) -> Vec<usize> {
        self.components.iter().enumerate().filter(|(_, c)| c.is_some()).map(|(m, _)| m).collect()
    }

    /// Value at cell `flat`.
    pub fn value(&self, flat: usize) -> Multivector {
        let coeffs = self.components.iter().map(|c| c.as_ref().map_or(ZERO, |v| v[flat])).collect();
        Multivector::from_coeffs(self.sig, coeffs).expect("stored samples are finite and match the signature")
    }

    /// `|f(x)|^2` at cell `flat`.
    pub fn norm_sqr_at(&self, flat: usize) -> f64 {
        self.components.iter().flatten().map(|v| v[flat].norm_sqr()).sum()
    }

    /// Pointwise `|f(x)|` for every cell.
    pub fn pointwise_norms(&self) -> Vec<f64> {
        (0..self.grid.len()).into_par_iter().map(|i| self.norm_sqr_at(i).sqrt()).collect()
    }

    pub fn max_norm(&self) -> f64 {
        chunked_max(self.grid.len(), |i| self.norm_sqr_at(i)).sqrt()
    }

    fn ensure_compatible(&self, other: &Self) -> Result<()> {
        self.grid.ensure_same(&other.grid)?;
        if self.sig != other.sig {
            return Err(Error::SignatureMismatch { left: self.sig.to_string(), right: other.sig.to_string() });
        }
        Ok(())
    }

    fn zip_components(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64 + Sync) -> Result<Self> {
        self.ensure_compatible(other)?;
        let len = self.grid.len();
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| match (a, b) {
                (None, None) => None,
                (Some(a), None) => Some(a.par_iter().map(|&x| op(x, ZERO)).collect()),
                (None, Some(b)) => Some(b.par_iter().map(|&y| op(ZERO, y)).collect()),
                (Some(a), Some(b)) => Some((0..len).into_par_iter().map(|i| op(a[i], b[i])).collect()),
            })
            .collect();
        Ok(Self { grid: self.grid, sig: self.sig, components })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_components(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_components(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> Self {
        let components = self.components.iter().map(|c| c.as_ref().map(|v| v.par_iter().map(|z| z * factor).collect())).collect();
        Self { grid: self.grid, sig: self.sig, components }
    }

    /// Multiply every sample by the real function `w(x)`.
    pub fn multiply_profile<F>(&self, w: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let n = self.grid.n();
        let grid = self.grid;
        let weights: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map_init(|| vec![0.0; n], |x, i| {
                grid.point(i, x);
                w(x)
            })
            .collect();
        let components = self
            .components
            .iter()
            .map(|c| c.as_ref().map(|v| v.par_iter().zip(&weights).map(|(z, w)| z * w).collect()))
            .collect();
        Self { grid, sig: self.sig, components }
    }

    /// Pointwise geometric product `f(x) g(x)`.
    pub fn pointwise_product(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        let mut out: Vec<Option<Vec<Complex64>>> = vec![None; self.sig.blade_count()];
        for (a, fa) in self.components.iter().enumerate() {
            let Some(fa) = fa else { continue };
            for (b, gb) in other.components.iter().enumerate() {
                let Some(gb) = gb else { continue };
                let (sign, c) = blade_mul(a, b);
                let target = out[c].get_or_insert_with(|| vec![ZERO; self.grid.len()]);
                target.par_iter_mut().zip(fa.par_iter().zip(gb)).for_each(|(t, (x, y))| *t += x * y * sign);
            }
        }
        Ok(Self::from_raw(self.grid, self.sig, out))
    }

    /// The position field `x = Σ_j x_j e_j`.
    pub fn position(grid: GridSpec, sig: AlgebraSignature) -> Result<Self> {
        if grid.n() > sig.m() {
            return Err(Error::Domain(format!("grid dimension {} exceeds m = {}", grid.n(), sig.m())));
        }
        let mut components = vec![None; sig.blade_count()];
        for (j, slot) in (0..grid.n()).map(|j| (j, 1usize << j)) {
            let stride = grid.points().pow((grid.n() - 1 - j) as u32);
            components[slot] = Some(
                (0..grid.len())
                    .into_par_iter()
                    .map(|i| Complex64::new(grid.coord((i / stride) % grid.points()), 0.0))
                    .collect(),
            );
        }
        Ok(Self { grid, sig, components })
    }

    /// Pointwise conjugate.
    pub fn conjugate(&self) -> Self {
        let components = self
            .components
            .iter()
            .enumerate()
            .map(|(mask, c)| {
                let s = conjugation_sign(mask);
                c.as_ref().map(|v| v.par_iter().map(|z| z.conj() * s).collect())
            })
            .collect();
        Self { grid: self.grid, sig: self.sig, components }
    }

    /// Weighted `L^p` norm, `(Σ |x|^{p w} |f|^p dμ)^{1/p}` by midpoint rule.
    /// `p = ∞` gives the (weighted) maximum.
    pub fn lp_norm(&self, p: f64, measure: Measure, weight_exponent: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::Parameter(format!("lp_norm needs p >= 1, got {p}")));
        }
        let grid = self.grid;
        let w_at = |i: usize| {
            if weight_exponent == 0.0 {
                1.0
            } else {
                grid.radius_sqr(i).powf(0.5 * weight_exponent)
            }
        };
        if p.is_infinite() {
            return Ok(chunked_max(grid.len(), |i| w_at(i) * self.norm_sqr_at(i).sqrt()));
        }
        let dv = grid.cell_volume();
        let s = chunked_sum(grid.len(), |i| {
            let a = self.norm_sqr_at(i);
            if a == 0.0 {
                return 0.0;
            }
            let r2 = grid.radius_sqr(i);
            let wf = if weight_exponent == 0.0 { 1.0 } else { r2.powf(0.5 * weight_exponent * p) };
            wf * a.powf(0.5 * p) * measure.density(r2)
        });
        Ok((s * dv).powf(1.0 / p))
    }

    /// Plain Lebesgue `L^p` norm.
    pub fn norm(&self, p: f64) -> Result<f64> {
        self.lp_norm(p, Measure::Lebesgue, 0.0)
    }

    /// Discrete weak-`L^q` quasi-norm over the sampled levels,
    /// `max_s s (h^n #{|f| > s})^{1/q}` for `s ∈ {|f(x_i)|}`.
    ///
    /// Levels equal to within a relative `1e-12` count as one, so rounding
    /// noise in symmetric samples does not split a level. For sampled singular
    /// kernels this tracks the continuum value; see [`Self::weak_lq_norm_upper`]
    /// for the weak norm of the piecewise-constant field itself.
    pub fn weak_lq_norm(&self, q: f64) -> Result<f64> {
        self.weak_levels(q, false)
    }

    /// Weak-`L^q` quasi-norm of the piecewise-constant field. The supremum over
    /// `s` is approached from below each level, so this is
    /// `max_v v (h^n #{|f| >= v})^{1/q}`.
    pub fn weak_lq_norm_upper(&self, q: f64) -> Result<f64> {
        self.weak_levels(q, true)
    }

    fn weak_levels(&self, q: f64, inclusive: bool) -> Result<f64> {
        if !(q > 1.0) {
            return Err(Error::Parameter(format!("weak_lq_norm needs q > 1, got {q}")));
        }
        let mut mags = self.pointwise_norms();
        mags.par_sort_unstable_by(|a, b| b.total_cmp(a));
        let dv = self.grid.cell_volume();
        let mut best = 0.0f64;
        let mut i = 0;
        while i < mags.len() && mags[i] > 0.0 {
            let s = mags[i];
            let above = i;
            while i < mags.len() && mags[i] >= s * (1.0 - 1e-12) {
                i += 1;
            }
            let count = if inclusive { i } else { above };
            best = best.max(s * (dv * count as f64).powf(1.0 / q));
        }
        Ok(best)
    }

    /// `Σ_x conj(f(x)) g(x) h^n`, Clifford-valued.
    pub fn inner_product_clifford(&self, other: &Self) -> Result<Multivector> {
        self.ensure_compatible(other)?;
        let dv = self.grid.cell_volume();
        let mut coeffs = vec![ZERO; self.sig.blade_count()];
        for (a, fa) in self.components.iter().enumerate() {
            let Some(fa) = fa else { continue };
            let ca = conjugation_sign(a);
            for (b, gb) in other.components.iter().enumerate() {
                let Some(gb) = gb else { continue };
                let (sign, c) = blade_mul(a, b);
                let s = chunked_sum_complex(fa.len(), |i| fa[i].conj() * gb[i]);
                coeffs[c] += s * (ca * sign * dv);
            }
        }
        if self.sig.is_real() {
            for c in &mut coeffs {
                c.im = 0.0;
            }
        }
        Multivector::from_coeffs(self.sig, coeffs)
    }

    /// `Σ_A Σ_x conj(f_A(x)) g_A(x) h^n`, the scalar part of the Clifford pairing.
    pub fn inner_product_scalar(&self, other: &Self) -> Result<Complex64> {
        self.inner_product_scalar_with(other, Measure::Lebesgue)
    }

    pub fn inner_product_scalar_with(&self, other: &Self, measure: Measure) -> Result<Complex64> {
        self.ensure_compatible(other)?;
        let grid = self.grid;
        let pairs: Vec<(&Vec<Complex64>, &Vec<Complex64>)> = self
            .components
            .iter()
            .zip(&other.components)
            .filter_map(|(a, b)| Some((a.as_ref()?, b.as_ref()?)))
            .collect();
        let s = chunked_sum_complex(grid.len(), |i| {
            let d = measure.density(if matches!(measure, Measure::Lebesgue) { 0.0 } else { grid.radius_sqr(i) });
            pairs.iter().map(|(a, b)| a[i].conj() * b[i]).sum::<Complex64>() * d
        });
        let mut out = s * grid.cell_volume();
        if self.sig.is_real() {
            out.im = 0.0;
        }
        Ok(out)
    }

    /// Entropy `Σ (|u|²/‖u‖²) log(|u|/‖u‖) dμ` with `‖·‖` the `L²(μ)` norm.
    pub fn entropy(&self, measure: Measure) -> Result<f64> {
        let norm = self.lp_norm(2.0, measure, 0.0)?;
        if norm == 0.0 {
            return Err(Error::Degenerate("entropy of a zero field".into()));
        }
        let grid = self.grid;
        let n2 = norm * norm;
        let s = chunked_sum(grid.len(), |i| {
            let a2 = self.norm_sqr_at(i);
            if a2 == 0.0 {
                return 0.0;
            }
            let ratio = a2 / n2;
            ratio * 0.5 * ratio.ln() * measure.density(grid.radius_sqr(i))
        });
        Ok(s * grid.cell_volume())
    }

    /// Largest sample modulus on the outer shell `max_k |x_k| > (1 - frac) L`,
    /// relative to the global maximum.
    pub fn boundary_ratio(&self, frac: f64) -> f64 {
        let grid = self.grid;
        let cut = (1.0 - frac) * grid.extent();
        let n = grid.n();
        let global = self.max_norm();
        if global == 0.0 {
            return 0.0;
        }
        let shell = (0..grid.len())
            .into_par_iter()
            .map_init(|| vec![0.0; n], |x, i| {
                grid.point(i, x);
                if x.iter().any(|c| c.abs() > cut) {
                    self.norm_sqr_at(i)
                } else {
                    0.0
                }
            })
            .reduce(|| 0.0, f64::max)
            .sqrt();
        shell / global
    }

    /// Write `(cell, blade, re, im)` rows for every stored sample.
    pub fn write_snapshot_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["cell", "blade", "re", "im"])?;
        for i in 0..self.grid.len() {
            for (mask, c) in self.components.iter().enumerate() {
                if let Some(v) = c {
                    w.write_record(&[i.to_string(), mask.to_string(), format!("{:.16e}", v[i].re), format!("{:.16e}", v[i].im)])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Evaluate `f` at every cell centre.
pub fn sample_field<F>(grid: GridSpec, sig: AlgebraSignature, f: F) -> Result<CliffordField>
where
    F: Fn(&[f64]) -> Multivector + Sync,
{
    let blades = sig.blade_count();
    let n = grid.n();
    let values: Vec<Vec<Complex64>> = (0..grid.len())
        .into_par_iter()
        .map_init(|| vec![0.0; n], |x, i| {
            grid.point(i, x);
            f(x).coeffs().to_vec()
        })
        .collect();
    for v in &values {
        if v.len() != blades {
            return Err(Error::SignatureMismatch { left: "sampler output".into(), right: sig.to_string() });
        }
    }
    let components = (0..blades)
        .map(|mask| {
            if values.iter().all(|v| v[mask] == ZERO) {
                None
            } else {
                Some(values.iter().map(|v| v[mask]).collect())
            }
        })
        .collect();
    CliffordField::from_components(grid, sig, components)
}
