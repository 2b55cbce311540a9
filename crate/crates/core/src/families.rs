//! Seeded families of smooth, decaying test fields.
//!
//! Every field is a pure function of `(seed, kind, index)`: the three are
//! mixed into one ChaCha seed, so adding cases never perturbs earlier ones.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{AlgebraSignature, Multivector};
use crate::error::{Error, Result};
use crate::grid::{CliffordField, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    ScalarGaussian,
    MultivectorGaussian,
    Bump,
    BandlimitedRandom,
    AnisotropicGaussian,
}

impl FieldKind {
    pub const ALL: [FieldKind; 5] = [
        FieldKind::ScalarGaussian,
        FieldKind::MultivectorGaussian,
        FieldKind::Bump,
        FieldKind::BandlimitedRandom,
        FieldKind::AnisotropicGaussian,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FieldKind::ScalarGaussian => "scalar_gaussian",
            FieldKind::MultivectorGaussian => "multivector_gaussian",
            FieldKind::Bump => "bump",
            FieldKind::BandlimitedRandom => "bandlimited_random",
            FieldKind::AnisotropicGaussian => "anisotropic_gaussian",
        }
    }

    fn tag(&self) -> u64 {
        match self {
            FieldKind::ScalarGaussian => 1,
            FieldKind::MultivectorGaussian => 2,
            FieldKind::Bump => 3,
            FieldKind::BandlimitedRandom => 4,
            FieldKind::AnisotropicGaussian => 5,
        }
    }

    /// Kinds cycle with the case index.
    pub fn for_case(index: usize) -> FieldKind {
        Self::ALL[index % Self::ALL.len()]
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent generator for `(seed, stream, index)`.
pub fn case_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mixed = splitmix64(seed ^ splitmix64(stream.wrapping_mul(0x1000_0000_01b3) ^ splitmix64(index)));
    ChaCha8Rng::seed_from_u64(mixed)
}

/// Sampling ranges shared by all kinds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyRanges {
    /// Centres satisfy `|c| <= center_fraction * L`.
    pub center_fraction: f64,
    pub width: (f64, f64),
    /// Blade coefficients are drawn from `[-coefficient, coefficient]`.
    pub coefficient: f64,
}

impl Default for FamilyRanges {
    fn default() -> Self {
        Self { center_fraction: 0.25, width: (0.5, 3.0), coefficient: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFamily {
    pub seed: u64,
    pub kind: FieldKind,
    pub count: usize,
    pub ranges: FamilyRanges,
    /// Draw every blade coefficient nonnegative and keep profiles nonnegative,
    /// so each component of the field is a nonnegative function.
    pub nonnegative: bool,
}

impl TestFamily {
    pub fn new(seed: u64, kind: FieldKind, count: usize) -> Self {
        Self { seed, kind, count, ranges: FamilyRanges::default(), nonnegative: false }
    }

    pub fn nonnegative(mut self) -> Self {
        self.nonnegative = true;
        self
    }

    /// Field number `index` of the family.
    pub fn generate(&self, grid: GridSpec, sig: AlgebraSignature, index: usize) -> Result<CliffordField> {
        if index >= self.count {
            return Err(Error::Parameter(format!("index {index} outside family of {}", self.count)));
        }
        let stream = self.kind.tag() + if self.nonnegative { 100 } else { 0 };
        let mut rng = case_rng(self.seed, stream, index as u64);
        let g = Generator { grid, sig, ranges: self.ranges, nonnegative: self.nonnegative };
        match self.kind {
            FieldKind::ScalarGaussian => g.scalar_gaussian(&mut rng),
            FieldKind::MultivectorGaussian => g.multivector_gaussian(&mut rng),
            FieldKind::Bump => g.bump(&mut rng),
            FieldKind::BandlimitedRandom => g.bandlimited(&mut rng),
            FieldKind::AnisotropicGaussian => g.anisotropic(&mut rng),
        }
    }
}

struct Generator {
    grid: GridSpec,
    sig: AlgebraSignature,
    ranges: FamilyRanges,
    nonnegative: bool,
}

fn dist2(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum()
}

impl Generator {
    fn center(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let rmax = self.ranges.center_fraction * self.grid.extent();
        let mut c: Vec<f64> = (0..self.grid.n()).map(|_| rng.gen_range(-rmax..=rmax)).collect();
        let r = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r > rmax {
            c.iter_mut().for_each(|v| *v *= rmax / r);
        }
        c
    }

    fn width(&self, rng: &mut ChaCha8Rng) -> f64 {
        rng.gen_range(self.ranges.width.0..=self.ranges.width.1)
    }

    /// Signed amplitude bounded away from zero.
    fn amplitude(&self, rng: &mut ChaCha8Rng) -> f64 {
        let a = rng.gen_range(0.1..=1.0) * self.ranges.coefficient;
        if self.nonnegative || rng.gen_bool(0.5) {
            a
        } else {
            -a
        }
    }

    fn coefficient(&self, rng: &mut ChaCha8Rng) -> Multivector {
        let c = self.ranges.coefficient;
        let lo = if self.nonnegative { 0.0 } else { -c };
        let coeffs: Vec<Complex64> = (0..self.sig.blade_count())
            .map(|_| {
                let re = rng.gen_range(lo..=c);
                let im = if self.sig.is_real() || self.nonnegative { 0.0 } else { rng.gen_range(-c..=c) };
                Complex64::new(re, im)
            })
            .collect();
        Multivector::from_coeffs(self.sig, coeffs).expect("finite coefficients")
    }

    fn scalar_gaussian(&self, rng: &mut ChaCha8Rng) -> Result<CliffordField> {
        let c = self.center(rng);
        let w = self.width(rng);
        let a = self.amplitude(rng);
        CliffordField::from_profile(self.grid, &Multivector::scalar(self.sig, a), |x| (-dist2(x, &c) / (2.0 * w * w)).exp())
    }

    fn multivector_gaussian(&self, rng: &mut ChaCha8Rng) -> Result<CliffordField> {
        let mut total = CliffordField::zeros(self.grid, self.sig);
        for _ in 0..2 {
            let c = self.center(rng);
            let w = self.width(rng);
            let a = self.coefficient(rng);
            let term = CliffordField::from_profile(self.grid, &a, |x| (-dist2(x, &c) / (2.0 * w * w)).exp())?;
            total = total.try_add(&term)?;
        }
        Ok(total)
    }

    fn bump(&self, rng: &mut ChaCha8Rng) -> Result<CliffordField> {
        let c = self.center(rng);
        // support radius twice the width so the bump spans several cells
        let radius = 2.0 * self.width(rng);
        let a = self.coefficient(rng);
        CliffordField::from_profile(self.grid, &a, |x| {
            let s = dist2(x, &c) / (radius * radius);
            if s < 1.0 {
                (1.0 - 1.0 / (1.0 - s)).exp()
            } else {
                0.0
            }
        })
    }

    fn bandlimited(&self, rng: &mut ChaCha8Rng) -> Result<CliffordField> {
        let n = self.grid.n();
        let c = self.center(rng);
        let w = self.width(rng).max(1.0);
        let mut components = vec![None; self.sig.blade_count()];
        for slot in components.iter_mut() {
            let waves: Vec<(Vec<f64>, f64, f64)> = (0..3)
                .map(|_| {
                    let k: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                    let amp = if self.nonnegative { rng.gen_range(0.0..=1.0 / 3.0) } else { rng.gen_range(-1.0..=1.0) };
                    (k, phase, amp)
                })
                .collect();
            let scale = if self.nonnegative { rng.gen_range(0.0..=self.ranges.coefficient) } else { 1.0 };
            let offset = if self.nonnegative { 1.0 } else { 0.0 };
            let f = CliffordField::from_profile(self.grid, &Multivector::scalar(self.sig, scale), |x| {
                let env = (-dist2(x, &c) / (2.0 * w * w)).exp();
                let trig: f64 = waves
                    .iter()
                    .map(|(k, ph, a)| a * (k.iter().zip(x).map(|(ki, xi)| ki * xi).sum::<f64>() + ph).cos())
                    .sum();
                env * (offset + trig)
            })?;
            *slot = f.component(0).map(|v| v.to_vec());
        }
        CliffordField::from_components(self.grid, self.sig, components)
    }

    fn anisotropic(&self, rng: &mut ChaCha8Rng) -> Result<CliffordField> {
        let c = self.center(rng);
        let widths: Vec<f64> = (0..self.grid.n()).map(|_| self.width(rng)).collect();
        let a = self.coefficient(rng);
        CliffordField::from_profile(self.grid, &a, |x| {
            (-x.iter().zip(&c).zip(&widths).map(|((xi, ci), wi)| (xi - ci).powi(2) / (2.0 * wi * wi)).sum::<f64>()).exp()
        })
    }
}
