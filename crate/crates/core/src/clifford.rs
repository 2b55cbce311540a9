//! Clifford algebras `R_{0,m}` and their complexification `C_m`.
//!
//! Blades are addressed by bitmask: bit `j` set means generator `e_{j+1}` is a
//! factor, in increasing generator order. Every generator squares to `-1` and
//! distinct generators anticommute. Coefficients are stored as `Complex64`
//! for both scalar fields; a real signature keeps every imaginary part at zero.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported generator count. Coefficient storage is dense, `2^m` per value.
pub const MAX_GENERATORS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarField {
    Real,
    Complex,
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Real => write!(f, "real"),
            ScalarField::Complex => write!(f, "complex"),
        }
    }
}

/// Domain dimension `n`, generator count `m` of the value algebra, and scalar field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraSignature {
    n: usize,
    m: usize,
    field: ScalarField,
}

impl AlgebraSignature {
    pub fn new(n: usize, m: usize, field: ScalarField) -> Result<Self> {
        if n == 0 {
            return Err(Error::Signature("domain dimension n must be at least 1".into()));
        }
        if m < n {
            return Err(Error::Signature(format!("need m >= n, got n={n}, m={m}")));
        }
        if m > MAX_GENERATORS {
            return Err(Error::Signature(format!(
                "m={m} exceeds the generator cap {MAX_GENERATORS}"
            )));
        }
        Ok(Self { n, m, field })
    }

    pub fn real(n: usize, m: usize) -> Result<Self> {
        Self::new(n, m, ScalarField::Real)
    }

    pub fn complex(n: usize, m: usize) -> Result<Self> {
        Self::new(n, m, ScalarField::Complex)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn is_real(&self) -> bool {
        self.field == ScalarField::Real
    }

    /// Number of blades, `2^m`.
    pub fn blade_count(&self) -> usize {
        1 << self.m
    }

    /// Product constant `K_m` for this value algebra.
    pub fn product_constant(&self) -> f64 {
        kn_constant(self.m, self.field)
    }
}

impl fmt::Display for AlgebraSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.field {
            ScalarField::Real => "R_{0,",
            ScalarField::Complex => "C_{",
        };
        write!(f, "{prefix}{}}} over R^{}", self.m, self.n)
    }
}

/// Grade of a blade (number of generator factors).
#[inline]
pub fn grade(mask: usize) -> u32 {
    mask.count_ones()
}

/// `e_A e_B = sign * e_C` with `C = A xor B`.
///
/// The sign counts the transpositions needed to sort the concatenated factor
/// list, plus one `-1` per generator shared by both blades.
#[inline]
pub fn blade_mul(a: usize, b: usize) -> (f64, usize) {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    swaps += (a & b).count_ones();
    let sign = if swaps.is_multiple_of(2) { 1.0 } else { -1.0 };
    (sign, a ^ b)
}

/// Sign picked up by a grade-`k` blade under conjugation, `(-1)^{k(k+1)/2}`.
#[inline]
pub fn conjugation_sign(mask: usize) -> f64 {
    let k = grade(mask) as u64;
    if (k * (k + 1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Sharp constant in `|ab| <= K_n |a||b|`.
///
/// Real algebras follow the period-8 table, complexified ones the parity table.
pub fn kn_constant(n: usize, field: ScalarField) -> f64 {
    let n_f = n as f64;
    let exponent = match field {
        ScalarField::Real => match n % 8 {
            0 | 6 => n_f / 4.0,
            1 | 3 | 5 => (n_f - 1.0) / 4.0,
            2 | 4 => (n_f - 2.0) / 4.0,
            _ => (n_f + 1.0) / 4.0,
        },
        ScalarField::Complex => {
            if n.is_multiple_of(2) {
                n_f / 4.0
            } else {
                (n_f + 1.0) / 4.0
            }
        }
    };
    2f64.powf(exponent)
}

/// Element of `R_{0,m}` or `C_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Multivector {
    sig: AlgebraSignature,
    coeffs: Vec<Complex64>,
}

impl Multivector {
    pub fn zero(sig: AlgebraSignature) -> Self {
        Self { sig, coeffs: vec![Complex64::new(0.0, 0.0); sig.blade_count()] }
    }

    pub fn scalar(sig: AlgebraSignature, value: f64) -> Self {
        Self::blade(sig, 0, value)
    }

    /// `value * e_A`. Panics if `mask` is outside the algebra.
    pub fn blade(sig: AlgebraSignature, mask: usize, value: f64) -> Self {
        assert!(mask < sig.blade_count(), "blade mask {mask} outside algebra {sig}");
        let mut mv = Self::zero(sig);
        mv.coeffs[mask] = Complex64::new(value, 0.0);
        mv
    }

    /// `sum_j x_j e_{j+1}` for the given real components.
    pub fn vector(sig: AlgebraSignature, components: &[f64]) -> Result<Self> {
        if components.len() > sig.m() {
            return Err(Error::Domain(format!(
                "{} vector components do not fit in {sig}",
                components.len()
            )));
        }
        let mut mv = Self::zero(sig);
        for (j, &x) in components.iter().enumerate() {
            mv.coeffs[1 << j] = Complex64::new(x, 0.0);
        }
        mv.check_finite()?;
        Ok(mv)
    }

    pub fn from_real(sig: AlgebraSignature, coeffs: &[f64]) -> Result<Self> {
        Self::from_coeffs(sig, coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn from_coeffs(sig: AlgebraSignature, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != sig.blade_count() {
            return Err(Error::Domain(format!(
                "expected {} coefficients for {sig}, got {}",
                sig.blade_count(),
                coeffs.len()
            )));
        }
        if sig.is_real() && coeffs.iter().any(|c| c.im != 0.0) {
            return Err(Error::Domain("complex coefficient in a real algebra".into()));
        }
        let mv = Self { sig, coeffs };
        mv.check_finite()?;
        Ok(mv)
    }

    fn check_finite(&self) -> Result<()> {
        if self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("multivector coefficient".into()))
        }
    }

    pub fn sig(&self) -> AlgebraSignature {
        self.sig
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: usize) -> Complex64 {
        self.coeffs[mask]
    }

    pub fn scalar_part(&self) -> Complex64 {
        self.coeffs[0]
    }

    fn ensure_same(&self, other: &Self) -> Result<()> {
        if self.sig != other.sig {
            return Err(Error::SignatureMismatch {
                left: self.sig.to_string(),
                right: other.sig.to_string(),
            });
        }
        Ok(())
    }

    pub fn geometric_product(&self, other: &Self) -> Result<Self> {
        self.ensure_same(other)?;
        let mut out = Self::zero(self.sig);
        for (a, &ca) in self.coeffs.iter().enumerate() {
            if ca == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (b, &cb) in other.coeffs.iter().enumerate() {
                if cb == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let (sign, c) = blade_mul(a, b);
                out.coeffs[c] += ca * cb * sign;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { sig: self.sig, coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    /// Multiplies by a complex scalar. Only valid in complexified algebras unless
    /// the factor is real.
    pub fn scale_complex(&self, factor: Complex64) -> Result<Self> {
        if self.sig.is_real() && factor.im != 0.0 {
            return Err(Error::Domain("complex scaling in a real algebra".into()));
        }
        Ok(Self { sig: self.sig, coeffs: self.coeffs.iter().map(|c| c * factor).collect() })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.ensure_same(other)?;
        Ok(Self {
            sig: self.sig,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.ensure_same(other)?;
        Ok(Self {
            sig: self.sig,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    /// Conjugation: reverses blade order, flips each generator, and conjugates
    /// complex coefficients. A grade-k blade picks up `(-1)^{k(k+1)/2}`.
    pub fn conjugate(&self) -> Self {
        Self {
            sig: self.sig,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(mask, c)| c.conj() * conjugation_sign(mask))
                .collect(),
        }
    }

    pub fn grade_project(&self, k: usize) -> Result<Self> {
        if k > self.sig.m() {
            return Err(Error::Parameter(format!("grade {k} exceeds m={}", self.sig.m())));
        }
        Ok(Self {
            sig: self.sig,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(mask, &c)| if grade(mask) as usize == k { c } else { Complex64::new(0.0, 0.0) })
                .collect(),
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Euclidean norm of the coefficient array.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    /// True when only grade-1 coefficients are nonzero.
    pub fn is_vector(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(mask, c)| grade(mask) == 1 || *c == Complex64::new(0.0, 0.0))
    }

    /// True when only the scalar coefficient is nonzero.
    pub fn is_scalar(&self) -> bool {
        self.coeffs.iter().skip(1).all(|c| *c == Complex64::new(0.0, 0.0))
    }

    /// Inverse of a 1-vector, `x^{-1} = -x / (sum_j x_j^2)`.
    ///
    /// For real vectors the denominator is `|x|^2`. Complex null vectors
    /// (`sum_j x_j^2 = 0`) have no inverse and are reported as singular.
    pub fn vector_inverse(&self) -> Result<Self> {
        if !self.is_vector() {
            return Err(Error::Domain("vector_inverse needs a pure 1-vector".into()));
        }
        let square: Complex64 = (0..self.sig.m()).map(|j| self.coeffs[1 << j].powi(2)).sum();
        if square.norm() == 0.0 {
            return Err(Error::Singular("vector has no inverse".into()));
        }
        let factor = -square.inv();
        Ok(Self { sig: self.sig, coeffs: self.coeffs.iter().map(|c| c * factor).collect() })
    }
}

impl Add for &Multivector {
    type Output = Multivector;

    /// Panics on signature mismatch; use [`Multivector::try_add`] for a checked sum.
    fn add(self, rhs: &Multivector) -> Multivector {
        self.try_add(rhs).expect("multivector signatures differ")
    }
}

impl Sub for &Multivector {
    type Output = Multivector;

    fn sub(self, rhs: &Multivector) -> Multivector {
        self.try_sub(rhs).expect("multivector signatures differ")
    }
}

impl Neg for &Multivector {
    type Output = Multivector;

    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

/// Human-readable blade name, `1`, `e1`, `e13`, ...; generators past 9 are
/// written with a comma separator.
pub fn blade_name(mask: usize) -> String {
    if mask == 0 {
        return "1".to_string();
    }
    let idx: Vec<String> = (0..usize::BITS)
        .filter(|j| mask & (1 << j) != 0)
        .map(|j| (j + 1).to_string())
        .collect();
    if idx.iter().all(|s| s.len() == 1) {
        format!("e{}", idx.concat())
    } else {
        format!("e{}", idx.join(","))
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (mask, c) in self.coeffs.iter().enumerate() {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            if mask != 0 {
                write!(f, "*{}", blade_name(mask))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
