use cliffdirac::clifford::{blade_mul, grade};
use cliffdirac::{AlgebraSignature, Multivector};
use num_complex::Complex64;
use proptest::prelude::*;

fn coeffs(len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), len)
}

fn real_mv(m: usize, c: &[(f64, f64)]) -> Multivector {
    let sig = AlgebraSignature::real(m.max(1), m).unwrap();
    Multivector::from_real(sig, &c.iter().map(|p| p.0).collect::<Vec<_>>()).unwrap()
}

fn complex_mv(m: usize, c: &[(f64, f64)]) -> Multivector {
    let sig = AlgebraSignature::complex(m.max(1), m).unwrap();
    Multivector::from_coeffs(sig, c.iter().map(|&(re, im)| Complex64::new(re, im)).collect()).unwrap()
}

fn dist(a: &Multivector, b: &Multivector) -> f64 {
    a.try_sub(b).unwrap().norm()
}

// Hamilton product on (w, x, y, z) = w + x i + y j + z k
fn hamilton(p: [f64; 4], q: [f64; 4]) -> [f64; 4] {
    [
        p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
        p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
        p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
        p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0],
    ]
}

#[test]
fn generators_square_to_minus_one_and_anticommute() {
    for i in 0..5 {
        assert_eq!(blade_mul(1 << i, 1 << i), (-1.0, 0));
        for j in 0..5 {
            if i != j {
                let (s1, b1) = blade_mul(1 << i, 1 << j);
                let (s2, b2) = blade_mul(1 << j, 1 << i);
                assert_eq!(b1, b2);
                assert_eq!(s1, -s2);
            }
        }
    }
    assert_eq!(grade(0b1011), 3);
}

#[test]
fn signature_rejects_empty_algebra() {
    assert!(AlgebraSignature::real(3, 0).is_err());
    assert!(AlgebraSignature::real(0, 3).is_err());
}

#[test]
fn mixing_signatures_is_an_error() {
    let a = Multivector::scalar(AlgebraSignature::real(3, 3).unwrap(), 1.0);
    let b = Multivector::scalar(AlgebraSignature::real(3, 4).unwrap(), 1.0);
    assert!(a.geometric_product(&b).is_err());
    assert!(a.try_add(&b).is_err());
}

proptest! {
    #[test]
    fn r02_is_the_quaternions(c in coeffs(8)) {
        // e1 -> i, e2 -> j, e12 -> k
        let p = [c[0].0, c[1].0, c[2].0, c[3].0];
        let q = [c[4].0, c[5].0, c[6].0, c[7].0];
        let prod = real_mv(2, &c[..4]).geometric_product(&real_mv(2, &c[4..])).unwrap();
        let h = hamilton(p, q);
        for (c, e) in prod.coeffs().iter().zip(h) {
            prop_assert!((c.re - e).abs() < 1e-12);
        }
    }

    #[test]
    fn product_is_associative(c in coeffs(48)) {
        let (a, b, d) = (complex_mv(4, &c[..16]), complex_mv(4, &c[16..32]), complex_mv(4, &c[32..]));
        let left = a.geometric_product(&b).unwrap().geometric_product(&d).unwrap();
        let right = a.geometric_product(&b.geometric_product(&d).unwrap()).unwrap();
        prop_assert!(dist(&left, &right) < 1e-10 * (1.0 + left.norm()));
    }

    #[test]
    fn product_distributes(c in coeffs(24)) {
        let (a, b, d) = (real_mv(3, &c[..8]), real_mv(3, &c[8..16]), real_mv(3, &c[16..]));
        let left = a.geometric_product(&b.try_add(&d).unwrap()).unwrap();
        let right = a.geometric_product(&b).unwrap().try_add(&a.geometric_product(&d).unwrap()).unwrap();
        prop_assert!(dist(&left, &right) < 1e-12 * (1.0 + left.norm()));
    }

    #[test]
    fn product_norm_bounded_by_k(c in coeffs(32), m in 1usize..=4, complex in any::<bool>()) {
        let len = 1 << m;
        let (a, b) = if complex {
            (complex_mv(m, &c[..len]), complex_mv(m, &c[16..16 + len]))
        } else {
            (real_mv(m, &c[..len]), real_mv(m, &c[16..16 + len]))
        };
        let k = a.sig().product_constant();
        let ab = a.geometric_product(&b).unwrap().norm();
        prop_assert!(ab <= k * a.norm() * b.norm() * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn vectors_square_to_minus_norm(x in prop::collection::vec(-3.0..3.0f64, 4)) {
        let sig = AlgebraSignature::real(4, 4).unwrap();
        let v = Multivector::vector(sig, &x).unwrap();
        let sq = v.geometric_product(&v).unwrap();
        let r2: f64 = x.iter().map(|t| t * t).sum();
        prop_assert!((sq.coeffs()[0].re + r2).abs() < 1e-12 * (1.0 + r2));
        prop_assert!(sq.try_sub(&Multivector::scalar(sig, -r2)).unwrap().norm() < 1e-12 * (1.0 + r2));
        if r2 > 1e-6 {
            let one = v.geometric_product(&v.vector_inverse().unwrap()).unwrap();
            prop_assert!(dist(&one, &Multivector::scalar(sig, 1.0)) < 1e-12);
        }
    }

    #[test]
    fn conjugation_reverses_products(c in coeffs(32)) {
        let (a, b) = (complex_mv(4, &c[..16]), complex_mv(4, &c[16..]));
        let left = a.geometric_product(&b).unwrap().conjugate();
        let right = b.conjugate().geometric_product(&a.conjugate()).unwrap();
        prop_assert!(dist(&left, &right) < 1e-12 * (1.0 + left.norm()));
        prop_assert!(dist(&a.conjugate().conjugate(), &a) < 1e-15);
    }

    #[test]
    fn grade_projections_sum_back(c in coeffs(16)) {
        let a = complex_mv(4, &c);
        let mut total = Multivector::zero(a.sig());
        for k in 0..=4 {
            total = total.try_add(&a.grade_project(k).unwrap()).unwrap();
        }
        prop_assert_eq!(total, a);
    }
}
