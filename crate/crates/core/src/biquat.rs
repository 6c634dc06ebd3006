//! Biquaternions: quaternions with complex coefficients.
//!
//! `W = a + b i + c j + d k` with `a, b, c, d` complex. The quaternion units
//! `i, j, k` commute with the complex unit. The "norm" `N(W) = a² + b² + c² + d²`
//! is complex valued and multiplicative; it is not a metric norm.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg::{Mat2, C64, IU, ONE, ZERO};

pub type ComplexScalar = C64;
pub type ComplexMatrix2 = Mat2;

/// Threshold on `|N(v)|` below which exp uses its even Taylor series.
const SERIES_SWITCH: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquaternion {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Biquaternion {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { a, b, c, d }
    }

    pub const fn scalar(a: C64) -> Self {
        Self { a, b: ZERO, c: ZERO, d: ZERO }
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(C64::from(a), C64::from(b), C64::from(c), C64::from(d))
    }

    pub const fn one() -> Self {
        Self::scalar(ONE)
    }

    pub const fn zero() -> Self {
        Self::scalar(ZERO)
    }

    pub const fn i() -> Self {
        Self::new(ZERO, ONE, ZERO, ZERO)
    }

    pub const fn j() -> Self {
        Self::new(ZERO, ZERO, ONE, ZERO)
    }

    pub const fn k() -> Self {
        Self::new(ZERO, ZERO, ZERO, ONE)
    }

    /// Vector part `b i + c j + d k`.
    pub fn vector(&self) -> Self {
        Self::new(ZERO, self.b, self.c, self.d)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn is_finite(&self) -> bool {
        [self.a, self.b, self.c, self.d].iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_coeff(&self) -> f64 {
        [self.a, self.b, self.c, self.d].iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Product, failing if a component overflows.
    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        let p = *self * *rhs;
        if p.is_finite() {
            Ok(p)
        } else {
            Err(Error::NonFinite("biquaternion product"))
        }
    }

    pub fn conj(&self) -> Self {
        Self::new(self.a, -self.b, -self.c, -self.d)
    }

    /// `N(W) = a² + b² + c² + d² = conj(W) W = det f(W)`.
    pub fn norm(&self) -> C64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn default_singular_tol(&self) -> f64 {
        let m = self.max_coeff();
        1e-12 * (1.0 + m * m)
    }

    pub fn inv(&self) -> Result<Self> {
        self.inv_with_tol(self.default_singular_tol())
    }

    pub fn inv_with_tol(&self, tol: f64) -> Result<Self> {
        let n = self.norm();
        if n.norm() <= tol {
            return Err(Error::SingularBiquaternion { norm: n.norm(), tol });
        }
        Ok(self.conj().scale(n.inv()))
    }

    /// `exp(a + v) = e^a (cos w + (sin w / w) v)` with `w² = N(v)`.
    ///
    /// Both `cos w` and `sin w / w` are even in `w`, so only `w²` enters.
    pub fn exp(&self) -> Self {
        let w2 = self.vector().norm();
        let (cw, sincw) = cos_sinc_of_square(w2);
        let ea = self.a.exp();
        Self::new(ea * cw, ea * sincw * self.b, ea * sincw * self.c, ea * sincw * self.d)
    }

    /// Same as [`Biquaternion::exp`] but with an explicit choice of the
    /// square root of `N(v)`; used to check branch independence.
    pub fn exp_with_root(&self, root: C64) -> Self {
        let ea = self.a.exp();
        let (cw, sincw) = if root.norm_sqr() < SERIES_SWITCH {
            cos_sinc_of_square(root * root)
        } else {
            (root.cos(), root.sin() / root)
        };
        Self::new(ea * cw, ea * sincw * self.b, ea * sincw * self.c, ea * sincw * self.d)
    }

    /// The two eigenvalues `a ± sqrt(-N(v))` of `f(W)`.
    pub fn spectrum(&self) -> [C64; 2] {
        let r = (-self.vector().norm()).sqrt();
        [self.a + r, self.a - r]
    }

    /// `f(W) = [[a + b i, c + d i], [-c + d i, a - b i]]`.
    pub fn to_matrix(&self) -> Mat2 {
        Mat2::new(
            self.a + IU * self.b,
            self.c + IU * self.d,
            -self.c + IU * self.d,
            self.a - IU * self.b,
        )
    }

    pub fn from_matrix(m: &Mat2) -> Self {
        let half = C64::from(0.5);
        let a = (m[(0, 0)] + m[(1, 1)]) * half;
        let b = (m[(0, 0)] - m[(1, 1)]) * half / IU;
        let c = (m[(0, 1)] - m[(1, 0)]) * half;
        let d = (m[(0, 1)] + m[(1, 0)]) * half / IU;
        Self::new(a, b, c, d)
    }
}

/// `(cos w, sin w / w)` as functions of `w²`.
pub fn cos_sinc_of_square(w2: C64) -> (C64, C64) {
    if w2.norm() < SERIES_SWITCH {
        // Terms through w^8 keep the truncation below 1e-22 on this disc.
        let mut cos = ONE;
        let mut sinc = ONE;
        let mut term_c = ONE;
        let mut term_s = ONE;
        for k in 1..=4 {
            let kf = k as f64;
            term_c = -term_c * w2 / ((2.0 * kf - 1.0) * (2.0 * kf));
            term_s = -term_s * w2 / ((2.0 * kf) * (2.0 * kf + 1.0));
            cos += term_c;
            sinc += term_s;
        }
        (cos, sinc)
    } else {
        let w = w2.sqrt();
        (w.cos(), w.sin() / w)
    }
}

impl Add for Biquaternion {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self::new(self.a + r.a, self.b + r.b, self.c + r.c, self.d + r.d)
    }
}

impl Sub for Biquaternion {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Self::new(self.a - r.a, self.b - r.b, self.c - r.c, self.d - r.d)
    }
}

impl Neg for Biquaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl Mul for Biquaternion {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        let (a1, b1, c1, d1) = (self.a, self.b, self.c, self.d);
        let (a2, b2, c2, d2) = (r.a, r.b, r.c, r.d);
        Self::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, eigvals2, max_abs, series_exp2};
    use proptest::prelude::*;

    fn close(x: &Biquaternion, y: &Biquaternion, tol: f64) -> bool {
        (*x - *y).max_coeff() <= tol
    }

    fn arb_c(r: f64) -> impl Strategy<Value = C64> {
        (-r..r, -r..r).prop_map(|(x, y)| c(x, y))
    }

    fn arb_bq(r: f64) -> impl Strategy<Value = Biquaternion> {
        (arb_c(r), arb_c(r), arb_c(r), arb_c(r)).prop_map(|(a, b, c, d)| Biquaternion::new(a, b, c, d))
    }

    #[test]
    fn unit_products() {
        let (i, j, k) = (Biquaternion::i(), Biquaternion::j(), Biquaternion::k());
        let one = Biquaternion::one();
        assert_eq!(i * j, k);
        assert_eq!(j * i, -k);
        assert_eq!(j * k, i);
        assert_eq!(k * i, j);
        for u in [i, j, k] {
            assert_eq!(u * u, -one);
        }
        assert_eq!(i * j * k, -one);
    }

    #[test]
    fn conj_and_inverse_examples() {
        let one = Biquaternion::one();
        assert_eq!(one.conj(), one);
        assert_eq!(Biquaternion::i().conj(), -Biquaternion::i());
        assert_eq!(one.inv().unwrap(), one);
        assert!(close(&Biquaternion::k().inv().unwrap(), &(-Biquaternion::k()), 1e-15));
        assert_eq!(Biquaternion::from_real(1.0, 1.0, 1.0, 1.0).norm(), C64::from(4.0));
    }

    #[test]
    fn zero_divisor_is_rejected() {
        let w = Biquaternion::new(C64::from(1.0), c(0.0, 1.0), ZERO, ZERO);
        assert!(matches!(w.inv(), Err(Error::SingularBiquaternion { .. })));
    }

    #[test]
    fn exp_examples() {
        assert_eq!(Biquaternion::zero().exp(), Biquaternion::one());
        for theta in [0.3, 1.0, 2.5] {
            let e = Biquaternion::k().scale(C64::from(theta)).exp();
            let want = Biquaternion::from_real(theta.cos(), 0.0, 0.0, theta.sin());
            assert!(close(&e, &want, 1e-15));
        }
    }

    #[test]
    fn spectrum_examples() {
        let w = Biquaternion::from_real(2.0, 3.0, 0.0, 0.0);
        let s = w.spectrum();
        let want = [c(2.0, 3.0), c(2.0, -3.0)];
        let direct = (s[0] - want[0]).norm() + (s[1] - want[1]).norm();
        let swapped = (s[0] - want[1]).norm() + (s[1] - want[0]).norm();
        assert!(direct.min(swapped) < 1e-15);
        let a = Biquaternion::scalar(c(0.5, -1.0));
        assert_eq!(a.spectrum(), [a.a, a.a]);
    }

    #[test]
    fn matrix_examples() {
        assert_eq!(Biquaternion::one().to_matrix(), Mat2::identity());
        assert_eq!(Biquaternion::i().to_matrix(), Mat2::new(c(0.0, 1.0), ZERO, ZERO, c(0.0, -1.0)));
    }

    #[test]
    fn series_branch_near_zero_matches_closed_form() {
        // On both sides of the switch the two evaluations agree.
        for s in [0.9e-2, 1.1e-2] {
            let w = Biquaternion::new(ZERO, c(s, 0.0), ZERO, ZERO);
            let closed = Biquaternion::from_real(s.cos(), s.sin(), 0.0, 0.0);
            assert!(close(&w.exp(), &closed, 1e-16));
        }
    }

    proptest! {
        #[test]
        fn identity_is_neutral(w in arb_bq(3.0)) {
            prop_assert_eq!(Biquaternion::one() * w, w);
        }

        #[test]
        fn conj_is_involution(w in arb_bq(3.0)) {
            prop_assert_eq!(w.conj().conj(), w);
        }

        #[test]
        fn matrix_map_is_homomorphism(w1 in arb_bq(3.0), w2 in arb_bq(3.0)) {
            let lhs = (w1 * w2).to_matrix();
            let rhs = w1.to_matrix() * w2.to_matrix();
            let scale = 1.0 + max_abs(&w1.to_matrix()) * max_abs(&w2.to_matrix());
            prop_assert!(max_abs(&(lhs - rhs)) <= 1e-12 * scale);
        }

        #[test]
        fn norm_is_determinant(w in arb_bq(3.0)) {
            let n = w.norm();
            let d = w.to_matrix().determinant();
            prop_assert!((n - d).norm() <= 1e-12 * (1.0 + n.norm()));
        }

        #[test]
        fn norm_is_multiplicative(w1 in arb_bq(2.0), w2 in arb_bq(2.0)) {
            let lhs = (w1 * w2).norm();
            let rhs = w1.norm() * w2.norm();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }

        #[test]
        fn matrix_round_trip(w in arb_bq(3.0)) {
            prop_assert!(close(&Biquaternion::from_matrix(&w.to_matrix()), &w, 1e-14));
        }

        #[test]
        fn inverse_is_two_sided(w in arb_bq(2.0)) {
            prop_assume!(w.norm().norm() > 1e-3);
            let inv = w.inv().unwrap();
            let tol = 1e-10 * (1.0 + w.max_coeff() * inv.max_coeff());
            prop_assert!(close(&(w * inv), &Biquaternion::one(), tol));
            prop_assert!(close(&(inv * w), &Biquaternion::one(), tol));
        }

        #[test]
        fn exp_matches_matrix_series(w in arb_bq(1.4)) {
            let via_matrix = Biquaternion::from_matrix(&series_exp2(&w.to_matrix()));
            prop_assert!(close(&w.exp(), &via_matrix, 1e-10));
        }

        #[test]
        fn exp_is_branch_independent(w in arb_bq(2.0)) {
            let root = w.vector().norm().sqrt();
            let e1 = w.exp_with_root(root);
            let e2 = w.exp_with_root(-root);
            prop_assert!(close(&e1, &e2, 1e-13 * (1.0 + e1.max_coeff())));
        }

        #[test]
        fn exp_is_additive_on_parallel_vectors(a1 in arb_c(1.0), a2 in arb_c(1.0), s1 in arb_c(1.0), s2 in arb_c(1.0), v in arb_bq(1.0)) {
            let v = v.vector();
            let w1 = Biquaternion::scalar(a1) + v.scale(s1);
            let w2 = Biquaternion::scalar(a2) + v.scale(s2);
            let lhs = w1.exp() * w2.exp();
            let rhs = (w1 + w2).exp();
            prop_assert!(close(&lhs, &rhs, 1e-10 * (1.0 + rhs.max_coeff())));
        }

        #[test]
        fn spectrum_matches_matrix_eigenvalues(w in arb_bq(3.0)) {
            let s = w.spectrum();
            let e = eigvals2(&w.to_matrix());
            let err = ((s[0] - e[0]).norm() + (s[1] - e[1]).norm())
                .min((s[0] - e[1]).norm() + (s[1] - e[0]).norm());
            prop_assert!(err <= 1e-9 * (1.0 + s[0].norm() + s[1].norm()));
        }

        #[test]
        fn spectrum_commutes_with_exp(w in arb_bq(1.0)) {
            let lhs = w.exp().spectrum();
            let rhs = w.spectrum().map(|z| z.exp());
            let ok = |p: [C64; 2], q: [C64; 2]| {
                ((p[0] - q[0]).norm() + (p[1] - q[1]).norm()).min((p[0] - q[1]).norm() + (p[1] - q[0]).norm())
            };
            prop_assert!(ok(lhs, rhs) <= 1e-10 * (1.0 + rhs[0].norm() + rhs[1].norm()));
        }
    }
}
