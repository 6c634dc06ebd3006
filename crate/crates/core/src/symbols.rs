//! Potential normal forms, the constants `A` and `B`, Hamilton maps of the
//! quadratic model operators and their explicit flows.
//!
//! Phase-space variables are ordered `(q, p, xi_q, xi_p)` everywhere.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use crate::biquat::cos_sinc_of_square;
use crate::error::{Error, Result};
use crate::linalg::{c, cr, max_abs, Mat2, Mat4, Mat42, C64, IU, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Alpha {
    /// `V = -nu q²/2`, `z = sqrt(nu)`.
    Zero,
    /// `V = +nu q²/2`, `z = i sqrt(nu)`.
    HalfPi,
}

impl Alpha {
    pub fn angle(self) -> f64 {
        match self {
            Alpha::Zero => 0.0,
            Alpha::HalfPi => FRAC_PI_2,
        }
    }

    pub fn sin(self) -> f64 {
        match self {
            Alpha::Zero => 0.0,
            Alpha::HalfPi => 1.0,
        }
    }

    pub fn cos(self) -> f64 {
        match self {
            Alpha::Zero => 1.0,
            Alpha::HalfPi => 0.0,
        }
    }

    /// `e^{i alpha}`.
    pub fn phase(self) -> C64 {
        match self {
            Alpha::Zero => ONE,
            Alpha::HalfPi => IU,
        }
    }

    /// `e^{2 i alpha}`, which is real (`±1`).
    pub fn phase2(self) -> f64 {
        match self {
            Alpha::Zero => 1.0,
            Alpha::HalfPi => -1.0,
        }
    }

    pub fn both() -> [Alpha; 2] {
        [Alpha::Zero, Alpha::HalfPi]
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Alpha::Zero => "0",
            Alpha::HalfPi => "pi2",
        })
    }
}

impl FromStr for Alpha {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "0" => Ok(Alpha::Zero),
            "pi2" | "pi/2" => Ok(Alpha::HalfPi),
            other => Err(Error::InvalidParameter(format!("alpha must be 0 or pi2, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    NonDegenerate,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    /// Curvatures `nu_i` of the quadratic directions.
    pub nus: Vec<f64>,
    /// Slope of the linear direction (degenerate case).
    pub lambda1: f64,
}

impl PotentialSpec {
    pub fn non_degenerate(nus: Vec<f64>) -> Self {
        Self { kind: PotentialKind::NonDegenerate, nus, lambda1: 0.0 }
    }

    pub fn degenerate(lambda1: f64, nus: Vec<f64>) -> Self {
        Self { kind: PotentialKind::Degenerate, nus, lambda1 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nus.iter().any(|v| !v.is_finite()) || !self.lambda1.is_finite() {
            return Err(Error::InvalidParameter("non-finite curvature or slope".into()));
        }
        match self.kind {
            PotentialKind::NonDegenerate => {
                if self.nus.iter().any(|&v| v == 0.0) {
                    return Err(Error::InvalidParameter("non-degenerate potential with zero curvature".into()));
                }
                if self.lambda1 != 0.0 {
                    return Err(Error::InvalidParameter("non-degenerate potential with nonzero slope".into()));
                }
            }
            PotentialKind::Degenerate => {
                if self.lambda1 < 0.0 {
                    return Err(Error::InvalidParameter("lambda1 must be nonnegative".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub tr_plus: f64,
    pub tr_minus: f64,
    pub a: f64,
    pub b: f64,
}

pub fn constants(spec: &PotentialSpec) -> Result<Constants> {
    spec.validate()?;
    let tr_plus: f64 = spec.nus.iter().filter(|&&v| v > 0.0).sum();
    let tr_minus: f64 = -spec.nus.iter().filter(|&&v| v <= 0.0).sum::<f64>();
    let a = (1.0 + tr_plus).powf(2.0 / 3.0).max(1.0 + tr_minus);
    let b = spec.lambda1.powf(4.0 / 3.0).max((1.0 + tr_minus) / (2.0 + tr_minus).ln().powi(2));
    Ok(Constants { tr_plus, tr_minus, a, b })
}

/// Parameters of the scaled model `K_{nu,alpha} = O_p + z X_alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub nu: f64,
    pub alpha: Alpha,
    pub lambda1: f64,
}

impl ModelParams {
    pub fn new(nu: f64, alpha: Alpha) -> Self {
        Self { nu, alpha, lambda1: 0.0 }
    }

    /// Scaled model of `V = nu q²/2`: confining curvatures give `alpha = pi/2`,
    /// repulsive ones `alpha = 0`, both with `|nu|`.
    pub fn from_curvature(nu: f64) -> Result<Self> {
        if nu == 0.0 || !nu.is_finite() {
            return Err(Error::InvalidParameter(format!("curvature must be finite and nonzero, got {nu}")));
        }
        let alpha = if nu > 0.0 { Alpha::HalfPi } else { Alpha::Zero };
        Ok(Self::new(nu.abs(), alpha))
    }

    /// `sqrt(A)` for the one-dimensional potential this model scales.
    pub fn sqrt_a(&self) -> f64 {
        match self.alpha {
            Alpha::Zero => (1.0 + self.nu).sqrt(),
            Alpha::HalfPi => (1.0 + self.nu).cbrt(),
        }
    }

    pub fn z(&self) -> C64 {
        self.alpha.phase() * self.nu.sqrt()
    }

    /// `n1 = sqrt(1 + 4 z²)` (principal branch).
    pub fn n1(&self) -> C64 {
        (ONE + 4.0 * self.z() * self.z()).sqrt()
    }

    /// `r1 = sqrt(4 nu - 1)`, defined for `nu > 1/4`.
    pub fn r1(&self) -> Option<f64> {
        (self.nu > 0.25).then(|| (4.0 * self.nu - 1.0).sqrt())
    }

    /// `(C(t), S(t))`; see [`flow_cs`].
    pub fn flow_cs(&self, t: f64) -> (C64, C64) {
        flow_cs(t, self.z())
    }

    /// `(C(t), S(t))` as reals; exact for `alpha` in `{0, pi/2}`.
    pub fn flow_cs_real(&self, t: f64) -> (f64, f64) {
        let (cc, ss) = self.flow_cs(t);
        (cc.re, ss.re)
    }
}

/// `C(t) = ch(t n1/2)` and `S(t) = sh(t n1/2)/n1` with `n1² = 1 + 4z²`.
///
/// Both are entire in `n1²`, so no square root is taken.
pub fn flow_cs(t: f64, z: C64) -> (C64, C64) {
    let x2 = cr(t * t / 4.0) * (ONE + 4.0 * z * z);
    let (ch, shc) = cos_sinc_of_square(-x2);
    (ch, shc * (t / 2.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonBasis {
    pub alpha: Alpha,
    pub e: Mat4,
    pub i: Mat4,
    pub j: Mat4,
    pub k: Mat4,
    pub sigma: Mat4,
    pub t_plus: Mat42,
    pub t_minus: Mat42,
}

fn basis_at_angle(alpha: f64) -> (Mat4, Mat4, Mat4, Mat4) {
    let e1 = C64::from_polar(1.0, alpha);
    let em1 = C64::from_polar(1.0, -alpha);
    let e2 = C64::from_polar(1.0, 2.0 * alpha);
    let em2 = C64::from_polar(1.0, -2.0 * alpha);
    let one = ONE;
    let z = ZERO;
    #[rustfmt::skip]
    let e = Mat4::new(
        z, z, em2, z,
        z, z, z, -one,
        -e2, z, z, z,
        z, one, z, z,
    );
    #[rustfmt::skip]
    let i = Mat4::new(
        z, z, -em2, z,
        z, z, z, -one,
        e2, z, z, z,
        z, one, z, z,
    );
    #[rustfmt::skip]
    let j = Mat4::new(
        z, -IU * em1, z, z,
        -IU * e1, z, z, z,
        z, z, z, IU * e1,
        z, z, IU * em1, z,
    );
    #[rustfmt::skip]
    let k = Mat4::new(
        z, z, z, -IU * em1,
        z, z, -IU * em1, z,
        z, -IU * e1, z, z,
        -IU * e1, z, z, z,
    );
    (e, i, j, k)
}

/// The reduction matrix `T_±`.
pub fn t_matrix(alpha: Alpha, sign: f64) -> Mat42 {
    let s = 1.0 / 2f64.sqrt();
    let ph = C64::from_polar(1.0, sign * 2.0 * alpha.angle());
    #[rustfmt::skip]
    let t = Mat42::new(
        ONE, ZERO,
        ZERO, ONE,
        -IU * sign * ph, ZERO,
        ZERO, IU * sign,
    );
    t * cr(s)
}

pub fn hamilton_basis(alpha: Alpha) -> HamiltonBasis {
    let (e, i, j, k) = basis_at_angle(alpha.angle());
    let sigma = e * cr(alpha.sin()) + i * cr(alpha.cos());
    HamiltonBasis { alpha, e, i, j, k, sigma, t_plus: t_matrix(alpha, 1.0), t_minus: t_matrix(alpha, -1.0) }
}

impl HamiltonBasis {
    pub fn t(&self, sign: f64) -> &Mat42 {
        if sign > 0.0 {
            &self.t_plus
        } else {
            &self.t_minus
        }
    }

    /// `T_±^* m T_±`.
    pub fn compress(&self, m: &Mat4, sign: f64) -> Mat2 {
        let t = self.t(sign);
        t.adjoint() * m * t
    }

    /// `H_{K_{nu,alpha}} = -(E + I + 2 z J)/2`.
    pub fn h_k(&self, z: C64) -> Mat4 {
        (self.e + self.i + self.j * (z * 2.0)) * cr(-0.5)
    }

    /// `H_{O_q} = e^{2 i alpha}(E - I)/2`.
    pub fn h_oq(&self) -> Mat4 {
        (self.e - self.i) * cr(0.5 * self.alpha.phase2())
    }

    /// Coordinates of `m` on `(Id, I, J, K)` and the reconstruction residual.
    pub fn quaternion_coords(&self, m: &Mat4) -> ([C64; 4], f64) {
        let a = m.trace() / 4.0;
        let b = -(self.i * m).trace() / 4.0;
        let cc = -(self.j * m).trace() / 4.0;
        let d = -(self.k * m).trace() / 4.0;
        let back = self.recompose([a, b, cc, d]);
        ([a, b, cc, d], max_abs(&(back - m)))
    }

    pub fn recompose(&self, q: [C64; 4]) -> Mat4 {
        Mat4::identity() * q[0] + self.i * q[1] + self.j * q[2] + self.k * q[3]
    }
}

/// Quadratic model operators with explicit Weyl symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolLabel {
    Op,
    Oq,
    OeQ,
    X,
    Y,
    K,
}

/// Hessian of the Weyl symbol in variables `(q, p, xi_q, xi_p)`.
pub fn symbol_hessian(label: SymbolLabel, alpha: f64, z: C64) -> Mat4 {
    let mut h = Mat4::zeros();
    let e1 = C64::from_polar(1.0, alpha);
    let em1 = C64::from_polar(1.0, -alpha);
    match label {
        SymbolLabel::Op => {
            h[(1, 1)] = ONE;
            h[(3, 3)] = ONE;
        }
        SymbolLabel::Oq => {
            h[(0, 0)] = ONE;
            h[(2, 2)] = ONE;
        }
        SymbolLabel::OeQ => {
            h[(0, 0)] = C64::from_polar(1.0, 2.0 * alpha);
            h[(2, 2)] = C64::from_polar(1.0, -2.0 * alpha);
        }
        SymbolLabel::X => {
            h[(1, 2)] = IU * em1;
            h[(2, 1)] = IU * em1;
            h[(0, 3)] = IU * e1;
            h[(3, 0)] = IU * e1;
        }
        SymbolLabel::Y => {
            h[(0, 1)] = IU * e1;
            h[(1, 0)] = IU * e1;
            h[(2, 3)] = -IU * em1;
            h[(3, 2)] = -IU * em1;
        }
        SymbolLabel::K => {
            h = symbol_hessian(SymbolLabel::Op, alpha, z) + symbol_hessian(SymbolLabel::X, alpha, z) * z;
        }
    }
    h
}

/// `H_Q = [[q''_{xi x}, q''_{xi xi}], [-q''_{xx}, -q''_{x xi}]]`.
pub fn hamilton_map(hess: &Mat4) -> Result<Mat4> {
    let asym = max_abs(&(hess - hess.transpose()));
    if asym > 1e-12 * (1.0 + max_abs(hess)) {
        return Err(Error::NonSymmetricInput(asym));
    }
    let mut h = Mat4::zeros();
    for r in 0..2 {
        for s in 0..2 {
            h[(r, s)] = hess[(2 + r, s)];
            h[(r, 2 + s)] = hess[(2 + r, 2 + s)];
            h[(2 + r, s)] = -hess[(r, s)];
            h[(2 + r, 2 + s)] = -hess[(r, 2 + s)];
        }
    }
    Ok(h)
}

/// Hessian of the Weyl symbol of `[a^w, b^w]` for quadratic `a`, `b`:
/// the symbol is `-i {a, b}` with `{a, b} = a'_xi b'_x - a'_x b'_xi`.
pub fn commutator_hessian(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut jhat = Mat4::zeros();
    for r in 0..2 {
        jhat[(r, 2 + r)] = -ONE;
        jhat[(2 + r, r)] = ONE;
    }
    (a * jhat * b - b * jhat * a) * (-IU)
}

/// Maximal residual of the commutator identities `[O_p, X] = iY`,
/// `[O_{e^{i alpha} q}, X] = iY`, and of the commutation of
/// `H_{O_{e^{i alpha}q} - O_p}` with `H_{O_p}` and `H_{X}`.
pub fn commutator_check(params: &ModelParams) -> f64 {
    let al = params.alpha.angle();
    let z = params.z();
    let hs = |l| symbol_hessian(l, al, z);
    let hm = |m: &Mat4| hamilton_map(m).expect("symbol Hessians are symmetric");
    let target = hm(&(hs(SymbolLabel::Y) * IU));
    let r1 = max_abs(&(hm(&commutator_hessian(&hs(SymbolLabel::Op), &hs(SymbolLabel::X))) - target));
    let r2 = max_abs(&(hm(&commutator_hessian(&hs(SymbolLabel::OeQ), &hs(SymbolLabel::X))) - target));
    let e = hm(&(hs(SymbolLabel::OeQ) - hs(SymbolLabel::Op)));
    let hop = hm(&hs(SymbolLabel::Op));
    let hx = hm(&hs(SymbolLabel::X));
    let r3 = max_abs(&(e * hop - hop * e));
    let r4 = max_abs(&(e * hx - hx * e));
    r1.max(r2).max(r3).max(r4)
}

/// A complex linear canonical map of phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalMap {
    pub matrix: Mat4,
}

impl CanonicalMap {
    /// The 2x2 blocks `T_±^* kappa T_±`.
    pub fn reductions(&self, basis: &HamiltonBasis) -> (Mat2, Mat2) {
        (basis.compress(&self.matrix, 1.0), basis.compress(&self.matrix, -1.0))
    }
}

/// `e^{i theta E} = ch(theta) + i sh(theta) E`, using `(iE)² = 1`.
fn exp_i_e(basis: &HamiltonBasis, theta: C64) -> Mat4 {
    Mat4::identity() * theta.cosh() + basis.e * (IU * theta.sinh())
}

/// `kappa(t) = e^{-i t H_K} = e^{itE/2}(C(t) + i S(t)(I + 2zJ))` for any complex `z`.
pub fn kappa_z(t: f64, z: C64, basis: &HamiltonBasis) -> CanonicalMap {
    let (cc, ss) = flow_cs(t, z);
    let inner = Mat4::identity() * cc + (basis.i + basis.j * (z * 2.0)) * (IU * ss);
    CanonicalMap { matrix: exp_i_e(basis, cr(t / 2.0)) * inner }
}

pub fn kappa(t: f64, params: &ModelParams, basis: &HamiltonBasis) -> CanonicalMap {
    kappa_z(t, params.z(), basis)
}

/// `kappa0(delta) = e^{i delta H_{O_q}}
///   = e^{i delta e^{2i alpha} E/2}(ch(delta e^{2i alpha}/2) - i sh(delta e^{2i alpha}/2) I)`.
pub fn kappa0(delta: f64, basis: &HamiltonBasis) -> CanonicalMap {
    let w = 0.5 * delta * basis.alpha.phase2();
    let inner = Mat4::identity() * cr(w.cosh()) - basis.i * c(0.0, w.sinh());
    CanonicalMap { matrix: exp_i_e(basis, cr(w)) * inner }
}
