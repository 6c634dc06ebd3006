//! Strict positivity of `kappa0(delta) kappa(t)` after `T_±` compression, the
//! threshold `delta0(t)` where it is lost, and the resulting decay bound for
//! `sqrt(nu O_q) e^{-t(K + sqrt(nu))}`.

use crate::error::{Error, Result};
use crate::linalg::{cr, hermitian_eigvals2, Mat2, Mat4, C64, IU, ZERO};
use crate::symbols::{hamilton_basis, kappa, kappa0, Alpha, ModelParams};

/// Default `eps0` in `t0 = eps0/(1 + sqrt(nu))`.
pub const DEFAULT_EPS0: f64 = 0.5;

/// `sup_{y > 0} sqrt(y) e^{-y} = (2e)^{-1/2}`.
pub fn sqrt_exp_sup() -> f64 {
    (2.0 * std::f64::consts::E).sqrt().recip()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport {
    pub t: f64,
    pub delta: f64,
    pub sign: f64,
    /// Coefficients of `e^{∓t}(a + b Ĩ + c J̃ + d K̃)`.
    pub coeffs: [C64; 4],
    /// `a² + b² + c² + d²`.
    pub det_value: C64,
    pub matrix: Mat2,
    pub min_eigenvalue: f64,
    pub is_positive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Delta0Curve {
    pub params: ModelParams,
    pub samples: Vec<(f64, f64)>,
}

/// The compressed units `(Ĩ, J̃, K̃) = T_±^*(I, J, K)T_±`.
pub fn reduced_units(alpha: Alpha, sign: f64) -> (Mat2, Mat2, Mat2) {
    let e = alpha.phase();
    let ec = e.conj();
    let it = Mat2::new(IU * sign, ZERO, ZERO, -IU * sign);
    let jt = Mat2::new(ZERO, -IU * ec, -IU * e, ZERO);
    let kt = Mat2::new(ZERO, ec * sign, -e * sign, ZERO);
    (it, jt, kt)
}

/// Coefficients `(a, b, c, d)` of the compressed difference
/// `T^* [kappa0 (i sigma) kappa0 - kappa(-t)^* (i sigma) kappa(-t)] T = e^{∓t}(a + bĨ + cJ̃ + dK̃)`.
pub fn coefficients(t: f64, delta: f64, params: &ModelParams, sign: f64) -> [C64; 4] {
    let al = params.alpha;
    let (sa, ca) = (al.sin(), al.cos());
    let e2 = al.phase2();
    let (cc, ss) = params.flow_cs_real(t);
    let z = params.z();
    let ch = (delta * e2).cosh();
    let sh = (delta * e2).sinh();
    let lead = (sign * t + sign * delta * e2).exp();
    let q = 1.0 + 2.0 * ss * ss;
    let a = sign * lead * (sa * ch - sign * ca * sh) - sign * sa * q + 2.0 * ca * cc * ss;
    let b = IU * (lead * (ca * ch - sign * sa * sh) - (ca * q - sign * 2.0 * sa * cc * ss));
    let cq = -4.0 * IU * z * (ca * ss * ss);
    let d = z * (sign * 4.0 * sa * ss * ss);
    [cr(a), b, cq, d]
}

/// Closed-form compressed Hermitian difference.
pub fn hermitian_difference(t: f64, delta: f64, params: &ModelParams, sign: f64) -> Mat2 {
    let [a, b, cq, d] = coefficients(t, delta, params, sign);
    let (it, jt, kt) = reduced_units(params.alpha, sign);
    (Mat2::identity() * a + it * b + jt * cq + kt * d) * cr((-sign * t).exp())
}

/// The same matrix built from the 4x4 flows.
pub fn hermitian_difference_direct(t: f64, delta: f64, params: &ModelParams, sign: f64) -> Mat2 {
    let basis = hamilton_basis(params.alpha);
    let is = basis.sigma * IU;
    let k0 = kappa0(delta, &basis).matrix;
    let km = kappa(-t, params, &basis).matrix;
    let d: Mat4 = k0 * is * k0 - km.adjoint() * is * km;
    basis.compress(&d, sign)
}

pub fn report(t: f64, delta: f64, params: &ModelParams, sign: f64) -> PositivityReport {
    let coeffs = coefficients(t, delta, params, sign);
    let det_value = coeffs.iter().map(|x| x * x).sum();
    let matrix = hermitian_difference(t, delta, params, sign);
    let min_eigenvalue = hermitian_eigvals2(&matrix)[0];
    PositivityReport { t, delta, sign, coeffs, det_value, matrix, min_eigenvalue, is_positive: min_eigenvalue > 0.0 }
}

/// `S(t) - sh(t/2)` without cancellation for small `t n1`.
pub(crate) fn s_minus_sh_half(t: f64, params: &ModelParams) -> f64 {
    let four_z2 = 4.0 * params.nu * params.alpha.phase2();
    let n2 = 1.0 + four_z2;
    let x2 = t * t / 4.0;
    if x2 * n2.abs().max(1.0) > 1.0 {
        let (_, ss) = params.flow_cs_real(t);
        return ss - (t / 2.0).sinh();
    }
    let mut sum = 0.0;
    let mut pow = t / 2.0;
    let mut fact = 1.0;
    for k in 1..40 {
        pow *= x2;
        fact *= (2 * k) as f64 * (2 * k + 1) as f64;
        let factor = if n2 > 0.0 { (k as f64 * four_z2.ln_1p()).exp_m1() } else { n2.powi(k) - 1.0 };
        sum += pow * factor / fact;
        if pow * n2.abs().max(1.0).powi(k) / fact <= 1e-20 * sum.abs() {
            break;
        }
    }
    sum
}

/// `A(t) = 2 S(t)² - (ch t - 1)`.
pub fn a_of_t(t: f64, params: &ModelParams) -> f64 {
    let (_, ss) = params.flow_cs_real(t);
    2.0 * s_minus_sh_half(t, params) * (ss + (t / 2.0).sinh())
}

/// Positive root `delta0(t)` of the determinant of the compressed difference:
/// `delta0 = -(e^{-2i alpha}/2) ln(1 - 2A/(2CS + sh t + A))`.
pub fn delta0(t: f64, params: &ModelParams) -> Result<f64> {
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::NonRealDelta0 { t, detail: "t must be positive".into() });
    }
    let (cc, ss) = params.flow_cs_real(t);
    let a = a_of_t(t, params);
    let x = 2.0 * a / (2.0 * cc * ss + t.sinh() + a);
    let arg = 1.0 - x;
    if !(arg > 0.0) || !arg.is_finite() {
        return Err(Error::NonRealDelta0 { t, detail: format!("log argument {arg:.6e} is not positive") });
    }
    let d = -0.5 * params.alpha.phase2() * (-x).ln_1p();
    if !(d > 0.0) {
        return Err(Error::NonRealDelta0 { t, detail: format!("threshold {d:.6e} is not positive") });
    }
    Ok(d)
}

/// `delta0` located numerically as the zero of the determinant of one
/// compressed branch, bracketed from `delta = 0` where the branch is positive.
pub fn delta0_branch_root(t: f64, params: &ModelParams, sign: f64) -> Result<f64> {
    let f = |d: f64| {
        let q = coefficients(t, d, params, sign);
        q.iter().map(|x| x * x).sum::<C64>().re
    };
    let mut lo = 0.0;
    let mut hi = 1e-12;
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NonRealDelta0 { t, detail: "no sign change of the determinant".into() });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn delta0_curve(params: &ModelParams, ts: &[f64]) -> Result<Delta0Curve> {
    let samples = ts.iter().map(|&t| delta0(t, params).map(|d| (t, d))).collect::<Result<Vec<_>>>()?;
    Ok(Delta0Curve { params: *params, samples })
}

/// Floor used to call a fitted `c` in `delta0(t) >= c nu t³` bounded away from zero.
pub const DELTA0_C_FLOOR: f64 = 1.0 / 48.0;

/// Largest `c` with `delta0(t) >= c nu t³` on a log grid of `(0, eps0/(1 + sqrt(nu))]`.
pub fn delta0_lower_bound_check(params: &ModelParams, eps0: f64) -> Result<(f64, bool)> {
    if !(eps0 > 0.0 && eps0 < 1.0) {
        return Err(Error::InvalidParameter(format!("eps0 must lie in (0, 1), got {eps0}")));
    }
    let t0 = eps0 / (1.0 + params.nu.sqrt());
    let n = 200;
    let mut c_fit = f64::INFINITY;
    for k in 0..n {
        let t = t0 * 10f64.powf(-3.0 * (1.0 - k as f64 / (n - 1) as f64));
        c_fit = c_fit.min(delta0(t, params)? / (params.nu * t.powi(3)));
    }
    Ok((c_fit, c_fit >= DELTA0_C_FLOOR))
}

/// Upper bound for `‖sqrt(nu O_q) e^{-t(K_{nu,alpha} + sqrt(nu))}‖`.
///
/// For `t <= t0` it is `sqrt(nu/delta(t)) (2e)^{-1/2} e^{-t sqrt(nu)}` with
/// `delta = delta0/2`; beyond `t0` the semigroup is split at `t0` and the
/// remaining factor is bounded by `e^{-(t - t0)/2}` since `O_p >= 1/2`.
pub fn decay_bound_prop31(t: f64, params: &ModelParams) -> Result<f64> {
    decay_bound_prop31_with(t, params, DEFAULT_EPS0)
}

pub fn decay_bound_prop31_with(t: f64, params: &ModelParams, eps0: f64) -> Result<f64> {
    let t0 = eps0 / (1.0 + params.nu.sqrt());
    if t <= t0 {
        prop31_small(t, params)
    } else {
        prop31_large(t, params, eps0)
    }
}

/// Small-time branch `sqrt(nu/delta(t)) (2e)^{-1/2} e^{-t sqrt(nu)}`.
pub fn prop31_small(t: f64, params: &ModelParams) -> Result<f64> {
    let d = 0.5 * delta0(t, params)?;
    Ok((params.nu / d).sqrt() * sqrt_exp_sup() * (-t * params.nu.sqrt()).exp())
}

/// Large-time branch, split at `t0 = eps0/(1 + sqrt(nu))`.
pub fn prop31_large(t: f64, params: &ModelParams, eps0: f64) -> Result<f64> {
    let t0 = eps0 / (1.0 + params.nu.sqrt());
    let d0 = 0.5 * delta0(t0, params)?;
    Ok((params.nu / d0).sqrt() * sqrt_exp_sup() * (-t * params.nu.sqrt()).exp() * (-(t - t0) / 2.0).exp())
}
