//! The linear-potential model `K_1 = p d_q - lambda1 d_p + (D_p² + p² - 1)/2`
//! analysed fiberwise in the Fourier variable `xi_q`.
//!
//! On the fiber `xi_q` a rotation of `(p, xi_p)` turns `K_1` into
//! `O_p - 1/2 + i b p` with `b = sqrt(xi_q² + lambda1²)`, whose semigroup has
//! norm `e^{u(t) b²}`, `u(t) = tanh(t/2) - t/2`.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3};
use num_complex::Complex64;

use crate::bargmann::golden_max;
use crate::error::{Error, Result};

/// Below this `t` the series of `u` is used.
const SERIES_T: f64 = 0.1;
/// Split point of the large-time chaining.
pub const T0: f64 = 0.5;
/// Richardson nodes for `F(0+)`.
pub const RICHARDSON_TS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberParams {
    pub lambda1: f64,
    pub xi_q: f64,
    pub b: f64,
}

impl FiberParams {
    pub fn new(lambda1: f64, xi_q: f64) -> Self {
        Self { lambda1, xi_q, b: xi_q.hypot(lambda1) }
    }
}

/// `tanh(t/2) - t/2` evaluated directly.
pub fn u_direct(t: f64) -> f64 {
    (t / 2.0).tanh() - t / 2.0
}

/// `-u(t)/t³`, the analytic part of `u`.
fn w_of(t: f64) -> f64 {
    if t.abs() < SERIES_T {
        w_series(t)
    } else {
        -u_direct(t) / (t * t * t)
    }
}

fn w_series(t: f64) -> f64 {
    let t2 = t * t;
    1.0 / 24.0 - t2 * (1.0 / 240.0 - t2 * (17.0 / 40320.0 - t2 * (62.0 / 1451520.0 - t2 * (1382.0 / 319334400.0))))
}

/// `u(t) = tanh(t/2) - t/2`, by its Taylor series near zero.
pub fn u(t: f64) -> f64 {
    if t.abs() < SERIES_T {
        -t * t * t * w_of(t)
    } else {
        u_direct(t)
    }
}

/// `(ch t - 1)/sh t`.
pub fn tanh_half_quotient(t: f64) -> f64 {
    let e = t.exp_m1();
    e * e / (2.0 * t.exp() * t.sinh())
}

/// Norm of the fiber semigroup `e^{-t(O_p - 1/2 + i b p)}`.
pub fn fiber_semigroup_norm(t: f64, b: f64) -> f64 {
    (u(t) * b * b).exp()
}

/// Weighted fiber quantity `b² e^{u(t) b²}`.
pub fn fiber_norm(t: f64, b: f64) -> f64 {
    b * b * fiber_semigroup_norm(t, b)
}

/// `F(t) = -t³ e^{u(t)} / u(t)`, with the removable singularity at zero.
pub fn f_function(t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("F needs t > 0, got {t}")));
    }
    Ok(u(t).exp() / w_of(t))
}

/// `F` from the unexpanded formula.
pub fn f_direct(t: f64) -> f64 {
    let uu = u_direct(t);
    -t * t * t * uu.exp() / uu
}

/// `F(0+)` from [`f_direct`] at [`RICHARDSON_TS`], eliminating the `t²` and
/// `t³` terms of its expansion.
pub fn f_limit_richardson() -> Result<f64> {
    let ts = RICHARDSON_TS;
    let m = Matrix3::from_fn(|r, c| ts[r].powi([0, 2, 3][c]));
    let rhs = Vector3::from_fn(|r, _| f_direct(ts[r]));
    let sol = m.lu().solve(&rhs).ok_or(Error::NonFinite("f_limit_richardson"))?;
    Ok(sol[0])
}

/// `sup_b b² e^{u b²} = e^{-1}/(-u)`, attained at `b² = -1/u`.
pub fn sup_b_closed(t: f64) -> (f64, f64) {
    let uu = u(t);
    (-1.0 / uu, (-1.0f64).exp() / (-uu))
}

/// Maximizer and maximum of `x e^{u x}` located without the closed form: the
/// sign change of the complex-step derivative of `ln x + u x` is bracketed by
/// doubling and bisected.
pub fn sup_b_numeric(t: f64) -> (f64, f64) {
    let uu = u(t);
    let h = 1e-30;
    let slope = |x: f64| {
        let z = Complex64::new(x, x * h);
        (z.ln() + uu * z).im / (x * h)
    };
    let mut hi = 1.0;
    while slope(hi) > 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    (x, x * (uu * x).exp())
}

/// `sup_{xi_q} b² e^{u b²}` over `b² = xi_q² + lambda1² >= lambda1²`.
pub fn sup_over_xi(t: f64, lambda1: f64) -> f64 {
    let (b2_star, top) = sup_b_closed(t);
    let l2 = lambda1 * lambda1;
    if b2_star >= l2 {
        top
    } else {
        l2 * (u(t) * l2).exp()
    }
}

/// [`sup_over_xi`] by golden-section search over `xi_q`.
pub fn sup_over_xi_numeric(t: f64, lambda1: f64) -> f64 {
    let scale = 1.0 / (-u(t)).sqrt();
    let hi = 8.0 * scale + lambda1.abs();
    let (_, v) = golden_max(|xi| fiber_norm(t, FiberParams::new(lambda1, xi).b), 0.0, hi, 1e-13);
    v.max(fiber_norm(t, lambda1))
}

/// `‖(D_q² + lambda1²) e^{-t(K_1+1)}‖ = e^{-t} sup_{xi_q} b² e^{u b²}`.
pub fn exact_decay_degenerate(t: f64, lambda1: f64) -> f64 {
    (-t).exp() * sup_over_xi(t, lambda1)
}

/// `c/t³`-type bound: `F(t)/t³` up to `t = 1`, then the split at `t0 = 1/2`
/// with `‖e^{-(t-t0)K_1}‖ <= 1`, giving `F(t0) t0^{-3} e^{-t}`.
pub fn decay_bound_degenerate(t: f64, _lambda1: f64) -> Result<f64> {
    if t <= 1.0 {
        Ok(f_function(t)? / (t * t * t))
    } else {
        Ok(f_function(T0)? / (T0 * T0 * T0) * (-t).exp())
    }
}

/// `‖|D_q| e^{-t(K_1 + 3/2)}‖`, the `|D_q|` decay with the shift
/// `sqrt(A) = 1` applied to `K_1 + 1/2`.
pub fn exact_dq_decay(t: f64, lambda1: f64) -> f64 {
    let uu = u(t);
    (-1.5 * t).exp() * (uu * lambda1 * lambda1).exp() * (-0.5f64).exp() / (-2.0 * uu).sqrt()
}

/// `e^{-t} sqrt(decay_bound_degenerate)`, from `|xi_q| e^{u b²} <= (b² e^{u b²})^{1/2}`.
pub fn dq_decay_bound(t: f64) -> Result<f64> {
    Ok((-t).exp() * decay_bound_degenerate(t, 0.0)?.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberReduction {
    pub theta: f64,
    pub residual: f64,
}

/// Rotation of `(p, xi_p)` by `theta = atan2(-lambda1, xi_q)` and the largest
/// residual of: the image of `xi_q p - lambda1 xi_p` against `b p'`, the
/// symbol of `O_p`, the symplectic form, and the fixed `xi_q` coordinate.
pub fn fiber_reduction_check(lambda1: f64, xi_q: f64) -> FiberReduction {
    let fp = FiberParams::new(lambda1, xi_q);
    let theta = (-lambda1).atan2(xi_q);
    let (s, c) = theta.sin_cos();
    // New coordinates (p', xi_p') = R (p, xi_p).
    let r = Matrix2::new(c, s, -s, c);
    // Linear form in old coordinates equals b * (first row of R).
    let lin = ((fp.b * r[(0, 0)] - xi_q).abs()).max((fp.b * r[(0, 1)] + lambda1).abs());
    let quad = (r.transpose() * r - Matrix2::identity()).abs().max();
    let j2 = Matrix2::new(0.0, 1.0, -1.0, 0.0);
    let sympl2 = (r.transpose() * j2 * r - j2).abs().max();
    // Full map on (q, p, xi_q, xi_p).
    let mut full = Matrix4::identity();
    full[(1, 1)] = r[(0, 0)];
    full[(1, 3)] = r[(0, 1)];
    full[(3, 1)] = r[(1, 0)];
    full[(3, 3)] = r[(1, 1)];
    let mut j4 = Matrix4::zeros();
    j4[(0, 2)] = 1.0;
    j4[(1, 3)] = 1.0;
    j4[(2, 0)] = -1.0;
    j4[(3, 1)] = -1.0;
    let sympl4 = (full.transpose() * j4 * full - j4).abs().max();
    let fixes_xi_q = (full.row(2) - Matrix4::<f64>::identity().row(2)).abs().max();
    FiberReduction { theta, residual: lin.max(quad).max(sympl2).max(sympl4).max(fixes_xi_q) }
}
