//! One-dimensional fibers of the degenerate model after a Fourier transform
//! in `q`: `F_xi = O_p - 1/2 + i xi p - i lambda1 D_p` on `L²(R_p)`.

use rayon::prelude::*;

use super::ladder::{momentum, oscillator, position, LadderPoly};
use crate::bargmann::golden_max;
use crate::error::Result;
use crate::linalg::{cr, expm, operator_norm, CMat, IU};

fn dense_1d(poly: &LadderPoly, n: usize) -> CMat {
    let mut out = CMat::zeros(n, n);
    let mut buf = Vec::new();
    for j in 0..n {
        poly.apply_state(0, j, &mut buf);
        for &(_, p, cf) in &buf {
            if p < n {
                out[(p, j)] += cf;
            }
        }
    }
    out
}

pub fn fiber_poly(xi: f64, lambda1: f64) -> LadderPoly {
    oscillator(false)
        .add(LadderPoly::constant(cr(-0.5)))
        .add(position(false).scale(IU * xi))
        .add(momentum(false).scale(-IU * lambda1))
}

/// Truncated `F_xi` on the `n` lowest Hermite functions.
pub fn fiber_matrix(xi: f64, lambda1: f64, n: usize) -> CMat {
    dense_1d(&fiber_poly(xi, lambda1), n)
}

/// `‖e^{-t(F_xi + shift)}‖` on the truncated fiber.
pub fn fiber_semigroup_norm(t: f64, xi: f64, lambda1: f64, shift: f64, n: usize) -> Result<f64> {
    let m = fiber_matrix(xi, lambda1, n) + CMat::identity(n, n) * cr(shift);
    operator_norm(&expm(&(m * cr(-t)))?)
}

/// `sup_xi |xi| ‖e^{-t(F_xi + shift)}‖` over `xi >= 0`: a grid scan on
/// `[0, xi_max]` followed by golden-section refinement around the best node.
pub fn weighted_fiber_sup(t: f64, lambda1: f64, shift: f64, n: usize, xi_max: f64, nodes: usize) -> Result<f64> {
    let h = xi_max / nodes as f64;
    let vals = (1..=nodes)
        .into_par_iter()
        .map(|k| {
            let xi = k as f64 * h;
            fiber_semigroup_norm(t, xi, lambda1, shift, n).map(|v| xi * v)
        })
        .collect::<Result<Vec<_>>>()?;
    let (kbest, vbest) = vals.iter().enumerate().fold((0, f64::NEG_INFINITY), |a, (k, &v)| if v > a.1 { (k, v) } else { a });
    let center = (kbest + 1) as f64 * h;
    let f = |xi: f64| fiber_semigroup_norm(t, xi, lambda1, shift, n).map(|v| xi * v).unwrap_or(f64::NAN);
    let (_, refined) = golden_max(f, (center - h).max(0.0), center + h, 1e-5 * (1.0 + center));
    let best = if refined.is_finite() { refined.max(vbest) } else { vbest };
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(t: f64) -> f64 {
        (t / 2.0).tanh() - t / 2.0
    }

    #[test]
    fn zero_slope_fiber_is_shifted_oscillator() {
        let m = fiber_matrix(0.0, 0.0, 6);
        for k in 0..6 {
            assert!((m[(k, k)] - cr(k as f64)).norm() < 1e-14);
        }
        assert!((fiber_semigroup_norm(1.3, 0.0, 0.0, 0.0, 20).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fiber_norm_formula_at_small_b() {
        // The norm depends on xi and lambda1 only through b² = xi² + lambda1².
        for &(xi, l1) in &[(0.5, 0.0), (0.0, 0.5), (0.6, 0.8), (1.0, 0.0)] {
            let b2: f64 = xi * xi + l1 * l1;
            for &t in &[0.5, 1.0, 2.0] {
                let g = fiber_semigroup_norm(t, xi, l1, 0.0, 60).unwrap();
                let exact = (u(t) * b2).exp();
                assert!((g - exact).abs() < 1e-8, "xi={xi} l1={l1} t={t}: {g} vs {exact}");
            }
        }
    }

    #[test]
    fn conjugate_fibers_share_norms() {
        let a = fiber_semigroup_norm(0.7, 0.9, 0.4, 0.0, 40).unwrap();
        let b = fiber_semigroup_norm(0.7, -0.9, 0.4, 0.0, 40).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}
