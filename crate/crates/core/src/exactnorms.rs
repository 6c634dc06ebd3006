//! The repulsive model `O_p + sqrt(nu) X_0`: exact semigroup norm, the
//! logarithmic resolvent bound and an explicit quasimode.

use rayon::prelude::*;

use crate::biquat::Biquaternion;
use crate::error::{Error, Result};
use crate::linalg::{cr, C64, IU};
use crate::quadrature::{adaptive, gauss_hermite, gauss_legendre};
use crate::symbols::{Alpha, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormResult {
    pub t: f64,
    pub nu: f64,
    /// `e^{-Argsh S(t)}`.
    pub norm: f64,
    /// `(mu1/mu2)^{1/4}`; `None` once the flow coefficients overflow.
    pub norm_mu: Option<f64>,
    pub mu1: C64,
    pub mu2: C64,
}

fn repulsive(nu: f64) -> Result<ModelParams> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::InvalidParameter(format!("nu must be positive, got {nu}")));
    }
    Ok(ModelParams::new(nu, Alpha::Zero))
}

/// `‖e^{-t K_{nu,0}}‖` by the Argsh formula and by the eigenvalues of
/// `conj(kappa)^{-1} kappa`, written as `(a + bI - cJ)(a + bI + cJ)` with
/// `a = C`, `b = iS`, `c = 2izS`.
pub fn semigroup_norm(t: f64, nu: f64) -> Result<NormResult> {
    let params = repulsive(nu)?;
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("t must be nonnegative, got {t}")));
    }
    let (cc, ss) = params.flow_cs_real(t);
    let norm = (-ss.asinh()).exp();

    let z = params.z();
    let (a, b, c) = (cr(cc), IU * ss, IU * z * (2.0 * ss));
    let scale = 1.0 / (a.norm() + b.norm() + c.norm());
    let (mu1, mu2, norm_mu) = if scale.is_finite() && scale > 0.0 {
        let left = Biquaternion::new(a, b, -c, C64::from(0.0)).scale(cr(scale));
        let right = Biquaternion::new(a, b, c, C64::from(0.0)).scale(cr(scale));
        let w = left * right;
        // N(left) N(right) = (C² - n1² S²)² = 1 before scaling, so mu1 mu2 = 1.
        let [p, m] = w.spectrum();
        let big = if p.norm() >= m.norm() { p } else { m };
        let mu2 = big / (scale * scale);
        let mu1 = 1.0 / mu2;
        let ratio = (scale * scale) * (scale * scale) / (big * big);
        let r = ratio.re.sqrt().sqrt();
        (mu1 * (-t).exp(), mu2 * (-t).exp(), r.is_finite().then_some(r))
    } else {
        (C64::from(f64::NAN), C64::from(f64::NAN), None)
    };
    Ok(NormResult { t, nu, norm, norm_mu, mu1, mu2 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventBound {
    pub nu: f64,
    /// `∫_0^∞ ‖e^{-t K_{nu,0}}‖ dt`.
    pub integral: f64,
    /// `integral / (log nu / sqrt nu)`.
    pub c_ratio: f64,
    /// `2 (log nu / n1 + 1/nu)`.
    pub log_bound: f64,
    pub tail_bound: f64,
    pub error_estimate: f64,
}

pub const RESOLVENT_TOL: f64 = 1e-8;

/// Integrates the exact norm with `x = t n1 / 2`.
///
/// Beyond `X` the integrand is below `n1 / (2 sh x)`, whose integral is
/// `(n1/2) log coth(X/2)`.
pub fn resolvent_bound(nu: f64) -> Result<ResolventBound> {
    if !(nu >= 10.0) {
        return Err(Error::InvalidParameter(format!("resolvent_bound needs nu >= 10, got {nu}")));
    }
    let n1 = (1.0 + 4.0 * nu).sqrt();
    let f = |x: f64| (-(x.sinh() / n1).asinh()).exp();
    let knee = n1.asinh();
    let x_end = knee + 45.0;
    let (v1, e1) = adaptive(f, 0.0, knee, 1e-12)?;
    let (v2, e2) = adaptive(f, knee, x_end, 1e-12)?;
    let tail = 0.5 * n1 * (1.0 / (x_end / 2.0).tanh()).ln();
    let jac = 2.0 / n1;
    let error_estimate = jac * (e1 + e2 + tail);
    if error_estimate > RESOLVENT_TOL {
        return Err(Error::QuadratureNotConverged { tol: RESOLVENT_TOL, estimate: error_estimate });
    }
    let integral = jac * (v1 + v2);
    Ok(ResolventBound {
        nu,
        integral,
        c_ratio: integral / (nu.ln() / nu.sqrt()),
        log_bound: 2.0 * (nu.ln() / n1 + 1.0 / nu),
        tail_bound: jac * tail,
        error_estimate,
    })
}

/// Resolvent bounds for a sweep, in input order.
pub fn resolvent_sweep(nus: &[f64]) -> Result<Vec<ResolventBound>> {
    nus.par_iter().map(|&nu| resolvent_bound(nu)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalityWitness {
    pub nu: f64,
    /// `L = log(nu)/4`.
    pub l: f64,
    /// `<phi_L, phi> = 1/ch L`.
    pub overlap: f64,
    /// `‖X_0 u‖² = (2/L²)(1 - 1/ch L)`.
    pub x0_norm_sq: f64,
    /// `(2/L²) ∫_0^{L/2} ∫_0^1 ds ds1 / ch s = 2 atan(tanh(1/2)) / L`.
    pub u_norm_sq_lower: f64,
    /// `‖u‖² = (2/L²) ∫_0^L gd(L - s1) ds1`.
    pub u_norm_sq: f64,
    /// Minkowski bound `(1/L²) (∫_0^L ‖O_p phi_s‖ ds)²` with `‖O_p phi_s‖² = ch(4s)/4`.
    pub op_bound_sq: f64,
    /// `(1/L²) ∫_0^L ch(4s)/4 ds`.
    pub op_bound_sq_averaged: f64,
    /// `(op_bound_sq + nu x0_norm_sq) / u_norm_sq_lower`.
    pub rayleigh_bound: f64,
}

/// Gudermannian `∫_0^a ds / ch s`.
pub fn gd(a: f64) -> f64 {
    2.0 * (a / 2.0).tanh().atan()
}

pub const WITNESS_MIN_LOG_NU: f64 = 8.0;

pub fn optimality_witness(nu: f64) -> Result<OptimalityWitness> {
    if !(nu.ln() > WITNESS_MIN_LOG_NU) {
        return Err(Error::InvalidParameter(format!("optimality witness needs nu > e^8, got {nu}")));
    }
    let l = nu.ln() / 4.0;
    let overlap = 1.0 / l.cosh();
    let x0_norm_sq = 2.0 / (l * l) * (1.0 - overlap);
    let u_norm_sq_lower = 2.0 / (l * l) * (l / 2.0) * gd(1.0);
    let (inner, _) = adaptive(|s1| gd(l - s1), 0.0, l, 1e-12)?;
    let u_norm_sq = 2.0 / (l * l) * inner;
    let (int_norm, _) = adaptive(|s| 0.5 * (4.0 * s).cosh().sqrt(), 0.0, l, 1e-12 * (2.0 * l).exp())?;
    let op_bound_sq = (int_norm / l).powi(2);
    let op_bound_sq_averaged = (4.0 * l).sinh() / 16.0 / (l * l);
    Ok(OptimalityWitness {
        nu,
        l,
        overlap,
        x0_norm_sq,
        u_norm_sq_lower,
        u_norm_sq,
        op_bound_sq,
        op_bound_sq_averaged,
        rayleigh_bound: (op_bound_sq + nu * x0_norm_sq) / u_norm_sq_lower,
    })
}

/// `phi_s(q, p)` from its defining formula.
fn phi_s(s: f64, q: f64, p: f64) -> f64 {
    let (ch, sh) = (s.cosh(), s.sinh());
    let a = ch * q + sh * p;
    let b = sh * q + ch * p;
    (-(a * a + b * b) / 2.0).exp() / std::f64::consts::PI.sqrt()
}

/// `O_p phi_s`, differentiating the quadratic form `a q² + 2b qp + a p²`.
fn op_phi_s(s: f64, q: f64, p: f64) -> f64 {
    let (a, b) = ((2.0 * s).cosh(), (2.0 * s).sinh());
    let g = b * q + a * p;
    0.5 * (a - g * g + p * p) * phi_s(s, q, p)
}

/// Tensor Gauss-Hermite integral of `f(q, p)` on nodes placed along the
/// diagonals `x = (q+p)/√2`, `y = (q-p)/√2` with widths `(sx, sy)`.
fn hermite_2d<F: Fn(f64, f64) -> f64>(f: F, sx: f64, sy: f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_hermite(n);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut total = 0.0;
    for (u, wu) in nodes.iter().zip(&weights) {
        for (v, wv) in nodes.iter().zip(&weights) {
            let (x, y) = (sx * u, sy * v);
            let (q, p) = (r * (x + y), r * (x - y));
            total += wu * wv * (u * u + v * v).exp() * f(q, p);
        }
    }
    total * sx * sy
}

/// `<phi_L, phi>` by quadrature.
pub fn overlap_quadrature(l: f64, n: usize) -> f64 {
    let sx = std::f64::consts::SQRT_2 * (-l).exp();
    hermite_2d(|q, p| phi_s(l, q, p) * phi_s(0.0, q, p), sx, std::f64::consts::SQRT_2, n)
}

/// `‖phi_s‖²` by quadrature.
pub fn phi_norm_sq_quadrature(s: f64, n: usize) -> f64 {
    hermite_2d(|q, p| phi_s(s, q, p).powi(2), (-s).exp(), s.exp(), n)
}

/// `‖O_p phi_s‖²` by direct quadrature of the differentiated Gaussian.
pub fn op_norm_sq_quadrature(s: f64, n: usize) -> f64 {
    hermite_2d(|q, p| op_phi_s(s, q, p).powi(2), (-s).exp(), s.exp(), n)
}

/// `‖O_p phi_s‖²` from the Hermite coefficients of
/// `(½(ch²s + sh²s) - 2 ch s sh s qp) phi_0`, projected on `h_j(q) h_k(p)`.
pub fn op_norm_sq_hermite(s: f64, jmax: usize) -> f64 {
    let (nodes, weights) = gauss_hermite(32);
    let pi4 = std::f64::consts::PI.powf(-0.25);
    // Orthonormal Hermite functions without the Gaussian factor.
    let herm = |k: usize, x: f64| -> f64 {
        let (mut h0, mut h1) = (pi4, std::f64::consts::SQRT_2 * x * pi4);
        if k == 0 {
            return h0;
        }
        for m in 1..k {
            let h2 = (2.0 / (m as f64 + 1.0)).sqrt() * x * h1 - (m as f64 / (m as f64 + 1.0)).sqrt() * h0;
            h0 = h1;
            h1 = h2;
        }
        h1
    };
    let (ch, sh) = (s.cosh(), s.sinh());
    let mut total = 0.0;
    for j in 0..=jmax {
        for k in 0..=jmax {
            let mut coef = 0.0;
            for (q, wq) in nodes.iter().zip(&weights) {
                for (p, wp) in nodes.iter().zip(&weights) {
                    // phi_0 h_j h_k = pi^{-1/2} e^{-q²-p²} (polys); the weight absorbs the exponential.
                    let g = 0.5 * (ch * ch + sh * sh) - 2.0 * ch * sh * q * p;
                    coef += wq * wp * g * pi4 * pi4 * herm(j, *q) * herm(k, *p);
                }
            }
            total += coef * coef;
        }
    }
    total
}

/// Grid for the numeric quasimode check, in diagonal coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessGrid {
    pub hx: f64,
    pub hy: f64,
    pub x_half: f64,
    pub y_half: f64,
    pub s_nodes: usize,
}

impl WitnessGrid {
    /// Resolves `phi_s` for `0 <= s <= L`: widths `e^{-s}` along `x` and `e^{s}` along `y`.
    pub fn for_nu(nu: f64) -> Self {
        let l = nu.ln() / 4.0;
        Self { hx: (-l).exp() / 10.0, hy: 0.1, x_half: 8.0, y_half: 8.0 * l.exp(), s_nodes: 40 }
    }

    fn coarsened(&self) -> Self {
        Self { hx: 2.0 * self.hx, hy: 2.0 * self.hy, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessNumeric {
    pub u_norm_sq: f64,
    pub x0_norm_sq: f64,
    pub op_norm_sq: f64,
    pub k_norm_sq: f64,
    /// `‖K u‖² / ‖u‖²`.
    pub rayleigh: f64,
}

pub const WITNESS_GRID_REL_TOL: f64 = 0.01;

/// `‖K_{nu,0} u‖² / ‖u‖²` for `u = (1/L) ∫_0^L phi_s ds` on a grid, with a
/// coarse-grid comparison.
pub fn witness_rayleigh_numeric(nu: f64, grid: &WitnessGrid) -> Result<WitnessNumeric> {
    optimality_witness(nu)?;
    let fine = witness_on_grid(nu, grid);
    let coarse = witness_on_grid(nu, &grid.coarsened());
    let rel = ((fine.rayleigh - coarse.rayleigh) / fine.rayleigh).abs();
    if !rel.is_finite() || rel > WITNESS_GRID_REL_TOL {
        return Err(Error::GridUnderResolved { what: "quasimode Rayleigh quotient", rel });
    }
    Ok(fine)
}

fn axis(h: f64, half: f64) -> Vec<f64> {
    let n = (half / h).ceil() as i64;
    (-n..=n).map(|k| k as f64 * h).collect()
}

/// Central first and second differences; zero beyond the ends.
fn differences(f: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = f.len();
    let at = |k: isize| if k < 0 || k >= n as isize { 0.0 } else { f[k as usize] };
    let d1 = (0..n as isize).map(|k| (at(k + 1) - at(k - 1)) / (2.0 * h)).collect();
    let d2 = (0..n as isize).map(|k| (at(k + 1) - 2.0 * at(k) + at(k - 1)) / (h * h)).collect();
    (d1, d2)
}

fn gram(funcs: &[Vec<f64>], h: f64) -> Vec<Vec<f64>> {
    funcs
        .par_iter()
        .map(|a| funcs.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * h).collect())
        .collect()
}

fn witness_on_grid(nu: f64, grid: &WitnessGrid) -> WitnessNumeric {
    let l = nu.ln() / 4.0;
    let xs = axis(grid.hx, grid.x_half);
    let ys = axis(grid.hy, grid.y_half);
    let (snodes, sweights) = gauss_legendre(grid.s_nodes);

    // Per s-node: x functions [g, -g''+x²g, g', xg, xg'] and the same along y.
    let mut fx = Vec::new();
    let mut fy = Vec::new();
    let mut amp = Vec::new();
    for (sn, sw) in snodes.iter().zip(&sweights) {
        let s = 0.5 * l * (sn + 1.0);
        amp.push(0.5 * l * sw / (l * std::f64::consts::PI.sqrt()));
        for (pts, h, rate, out) in [(&xs, grid.hx, (2.0 * s).exp(), &mut fx), (&ys, grid.hy, (-2.0 * s).exp(), &mut fy)] {
            let g: Vec<f64> = pts.iter().map(|x| (-rate * x * x / 2.0).exp()).collect();
            let (d1, d2) = differences(&g, h);
            let osc = pts.iter().zip(&g).zip(&d2).map(|((x, g), d2)| -d2 + x * x * g).collect();
            let xg = pts.iter().zip(&g).map(|(x, g)| x * g).collect();
            let xd = pts.iter().zip(&d1).map(|(x, d)| x * d).collect();
            out.extend([g, osc, d1, xg, xd]);
        }
    }
    let gx = gram(&fx, grid.hx);
    let gy = gram(&fy, grid.hy);

    // (x index, y index, coefficient) within one s-node block of 5.
    let rn = nu.sqrt();
    let op_terms = [(1, 0, 0.25), (0, 1, 0.25), (2, 2, 0.5), (3, 3, -0.5)];
    let x0_terms = [(4, 0, 1.0), (0, 4, -1.0)];
    let k_terms = [(1, 0, 0.25), (0, 1, 0.25), (2, 2, 0.5), (3, 3, -0.5), (4, 0, rn), (0, 4, -rn)];
    let norm_sq = |terms: &[(usize, usize, f64)]| -> f64 {
        let flat: Vec<(usize, usize, f64)> = (0..amp.len())
            .flat_map(|k| terms.iter().map(move |&(a, b, c)| (5 * k + a, 5 * k + b, c)))
            .map(|(a, b, c)| (a, b, c * amp[a / 5]))
            .collect();
        flat.par_iter()
            .map(|&(a, b, c)| flat.iter().map(|&(a2, b2, c2)| c * c2 * gx[a][a2] * gy[b][b2]).sum::<f64>())
            .sum()
    };
    let u_norm_sq = norm_sq(&[(0, 0, 1.0)]);
    let k_norm_sq = norm_sq(&k_terms);
    WitnessNumeric {
        u_norm_sq,
        x0_norm_sq: norm_sq(&x0_terms),
        op_norm_sq: norm_sq(&op_terms),
        k_norm_sq,
        rayleigh: k_norm_sq / u_norm_sq,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn norm_at_zero_is_one() {
        let r = semigroup_norm(0.0, 3.0).unwrap();
        assert_eq!(r.norm, 1.0);
        assert!((r.norm_mu.unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn argsh_and_mu_routes_agree() {
        for nu in [0.5, 1.0, 10.0, 1e3] {
            for k in 0..=100 {
                let t = 5.0 * k as f64 / 100.0;
                let r = semigroup_norm(t, nu).unwrap();
                let m = r.norm_mu.unwrap();
                assert!((m - r.norm).abs() <= 1e-10 * r.norm, "{nu} {t}: {m} vs {}", r.norm);
            }
        }
    }

    #[test]
    fn mu_product_identity() {
        let (nu, t) = (2.0, 0.7);
        let p = ModelParams::new(nu, Alpha::Zero);
        let (cc, ss) = p.flow_cs_real(t);
        let left = Biquaternion::new(cr(cc), IU * ss, -IU * p.z() * (2.0 * ss), C64::from(0.0));
        assert!((left.norm() - 1.0).norm() < 1e-13);
        let r = semigroup_norm(t, nu).unwrap();
        assert!((r.mu1 * r.mu2 - (-2.0 * t).exp()).norm() < 1e-13);
        let w = left * Biquaternion::new(left.a, left.b, -left.c, left.d);
        assert!((w.a - (1.0 + 2.0 * ss * ss)).norm() < 1e-13);
        assert!((w.vector().norm() + 4.0 * ss * ss * (1.0 + ss * ss)).norm() < 1e-12);
    }

    #[test]
    fn norm_decreases_and_is_submultiplicative() {
        for nu in [0.5, 10.0] {
            let ts: Vec<f64> = (0..60).map(|k| 0.05 * k as f64).collect();
            let ns: Vec<f64> = ts.iter().map(|&t| semigroup_norm(t, nu).unwrap().norm).collect();
            assert!(ns.windows(2).all(|w| w[1] < w[0] && w[1] <= 1.0));
            for i in 0..ts.len() {
                for j in 0..ts.len() - i {
                    assert!(ns[i + j] <= ns[i] * ns[j] * (1.0 + 1e-9));
                }
            }
        }
    }

    #[test]
    fn resolvent_log_bound() {
        for nu in [1e2, 1e4, 1e6] {
            let r = resolvent_bound(nu).unwrap();
            assert!(r.integral <= r.log_bound, "{r:?}");
        }
        let nus: Vec<f64> = (0..=12).map(|k| 10f64.powf(2.0 + 0.5 * k as f64)).collect();
        let sweep = resolvent_sweep(&nus).unwrap();
        assert!(sweep.iter().all(|r| (0.3..=2.5).contains(&r.c_ratio)));
        assert!(sweep.windows(2).all(|w| w[1].c_ratio < w[0].c_ratio));
        assert!(matches!(resolvent_bound(5.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn resolvent_against_plain_quadrature() {
        let nu = 100.0;
        let (v, _) = adaptive(|t| semigroup_norm(t, nu).unwrap().norm, 0.0, 10.0, 1e-9).unwrap();
        let r = resolvent_bound(nu).unwrap();
        assert!((v - r.integral).abs() < 1e-9);
    }

    #[test]
    fn gaussian_identities() {
        for l in [1.0, 2.0, 3.0] {
            assert!((overlap_quadrature(l, 60) - 1.0 / f64::cosh(l)).abs() < 1e-8, "{l}");
        }
        for s in [0.2f64, 1.0, 2.0] {
            let want = (4.0 * s).cosh() / 4.0;
            assert!((op_norm_sq_quadrature(s, 12) - want).abs() < 1e-10 * want);
            assert!((op_norm_sq_hermite(s, 3) - want).abs() < 1e-10 * want);
            assert!((phi_norm_sq_quadrature(s, 8) - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn witness_closed_forms() {
        let w = optimality_witness(9f64.exp()).unwrap();
        assert!((w.l - 2.25).abs() < 1e-15);
        assert!(w.u_norm_sq >= w.u_norm_sq_lower);
        let c: Vec<f64> = [9.0, 12.0, 16.0]
            .iter()
            .map(|&k| {
                let w = optimality_witness(f64::exp(k)).unwrap();
                w.rayleigh_bound * k / w.nu
            })
            .collect();
        assert!(c.iter().all(|&v| v < 20.0), "{c:?}");
        assert!(optimality_witness(1e3).is_err());
    }

    #[test]
    fn witness_numeric_at_e9() {
        let nu = 9f64.exp();
        let w = optimality_witness(nu).unwrap();
        let n = witness_rayleigh_numeric(nu, &WitnessGrid::for_nu(nu)).unwrap();
        assert!(n.rayleigh <= 1.2 * w.rayleigh_bound, "{n:?} {w:?}");
        assert!((n.x0_norm_sq - w.x0_norm_sq).abs() <= 0.01 * w.x0_norm_sq, "{n:?}");
        assert!(n.u_norm_sq >= w.u_norm_sq_lower);
        assert!((n.u_norm_sq - w.u_norm_sq).abs() <= 1e-3 * w.u_norm_sq, "{n:?} {w:?}");
        assert!(n.op_norm_sq <= w.op_bound_sq && n.op_norm_sq <= w.op_bound_sq_averaged);
    }

    #[test]
    fn coarse_witness_grid_is_rejected() {
        let nu = 9f64.exp();
        let grid = WitnessGrid { hx: 0.2, hy: 1.0, ..WitnessGrid::for_nu(nu) };
        assert!(matches!(witness_rayleigh_numeric(nu, &grid), Err(Error::GridUnderResolved { .. })));
    }

    proptest! {
        #[test]
        fn norm_bounded_by_one(nu in 1e-3f64..1e3, t in 0.0f64..5.0) {
            let r = semigroup_norm(t, nu).unwrap();
            prop_assert!(r.norm <= 1.0 && r.norm > 0.0);
        }

        #[test]
        fn gd_matches_quadrature(a in 0.0f64..6.0) {
            let (v, _) = adaptive(|s| 1.0 / s.cosh(), 0.0, a.max(1e-9), 1e-13).unwrap();
            prop_assert!((v - gd(a.max(1e-9))).abs() < 1e-11);
        }
    }
}
