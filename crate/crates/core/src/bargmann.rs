//! Bargmann-side analysis of the confining model `O_p + i sqrt(nu) X_{pi/2}`.
//!
//! The Hamilton map of `K*` is split into its positive and negative
//! Lagrangian planes, which turns the quantized flow into the linear vector
//! field `z ↦ M z` on `C²`. Everything below is finite dimensional.

use nalgebra::{Cholesky, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{c, cr, max_abs, Mat2, Mat4, C64, IU, ONE, ZERO};
use crate::positivity::s_minus_sh_half;
use crate::symbols::{hamilton_map, symbol_hessian, Alpha, ModelParams, SymbolLabel};

/// `c0 = sup_{s >= 0} s e^{-s}`.
pub const C0: f64 = 1.0 / std::f64::consts::E;

/// Regimes start at `t = max(4/r1, LARGE_T_START)` for the exponential fit.
pub const LARGE_T_START: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct BargmannReduction {
    pub params: ModelParams,
    pub a_plus: Mat2,
    pub a_minus: Mat2,
    pub b: Mat2,
    pub m: Mat2,
    /// Eigenvalues of the Hamilton map, positive imaginary parts first.
    pub eigenvalues: [C64; 4],
    /// Matching eigenvectors as columns.
    pub eigenvectors: Mat4,
    /// Max residual of the identification `Hess = P+ᵀ B P- + P-ᵀ Bᵀ P+`.
    pub identification_residual: f64,
}

impl BargmannReduction {
    /// `(1 - i A+)^{-1} (1 + i A+)`, which must vanish.
    pub fn weight_matrix(&self) -> Result<Mat2> {
        let id = Mat2::identity();
        let lhs = (id - self.a_plus * IU)
            .try_inverse()
            .ok_or(Error::DegenerateEigenbasis(0.0))?;
        Ok(lhs * (id + self.a_plus * IU))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedQuotient {
    pub t: f64,
    pub params: ModelParams,
    pub q_t_eq: f64,
    pub e_q_prime: [C64; 2],
    pub lambda_minus: f64,
    pub sup_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramEigenvalues {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// `e^t e^{-2 Argsh |S|}`.
    pub lambda_minus_argsh: f64,
}

fn require_confining(params: &ModelParams) -> Result<f64> {
    if params.alpha != Alpha::HalfPi {
        return Err(Error::InvalidParameter("Bargmann reduction needs alpha = pi/2".into()));
    }
    match params.r1() {
        Some(r1) if r1.is_finite() => Ok(r1),
        _ => Err(Error::InvalidParameter(format!("Bargmann analysis needs nu > 1/4, got {}", params.nu))),
    }
}

/// Pauli matrices `(sigma1, sigma2, sigma3)`.
pub fn pauli() -> [Mat2; 3] {
    [
        Mat2::new(ZERO, ONE, ONE, ZERO),
        Mat2::new(ZERO, -IU, IU, ZERO),
        Mat2::new(ONE, ZERO, ZERO, -ONE),
    ]
}

/// Hessian of the Weyl symbol of `K* = O_p - z X`.
fn kstar_hessian(params: &ModelParams) -> Mat4 {
    let a = params.alpha.angle();
    symbol_hessian(SymbolLabel::Op, a, ZERO) - symbol_hessian(SymbolLabel::X, a, ZERO) * params.z()
}

/// Unit null vector of `h - lambda` from the smallest singular value.
fn null_vector(h: &Mat4, lambda: C64) -> (nalgebra::Vector4<C64>, f64) {
    let shifted = h - Mat4::identity() * lambda;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested V^*");
    let (idx, smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (k, &s)| if s < acc.1 { (k, s) } else { acc });
    (v_t.row(idx).adjoint(), smin)
}

fn lagrangian_matrix(vecs: [&nalgebra::Vector4<C64>; 2]) -> Result<Mat2> {
    let b1 = Mat2::new(vecs[0][0], vecs[1][0], vecs[0][1], vecs[1][1]);
    let b2 = Mat2::new(vecs[0][2], vecs[1][2], vecs[0][3], vecs[1][3]);
    let det = b1.determinant().norm();
    if det < 1e-8 {
        return Err(Error::DegenerateEigenbasis(det));
    }
    Ok(b2 * b1.try_inverse().ok_or(Error::DegenerateEigenbasis(det))?)
}

/// Supersymmetric reduction of `K*` for `alpha = pi/2`, `nu > 1/4`.
pub fn reduce(params: &ModelParams) -> Result<BargmannReduction> {
    require_confining(params)?;
    let n1 = params.n1();
    let hess = kstar_hessian(params);
    let h = hamilton_map(&hess)?;

    // lambda_{e1,e2} = (e1 i + e2 i n1)/2, ordered with Im > 0 first.
    let mut eigenvalues = [ZERO; 4];
    let mut k = 0;
    for e1 in [1.0, -1.0] {
        for e2 in [1.0, -1.0] {
            eigenvalues[k] = (IU * e1 + IU * n1 * e2) * 0.5;
            k += 1;
        }
    }
    if (eigenvalues[0] - eigenvalues[1]).norm() < 1e-6 {
        return Err(Error::DegenerateEigenbasis(n1.norm()));
    }

    let mut vectors = Vec::with_capacity(4);
    for lam in eigenvalues {
        let (v, smin) = null_vector(&h, lam);
        if smin > 1e-8 * (1.0 + max_abs(&h)) {
            return Err(Error::DegenerateEigenbasis(smin));
        }
        vectors.push(v);
    }
    let a_plus = lagrangian_matrix([&vectors[0], &vectors[1]])?;
    let a_minus = lagrangian_matrix([&vectors[2], &vectors[3]])?;

    let (b, identification_residual) = identify_b(&hess, &a_plus, &a_minus);
    let m = (Mat2::identity() - a_plus * IU) * b;
    let eigenvectors = Mat4::from_columns(&vectors);
    Ok(BargmannReduction {
        params: *params,
        a_plus,
        a_minus,
        b,
        m,
        eigenvalues,
        eigenvectors,
        identification_residual,
    })
}

/// Least-squares `B` in `Hess = P+ᵀ B P- + P-ᵀ Bᵀ P+`, `P± = [-A±, Id]`.
fn identify_b(hess: &Mat4, a_plus: &Mat2, a_minus: &Mat2) -> (Mat2, f64) {
    let proj = |a: &Mat2| {
        let mut p = nalgebra::SMatrix::<C64, 2, 4>::zeros();
        p.fixed_view_mut::<2, 2>(0, 0).copy_from(&(-a));
        p.fixed_view_mut::<2, 2>(0, 2).copy_from(&Mat2::identity());
        p
    };
    let (pp, pm) = (proj(a_plus), proj(a_minus));
    let mut design = nalgebra::SMatrix::<C64, 16, 4>::zeros();
    for k in 0..4 {
        let mut unit = Mat2::zeros();
        unit[(k / 2, k % 2)] = ONE;
        let img = pp.transpose() * unit * pm + pm.transpose() * unit.transpose() * pp;
        for r in 0..16 {
            design[(r, k)] = img[(r / 4, r % 4)];
        }
    }
    let rhs = nalgebra::SVector::<C64, 16>::from_fn(|r, _| hess[(r / 4, r % 4)]);
    let sol = design
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .expect("SVD computed with U and V");
    let residual = max_abs(&(design * sol - rhs));
    (Mat2::new(sol[0], sol[1], sol[2], sol[3]), residual)
}

/// `e^{tM}` from the Pauli form `e^{t/2}(C + 2S(-sigma3/2 - i sqrt(nu) sigma2))`.
pub fn flow_matrix(t: f64, params: &ModelParams) -> Mat2 {
    let (cc, ss) = params.flow_cs_real(t);
    let [_, s2, s3] = pauli();
    let inner = Mat2::identity() * cr(cc) + (s3 * cr(-0.5) - s2 * (IU * params.nu.sqrt())) * cr(2.0 * ss);
    inner * cr((t / 2.0).exp())
}

/// `(e^{tM})^* e^{tM}` in closed form.
pub fn gram_matrix(t: f64, params: &ModelParams) -> Mat2 {
    let (cc, ss) = params.flow_cs_real(t);
    let [s1, _, s3] = pauli();
    let e = t.exp();
    (Mat2::identity() * cr(1.0 + 2.0 * ss * ss) - s3 * cr(2.0 * cc * ss) + s1 * cr(4.0 * params.nu.sqrt() * ss * ss)) * cr(e)
}

pub fn gram_eigenvalues(t: f64, params: &ModelParams) -> Result<GramEigenvalues> {
    require_confining(params)?;
    let (_, ss) = params.flow_cs_real(t);
    let a = 1.0 + 2.0 * ss * ss;
    let root = 2.0 * ss.abs() * (1.0 + ss * ss).sqrt();
    let e = t.exp();
    Ok(GramEigenvalues {
        lambda_plus: e * (a + root),
        lambda_minus: e * (a - root),
        lambda_minus_argsh: (t - 2.0 * ss.abs().asinh()).exp(),
    })
}

/// `sh²(t/2) - S²(t)`, evaluated without cancellation at small `t`.
pub fn sh2_minus_s2(t: f64, params: &ModelParams) -> f64 {
    let (_, ss) = params.flow_cs_real(t);
    -s_minus_sh_half(t, params) * (ss + (t / 2.0).sinh())
}

pub fn quotient(t: f64, params: &ModelParams) -> Result<WeightedQuotient> {
    require_confining(params)?;
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("quotient needs t > 0, got {t}")));
    }
    let (cc, ss) = params.flow_cs_real(t);
    let denom = -(-t).exp_m1() + 2.0 * ss * ss + 2.0 * ss * cc;
    let q = 4.0 * sh2_minus_s2(t, params) / denom;
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::NonFinite("Bargmann quotient"));
    }
    // S_t(e_p, e_q) / S_t(e_p, e_p) with the e^t factor cancelled.
    let ratio = 4.0 * params.nu.sqrt() * ss * ss / denom;
    let lambda_minus = gram_eigenvalues(t, params)?.lambda_minus_argsh;
    Ok(WeightedQuotient {
        t,
        params: *params,
        q_t_eq: q,
        e_q_prime: [ONE, cr(-ratio)],
        lambda_minus,
        sup_value: 2.0 * C0 / q,
    })
}

/// Hermitian form `S_t(u, v) = u^* ((e^{tM})^* e^{tM} - Id) v` from the closed Gram matrix.
pub fn form_s(t: f64, params: &ModelParams, u: &[C64; 2], v: &[C64; 2]) -> C64 {
    let g = gram_matrix(t, params) - Mat2::identity();
    let uv = nalgebra::Vector2::new(u[0], u[1]);
    let vv = nalgebra::Vector2::new(v[0], v[1]);
    (uv.adjoint() * g * vv)[(0, 0)]
}

/// Maximize `f` on `[lo, hi]` by golden-section search.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol * (1.0 + lo.abs() + hi.abs()) {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Radial maximization of `|l(e'_q)|² s e^{-s Q/2}` in the adapted basis.
pub fn sup_radial(w: &WeightedQuotient) -> f64 {
    let lq = w.e_q_prime[0].norm_sqr();
    let q = w.q_t_eq;
    let smax = 40.0 / q;
    let (_, v) = golden_max(|s| lq * s * (-s * q / 2.0).exp(), 0.0, smax, 1e-12);
    v
}

/// Nelder-Mead minimization in `R^n`; returns `(argmin, min)`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, start: &[f64], step: f64, ftol: f64, max_iter: usize) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for k in 0..n {
        let mut p = start.to_vec();
        p[k] += step;
        simplex.push(p);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        simplex = order.iter().map(|&k| simplex[k].clone()).collect();
        vals = order.iter().map(|&k| vals[k]).collect();
        if (vals[n] - vals[0]).abs() <= ftol * (1.0 + vals[0].abs()) {
            break;
        }
        let centroid: Vec<f64> = (0..n).map(|d| simplex[..n].iter().map(|p| p[d]).sum::<f64>() / n as f64).collect();
        let along = |s: f64| -> Vec<f64> { (0..n).map(|d| centroid[d] + s * (simplex[n][d] - centroid[d])).collect() };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[n] = xe;
                vals[n] = fe;
            } else {
                simplex[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            simplex[n] = xr;
            vals[n] = fr;
        } else {
            let (xc, fc) = if fr < vals[n] {
                let x = along(-0.5);
                let v = f(&x);
                (x, v)
            } else {
                let x = along(0.5);
                let v = f(&x);
                (x, v)
            };
            if fc < vals[n].min(fr) {
                simplex[n] = xc;
                vals[n] = fc;
            } else {
                let best = simplex[0].clone();
                for k in 1..=n {
                    for d in 0..n {
                        simplex[k][d] = best[d] + 0.5 * (simplex[k][d] - best[d]);
                    }
                    vals[k] = f(&simplex[k]);
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    (simplex[best].clone(), vals[best])
}

/// Unstructured oracle for `sup_z |z_q|² e^{-Q_t(z)/2}` over `C² = R⁴`.
///
/// `Q_t` is assembled from a dense exponential of `tM`, whitened by its
/// Cholesky factor, and the log-objective is minimized from seeded random
/// starts.
pub fn sup_unstructured(t: f64, params: &ModelParams, seed: u64, starts: usize) -> Result<f64> {
    let red_m = Mat2::new(ZERO, cr(-params.nu.sqrt()), cr(params.nu.sqrt()), ONE);
    let et = (red_m * cr(t)).exp();
    let w = et.adjoint() * et - Mat2::identity();
    let chol = Cholesky::new(w).ok_or(Error::InvalidParameter("Q_t not positive definite".into()))?;
    // z = L^{-*} y gives Q_t(z) = |y|², z_q = (row 0 of L^{-*}) y.
    let linv_adj = chol
        .l()
        .try_inverse()
        .ok_or(Error::InvalidParameter("singular Cholesky factor".into()))?
        .adjoint();
    let row = [linv_adj[(0, 0)], linv_adj[(0, 1)]];
    let objective = |x: &[f64]| -> f64 {
        let y = [c(x[0], x[1]), c(x[2], x[3])];
        let zq = row[0] * y[0] + row[1] * y[1];
        let r2 = x.iter().map(|v| v * v).sum::<f64>();
        -zq.norm_sqr().ln() + r2 / 2.0
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for _ in 0..starts {
        let start: Vec<f64> = (0..4).map(|_| rng.random_range(-1.5..1.5)).collect();
        let (x, _) = nelder_mead(&objective, &start, 0.5, 1e-15, 20_000);
        let (_, v) = nelder_mead(&objective, &x, 1e-3, 1e-16, 20_000);
        if v.is_finite() && v < best {
            best = v;
        }
    }
    if !best.is_finite() {
        return Err(Error::NonFinite("unstructured optimizer"));
    }
    Ok((-best).exp())
}

/// Worst constants of the two quotient regimes over the given `nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeFit {
    /// `max nu t³ / Q_t(e'_q)` for `t <= 4/r1`.
    pub c_small: f64,
    /// `max e^t / Q_t(e'_q)` for `t >= max(4/r1, LARGE_T_START)`.
    pub c_large: f64,
}

pub fn regime_fit(nus: &[f64], samples: usize, t_max: f64) -> Result<RegimeFit> {
    let mut fit = RegimeFit { c_small: 0.0, c_large: 0.0 };
    for &nu in nus {
        let params = ModelParams::new(nu, Alpha::HalfPi);
        let r1 = require_confining(&params)?;
        let tb = 4.0 / r1;
        for k in 0..samples {
            let t = tb * 10f64.powf(-3.0 * (1.0 - k as f64 / (samples - 1) as f64));
            let q = quotient(t, &params)?.q_t_eq;
            fit.c_small = fit.c_small.max(nu * t.powi(3) / q);
        }
        let start = tb.max(LARGE_T_START);
        for k in 0..samples {
            let t = start + (t_max - start) * k as f64 / (samples - 1) as f64;
            let q = quotient(t, &params)?.q_t_eq;
            fit.c_large = fit.c_large.max(t.exp() / q);
        }
    }
    Ok(fit)
}

/// Explicit bound for `‖sqrt(nu) a_q^* e^{-t(K + nu^{1/3})}‖`.
///
/// `sqrt(nu) e^{-t nu^{1/3}} (e^{-t} + e^t c0 / Q_t(e'_q))^{1/2}`, where the
/// first term is the Jacobian of the flow and the second the weighted sup.
pub fn remainder_bound(t: f64, params: &ModelParams) -> Result<f64> {
    let q = quotient(t, params)?.q_t_eq;
    let nu = params.nu;
    Ok(nu.sqrt() * (-t * nu.cbrt()).exp() * ((-t).exp() + t.exp() * C0 / q).sqrt())
}

/// `max_{s >= 0} s^{3/2} e^{-s} = (3/2)^{3/2} e^{-3/2}`.
pub fn envelope_constant() -> f64 {
    1.5f64.powf(1.5) * (-1.5f64).exp()
}

/// `sup t^{3/2} remainder_bound(t)` over a log grid of `(0, t_max]`.
pub fn remainder_envelope(params: &ModelParams, t_max: f64, samples: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..samples {
        let t = t_max * 10f64.powf(-6.0 * (1.0 - k as f64 / (samples - 1) as f64));
        worst = worst.max(t.powf(1.5) * remainder_bound(t, params)?);
    }
    Ok(worst)
}

/// Dense eigenvalues of a Hermitian 2×2 matrix, ascending.
pub fn dense_gram_eigenvalues(t: f64, params: &ModelParams) -> [f64; 2] {
    let red_m = Mat2::new(ZERO, cr(-params.nu.sqrt()), cr(params.nu.sqrt()), ONE);
    let et = (red_m * cr(t)).exp();
    let g = et.adjoint() * et;
    let eig = SymmetricEigen::new(g).eigenvalues;
    let (a, b) = (eig[0], eig[1]);
    [a.min(b), a.max(b)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hp(nu: f64) -> ModelParams {
        ModelParams::new(nu, Alpha::HalfPi)
    }

    #[test]
    fn lagrangian_planes_are_plus_minus_i() {
        for nu in [0.5, 1.0, 10.0] {
            let r = reduce(&hp(nu)).unwrap();
            assert!(max_abs(&(r.a_plus - Mat2::identity() * IU)) < 1e-12, "{nu}");
            assert!(max_abs(&(r.a_minus + Mat2::identity() * IU)) < 1e-12, "{nu}");
            assert!(max_abs(&(r.a_plus - r.a_plus.transpose())) < 1e-12);
            assert!(r.identification_residual < 1e-12);
        }
    }

    #[test]
    fn reduced_generator() {
        for nu in [0.5, 1.0, 10.0] {
            let r = reduce(&hp(nu)).unwrap();
            let s = nu.sqrt();
            let want = Mat2::new(ZERO, cr(-s), cr(s), ONE);
            assert!(max_abs(&(r.m - want)) < 1e-12, "{nu}: {:?}", r.m);
            assert!(max_abs(&(r.m - r.b * cr(2.0))) < 1e-12);
            assert!(max_abs(&r.weight_matrix().unwrap()) < 1e-12);
        }
    }

    #[test]
    fn eigenpairs_of_hamilton_map() {
        let p = hp(3.0);
        let r = reduce(&p).unwrap();
        let h = hamilton_map(&kstar_hessian(&p)).unwrap();
        for k in 0..4 {
            let v = r.eigenvectors.column(k);
            assert!(max_abs(&(h * v - v * r.eigenvalues[k])) < 1e-12);
        }
        assert!(r.eigenvalues[..2].iter().all(|l| l.im > 0.0));
        assert!(r.eigenvalues[2..].iter().all(|l| l.im < 0.0));
    }

    #[test]
    fn resonance_and_wrong_model_rejected() {
        assert!(matches!(reduce(&hp(0.25)), Err(Error::InvalidParameter(_))));
        assert!(matches!(reduce(&hp(0.25 + 1e-16)), Err(Error::DegenerateEigenbasis(_))));
        assert!(reduce(&ModelParams::new(1.0, Alpha::Zero)).is_err());
    }

    #[test]
    fn pauli_relations() {
        let [s1, s2, s3] = pauli();
        let id = Mat2::identity();
        for s in [s1, s2, s3] {
            assert!(max_abs(&(s * s - id)) < 1e-15);
        }
        assert!(max_abs(&(s1 * s2 * s3 * (-IU) - id)) < 1e-15);
    }

    #[test]
    fn flow_matrix_matches_dense_exponential() {
        for nu in [0.3, 1.0, 10.0] {
            let p = hp(nu);
            let m = reduce(&p).unwrap().m;
            for t in [0.01, 0.5, 2.0, 5.0] {
                let dense = (m * cr(t)).exp();
                let closed = flow_matrix(t, &p);
                assert!(max_abs(&(dense - closed)) < 1e-11 * (1.0 + max_abs(&dense)));
                let det = closed.determinant();
                let tr = m.trace();
                assert!((det - (tr * t).exp()).norm() < 1e-12 * (t * tr.re).exp());
                let g = closed.adjoint() * closed;
                assert!(max_abs(&(g - gram_matrix(t, &p))) < 1e-11 * max_abs(&g));
            }
        }
    }

    #[test]
    fn gram_eigenvalue_forms() {
        for nu in [0.3, 1.0, 10.0, 1e3] {
            let p = hp(nu);
            for k in 1..=40 {
                let t = 10.0 * k as f64 / 40.0;
                let g = gram_eigenvalues(t, &p).unwrap();
                assert!((g.lambda_minus - g.lambda_minus_argsh).abs() <= 1e-11 * g.lambda_minus_argsh);
                assert!(g.lambda_minus_argsh > 1.0, "{nu} {t}");
                let dense = dense_gram_eigenvalues(t, &p);
                assert!((dense[0] - g.lambda_minus_argsh).abs() <= 1e-10 * dense[1]);
                assert!((dense[1] - g.lambda_plus).abs() <= 1e-10 * dense[1]);
            }
        }
    }

    #[test]
    fn biquaternion_route_to_gram_spectrum() {
        use crate::biquat::Biquaternion;
        let p = hp(2.0);
        for t in [0.3, 1.0, 4.0] {
            let (cc, ss) = p.flow_cs_real(t);
            // sigma3 = -i·i and sigma1 = -i·k.
            let w = Biquaternion::new(cr(1.0 + 2.0 * ss * ss), c(0.0, 2.0 * cc * ss), ZERO, c(0.0, -4.0 * 2f64.sqrt() * ss * ss));
            let g = gram_matrix(t, &p) * cr((-t).exp());
            assert!(max_abs(&(w.to_matrix() - g)) < 1e-13);
            let n = w.vector().norm();
            assert!((n - cr(-4.0 * ss * ss * (1.0 + ss * ss))).norm() < 1e-12);
            let mut spec: Vec<f64> = w.spectrum().iter().map(|l| l.re * t.exp()).collect();
            spec.sort_by(f64::total_cmp);
            let ge = gram_eigenvalues(t, &p).unwrap();
            assert!((spec[0] - ge.lambda_minus_argsh).abs() < 1e-10 * ge.lambda_plus);
            assert!((spec[1] - ge.lambda_plus).abs() < 1e-10 * ge.lambda_plus);
        }
    }

    #[test]
    fn pythagorean_identity_and_factor_signs() {
        for nu in [0.26, 0.5, 1.0, 100.0, 1e4] {
            let p = hp(nu);
            for k in 0..200 {
                let t = 10f64.powf(-4.0 + 5.0 * k as f64 / 199.0);
                let (cc, ss) = p.flow_cs_real(t);
                assert!(((4.0 * nu - 1.0) * ss * ss + cc * cc - 1.0).abs() < 1e-12);
                let sh = (t / 2.0).sinh();
                assert!(sh - ss.abs() > 0.0 && sh + ss > 0.0, "{nu} {t}");
                assert!(sh2_minus_s2(t, &p) > 0.0);
            }
        }
    }

    #[test]
    fn adapted_basis_is_orthogonal() {
        for nu in [0.5, 4.0, 100.0] {
            let p = hp(nu);
            for t in [0.05, 0.7, 3.0] {
                let w = quotient(t, &p).unwrap();
                let ep = [ZERO, ONE];
                let spp = form_s(t, &p, &ep, &ep).re;
                assert!(form_s(t, &p, &w.e_q_prime, &ep).norm() <= 1e-11 * spp);
                let direct = form_s(t, &p, &w.e_q_prime, &w.e_q_prime).re;
                assert!((direct - w.q_t_eq).abs() <= 1e-9 * direct.abs().max(spp));
                assert!((w.sup_value * w.q_t_eq - 2.0 * C0).abs() < 1e-14);
                assert!(w.lambda_minus > 1.0);
            }
        }
    }

    #[test]
    fn sup_matches_optimizers() {
        for nu in [1.0, 10.0] {
            let p = hp(nu);
            for t in [0.3, 1.0, 3.0] {
                let w = quotient(t, &p).unwrap();
                let radial = sup_radial(&w);
                assert!((radial - w.sup_value).abs() <= 1e-9 * w.sup_value);
                let free = sup_unstructured(t, &p, 7, 4).unwrap();
                assert!((free - w.sup_value).abs() <= 1e-6 * w.sup_value, "{nu} {t}: {free} vs {}", w.sup_value);
            }
        }
    }

    #[test]
    fn quotient_regimes() {
        let fit = regime_fit(&[1.0, 1e2, 1e4], 300, 12.0).unwrap();
        assert!(fit.c_small < 6.5, "{fit:?}");
        assert!(fit.c_large < 2.5, "{fit:?}");
    }

    #[test]
    fn envelope() {
        let (s, v) = golden_max(|s| s.powf(1.5) * (-s).exp(), 0.0, 20.0, 1e-13);
        assert!((s - 1.5).abs() < 1e-6);
        assert!((v - envelope_constant()).abs() < 1e-14);
        for nu in [2.0, 1e2, 1e6] {
            let e = remainder_envelope(&hp(nu), 10.0, 400).unwrap();
            assert!(e.is_finite() && e < 10.0, "{nu}: {e}");
        }
    }

    proptest! {
        #[test]
        fn lambda_minus_exceeds_one(nu in 0.26f64..1e3, t in 1e-3f64..10.0) {
            let g = gram_eigenvalues(t, &hp(nu)).unwrap();
            prop_assert!(g.lambda_minus_argsh > 1.0);
            prop_assert!(g.lambda_plus >= g.lambda_minus_argsh);
        }

        #[test]
        fn quotient_positive(nu in 0.26f64..1e4, t in 1e-3f64..12.0) {
            let w = quotient(t, &hp(nu)).unwrap();
            prop_assert!(w.q_t_eq > 0.0);
        }
    }
}
