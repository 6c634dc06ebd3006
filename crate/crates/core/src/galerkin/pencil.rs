//! Truncated generalized eigenproblem for the subelliptic constant.

use nalgebra::linalg::{Cholesky, SymmetricEigen};

use super::ladder::{momentum, oscillator, position, transport, LadderPoly};
use crate::error::{Error, Result};
use crate::linalg::{cr, CMat};
use crate::symbols::ModelParams;

#[derive(Debug, Clone, PartialEq)]
pub struct SubellipticResult {
    pub nu_signed: f64,
    pub dims: usize,
    pub a: f64,
    pub c: f64,
}

/// Columns: the `n x n` tensor states; rows: an `(n+2) x (n+2)` padding so
/// every image of a second-order polynomial is kept.
fn rectangular(poly: &LadderPoly, n: usize) -> CMat {
    let m = n + 2;
    let mut out = CMat::zeros(m * m, n * n);
    let mut buf = Vec::new();
    for nq in 0..n {
        for np in 0..n {
            poly.apply_state(nq, np, &mut buf);
            for &(q, p, cf) in &buf {
                out[(q * m + p, nq * n + np)] += cf;
            }
        }
    }
    out
}

fn one_mode(poly: &LadderPoly, n: usize) -> CMat {
    let mut out = CMat::zeros(n, n);
    let mut buf = Vec::new();
    for j in 0..n {
        poly.apply_state(j, 0, &mut buf);
        for &(q, _, cf) in &buf {
            if q < n {
                out[(q, j)] += cf;
            }
        }
    }
    out
}

/// `(I + s H)^{2/3}` for Hermitian `H` through its eigendecomposition.
fn japanese_power(h: &CMat, s: f64) -> CMat {
    let herm = (h + h.adjoint()) * cr(0.5);
    let eig = SymmetricEigen::new(herm);
    let d = CMat::from_diagonal(&eig.eigenvalues.map(|l| cr((1.0 + s * l).powf(2.0 / 3.0))));
    let v = eig.eigenvectors;
    &v * d * v.adjoint()
}

/// Largest `c` with `‖Ku‖² + A‖u‖² >= c(‖O_p u‖² + ‖X_V u‖² + ‖<d_q V>^{2/3}u‖²
/// + ‖<D_q>^{2/3}u‖²)` on `u` spanned by `n_q, n_p < dims`, for
/// `V = nu q²/2`.
pub fn subelliptic_constant(nu_signed: f64, dims: usize) -> Result<SubellipticResult> {
    if dims < 8 {
        return Err(Error::InvalidParameter(format!("pencil needs dims >= 8, got {dims}")));
    }
    let params = ModelParams::from_curvature(nu_signed)?;
    let a = params.sqrt_a().powi(2);
    let n = dims;
    let zx = transport(params.alpha.angle()).scale(params.z());
    let k = rectangular(&oscillator(false).add(zx.clone()), n);
    let op = rectangular(&oscillator(false), n);
    let xv = rectangular(&zx, n);
    let gl = k.ad_mul(&k) + CMat::identity(n * n, n * n) * cr(a);

    let q = one_mode(&position(true), n);
    let d = one_mode(&momentum(true), n);
    let wv = japanese_power(&(&q * &q), params.nu);
    let wd = japanese_power(&(&d * d.adjoint()), params.nu);
    let id = CMat::identity(n, n);
    let gr = op.ad_mul(&op) + xv.ad_mul(&xv) + wv.kronecker(&id) + wd.kronecker(&id);

    let chol = Cholesky::new(gr).ok_or(Error::IndefinitePencil)?;
    let l = chol.l();
    let linv = l.clone().try_inverse().ok_or(Error::IndefinitePencil)?;
    let h = &linv * gl * linv.adjoint();
    let h = (&h + h.adjoint()) * cr(0.5);
    let c = SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if !c.is_finite() {
        return Err(Error::NonFinite("subelliptic_constant"));
    }
    Ok(SubellipticResult { nu_signed, dims, a, c })
}
