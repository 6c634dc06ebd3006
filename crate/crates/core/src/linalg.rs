//! Dense complex linear algebra helpers shared by the closed-form modules and
//! the Galerkin oracle.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4, SMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;
pub type Mat42 = SMatrix<C64, 4, 2>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const IU: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Largest entry modulus.
pub fn max_abs<R, Cc, S>(m: &nalgebra::Matrix<C64, R, Cc, S>) -> f64
where
    R: nalgebra::Dim,
    Cc: nalgebra::Dim,
    S: nalgebra::RawStorage<C64, R, Cc>,
{
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn is_finite_mat(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Matrix exponential by scaling and squaring with Padé approximants.
pub fn expm(m: &CMat) -> Result<CMat> {
    let e = m.exp();
    if is_finite_mat(&e) {
        Ok(e)
    } else {
        Err(Error::ExpNotConverged)
    }
}

pub fn expm4(m: &Mat4) -> Mat4 {
    m.exp()
}

/// Scaled-and-squared Taylor series of a 2x2 matrix.
pub fn series_exp2(m: &Mat2) -> Mat2 {
    let norm = max_abs(m) * 2.0;
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = m / C64::from(2f64.powi(squarings));
    let mut sum = Mat2::identity();
    let mut term = Mat2::identity();
    for k in 1..30 {
        term = term * scaled / C64::from(k as f64);
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Eigenvalues of a 2x2 Hermitian matrix in ascending order.
pub fn hermitian_eigvals2(m: &Mat2) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let off = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + off.norm_sqr()).sqrt();
    [mean - r, mean + r]
}

/// Eigenvalues of a general 2x2 complex matrix (principal square root).
pub fn eigvals2(m: &Mat2) -> [C64; 2] {
    let tr = m[(0, 0)] + m[(1, 1)];
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let disc = (tr * tr * 0.25 - det).sqrt();
    [tr * 0.5 + disc, tr * 0.5 - disc]
}

fn start_vector(n: usize) -> CVec {
    let v = CVec::from_fn(n, |k, _| {
        let x = k as f64;
        c(1.0 + 0.37 * (1.3 * x + 0.2).sin(), 0.21 * (0.7 * x + 1.1).cos())
    });
    let nv = v.norm();
    v / cr(nv)
}

/// Largest singular value by power iteration on `m* m`.
pub fn operator_norm(m: &CMat) -> Result<f64> {
    const TOL: f64 = 1e-10;
    const MAX_ITERS: usize = 100_000;
    if m.ncols() == 0 || m.nrows() == 0 {
        return Ok(0.0);
    }
    if !is_finite_mat(m) {
        return Err(Error::NonFinite("operator_norm"));
    }
    let mh = m.adjoint();
    let mut x = start_vector(m.ncols());
    let mut lambda = 0.0_f64;
    let mut change = f64::INFINITY;
    for iter in 0..MAX_ITERS {
        let y = m * &x;
        let next = y.norm_squared();
        let w = &mh * y;
        let nw = w.norm();
        if nw == 0.0 {
            return Ok(0.0);
        }
        x = w / cr(nw);
        change = (next - lambda).abs() / next.max(f64::MIN_POSITIVE);
        lambda = next;
        if iter > 2 && change < TOL * 1e-2 {
            return Ok(lambda.sqrt());
        }
    }
    if change < TOL {
        Ok(lambda.sqrt())
    } else {
        Err(Error::PowerIterationStalled { iters: MAX_ITERS, change })
    }
}

/// Largest eigenvalue of a Hermitian positive semidefinite operator given
/// only through its action, by Lanczos with full reorthogonalisation.
pub fn lanczos_max<F>(apply: F, dim: usize, rel_tol: f64, max_steps: usize) -> Result<f64>
where
    F: Fn(&CVec) -> CVec,
{
    if dim == 0 {
        return Ok(0.0);
    }
    let steps = max_steps.min(dim);
    let mut basis: Vec<CVec> = vec![start_vector(dim)];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut last_theta = 0.0;
    let mut last_resid = f64::INFINITY;
    for j in 0..steps {
        let mut w = apply(&basis[j]);
        let a = basis[j].dotc(&w).re;
        alphas.push(a);
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dotc(&w);
                w.axpy(-proj, q, ONE);
            }
        }
        let b = w.norm();
        let k = alphas.len();
        let t = DMatrix::<f64>::from_fn(k, k, |r, s| {
            if r == s {
                alphas[r]
            } else if r + 1 == s {
                betas[r]
            } else if s + 1 == r {
                betas[s]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let (imax, theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        let resid = b * eig.eigenvectors[(k - 1, imax)].abs();
        last_theta = theta;
        last_resid = resid;
        if resid <= rel_tol * theta.abs().max(f64::MIN_POSITIVE) || b <= 1e-300 || k == dim {
            return Ok(theta.max(0.0));
        }
        betas.push(b);
        basis.push(w / cr(b));
    }
    Err(Error::PowerIterationStalled {
        iters: steps,
        change: last_resid / last_theta.abs().max(f64::MIN_POSITIVE),
    })
}
