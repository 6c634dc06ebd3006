//! Quadrature rules: Gauss rules from the Golub-Welsch eigenproblem and an
//! adaptive double-exponential integrator with an error check.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Nodes and weights of a Gauss rule from the off-diagonal of its Jacobi
/// matrix (zero diagonal) and the total mass `mu0`.
fn golub_welsch(offdiag: &[f64], mu0: f64) -> (Vec<f64>, Vec<f64>) {
    let n = offdiag.len() + 1;
    let jac = DMatrix::<f64>::from_fn(n, n, |r, s| {
        if r + 1 == s {
            offdiag[r]
        } else if s + 1 == r {
            offdiag[s]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], mu0 * eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    golub_welsch(&off, 2.0)
}

/// Gauss-Hermite rule for the weight `exp(-x^2)`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    golub_welsch(&off, std::f64::consts::PI.sqrt())
}

/// Composite Gauss-Legendre integral over `[a, b]` split into `panels`.
pub fn legendre_integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, order: usize, panels: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        total += x.iter().zip(&w).map(|(xi, wi)| wi * f(mid + 0.5 * h * xi)).sum::<f64>() * 0.5 * h;
    }
    total
}

/// Adaptive integral of a smooth function on a finite interval.
/// Returns `(value, error_estimate)`.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    let out = quadrature::double_exponential::integrate(f, a, b, tol);
    if !out.integral.is_finite() {
        return Err(Error::NonFinite("adaptive quadrature"));
    }
    if out.error_estimate > tol {
        return Err(Error::QuadratureNotConverged { tol, estimate: out.error_estimate });
    }
    Ok((out.integral, out.error_estimate))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(6);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn hermite_moments() {
        let (x, w) = gauss_hermite(20);
        let m0: f64 = w.iter().sum();
        let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        let pi = std::f64::consts::PI;
        assert!((m0 - pi.sqrt()).abs() < 1e-13);
        assert!((m2 - pi.sqrt() / 2.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_exponential() {
        let (v, _) = adaptive(|t| (-t).exp(), 0.0, 30.0, 1e-12).unwrap();
        assert!((v - (1.0 - (-30.0f64).exp())).abs() < 1e-11);
    }
}
