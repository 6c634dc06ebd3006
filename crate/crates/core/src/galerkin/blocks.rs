//! Hermite bases split into blocks that the model operator leaves invariant.
//!
//! For `alpha = 0` the transport term conserves `n_q - n_p`, for `alpha = pi/2`
//! it conserves `n_q + n_p`, so `e^{-tK}` is block diagonal and each block is
//! exponentiated densely. Weights are applied through the exact ladder action
//! of `W* W`, so no truncation enters on the weight side.

use std::collections::HashMap;

use rayon::prelude::*;

use super::ladder::LadderPoly;
use crate::error::{Error, Result};
use crate::linalg::{cr, expm, lanczos_max, operator_norm, CMat, CVec, C64, ZERO};

#[derive(Debug, Clone)]
pub struct BlockBasis {
    pub blocks: Vec<Vec<(usize, usize)>>,
    offsets: Vec<usize>,
    index: HashMap<(usize, usize), usize>,
}

impl BlockBasis {
    fn from_blocks(blocks: Vec<Vec<(usize, usize)>>) -> Self {
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut index = HashMap::new();
        let mut n = 0;
        for b in &blocks {
            offsets.push(n);
            for &s in b {
                index.insert(s, n);
                n += 1;
            }
        }
        Self { blocks, offsets, index }
    }

    /// Chains of fixed `m = n_q - n_p` with `|m| <= m_max`, each holding the
    /// `p_len` lowest admissible values of `n_p`.
    pub fn chains(p_len: usize, m_max: usize) -> Self {
        let m_max = m_max as i64;
        let blocks = (-m_max..=m_max)
            .map(|m| {
                let n0 = (-m).max(0) as usize;
                (n0..n0 + p_len).map(|np| (((np as i64) + m) as usize, np)).collect()
            })
            .collect();
        Self::from_blocks(blocks)
    }

    /// Shells `n_q + n_p = k` for `k < n`.
    pub fn total_degree(n: usize) -> Self {
        let blocks = (0..n).map(|k| (0..=k).map(|nq| (nq, k - nq)).collect()).collect();
        Self::from_blocks(blocks)
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn position(&self, state: (usize, usize)) -> Option<usize> {
        self.index.get(&state).copied()
    }

    /// Matrix of `poly` on block `k`; images leaving the block are dropped.
    pub fn block_matrix(&self, k: usize, poly: &LadderPoly) -> CMat {
        let states = &self.blocks[k];
        let local: HashMap<(usize, usize), usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut m = CMat::zeros(states.len(), states.len());
        let mut buf = Vec::new();
        for (j, &(nq, np)) in states.iter().enumerate() {
            poly.apply_state(nq, np, &mut buf);
            for &(q, p, cf) in &buf {
                if let Some(&i) = local.get(&(q, p)) {
                    m[(i, j)] += cf;
                }
            }
        }
        m
    }

    /// Sparse `(row, col, value)` form of `poly` compressed to the basis.
    pub fn compressed(&self, poly: &LadderPoly) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::new();
        let mut buf = Vec::new();
        for b in &self.blocks {
            for &(nq, np) in b {
                let j = self.index[&(nq, np)];
                poly.apply_state(nq, np, &mut buf);
                for &(q, p, cf) in &buf {
                    if let Some(i) = self.position((q, p)) {
                        out.push((i, j, cf));
                    }
                }
            }
        }
        out
    }
}

/// Blockwise `e^{-t(K + shift)}` on a [`BlockBasis`].
#[derive(Debug, Clone)]
pub struct BlockPropagator {
    pub basis: BlockBasis,
    pub blocks: Vec<CMat>,
}

impl BlockPropagator {
    pub fn new(basis: BlockBasis, k: &LadderPoly, t: f64, shift: f64) -> Result<Self> {
        let blocks = (0..basis.blocks.len())
            .map(|b| {
                let m = basis.block_matrix(b, k);
                let n = m.nrows();
                expm(&((m + CMat::identity(n, n) * cr(shift)) * cr(-t)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { basis, blocks })
    }

    fn apply_with(&self, x: &CVec, adjoint: bool) -> CVec {
        let mut y = CVec::from_element(x.len(), ZERO);
        for (b, m) in self.blocks.iter().enumerate() {
            let off = self.basis.offsets[b];
            let n = m.nrows();
            let xs = x.rows(off, n);
            let r = if adjoint { m.ad_mul(&xs) } else { m * xs };
            y.rows_mut(off, n).copy_from(&r);
        }
        y
    }

    pub fn apply(&self, x: &CVec) -> CVec {
        self.apply_with(x, false)
    }

    pub fn apply_adjoint(&self, x: &CVec) -> CVec {
        self.apply_with(x, true)
    }

    /// Largest singular value over the blocks.
    pub fn norm(&self) -> Result<f64> {
        let norms = self.blocks.par_iter().map(operator_norm).collect::<Result<Vec<_>>>()?;
        Ok(norms.into_iter().fold(0.0, f64::max))
    }

    /// `‖W e^{-t(K+shift)}‖` where `gram_poly = W* W`.
    pub fn weighted_norm(&self, gram_poly: &LadderPoly) -> Result<f64> {
        let sparse = self.basis.compressed(gram_poly);
        let dim = self.basis.dim();
        let apply = |x: &CVec| {
            let y = self.apply(x);
            let mut z = CVec::from_element(dim, ZERO);
            for &(i, j, v) in &sparse {
                z[i] += v * y[j];
            }
            self.apply_adjoint(&z)
        };
        let lam = lanczos_max(apply, dim, 1e-11, 600)?;
        if !lam.is_finite() {
            return Err(Error::NonFinite("weighted_norm"));
        }
        Ok(lam.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::super::ladder::{momentum, oscillator, transport};
    use super::*;

    fn k_poly(nu: f64, alpha: f64) -> LadderPoly {
        let z = C64::from_polar(nu.sqrt(), alpha);
        oscillator(false).add(transport(alpha).scale(z))
    }

    #[test]
    fn bases_are_invariant_under_k() {
        for (basis, alpha) in [
            (BlockBasis::chains(10, 3), 0.0),
            (BlockBasis::total_degree(10), std::f64::consts::FRAC_PI_2),
        ] {
            let k = k_poly(2.0, alpha);
            let mut buf = Vec::new();
            for b in &basis.blocks {
                for &(nq, np) in b {
                    k.apply_state(nq, np, &mut buf);
                    for &(q, p, _) in &buf {
                        if alpha == 0.0 {
                            assert_eq!(q as i64 - p as i64, nq as i64 - np as i64);
                        } else {
                            assert_eq!(q + p, nq + np);
                        }
                    }
                }
            }
        }
        assert_eq!(BlockBasis::chains(10, 3).dim(), 70);
        assert_eq!(BlockBasis::total_degree(10).dim(), 55);
    }

    #[test]
    fn identity_weight_matches_block_norm() {
        let basis = BlockBasis::total_degree(14);
        let prop = BlockPropagator::new(basis, &k_poly(4.0, std::f64::consts::FRAC_PI_2), 0.7, 0.0).unwrap();
        let direct = prop.norm().unwrap();
        let lanczos = prop.weighted_norm(&LadderPoly::constant(cr(1.0))).unwrap();
        assert!((direct - lanczos).abs() < 1e-9 * direct);
    }

    #[test]
    fn weighted_norm_matches_dense_product() {
        // Dense oracle: W applied exactly into a padded basis.
        let basis = BlockBasis::chains(8, 2);
        let prop = BlockPropagator::new(basis.clone(), &k_poly(1.0, 0.0), 0.5, 0.3).unwrap();
        let w = momentum(true);
        let big = BlockBasis::chains(12, 4);
        let n = basis.dim();
        let mut dense_u = CMat::zeros(n, n);
        for j in 0..n {
            let mut e = CVec::from_element(n, ZERO);
            e[j] = cr(1.0);
            dense_u.set_column(j, &prop.apply(&e));
        }
        let mut wmat = CMat::zeros(big.dim(), n);
        let mut buf = Vec::new();
        for b in &basis.blocks {
            for &(nq, np) in b {
                let j = basis.position((nq, np)).unwrap();
                w.apply_state(nq, np, &mut buf);
                for &(q, p, cf) in &buf {
                    wmat[(big.position((q, p)).unwrap(), j)] += cf;
                }
            }
        }
        let dense = operator_norm(&(wmat * dense_u)).unwrap();
        let lanczos = prop.weighted_norm(&w.adjoint().mul(&w)).unwrap();
        assert!((dense - lanczos).abs() < 1e-8 * dense, "{dense} {lanczos}");
    }
}
