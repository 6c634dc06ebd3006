//! Exact action of polynomials in the ladder operators on Hermite states.

use crate::linalg::{cr, C64, IU};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Aq,
    AqDag,
    Ap,
    ApDag,
}

impl Ladder {
    fn adjoint(self) -> Self {
        match self {
            Ladder::Aq => Ladder::AqDag,
            Ladder::AqDag => Ladder::Aq,
            Ladder::Ap => Ladder::ApDag,
            Ladder::ApDag => Ladder::Ap,
        }
    }

    /// `(coefficient, new state)`; `None` when the state is annihilated.
    fn act(self, nq: usize, np: usize) -> Option<(f64, usize, usize)> {
        match self {
            Ladder::Aq => (nq > 0).then(|| ((nq as f64).sqrt(), nq - 1, np)),
            Ladder::AqDag => Some((((nq + 1) as f64).sqrt(), nq + 1, np)),
            Ladder::Ap => (np > 0).then(|| ((np as f64).sqrt(), nq, np - 1)),
            Ladder::ApDag => Some((((np + 1) as f64).sqrt(), nq, np + 1)),
        }
    }

    /// Change in `(n_q, n_p)`.
    fn shift(self) -> (i64, i64) {
        match self {
            Ladder::Aq => (-1, 0),
            Ladder::AqDag => (1, 0),
            Ladder::Ap => (0, -1),
            Ladder::ApDag => (0, 1),
        }
    }
}

/// `coeff * ops[0] ops[1] ... ops[k-1]`, acting right to left.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: C64,
    pub ops: Vec<Ladder>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LadderPoly {
    pub terms: Vec<Monomial>,
}

impl LadderPoly {
    pub fn constant(c: C64) -> Self {
        Self { terms: vec![Monomial { coeff: c, ops: vec![] }] }
    }

    pub fn term(coeff: C64, ops: &[Ladder]) -> Self {
        Self { terms: vec![Monomial { coeff, ops: ops.to_vec() }] }
    }

    pub fn scale(mut self, s: C64) -> Self {
        for m in &mut self.terms {
            m.coeff *= s;
        }
        self
    }

    pub fn add(mut self, other: Self) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let mut ops = a.ops.clone();
                ops.extend(&b.ops);
                terms.push(Monomial { coeff: a.coeff * b.coeff, ops });
            }
        }
        Self { terms }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|m| Monomial { coeff: m.coeff.conj(), ops: m.ops.iter().rev().map(|o| o.adjoint()).collect() })
                .collect(),
        }
    }

    /// Largest increase of `(n_q, n_p)` produced by any term.
    pub fn reach(&self) -> (usize, usize) {
        let mut r = (0i64, 0i64);
        for m in &self.terms {
            let (mut dq, mut dp) = (0i64, 0i64);
            for op in m.ops.iter().rev() {
                let (a, b) = op.shift();
                dq += a;
                dp += b;
                r.0 = r.0.max(dq);
                r.1 = r.1.max(dp);
            }
        }
        (r.0 as usize, r.1 as usize)
    }

    /// Images of `|nq, np>` as `(nq', np', coefficient)`, merged per target;
    /// contributions cancelling to rounding level are dropped.
    pub fn apply_state(&self, nq: usize, np: usize, out: &mut Vec<(usize, usize, C64)>) {
        out.clear();
        let mut scale: Vec<f64> = Vec::new();
        'terms: for m in &self.terms {
            let (mut q, mut p, mut c) = (nq, np, m.coeff);
            for op in m.ops.iter().rev() {
                match op.act(q, p) {
                    Some((f, q2, p2)) => {
                        c *= f;
                        q = q2;
                        p = p2;
                    }
                    None => continue 'terms,
                }
            }
            match out.iter().position(|e| e.0 == q && e.1 == p) {
                Some(k) => {
                    out[k].2 += c;
                    scale[k] += c.norm();
                }
                None => {
                    out.push((q, p, c));
                    scale.push(c.norm());
                }
            }
        }
        let mut k = 0;
        out.retain(|e| {
            let keep = e.2.norm() > 1e-14 * scale[k];
            k += 1;
            keep
        });
    }
}

/// `q = (a + a*)/√2` for the chosen mode.
pub fn position(q_mode: bool) -> LadderPoly {
    let (a, ad) = if q_mode { (Ladder::Aq, Ladder::AqDag) } else { (Ladder::Ap, Ladder::ApDag) };
    let r = std::f64::consts::FRAC_1_SQRT_2;
    LadderPoly::term(cr(r), &[a]).add(LadderPoly::term(cr(r), &[ad]))
}

/// `D = (a - a*)/(i√2)` for the chosen mode.
pub fn momentum(q_mode: bool) -> LadderPoly {
    let (a, ad) = if q_mode { (Ladder::Aq, Ladder::AqDag) } else { (Ladder::Ap, Ladder::ApDag) };
    let r = std::f64::consts::FRAC_1_SQRT_2;
    LadderPoly::term(-IU * r, &[a]).add(LadderPoly::term(IU * r, &[ad]))
}

/// `O = a* a + 1/2` for the chosen mode.
pub fn oscillator(q_mode: bool) -> LadderPoly {
    let (a, ad) = if q_mode { (Ladder::Aq, Ladder::AqDag) } else { (Ladder::Ap, Ladder::ApDag) };
    LadderPoly::term(cr(1.0), &[ad, a]).add(LadderPoly::constant(cr(0.5)))
}

/// `X_alpha = i(e^{-i alpha} p D_q + e^{i alpha} q D_p)`.
pub fn transport(alpha: f64) -> LadderPoly {
    let e = C64::from_polar(1.0, alpha);
    let first = position(false).mul(&momentum(true)).scale(IU * e.conj());
    let second = position(true).mul(&momentum(false)).scale(IU * e);
    first.add(second)
}

/// `Y_alpha = i(e^{i alpha} p q - e^{-i alpha} D_q D_p)`.
pub fn commutator_partner(alpha: f64) -> LadderPoly {
    let e = C64::from_polar(1.0, alpha);
    let first = position(false).mul(&position(true)).scale(IU * e);
    let second = momentum(true).mul(&momentum(false)).scale(-IU * e.conj());
    first.add(second)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collect(p: &LadderPoly, nq: usize, np: usize) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::new();
        p.apply_state(nq, np, &mut out);
        let mut merged: Vec<(usize, usize, C64)> = Vec::new();
        for (q, pp, c) in out {
            match merged.iter_mut().find(|(a, b, _)| *a == q && *b == pp) {
                Some(e) => e.2 += c,
                None => merged.push((q, pp, c)),
            }
        }
        merged.retain(|e| e.2.norm() > 1e-14);
        merged.sort_by_key(|e| (e.0, e.1));
        merged
    }

    #[test]
    fn transport_ladder_forms() {
        // alpha = 0: a_q a_p - a_q* a_p*.
        let x0 = collect(&transport(0.0), 2, 3);
        let want = [(1, 2, (2.0f64 * 3.0).sqrt()), (3, 4, -(3.0f64 * 4.0).sqrt())];
        assert_eq!(x0.len(), 2);
        for ((q, p, c), (wq, wp, wc)) in x0.iter().zip(want) {
            assert_eq!((*q, *p), (wq, wp));
            assert!((c - cr(wc)).norm() < 1e-14);
        }
        // alpha = pi/2: -i (a_p* a_q - a_q* a_p) conserves n_q + n_p.
        let xh = collect(&transport(std::f64::consts::FRAC_PI_2), 2, 3);
        assert!(xh.iter().all(|(q, p, _)| q + p == 5));
    }

    #[test]
    fn adjoint_reverses() {
        let p = LadderPoly::term(IU, &[Ladder::AqDag, Ladder::Ap]);
        let a = p.adjoint();
        assert_eq!(a.terms[0].ops, vec![Ladder::ApDag, Ladder::Aq]);
        assert_eq!(a.terms[0].coeff, -IU);
        assert_eq!(p.reach(), (1, 0));
    }
}
