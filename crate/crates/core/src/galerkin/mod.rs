//! Hermite-Galerkin discretisation of the model operators, used as an
//! independent numerical oracle for the closed-form norms and bounds.
//!
//! States `|n_q, n_p>` are tensor products of Hermite functions and a dense
//! operator of size `(dim_q dim_p)²` is indexed by `n_q dim_p + n_p`.

pub mod blocks;
pub mod fiber;
pub mod ladder;
pub mod pencil;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bargmann::remainder_bound;
use crate::degenerate;
use crate::error::{Error, Result};
use crate::exactnorms::semigroup_norm;
use crate::linalg::{cr, expm, CMat, IU};
use crate::positivity::decay_bound_prop31;
use crate::symbols::{Alpha, ModelParams};

pub use crate::linalg::operator_norm;
pub use blocks::{BlockBasis, BlockPropagator};
pub use ladder::{Ladder, LadderPoly};
pub use pencil::{subelliptic_constant, SubellipticResult};

use ladder::{commutator_partner, momentum, oscillator, position, transport};

/// Relative change between truncation levels above which a sample is flagged.
pub const CONVERGENCE_TOL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Op,
    Oq,
    X,
    Y,
    K,
    K1,
    Aq,
    AqDag,
    Dq,
    DqV,
    SqrtNuOq,
}

impl Label {
    pub const ALL: [Label; 11] = [
        Label::Op,
        Label::Oq,
        Label::X,
        Label::Y,
        Label::K,
        Label::K1,
        Label::Aq,
        Label::AqDag,
        Label::Dq,
        Label::DqV,
        Label::SqrtNuOq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Label::Op => "O_p",
            Label::Oq => "O_q",
            Label::X => "X",
            Label::Y => "Y",
            Label::K => "K",
            Label::K1 => "K1",
            Label::Aq => "a_q",
            Label::AqDag => "a_q*",
            Label::Dq => "D_q",
            Label::DqV => "dV",
            Label::SqrtNuOq => "sqrt_nu_Oq",
        }
    }

    /// Ladder polynomial of the operator; `None` for functions of `O_q`.
    pub fn poly(self, params: &ModelParams) -> Option<LadderPoly> {
        let alpha = params.alpha.angle();
        let sq = params.nu.sqrt();
        Some(match self {
            Label::Op => oscillator(false),
            Label::Oq => oscillator(true),
            Label::X => transport(alpha),
            Label::Y => commutator_partner(alpha),
            Label::K => oscillator(false).add(transport(alpha).scale(params.z())),
            Label::K1 => oscillator(false)
                .add(LadderPoly::constant(cr(-0.5)))
                .add(position(false).mul(&momentum(true)).scale(IU))
                .add(momentum(false).scale(-IU * params.lambda1)),
            Label::Aq => LadderPoly::term(cr(1.0), &[Ladder::Aq]),
            Label::AqDag => LadderPoly::term(cr(1.0), &[Ladder::AqDag]),
            Label::Dq => momentum(true).scale(cr(sq)),
            Label::DqV => position(true).scale(-params.alpha.phase() * params.alpha.phase() * sq),
            Label::SqrtNuOq => return None,
        })
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Label::ALL.into_iter().find(|l| l.name() == s).ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermiteOperator {
    pub label: Label,
    pub dim_q: usize,
    pub dim_p: usize,
    pub matrix: CMat,
}

impl HermiteOperator {
    pub fn index(&self, nq: usize, np: usize) -> usize {
        nq * self.dim_p + np
    }
}

/// Dense truncation of `label`; ladder images leaving the box are dropped.
pub fn build(label: Label, params: &ModelParams, dim_q: usize, dim_p: usize) -> Result<HermiteOperator> {
    if dim_q < 2 || dim_p < 2 {
        return Err(Error::InvalidParameter(format!("dims must be >= 2, got {dim_q}x{dim_p}")));
    }
    let n = dim_q * dim_p;
    let mut matrix = CMat::zeros(n, n);
    match label.poly(params) {
        Some(poly) => {
            let mut buf = Vec::new();
            for nq in 0..dim_q {
                for np in 0..dim_p {
                    poly.apply_state(nq, np, &mut buf);
                    for &(q, p, cf) in &buf {
                        if q < dim_q && p < dim_p {
                            matrix[(q * dim_p + p, nq * dim_p + np)] += cf;
                        }
                    }
                }
            }
        }
        None => {
            for nq in 0..dim_q {
                let v = (params.nu * (nq as f64 + 0.5)).sqrt();
                for np in 0..dim_p {
                    matrix[(nq * dim_p + np, nq * dim_p + np)] = cr(v);
                }
            }
        }
    }
    Ok(HermiteOperator { label, dim_q, dim_p, matrix })
}

/// `e^{-t M}`.
pub fn semigroup_matrix(op: &HermiteOperator, t: f64) -> Result<CMat> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
    }
    expm(&(&op.matrix * cr(-t)))
}

/// Quantities `‖W e^{-t(K + shift)}‖` tracked by [`decay_curve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    /// `‖e^{-tK}‖`.
    Norm,
    /// `‖sqrt(nu O_q) e^{-t(K + sqrt(nu))}‖`.
    OqWeight,
    /// `‖sqrt(nu) a_q* e^{-t(K + nu^{1/3})}‖`, confining models only.
    Remainder,
    /// `‖|D_q| e^{-t(K + sqrt(A))}‖`.
    Dq,
    /// `‖|D_q| e^{-t(K + 1)}‖` for the linear potential `lambda1 q`, fiberwise.
    DegenerateDq,
}

impl Quantity {
    pub const ALL: [Quantity; 5] =
        [Quantity::Norm, Quantity::OqWeight, Quantity::Remainder, Quantity::Dq, Quantity::DegenerateDq];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Norm => "norm",
            Quantity::OqWeight => "oq-weight",
            Quantity::Remainder => "remainder",
            Quantity::Dq => "dq",
            Quantity::DegenerateDq => "degenerate-dq",
        }
    }

    pub fn shift(self, params: &ModelParams) -> f64 {
        match self {
            Quantity::Norm => 0.0,
            Quantity::OqWeight => params.nu.sqrt(),
            Quantity::Remainder => params.nu.cbrt(),
            Quantity::Dq => params.sqrt_a(),
            Quantity::DegenerateDq => 1.0,
        }
    }

    /// `W* W` as a ladder polynomial.
    fn gram_poly(self, params: &ModelParams) -> LadderPoly {
        let nu = cr(params.nu);
        match self {
            Quantity::Norm => LadderPoly::constant(cr(1.0)),
            Quantity::OqWeight => oscillator(true).scale(nu),
            Quantity::Remainder => LadderPoly::term(nu, &[Ladder::Aq, Ladder::AqDag]),
            Quantity::Dq | Quantity::DegenerateDq => momentum(true).mul(&momentum(true)).scale(nu),
        }
    }

    /// Closed-form value where one is known.
    pub fn analytic(self, t: f64, params: &ModelParams) -> Result<Option<f64>> {
        Ok(match (self, params.alpha) {
            (Quantity::Norm, Alpha::Zero) => Some(semigroup_norm(t, params.nu)?.norm),
            (Quantity::DegenerateDq, _) => Some(degenerate::exact_dq_decay(t, params.lambda1)),
            _ => None,
        })
    }

    /// Upper bound from the closed-form modules.
    pub fn bound(self, t: f64, params: &ModelParams) -> Result<Option<f64>> {
        let sqrt2 = std::f64::consts::SQRT_2;
        Ok(match self {
            Quantity::Norm => Some(1.0),
            Quantity::OqWeight => Some(decay_bound_prop31(t, params)?),
            Quantity::Remainder => Some(remainder_bound(t, params)?),
            Quantity::Dq => Some(match params.alpha {
                Alpha::Zero => {
                    sqrt2 * decay_bound_prop31(t, params)? * (-t * (params.sqrt_a() - params.nu.sqrt())).exp()
                }
                Alpha::HalfPi => sqrt2 * remainder_bound(t, params)? * (-t * (params.sqrt_a() - params.nu.cbrt())).exp(),
            }),
            Quantity::DegenerateDq => Some(degenerate::dq_decay_bound(t)?),
        })
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL.into_iter().find(|q| q.name() == s).ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecaySample {
    pub t: f64,
    pub analytic: Option<f64>,
    pub bound: Option<f64>,
    pub oracle: f64,
    pub oracle_coarse: f64,
    pub rel_discrepancy: f64,
    pub converged: bool,
}

impl DecaySample {
    /// `oracle <= bound (1 + tol)`; vacuous without a bound.
    pub fn within_bound(&self, tol: f64) -> bool {
        self.bound.is_none_or(|b| self.oracle <= b * (1.0 + tol))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayCurve {
    pub quantity: Quantity,
    pub params: ModelParams,
    pub dims: usize,
    pub coarse_dims: usize,
    pub samples: Vec<DecaySample>,
}

impl DecayCurve {
    pub fn require_converged(&self) -> Result<()> {
        match self.samples.iter().find(|s| !s.converged) {
            Some(s) => Err(Error::TruncationNotConverged {
                label: format!("{} at t = {}", self.quantity, s.t),
                rel: s.rel_discrepancy,
            }),
            None => Ok(()),
        }
    }

    pub fn converged_samples(&self) -> impl Iterator<Item = &DecaySample> {
        self.samples.iter().filter(|s| s.converged)
    }
}

fn block_basis(alpha: Alpha, level: usize) -> BlockBasis {
    match alpha {
        Alpha::Zero => BlockBasis::chains(level, level / 4),
        Alpha::HalfPi => BlockBasis::total_degree(level),
    }
}

/// Fiber sweep range and node count for the degenerate oracle.
const FIBER_XI_MAX: f64 = 40.0;
const FIBER_NODES: usize = 20;

fn oracle_value(quantity: Quantity, params: &ModelParams, t: f64, level: usize) -> Result<f64> {
    let shift = quantity.shift(params);
    if quantity == Quantity::DegenerateDq {
        return fiber::weighted_fiber_sup(t, params.lambda1, shift + 0.5, level, FIBER_XI_MAX, FIBER_NODES);
    }
    let k = Label::K.poly(params).expect("K is polynomial");
    let prop = BlockPropagator::new(block_basis(params.alpha, level), &k, t, shift)?;
    if quantity == Quantity::Norm {
        prop.norm()
    } else {
        prop.weighted_norm(&quantity.gram_poly(params))
    }
}

/// Oracle values at truncation levels `dims` and `3 dims / 4`, paired with the
/// closed-form values and bounds.
///
/// For the two-dimensional models `dims` is the chain length (`alpha = 0`) or
/// the total degree (`alpha = pi/2`); for the degenerate fibers it is the
/// one-dimensional Hermite dimension.
pub fn decay_curve(quantity: Quantity, params: &ModelParams, ts: &[f64], dims: usize) -> Result<DecayCurve> {
    if dims < 8 {
        return Err(Error::InvalidParameter(format!("decay curves need dims >= 8, got {dims}")));
    }
    if let Some(&t) = ts.iter().find(|&&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    if quantity == Quantity::Remainder && params.alpha != Alpha::HalfPi {
        return Err(Error::InvalidParameter("remainder quantity needs a confining model".into()));
    }
    let coarse_dims = 3 * dims / 4;
    let samples = ts
        .par_iter()
        .map(|&t| {
            let oracle = oracle_value(quantity, params, t, dims)?;
            let oracle_coarse = oracle_value(quantity, params, t, coarse_dims)?;
            let rel_discrepancy = (oracle - oracle_coarse).abs() / oracle.abs().max(f64::MIN_POSITIVE);
            Ok(DecaySample {
                t,
                analytic: quantity.analytic(t, params)?,
                bound: quantity.bound(t, params)?,
                oracle,
                oracle_coarse,
                rel_discrepancy,
                converged: rel_discrepancy <= CONVERGENCE_TOL,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecayCurve { quantity, params: *params, dims, coarse_dims, samples })
}

/// Ladder operators and their adjoint pairing, for diagnostics.
pub fn ladder_matrices(dims: usize) -> (CMat, CMat) {
    let params = ModelParams::new(1.0, Alpha::Zero);
    let a = build(Label::Aq, &params, dims, 2).map(|o| o.matrix).unwrap_or_else(|_| CMat::zeros(0, 0));
    let ad = build(Label::AqDag, &params, dims, 2).map(|o| o.matrix).unwrap_or_else(|_| CMat::zeros(0, 0));
    (a, ad)
}
