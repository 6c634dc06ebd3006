use rayon::prelude::*;

use crate::config::{field_err, AlphaArg, ConfigError, SweepConfig};
use crate::table::{Cell, Row, Table};
use kfpq_core::acceptance::tol::PENCIL_STABILITY;
use kfpq_core::bargmann::{quotient, remainder_bound, sup_unstructured};
use kfpq_core::degenerate::{decay_bound_degenerate, exact_decay_degenerate, sup_over_xi_numeric};
use kfpq_core::exactnorms::{optimality_witness, resolvent_bound, semigroup_norm, witness_rayleigh_numeric, WitnessGrid};
use kfpq_core::galerkin::{decay_curve, subelliptic_constant, DecayCurve, Quantity};
use kfpq_core::linalg::hermitian_eigvals2;
use kfpq_core::positivity::{delta0, delta0_branch_root, hermitian_difference_direct, report};
use kfpq_core::symbols::{Alpha, ModelParams};

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("numerical failure: {0}")]
    Numeric(kfpq_core::Error),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) | AppError::Param(_) | AppError::Io(_) => 2,
            AppError::Numeric(_) => 3,
        }
    }
}

impl From<kfpq_core::Error> for AppError {
    fn from(e: kfpq_core::Error) -> Self {
        match e {
            kfpq_core::Error::InvalidParameter(m) => AppError::Param(m),
            other => AppError::Numeric(other),
        }
    }
}

type Result<T> = std::result::Result<T, AppError>;

fn alpha_cell(a: Alpha) -> Cell {
    Cell::Text(match a {
        Alpha::Zero => "0".into(),
        Alpha::HalfPi => "pi2".into(),
    })
}

fn alphas(cfg: &SweepConfig) -> Vec<Alpha> {
    match cfg.alpha {
        Some(a) => vec![a.alpha()],
        None => Alpha::both().to_vec(),
    }
}

/// Evaluates `f` over `items` in parallel and keeps the input order.
fn par_rows<T: Sync, F>(items: &[T], f: F) -> Result<Vec<Row>>
where
    F: Fn(&T) -> Result<Vec<Row>> + Sync + Send,
{
    let chunks = items.par_iter().map(f).collect::<Result<Vec<_>>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

fn curve_rows(params: Vec<Cell>, curve: &DecayCurve) -> Vec<Row> {
    curve
        .samples
        .iter()
        .map(|s| Row {
            params: params.clone(),
            t: Some(s.t),
            analytic: s.analytic,
            bound: s.bound,
            oracle: Some(s.oracle),
            converged: s.converged,
            extras: vec![s.oracle_coarse.into()],
        })
        .collect()
}

pub fn norms(cfg: &SweepConfig) -> Result<Table> {
    let nus = cfg.nus_above(0.0)?;
    if let Some(dims) = cfg.dims_at_least(8)? {
        let ts = cfg.positive_ts()?;
        let mut table = Table::new("norms_galerkin", &["nu", "dims"], &["oracle_coarse"]);
        let rows = par_rows(nus, |&nu| {
            let curve = decay_curve(Quantity::Norm, &ModelParams::new(nu, Alpha::Zero), &ts, dims)?;
            Ok(curve_rows(vec![nu.into(), dims.into()], &curve))
        })?;
        rows.into_iter().for_each(|r| table.push(r));
        return Ok(table);
    }
    let ts = cfg.ts()?;
    if ts[0] < 0.0 {
        return Err(field_err("t", "grid must be nonnegative").into());
    }
    let mut table = Table::new("norms", &["nu"], &[]);
    let rows = par_rows(nus, |&nu| {
        ts.iter()
            .map(|&t| {
                let r = semigroup_norm(t, nu)?;
                Ok(Row { params: vec![nu.into()], t: Some(t), analytic: Some(r.norm), oracle: r.norm_mu, converged: r.norm_mu.is_some(), ..Default::default() })
            })
            .collect()
    })?;
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

pub fn delta0_table(cfg: &SweepConfig) -> Result<Table> {
    let nus = cfg.nus_above(0.0)?;
    let ts = cfg.positive_ts()?;
    let jobs: Vec<(f64, Alpha)> = nus.iter().flat_map(|&nu| alphas(cfg).into_iter().map(move |a| (nu, a))).collect();
    let mut table = Table::new("delta0", &["nu", "alpha"], &["asymptotic", "ratio"]);
    let rows = par_rows(&jobs, |&(nu, a)| {
        let p = ModelParams::new(nu, a);
        ts.iter()
            .map(|&t| {
                let d = delta0(t, &p)?;
                let root = delta0_branch_root(t, &p, 1.0)?;
                let asym = nu * t.powi(3) / 12.0;
                Ok(Row {
                    params: vec![nu.into(), alpha_cell(a)],
                    t: Some(t),
                    analytic: Some(d),
                    oracle: Some(root),
                    converged: true,
                    extras: vec![asym.into(), (d / asym).into()],
                    ..Default::default()
                })
            })
            .collect()
    })?;
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

const DELTA_FRACTIONS: [f64; 3] = [0.0, 0.5, 1.0];

pub fn positivity(cfg: &SweepConfig) -> Result<Table> {
    let nus = cfg.nus_above(0.0)?;
    let ts = cfg.positive_ts()?;
    let jobs: Vec<(f64, Alpha)> = nus.iter().flat_map(|&nu| alphas(cfg).into_iter().map(move |a| (nu, a))).collect();
    let mut table = Table::new("positivity", &["nu", "alpha", "sign", "delta_fraction"], &["delta", "positive"]);
    let rows = par_rows(&jobs, |&(nu, a)| {
        let p = ModelParams::new(nu, a);
        let mut rows = Vec::new();
        for sign in [1.0, -1.0] {
            for frac in DELTA_FRACTIONS {
                for &t in &ts {
                    let d = frac * delta0(t, &p)?;
                    let r = report(t, d, &p, sign);
                    let direct = hermitian_eigvals2(&hermitian_difference_direct(t, d, &p, sign))[0];
                    rows.push(Row {
                        params: vec![nu.into(), alpha_cell(a), sign.into(), frac.into()],
                        t: Some(t),
                        analytic: Some(r.min_eigenvalue),
                        oracle: Some(direct),
                        converged: true,
                        extras: vec![d.into(), r.is_positive.into()],
                        ..Default::default()
                    });
                }
            }
        }
        Ok(rows)
    })?;
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

pub fn bargmann(cfg: &SweepConfig) -> Result<Table> {
    if cfg.alpha == Some(AlphaArg::Zero) {
        return Err(field_err("alpha", "bargmann needs alpha = pi2").into());
    }
    let nus = cfg.nus_above(0.25)?;
    let ts = cfg.positive_ts()?;
    let seed = cfg.seed;
    let jobs: Vec<(usize, f64, f64)> =
        nus.iter().flat_map(|&nu| ts.iter().map(move |&t| (nu, t))).enumerate().map(|(k, (nu, t))| (k, nu, t)).collect();
    let mut table = Table::new("bargmann", &["nu"], &["lambda_minus"]);
    let rows = par_rows(&jobs, |&(k, nu, t)| {
        let p = ModelParams::new(nu, Alpha::HalfPi);
        let w = quotient(t, &p)?;
        let free = sup_unstructured(t, &p, seed.wrapping_add(k as u64), 4)?;
        Ok(vec![Row {
            params: vec![nu.into()],
            t: Some(t),
            analytic: Some(w.sup_value),
            bound: Some(remainder_bound(t, &p)?),
            oracle: Some(free),
            converged: true,
            extras: vec![w.lambda_minus.into()],
        }])
    })?;
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

pub fn resolvent(cfg: &SweepConfig) -> Result<Table> {
    let nus = cfg.nus_above(1.0)?;
    let mut table = Table::new("resolvent", &["nu"], &["c_ratio", "error_estimate"]);
    let rows = par_rows(nus, |&nu| {
        let r = resolvent_bound(nu)?;
        Ok(vec![Row {
            params: vec![nu.into()],
            analytic: Some(r.integral),
            bound: Some(r.log_bound),
            converged: true,
            extras: vec![r.c_ratio.into(), r.error_estimate.into()],
            ..Default::default()
        }])
    })?;
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

pub fn optimality(cfg: &SweepConfig) -> Result<Table> {
    let nus = cfg.nus_above(1.0)?;
    let mut table = Table::new("optimality", &["nu"], &["scaled_bound"]);
    let rows = par_rows(nus, |&nu| {
        let w = optimality_witness(nu)?;
        let n = witness_rayleigh_numeric(nu, &WitnessGrid::for_nu(nu))?;
        Ok(vec![Row {
            params: vec![nu.into()],
            analytic: Some(w.rayleigh_bound),
            oracle: Some(n.rayleigh),
            converged: true,
            extras: vec![(w.rayleigh_bound * nu.ln() / nu).into()],
            ..Default::default()
        }])
    })?;
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

pub fn degenerate(cfg: &SweepConfig) -> Result<Table> {
    let l1s = cfg.lambda1s()?;
    let ts = cfg.positive_ts()?;
    if let Some(dims) = cfg.dims_at_least(8)? {
        let mut table = Table::new("degenerate_dq_galerkin", &["lambda1", "dims"], &["oracle_coarse"]);
        let rows = par_rows(l1s, |&l1| {
            let mut p = ModelParams::new(1.0, Alpha::Zero);
            p.lambda1 = l1;
            let curve = decay_curve(Quantity::DegenerateDq, &p, &ts, dims)?;
            Ok(curve_rows(vec![l1.into(), dims.into()], &curve))
        })?;
        rows.into_iter().for_each(|r| table.push(r));
        return Ok(table);
    }
    let mut table = Table::new("degenerate", &["lambda1"], &[]);
    let rows = par_rows(l1s, |&l1| {
        ts.iter()
            .map(|&t| {
                Ok(Row {
                    params: vec![l1.into()],
                    t: Some(t),
                    analytic: Some(exact_decay_degenerate(t, l1)),
                    bound: Some(decay_bound_degenerate(t, l1)?),
                    oracle: Some((-t).exp() * sup_over_xi_numeric(t, l1)),
                    converged: true,
                    extras: vec![],
                })
            })
            .collect()
    })?;
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

pub fn subelliptic(cfg: &SweepConfig) -> Result<Table> {
    let nus = cfg.nus()?;
    if nus.contains(&0.0) {
        return Err(field_err("nu", "curvature must be nonzero").into());
    }
    let dims = cfg.dims_at_least(8)?.unwrap_or(16);
    let coarse = (3 * dims / 4).max(8);
    let mut table = Table::new("subelliptic", &["nu", "dims"], &["c_coarse", "a"]);
    let rows = par_rows(nus, |&nu| {
        let r = subelliptic_constant(nu, dims)?;
        let rc = subelliptic_constant(nu, coarse)?;
        let converged = (r.c - rc.c).abs() <= PENCIL_STABILITY * rc.c;
        Ok(vec![Row {
            params: vec![nu.into(), dims.into()],
            oracle: Some(r.c),
            converged,
            extras: vec![rc.c.into(), r.a.into()],
            ..Default::default()
        }])
    })?;
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(AppError::from(kfpq_core::Error::InvalidParameter("x".into())).exit_code(), 2);
        assert_eq!(AppError::from(kfpq_core::Error::IndefinitePencil).exit_code(), 3);
        let e = kfpq_core::Error::TruncationNotConverged { label: "K".into(), rel: 0.5 };
        assert_eq!(AppError::from(e).exit_code(), 3);
        assert_eq!(AppError::from(field_err("t", "empty grid")).exit_code(), 2);
    }
}
