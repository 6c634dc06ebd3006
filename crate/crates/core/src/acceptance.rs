//! The acceptance suite: one runner per criterion, each comparing measured
//! quantities against pinned tolerances.
//!
//! Reports are deterministic for a fixed seed; elapsed times are kept apart
//! from the report text so the text can be compared byte for byte.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bargmann::{gram_eigenvalues, quotient, regime_fit, sup_unstructured};
use crate::biquat::Biquaternion;
use crate::degenerate::{self, decay_bound_degenerate, f_function, f_limit_richardson, sup_b_closed, sup_b_numeric};
use crate::error::Result;
use crate::exactnorms::{
    op_norm_sq_quadrature, optimality_witness, overlap_quadrature, resolvent_bound, semigroup_norm,
    witness_rayleigh_numeric, WitnessGrid,
};
use crate::galerkin::{decay_curve, subelliptic_constant, DecayCurve, Quantity};
use crate::linalg::{c, cr, expm4, max_abs, series_exp2, Mat2, Mat4, IU, ONE};
use crate::positivity::{coefficients, delta0, report};
use crate::symbols::{hamilton_basis, kappa, kappa0, Alpha, ModelParams};

/// Pinned tolerances and thresholds.
pub mod tol {
    pub const BIQUAT_EXP_ABS: f64 = 1e-10;
    pub const BIQUAT_NORM_REL: f64 = 1e-12;
    pub const BIQUAT_SAMPLES: usize = 200;
    pub const HAMILTON: f64 = 1e-13;
    pub const FLOW_REL: f64 = 1e-9;
    pub const DELTA0_DET: f64 = 1e-8;
    pub const DELTA0_RATIO: (f64, f64) = (0.98, 1.02);
    pub const NORM_ROUTES: f64 = 1e-10;
    pub const NORM_GALERKIN_REL: f64 = 0.05;
    pub const NORM_DIMS: usize = 64;
    pub const RESOLVENT_RATIO: (f64, f64) = (0.3, 2.5);
    pub const WITNESS_IDENTITY: f64 = 1e-8;
    pub const WITNESS_CONSTANT: f64 = 20.0;
    pub const WITNESS_GRID: f64 = 0.2;
    pub const LAMBDA_MINUS: f64 = 1e-11;
    pub const SUP_REL: f64 = 1e-6;
    pub const REGIME_SMALL: f64 = 6.5;
    pub const REGIME_LARGE: f64 = 2.5;
    pub const F_LIMIT: f64 = 1e-6;
    pub const MAXIMIZER: f64 = 1e-8;
    pub const DEGENERATE_T3: f64 = 270.0;
    pub const DECAY_DIMS: usize = 64;
    pub const FIBER_DIMS: usize = 128;
    pub const PENCIL_STABILITY: f64 = 0.3;
    pub const PENCIL_SCALING: f64 = 2.0;
}

pub const RUNTIME_LIMITS: [Duration; 10] = [
    Duration::from_secs(1),
    Duration::from_secs(1),
    Duration::from_secs(5),
    Duration::from_secs(10),
    Duration::from_secs(180),
    Duration::from_secs(10),
    Duration::from_secs(120),
    Duration::from_secs(30),
    Duration::from_secs(10),
    Duration::from_secs(600),
];

pub const TITLES: [&str; 10] = [
    "biquaternion algebra",
    "Hamilton algebra",
    "flow closed forms",
    "delta0 threshold",
    "exact semigroup norm",
    "resolvent log bound",
    "optimality witness",
    "Bargmann quotient",
    "degenerate case",
    "decay curves and subelliptic pencil",
];

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub runtime_limit: Duration,
}

impl CriterionReport {
    /// One deterministic line: verdict, id, title and measured values.
    pub fn line(&self) -> String {
        format!("{} {:>2} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.title, self.detail)
    }

    pub fn within_runtime(&self) -> bool {
        self.elapsed <= self.runtime_limit
    }
}

/// Measured values and verdict of one criterion before timing.
struct Outcome {
    passed: bool,
    detail: String,
}

struct Checks {
    passed: bool,
    parts: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Self { passed: true, parts: Vec::new() }
    }

    fn le(&mut self, name: &str, value: f64, limit: f64) {
        let ok = value <= limit;
        self.passed &= ok;
        self.parts.push(format!("{name}={value:.3e}{}{limit:.1e}", if ok { "<=" } else { ">" }));
    }

    fn ge(&mut self, name: &str, value: f64, limit: f64) {
        let ok = value >= limit;
        self.passed &= ok;
        self.parts.push(format!("{name}={value:.4}{}{limit:.4}", if ok { ">=" } else { "<" }));
    }

    fn range(&mut self, name: &str, lo_val: f64, hi_val: f64, lo: f64, hi: f64) {
        let ok = lo_val >= lo && hi_val <= hi;
        self.passed &= ok;
        self.parts.push(format!("{name} in [{lo_val:.4},{hi_val:.4}] {} [{lo},{hi}]", if ok { "within" } else { "outside" }));
    }

    fn flag(&mut self, name: &str, ok: bool) {
        self.passed &= ok;
        self.parts.push(format!("{name}={}", if ok { "yes" } else { "no" }));
    }

    fn note(&mut self, text: String) {
        self.parts.push(text);
    }

    fn finish(self) -> Outcome {
        Outcome { passed: self.passed, detail: self.parts.join("; ") }
    }
}

fn failed(e: crate::error::Error) -> Outcome {
    Outcome { passed: false, detail: format!("error: {e}") }
}

fn c1(seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let (mut exp_err, mut norm_err) = (0.0f64, 0.0f64);
    for _ in 0..tol::BIQUAT_SAMPLES {
        let w = Biquaternion::new(draw(), draw(), draw(), draw());
        let m = w.to_matrix();
        exp_err = exp_err.max(max_abs(&(w.exp().to_matrix() - series_exp2(&m))));
        let scale = [w.a, w.b, w.c, w.d].iter().map(|z| z.norm_sqr()).sum::<f64>().max(w.norm().norm());
        norm_err = norm_err.max((w.norm() - m.determinant()).norm() / scale);
    }
    let mut ch = Checks::new();
    ch.le("max|exp-series|", exp_err, tol::BIQUAT_EXP_ABS);
    ch.le("max rel|N-det|", norm_err, tol::BIQUAT_NORM_REL);
    Ok(ch.finish())
}

fn c2() -> Result<Outcome> {
    let id4 = Mat4::identity();
    let mut worst = 0.0f64;
    for al in Alpha::both() {
        let b = hamilton_basis(al);
        for m in [b.e, b.i, b.j, b.k] {
            worst = worst.max(max_abs(&(m * m + id4)));
            worst = worst.max(max_abs(&(b.e * m - m * b.e)));
        }
        worst = worst.max(max_abs(&(b.i * b.j - b.k)));
        let e2 = cr(al.phase2());
        worst = worst.max(max_abs(&(b.e.conjugate() - b.e)));
        worst = worst.max(max_abs(&(b.i.conjugate() - b.i)));
        worst = worst.max(max_abs(&(b.j.conjugate() + b.j * e2)));
        worst = worst.max(max_abs(&(b.k.conjugate() + b.k * e2)));
        let mut sig = Mat4::zeros();
        sig[(0, 2)] = -ONE;
        sig[(1, 3)] = -ONE;
        sig[(2, 0)] = ONE;
        sig[(3, 1)] = ONE;
        worst = worst.max(max_abs(&(b.sigma - sig)));
        for sign in [1.0, -1.0] {
            let t = b.t(sign);
            worst = worst.max(max_abs(&(t.adjoint() * t - Mat2::identity())));
            worst = worst.max(max_abs(&(b.compress(&(b.e * IU), sign) - Mat2::identity() * cr(sign))));
        }
    }
    let mut ch = Checks::new();
    ch.le("max residual", worst, tol::HAMILTON);
    Ok(ch.finish())
}

fn c3() -> Result<Outcome> {
    let (mut kmax, mut k0max) = (0.0f64, 0.0f64);
    for al in Alpha::both() {
        let b = hamilton_basis(al);
        for nu in [0.1, 1.0, 10.0] {
            let p = ModelParams::new(nu, al);
            for step in 1..=30 {
                let t = 0.1 * step as f64;
                let closed = kappa(t, &p, &b).matrix;
                let oracle = expm4(&(b.h_k(p.z()) * c(0.0, -t)));
                kmax = kmax.max(max_abs(&(closed - oracle)) / max_abs(&oracle));
            }
        }
        for step in 0..=20 {
            let d = 0.05 * step as f64;
            let closed = kappa0(d, &b).matrix;
            let oracle = expm4(&(b.h_oq() * c(0.0, d)));
            k0max = k0max.max(max_abs(&(closed - oracle)) / max_abs(&oracle));
        }
    }
    let mut ch = Checks::new();
    ch.le("kappa rel", kmax, tol::FLOW_REL);
    ch.le("kappa0 rel", k0max, tol::FLOW_REL);
    Ok(ch.finish())
}

const DELTA0_NUS: [f64; 4] = [0.5, 1.0, 4.0, 25.0];
const DELTA0_TS: [f64; 6] = [0.05, 0.2, 0.5, 1.0, 2.0, 3.0];

fn c4() -> Result<Outcome> {
    let mut det_worst = 0.0f64;
    let (mut rmin, mut rmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut positive = true;
    for al in Alpha::both() {
        for nu in DELTA0_NUS {
            let p = ModelParams::new(nu, al);
            for t in DELTA0_TS {
                let d0 = delta0(t, &p)?;
                for sign in [1.0, -1.0] {
                    let r = report(t, d0, &p, sign);
                    let size: f64 = coefficients(t, d0, &p, sign).iter().map(|x| x.norm_sqr()).sum();
                    let scaled = r.matrix.determinant() * (2.0 * sign * t).exp();
                    det_worst = det_worst.max(scaled.norm() / (1.0 + size));
                    for d in [0.0, d0 / 2.0] {
                        positive &= report(t, d, &p, sign).min_eigenvalue > 0.0;
                    }
                }
            }
            let t = 1e-2 / (1.0 + nu.sqrt());
            let ratio = delta0(t, &p)? / (nu * t.powi(3) / 12.0);
            rmin = rmin.min(ratio);
            rmax = rmax.max(ratio);
        }
    }
    let mut ch = Checks::new();
    ch.le("|det(delta0)|/(1+scale)", det_worst, tol::DELTA0_DET);
    ch.range("delta0/(nu t^3/12)", rmin, rmax, tol::DELTA0_RATIO.0, tol::DELTA0_RATIO.1);
    ch.flag("positive at 0 and delta0/2", positive);
    Ok(ch.finish())
}

fn c5() -> Result<Outcome> {
    let mut routes = 0.0f64;
    for nu in [0.5, 1.0, 10.0, 1e3] {
        for k in 0..=50 {
            let r = semigroup_norm(0.1 * k as f64, nu)?;
            if let Some(mu) = r.norm_mu {
                routes = routes.max((mu - r.norm).abs());
            }
        }
    }
    let curve = decay_curve(Quantity::Norm, &ModelParams::new(1.0, Alpha::Zero), &[0.5, 1.0, 2.0], tol::NORM_DIMS)?;
    let mut rel = 0.0f64;
    for s in &curve.samples {
        let a = s.analytic.unwrap_or(f64::NAN);
        rel = rel.max((s.oracle - a).abs() / a);
    }
    let mut ch = Checks::new();
    ch.le("|argsh-mu|", routes, tol::NORM_ROUTES);
    ch.le("galerkin rel", rel, tol::NORM_GALERKIN_REL);
    ch.flag("converged", curve.require_converged().is_ok());
    Ok(ch.finish())
}

fn c6() -> Result<Outcome> {
    let mut ch = Checks::new();
    let mut worst = f64::NEG_INFINITY;
    for nu in [1e2, 1e4, 1e6] {
        let r = resolvent_bound(nu)?;
        worst = worst.max(r.integral / r.log_bound);
    }
    ch.le("max integral/log bound", worst, 1.0);
    let nus: Vec<f64> = (0..=12).map(|k| 10f64.powf(2.0 + 0.5 * k as f64)).collect();
    let sweep = nus.par_iter().map(|&nu| resolvent_bound(nu)).collect::<Result<Vec<_>>>()?;
    let lo = sweep.iter().map(|r| r.c_ratio).fold(f64::INFINITY, f64::min);
    let hi = sweep.iter().map(|r| r.c_ratio).fold(f64::NEG_INFINITY, f64::max);
    ch.range("c_ratio", lo, hi, tol::RESOLVENT_RATIO.0, tol::RESOLVENT_RATIO.1);
    Ok(ch.finish())
}

fn c7() -> Result<Outcome> {
    let mut ident = 0.0f64;
    for l in [1.0, 2.0, 3.0] {
        ident = ident.max((overlap_quadrature(l, 60) - 1.0 / f64::cosh(l)).abs());
    }
    for s in [0.2f64, 1.0, 2.0] {
        let want = (4.0 * s).cosh() / 4.0;
        ident = ident.max((op_norm_sq_quadrature(s, 12) - want).abs() / want);
    }
    let mut consts = Vec::new();
    for k in [9.0f64, 12.0, 16.0] {
        let w = optimality_witness(k.exp())?;
        consts.push(w.rayleigh_bound * k / w.nu);
    }
    let cmax = consts.iter().copied().fold(0.0, f64::max);
    let nu = 9f64.exp();
    let w = optimality_witness(nu)?;
    let n = witness_rayleigh_numeric(nu, &WitnessGrid::for_nu(nu))?;
    let mut ch = Checks::new();
    ch.le("identities", ident, tol::WITNESS_IDENTITY);
    ch.le("max rayleigh_bound*log(nu)/nu", cmax, tol::WITNESS_CONSTANT);
    ch.le("grid/closed-form rayleigh at e^9", n.rayleigh / w.rayleigh_bound, 1.0 + tol::WITNESS_GRID);
    Ok(ch.finish())
}

fn c8(seed: u64) -> Result<Outcome> {
    let mut agree = 0.0f64;
    let mut min_lambda = f64::INFINITY;
    for nu in [0.3, 1.0, 10.0, 1e2, 1e3, 1e4] {
        let p = ModelParams::new(nu, Alpha::HalfPi);
        for k in 1..=40 {
            let g = gram_eigenvalues(10.0 * k as f64 / 40.0, &p)?;
            agree = agree.max((g.lambda_minus - g.lambda_minus_argsh).abs() / g.lambda_minus_argsh);
            min_lambda = min_lambda.min(g.lambda_minus_argsh);
        }
    }
    let cases: Vec<(f64, f64)> = [1.0, 10.0].iter().flat_map(|&nu| [0.3, 1.0, 3.0].map(|t| (nu, t))).collect();
    let sups = cases
        .par_iter()
        .enumerate()
        .map(|(i, &(nu, t))| {
            let p = ModelParams::new(nu, Alpha::HalfPi);
            let w = quotient(t, &p)?;
            let free = sup_unstructured(t, &p, seed.wrapping_add(i as u64), 4)?;
            Ok((free - w.sup_value).abs() / w.sup_value)
        })
        .collect::<Result<Vec<_>>>()?;
    let sup_rel = sups.into_iter().fold(0.0, f64::max);
    let fit = regime_fit(&[1.0, 1e2, 1e4], 300, 12.0)?;
    let mut ch = Checks::new();
    ch.le("lambda_minus forms rel", agree, tol::LAMBDA_MINUS);
    ch.ge("min lambda_minus", min_lambda, 1.0 + f64::EPSILON);
    ch.le("sup vs optimizer rel", sup_rel, tol::SUP_REL);
    ch.le("c_small", fit.c_small, tol::REGIME_SMALL);
    ch.le("c_large", fit.c_large, tol::REGIME_LARGE);
    Ok(ch.finish())
}

fn c9() -> Result<Outcome> {
    let f0 = f_limit_richardson()?;
    let (mut loc, mut val) = (0.0f64, 0.0f64);
    let mut below_f = true;
    for t in [0.1, 0.5, 1.0] {
        let (xc, vc) = sup_b_closed(t);
        let (xn, vn) = sup_b_numeric(t);
        loc = loc.max((xc - xn).abs() / xc);
        val = val.max((vc - vn).abs() / vc);
        below_f &= t.powi(3) * vn <= f_function(t)? * (1.0 + 1e-14);
    }
    let mut worst = 0.0f64;
    let mut exact_below = true;
    for k in 1..=500 {
        let t = 0.01 * k as f64;
        for l1 in [0.0, 1.0, 10.0] {
            let b = decay_bound_degenerate(t, l1)?;
            worst = worst.max(b * t.powi(3));
            exact_below &= degenerate::exact_decay_degenerate(t, l1) <= b * (1.0 + 1e-12);
        }
    }
    let mut ch = Checks::new();
    ch.le("|F(0+)-24|", (f0 - 24.0).abs(), tol::F_LIMIT);
    ch.le("maximizer rel", loc, tol::MAXIMIZER);
    ch.le("maximum rel", val, tol::MAXIMIZER);
    ch.flag("t^3 sup <= F", below_f);
    ch.le("sup bound*t^3 on (0,5]", worst, tol::DEGENERATE_T3);
    ch.flag("exact <= bound", exact_below);
    Ok(ch.finish())
}

pub const DECAY_TS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

/// The curves behind the decay half of criterion 10.
pub fn decay_probe_curves() -> Result<Vec<(String, DecayCurve)>> {
    let mut jobs: Vec<(String, Quantity, ModelParams, usize)> = Vec::new();
    for nu in [-1.0, 1.0, 4.0] {
        jobs.push((format!("nu={nu}"), Quantity::Dq, ModelParams::from_curvature(nu)?, tol::DECAY_DIMS));
    }
    for l1 in [0.0, 1.0] {
        let mut p = ModelParams::new(1.0, Alpha::Zero);
        p.lambda1 = l1;
        jobs.push((format!("lambda1={l1}"), Quantity::DegenerateDq, p, tol::FIBER_DIMS));
    }
    jobs.into_par_iter()
        .map(|(name, q, p, dims)| decay_curve(q, &p, &DECAY_TS, dims).map(|c| (name, c)))
        .collect()
}

fn c10() -> Result<Outcome> {
    let mut ch = Checks::new();
    for (name, curve) in decay_probe_curves()? {
        let conv: Vec<_> = curve.converged_samples().collect();
        let worst = conv
            .iter()
            .map(|s| s.oracle / s.bound.unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        ch.le(&format!("{name} max oracle/bound ({}/{} converged)", conv.len(), curve.samples.len()), worst, 1.0);
        ch.flag(&format!("{name} has converged samples"), !conv.is_empty());
    }
    let pencils = [(1.0, 16), (1.0, 24), (-1.0, 16), (-1.0, 24), (100.0, 16)]
        .par_iter()
        .map(|&(nu, d)| subelliptic_constant(nu, d).map(|r| r.c))
        .collect::<Result<Vec<_>>>()?;
    for (k, nu) in [1.0, -1.0].iter().enumerate() {
        let (c16, c24) = (pencils[2 * k], pencils[2 * k + 1]);
        ch.ge(&format!("c(nu={nu},16)"), c16, f64::MIN_POSITIVE);
        ch.le(&format!("|c16-c24|/c16 (nu={nu})"), (c16 - c24).abs() / c16, tol::PENCIL_STABILITY);
    }
    ch.le("c(nu=1)/c(nu=100) at 16", pencils[0] / pencils[4], tol::PENCIL_SCALING);
    ch.note(format!("c values {}", pencils.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(",")));
    Ok(ch.finish())
}

/// Runs criterion `id` (1 to 10).
pub fn run_criterion(id: usize, seed: u64) -> CriterionReport {
    assert!((1..=10).contains(&id), "criterion id out of range: {id}");
    let start = Instant::now();
    let outcome = match id {
        1 => c1(seed),
        2 => c2(),
        3 => c3(),
        4 => c4(),
        5 => c5(),
        6 => c6(),
        7 => c7(),
        8 => c8(seed),
        9 => c9(),
        _ => c10(),
    }
    .unwrap_or_else(failed);
    let elapsed = start.elapsed();
    let runtime_limit = RUNTIME_LIMITS[id - 1];
    let mut detail = outcome.detail;
    let within = elapsed <= runtime_limit;
    if !within {
        let _ = write!(detail, "; runtime limit {runtime_limit:?} exceeded");
    }
    CriterionReport { id, title: TITLES[id - 1], passed: outcome.passed && within, detail, elapsed, runtime_limit }
}

/// Criteria 1 to 10, in order.
pub fn run_all(seed: u64) -> Vec<CriterionReport> {
    (1..=10).map(|id| run_criterion(id, seed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_criteria_pass_and_repeat() {
        for id in [1, 2, 3, 9] {
            let a = run_criterion(id, 5);
            let b = run_criterion(id, 5);
            assert!(a.passed, "{}", a.line());
            assert_eq!(a.line(), b.line());
        }
    }

    #[test]
    fn line_format() {
        let r = CriterionReport {
            id: 3,
            title: TITLES[2],
            passed: false,
            detail: "x=1".into(),
            elapsed: Duration::ZERO,
            runtime_limit: RUNTIME_LIMITS[2],
        };
        assert_eq!(r.line(), "FAIL  3 flow closed forms: x=1");
    }
}
