use kfpq_core::acceptance::{run_criterion, tol};
use kfpq_core::degenerate::exact_dq_decay;
use kfpq_core::exactnorms::semigroup_norm;
use kfpq_core::galerkin::{decay_curve, Quantity};
use kfpq_core::symbols::{Alpha, ModelParams};

#[test]
fn galerkin_norm_tracks_closed_form_at_two_curvatures() {
    for nu in [0.5, 4.0] {
        let curve = decay_curve(Quantity::Norm, &ModelParams::new(nu, Alpha::Zero), &[0.5, 1.5], 48).unwrap();
        for s in curve.converged_samples() {
            let exact = semigroup_norm(s.t, nu).unwrap().norm;
            assert!((s.oracle - exact).abs() <= tol::NORM_GALERKIN_REL * exact, "nu={nu} t={}: {} vs {exact}", s.t, s.oracle);
        }
        assert!(curve.converged_samples().count() > 0);
    }
}

#[test]
fn degenerate_dq_oracle_matches_closed_form() {
    let mut p = ModelParams::new(1.0, Alpha::Zero);
    p.lambda1 = 0.5;
    let curve = decay_curve(Quantity::DegenerateDq, &p, &[1.0, 3.0], 64).unwrap();
    for s in &curve.samples {
        assert!(s.converged);
        let exact = exact_dq_decay(s.t, 0.5);
        assert!((s.oracle - exact).abs() <= 1e-4 * exact, "t={}: {} vs {exact}", s.t, s.oracle);
    }
}

#[test]
fn cheap_criteria_are_seed_stable() {
    for seed in [0, 1, 99] {
        let r = run_criterion(1, seed);
        assert!(r.passed, "{}", r.line());
    }
}
