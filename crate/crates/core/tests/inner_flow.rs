mod common;

use common::*;
use stabrad::inner::{solve_inner, InnerOptions, Integrator, StopReason};
use stabrad::io::grcar;
use stabrad::structures::Pattern;
use stabrad::StructureSpace;

#[test]
fn fifty_random_instances() {
    let mut converged = 0;
    for idx in 0..50 {
        let c = inner_check(idx).unwrap();
        assert!(c.max_norm_drift <= 1e-12, "{} n = {}: norm drift {:e}", c.kind, c.n, c.max_norm_drift);
        assert!(
            c.max_decrease <= c.allowed_decrease,
            "{} n = {}: Re lambda decreased by {:e}",
            c.kind,
            c.n,
            c.max_decrease
        );
        converged += c.converged as usize;
        // Checked on every final state, converged or stopped at the roundoff floor.
        {
            assert!(c.gradient_gap <= 1e-6, "{} n = {}: ||Gtilde - eps G|| = {:e}", c.kind, c.n, c.gradient_gap);
            assert!(c.alignment >= 1.0 - 1e-6, "{} n = {}: alignment {}", c.kind, c.n, c.alignment);
        }
    }
    assert!(converged >= 45, "only {converged} of 50 inner solves converged");
}

#[test]
fn warm_start_reaches_the_same_value() {
    let a = grcar(10, 1.0).unwrap();
    let s = StructureSpace::sparsity_real(Pattern::of_nonzeros(&a).unwrap());
    let opts = InnerOptions::default();
    let cold = solve_inner(&a, &s, 0.5, 0.8, None, &opts).unwrap();
    let warm = solve_inner(&a, &s, 0.5, 0.8, Some(&cold.state), &opts).unwrap();
    assert!((cold.re_lambda - warm.re_lambda).abs() < 1e-10);
    assert!(warm.steps < cold.steps);
}

#[test]
fn restarts_and_both_signs_do_not_lose_the_maximum() {
    let a = grcar(10, 1.0).unwrap();
    let s = StructureSpace::sparsity_real(Pattern::of_nonzeros(&a).unwrap());
    let base = solve_inner(&a, &s, 0.5, 0.8, None, &InnerOptions::default()).unwrap();
    let opts = InnerOptions { restarts: 3, try_both_signs: true, seed: 9, ..InnerOptions::default() };
    let wide = solve_inner(&a, &s, 0.5, 0.8, None, &opts).unwrap();
    assert!(wide.re_lambda >= base.re_lambda - 1e-12);
    assert!(wide.total_steps > wide.steps);
    let again = solve_inner(&a, &s, 0.5, 0.8, None, &opts).unwrap();
    assert_eq!(wide.re_lambda, again.re_lambda);
}

#[test]
fn full_euler_agrees_with_splitting() {
    let a = grcar(10, 1.0).unwrap();
    let s = StructureSpace::sparsity_real(Pattern::of_nonzeros(&a).unwrap());
    let split = solve_inner(&a, &s, 0.5, 0.6, None, &InnerOptions::default()).unwrap();
    let opts = InnerOptions { integrator: Integrator::FullEuler, ..InnerOptions::default() };
    let full = solve_inner(&a, &s, 0.5, 0.6, None, &opts).unwrap();
    assert!((split.re_lambda - full.re_lambda).abs() < 1e-6, "{} vs {}", split.re_lambda, full.re_lambda);
}

#[test]
fn unstructured_value_matches_pseudospectral_abscissa_scan() {
    // With delta = 0 the inner value is the eps-pseudospectral abscissa of A.
    let a = grcar(10, 1.0).unwrap();
    let s = StructureSpace::full_complex(10);
    let r = solve_inner(&a, &s, 0.3, 0.0, None, &InnerOptions::default()).unwrap();
    assert!(matches!(r.stop, StopReason::Stationary | StopReason::Stagnated));
    let z = r.state.triple.lambda;
    let sigma = stabrad::pseudospectra::resolvent_sigma(&a, z).unwrap();
    assert!((sigma - 0.3).abs() < 1e-8, "sigma_min at the extremal point is {sigma}");
    // Nothing to the right of the extremal point lies in the pseudospectrum.
    for k in 0..=64 {
        let w = stabrad::C64::new(z.re + 1e-3, z.im + (k as f64 - 32.0) * 0.05);
        assert!(stabrad::pseudospectra::resolvent_sigma(&a, w).unwrap() > 0.3);
    }
}
