mod common;

use common::*;
use stabrad::inner::{solve_inner, InnerOptions};
use stabrad::io::grcar;
use stabrad::outer::phi_derivative;
use stabrad::structures::Pattern;
use stabrad::StructureSpace;

#[test]
fn closed_form_derivatives_match_finite_differences() {
    for idx in 0..10 {
        let c = derivative_check(idx).unwrap();
        assert!(c.phi_rel <= 1e-3, "{} n = {}: phi' relative error {:e}", c.kind, c.n, c.phi_rel);
        assert!(c.psi_rel <= 1e-3, "{} n = {}: psi' relative error {:e}", c.kind, c.n, c.psi_rel);
    }
}

#[test]
fn phi_decreases_with_delta_on_grcar() {
    let a = grcar(10, 1.0).unwrap();
    let s = StructureSpace::sparsity_real(Pattern::of_nonzeros(&a).unwrap());
    let opts = InnerOptions::default();
    let mut prev = f64::NEG_INFINITY;
    let mut init = None;
    for k in 0..6 {
        let d = 0.15 * k as f64;
        let r = solve_inner(&a, &s, 0.5, d, init.as_ref(), &opts).unwrap();
        assert!(r.re_lambda > prev);
        prev = r.re_lambda;
        if d > 0.0 {
            assert!(phi_derivative(&r.state.triple, &s).unwrap() < 0.0);
        }
        init = Some(r.state);
    }
}
