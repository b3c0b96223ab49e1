#![allow(dead_code)]

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use stabrad::structures::Pattern;
use stabrad::{ComplexMatrix, StructureSpace, C64};

pub const KINDS: [&str; 5] = ["full-complex", "full-real", "sparsity-complex", "sparsity-real", "toeplitz-real"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss(g: &mut ChaCha8Rng) -> f64 {
    g.sample(StandardNormal)
}

pub fn to_na(m: &ComplexMatrix) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

pub fn from_na(m: &DMatrix<Complex<f64>>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Eigenvalues from nalgebra's complex Schur form.
pub fn oracle_eigenvalues(m: &ComplexMatrix) -> Vec<C64> {
    let s = nalgebra::Schur::new(to_na(m));
    s.eigenvalues().expect("triangular Schur form").iter().copied().collect()
}

pub fn oracle_abscissa(m: &ComplexMatrix) -> f64 {
    oracle_eigenvalues(m).iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

pub fn random_matrix(g: &mut ChaCha8Rng, n: usize, complex: bool) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| C64::new(gauss(g), if complex { gauss(g) } else { 0.0 }))
}

/// Random pattern containing the diagonal plus each off-diagonal entry with probability `p`.
pub fn random_pattern(g: &mut ChaCha8Rng, n: usize, p: f64) -> Pattern {
    let mut e = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j || g.random::<f64>() < p {
                e.push((i, j));
            }
        }
    }
    Pattern::new(n, e).unwrap()
}

/// Hurwitz matrix `B - (alpha(B) + margin) I` with `B` supported on `pattern`.
pub fn stable_on(g: &mut ChaCha8Rng, pattern: &Pattern, complex: bool, margin: f64) -> ComplexMatrix {
    let n = pattern.dim();
    let b = ComplexMatrix::from_fn(n, n, |i, j| {
        if pattern.contains(i, j) {
            C64::new(gauss(g), if complex { gauss(g) } else { 0.0 }) / (n as f64).sqrt()
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let alpha = oracle_abscissa(&b);
    b.shifted(C64::new(alpha + margin, 0.0))
}

/// Random instance for a structure kind: `(A, S)` with `A` Hurwitz and, for
/// sparsity kinds, supported on the pattern.
pub fn instance(g: &mut ChaCha8Rng, kind: &str, n: usize) -> (ComplexMatrix, StructureSpace) {
    let complex = kind.ends_with("complex");
    match kind {
        "full-complex" | "full-real" => {
            let full = Pattern::new(n, (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()).unwrap();
            let a = stable_on(g, &full, complex, 0.5);
            let s = if complex { StructureSpace::full_complex(n) } else { StructureSpace::full_real(n) };
            (a, s)
        }
        "sparsity-complex" | "sparsity-real" => {
            let p = random_pattern(g, n, 0.4);
            let a = stable_on(g, &p, complex, 0.5);
            let s = if complex { StructureSpace::sparsity_complex(p) } else { StructureSpace::sparsity_real(p) };
            (a, s)
        }
        "toeplitz-real" => {
            let lower = (1 + (g.random::<u32>() % 2) as usize).min(n - 1);
            let upper = (1 + (g.random::<u32>() % 3) as usize).min(n - 1);
            let coeffs: Vec<f64> = (0..lower + upper + 1).map(|_| gauss(g)).collect();
            let t = stabrad::io::toeplitz_band(n, lower, upper, &coeffs).unwrap();
            let alpha = oracle_abscissa(&t);
            (t.shifted(C64::new(alpha + 0.5, 0.0)), StructureSpace::toeplitz_band_real(n, lower, upper).unwrap())
        }
        other => panic!("unknown kind {other}"),
    }
}

/// Independent real spanning set of a structure space, built entry by entry.
pub fn spanning_set(s: &StructureSpace) -> Vec<ComplexMatrix> {
    let n = s.dim();
    let unit = |i: usize, j: usize, z: C64| {
        let mut m = ComplexMatrix::zeros(n, n);
        m.as_mut_slice()[i * n + j] = z;
        m
    };
    let one = C64::new(1.0, 0.0);
    let imag = C64::new(0.0, 1.0);
    let mut out = Vec::new();
    match s.kind_name() {
        "full-complex" | "full-real" | "sparsity-complex" | "sparsity-real" => {
            let complex = s.kind_name().ends_with("complex");
            for i in 0..n {
                for j in 0..n {
                    let member = match s {
                        StructureSpace::SparsityComplex { pattern } | StructureSpace::SparsityReal { pattern } => {
                            pattern.contains(i, j)
                        }
                        _ => true,
                    };
                    if member {
                        out.push(unit(i, j, one));
                        if complex {
                            out.push(unit(i, j, imag));
                        }
                    }
                }
            }
        }
        "toeplitz-real" => {
            let StructureSpace::ToeplitzBandReal { lower, upper, .. } = s else { unreachable!() };
            for d in -(*lower as isize)..=(*upper as isize) {
                let m = ComplexMatrix::from_fn(n, n, |i, j| if j as isize - i as isize == d { one } else { C64::new(0.0, 0.0) });
                if m.frobenius_norm() > 0.0 {
                    out.push(m);
                }
            }
        }
        other => panic!("no spanning set for {other}"),
    }
    out
}

/// Least-squares projection onto `span(basis)` in the real Frobenius inner product.
pub fn least_squares_projection(basis: &[ComplexMatrix], z: &ComplexMatrix) -> ComplexMatrix {
    let n2 = z.rows() * z.cols();
    let k = basis.len();
    let mut a = DMatrix::<f64>::zeros(2 * n2, k);
    for (c, b) in basis.iter().enumerate() {
        for (r, v) in b.as_slice().iter().enumerate() {
            a[(r, c)] = v.re;
            a[(n2 + r, c)] = v.im;
        }
    }
    let mut rhs = nalgebra::DVector::<f64>::zeros(2 * n2);
    for (r, v) in z.as_slice().iter().enumerate() {
        rhs[r] = v.re;
        rhs[n2 + r] = v.im;
    }
    let coef = a.clone().svd(true, true).solve(&rhs, 1e-13).unwrap();
    let mut out = ComplexMatrix::zeros(z.rows(), z.cols());
    for (c, b) in basis.iter().enumerate() {
        out.axpy(C64::new(coef[c], 0.0), b);
    }
    out
}

/// Outcome of the inner-flow property checks on one random instance.
pub struct InnerCheck {
    pub kind: &'static str,
    pub n: usize,
    pub converged: bool,
    pub max_norm_drift: f64,
    pub max_decrease: f64,
    pub allowed_decrease: f64,
    pub gradient_gap: f64,
    pub alignment: f64,
}

/// Random instance `idx`: steps the splitting integrator by hand to watch the
/// vector norms, then runs the solver and inspects its accepted-step history
/// and final state.
pub fn inner_check(idx: usize) -> Result<InnerCheck, String> {
    use stabrad::inner::{reduced_gradient, solve_inner, splitting_step, InnerOptions, RankOneState};
    use stabrad::linalg::norm;

    let kind = KINDS[idx % 5];
    let n = 4 + (idx * 7 + idx / 5) % 7;
    let mut g = rng(1000 + idx as u64);
    let (a, s) = instance(&mut g, kind, n);
    let eps = 0.05 + 0.25 * g.random::<f64>();
    let delta = 0.05 + 0.45 * g.random::<f64>();
    let err = |e: stabrad::Error| format!("{kind} n = {n}: {e}");

    let mut st = RankOneState::cold_start(&a, &s, eps, delta, 1.0).map_err(err)?;
    let mut drift: f64 = 0.0;
    for k in 0..40 {
        st = splitting_step(&a, &s, eps, delta, &st, 0.02 * (1 + k % 5) as f64).map_err(err)?;
        drift = drift.max((norm(&st.u) - 1.0).abs()).max((norm(&st.v) - 1.0).abs());
    }

    let opts = InnerOptions::default();
    let r = solve_inner(&a, &s, eps, delta, None, &opts).map_err(err)?;
    drift = drift.max((norm(&r.state.u) - 1.0).abs()).max((norm(&r.state.v) - 1.0).abs());
    let lambda_bound = a.frobenius_norm() + eps + delta;
    let allowed = opts.accept_slack * f64::EPSILON * lambda_bound.max(1.0);
    let max_decrease = r
        .decay_history
        .windows(2)
        .map(|w| w[0].re_lambda - w[1].re_lambda)
        .fold(0.0, f64::max);

    let grad = reduced_gradient(&s, eps, delta, &r.state).map_err(err)?;
    let mut diff = grad.gtilde.clone();
    diff.axpy(C64::new(-eps, 0.0), &grad.g);
    let e = r.state.e();
    let alignment = e.inner(&r.state.triple.xy_outer()).norm();
    Ok(InnerCheck {
        kind,
        n,
        converged: r.converged,
        max_norm_drift: drift,
        max_decrease,
        allowed_decrease: allowed,
        gradient_gap: diff.frobenius_norm(),
        alignment,
    })
}

/// Relative errors of the closed-form derivatives against centred finite
/// differences of converged inner values, on random instance `idx`.
pub struct DerivativeCheck {
    pub kind: &'static str,
    pub n: usize,
    pub phi_rel: f64,
    pub psi_rel: f64,
}

pub fn derivative_check(idx: usize) -> Result<DerivativeCheck, String> {
    use stabrad::inner::{solve_inner, InnerOptions};
    use stabrad::outer::{phi_derivative, psi_derivative};

    let kind = KINDS[idx % 5];
    let n = 5 + idx % 4;
    let mut g = rng(5000 + idx as u64);
    let (a, s) = instance(&mut g, kind, n);
    let eps = 0.1 + 0.2 * g.random::<f64>();
    let delta = 0.1 + 0.3 * g.random::<f64>();
    let err = |e: stabrad::Error| format!("{kind} n = {n}: {e}");
    let opts = InnerOptions::default();
    let phi = |e: f64, d: f64, init| solve_inner(&a, &s, e, d, init, &opts).map(|r| -r.re_lambda).map_err(err);

    let base = solve_inner(&a, &s, eps, delta, None, &opts).map_err(err)?;
    let h = 1e-5;
    let fd_phi = (phi(eps, delta + h, Some(&base.state))? - phi(eps, delta - h, Some(&base.state))?) / (2.0 * h);
    let d_phi = phi_derivative(&base.state.triple, &s).map_err(err)?;
    let fd_psi = (phi(eps + h, delta, Some(&base.state))? - phi(eps - h, delta, Some(&base.state))?) / (2.0 * h);
    let d_psi = psi_derivative(&base.state.triple);
    Ok(DerivativeCheck {
        kind,
        n,
        phi_rel: (fd_phi - d_phi).abs() / d_phi.abs(),
        psi_rel: (fd_psi - d_psi).abs() / d_psi.abs(),
    })
}

/// Projection identities and the least-squares oracle for one random
/// structure of the given kind and size.
pub fn projection_check(kind: &str, n: usize, seed: u64) -> Result<(), String> {
    use stabrad::structures::projected_norm;

    let s = instance(&mut rng(seed), kind, n).1;
    let mut g = rng(seed ^ 0xabcdef);
    let x = random_matrix(&mut g, n, true);
    let y = random_matrix(&mut g, n, true);
    let px = s.project(&x).map_err(|e| e.to_string())?;
    let py = s.project(&y).map_err(|e| e.to_string())?;
    let check = |ok: bool, what: &str| if ok { Ok(()) } else { Err(format!("{kind} n = {n} seed {seed}: {what}")) };
    check((&s.project(&px).unwrap() - &px).frobenius_norm() <= 1e-10, "idempotence")?;
    // Self-adjointness in the real Frobenius inner product.
    check((px.real_inner(&y) - x.real_inner(&py)).abs() <= 1e-10, "self-adjointness")?;
    let r = &x - &px;
    let lhs = x.frobenius_norm().powi(2);
    let rhs = px.frobenius_norm().powi(2) + r.frobenius_norm().powi(2);
    check((lhs - rhs).abs() <= 1e-10 * lhs.max(1.0), "Pythagoras")?;
    check(px.real_inner(&r).abs() <= 1e-10, "orthogonal residual")?;
    let oracle = least_squares_projection(&spanning_set(&s), &x);
    check((&oracle - &px).frobenius_norm() <= 1e-10, "least-squares oracle")?;
    check((projected_norm(&s, &x).unwrap() - px.frobenius_norm()).abs() <= 1e-12, "projected norm")?;
    check(s.membership_residual(&px).unwrap() <= 1e-10, "membership")
}

/// Structured radius at `eps = eps* / 2` and the gap `eps* - eps` on a random
/// stable real 8 x 8 matrix with a random sparsity structure.
pub fn lower_bound_gap(seed: u64) -> Result<(f64, f64), String> {
    use stabrad::inner::InnerOptions;
    use stabrad::outer::{solve_radius, stability_radius, OuterConfig};

    let mut g = rng(seed);
    let p = random_pattern(&mut g, 8, 0.35);
    let a = stable_on(&mut g, &p, false, 0.3);
    let s = StructureSpace::sparsity_real(p);
    let err = |e: stabrad::Error| format!("seed {seed}: {e}");
    let star = stability_radius(&a, &InnerOptions::default()).map_err(err)?.final_value;
    let eps = 0.5 * star;
    let d = solve_radius(&a, &s, &OuterConfig::solve_delta(eps)).map_err(err)?.final_value;
    Ok((d, star - eps))
}
