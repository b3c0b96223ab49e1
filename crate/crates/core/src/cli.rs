//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bounds::{self, Forcing, L2Options};
use crate::error::{Error, Result};
use crate::inner::{InnerOptions, Integrator};
use crate::io::{self, fmt_num};
use crate::linalg::{ComplexMatrix, C64};
use crate::outer::{self, OuterConfig, OuterTrace};
use crate::pseudospectra::{self, GridSpec, RadiusMode};
use crate::structures::{Pattern, StructureSpace};

/// Default size guard on the matrix dimension.
pub const SIZE_GUARD: usize = 1500;

#[derive(Parser, Debug)]
#[command(name = "stabrad", version, about = "Structured epsilon-stability radii of Hurwitz matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Structured radius delta for a fixed eps.
    RadiusDelta {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Largest eps for a fixed structured perturbation size delta.
    RadiusEps {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Unstructured stability radius eps*.
    StabilityRadius {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Also report the imaginary-axis sweep estimate.
        #[arg(long)]
        sweep: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Resolvent field on a grid, level curves and the imaginary-axis minimum.
    Pseudospectrum {
        #[command(flatten)]
        matrix: MatrixArgs,
        /// Comma-separated contour levels.
        #[arg(long, value_delimiter = ',')]
        levels: Vec<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Contour and L2 transient bounds at (eps, delta).
    VerifyBounds {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        /// Defaults to the computed structured radius, whose extremal perturbation is then included.
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// `piecewise:K` or `harmonic` (worst frequency, worst direction).
        #[arg(long, default_value = "piecewise:20")]
        forcing: String,
        /// Horizon T; defaults to 50 over the smallest |Re lambda(A)|, capped at 200.
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        #[arg(long, default_value_t = 5e-3)]
        tol_quad: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.1,1,10")]
        times: Vec<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Eigenvalue cloud of A + Delta + Theta for random admissible perturbations.
    SampleJoint {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Radius::Ball)]
        radius: Radius,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct MatrixArgs {
    /// Matrix Market file.
    #[arg(long, conflicts_with = "generator", required_unless_present = "generator")]
    pub matrix: Option<PathBuf>,
    /// Built-in generator, `grcar:N`.
    #[arg(long)]
    pub generator: Option<String>,
    /// Subtracted from the diagonal of generated matrices.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub shift: f64,
    /// Lift the size guard on n.
    #[arg(long)]
    pub allow_large: bool,
}

#[derive(Args, Debug, Clone)]
pub struct StructureArgs {
    /// `sparsity-real:self|FILE`, `sparsity-complex:self|FILE`,
    /// `toeplitz-real:P,Q`, `full-real` or `full-complex`.
    #[arg(long, default_value = "sparsity-real:self")]
    pub structure: String,
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Run both sign branches of the structured term.
    #[arg(long)]
    pub both_signs: bool,
    /// Number of inner trajectories (extra ones start at random vectors).
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
    #[arg(long, value_enum, default_value_t = IntegratorArg::Splitting)]
    pub integrator: IntegratorArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20_000)]
    pub max_steps: usize,
    #[arg(long, default_value_t = 30)]
    pub max_outer: usize,
    /// First outer iterate.
    #[arg(long)]
    pub start: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    #[arg(long, default_value_t = 201)]
    pub nx: usize,
    #[arg(long, default_value_t = 201)]
    pub ny: usize,
    /// Window `RE_MIN,RE_MAX,IM_MIN,IM_MAX`; chosen automatically when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Relative margin of the automatic window.
    #[arg(long, default_value_t = 0.2)]
    pub margin: f64,
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    /// Directory for reports and exported matrices.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum IntegratorArg {
    Splitting,
    FullEuler,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Radius {
    Ball,
    Sphere,
}

/// Distinct process exit code for each error kind; 2 is left to usage errors.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) => 3,
        Error::Parse { .. } => 4,
        Error::UnsupportedField(_) => 5,
        Error::Io(_) => 6,
        Error::DimensionMismatch(_) => 7,
        Error::NonFinite => 8,
        Error::NotHurwitz { .. } => 9,
        Error::TooLarge { .. } => 10,
        Error::NonConvergence { .. } => 11,
        Error::DegenerateEigenvalue { .. } => 12,
        Error::ZeroStructuredPart { .. } => 13,
        Error::ZeroStructuredGradient { .. } => 14,
        Error::ExceptionalStationaryPoint => 15,
        Error::InvalidStructure(_) => 16,
        Error::ContourEscapesWindow => 17,
        Error::OpenContour => 18,
        Error::StepSizeUnstable { .. } => 19,
        Error::Json(_) => 20,
    }
}

/// Loaded matrix with the pattern declared by its source.
pub struct Loaded {
    pub a: ComplexMatrix,
    pub pattern: Pattern,
    pub label: String,
}

pub fn load_matrix(args: &MatrixArgs) -> Result<Loaded> {
    let loaded = match (&args.matrix, &args.generator) {
        (Some(path), None) => {
            let d = io::read_matrix_market(path).map_err(|e| match e {
                Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
                other => other,
            })?;
            let pattern = d.square_pattern()?;
            let mut a = d.matrix;
            if args.shift != 0.0 {
                a = a.shifted(C64::new(args.shift, 0.0));
            }
            Loaded { a, pattern, label: path.display().to_string() }
        }
        (None, Some(spec)) => {
            let (name, n) = spec.split_once(':').unwrap_or((spec.as_str(), ""));
            if name != "grcar" {
                return Err(Error::InvalidArgument(format!("unknown generator '{name}' (expected grcar:N)")));
            }
            let n: usize = n
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("generator size '{n}' is not a positive integer")))?;
            guard(n, args.allow_large)?;
            let a = io::grcar(n, args.shift)?;
            let pattern = Pattern::of_nonzeros(&a)?;
            Loaded { a, pattern, label: format!("grcar:{n} shift {}", args.shift) }
        }
        _ => return Err(Error::InvalidArgument("give exactly one of --matrix and --generator".into())),
    };
    guard(loaded.a.ensure_square()?, args.allow_large)?;
    loaded.a.ensure_finite()?;
    Ok(loaded)
}

fn guard(n: usize, allow_large: bool) -> Result<()> {
    if n > SIZE_GUARD && !allow_large {
        return Err(Error::TooLarge { n, limit: SIZE_GUARD });
    }
    Ok(())
}

fn read_pattern_source(src: &str, loaded: &Loaded) -> Result<Pattern> {
    let n = loaded.a.rows();
    if src == "self" {
        return Ok(loaded.pattern.clone());
    }
    let path = Path::new(src);
    let is_mm = fs::read_to_string(path)?.starts_with("%%MatrixMarket");
    if is_mm {
        let d = io::read_matrix_market_pattern(path)?;
        if d.rows != n || d.cols != n {
            return Err(Error::DimensionMismatch(format!("pattern file is {}x{}, matrix is {n}x{n}", d.rows, d.cols)));
        }
        d.square_pattern()
    } else {
        io::read_pattern_list(path, n)
    }
}

pub fn parse_structure(spec: &str, loaded: &Loaded) -> Result<StructureSpace> {
    let n = loaded.a.rows();
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (spec, None),
    };
    let need = |what: &str| Error::InvalidArgument(format!("structure '{kind}' needs ':{what}'"));
    match kind {
        "full-real" => Ok(StructureSpace::full_real(n)),
        "full-complex" => Ok(StructureSpace::full_complex(n)),
        "sparsity-real" => Ok(StructureSpace::sparsity_real(read_pattern_source(arg.ok_or_else(|| need("self|FILE"))?, loaded)?)),
        "sparsity-complex" => {
            Ok(StructureSpace::sparsity_complex(read_pattern_source(arg.ok_or_else(|| need("self|FILE"))?, loaded)?))
        }
        "toeplitz-real" => {
            let arg = arg.ok_or_else(|| need("P,Q"))?;
            let (p, q) = arg.split_once(',').ok_or_else(|| need("P,Q"))?;
            let parse = |x: &str| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bandwidth '{x}' is not a nonnegative integer")))
            };
            StructureSpace::toeplitz_band_real(n, parse(p)?, parse(q)?)
        }
        other => Err(Error::InvalidArgument(format!(
            "unknown structure '{other}' (expected sparsity-real, sparsity-complex, toeplitz-real, full-real or full-complex)"
        ))),
    }
}

impl SolverArgs {
    pub fn inner_options(&self) -> Result<InnerOptions> {
        if self.restarts == 0 || self.max_steps == 0 {
            return Err(Error::InvalidArgument("--restarts and --max-steps must be positive".into()));
        }
        Ok(InnerOptions {
            try_both_signs: self.both_signs,
            restarts: self.restarts,
            seed: self.seed,
            max_steps: self.max_steps,
            integrator: match self.integrator {
                IntegratorArg::Splitting => Integrator::Splitting,
                IntegratorArg::FullEuler => Integrator::FullEuler,
            },
            ..InnerOptions::default()
        })
    }

    fn apply(&self, cfg: &mut OuterConfig) -> Result<()> {
        cfg.inner = self.inner_options()?;
        cfg.k_max = self.max_outer;
        cfg.start = self.start;
        Ok(())
    }
}

impl GridArgs {
    fn spec(&self, a: &ComplexMatrix, radius: Option<f64>) -> Result<GridSpec> {
        match (&self.window, radius) {
            (Some(w), _) => {
                let v: Vec<f64> = w
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::InvalidArgument(format!("window '{w}': {e}")))?;
                if v.len() != 4 {
                    return Err(Error::InvalidArgument(format!("window needs 4 values, got {}", v.len())));
                }
                GridSpec::new(v[0], v[1], v[2], v[3], self.nx, self.ny)
            }
            (None, Some(r)) => GridSpec::enclosing_pseudospectrum(a, r, self.margin, self.nx, self.ny),
            (None, None) => GridSpec::around_spectrum(a, self.margin, self.nx, self.ny),
        }
    }
}

fn prepare_out(out: &OutArgs, argv: &[String]) -> Result<Option<PathBuf>> {
    match &out.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            io::write_run_meta(dir, argv)?;
            Ok(Some(dir.clone()))
        }
        None => Ok(None),
    }
}

fn report_trace(
    w: &mut dyn Write,
    trace: &OuterTrace,
    s: &StructureSpace,
    label: &str,
    dir: Option<&Path>,
) -> Result<()> {
    write!(w, "{}", io::format_trace_table(trace))?;
    let name = match trace.mode {
        outer::Mode::SolveDelta => "delta",
        outer::Mode::SolveEps => "eps",
    };
    writeln!(w, "{name} = {}", fmt_num(trace.final_value))?;
    if trace.mode == outer::Mode::SolveEps && trace.final_value > 0.0 {
        writeln!(w, "resolvent bound 1/eps = {}", fmt_num(1.0 / trace.final_value))?;
    }
    writeln!(w, "status: {}", serde_json::to_value(trace.status)?.as_str().unwrap_or(""))?;
    for warning in &trace.warnings {
        eprintln!("warning: {warning}");
    }
    if let Some(dir) = dir {
        let extra = json!({ "matrix": label, "structure": s.to_string() });
        io::write_json(dir.join("report.json"), &io::trace_to_json(trace, extra)?)?;
        fs::write(dir.join("trace.txt"), io::format_trace_table(trace))?;
        let e = trace.state.e();
        io::write_matrix_market(dir.join("E.mtx"), &e, Some("rank-1 direction E = u v*"))?;
        io::write_matrix_market(
            dir.join("Delta.mtx"),
            &trace.state.delta_matrix(s, trace.delta())?,
            Some("structured perturbation Delta = delta eta Pi_S(E)"),
        )?;
        io::write_matrix_market(dir.join("Theta.mtx"), &trace.state.theta_matrix(trace.eps()), Some("Theta = eps E"))?;
    }
    Ok(())
}

fn default_horizon(a: &ComplexMatrix) -> Result<f64> {
    let eigs = crate::linalg::all_eigenvalues(a)?;
    let slowest = eigs.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min);
    Ok((50.0 / slowest.max(1e-12)).min(200.0))
}

/// Runs one command, writing the human-readable summary to `w`.
pub fn run(cli: &Cli, argv: &[String], w: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::RadiusDelta { matrix, structure, eps, solver, out } => {
            let loaded = load_matrix(matrix)?;
            let s = parse_structure(&structure.structure, &loaded)?;
            let mut cfg = OuterConfig::solve_delta(*eps);
            solver.apply(&mut cfg)?;
            let dir = prepare_out(out, argv)?;
            let trace = outer::solve_radius(&loaded.a, &s, &cfg)?;
            report_trace(w, &trace, &s, &loaded.label, dir.as_deref())
        }
        Command::RadiusEps { matrix, structure, delta, solver, out } => {
            let loaded = load_matrix(matrix)?;
            let s = parse_structure(&structure.structure, &loaded)?;
            let mut cfg = OuterConfig::solve_eps(*delta);
            solver.apply(&mut cfg)?;
            let dir = prepare_out(out, argv)?;
            let trace = outer::solve_radius(&loaded.a, &s, &cfg)?;
            report_trace(w, &trace, &s, &loaded.label, dir.as_deref())
        }
        Command::StabilityRadius { matrix, solver, sweep, out } => {
            let loaded = load_matrix(matrix)?;
            let s = StructureSpace::full_complex(loaded.a.rows());
            let mut cfg = OuterConfig::solve_eps(0.0);
            solver.apply(&mut cfg)?;
            let dir = prepare_out(out, argv)?;
            let trace = outer::solve_radius(&loaded.a, &s, &cfg)?;
            report_trace(w, &trace, &s, &loaded.label, dir.as_deref())?;
            if *sweep {
                let hw = pseudospectra::axis_half_width(&loaded.a);
                let (omega, sigma) = pseudospectra::axis_sweep(&loaded.a, -hw, hw, 2001)?;
                writeln!(w, "axis sweep: omega* = {}, sigma_min = {}", fmt_num(omega), fmt_num(sigma))?;
                if let Some(d) = &dir {
                    io::write_json(
                        d.join("axis_sweep.json"),
                        &json!({ "schema": io::SCHEMA, "omega": omega, "sigma_min": sigma }),
                    )?;
                }
            }
            Ok(())
        }
        Command::Pseudospectrum { matrix, levels, grid, out } => {
            let loaded = load_matrix(matrix)?;
            if levels.iter().any(|l| !(*l > 0.0)) {
                return Err(Error::InvalidArgument("contour levels must be positive".into()));
            }
            let spec = grid.spec(&loaded.a, levels.iter().cloned().reduce(f64::max))?;
            let dir = prepare_out(out, argv)?;
            let field = pseudospectra::resolvent_field(&loaded.a, &spec)?;
            let mut curves = Vec::new();
            for &l in levels {
                let c = pseudospectra::level_sets(&field, l)?;
                writeln!(w, "level {}: {} component(s)", fmt_num(l), c.len())?;
                curves.extend(c);
            }
            let hw = pseudospectra::axis_half_width(&loaded.a);
            let (omega, sigma) = pseudospectra::axis_sweep(&loaded.a, -hw, hw, 2001)?;
            writeln!(w, "min sigma_min on the imaginary axis = {} at omega = {}", fmt_num(sigma), fmt_num(omega))?;
            if let Some(d) = &dir {
                fs::write(d.join("field.csv"), field.to_csv())?;
                fs::write(d.join("contours.csv"), pseudospectra::contours_csv(&curves))?;
                io::write_json(
                    d.join("pseudospectrum.json"),
                    &json!({
                        "schema": io::SCHEMA,
                        "matrix": loaded.label,
                        "grid": spec,
                        "levels": levels,
                        "axis_sweep": { "omega": omega, "sigma_min": sigma },
                    }),
                )?;
            }
            Ok(())
        }
        Command::VerifyBounds {
            matrix,
            structure,
            eps,
            delta,
            samples,
            forcing,
            horizon,
            steps,
            tol_quad,
            times,
            grid,
            solver,
            out,
        } => {
            let loaded = load_matrix(matrix)?;
            let s = parse_structure(&structure.structure, &loaded)?;
            let dir = prepare_out(out, argv)?;
            let (delta, extremal) = match delta {
                Some(d) => (*d, None),
                None => {
                    let mut cfg = OuterConfig::solve_delta(*eps);
                    solver.apply(&mut cfg)?;
                    let trace = outer::solve_radius(&loaded.a, &s, &cfg)?;
                    writeln!(w, "structured radius delta = {}", fmt_num(trace.final_value))?;
                    let d = trace.state.delta_matrix(&s, trace.final_value)?;
                    (trace.final_value, Some(d))
                }
            };
            let spec = grid.spec(&loaded.a, Some(eps + delta))?;
            let field = pseudospectra::resolvent_field(&loaded.a, &spec)?;
            let cb = bounds::contour_bound(&loaded.a, *eps, delta, &field)?;
            writeln!(w, "contour bound |Gamma|/(2 pi eps) = {} (|Gamma| = {})", fmt_num(cb.bound), fmt_num(cb.gamma_length))?;
            let perturbed = match &extremal {
                Some(d) => &loaded.a + d,
                None => loaded.a.clone(),
            };
            let norms = bounds::transient_norms(&perturbed, times);
            for (t, v) in times.iter().zip(&norms) {
                writeln!(w, "||exp(t(A+Delta))||_2 at t = {}: {}{}", fmt_num(*t), fmt_num(*v), if *v > cb.bound { "  EXCEEDS" } else { "" })?;
            }
            let t_end = match horizon {
                Some(t) => *t,
                None => default_horizon(&loaded.a)?,
            };
            let forcing = parse_forcing(forcing, &perturbed)?;
            let opts = L2Options {
                n_perturbations: *samples,
                forcing,
                t_end,
                n_steps: *steps,
                seed: solver.seed,
                tol_quad: *tol_quad,
                radius: RadiusMode::Ball,
            };
            let report = bounds::verify_l2_bound(&loaded.a, &s, *eps, delta, &opts, extremal.as_ref())?;
            writeln!(
                w,
                "{}: max L2 ratio = {} over {} samples, bound 1/eps = {}, violations = {}",
                report.label,
                fmt_num(report.max_ratio),
                report.n_samples,
                fmt_num(report.bound),
                report.violations.len()
            )?;
            if let Some(d) = &dir {
                let doc = json!({
                    "schema": io::SCHEMA,
                    "label": bounds::CERTIFICATION_LABEL,
                    "matrix": loaded.label,
                    "structure": s.to_string(),
                    "contour": {
                        "eps": cb.eps,
                        "delta": cb.delta,
                        "gamma_length": cb.gamma_length,
                        "bound": cb.bound,
                        "times": times,
                        "exp_norms": norms,
                    },
                    "l2": report,
                });
                io::write_json(d.join("bounds.json"), &doc)?;
                let rows = cb.contours.iter().enumerate().flat_map(|(k, c)| {
                    c.iter().map(move |z| vec![fmt_num(eps + delta), k.to_string(), fmt_num(z.re), fmt_num(z.im)])
                });
                fs::write(d.join("gamma.csv"), io::csv_string("level,segment_id,re,im", rows))?;
            }
            Ok(())
        }
        Command::SampleJoint { matrix, structure, eps, delta, samples, radius, seed, out } => {
            let loaded = load_matrix(matrix)?;
            let s = parse_structure(&structure.structure, &loaded)?;
            let dir = prepare_out(out, argv)?;
            let mode = match radius {
                Radius::Ball => RadiusMode::Ball,
                Radius::Sphere => RadiusMode::Sphere,
            };
            let cloud = pseudospectra::joint_pseudospectrum_sample(&loaded.a, &s, *eps, *delta, *samples, *seed, mode)?;
            let max_re = cloud.iter().flat_map(|c| c.eigenvalues.iter().map(|z| z.re)).fold(f64::NEG_INFINITY, f64::max);
            writeln!(w, "{} samples, largest real part {}", cloud.len(), fmt_num(max_re))?;
            if let Some(d) = &dir {
                fs::write(d.join("cloud.csv"), pseudospectra::cloud_csv(&cloud))?;
            }
            Ok(())
        }
    }
}

fn parse_forcing(spec: &str, m: &ComplexMatrix) -> Result<Forcing> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    match kind {
        "piecewise" => {
            let pieces = arg
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("piecewise forcing needs a piece count, got '{arg}'")))?;
            Ok(Forcing::PiecewiseConstant { pieces })
        }
        "harmonic" => {
            let hw = pseudospectra::axis_half_width(m);
            let (omega, _) = pseudospectra::axis_sweep(m, -hw, hw, 2001)?;
            Ok(Forcing::Harmonic { omega, w: bounds::worst_harmonic_direction(m, omega) })
        }
        other => Err(Error::InvalidArgument(format!("unknown forcing '{other}' (expected piecewise:K or harmonic)"))),
    }
}

/// Caps the global worker pool at `STABRAD_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("STABRAD_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::InvalidArgument(format!("STABRAD_THREADS must be a positive integer, got '{v}'")))?;
        // A pool that is already built keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}
