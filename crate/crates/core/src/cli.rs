//! Command-line front end: JSON reports on standard output, a short summary
//! on standard error, CSV dumps behind `--dump-dir`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::circumcenter::{solve_in, uniqueness_probe_in, PointSet, SolverOptions};
use crate::error::{Error, Result};
use crate::matrix::{MatrixJson, UnitaryMatrix};
use crate::metrics::{comparison_report, distance, MetricSpec};
use crate::report::ReportEnvelope;
use crate::rigidity::{decide_equivalence, scan_orbit_radius, RepresentationPair, RigidityOutcome};
use crate::scenarios::{run_verify, VerifyConfig, DISPERSION_TOL, SCENARIO_IDS};
use crate::subspaces::{symmetry_embed, ProjectionMatrix, SubspaceSpec};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DIMENSION: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;
pub const EXIT_RUNTIME: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "finsler", version, about = "Geometry of unitary groups under p-Schatten metrics")]
pub struct Cli {
    /// Record wall-clock time in `runtime_ms` (reports are then no longer byte-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 8)]
    pub starts: usize,
    /// Include the per-iteration objective in circumcenter results.
    #[arg(long)]
    pub trace: bool,
}

impl SolverArgs {
    fn options(&self, seed: u64) -> SolverOptions {
        SolverOptions { max_iters: self.max_iters, tol: self.tol, starts: self.starts, seed, trace: self.trace }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Distance between two matrices with the norm and chordal comparisons.
    Distance {
        /// Matrix file, or inline JSON.
        a: String,
        b: String,
        #[arg(long, default_value = "p2")]
        metric: String,
        /// Exponent for the comparison report; defaults to the metric's own exponent or 2.
        #[arg(long)]
        p: Option<u32>,
    },
    /// Runs the property suite attached to a theorem id.
    Verify {
        id: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, env = "FINSLER_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        dump_dir: Option<PathBuf>,
    },
    /// Circumcenter of a points file (a JSON array of matrices).
    Circumcenter {
        points: String,
        #[arg(long, default_value = "inf")]
        metric: String,
        /// `U`, `SU`, `SO` or `Gr:m`.
        #[arg(long, default_value = "U")]
        subspace: String,
        #[arg(long, env = "FINSLER_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        dump_dir: Option<PathBuf>,
    },
    /// Certifies equivalence of two representations, or reports INCONCLUSIVE.
    Rigidity {
        file: String,
        /// Base point of the orbit; defaults to the identity (or a coordinate symmetry on `Gr:m`).
        #[arg(long)]
        u0: Option<String>,
        #[arg(long)]
        eps: Option<f64>,
        /// Extra random base points for the orbit-radius upper bound.
        #[arg(long, default_value_t = 0)]
        scan: usize,
        #[arg(long, env = "FINSLER_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

/// Exit status together with the texts for standard output and standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn report(env: ReportEnvelope, code: i32, summary: String) -> Self {
        Self { code, stdout: env.to_json(), stderr: summary }
    }

    fn error(e: &Error) -> Self {
        Self { code: exit_code(e), stdout: String::new(), stderr: format!("error: {e}\n") }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::DimensionMismatch(..) => EXIT_DIMENSION,
        Error::NotConverged { .. } => EXIT_NOT_CONVERGED,
        Error::Parse(_)
        | Error::Shape(_)
        | Error::NonFinite
        | Error::NotUnitary(_)
        | Error::NotSelfAdjoint(_)
        | Error::NotSkewHermitian(_)
        | Error::OddOrUnsupportedP(_)
        | Error::InvalidArgument(_)
        | Error::InvalidGroup(_)
        | Error::NotHomomorphism(_)
        | Error::NotInSubspace(_)
        | Error::NotAProjection(_)
        | Error::NotASymmetry
        | Error::EmptyPointSet => EXIT_INPUT,
        _ => EXIT_RUNTIME,
    }
}

/// Parses arguments and runs one command without touching the process state.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            return Outcome { code, stdout: if e.use_stderr() { String::new() } else { e.to_string() }, stderr: if e.use_stderr() { e.to_string() } else { String::new() } };
        }
    };
    let start = Instant::now();
    let result = match &cli.command {
        Command::Distance { a, b, metric, p } => cmd_distance(a, b, metric, *p),
        Command::Verify { id, n, p, eps, trials, seed, solver, dump_dir } => {
            let cfg = VerifyConfig { n: *n, p: *p, trials: *trials, seed: *seed, eps: *eps, solver: solver.options(*seed) };
            cmd_verify(id, &cfg, dump_dir.as_deref())
        }
        Command::Circumcenter { points, metric, subspace, seed, solver, dump_dir } => cmd_circumcenter(points, metric, subspace, &solver.options(*seed), dump_dir.as_deref()),
        Command::Rigidity { file, u0, eps, scan, seed, solver } => cmd_rigidity(file, u0.as_deref(), *eps, *scan, &solver.options(*seed)),
    };
    match result {
        Ok((mut env, code, summary)) => {
            if cli.timing {
                env.runtime_ms = Some(start.elapsed().as_millis() as u64);
            }
            Outcome::report(env, code, summary)
        }
        Err(e) => Outcome::error(&e),
    }
}

type Reply = Result<(ReportEnvelope, i32, String)>;

fn read_input(arg: &str) -> Result<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| Error::Parse(format!("cannot read '{arg}': {e}")))
}

fn parse_matrix(arg: &str) -> Result<UnitaryMatrix> {
    MatrixJson::parse(&read_input(arg)?)?.to_unitary()
}

fn parse_metric(s: &str) -> Result<MetricSpec> {
    s.parse::<MetricSpec>()?.validate()
}

fn pass_code(pass: bool) -> i32 {
    if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn cmd_distance(a: &str, b: &str, metric: &str, p: Option<u32>) -> Reply {
    let m = parse_metric(metric)?;
    let u = parse_matrix(a)?;
    let v = parse_matrix(b)?;
    let d = distance(&u, &v, m)?;
    let p = p.unwrap_or(match m.base() {
        MetricSpec::SchattenP(p) | MetricSpec::PerturbedP(p, _) => p,
        _ => 2,
    });
    let rep = comparison_report(&u, &v, p)?;
    let pass = rep.all_pass();
    let env = ReportEnvelope::new("distance", json!({"metric": m, "p": p, "n": u.n()}), 0, json!({"distance": d, "comparison": rep}), pass);
    Ok((env, pass_code(pass), format!("distance ({m}) = {d:.12}; comparisons {}\n", verdict(pass))))
}

fn write_dumps(dir: &Path, files: &[(String, String)]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::InvalidArgument(format!("cannot create '{}': {e}", dir.display())))?;
    for (name, csv) in files {
        let path = dir.join(name);
        fs::write(&path, csv).map_err(|e| Error::InvalidArgument(format!("cannot write '{}': {e}", path.display())))?;
    }
    Ok(())
}

pub fn cmd_verify(id: &str, cfg: &VerifyConfig, dump_dir: Option<&Path>) -> Reply {
    if !SCENARIO_IDS.contains(&id) {
        return Err(Error::InvalidArgument(format!("unknown theorem id '{id}'; expected one of {}", SCENARIO_IDS.join(", "))));
    }
    let out = run_verify(id, cfg)?;
    if let Some(dir) = dump_dir {
        write_dumps(dir, &out.dumps.iter().map(|d| (d.name.clone(), d.csv.clone())).collect::<Vec<_>>())?;
    }
    let mut summary = format!("verify {id}: {}\n", verdict(out.pass));
    for s in &out.subtests {
        summary.push_str(&format!("  {:<44} {}\n", s.name, verdict(s.pass)));
    }
    Ok((out.envelope(cfg), pass_code(out.pass), summary))
}

fn parse_points(arg: &str) -> Result<PointSet> {
    let text = read_input(arg)?;
    let mats: Vec<MatrixJson> = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    PointSet::new(mats.iter().map(MatrixJson::to_unitary).collect::<Result<Vec<_>>>()?)
}

pub fn cmd_circumcenter(points: &str, metric: &str, subspace: &str, opts: &SolverOptions, dump_dir: Option<&Path>) -> Reply {
    let m = parse_metric(metric)?;
    let s: SubspaceSpec = subspace.parse()?;
    let a = parse_points(points)?;
    s.validate_for(a.n())?;
    let res = solve_in(&a, m, s, opts)?;
    let probe = uniqueness_probe_in(&a, m, s, opts.starts, opts.seed, opts)?;
    if let (Some(dir), Some(trace)) = (dump_dir, res.trace.as_ref()) {
        let mut csv = String::from("iteration,objective\n");
        for (k, f) in trace {
            csv.push_str(&format!("{k},{f:.17e}\n"));
        }
        write_dumps(dir, &[("circumcenter_trace.csv".into(), csv)])?;
    }
    let pass = res.converged;
    let code = if pass { EXIT_PASS } else { EXIT_NOT_CONVERGED };
    let config = json!({"metric": m, "subspace": s, "points": a.len(), "n": a.n(), "solver": opts});
    let results = json!({"result": res, "dispersion": probe.dispersion, "dispersion_tolerance": DISPERSION_TOL, "probe_radii": probe.radii});
    let summary = format!(
        "circumcenter ({m}, {s}): radius {:.12}, {} after {} iterations, dispersion {:.3e}{}\n",
        res.radius,
        if res.converged { "converged" } else { "NOT converged" },
        res.iterations,
        probe.dispersion,
        if res.boundary_warning { ", radius at the uniqueness boundary" } else { "" }
    );
    Ok((ReportEnvelope::new("circumcenter", config, opts.seed, results, pass), code, summary))
}

pub fn cmd_rigidity(file: &str, u0: Option<&str>, eps: Option<f64>, scan: usize, opts: &SolverOptions) -> Reply {
    let pair = RepresentationPair::from_json(&read_input(file)?)?;
    let n = pair.n();
    let u0 = match u0 {
        Some(arg) => parse_matrix(arg)?,
        None => match pair.subspace {
            SubspaceSpec::GrassmannSymmetries(m) => symmetry_embed(&ProjectionMatrix::coordinate(n, m))?,
            _ => UnitaryMatrix::identity(n),
        },
    };
    if u0.n() != n {
        return Err(Error::DimensionMismatch(n, u0.n()));
    }
    let outcome = decide_equivalence(&pair, &u0, eps, opts)?;
    let bound = if scan > 0 { Some(scan_orbit_radius(&pair, scan, opts.seed, opts)?) } else { None };
    let (code, summary) = match &outcome {
        RigidityOutcome::Certified(c) => (EXIT_PASS, format!("rigidity: CERTIFIED, residual {:.3e}, orbit radius {:.12}\n", c.residual, c.orbit_radius)),
        RigidityOutcome::Inconclusive { orbit_radius, bound } => {
            (EXIT_FAIL, format!("rigidity: INCONCLUSIVE, orbit radius {orbit_radius:.12} is not below {bound:.12}; equivalence is neither shown nor refuted\n"))
        }
    };
    let config = json!({"group_order": pair.group.order(), "n": n, "subspace": pair.subspace, "eps": eps, "scan": scan, "solver": opts});
    let results = json!({"outcome": outcome, "radius_upper_bound": bound});
    Ok((ReportEnvelope::new("rigidity", config, opts.seed, results, code == EXIT_PASS), code, summary))
}
