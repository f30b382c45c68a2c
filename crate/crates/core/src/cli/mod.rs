//! Command-line front end.
//!
//! Data goes to `--out` (or standard output), diagnostics to standard
//! error. Exit status is 0 on success, 1 for usage, domain and
//! precondition errors, 2 for numerical failures.

pub mod config;

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use crate::applications::{build_named, BuiltModel, MODELS};
use crate::degree::{locate_zeros, winding_number, Contour};
use crate::dispersion::{generalized_multiplicity, sample_branches, SpectralBranch};
use crate::error::{Error, Result};
use crate::model::validate_model;
use crate::monodromy::{floquet_exponents, homotopy_evans, homotopy_evans_with_derivative, principal_matrix};
use crate::ode::Tolerances;
use crate::perturbation::{stability_verdict, trace_curve, VerdictOptions};
use crate::report::{branches_svg, branches_to_csv, orbit_to_csv, CountEntry, JsonReport, Witness};

use config::{parse_complex, parse_f64, parse_list, parse_range, parse_window, Config, Range};

#[derive(Debug, Parser)]
#[command(name = "floquet", version, about = "Floquet spectra of periodic waves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Limiting dispersion curves as CSV (and optionally SVG).
    Curves {
        #[command(flatten)]
        model: ModelArgs,
        /// Bloch grid lo:hi:count.
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Generalized algebraic multiplicity of a limiting spectral point.
    Mga {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// μ window lo:hi.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Periodic Evans function and Floquet data at one (λ, μ).
    Evans {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        /// Homotopy parameter in [0, 1].
        #[arg(long)]
        s: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Count and locate Evans zeros inside a disk.
    Zeros {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        center: Option<String>,
        #[arg(long)]
        radius: Option<String>,
        /// Homotopy parameters, comma separated; zeros are located at the last.
        #[arg(long)]
        s: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Continue a limiting branch to the perturbed operator.
    Trace {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        branch: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Search for unstable spectrum and report a verdict.
    Verdict {
        #[command(flatten)]
        model: ModelArgs,
        /// μ window lo:hi, repeatable; defaults to one Bloch period.
        #[arg(long, allow_hyphen_values = true)]
        window: Vec<String>,
        #[arg(long)]
        margin: Option<f64>,
        /// Grid points per window.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        candidates: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Periodic orbit behind an orbit-based model.
    Orbit {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Periodicity and convergence checks of the coefficient model.
    Validate {
        #[command(flatten)]
        model: ModelArgs,
        /// Decreasing ε values, comma separated.
        #[arg(long)]
        eps_seq: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Built-in model name or path to a config file.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long)]
    pub varpi0: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub htilde: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a0: Option<f64>,
    /// Integration tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Record wall-clock time in JSON reports.
    #[arg(long)]
    pub timing: bool,
}

const DEFAULT_TOL: f64 = 1e-10;

struct Session {
    cfg: Config,
    built: BuiltModel,
    tol: f64,
    output: OutputArgs,
    started: Instant,
}

impl Session {
    fn open(model: &ModelArgs, output: &OutputArgs) -> Result<Session> {
        let mut model = model.clone();
        if let Some(m) = &model.model {
            if !MODELS.contains(&m.as_str()) {
                if model.config.is_some() {
                    return Err(Error::domain(format!("unknown model '{m}'")));
                }
                if !Path::new(m).is_file() {
                    return Err(Error::domain(format!("'{m}' is neither a built-in model ({}) nor a config file", MODELS.join(", "))));
                }
                model.config = Some(PathBuf::from(m));
                model.model = None;
            }
        }
        let cfg = match &model.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        let tol = pick(model.tol, cfg.f64("tol")?).unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0) {
            return Err(Error::domain(format!("tol must be positive, got {tol}")));
        }
        let mut output = output.clone();
        if output.out.is_none() {
            output.out = cfg.str("out").map(PathBuf::from);
        }
        if output.svg.is_none() {
            output.svg = cfg.str("svg").map(PathBuf::from);
        }
        let built = build(&model, &cfg)?;
        Ok(Session { cfg, built, tol, output, started: Instant::now() })
    }

    fn report(&self, command: &str) -> JsonReport {
        let mut r = JsonReport::new(command, &self.built.model.name, &self.built.model.params);
        r.tolerances.insert("tol".into(), self.tol);
        r
    }

    fn finish(&self, mut r: JsonReport) -> Result<()> {
        if self.output.timing {
            r.runtime_ms = Some(self.started.elapsed().as_secs_f64() * 1e3);
        }
        emit(self.output.out.as_deref(), &r.to_json())
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances::from_tol(self.tol)
    }
}

fn pick<T>(flag: Option<T>, cfg: Option<T>) -> Option<T> {
    flag.or(cfg)
}

fn require<T>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| Error::domain(format!("missing {what}")))
}

fn flag_or<T>(flag: &Option<String>, parse: impl Fn(&str) -> Result<T>, from_cfg: Result<Option<T>>) -> Result<Option<T>> {
    match flag {
        Some(s) => parse(s).map(Some),
        None => from_cfg,
    }
}

fn build(args: &ModelArgs, cfg: &Config) -> Result<BuiltModel> {
    let name = args
        .model
        .clone()
        .or_else(|| cfg.str("name").map(str::to_string))
        .ok_or_else(|| Error::domain("no model given; use --model or a config with [model] name"))?;
    let params = [
        ("omega", pick(args.omega, cfg.f64("omega")?)),
        ("p1", pick(args.p1, cfg.f64("p1")?)),
        ("delta", pick(args.delta, cfg.f64("delta")?)),
        ("c0", pick(args.c0, cfg.f64("c0")?)),
        ("varpi0", pick(args.varpi0, cfg.f64("varpi0")?)),
        ("eps", pick(args.eps, cfg.f64("eps")?)),
        ("htilde", pick(args.htilde, cfg.f64("htilde")?)),
        ("a0", pick(args.a0, cfg.f64("a0")?)),
    ];
    let given: Vec<(&str, f64)> = params.iter().filter_map(|(k, v)| v.map(|v| (*k, v))).collect();
    build_named(&name, &given)
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::domain(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Error::domain(format!("stdout: {e}")))
        }
    }
}

fn emit_svg(session: &Session, branches: &[SpectralBranch], title: &str) -> Result<()> {
    if let Some(p) = &session.output.svg {
        emit(Some(p), &branches_svg(branches, title))?;
    }
    Ok(())
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn curves(s: &Session, mu: &Option<String>) -> Result<()> {
    let r = flag_or(mu, parse_range, s.cfg.range("mu"))?.unwrap_or(Range { lo: -2.0, hi: 2.0, count: 201 });
    let branches = sample_branches(&s.built.model, r.lo, r.hi, r.count)?;
    emit(s.output.out.as_deref(), &branches_to_csv(&branches)?)?;
    emit_svg(s, &branches, &format!("{} limiting spectral curves", s.built.model.name))
}

fn mga(s: &Session, lambda: &Option<String>, window: &Option<String>) -> Result<()> {
    let lambda0 = require(flag_or(lambda, parse_complex, s.cfg.complex("lambda"))?, "--lambda")?;
    let window = flag_or(window, parse_window, s.cfg.window("window"))?.unwrap_or((-10.0, 10.0));
    let rep = generalized_multiplicity(&s.built.model, lambda0, window, s.tol.max(1e-12))?;
    let mut r = s.report("mga");
    r.result = json!({
        "lambda0": pair(rep.lambda0),
        "window": [window.0, window.1],
        "mu_roots": rep.mu_roots.iter().map(|(mu, k)| json!({"mu": mu, "order": k})).collect::<Vec<_>>(),
        "m_ga": rep.m_ga,
        "flat_branch": rep.flat_branch,
    });
    s.finish(r)
}

fn parse_s(text: &str) -> Result<f64> {
    let v = parse_f64(text)?;
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::domain(format!("homotopy parameter {v} outside [0, 1]")));
    }
    Ok(v)
}

fn evans_cmd(s: &Session, lambda: &Option<String>, mu: &Option<String>, hs: &Option<String>) -> Result<()> {
    let lambda = require(flag_or(lambda, parse_complex, s.cfg.complex("lambda"))?, "--lambda")?;
    let mu = flag_or(mu, parse_f64, s.cfg.f64("mu"))?.unwrap_or(0.0);
    let hs = flag_or(hs, parse_s, s.cfg.f64("s"))?.unwrap_or(1.0);
    let (model, eps, t) = (&s.built.model, s.built.eps, s.tolerances());
    let value = homotopy_evans(model, hs, lambda, mu, eps, t)?;
    let mono = principal_matrix(model, hs, lambda, mu, eps, t)?;
    let exponents = floquet_exponents(&mono)?;
    let mut r = s.report("evans");
    r.result = json!({
        "lambda": pair(lambda),
        "mu": mu,
        "s": hs,
        "eps": eps,
        "evans": pair(value),
        "modulus": value.norm(),
        "period": mono.period,
        "multipliers": mono.multipliers.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
        "exponents": exponents.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
        "steps": mono.integrator_stats.steps,
        "rejections": mono.integrator_stats.rejections,
    });
    s.finish(r)
}

fn zeros_cmd(s: &Session, mu: &Option<String>, center: &Option<String>, radius: &Option<String>, hs: &Option<String>) -> Result<()> {
    let mu = flag_or(mu, parse_f64, s.cfg.f64("mu"))?.unwrap_or(0.0);
    let center = require(flag_or(center, parse_complex, s.cfg.complex("center"))?, "--center")?;
    let radius = flag_or(radius, parse_f64, s.cfg.f64("radius"))?.unwrap_or(0.5);
    let s_grid = match hs {
        Some(text) => parse_list(text)?,
        None => s.cfg.list("s")?.unwrap_or_else(|| vec![1.0]),
    };
    if s_grid.is_empty() || s_grid.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::domain("homotopy parameters must lie in [0, 1]"));
    }
    let contour = Contour::circle(center, radius)?;
    let (model, eps, t) = (&s.built.model, s.built.eps, s.tolerances());
    let mut counts = Vec::new();
    let mut failures = Vec::new();
    for &h in &s_grid {
        match winding_number(|z| homotopy_evans(model, h, z, mu, eps, t), &contour) {
            Ok(rep) => counts.push(CountEntry { s: h, count: Some(rep.count) }),
            Err(e) => {
                eprintln!("warning: s = {h}: {e}");
                failures.push(json!({"s": h, "error": e.to_string()}));
                counts.push(CountEntry { s: h, count: None });
            }
        }
    }
    let last = *s_grid.last().expect("non-empty");
    let mut df = |z| homotopy_evans_with_derivative(model, last, z, mu, eps, t).map(|p| p.1);
    let zeros = locate_zeros(|z| homotopy_evans(model, last, z, mu, eps, t), Some(&mut df), &contour, (0.1 * s.tol.sqrt()).max(1e-10));
    let mut r = s.report("zeros");
    r.counts = counts;
    let located = match &zeros {
        Ok(zs) => zs.iter().map(|z| json!({"re": z.lambda.re, "im": z.lambda.im, "multiplicity": z.multiplicity})).collect(),
        Err(_) => Vec::new(),
    };
    r.result = json!({
        "mu": mu,
        "eps": eps,
        "center": pair(center),
        "radius": radius,
        "s": last,
        "zeros": located,
        "failures": failures,
    });
    s.finish(r)?;
    zeros.map(|_| ())
}

fn trace_cmd(s: &Session, branch: Option<usize>, mu: &Option<String>) -> Result<()> {
    let r = require(flag_or(mu, parse_range, s.cfg.range("mu"))?, "--mu lo:hi:count")?;
    let id = pick(branch, s.cfg.usize("branch")?).unwrap_or(1);
    let model = &s.built.model;
    let branches = sample_branches(model, r.lo, r.hi, r.count)?;
    let lim = branches
        .iter()
        .find(|b| b.branch_id == id)
        .ok_or_else(|| Error::domain(format!("branch {id} does not exist (model has {})", branches.len())))?;
    let traced = trace_curve(model, lim, (r.lo, r.hi), s.built.eps, s.tol)?;
    let both = vec![lim.clone(), traced];
    emit(s.output.out.as_deref(), &branches_to_csv(&both)?)?;
    emit_svg(s, &both, &format!("{} branch {id}, limiting and perturbed", model.name))
}

fn verdict_cmd(s: &Session, windows: &[String], margin: Option<f64>, grid: Option<usize>, candidates: Option<usize>) -> Result<()> {
    let mut ws = windows.iter().map(|w| parse_window(w)).collect::<Result<Vec<_>>>()?;
    if ws.is_empty() {
        match s.cfg.window("window")? {
            Some(w) => ws.push(w),
            None => ws.push((0.0, 2.0 * PI / s.built.period()?)),
        }
    }
    let d = VerdictOptions::default();
    let opts = VerdictOptions {
        margin: pick(margin, s.cfg.f64("margin")?).unwrap_or(d.margin),
        tol: s.tol,
        grid: pick(grid, s.cfg.usize("grid")?).unwrap_or(d.grid),
        max_candidates: pick(candidates, s.cfg.usize("candidates")?).unwrap_or(d.max_candidates),
    };
    let v = stability_verdict(&s.built.model, s.built.eps, &ws, opts)?;
    let mut r = s.report("verdict");
    r.tolerances.insert("margin".into(), opts.margin);
    r.verdict = Some(v.verdict);
    r.witness = v.witness.as_ref().map(Witness::from);
    r.result = json!({
        "eps": s.built.eps,
        "windows": ws.iter().map(|w| [w.0, w.1]).collect::<Vec<_>>(),
        "witness_detail": v.witness,
        "search_log": v.search_log,
    });
    s.finish(r)
}

fn orbit_cmd(s: &Session) -> Result<()> {
    let orbit = s
        .built
        .orbit()?
        .ok_or_else(|| Error::domain(format!("model {} has no periodic orbit at eps = {}", s.built.model.name, s.built.eps)))?;
    if let Some(p) = &s.output.out {
        emit(Some(p), &orbit_to_csv(&orbit.samples))?;
    }
    let first = orbit.samples.first().expect("samples").1;
    let last = orbit.samples.last().expect("samples").1;
    let mut r = s.report("orbit");
    r.result = json!({
        "period": orbit.period,
        "energy": orbit.energy,
        "amplitude": orbit.amplitude,
        "closure": (first[0] - last[0]).hypot(first[1] - last[1]),
        "samples": orbit.samples.len(),
    });
    if s.output.timing {
        r.runtime_ms = Some(s.started.elapsed().as_secs_f64() * 1e3);
    }
    emit(None, &r.to_json())
}

fn validate_cmd(s: &Session, eps_seq: &Option<String>) -> Result<()> {
    let seq = match eps_seq {
        Some(t) => parse_list(t)?,
        None => {
            let e = s.built.eps;
            if !(e > 0.0) {
                return Err(Error::domain("eps is zero; give --eps-seq"));
            }
            vec![e, e / 2.0, e / 4.0]
        }
    };
    let rep = validate_model(&s.built.model, &seq);
    let ok = rep.ok();
    let mut r = s.report("validate");
    r.result = serde_json::to_value(&rep).expect("report serializes");
    s.finish(r)?;
    if ok {
        Ok(())
    } else {
        Err(Error::Consistency(rep.violations.join("; ")))
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Curves { model, mu, output } => curves(&Session::open(&model, &output)?, &mu),
        Command::Mga { model, lambda, window, output } => mga(&Session::open(&model, &output)?, &lambda, &window),
        Command::Evans { model, lambda, mu, s, output } => evans_cmd(&Session::open(&model, &output)?, &lambda, &mu, &s),
        Command::Zeros { model, mu, center, radius, s, output } => {
            zeros_cmd(&Session::open(&model, &output)?, &mu, &center, &radius, &s)
        }
        Command::Trace { model, branch, mu, output } => trace_cmd(&Session::open(&model, &output)?, branch, &mu),
        Command::Verdict { model, window, margin, grid, candidates, output } => {
            verdict_cmd(&Session::open(&model, &output)?, &window, margin, grid, candidates)
        }
        Command::Orbit { model, output } => orbit_cmd(&Session::open(&model, &output)?),
        Command::Validate { model, eps_seq, output } => validate_cmd(&Session::open(&model, &output)?, &eps_seq),
    }
}

/// Run one command; `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// [`run`] on a dedicated pool of `threads` workers (0 = one per core).
#[cfg(feature = "parallel")]
pub fn run_with_threads<I, T>(argv: I, threads: usize) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| run(args)),
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            2
        }
    }
}
