//! One command-line invocation: what to compute, from which source, and
//! where to write it.
//!
//! Exit codes: 0 on success, 1 when a `check` fails, 2 on any input error.

use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use crate::classify::{classify, ClassificationReport, ClassifyInput, PROFILE_TOL, SAMPLES_TOL};
use crate::constructions::{
    check_darboux_geodesic, check_developable, check_developable_numeric, check_involute_evolute,
    default_tol_k, reciprocal_darboux_check, ruled_surface, Director, Indicatrix,
};
use crate::discrete::{estimate_curvature_torsion, IntrinsicSamples};
use crate::error::{Error, Result};
use crate::frenet::{integrate_frenet, FrenetState, SampledCurve, DEFAULT_STEPS};
use crate::io;
use crate::profiles::ProfilePair;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

/// Default tolerance for symbolic theorem checks.
pub const CHECK_TOL: f64 = 1e-9;
pub const DEFAULT_V_RANGE: (f64, f64) = (-0.5, 0.5);
pub const DEFAULT_RULINGS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Generate,
    Estimate,
    Classify,
    Check,
    Surface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckName {
    Darboux,
    Reciprocal,
    Involute,
    Developable,
}

/// Director coefficients plus the normal offset `λ` (0 when omitted).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coeffs {
    pub director: Director,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobSpec {
    pub command: Command,
    pub profile: Option<PathBuf>,
    pub inputs: Vec<PathBuf>,
    /// Stdout when absent, except for `surface`, which needs a file.
    pub output: Option<PathBuf>,
    pub tol: Option<f64>,
    pub step: Option<f64>,
    pub check: Option<CheckName>,
    pub coeffs: Option<Coeffs>,
    pub indicatrix: Indicatrix,
    pub v_range: Option<(f64, f64)>,
    pub grid: Option<(usize, usize)>,
    /// Prefix for `generate` plot series: `<prefix>.xyz.csv` and `<prefix>.intrinsics.csv`.
    pub plot: Option<PathBuf>,
    pub jobs: usize,
}

impl JobSpec {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            profile: None,
            inputs: Vec::new(),
            output: None,
            tol: None,
            step: None,
            check: None,
            coeffs: None,
            indicatrix: Indicatrix::Tangent,
            v_range: None,
            grid: None,
            plot: None,
            jobs: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Domain(format!("--tol must be positive, got {t}")));
            }
        }
        if let Some(h) = self.step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Domain(format!("--step must be positive, got {h}")));
            }
        }
        if self.jobs == 0 {
            return Err(Error::Domain("--jobs must be at least 1".into()));
        }
        if self.profile.is_some() && !self.inputs.is_empty() {
            return Err(Error::Domain("give either --profile or --input, not both".into()));
        }
        if self.inputs.len() > 1 && self.command != Command::Classify {
            return Err(Error::Domain("several inputs are only accepted by classify".into()));
        }
        Ok(())
    }
}

/// Parses `a,b,c,d` or `a,b,c,d,lambda`.
pub fn parse_coeffs(text: &str) -> std::result::Result<Coeffs, String> {
    let v = parse_floats(text)?;
    match v.as_slice() {
        [a, b, c, d] => Ok(Coeffs { director: Director::new(*a, *b, *c, *d), lambda: 0.0 }),
        [a, b, c, d, l] => Ok(Coeffs { director: Director::new(*a, *b, *c, *d), lambda: *l }),
        _ => Err(format!("expected a,b,c,d[,lambda], got {} values", v.len())),
    }
}

/// Parses `lo,hi` with `lo ≤ hi`.
pub fn parse_range(text: &str) -> std::result::Result<(f64, f64), String> {
    match parse_floats(text)?.as_slice() {
        [lo, hi] if lo <= hi => Ok((*lo, *hi)),
        [lo, hi] => Err(format!("empty range {lo},{hi}")),
        v => Err(format!("expected lo,hi, got {} values", v.len())),
    }
}

/// Parses `ns,nv`, both at least 2.
pub fn parse_grid(text: &str) -> std::result::Result<(usize, usize), String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [ns, nv] = parts.as_slice() else {
        return Err(format!("expected ns,nv, got {text:?}"));
    };
    let parse = |x: &str| x.parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    let (ns, nv) = (parse(ns)?, parse(nv)?);
    if ns < 2 || nv < 2 {
        return Err(format!("grid needs at least 2×2 samples, got {ns}×{nv}"));
    }
    Ok((ns, nv))
}

fn parse_floats(text: &str) -> std::result::Result<Vec<f64>, String> {
    text.split(',')
        .map(|x| {
            let x = x.trim();
            x.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("not a finite number: {x:?}"))
        })
        .collect()
}

/// Success or a failed theorem check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    CheckFailed,
}

/// Runs the job and maps the outcome to an exit code, printing a one-line
/// diagnostic to stderr on error.
pub fn run(job: &JobSpec) -> i32 {
    match execute(job) {
        Ok(Status::Success) => EXIT_OK,
        Ok(Status::CheckFailed) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            EXIT_INPUT_ERROR
        }
    }
}

pub fn execute(job: &JobSpec) -> Result<Status> {
    job.validate()?;
    match job.command {
        Command::Generate => generate(job),
        Command::Estimate => estimate(job),
        Command::Classify => classify_cmd(job),
        Command::Check => check(job),
        Command::Surface => surface(job),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn load_profile(job: &JobSpec) -> Result<Option<ProfilePair>> {
    match &job.profile {
        Some(p) => with_path(p, io::parse_profile_spec(&read_text(p)?)).map(Some),
        None => Ok(None),
    }
}

fn require_profile(job: &JobSpec) -> Result<ProfilePair> {
    load_profile(job)?.ok_or_else(|| Error::Domain("--profile is required".into()))
}

fn single_input(job: &JobSpec) -> Result<&Path> {
    job.inputs
        .first()
        .map(PathBuf::as_path)
        .ok_or_else(|| Error::Domain("--profile or --input is required".into()))
}

fn open(path: &Path) -> Result<BufReader<fs::File>> {
    fs::File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_curve(path: &Path) -> Result<SampledCurve> {
    with_path(path, io::read_curve_csv(open(path)?))
}

fn integrate(pp: &ProfilePair, step: Option<f64>) -> Result<SampledCurve> {
    let step = step.unwrap_or(pp.span() / DEFAULT_STEPS as f64);
    integrate_frenet(pp, step, &FrenetState::canonical(pp.s_min()))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn generate(job: &JobSpec) -> Result<Status> {
    let pp = require_profile(job)?;
    let curve = integrate(&pp, job.step)?;
    if let Some(prefix) = &job.plot {
        emit(Some(&with_suffix(prefix, ".xyz.csv")), &io::xyz_csv(&curve))?;
        let rows = curve
            .s()
            .iter()
            .map(|&s| {
                Ok(crate::discrete::IntrinsicRow { s, kappa: pp.kappa_at(s)?, tau: pp.tau_at(s)? })
            })
            .collect::<Result<Vec<_>>>()?;
        let samples = IntrinsicSamples::new(rows)?;
        emit(Some(&with_suffix(prefix, ".intrinsics.csv")), &io::intrinsics_csv(&samples))?;
    }
    emit(job.output.as_deref(), &io::curve_csv(&curve))?;
    Ok(Status::Success)
}

fn source_curve(job: &JobSpec) -> Result<SampledCurve> {
    match load_profile(job)? {
        Some(pp) => integrate(&pp, job.step),
        None => read_curve(single_input(job)?),
    }
}

fn estimate(job: &JobSpec) -> Result<Status> {
    let curve = source_curve(job)?;
    let samples = estimate_curvature_torsion(&curve)?;
    emit(job.output.as_deref(), &io::intrinsics_csv(&samples))?;
    Ok(Status::Success)
}

/// Classifies CSV text: intrinsics are used as given, curves are estimated
/// first. `tol` defaults to the samples tolerance.
pub fn classify_csv(text: &str, tol: Option<f64>) -> Result<ClassificationReport> {
    let header = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let samples = match io::table_kind(header) {
        Some(io::TableKind::Intrinsics) => io::read_intrinsics_csv(text.as_bytes())?,
        _ => estimate_curvature_torsion(&io::read_curve_csv(text.as_bytes())?)?,
    };
    classify(ClassifyInput::Samples(&samples), tol.unwrap_or(SAMPLES_TOL))
}

fn classify_file(path: &Path, tol: Option<f64>) -> Result<ClassificationReport> {
    with_path(path, classify_csv(&read_text(path)?, tol))
}

fn classify_cmd(job: &JobSpec) -> Result<Status> {
    if let Some(pp) = load_profile(job)? {
        let report = classify(ClassifyInput::Profile(&pp), job.tol.unwrap_or(PROFILE_TOL))?;
        emit(job.output.as_deref(), &io::report_json(&report))?;
        return Ok(Status::Success);
    }
    match job.inputs.len() {
        0 => Err(Error::Domain("--profile or --input is required".into())),
        1 => {
            let report = classify_file(&job.inputs[0], job.tol)?;
            emit(job.output.as_deref(), &io::report_json(&report))?;
            Ok(Status::Success)
        }
        _ => classify_batch(job),
    }
}

/// Several inputs, one `<stem>.json` report each in the output directory.
/// Files are independent; `jobs` worker threads take them round-robin.
fn classify_batch(job: &JobSpec) -> Result<Status> {
    let dir = job
        .output
        .as_deref()
        .ok_or_else(|| Error::Domain("classify with several inputs needs --output <dir>".into()))?;
    let mut targets = Vec::with_capacity(job.inputs.len());
    for input in &job.inputs {
        let stem = input
            .file_stem()
            .ok_or_else(|| Error::Domain(format!("{}: no file name", input.display())))?;
        let target = dir.join(Path::new(stem).with_extension("json"));
        if targets.contains(&target) {
            return Err(Error::Domain(format!("two inputs map to {}", target.display())));
        }
        targets.push(target);
    }
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;

    let workers = job.jobs.min(job.inputs.len());
    let mut results: Vec<Option<Result<()>>> = vec![None; job.inputs.len()];
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let (inputs, targets) = (&job.inputs, &targets);
                scope.spawn(move || {
                    (w..inputs.len())
                        .step_by(workers)
                        .map(|i| {
                            let r = classify_file(&inputs[i], job.tol)
                                .and_then(|rep| emit(Some(&targets[i]), &io::report_json(&rep)));
                            (i, r)
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("classify worker panicked") {
                results[i] = Some(r);
            }
        }
    });

    let mut first_error = None;
    for (input, r) in job.inputs.iter().zip(results) {
        if let Some(Err(e)) = r {
            let e = Error::Domain(format!("{}: {e}", input.display()));
            if first_error.is_none() {
                first_error = Some(e);
            } else {
                eprintln!("error: {e}");
            }
        }
    }
    match first_error {
        Some(e) => Err(e),
        None => Ok(Status::Success),
    }
}

fn require_coeffs(job: &JobSpec) -> Result<Coeffs> {
    job.coeffs
        .ok_or_else(|| Error::Domain("--coeffs a,b,c,d[,lambda] is required".into()))
}

fn check(job: &JobSpec) -> Result<Status> {
    let name = job
        .check
        .ok_or_else(|| Error::Domain("--check <darboux|reciprocal|involute|developable> is required".into()))?;
    let pp = require_profile(job)?;
    let tol = job.tol.unwrap_or(CHECK_TOL);
    let report = match name {
        CheckName::Darboux => check_darboux_geodesic(&pp, tol)?,
        CheckName::Reciprocal => reciprocal_darboux_check(&pp, tol)?,
        CheckName::Involute => check_involute_evolute(&pp, require_coeffs(job)?.director, tol, job.indicatrix)?,
        CheckName::Developable => check_developable(&pp, require_coeffs(job)?.director, tol)?,
    };
    emit(job.output.as_deref(), &io::check_report_json(&report))?;
    Ok(if report.passed { Status::Success } else { Status::CheckFailed })
}

/// OBJ at `--output`, numeric developability report next to it as `.json`.
/// The check result is informational here and does not change the exit code.
fn surface(job: &JobSpec) -> Result<Status> {
    let out = job
        .output
        .as_deref()
        .ok_or_else(|| Error::Domain("surface needs --output <file.obj>".into()))?;
    let dir = require_coeffs(job)?.director;
    let pp = load_profile(job)?;
    let curve = match (&pp, job.grid) {
        (Some(pp), Some((ns, _))) if job.step.is_none() => integrate(pp, Some(pp.span() / (ns - 1) as f64))?,
        (Some(pp), _) => integrate(pp, job.step)?,
        (None, grid) => {
            let c = read_curve(single_input(job)?)?;
            if let Some((ns, _)) = grid {
                if ns != c.len() {
                    return Err(Error::Domain(format!(
                        "--grid asks for {ns} samples along s but the input has {}",
                        c.len()
                    )));
                }
            }
            c
        }
    };
    let (v_min, v_max) = job.v_range.unwrap_or(DEFAULT_V_RANGE);
    let n_v = job.grid.map_or(DEFAULT_RULINGS, |g| g.1);
    let patch = ruled_surface(&curve, dir, v_min, v_max, n_v)?;
    let mut report = check_developable_numeric(&patch, job.tol.unwrap_or_else(|| default_tol_k(&patch)))?;
    if let Some(pp) = &pp {
        let symbolic = check_developable(pp, dir, CHECK_TOL)?;
        report.notes.push(format!(
            "symbolic determinant: max |det(T, X, X′)| = {:e} ({} at tol {:e})",
            symbolic.max_violation,
            if symbolic.passed { "developable" } else { "not developable" },
            symbolic.tol
        ));
    }
    emit(Some(out), &io::obj(&patch))?;
    emit(Some(&out.with_extension("json")), &io::check_report_json(&report))?;
    Ok(Status::Success)
}
