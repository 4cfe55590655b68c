//! Command-line driver: `verify`, `angles` and `ode` subcommands writing
//! JSON reports (and a profile CSV for `ode`).

pub mod report;
pub mod sampling;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{
    cartan_tube, parallel_hypersurface, product_spheres, round_sphere, HypersurfaceChart, CARTAN_DEFAULT_RADIUS,
};
use crate::error::Error;
use crate::gauss::{angle_spectrum, gauss_map};
use crate::numeric::DEFAULT_STEP;
use crate::rotational::{
    build_rotational_chart, integrate_alpha, ode_report, order_test, profile_curve, rotational_report, RotationalChart,
    Trajectory,
};
use crate::verify::{classify_by_angles, verify_point, Expectations, GaugeChoice, ResidualReport, Tolerances};
use report::{summarize, to_json, CheckRow, PointResult, Summary};

pub const OUT_DIR_ENV: &str = "QUADRICLAB_OUT_DIR";

pub const EXIT_PASS: u8 = 0;
pub const EXIT_CHECK_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

pub const EXAMPLES: [&str; 4] = ["sphere", "product", "cartan", "rotational"];

#[derive(Parser, Debug)]
#[command(
    name = "quadriclab",
    version,
    about = "Verify Gauss maps of sphere hypersurfaces as Lagrangians in the complex quadric"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run every applicable structure check at sample points.
    Verify(RunArgs),
    /// Print angle functions per sample and the number of distinct angles.
    Angles(RunArgs),
    /// Integrate the profile equation, build the rotational hypersurface and check it.
    Ode(RunArgs),
}

#[derive(Args, Clone, Debug)]
pub struct RunArgs {
    /// sphere, product, cartan or rotational.
    #[arg(long, default_value = "sphere")]
    pub example: String,
    #[arg(long)]
    pub n: Option<usize>,
    /// Sphere radius, or Cartan tube radius.
    #[arg(long)]
    pub r: Option<f64>,
    /// First factor radius of a product; the second is sqrt(1 - r1^2).
    #[arg(long)]
    pub r1: Option<f64>,
    /// Dimension of the first product factor.
    #[arg(long)]
    pub k: Option<usize>,
    /// Parallel offset applied to the example.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub dalpha0: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// End of the profile parameter range, which starts at 0.
    #[arg(long, allow_hyphen_values = true)]
    pub span: Option<f64>,
    /// Samples per chart dimension.
    #[arg(long, default_value_t = 2)]
    pub grid: usize,
    #[arg(long, default_value_t = DEFAULT_STEP)]
    pub h: f64,
    /// canonical, normalized, or a fixed angle phi.
    #[arg(long, default_value = "normalized")]
    pub gauge: String,
    /// Tolerance override, `name=value`; repeatable.
    #[arg(long = "tol", value_parser = parse_tol)]
    pub tol: Vec<(String, f64)>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report path; defaults to `$QUADRICLAB_OUT_DIR/<command>-<example>.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got {s}"))?;
    let v: f64 = v.parse().map_err(|e| format!("bad tolerance {v}: {e}"))?;
    if !(v >= 0.0) {
        return Err(format!("tolerance must be non-negative, got {v}"));
    }
    Ok((k.to_string(), v))
}

/// Resolved configuration, echoed into every report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub example: String,
    pub n: usize,
    pub params: BTreeMap<String, f64>,
    pub grid: usize,
    pub h: f64,
    pub gauge: String,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
}

/// Rejected input; maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(e: impl std::fmt::Display) -> anyhow::Error {
    anyhow::Error::new(UsageError(e.to_string()))
}

impl RunConfig {
    pub fn from_args(command: &str, a: &RunArgs) -> anyhow::Result<Self> {
        if !EXAMPLES.contains(&a.example.as_str()) {
            return Err(usage(format!(
                "unknown example `{}`; expected one of {}",
                a.example,
                EXAMPLES.join(", ")
            )));
        }
        if a.grid < 1 {
            return Err(usage("grid must be at least 1"));
        }
        if !(a.h > 1e-7 && a.h < 1e-2) {
            return Err(usage(format!("h must lie in (1e-7, 1e-2), got {}", a.h)));
        }
        parse_gauge(&a.gauge).map_err(usage)?;
        let n = a.n.unwrap_or(3);
        let mut params = BTreeMap::new();
        let mut put = |k: &str, v: Option<f64>, d: f64| {
            params.insert(k.to_string(), v.unwrap_or(d));
        };
        match a.example.as_str() {
            "sphere" => put("r", a.r, std::f64::consts::FRAC_1_SQRT_2),
            "product" => {
                put("r1", a.r1, std::f64::consts::FRAC_1_SQRT_2);
                put("k", a.k.map(|k| k as f64), 1.0);
            }
            "cartan" => put("r", a.r, CARTAN_DEFAULT_RADIUS),
            _ => {
                put("alpha0", a.alpha0, std::f64::consts::PI / 12.0);
                put("dalpha0", a.dalpha0, 0.0);
                put("span", a.span, 0.8);
                put("steps", a.steps.map(|s| s as f64), 4000.0);
            }
        }
        if a.example != "rotational" {
            put("t", a.t, 0.0);
        }
        Ok(RunConfig {
            command: command.to_string(),
            example: a.example.clone(),
            n,
            params,
            grid: a.grid,
            h: a.h,
            gauge: a.gauge.clone(),
            tolerances: a.tol.iter().cloned().collect(),
            seed: a.seed,
        })
    }

    fn param(&self, k: &str) -> f64 {
        self.params[k]
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            overrides: self.tolerances.clone(),
            ..Tolerances::default()
        }
    }

    pub fn gauge_choice(&self) -> GaugeChoice {
        parse_gauge(&self.gauge).expect("validated")
    }
}

/// Resolves a configuration from subcommand arguments, as on the command line.
pub fn config_from_argv(command: &str, args: &[&str]) -> anyhow::Result<RunConfig> {
    let argv = ["quadriclab", command].into_iter().chain(args.iter().copied());
    let a = match Cli::try_parse_from(argv).map_err(usage)?.command {
        Command::Verify(a) | Command::Angles(a) => a,
        Command::Ode(mut a) => {
            a.example = "rotational".into();
            a
        }
    };
    RunConfig::from_args(command, &a)
}

fn parse_gauge(s: &str) -> Result<GaugeChoice, String> {
    match s {
        "canonical" => Ok(GaugeChoice::CANONICAL),
        "normalized" => Ok(GaugeChoice::Normalized),
        _ => s
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(GaugeChoice::Fixed)
            .ok_or_else(|| format!("gauge must be canonical, normalized or a number, got {s}")),
    }
}

/// A catalog chart with what it is known to satisfy, or a rotational build.
pub enum Example {
    Chart(HypersurfaceChart, Expectations),
    Rotational(Trajectory, RotationalChart),
}

pub fn build_example(cfg: &RunConfig) -> anyhow::Result<Example> {
    let n = cfg.n;
    let base = match cfg.example.as_str() {
        "sphere" => {
            let c = round_sphere(n, cfg.param("r")).map_err(usage)?;
            let e = Expectations {
                isoparametric: true,
                sectional: Some(2.0),
                h123_squared: None,
            };
            (c, e)
        }
        "product" => {
            let r1 = cfg.param("r1");
            if !(r1 > 0.0 && r1 < 1.0) {
                return Err(usage(format!("r1 must lie in (0, 1), got {r1}")));
            }
            let k = cfg.param("k") as usize;
            let c = product_spheres(k, n, r1, (1.0 - r1 * r1).sqrt()).map_err(usage)?;
            let flat = k == 1 && n == 2;
            let e = Expectations {
                isoparametric: true,
                sectional: flat.then_some(0.0),
                h123_squared: None,
            };
            (c, e)
        }
        "cartan" => {
            if n != 3 {
                return Err(usage(format!("the Cartan tube is three-dimensional, got n = {n}")));
            }
            let c = cartan_tube(cfg.param("r")).map_err(usage)?;
            let e = Expectations {
                isoparametric: true,
                sectional: Some(0.125),
                h123_squared: Some(0.375),
            };
            (c, e)
        }
        _ => {
            let span = cfg.param("span");
            let steps = cfg.param("steps") as usize;
            let traj =
                integrate_alpha(n, cfg.param("alpha0"), cfg.param("dalpha0"), (0.0, span), steps).map_err(usage)?;
            let rc = build_rotational_chart(&profile_curve(&traj)).map_err(usage)?;
            return Ok(Example::Rotational(traj, rc));
        }
    };
    let t = cfg.param("t");
    let chart = if t != 0.0 {
        parallel_hypersurface(&base.0, t).map_err(usage)?
    } else {
        base.0
    };
    Ok(Example::Chart(chart, base.1))
}

/// Halton sample points inside the chart, `grid^dim` of them, kept `4h`
/// from the boundary so nested stencils stay in the box.
pub fn sample_points(chart: &HypersurfaceChart, cfg: &RunConfig) -> Vec<Vec<f64>> {
    let dim = chart.dim();
    let count = cfg.grid.saturating_pow(dim as u32).max(1);
    sampling::halton_points(dim, count, cfg.seed)
        .iter()
        .map(|s| chart.point_at(s, 4.0 * cfg.h + 1e-9))
        .collect()
}

fn point_result(p: &[f64], r: crate::error::Result<ResidualReport>) -> PointResult {
    match r {
        Ok(r) => r.into(),
        Err(e) => PointResult::failed(p.to_vec(), e.to_string()),
    }
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    config: &'a RunConfig,
    results: Vec<PointResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ode: Option<OdeSection>,
    summary: Summary,
    timestamp: u64,
}

#[derive(Serialize)]
struct OdeSection {
    partial: bool,
    stop_reason: Option<String>,
    c1: f64,
    samples: usize,
    order_steps: Vec<usize>,
    order_errors: Vec<f64>,
    order_ratios: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    profile_csv: Option<String>,
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn default_out(cfg: &RunConfig, explicit: &Option<PathBuf>) -> PathBuf {
    if let Some(p) = explicit {
        return p.clone();
    }
    let dir = std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    dir.join(format!("{}-{}.json", cfg.command, cfg.example))
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Residual reports of a run, without writing anything.
pub struct VerifyRun {
    pub results: Vec<PointResult>,
    pub ode: Option<(Trajectory, RotationalChart)>,
}

pub fn run_checks(cfg: &RunConfig, example: &Example) -> VerifyRun {
    let tol = cfg.tolerances();
    match example {
        Example::Chart(chart, expect) => {
            let choice = cfg.gauge_choice();
            let results = sample_points(chart, cfg)
                .par_iter()
                .map(|p| point_result(p, verify_point(chart, p, cfg.h, choice, expect, &tol)))
                .collect();
            VerifyRun { results, ode: None }
        }
        Example::Rotational(traj, rc) => {
            let mut results = vec![PointResult::from(ode_report(traj, &tol))];
            results.extend(
                sample_points(&rc.chart, cfg)
                    .par_iter()
                    .map(|p| point_result(p, rotational_report(rc, p, cfg.h, &tol)))
                    .collect::<Vec<_>>(),
            );
            VerifyRun {
                results,
                ode: Some((traj.clone(), rc.clone())),
            }
        }
    }
}

fn ode_section(cfg: &RunConfig, traj: &Trajectory, rc: &RotationalChart, results: &mut Vec<PointResult>) -> OdeSection {
    let steps = cfg.param("steps") as usize;
    let base = (steps / 40).max(25);
    let order = order_test(
        cfg.n,
        cfg.param("alpha0"),
        cfg.param("dalpha0"),
        (0.0, cfg.param("span")),
        base,
    );
    let (order_steps, order_errors, order_ratios) = match &order {
        Ok(o) => (o.steps.to_vec(), o.errors.to_vec(), o.ratios.to_vec()),
        Err(_) => (Vec::new(), Vec::new(), Vec::new()),
    };
    let row = match &order {
        Ok(o) => CheckRow {
            name: "rk4_order".into(),
            residual: o.ratios.iter().map(|r| (r - 16.0).abs()).fold(0.0, f64::max),
            tolerance: 4.0,
            pass: o.passes(),
        },
        Err(_) => CheckRow {
            name: "rk4_order".into(),
            residual: f64::NAN,
            tolerance: 4.0,
            pass: false,
        },
    };
    results[0].checks.push(row);
    results[0].checks.sort_by(|a, b| a.name.cmp(&b.name));
    OdeSection {
        partial: traj.stopped.is_some(),
        stop_reason: traj.stopped.map(|r| format!("{r:?}")),
        c1: rc.c1,
        samples: traj.states.len(),
        order_steps,
        order_errors,
        order_ratios,
        profile_csv: None,
    }
}

/// Runs the checks of `cfg` and renders the JSON report. For rotational
/// runs the profile CSV is written to `csv` when given.
pub fn verify_json(cfg: &RunConfig, csv: Option<&Path>) -> anyhow::Result<(String, Summary)> {
    let example = build_example(cfg)?;
    let VerifyRun { mut results, ode } = run_checks(cfg, &example);
    let ode = match ode {
        Some((traj, rc)) => {
            let mut s = ode_section(cfg, &traj, &rc, &mut results);
            if let Some(csv) = csv {
                let mut buf = Vec::new();
                profile_curve(&traj).write_csv(&mut buf)?;
                write_file(csv, &String::from_utf8(buf)?)?;
                s.profile_csv = Some(csv.display().to_string());
            }
            Some(s)
        }
        None => None,
    };
    let summary = summarize(&results);
    let report = VerifyReport {
        config: cfg,
        results,
        ode,
        summary,
        timestamp: timestamp(),
    };
    Ok((to_json(&report)?, report.summary))
}

fn cmd_verify(cfg: &RunConfig, out: &Option<PathBuf>, with_csv: bool) -> anyhow::Result<u8> {
    let path = default_out(cfg, out);
    let csv = with_csv.then(|| path.with_extension("csv"));
    let (json, summary) = verify_json(cfg, csv.as_deref())?;
    write_file(&path, &json)?;
    println!(
        "{} {}: {} points, {} checks, {} failures -> {}",
        cfg.command,
        cfg.example,
        summary.points,
        summary.checks,
        summary.failures,
        path.display()
    );
    for w in summary.worst.iter().filter(|w| !w.pass) {
        println!("  FAIL {}: residual {:e} > {:e}", w.name, w.residual, w.tolerance);
    }
    Ok(if summary.pass { EXIT_PASS } else { EXIT_CHECK_FAILURE })
}

#[derive(Serialize)]
struct AngleRow {
    point: Vec<f64>,
    gauge_phi: f64,
    thetas: Vec<f64>,
}

#[derive(Serialize)]
struct AnglesReport<'a> {
    config: &'a RunConfig,
    results: Vec<AngleRow>,
    distinct_angles: Option<usize>,
    classification_error: Option<String>,
    timestamp: u64,
}

fn cmd_angles(cfg: &RunConfig, out: &Option<PathBuf>) -> anyhow::Result<u8> {
    let chart = match build_example(cfg)? {
        Example::Chart(c, _) => c,
        Example::Rotational(_, rc) => rc.chart,
    };
    let choice = cfg.gauge_choice();
    let spectra: Vec<_> = sample_points(&chart, cfg)
        .par_iter()
        .map(|p| {
            let j = gauss_map(&chart, p, cfg.h)?;
            let g = choice.resolve(&j, None)?;
            angle_spectrum(&j, g)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let points = sample_points(&chart, cfg);
    let (g, err) = match classify_by_angles(&spectra) {
        Ok(g) => (Some(g), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let results: Vec<AngleRow> = points
        .into_iter()
        .zip(&spectra)
        .map(|(point, s)| AngleRow {
            point,
            gauge_phi: s.gauge.phi,
            thetas: s.thetas.clone(),
        })
        .collect();
    for r in &results {
        let th: Vec<String> = r.thetas.iter().map(|t| format!("{t:.10}")).collect();
        println!("phi {:.10} theta [{}]", r.gauge_phi, th.join(", "));
    }
    match (&g, &err) {
        (Some(g), _) => println!("distinct angles mod pi: {g}"),
        (_, Some(e)) => println!("no classification: {e}"),
        _ => {}
    }
    let report = AnglesReport {
        config: cfg,
        results,
        distinct_angles: g,
        classification_error: err,
        timestamp: timestamp(),
    };
    let path = default_out(cfg, out);
    write_file(&path, &to_json(&report)?)?;
    println!("report -> {}", path.display());
    Ok(EXIT_PASS)
}

/// Parses `args` and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let outcome = match &cli.command {
        Command::Verify(a) => RunConfig::from_args("verify", a).and_then(|c| cmd_verify(&c, &a.out, false)),
        Command::Angles(a) => RunConfig::from_args("angles", a).and_then(|c| cmd_angles(&c, &a.out)),
        Command::Ode(a) => {
            let mut a = a.clone();
            a.example = "rotational".into();
            RunConfig::from_args("ode", &a).and_then(|c| cmd_verify(&c, &a.out, true))
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                EXIT_USAGE
            } else {
                EXIT_CHECK_FAILURE
            }
        }
    }
}
