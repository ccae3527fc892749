use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use vdp_core::approx::{default_target, run_approx};
use vdp_core::criterion::{run_vdp_criterion, Timings};
use vdp_core::flow_audit::{default_times, flow_audit};
use vdp_core::lifting::lift_pairs;
use vdp_core::scenario::Scenario;
use vdp_core::suspension::{sample_points, Exactness, SuspensionField};
use vdp_core::calculus::VectorField;
use vdp_core::verify::verify_scenario;

#[derive(Parser)]
#[command(name = "vdp", version, about = "Volume density checks on suspension hypersurfaces uv = f(z)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact identity suites (calculus layer and scenario pairs).
    Verify(Common),
    /// Sampled criterion: certificates, spanning ranks, verdict.
    Criterion(Common),
    /// Closed-form lifted flows against RK4, with chart Jacobians.
    Flow(Common),
    /// Dictionary least-squares fit and residual curve.
    Approx(ApproxArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    degree_bound: Option<u32>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value = "vdp-out")]
    out: PathBuf,
    #[arg(long, conflicts_with = "float")]
    exact: bool,
    #[arg(long)]
    float: bool,
}

#[derive(Args)]
struct ApproxArgs {
    #[command(flatten)]
    common: Common,
    /// Leave the twist family u d/du - v d/dv out of the dictionary.
    #[arg(long)]
    no_twists: bool,
}

/// Random inputs per identity in `verify`.
const VERIFY_CASES: usize = 200;
const FLOW_TOL: f64 = 1e-9;
const FLOW_DET_TOL: f64 = 1e-8;
const FLOW_POINTS: usize = 20;
const APPROX_TOL: f64 = 1e-10;

enum Failure {
    /// A sub-check failed; reports were still written.
    Check(String),
    /// Bad input or an internal fault.
    Fatal(String),
}

impl Common {
    fn load(&self) -> Result<Scenario, Failure> {
        let text = fs::read_to_string(&self.scenario).map_err(|e| Failure::Fatal(format!("{}: {e}", self.scenario.display())))?;
        let mut sc = Scenario::parse(&text).map_err(|e| Failure::Fatal(format!("{}:{e}", self.scenario.display())))?;
        if let Some(d) = self.degree_bound {
            sc.degree_bound = d;
        }
        if let Some(n) = self.samples {
            sc.samples = n;
        }
        if let Some(s) = self.seed {
            sc.seed = s;
        }
        if self.exact {
            sc.exactness = Exactness::Exact;
        }
        if self.float {
            sc.exactness = Exactness::Float;
        }
        Ok(sc)
    }
}

fn fatal<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Fatal(e.to_string())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(fatal)?;
    text.push('\n');
    fs::write(dir.join(name), text).map_err(fatal)
}

fn write_timings(dir: &Path, timings: &Timings) -> Result<(), Failure> {
    write_json(dir, "timings.json", timings)
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Check(msg.into()))
    }
}

fn run_verify(args: &Common) -> Result<(), Failure> {
    let sc = args.load()?;
    let start = Instant::now();
    let report = verify_scenario(&sc, VERIFY_CASES).map_err(fatal)?;
    let timings = Timings {
        stages: vec![("verify".into(), start.elapsed().as_secs_f64() * 1e3)],
    };
    write_json(&args.out, "verify.json", &report)?;
    write_timings(&args.out, &timings)?;
    for o in report.random.iter().chain(&report.scenario) {
        println!("{:<20} {:>5} cases  {:>3} failures", o.name, o.cases, o.failures);
    }
    check(report.passed, "identity failures")
}

fn run_criterion(args: &Common) -> Result<(), Failure> {
    let sc = args.load()?;
    let ctx = sc.context().map_err(fatal)?;
    let config = sc.criterion_config(&ctx).map_err(fatal)?;
    let (report, timings) = run_vdp_criterion(&ctx, &sc.pairs, sc.cohomology, &config);
    write_json(&args.out, "criterion.json", &report)?;
    write_timings(&args.out, &timings)?;
    let full = report.points.iter().filter(|p| p.rank == p.full).count();
    println!("verdict: {:?} ({} of {} points at full rank)", report.verdict, full, report.points.len());
    for line in &report.explanation {
        println!("  {line}");
    }
    check(report.verdict == vdp_core::criterion::Verdict::CertifiedAtSamples, "criterion not certified")
}

fn run_flow(args: &Common) -> Result<(), Failure> {
    let mut sc = args.load()?;
    if args.samples.is_none() {
        sc.samples = FLOW_POINTS;
    }
    let ctx = sc.context().map_err(fatal)?;
    let spec = sc.sample_spec(&ctx).map_err(fatal)?;
    let start = Instant::now();
    let points = sample_points(&ctx, &spec).map_err(fatal)?;
    let tol = args.tol.unwrap_or(FLOW_TOL);
    let report = flow_audit(&ctx, &sc.pairs, &points, &default_times(), tol, FLOW_DET_TOL);
    let timings = Timings {
        stages: vec![("flow".into(), start.elapsed().as_secs_f64() * 1e3)],
    };
    write_json(&args.out, "flow.json", &report)?;
    let mut csv = String::from("field,point,t,deviation,chart_det_error,exact_weighted_det_one\n");
    for r in &report.records {
        csv.push_str(&format!(
            "{},{},{},{:e},{},{}\n",
            r.field,
            r.point,
            r.t,
            r.deviation,
            r.chart_det_error.map_or(String::new(), |e| format!("{e:e}")),
            r.exact_weighted_det_one.map_or(String::new(), |b| b.to_string())
        ));
    }
    fs::write(args.out.join("flow.csv"), csv).map_err(fatal)?;
    write_timings(&args.out, &timings)?;
    println!(
        "{} records, max deviation {:e}, max chart det error {:e}, {} skipped",
        report.records.len(),
        report.max_deviation,
        report.max_chart_det_error,
        report.skipped.len()
    );
    for e in &report.errors {
        println!("error: {e}");
    }
    check(report.passed, "flow audit failed")
}

fn run_approx_cmd(args: &ApproxArgs) -> Result<(), Failure> {
    let common = &args.common;
    let sc = common.load()?;
    let ctx = sc.context().map_err(fatal)?;
    let lifted = lift_pairs(&sc.pairs, &ctx).map_err(fatal)?;
    let target = match &sc.target {
        Some(t) => SuspensionField::new(VectorField::new(t.clone()), &ctx).map_err(fatal)?,
        None => {
            let first = lifted.first().ok_or_else(|| Failure::Fatal("scenario has neither a target nor a pair".into()))?;
            default_target(&ctx, first).map_err(fatal)?
        }
    };
    let spec = sc.sample_spec(&ctx).map_err(fatal)?;
    let start = Instant::now();
    let points = sample_points(&ctx, &spec).map_err(fatal)?;
    let tol = common.tol.unwrap_or(APPROX_TOL);
    let report = run_approx(&target, &ctx, &lifted, &points, sc.degree_bound, !args.no_twists, tol).map_err(fatal)?;
    let timings = Timings {
        stages: vec![("approx".into(), start.elapsed().as_secs_f64() * 1e3)],
    };
    write_json(&common.out, "approx.json", &report)?;
    let mut csv = String::from("degree,entries,sup_residual,fit_sup_residual,l2_residual\n");
    for c in &report.curve {
        csv.push_str(&format!("{},{},{:e},{:e},{:e}\n", c.degree, c.entries, c.sup_residual, c.fit_sup_residual, c.l2_residual));
    }
    fs::write(common.out.join("residuals.csv"), csv).map_err(fatal)?;
    write_timings(&common.out, &timings)?;
    for c in &report.curve {
        println!("D={} entries={} sup={:e}", c.degree, c.entries, c.sup_residual);
    }
    check(report.sup_non_increasing() && report.l2_non_increasing, "residual curve increased")?;
    check(report.flow_audit.passed, "flow-audit companion exceeded its bound")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match &cli.command {
        Command::Verify(a) | Command::Criterion(a) | Command::Flow(a) => &a.out,
        Command::Approx(a) => &a.common.out,
    };
    if let Err(e) = fs::create_dir_all(out) {
        eprintln!("error: {}: {e}", out.display());
        return ExitCode::from(2);
    }
    let result = match &cli.command {
        Command::Verify(a) => run_verify(a),
        Command::Criterion(a) => run_criterion(a),
        Command::Flow(a) => run_flow(a),
        Command::Approx(a) => run_approx_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Fatal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
