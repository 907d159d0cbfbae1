use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use interdict_core::game::MixedStrategy;
use interdict_core::graph::{ArcFlow, CutReport, Instance, PathFlow};
use interdict_core::instances::{self, Family, Fig2bVariant, GeneratorSpec};
use interdict_core::lomodel::{self, ApproxReport, Bound, BoundKind, ReportValue, ValueSource};
use interdict_core::solvers::{self, CertificateReport, Limits, RniSolution, Witness};
use interdict_core::Error;
use serde_json::{json, Value};

/// Robust max-flow network interdiction solver.
#[derive(Debug, Parser)]
#[command(name = "interdict", version)]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Config {
    /// Maximum number of scenarios enumerated.
    #[arg(long, global = true, env = "INTERDICT_SCENARIO_LIMIT", default_value_t = 20_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    scenario_limit: u64,
    /// Maximum number of scenarios admitted into a linear program.
    #[arg(long, global = true, env = "INTERDICT_LP_SCENARIO_LIMIT", default_value_t = 2_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    lp_scenario_limit: u64,
    /// Maximum number of s-t paths enumerated.
    #[arg(long, global = true, env = "INTERDICT_PATH_LIMIT", default_value_t = 20_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    path_limit: u64,
    /// Relative tolerance of the saddle-point certificate.
    #[arg(long, global = true, env = "INTERDICT_TOLERANCE", default_value_t = 1e-6,
          value_parser = parse_tolerance)]
    tolerance: f64,
    /// Emit JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
}

impl Config {
    fn limits(&self) -> Limits {
        let clamp = |v: u64| usize::try_from(v).unwrap_or(usize::MAX);
        Limits {
            scenario: clamp(self.scenario_limit),
            lp_scenario: clamp(self.lp_scenario_limit),
            path: clamp(self.path_limit),
        }
    }
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if t > 0.0 && t < 1.0 {
        Ok(t)
    } else {
        Err("tolerance must lie in (0, 1)".into())
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write an instance from one of the built-in families.
    Generate(GenerateArgs),
    /// Solve one model on an instance file.
    Solve(SolveArgs),
    /// Evaluate every model and all bounds on an instance file.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Fig1,
    Fig2a,
    Fig2b,
    Thm6,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    Figure,
    Prose,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, default_value_t = 0)]
    k: usize,
    #[arg(long)]
    gamma: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Node count for the random family.
    #[arg(long, default_value_t = 6)]
    nodes: usize,
    /// Arc count for the random family.
    #[arg(long, default_value_t = 10)]
    arcs: usize,
    /// Largest capacity for the random family.
    #[arg(long, default_value_t = 9)]
    cap_max: u64,
    #[arg(long, value_enum, default_value_t = VariantArg::Figure)]
    fig2b_variant: VariantArg,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Ni,
    Rni,
    RniPath,
    Lo,
    Gamma1,
}

impl Model {
    fn name(self) -> &'static str {
        match self {
            Model::Ni => "ni",
            Model::Rni => "rni",
            Model::RniPath => "rni-path",
            Model::Lo => "lo",
            Model::Gamma1 => "gamma1",
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Model::Ni => "Z_NI",
            Model::Rni | Model::Gamma1 => "Z_RNI",
            Model::RniPath => "Z_RNI^Path",
            Model::Lo => "Z_LO",
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    model: Model,
    /// Instance file, or `-` for standard input.
    file: String,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Instance file, or `-` for standard input.
    file: String,
}

/// A failure with its process exit code.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::ScenarioLimitExceeded { .. } => (2, "scenario-limit"),
            Error::PathLimitExceeded { .. } => (2, "path-limit"),
            Error::CutLimitExceeded { .. } => (2, "cut-limit"),
            Error::NumericalFailure(_) => (3, "numerical-failure"),
            Error::InvariantViolation(_) => (3, "invariant-violation"),
            Error::MalformedLp(_) => (3, "malformed-lp"),
            Error::Parse(_) => (1, "parse"),
            Error::GammaMismatch { .. } => (1, "gamma-mismatch"),
            Error::SpecInvalid(_) => (1, "invalid-spec"),
            Error::InvalidInstance(_) => (1, "invalid-instance"),
            Error::InvalidStrategy(_) => (1, "invalid-strategy"),
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

impl Failure {
    fn io(context: &str, e: io::Error) -> Self {
        Failure {
            code: 1,
            kind: "io",
            message: format!("{context}: {e}"),
        }
    }
}

fn main() -> ExitCode {
    let json_requested = std::env::args().any(|a| a == "--json");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let failure = Failure {
                code: 1,
                kind: "usage",
                message: {
                    let text = e.to_string();
                    text.trim_end().trim_start_matches("error: ").to_string()
                },
            };
            return report_failure(&failure, json_requested);
        }
    };
    match run(&cli) {
        Ok(text) => {
            let mut out = io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(failure) => report_failure(&failure, cli.config.json),
    }
}

fn report_failure(failure: &Failure, json_mode: bool) -> ExitCode {
    if json_mode {
        let body = json!({
            "error": {
                "kind": failure.kind,
                "message": failure.message,
                "exit_code": failure.code,
            }
        });
        println!("{}", serde_json::to_string_pretty(&body).expect("serializable"));
    } else {
        eprintln!("error: {}", failure.message);
    }
    ExitCode::from(failure.code)
}

fn run(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Generate(args) => generate(args, &cli.config),
        Command::Solve(args) => {
            let instance = load(&args.file)?;
            solve(&instance, &args.file, args.model, &cli.config)
        }
        Command::Report(args) => {
            let instance = load(&args.file)?;
            report(&instance, &args.file, &cli.config)
        }
    }
}

fn load(file: &str) -> Result<Instance, Failure> {
    let text = if file == "-" {
        let mut buf = String::new();
        io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::io("reading standard input", e))?;
        buf
    } else {
        fs::read_to_string(file).map_err(|e| Failure::io(file, e))?
    };
    Ok(instances::parse(&text)?)
}

fn generate(args: &GenerateArgs, config: &Config) -> Result<String, Failure> {
    let family = match args.family {
        FamilyArg::Fig1 => Family::Fig1,
        FamilyArg::Fig2a => Family::Fig2a,
        FamilyArg::Fig2b => Family::Fig2b,
        FamilyArg::Thm6 => Family::Thm6,
        FamilyArg::Random => Family::Random,
    };
    let spec = GeneratorSpec {
        seed: args.seed,
        nodes: args.nodes,
        arcs: args.arcs,
        cap_max: args.cap_max,
        fig2b_variant: match args.fig2b_variant {
            VariantArg::Figure => Fig2bVariant::Figure,
            VariantArg::Prose => Fig2bVariant::Prose,
        },
        ..GeneratorSpec::new(family, args.k, args.gamma)
    };
    let instance = instances::generate(&spec)?;
    let text = instances::serialize(&instance);
    let (nodes, arcs) = (instance.node_count(), instance.arc_count());
    match &args.out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| Failure::io(&path.display().to_string(), e))?;
            if config.json {
                let body = json!({ "file": path.display().to_string(), "nodes": nodes, "arcs": arcs });
                Ok(pretty(&body))
            } else {
                Ok(format!("wrote {}: {nodes} nodes, {arcs} arcs\n", path.display()))
            }
        }
        None => {
            eprintln!("{nodes} nodes, {arcs} arcs");
            Ok(text)
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Integers print without a fractional part, other values with up to six decimals.
fn fmt_value(v: f64) -> String {
    if (v - v.round()).abs() <= 1e-9 * (1.0 + v.abs()) {
        format!("{}", v.round() as i64)
    } else {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Integral bounds print as integers, others with four decimals.
fn fmt_bound(v: f64) -> String {
    if (v - v.round()).abs() <= 1e-12 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v:.4}")
    }
}

fn strategy_json(strategy: &MixedStrategy) -> Value {
    Value::Array(
        strategy
            .support()
            .iter()
            .map(|(s, p)| {
                let arcs: Vec<usize> = s.removed().iter().map(|e| e.number()).collect();
                json!({ "arcs": arcs, "prob": p })
            })
            .collect(),
    )
}

fn arc_flow_json(flow: &ArcFlow) -> Value {
    json!({ "arcs": flow.values, "value": flow.value })
}

fn path_flow_json(flow: &PathFlow) -> Value {
    let paths: Vec<Value> = flow
        .entries
        .iter()
        .map(|(p, a)| json!({ "arcs": p.iter().map(|e| e.number()).collect::<Vec<_>>(), "amount": a }))
        .collect();
    json!({ "paths": paths, "value": flow.value() })
}

fn certificate_json(c: &CertificateReport) -> Value {
    json!({ "flow_gap": c.flow_gap, "adversary_gap": c.adversary_gap, "pass": c.pass })
}

fn strategy_table(strategy: &MixedStrategy) -> String {
    let mut out = String::from("interdiction strategy:\n");
    for (s, p) in strategy.support() {
        if *p >= 1e-9 {
            out.push_str(&format!("  {s:<16} {p:.6}\n"));
        }
    }
    out
}

fn certificate_table(c: &CertificateReport) -> String {
    format!(
        "certificate: flow gap {:.3e}, adversary gap {:.3e}, {}\n",
        c.flow_gap,
        c.adversary_gap,
        if c.pass { "PASS" } else { "FAIL" }
    )
}

fn witness_table(witness: &Witness) -> String {
    match witness {
        Witness::Arc(flow) => {
            let mut out = String::from("flow:\n");
            for (i, v) in flow.values.iter().enumerate() {
                if v.abs() > 1e-9 {
                    out.push_str(&format!("  e{:<4} {}\n", i + 1, fmt_value(*v)));
                }
            }
            out
        }
        Witness::Path(flow) => {
            let mut out = String::from("path flow:\n");
            for (p, a) in &flow.entries {
                let arcs: Vec<String> = p.iter().map(|e| e.to_string()).collect();
                out.push_str(&format!("  {:<24} {}\n", arcs.join(" "), fmt_value(*a)));
            }
            out
        }
    }
}

fn solve(instance: &Instance, file: &str, model: Model, config: &Config) -> Result<String, Failure> {
    let limits = config.limits();
    let header = |value: f64| format!("instance: {file}\nmodel: {}\n{} = {}\n", model.name(), model.symbol(), fmt_value(value));
    match model {
        Model::Ni => {
            let sol = solvers::solve_ni(instance, &limits)?;
            if config.json {
                let strategy = strategy_json(&MixedStrategy::pure(sol.witness_scenario.clone()));
                return Ok(pretty(&json!({
                    "instance": file,
                    "model": model.name(),
                    "value": sol.value,
                    "strategy": strategy,
                    "certificate": Value::Null,
                    "bounds": [],
                    "witness": arc_flow_json(&sol.witness_flow),
                })));
            }
            Ok(format!("{}removed arcs: {}\n", header(sol.value), sol.witness_scenario))
        }
        Model::Rni | Model::RniPath | Model::Gamma1 => {
            let (sol, alpha): (RniSolution, Option<Vec<f64>>) = match model {
                Model::Rni => (solvers::solve_rni(instance, &limits)?, None),
                Model::RniPath => (solvers::solve_rni_path(instance, &limits)?, None),
                _ => {
                    let g1 = solvers::solve_rni_gamma1(instance)?;
                    (g1.to_rni()?, Some(g1.alpha.clone()))
                }
            };
            let cert = solvers::certify_with_tolerance(instance, &sol, &limits, config.tolerance)?;
            if config.json {
                let witness = match &sol.witness {
                    Witness::Arc(f) => arc_flow_json(f),
                    Witness::Path(p) => path_flow_json(p),
                };
                let mut body = json!({
                    "instance": file,
                    "model": model.name(),
                    "value": sol.value,
                    "strategy": strategy_json(&sol.strategy),
                    "certificate": certificate_json(&cert),
                    "bounds": [],
                    "witness": witness,
                });
                if let Some(alpha) = alpha {
                    body["alpha"] = json!(alpha);
                }
                return Ok(pretty(&body));
            }
            Ok(format!(
                "{}{}{}{}",
                header(sol.value),
                strategy_table(&sol.strategy),
                witness_table(&sol.witness),
                certificate_table(&cert)
            ))
        }
        Model::Lo => {
            let sol = lomodel::solve_lo(instance)?;
            if config.json {
                return Ok(pretty(&json!({
                    "instance": file,
                    "model": model.name(),
                    "value": sol.value,
                    "strategy": [],
                    "certificate": Value::Null,
                    "bounds": [],
                    "theta_star": sol.theta_star,
                    "flow_value": sol.flow_value,
                    "witness": arc_flow_json(&sol.flow),
                })));
            }
            Ok(format!(
                "{}θ* = {}\nVal(x*) = {}\n{}",
                header(sol.value),
                fmt_value(sol.theta_star),
                fmt_value(sol.flow_value),
                witness_table(&Witness::Arc(sol.flow))
            ))
        }
    }
}

fn report_value_json(v: &ReportValue) -> Value {
    json!({ "value": v.value, "source": v.source })
}

fn bound_json(b: &Bound) -> Value {
    json!({ "name": b.name, "lhs": b.lhs, "rhs": b.rhs, "verdict": b.verdict })
}

fn value_line(symbol: &str, v: &ReportValue) -> String {
    match (&v.value, &v.source) {
        (Some(x), ValueSource::Computed) => format!("{symbol:<11} = {}\n", fmt_value(*x)),
        (Some(x), ValueSource::Derived(why)) => format!("{symbol:<11} = {} (derived: {why})\n", fmt_value(*x)),
        (_, ValueSource::Unavailable(why)) | (None, ValueSource::Derived(why)) => {
            format!("{symbol:<11} = unavailable ({why})\n")
        }
        (None, ValueSource::Computed) => format!("{symbol:<11} = unavailable\n"),
    }
}

fn bound_line(b: &Bound) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), fmt_value);
    match b.kind {
        BoundKind::Ratio => {
            let lhs = b.lhs.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"));
            let rhs = b.rhs.map_or_else(|| "n/a".to_string(), fmt_bound);
            format!("{} = {lhs} ≤ {rhs} {}\n", b.name, b.verdict)
        }
        BoundKind::Order => format!("{}: {} ≤ {} {}\n", b.name, opt(b.lhs), opt(b.rhs), b.verdict),
        BoundKind::Conditional | BoundKind::Cut => {
            format!("{}: {} vs {} {}\n", b.name, opt(b.lhs), opt(b.rhs), b.verdict)
        }
    }
}

fn nodes_label(cut: &CutReport) -> String {
    let ids: Vec<String> = cut.s_side.iter().map(|v| (v + 1).to_string()).collect();
    format!("{{{}}}", ids.join(","))
}

fn report(instance: &Instance, file: &str, config: &Config) -> Result<String, Failure> {
    let r: ApproxReport = lomodel::approx_report(instance, &config.limits())?;
    if config.json {
        return Ok(pretty(&json!({
            "instance": file,
            "model": "report",
            "value": Value::Null,
            "strategy": [],
            "certificate": Value::Null,
            "bounds": r.bounds.iter().map(bound_json).collect::<Vec<_>>(),
            "report": {
                "gamma": r.gamma,
                "nominal": r.nominal,
                "z_ni": report_value_json(&r.z_ni),
                "z_rni": report_value_json(&r.z_rni),
                "z_rni_path": report_value_json(&r.z_rni_path),
                "z_lo": r.z_lo,
                "theta_star": r.theta_star,
                "flow_value": r.flow_value,
                "x_star_is_max_flow": r.x_star_is_max_flow,
                "s_prime": r.cuts.s_prime.s_side.iter().map(|v| v + 1).collect::<Vec<_>>(),
                "s_double_prime": r.cuts.s_double_prime.s_side.iter().map(|v| v + 1).collect::<Vec<_>>(),
                "a": r.a,
                "b": r.b,
                "l": r.l,
                "partial": r.partial,
            },
        })));
    }
    let mut out = format!("instance: {file}\nΓ = {}\n", r.gamma);
    out.push_str(&value_line("Z_NI", &r.z_ni));
    out.push_str(&value_line("Z_RNI", &r.z_rni));
    out.push_str(&value_line("Z_RNI^Path", &r.z_rni_path));
    out.push_str(&format!("{:<11} = {}\n", "Z_LO", fmt_value(r.z_lo)));
    out.push_str(&format!("{:<11} = {}\n", "nominal", fmt_value(r.nominal)));
    out.push_str(&format!(
        "θ* = {}, Val(x*) = {}, x* is a maximum flow: {}\n",
        fmt_value(r.theta_star),
        fmt_value(r.flow_value),
        if r.x_star_is_max_flow { "yes" } else { "no" }
    ));
    out.push_str(&format!(
        "S′ = {}, a = {}, L = {}\nS″ = {}, b = {}\n",
        nodes_label(&r.cuts.s_prime),
        r.a,
        fmt_value(r.l),
        nodes_label(&r.cuts.s_double_prime),
        r.b
    ));
    if r.partial {
        out.push_str("partial report: some values were derived or exceeded the limits\n");
    }
    out.push_str("bounds:\n");
    for b in &r.bounds {
        out.push_str(&bound_line(b));
    }
    Ok(out)
}
