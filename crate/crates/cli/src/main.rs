//! `incsense`: command-line front end for the incoherent-signal detection
//! laboratory. Single-shot results are JSON, sweep tables are CSV, and every
//! artifact embeds a provenance block (tool version, resolved config, master
//! seed) so runs can be reproduced exactly.

mod config;
mod error;
mod output;

use clap::{Args, Parser, Subcommand};
use config::{OutputFormat, RunConfig, ScanConfig};
use error::{CliError, CliResult};
use incoherent_core::divergence::{
    bernoulli_kl, kl_divergence, kl_first_order, kmb_fisher_information, qsp_composite_exponent,
    sample_complexity, snr_bound, tsallis_divergence, ComplexityFormula, ComplexityQuery,
};
use incoherent_core::dmeqsp::{
    apply_qsp_channel, build_ideal_filter, build_poly_filter, midpoint_decision, qsp_budget,
    sample_flag_counts,
};
use incoherent_core::harness::{
    find_sample_complexity, CountRule, DmeQspConfig, Strategy,
};
use incoherent_core::linalg::{haar_unitary, hermitian_part, CMat};
use incoherent_core::schurwss::{
    build_schur_basis, rank_test, sample_young_diagram, spectral_gap_test, twirl,
};
use incoherent_core::seeding::{derive_seed, rng_from};
use incoherent_core::statemodel::{random_scenario, SensingScenario};
use incoherent_core::RANK_TOL;
use output::{emit, json_artifact, Provenance};
use rand::Rng;
use serde_json::json;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "incsense",
    version,
    about = "Detection of weak incoherent signals: divergences, Schur sampling, DME-QSP filters, and Monte Carlo scans"
)]
struct Cli {
    /// Full-run JSON configuration; drives the run when no subcommand is
    /// given on the command line.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed, echoed into every artifact.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output path; stdout when omitted. Writes are atomic.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format where a choice exists (sweeps are always CSV).
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an information quantity.
    Divergence(DivergenceArgs),
    /// Evaluate an asymptotic sample-complexity formula.
    Complexity(ComplexityArgs),
    /// Simulate weak Schur sampling trials; emits per-trial CSV records.
    Wss(WssArgs),
    /// Run the DME-QSP filter channel and its Bernoulli measurement.
    Qsp(QspArgs),
    /// Sweep a control variable and measure sample complexities.
    Scan(ScanArgs),
    /// Verify the twirl structure on seeded random POVM elements.
    TwirlCheck(TwirlCheckArgs),
}

fn parse_key_val(s: &str) -> Result<(String, f64), String> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let value: f64 = value
        .parse()
        .map_err(|e| format!("value for `{key}` is not a number: {e}"))?;
    Ok((key.to_string(), value))
}

#[derive(Args, Clone)]
struct ScenarioArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Dimension for a randomly drawn scenario.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    r_n: Option<usize>,
    #[arg(long)]
    r_s: Option<usize>,
    #[arg(long)]
    theta0: Option<f64>,
    /// Spectral gap of the drawn scenario.
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Args)]
struct DivergenceArgs {
    /// One of: kl, tsallis, kl_first_order, kmb_fisher, bernoulli_kl,
    /// qsp_exponent, snr.
    #[arg(long)]
    op: String,
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Named numeric parameters, repeatable: --param q=0.5
    #[arg(long = "param", value_parser = parse_key_val)]
    params: Vec<(String, f64)>,
}

#[derive(Args)]
struct ComplexityArgs {
    /// Formula name from the sample-complexity table.
    #[arg(long)]
    formula: String,
    #[arg(long = "param", value_parser = parse_key_val)]
    params: Vec<(String, f64)>,
    /// Prefactor applied to the unit-constant expression.
    #[arg(long, default_value_t = 1.0)]
    constant: f64,
}

#[derive(Args)]
struct WssArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Copies per trial.
    #[arg(long)]
    m: usize,
    #[arg(long)]
    trials: usize,
    /// Decision applied per trial: rank or gap.
    #[arg(long, default_value = "rank")]
    test: String,
    /// Mixing parameter to sample at (defaults to the scenario's theta0).
    #[arg(long)]
    theta: Option<f64>,
}

#[derive(Args)]
struct QspArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// ideal or polynomial.
    #[arg(long, default_value = "ideal")]
    mode: String,
    /// Failure level of the ideal filter.
    #[arg(long)]
    delta: Option<f64>,
    /// DME evolution parameter (polynomial mode).
    #[arg(long)]
    x: Option<f64>,
    /// Polynomial degree.
    #[arg(long)]
    degree: Option<usize>,
    /// Mixing parameter to evaluate at (defaults to theta0).
    #[arg(long)]
    theta: Option<f64>,
    /// Number of ancilla measurements.
    #[arg(long)]
    m_ber: usize,
    /// Type-2 error target used for the budget report.
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
}

#[derive(Args)]
struct ScanArgs {
    /// Also write log-log points next to the results CSV.
    #[arg(long)]
    emit_plot_data: bool,
}

#[derive(Args)]
struct TwirlCheckArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    d: usize,
    /// Number of seeded random POVM elements.
    #[arg(long, default_value_t = 20)]
    n_random: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn read_to_string(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))
}

fn load_run_config(path: &Path) -> CliResult<RunConfig> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
}

fn params_to_map(params: &[(String, f64)]) -> BTreeMap<String, f64> {
    params.iter().cloned().collect()
}

fn get_param(values: &BTreeMap<String, f64>, key: &str) -> CliResult<f64> {
    values
        .get(key)
        .copied()
        .ok_or_else(|| CliError::Validation(format!("missing parameter `{key}`")))
}

fn resolve_scenario(
    args: &ScenarioArgs,
    inline: Option<&serde_json::Value>,
    seed: u64,
) -> CliResult<SensingScenario> {
    if let Some(path) = &args.scenario {
        let text = read_to_string(path)?;
        return SensingScenario::from_json(&text).map_err(CliError::from);
    }
    if let Some(value) = inline {
        return match value {
            serde_json::Value::String(path) => {
                let text = read_to_string(Path::new(path))?;
                SensingScenario::from_json(&text).map_err(CliError::from)
            }
            other => SensingScenario::from_json(&other.to_string()).map_err(CliError::from),
        };
    }
    match (args.d, args.r_n, args.r_s, args.theta0) {
        (Some(d), Some(r_n), Some(r_s), Some(theta0)) => {
            random_scenario(d, r_n, r_s, theta0, args.lambda, derive_seed(seed, &[77]))
                .map_err(CliError::from)
        }
        _ => Err(CliError::Validation(
            "no scenario: pass --scenario <file> or all of --d --r-n --r-s --theta0".into(),
        )),
    }
}

fn scenario_summary(s: &SensingScenario) -> serde_json::Value {
    json!({
        "dim": s.dim(),
        "r_n": s.r_n(),
        "r_s": s.r_s(),
        "theta0": s.theta0(),
        "lambda_gap": s.lambda_gap(),
        "seed": s.seed(),
    })
}

fn run(cli: Cli) -> CliResult<()> {
    let seed = cli.seed.unwrap_or(0);
    match cli.command {
        Some(Command::Scan(args)) => {
            let path = cli.config.ok_or_else(|| {
                CliError::Validation("scan needs --config <ladder.json>".into())
            })?;
            let text = read_to_string(&path)?;
            let scan: ScanConfig = serde_json::from_str(&text)
                .map_err(|e| CliError::Validation(format!("scan config {}: {e}", path.display())))?;
            run_scan(&scan, seed, cli.out.as_deref(), args.emit_plot_data, cli.format)
        }
        Some(command) => dispatch_command(command, seed, cli.out.as_deref(), cli.format),
        None => {
            let config_path = cli.config.ok_or_else(|| {
                CliError::Validation("nothing to do: pass a subcommand or --config".into())
            })?;
            let run_config = load_run_config(&config_path)?;
            let seed = cli.seed.or(run_config.seed).unwrap_or(0);
            let out = cli
                .out
                .clone()
                .or_else(|| run_config.output.clone());
            let format = cli.format.or(run_config.format);
            dispatch_config(run_config, seed, out.as_deref(), format)
        }
    }
}

/// Extract a typed field map from the config `params` object, rejecting
/// non-numeric values where numbers are expected.
fn config_numeric_params(
    params: &BTreeMap<String, serde_json::Value>,
    skip: &[&str],
) -> CliResult<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for (k, v) in params {
        if skip.contains(&k.as_str()) {
            continue;
        }
        let n = v.as_f64().ok_or_else(|| {
            CliError::Validation(format!("params.{k}: expected a number, got {v}"))
        })?;
        out.insert(k.clone(), n);
    }
    Ok(out)
}

fn config_string(params: &BTreeMap<String, serde_json::Value>, key: &str) -> CliResult<String> {
    params
        .get(key)
        .and_then(|v| v.as_str())
        .map(str::to_string)
        .ok_or_else(|| CliError::Validation(format!("params.{key}: missing string field")))
}

fn dispatch_config(
    run_config: RunConfig,
    seed: u64,
    out: Option<&Path>,
    format: Option<OutputFormat>,
) -> CliResult<()> {
    let scenario_value = run_config.scenario.clone();
    let empty = ScenarioArgs {
        scenario: None,
        d: None,
        r_n: None,
        r_s: None,
        theta0: None,
        lambda: None,
    };
    match run_config.subcommand.as_str() {
        "divergence" => {
            let op = config_string(&run_config.params, "op")?;
            let values = config_numeric_params(&run_config.params, &["op"])?;
            let scenario = if divergence_needs_scenario(&op) {
                Some(resolve_scenario(&empty, scenario_value.as_ref(), seed)?)
            } else {
                None
            };
            let result = run_divergence(&op, scenario.as_ref(), &values)?;
            let config = json!({"subcommand": "divergence", "op": op, "values": values, "scenario": scenario_value});
            write_json(out, seed, config, &result)
        }
        "complexity" => {
            let formula = config_string(&run_config.params, "formula")?;
            let mut values = config_numeric_params(&run_config.params, &["formula"])?;
            let constant = values.remove("constant").unwrap_or(1.0);
            let result = run_complexity(&formula, &values, constant)?;
            let config = json!({"subcommand": "complexity", "formula": formula, "values": values, "constant": constant});
            write_json(out, seed, config, &result)
        }
        "scan" => {
            let scan: ScanConfig = serde_json::from_value(serde_json::Value::Object(
                run_config.params.clone().into_iter().collect(),
            ))
            .map_err(|e| CliError::Validation(format!("scan config: {e}")))?;
            run_scan(&scan, seed, out, false, format)
        }
        other => Err(CliError::Validation(format!(
            "config subcommand `{other}` is not runnable from a config file; use the command line"
        ))),
    }
}

fn dispatch_command(
    command: Command,
    seed: u64,
    out: Option<&Path>,
    _format: Option<OutputFormat>,
) -> CliResult<()> {
    match command {
        Command::Divergence(args) => {
            let values = params_to_map(&args.params);
            let scenario = if divergence_needs_scenario(&args.op) {
                Some(resolve_scenario(&args.scenario, None, seed)?)
            } else {
                None
            };
            let result = run_divergence(&args.op, scenario.as_ref(), &values)?;
            let config = json!({
                "subcommand": "divergence",
                "op": args.op,
                "values": values,
                "scenario": scenario.as_ref().map(scenario_summary),
            });
            write_json(out, seed, config, &result)
        }
        Command::Complexity(args) => {
            let values = params_to_map(&args.params);
            let result = run_complexity(&args.formula, &values, args.constant)?;
            let config = json!({
                "subcommand": "complexity",
                "formula": args.formula,
                "values": values,
                "constant": args.constant,
            });
            write_json(out, seed, config, &result)
        }
        Command::Wss(args) => run_wss(&args, seed, out),
        Command::Qsp(args) => run_qsp(&args, seed, out),
        Command::Scan(_) => unreachable!("scan is dispatched with its config in run()"),
        Command::TwirlCheck(args) => run_twirl_check(&args, seed, out),
    }
}

fn divergence_needs_scenario(op: &str) -> bool {
    matches!(op, "kl" | "tsallis" | "kl_first_order" | "kmb_fisher")
}

fn run_divergence(
    op: &str,
    scenario: Option<&SensingScenario>,
    values: &BTreeMap<String, f64>,
) -> CliResult<serde_json::Value> {
    let mut inputs = json!(values);
    let (value, infinite) = match op {
        "kl" => {
            let s = scenario.expect("scenario resolved");
            let theta = values.get("theta").copied().unwrap_or(s.theta0());
            let mixed = s.mixed_state(theta)?;
            inputs["scenario"] = scenario_summary(s);
            inputs["theta"] = json!(theta);
            match kl_divergence(s.rho_n(), &mixed)? {
                incoherent_core::divergence::Divergence::Finite(v) => (Some(v), false),
                incoherent_core::divergence::Divergence::Infinite => (None, true),
            }
        }
        "tsallis" => {
            let s = scenario.expect("scenario resolved");
            let q = get_param(values, "q")?;
            let theta = values.get("theta").copied().unwrap_or(s.theta0());
            let mixed = s.mixed_state(theta)?;
            inputs["scenario"] = scenario_summary(s);
            (Some(tsallis_divergence(s.rho_n(), &mixed, q)?), false)
        }
        "kl_first_order" => {
            let s = scenario.expect("scenario resolved");
            let vartheta0 = values.get("vartheta0").copied().unwrap_or(s.theta0());
            inputs["scenario"] = scenario_summary(s);
            (Some(kl_first_order(s, vartheta0)?), false)
        }
        "kmb_fisher" => {
            let s = scenario.expect("scenario resolved");
            inputs["scenario"] = scenario_summary(s);
            (Some(kmb_fisher_information(s.rho_n(), s.delta())?), false)
        }
        "bernoulli_kl" => {
            let n = get_param(values, "n")?;
            let theta0 = get_param(values, "theta0")?;
            let v = bernoulli_kl(n, theta0)?;
            (Some(v).filter(|v| v.is_finite()), !v.is_finite())
        }
        "qsp_exponent" => {
            let theta0 = get_param(values, "theta0")?;
            let delta = values.get("delta").copied().unwrap_or(0.0);
            let mu = values.get("mu_eps").copied().unwrap_or(0.0);
            let sigma = values.get("sigma_eps").copied().unwrap_or(0.0);
            (Some(qsp_composite_exponent(theta0, delta, mu, sigma)?), false)
        }
        "snr" => {
            let n = get_param(values, "n")?;
            let theta0 = get_param(values, "theta0")?;
            let m = get_param(values, "m")?;
            if m < 0.0 {
                return Err(CliError::Validation("m must be nonnegative".into()));
            }
            (Some(snr_bound(n, theta0, m as u64)?), false)
        }
        other => {
            return Err(CliError::Validation(format!(
                "unknown divergence op `{other}`"
            )))
        }
    };
    Ok(json!({
        "operation": format!("divergence/{op}"),
        "inputs": inputs,
        "value": value,
        "infinite": infinite,
    }))
}

fn run_complexity(
    formula: &str,
    values: &BTreeMap<String, f64>,
    constant: f64,
) -> CliResult<serde_json::Value> {
    let formula: ComplexityFormula = formula.parse().map_err(CliError::from)?;
    let mut query = ComplexityQuery::new(formula, values.clone());
    query.constant = constant;
    let value = sample_complexity(&query)?;
    Ok(json!({
        "operation": format!("complexity/{formula}"),
        "inputs": {"params": values, "constant": constant},
        "value": value,
        "infinite": false,
    }))
}

fn write_json(
    out: Option<&Path>,
    seed: u64,
    config: serde_json::Value,
    result: &serde_json::Value,
) -> CliResult<()> {
    let provenance = Provenance::new(seed, config);
    let artifact = json_artifact(&provenance, result)?;
    emit(out, &artifact)
}

fn run_wss(args: &WssArgs, seed: u64, out: Option<&Path>) -> CliResult<()> {
    if args.trials == 0 {
        return Err(CliError::Validation("trials must be positive".into()));
    }
    let scenario = resolve_scenario(&args.scenario, None, seed)?;
    let theta = args.theta.unwrap_or(scenario.theta0());
    let spectrum = scenario.mixed_state(theta)?.spectrum(RANK_TOL);

    let lambda = scenario.lambda_gap();
    if args.test == "gap" && lambda.is_none() {
        return Err(CliError::Validation(
            "gap test needs a scenario with lambda_gap".into(),
        ));
    }

    let config = json!({
        "subcommand": "wss",
        "scenario": scenario_summary(&scenario),
        "m": args.m,
        "trials": args.trials,
        "test": args.test,
        "theta": theta,
    });
    let provenance = Provenance::new(seed, config);

    let mut content = provenance.csv_header();
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["seed", "m", "rows", "decision"])
        .map_err(|e| CliError::Io(e.to_string()))?;
    for trial in 0..args.trials {
        let trial_seed = derive_seed(seed, &[trial as u64]);
        let diagram = sample_young_diagram(&spectrum, args.m, trial_seed)?;
        let decision = match args.test.as_str() {
            "rank" => rank_test(&diagram, scenario.r_n()),
            "gap" => spectral_gap_test(&diagram, scenario.theta0(), lambda.unwrap()),
            other => {
                return Err(CliError::Validation(format!(
                    "unknown wss test `{other}`; use rank or gap"
                )))
            }
        };
        let rows: Vec<String> = diagram.rows().iter().map(|r| r.to_string()).collect();
        writer
            .write_record([
                trial_seed.to_string(),
                args.m.to_string(),
                rows.join(";"),
                decision.to_string(),
            ])
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    let body = writer
        .into_inner()
        .map_err(|e| CliError::Io(e.to_string()))?;
    content.push_str(&String::from_utf8_lossy(&body));
    emit(out, &content)
}

fn run_qsp(args: &QspArgs, seed: u64, out: Option<&Path>) -> CliResult<()> {
    let scenario = resolve_scenario(&args.scenario, None, seed)?;
    let lambda = scenario.lambda_gap().ok_or_else(|| {
        CliError::Validation("qsp needs a scenario with lambda_gap".into())
    })?;
    let filter = match args.mode.as_str() {
        "ideal" => {
            let delta = args.delta.ok_or_else(|| {
                CliError::Validation("ideal mode needs --delta".into())
            })?;
            build_ideal_filter(scenario.theta0(), lambda, delta)?
        }
        "polynomial" => {
            let degree = args.degree.ok_or_else(|| {
                CliError::Validation("polynomial mode needs --degree".into())
            })?;
            let x = args.x.ok_or_else(|| {
                CliError::Validation("polynomial mode needs --x".into())
            })?;
            build_poly_filter(lambda, x, degree)?
        }
        other => {
            return Err(CliError::Validation(format!(
                "unknown filter mode `{other}`"
            )))
        }
    };
    let theta = args.theta.unwrap_or(scenario.theta0());
    let p = apply_qsp_channel(&scenario, theta, &filter)?;
    let run = sample_flag_counts(p, args.m_ber, derive_seed(seed, &[1]))?;
    let delta_hat = filter.delta;
    let p0 = delta_hat;
    let p1 = (1.0 - 2.0 * delta_hat) * scenario.theta0() + delta_hat;
    let decision = midpoint_decision(&run, p0, p1);
    let budget = qsp_budget(
        delta_hat.max(1e-12),
        lambda,
        args.x.unwrap_or(filter.x),
        args.beta,
        scenario.theta0(),
    )?;

    let config = json!({
        "subcommand": "qsp",
        "scenario": scenario_summary(&scenario),
        "mode": args.mode,
        "delta": args.delta,
        "x": args.x,
        "degree": args.degree,
        "theta": theta,
        "m_ber": args.m_ber,
        "beta": args.beta,
    });
    let result = json!({
        "p_true": run.p_true,
        "successes": run.successes,
        "m_ber": run.m_ber,
        "decision": decision,
        "filter": {
            "mode": filter.mode,
            "threshold": filter.threshold,
            "delta": filter.delta,
            "epsilon": filter.epsilon,
            "gap": filter.gap,
        },
        "budget": budget,
    });
    write_json(out, seed, config, &result)
}

fn parse_strategy(name: &str, filter_delta: Option<f64>) -> CliResult<Strategy> {
    match name {
        "rank_wss" => Ok(Strategy::RankWss),
        "purity_wss" => Ok(Strategy::PurityWss),
        "gap_wss" => Ok(Strategy::GapWss),
        "hybrid_wss" => Ok(Strategy::HybridWss),
        "naive_tomography" => Ok(Strategy::NaiveTomography),
        "dme_qsp" => {
            let delta = filter_delta.ok_or_else(|| {
                CliError::Validation("strategy dme_qsp needs filter_delta".into())
            })?;
            Ok(Strategy::DmeQsp(DmeQspConfig {
                filter_delta: delta,
                rule: CountRule::Midpoint,
            }))
        }
        other => Err(CliError::Validation(format!(
            "unknown strategy `{other}`"
        ))),
    }
}

fn run_scan(
    scan: &ScanConfig,
    seed: u64,
    out: Option<&Path>,
    emit_plot: bool,
    _format: Option<OutputFormat>,
) -> CliResult<()> {
    if scan.sweep.values.is_empty() {
        return Err(CliError::Validation("sweep.values: empty".into()));
    }
    let strategy = parse_strategy(&scan.strategy, scan.filter_delta)?;
    let template = &scan.scenario;

    let config = serde_json::to_value(scan)
        .map_err(|e| CliError::Validation(format!("scan config: {e}")))?;
    let provenance = Provenance::new(seed, json!({"subcommand": "scan", "scan": config}));

    let mut rows = Vec::new();
    let mut plot_rows = Vec::new();
    for (i, &control) in scan.sweep.values.iter().enumerate() {
        let (theta0, r_n) = match scan.sweep.axis.as_str() {
            "theta0" => (control, template.r_n),
            "r_n" => {
                let theta0 = template.theta0.ok_or_else(|| {
                    CliError::Validation(
                        "scenario.theta0: required when sweep.axis is not theta0".into(),
                    )
                })?;
                if control.fract() != 0.0 || control < 1.0 {
                    return Err(CliError::Validation(format!(
                        "sweep.values[{i}] = {control} is not a valid rank"
                    )));
                }
                (theta0, control as usize)
            }
            other => {
                return Err(CliError::Validation(format!(
                    "sweep.axis `{other}` is not supported; use theta0 or r_n"
                )))
            }
        };
        let point_seed = derive_seed(seed, &[i as u64]);
        let scenario = random_scenario(
            template.d,
            r_n,
            template.r_s,
            theta0,
            template.lambda_gap,
            point_seed,
        )?;
        let search = find_sample_complexity(
            &scenario,
            &strategy,
            scan.target_beta,
            scan.alpha_cap,
            scan.trials,
            derive_seed(seed, &[1000, i as u64]),
        )?;
        let est = &search.estimate;
        rows.push([
            control.to_string(),
            search.m_star.to_string(),
            est.alpha_hat.to_string(),
            est.beta_hat.to_string(),
            est.beta_ci.0.to_string(),
            est.beta_ci.1.to_string(),
            point_seed.to_string(),
        ]);
        plot_rows.push([
            control.ln().to_string(),
            (search.m_star as f64).ln().to_string(),
        ]);
    }

    let mut content = provenance.csv_header();
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record([
            "control", "m_star", "alpha_hat", "beta_hat", "ci_lo", "ci_hi", "seed",
        ])
        .map_err(|e| CliError::Io(e.to_string()))?;
    for row in &rows {
        writer
            .write_record(row)
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    let body = writer
        .into_inner()
        .map_err(|e| CliError::Io(e.to_string()))?;
    content.push_str(&String::from_utf8_lossy(&body));
    emit(out, &content)?;

    if emit_plot {
        let target = out.ok_or_else(|| {
            CliError::Validation("--emit-plot-data needs --out for the plot file".into())
        })?;
        let plot_path = target.with_extension("plot.csv");
        let mut plot = provenance.csv_header();
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["log_control", "log_m_star"])
            .map_err(|e| CliError::Io(e.to_string()))?;
        for row in &plot_rows {
            writer
                .write_record(row)
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
        let body = writer
            .into_inner()
            .map_err(|e| CliError::Io(e.to_string()))?;
        plot.push_str(&String::from_utf8_lossy(&body));
        emit(Some(&plot_path), &plot)?;
    }
    Ok(())
}

fn run_twirl_check(args: &TwirlCheckArgs, seed: u64, out: Option<&Path>) -> CliResult<()> {
    let basis = build_schur_basis(args.m, args.d)?;
    let dim = basis.space_dim();
    let mut runs = Vec::new();
    let mut max_residual = 0.0f64;
    for i in 0..args.n_random {
        let mut rng = rng_from(seed, &[i as u64]);
        let u = haar_unitary(dim, &mut rng);
        let mut diag = CMat::zeros(dim, dim);
        for k in 0..dim {
            diag[(k, k)] = num_complex::Complex64::new(rng.random::<f64>(), 0.0);
        }
        let povm_element = hermitian_part(&(&u * diag * u.adjoint()));
        let outcome = twirl(&povm_element, args.m, args.d)?;
        max_residual = max_residual.max(outcome.span_residual);
        let coeffs: Vec<serde_json::Value> = outcome
            .coeffs
            .iter()
            .map(|(partition, c)| json!({"partition": partition.to_string(), "c": c}))
            .collect();
        runs.push(json!({
            "span_residual": outcome.span_residual,
            "coeffs": coeffs,
        }));
    }
    let config = json!({
        "subcommand": "twirl-check",
        "m": args.m,
        "d": args.d,
        "n_random": args.n_random,
    });
    let result = json!({
        "m": args.m,
        "d": args.d,
        "n_random": args.n_random,
        "max_span_residual": max_residual,
        "runs": runs,
    });
    write_json(out, seed, config, &result)
}
