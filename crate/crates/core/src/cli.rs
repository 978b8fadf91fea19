//! Command-line front end. `run` is the whole program; the binary only wires
//! it to the process streams.

use std::ffi::OsString;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::capacity_bounds::{
    bound_report, dna_log_cardinality_lower_bound, figure2_default_grid, figure2_rows,
    optimal_sampling_ratio, Figure2Table,
};
use crate::channel::{transmit, transmit_poissonized, ChannelParams, Kernel};
use crate::counts::CountVector;
use crate::distributions::{truncated_rounded_input_pmf, DiscretePmf, DEFAULT_RHO};
use crate::error::{Error, Result};
use crate::experiment::{run_experiment_traced, ExperimentConfig, TRACE_HEADER};
use crate::mutual_info::{
    i_mmpe_integral, lipschitz_seminorm, mutual_information, spectrum_mc, PoissonChannelSpec,
    DEFAULT_QUAD_POINTS,
};
use crate::rng::RngStream;
use crate::verify;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "freqcap",
    version,
    about = "Capacity bounds and simulation for the frequency-based channel",
    args_override_self = true
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Report information quantities in bits instead of nats.
    #[arg(long, global = true)]
    bits: bool,
    #[arg(long, global = true, env = "FREQCAP_SEED", default_value_t = 1)]
    seed: u64,
    /// Worker threads, 0 for all cores. Does not affect results.
    #[arg(long, global = true, default_value_t = 0)]
    #[serde(skip)]
    threads: usize,
    /// Flat `key = value` file; keys are flag names, explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the main output here instead of stdout (figure2: the CSV table).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Converse and achievability bounds at one (g, r).
    Bounds(BoundsArgs),
    /// Log-cardinality lower bound for a DNA storage scenario.
    Dna(DnaArgs),
    /// Mutual information of the scalar Poisson channel.
    Mi(MiArgs),
    /// Monte-Carlo information spectrum.
    Spectrum(SpectrumArgs),
    /// Draw channel outputs for one codeword.
    Simulate(SimulateArgs),
    /// Random-coding experiment with threshold and ML decoding.
    Experiment(ExperimentArgs),
    /// Run the built-in property checks.
    Verify(VerifyArgs),
    /// Bound-versus-KL table for plotting.
    Figure2(Figure2Args),
}

#[derive(Debug, Args, Serialize)]
struct BoundsArgs {
    #[arg(long)]
    g: f64,
    #[arg(long)]
    r: f64,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("beta_spec").required(true).args(["beta", "beta_log_a"])))]
struct DnaArgs {
    #[arg(long, default_value_t = 4)]
    alphabet: u32,
    /// Raw β (molecule length per nat of ln K).
    #[arg(long)]
    beta: Option<f64>,
    /// The product β·ln|A|.
    #[arg(long)]
    beta_log_a: Option<f64>,
    /// Total synthesized nucleotides K·L.
    #[arg(long)]
    kl: f64,
    /// Use the correction coefficient of the optimized sampling ratio.
    #[arg(long)]
    optimized: bool,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("input_spec").required(true).args(["g", "input"])))]
struct InputArgs {
    /// Budget g of the truncated, rounded Gamma(1/2, 2g) input law.
    #[arg(long)]
    g: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_RHO)]
    rho: f64,
    /// JSON input PMF (`{"offset": k, "log_weights": [...]}`) instead of the Gamma law.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Channel gain a in Z ~ Poi(a·X).
    #[arg(long)]
    gain: f64,
}

#[derive(Debug, Args, Serialize)]
struct MiArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Also evaluate the I-MMPE integral.
    #[arg(long)]
    mmpe: bool,
    #[arg(long, default_value_t = DEFAULT_QUAD_POINTS)]
    quad_points: usize,
}

#[derive(Debug, Args, Serialize)]
struct SpectrumArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Per-letter thresholds at which to report the empirical CDF.
    #[arg(long, value_delimiter = ',')]
    thresholds: Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    g: f64,
    #[arg(long)]
    r: f64,
    /// Comma-separated codeword; defaults to floor(g) copies of every type.
    #[arg(long, value_delimiter = ',')]
    codeword: Vec<u64>,
    #[arg(long, default_value_t = 1000)]
    draws: usize,
    /// Sample the independent Poisson surrogate instead of the multinomial.
    #[arg(long)]
    poissonized: bool,
    /// Symmetric read-error probability.
    #[arg(long)]
    error_rate: Option<f64>,
    /// Write every output vector to this file in the binary FQCV framing.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct ExperimentArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    messages: Option<u64>,
    #[arg(long)]
    log_gamma: Option<f64>,
    #[arg(long)]
    decoder: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    pilot_samples: Option<usize>,
    #[arg(long)]
    spectrum_samples: Option<usize>,
    #[arg(long)]
    max_attempts_per_word: Option<u64>,
    /// Per-trial CSV trace.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SuiteArg {
    Appendix,
    Channel,
    All,
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    suite: SuiteArg,
}

#[derive(Debug, Args, Serialize)]
struct Figure2Args {
    #[arg(long, default_value_t = 4)]
    alphabet: u32,
    /// β values as products β·ln|A|.
    #[arg(long, value_delimiter = ',', conflicts_with = "beta")]
    beta_log_a: Vec<f64>,
    /// Raw β values.
    #[arg(long, value_delimiter = ',')]
    beta: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    kl: Vec<f64>,
}

/// What a subcommand hands back for rendering.
struct Report {
    result: Value,
    /// Top-level result keys holding information quantities, with their
    /// power of nats (variances carry 2).
    info_keys: &'static [(&'static str, i32)],
    /// Exit with status 1 after printing (e.g. failed checks).
    failed: bool,
}

impl Report {
    fn new(result: Value, info_keys: &'static [(&'static str, i32)]) -> Self {
        Report {
            result,
            info_keys,
            failed: false,
        }
    }
}

/// Runs the program on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<String> = args
        .into_iter()
        .map(|a| a.into().to_string_lossy().into_owned())
        .collect();
    let args = match splice_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            let _ = writeln!(stderr, "{}", Cli::command().render_usage());
            return 2;
        }
    };
    // negative values reach validation and fail as domain errors, not usage errors
    let command = Cli::command().mut_subcommands(|sub| sub.mut_args(|a| {
        let takes_value = a.get_action().takes_values();
        a.allow_negative_numbers(takes_value)
    }));
    let parsed = command
        .try_get_matches_from(args)
        .and_then(|m| Cli::from_arg_matches(&m));
    let cli = match parsed {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::Config(_) => {
                    let _ = writeln!(stderr, "{}", Cli::command().render_usage());
                    2
                }
                _ => 1,
            }
        }
    }
}

const SUBCOMMANDS: &[&str] = &[
    "bounds", "dna", "mi", "spectrum", "simulate", "experiment", "verify", "figure2",
];

/// Inserts `--key value` pairs from a `--config` file right after the
/// subcommand, so that flags given on the command line override them.
fn splice_config(mut args: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else if a == "--config" {
            path = args.get(i + 1).cloned();
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = fs::read_to_string(&path).map_err(|source| Error::Io {
        path: PathBuf::from(&path),
        source,
    })?;
    let Some(pos) = args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else {
        return Ok(args);
    };
    let mut injected = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("{path}:{}: expected key = value", lineno + 1)))?;
        let flag = format!("--{}", k.trim().replace('_', "-"));
        match v.trim() {
            "true" => injected.push(flag),
            "false" => {}
            v => injected.push(format!("{flag}={v}")),
        }
    }
    args.splice(pos + 1..pos + 1, injected);
    Ok(args)
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<bool> {
    let report = match &cli.command {
        Command::Bounds(a) => cmd_bounds(a)?,
        Command::Dna(a) => cmd_dna(a)?,
        Command::Mi(a) => cmd_mi(a)?,
        Command::Spectrum(a) => cmd_spectrum(a, cli)?,
        Command::Simulate(a) => cmd_simulate(a, cli)?,
        Command::Experiment(a) => cmd_experiment(a, cli)?,
        Command::Verify(a) => cmd_verify(a, cli)?,
        Command::Figure2(a) => return cmd_figure2(a, cli, stdout, stderr),
    };
    let mut result = report.result;
    if cli.bits {
        scale_to_bits(&mut result, report.info_keys);
    }
    let rendered = render(cli, &result)?;
    emit(cli.out.as_deref(), &rendered, stdout)?;
    Ok(!report.failed)
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => write_file(path, text.as_bytes()),
        None => stdout.write_all(text.as_bytes()).map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn scale_to_bits(result: &mut Value, keys: &[(&str, i32)]) {
    let Value::Object(map) = result else { return };
    for &(key, power) in keys {
        let factor = std::f64::consts::LN_2.powi(power);
        if let Some(v) = map.get_mut(key) {
            scale_value(v, factor);
        }
    }
}

fn scale_value(v: &mut Value, factor: f64) {
    match v {
        Value::Number(n) => {
            if let Some(x) = n.as_f64() {
                *v = json!(x / factor);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|i| scale_value(i, factor)),
        _ => {}
    }
}

fn envelope(cli: &Cli, result: &Value) -> Value {
    let command = serde_json::to_value(&cli.command).unwrap_or(Value::Null);
    let (name, args) = match command {
        Value::Object(m) => m.into_iter().next().unwrap_or((String::new(), Value::Null)),
        other => (String::new(), other),
    };
    json!({
        "command": name,
        "config": {
            "seed": cli.seed,
            "format": cli.format,
            "bits": cli.bits,
            "config_file": cli.config,
            "out": cli.out,
            "args": args,
        },
        "units": if cli.bits { "bits" } else { "nats" },
        "result": result,
    })
}

fn render(cli: &Cli, result: &Value) -> Result<String> {
    let env = envelope(cli, result);
    match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&env)
                .map_err(|e| Error::numeric("render", e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Text => {
            let mut lines = Vec::new();
            flatten("", &env, &mut lines);
            Ok(lines
                .into_iter()
                .map(|(k, v)| format!("{k}: {v}\n"))
                .collect())
        }
        Format::Csv => {
            let mut out = format!("# {}\n", serde_json::to_string(&env["config"]).unwrap_or_default());
            // a list of records (checks, rows) becomes one CSV row per record;
            // the remaining scalars go into comment lines
            let records = result.as_object().and_then(|m| {
                m.iter().find(|(_, v)| {
                    v.as_array().is_some_and(|a| !a.is_empty() && a.iter().all(Value::is_object))
                })
            });
            let rows: Vec<&Value> = match records {
                Some((key, list)) => {
                    let mut rest = Vec::new();
                    for (k, v) in result.as_object().into_iter().flatten() {
                        if k != key {
                            flatten(k, v, &mut rest);
                        }
                    }
                    for (k, v) in rest {
                        out.push_str(&format!("# {k} = {v}\n"));
                    }
                    list.as_array().map(|a| a.iter().collect()).unwrap_or_default()
                }
                None => vec![result],
            };
            for (i, row) in rows.into_iter().enumerate() {
                let mut cols = Vec::new();
                flatten("", row, &mut cols);
                if i == 0 {
                    let header: Vec<String> = cols.iter().map(|(k, _)| csv_field(k)).collect();
                    out.push_str(&header.join(","));
                    out.push('\n');
                }
                let line: Vec<String> = cols.iter().map(|(_, v)| csv_field(v)).collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
            Ok(out)
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Flattens nested objects into dotted keys; arrays of scalars are joined with `;`.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, child) in m {
                flatten(&key(k), child, out);
            }
        }
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            let joined: Vec<String> = items.iter().map(scalar).collect();
            out.push((prefix.to_string(), joined.join(";")));
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), child, out);
            }
        }
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn to_value<T: Serialize>(t: &T) -> Result<Value> {
    serde_json::to_value(t).map_err(|e| Error::numeric("serialize", e.to_string()))
}

fn merge(base: Value, extra: Value) -> Value {
    match (base, extra) {
        (Value::Object(mut a), Value::Object(b)) => {
            a.extend(b);
            Value::Object(a)
        }
        (a, _) => a,
    }
}

fn cmd_bounds(a: &BoundsArgs) -> Result<Report> {
    let rep = bound_report(a.g, a.r)?;
    let opt = optimal_sampling_ratio()?;
    let result = merge(
        to_value(&rep)?,
        json!({ "optimal_ratio": opt.mu_star, "optimal_offset": opt.offset.get() }),
    );
    Ok(Report::new(
        result,
        &[("converse", 1), ("achievability", 1), ("gap", 1), ("optimal_offset", 1)],
    ))
}

fn cmd_dna(a: &DnaArgs) -> Result<Report> {
    let ln_a = (a.alphabet as f64).ln();
    let beta = match (a.beta, a.beta_log_a) {
        (Some(b), _) => b,
        (None, Some(p)) => p / ln_a,
        (None, None) => return Err(Error::Config("one of --beta or --beta-log-a is required".into())),
    };
    let s = dna_log_cardinality_lower_bound(a.kl, beta, a.alphabet, a.optimized)?;
    Ok(Report::new(
        to_value(&s)?,
        &[("pseudo_rate", 1), ("log_m_leading", 1), ("log_m_lower", 1)],
    ))
}

fn load_input(a: &InputArgs) -> Result<DiscretePmf> {
    match (&a.input, a.g) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        }
        (None, Some(g)) => truncated_rounded_input_pmf(g, a.rho),
        (None, None) => Err(Error::Config("one of --g or --input is required".into())),
    }
}

fn cmd_mi(a: &MiArgs) -> Result<Report> {
    let input = load_input(&a.input)?;
    let spec = PoissonChannelSpec::new(input.clone(), a.input.gain)?;
    let mut result = Map::new();
    result.insert("gain".into(), json!(spec.gain()));
    result.insert("input_support".into(), json!(input.support_bounds()));
    result.insert("input_mean".into(), json!(input.mean()));
    result.insert("input_entropy".into(), json!(input.entropy().get()));
    result.insert("z_max".into(), json!(spec.z_max()));
    result.insert("mutual_information".into(), json!(mutual_information(&spec)?.get()));
    if input.prob(0) == 0.0 {
        result.insert("lipschitz_seminorm".into(), json!(lipschitz_seminorm(&spec)?.get()));
    }
    if a.mmpe {
        let v = i_mmpe_integral(&input, a.input.gain, a.quad_points)?;
        result.insert("i_mmpe".into(), json!(v.get()));
    }
    Ok(Report::new(
        Value::Object(result),
        &[("input_entropy", 1), ("mutual_information", 1), ("lipschitz_seminorm", 1), ("i_mmpe", 1)],
    ))
}

fn cmd_spectrum(a: &SpectrumArgs, cli: &Cli) -> Result<Report> {
    let input = load_input(&a.input)?;
    let spec = PoissonChannelSpec::new(input, a.input.gain)?;
    let est = spectrum_mc(&spec, a.n, a.samples, &a.thresholds, &RngStream::new(cli.seed, 0), cli.threads)?;
    let result = merge(
        to_value(&est)?,
        json!({ "mutual_information": mutual_information(&spec)?.get() }),
    );
    Ok(Report::new(
        result,
        &[("mean", 1), ("variance", 2), ("thresholds", 1), ("mutual_information", 1)],
    ))
}

fn cmd_simulate(a: &SimulateArgs, cli: &Cli) -> Result<Report> {
    let mut params = ChannelParams::new(a.n, a.g, a.r)?;
    if let Some(e) = a.error_rate {
        params = params.with_kernel(Kernel::symmetric(a.n, e)?)?;
    }
    let x = if a.codeword.is_empty() {
        CountVector::new(vec![a.g.floor().max(1.0) as u64; a.n])
    } else {
        CountVector::new(a.codeword.clone())
    };
    let mut rng = RngStream::new(cli.seed, 0);
    let mut sums = vec![0u64; a.n];
    let mut totals = Vec::with_capacity(a.draws);
    let mut trace = Vec::new();
    for _ in 0..a.draws {
        let y = if a.poissonized {
            transmit_poissonized(&x, &params, &mut rng)?
        } else {
            transmit(&x, &params, &mut rng)?
        };
        for (s, &v) in sums.iter_mut().zip(y.as_slice()) {
            *s += v;
        }
        totals.push(y.total());
        if a.trace.is_some() {
            y.write_fqcv(&mut trace).map_err(|source| Error::Io {
                path: PathBuf::from("<trace buffer>"),
                source,
            })?;
        }
    }
    if let Some(path) = &a.trace {
        write_file(path, &trace)?;
    }
    let draws = a.draws.max(1) as f64;
    let mean_counts: Vec<f64> = sums.iter().map(|&s| s as f64 / draws).collect();
    let mean_total = totals.iter().sum::<u64>() as f64 / draws;
    let result = json!({
        "codeword": x.as_slice(),
        "total_samples": params.total_samples(),
        "draws": a.draws,
        "poissonized": a.poissonized,
        "mean_counts": mean_counts,
        "mean_total": mean_total,
        "all_totals_exact": totals.iter().all(|&t| t == params.total_samples()),
    });
    Ok(Report::new(result, &[]))
}

fn experiment_config(a: &ExperimentArgs, cli: &Cli) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::default();
    let sets: [(&str, Option<String>); 12] = [
        ("n", a.n.map(|v| v.to_string())),
        ("g", a.g.map(|v| v.to_string())),
        ("r", a.r.map(|v| v.to_string())),
        ("rho", a.rho.map(|v| v.to_string())),
        ("delta", a.delta.map(|v| v.to_string())),
        ("messages", a.messages.map(|v| v.to_string())),
        ("log_gamma", a.log_gamma.map(|v| v.to_string())),
        ("decoder", a.decoder.clone()),
        ("trials", a.trials.map(|v| v.to_string())),
        ("pilot_samples", a.pilot_samples.map(|v| v.to_string())),
        ("spectrum_samples", a.spectrum_samples.map(|v| v.to_string())),
        ("max_attempts_per_word", a.max_attempts_per_word.map(|v| v.to_string())),
    ];
    for (k, v) in sets {
        if let Some(v) = v {
            c.set(k, &v)?;
        }
    }
    c.seed = cli.seed;
    c.threads = cli.threads;
    c.validate()?;
    Ok(c)
}

fn cmd_experiment(a: &ExperimentArgs, cli: &Cli) -> Result<Report> {
    let config = experiment_config(a, cli)?;
    let (report, trace) = run_experiment_traced(&config)?;
    if let Some(path) = &a.trace {
        let mut buf = String::from(TRACE_HEADER);
        buf.push('\n');
        for row in &trace {
            buf.push_str(&row.to_csv_line());
            buf.push('\n');
        }
        write_file(path, buf.as_bytes())?;
    }
    Ok(Report::new(
        to_value(&report)?,
        &[
            ("rate", 1),
            ("mutual_information", 1),
            ("log_gamma", 1),
            ("achievability", 1),
            ("converse", 1),
            ("true_density_mean", 1),
        ],
    ))
}

fn cmd_verify(a: &VerifyArgs, cli: &Cli) -> Result<Report> {
    let checks = match a.suite {
        SuiteArg::Appendix => verify::appendix_suite(cli.seed)?,
        SuiteArg::Channel => verify::channel_suite(cli.seed)?,
        SuiteArg::All => verify::run_all(cli.seed)?,
    };
    let failed = checks.iter().filter(|c| !c.passed).count();
    let result = json!({
        "total": checks.len(),
        "failed": failed,
        "checks": checks,
    });
    Ok(Report {
        result,
        info_keys: &[],
        failed: failed > 0,
    })
}

/// Writes the bound table for `betas × kl_grid` as CSV to `path`.
pub fn emit_figure2(betas: &[f64], kl_grid: &[f64], alphabet_size: u32, path: &Path) -> Result<Figure2Table> {
    let table = figure2_rows(betas, kl_grid, alphabet_size);
    let mut w = BufWriter::new(fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?);
    w.write_all(table.to_csv().as_bytes())
        .and_then(|_| w.flush())
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
    Ok(table)
}

fn cmd_figure2(
    a: &Figure2Args,
    cli: &Cli,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<bool> {
    let (default_betas, default_kl) = figure2_default_grid(a.alphabet);
    let ln_a = (a.alphabet as f64).ln();
    let betas: Vec<f64> = if !a.beta.is_empty() {
        a.beta.clone()
    } else if !a.beta_log_a.is_empty() {
        a.beta_log_a.iter().map(|p| p / ln_a).collect()
    } else {
        default_betas
    };
    let kl = if a.kl.is_empty() { default_kl } else { a.kl.clone() };
    let table = match &cli.out {
        Some(path) => emit_figure2(&betas, &kl, a.alphabet, path)?,
        None => figure2_rows(&betas, &kl, a.alphabet),
    };
    let text = match (cli.format, &cli.out) {
        (Format::Csv, None) => table.to_csv(),
        _ => {
            let mut result = to_value(&table)?;
            if cli.out.is_some() {
                result = json!({
                    "path": cli.out,
                    "rows": table.rows.len(),
                    "warnings": table.warnings,
                });
            }
            render(cli, &result)?
        }
    };
    stdout.write_all(text.as_bytes()).map_err(|source| Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })?;
    for w in &table.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    Ok(true)
}
