//! Command-line front end: `integrate`, `bench`, `sw` and `price`.
//!
//! Every run is reproducible from its command line. Output CSV files start
//! with `#`-prefixed `key=value` lines recording the effective configuration
//! (worker count and output paths excluded, so files compare byte-for-byte
//! across machines).

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::applications::{price_option, reference_price, sw_estimate, BarrierKind, GaussianPair, OptionContract};
use crate::error::{invalid, Error, Result};
use crate::estimator::{
    estimate_cvnn, estimate_cvnn_loo, estimate_mc, AuxPolicy, AuxRule, EstimateRecord, Method, DEFAULT_AUX_CAP,
};
use crate::harness::{
    builtin_integrands, format_float, replication_seed, run_bench, write_bench_csv, write_records_csv, BenchConfig,
    SpaceKind,
};
use crate::seed::derive_seed;
use crate::spaces::MarketModel;

/// Parsed command line.
#[derive(Debug, Parser)]
#[command(name = "cvnn", version, about = "Control-neighbors Monte Carlo integration")]
#[command(args_override_self = true)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One estimate of a registered integrand.
    Integrate(IntegrateArgs),
    /// RMSE over replications on a grid of sample sizes.
    Bench(BenchArgs),
    /// Sliced-Wasserstein distance between two Gaussian empirical measures.
    Sw(SwArgs),
    /// Barrier-option pricing under Black-Scholes or Heston dynamics.
    Price(PriceArgs),
}

#[derive(Debug, Args)]
pub struct AuxArgs {
    /// Auxiliary sample size rule: square, theory or fixed:<N>.
    #[arg(long, default_value = "square")]
    pub aux: String,
    #[arg(long, default_value_t = DEFAULT_AUX_CAP)]
    pub aux_cap: usize,
}

impl AuxArgs {
    fn rule(&self) -> Result<AuxRule> {
        Ok(AuxRule::new(self.aux.parse::<AuxPolicy>()?).with_cap(self.aux_cap))
    }
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    /// cube, gaussian, sphere or orthogonal.
    #[arg(long)]
    pub space: String,
    /// Cube/Gaussian dimension, sphere ambient dimension, or matrix size.
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub integrand: String,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub aux: AuxArgs,
    #[arg(long)]
    pub seed: u64,
    /// mc, cvnn or cvnn-loo.
    #[arg(long, default_value = "cvnn")]
    pub method: String,
    /// Append the record to this CSV file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub space: String,
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub integrand: String,
    #[arg(long, default_value = "mc,cvnn")]
    pub methods: String,
    #[arg(long, default_value = "10,100,1000,10000")]
    pub ngrid: String,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[command(flatten)]
    pub aux: AuxArgs,
    #[arg(long)]
    pub seed: u64,
    /// RMSE table (method,n,rmse,reps,slope).
    #[arg(long)]
    pub out: PathBuf,
    /// Optional per-replication records.
    #[arg(long)]
    pub records: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SwArgs {
    /// Ambient dimension q.
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 2000)]
    pub atoms: usize,
    /// Comma-separated numbers of projections.
    #[arg(long, default_value = "50,100,250,500,1000")]
    pub nproj: String,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value = "mc,cvnn")]
    pub methods: String,
    #[arg(long, default_value_t = 2.0)]
    pub sigma_x: f64,
    #[arg(long, default_value_t = 5.0)]
    pub sigma_y: f64,
    #[command(flatten)]
    pub aux: AuxArgs,
    #[arg(long)]
    pub seed: u64,
    /// Per-replication SW_2^2 records.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PriceArgs {
    /// bs or heston.
    #[arg(long, default_value = "bs")]
    pub model: String,
    /// up-in or up-out.
    #[arg(long, default_value = "up-out")]
    pub kind: String,
    /// Comma-separated numbers of simulated paths.
    #[arg(long, default_value = "500,1000,2000")]
    pub paths: String,
    #[arg(long, default_value_t = 240)]
    pub steps: usize,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value = "mc,cvnn")]
    pub methods: String,
    #[arg(long, default_value_t = 100.0)]
    pub strike: f64,
    #[arg(long, default_value_t = 130.0)]
    pub barrier: f64,
    /// Paths of the plain-MC reference price; 0 skips it.
    #[arg(long, default_value_t = 0)]
    pub oracle_paths: usize,
    /// Auxiliary path rule: square, theory or fixed:<N>.
    #[arg(long, default_value = "fixed:10000")]
    pub aux: String,
    #[arg(long, default_value_t = DEFAULT_AUX_CAP)]
    pub aux_cap: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub workers: Option<usize>,
}

/// A failure with its exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Entry point; returns the process exit code (0 success, 1 runtime error,
/// 2 usage error).
pub fn run(args: Vec<OsString>) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let parsed = match RunConfig::try_parse_from(args) {
        Ok(p) => p,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(parsed.command) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

const SUBCOMMANDS: [&str; 4] = ["integrate", "bench", "sw", "price"];

/// Replaces `--config FILE` with the file's `key=value` lines as `--key value`
/// flags placed right after the subcommand, so explicit flags still win.
fn expand_config(mut args: Vec<OsString>) -> std::result::Result<Vec<OsString>, String> {
    let Some(pos) = args.iter().position(|a| a == "--config") else {
        return Ok(args);
    };
    if pos + 1 >= args.len() {
        return Err("--config needs a file path".into());
    }
    let path = PathBuf::from(args.remove(pos + 1));
    args.remove(pos);
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut extra = Vec::new();
    let mut command = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key=value", path.display(), lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        if key == "command" {
            command = Some(value.to_string());
        } else {
            extra.push(OsString::from(format!("--{}", key.replace('_', "-"))));
            extra.push(OsString::from(value));
        }
    }
    let sub_pos = args.iter().skip(1).position(|a| SUBCOMMANDS.iter().any(|s| a == s));
    let insert_at = match (sub_pos, command) {
        (Some(p), _) => p + 2,
        (None, Some(cmd)) => {
            args.insert(1.min(args.len()), OsString::from(cmd));
            2.min(args.len())
        }
        (None, None) => return Err("no subcommand given".into()),
    };
    args.splice(insert_at..insert_at, extra);
    Ok(args)
}

fn dispatch(command: Command) -> Outcome<()> {
    let workers = match &command {
        Command::Integrate(a) => a.workers,
        Command::Bench(a) => a.workers,
        Command::Sw(a) => a.workers,
        Command::Price(a) => a.workers,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(Failure::Usage("--workers must be positive".into()));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| Failure::Runtime(invalid(format!("thread pool: {e}"))))?;
    pool.install(|| match command {
        Command::Integrate(a) => integrate(&a),
        Command::Bench(a) => bench(&a),
        Command::Sw(a) => sw(&a),
        Command::Price(a) => price(&a),
    })
}

fn usage(e: Error) -> Failure {
    match e {
        Error::InvalidInput(msg) => Failure::Usage(msg),
        other => Failure::Runtime(other),
    }
}

fn parse_list<T: std::str::FromStr>(flag: &str, text: &str) -> Outcome<Vec<T>> {
    text.split(',')
        .map(|s| s.trim().parse::<T>())
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|_| Failure::Usage(format!("--{flag}: cannot parse '{text}'")))
}

fn parse_methods(text: &str) -> Outcome<Vec<Method>> {
    text.split(',')
        .map(|s| s.trim().parse::<Method>().map_err(usage))
        .collect()
}

fn lookup_problem(
    space: &str,
    dim: usize,
    integrand: &str,
) -> Outcome<(crate::harness::IntegrandSpec, crate::spaces::DistributionSpec)> {
    let registry = builtin_integrands();
    let Some(kind) = SpaceKind::parse(space) else {
        let valid: Vec<&str> = SpaceKind::ALL.iter().map(|s| s.label()).collect();
        return Err(Failure::Usage(format!(
            "unknown space '{space}'; valid spaces: {}",
            valid.join(", ")
        )));
    };
    let Some(spec) = registry.get(integrand) else {
        return Err(Failure::Usage(format!(
            "unknown integrand '{integrand}'; valid integrands: {}",
            registry.labels().join(", ")
        )));
    };
    let law = kind.spec(dim);
    spec.check_space(&law).map_err(usage)?;
    Ok((spec.clone(), law))
}

fn kv(key: &str, value: impl Display) -> (String, String) {
    (key.to_string(), value.to_string())
}

fn header(command: &str, mut pairs: Vec<(String, String)>) -> Vec<(String, String)> {
    let mut out = vec![
        kv("tool", concat!("cvnn ", env!("CARGO_PKG_VERSION"))),
        kv("command", command),
    ];
    out.append(&mut pairs);
    out
}

fn integrate(a: &IntegrateArgs) -> Outcome<()> {
    let (integrand, law) = lookup_problem(&a.space, a.dim, &a.integrand)?;
    let method: Method = a.method.parse().map_err(usage)?;
    let rule = a.aux.rule().map_err(usage)?;
    if a.n == 0 || (method.needs_aux() && a.n < 2) {
        return Err(Failure::Usage("--n is too small for this method".into()));
    }
    let sample_seed = derive_seed(a.seed, &[crate::seed::role::PRIMARY]);
    let aux_seed = derive_seed(a.seed, &[crate::seed::role::AUXILIARY]);
    let sample = law.sample(a.n, sample_seed)?;
    let values = sample.map(|p| integrand.eval(p));
    let aux_n = rule.resolve(a.n, law.intrinsic_dim());
    let metric = law.natural_metric();
    let raw = match method {
        Method::Mc => EstimateRecord::new(Method::Mc, a.n, 0, a.seed, estimate_mc(&values)?),
        Method::Cvnn => estimate_cvnn(&sample, &values, metric, aux_n, aux_seed)?,
        Method::CvnnLoo => estimate_cvnn_loo(&sample, &values, metric, aux_n, aux_seed)?,
    };
    let mut record = EstimateRecord::new(method, a.n, raw.aux_n, a.seed, integrand.measure_mass() * raw.estimate)
        .with_labels(law.label(), a.dim, integrand.label);
    if let Some(t) = integrand.true_value(&law) {
        record = record.with_truth(t);
    }
    println!(
        "method={} space={} dim={} integrand={} n={} aux_n={} seed={} estimate={} true_value={} abs_error={}",
        record.method,
        record.space,
        record.dim,
        record.integrand,
        record.n,
        record.aux_n,
        record.seed,
        format_float(record.estimate),
        record.true_value.map(format_float).unwrap_or_default(),
        record.abs_error.map(format_float).unwrap_or_default(),
    );
    if let Some(path) = &a.out {
        append_record(path, &record, &a.aux)?;
    }
    Ok(())
}

fn append_record(path: &Path, record: &EstimateRecord, aux: &AuxArgs) -> Result<()> {
    let mut existing = if path.exists() {
        crate::harness::read_records_csv(path)?
    } else {
        Vec::new()
    };
    existing.push(record.clone());
    let comments = header("integrate", vec![kv("aux", &aux.aux), kv("aux_cap", aux.aux_cap)]);
    write_records_csv(path, &existing, &comments)
}

fn bench(a: &BenchArgs) -> Outcome<()> {
    let (integrand, law) = lookup_problem(&a.space, a.dim, &a.integrand)?;
    let config = BenchConfig {
        methods: parse_methods(&a.methods)?,
        n_grid: parse_list("ngrid", &a.ngrid)?,
        reps: a.reps,
        base_seed: a.seed,
        aux: a.aux.rule().map_err(usage)?,
    };
    let result = run_bench(&integrand, &law, &config).map_err(usage)?;
    let comments = header(
        "bench",
        vec![
            kv("space", &a.space),
            kv("dim", a.dim),
            kv("integrand", &a.integrand),
            kv("methods", &a.methods),
            kv("ngrid", &a.ngrid),
            kv("reps", a.reps),
            kv("seed", a.seed),
            kv("aux", &a.aux.aux),
            kv("aux_cap", a.aux.aux_cap),
        ],
    );
    write_bench_csv(&a.out, &result, &comments)?;
    if let Some(path) = &a.records {
        write_records_csv(path, &result.records, &comments)?;
    }
    for fit in &result.fits {
        println!("{}: slope {:.4}", fit.method, fit.slope);
    }
    Ok(())
}

fn sw(a: &SwArgs) -> Outcome<()> {
    let methods = parse_methods(&a.methods)?;
    let grid: Vec<usize> = parse_list("nproj", &a.nproj)?;
    let rule = a.aux.rule().map_err(usage)?;
    if a.reps == 0 || a.atoms == 0 || a.dim == 0 {
        return Err(Failure::Usage("--reps, --atoms and --dim must be positive".into()));
    }
    let pair = GaussianPair::draw(a.dim, a.sigma_x, a.sigma_y, a.atoms, a.seed)?;
    let truth = pair.sw2_exact();
    let mut records = Vec::new();
    for &n in &grid {
        let aux_n = rule.resolve(n, (a.dim.max(2) - 1) as f64);
        for rep in 0..a.reps {
            let seed = derive_seed(replication_seed(a.seed, rep), &[n as u64]);
            for &method in &methods {
                let value = sw_estimate(&pair.p, &pair.q, 2.0, n, method, seed, aux_n).map_err(usage)?;
                let used = if method.needs_aux() { aux_n } else { 0 };
                records.push(
                    EstimateRecord::new(method, n, used, seed, value)
                        .with_labels("sw-gaussian", a.dim, "sw2")
                        .with_rep(rep)
                        .with_truth(truth),
                );
            }
        }
    }
    let comments = header(
        "sw",
        vec![
            kv("dim", a.dim),
            kv("atoms", a.atoms),
            kv("nproj", &a.nproj),
            kv("reps", a.reps),
            kv("methods", &a.methods),
            kv("sigma_x", a.sigma_x),
            kv("sigma_y", a.sigma_y),
            kv("seed", a.seed),
            kv("aux", &a.aux.aux),
            kv("aux_cap", a.aux.aux_cap),
            kv("sw2_exact", format_float(truth)),
        ],
    );
    write_records_csv(&a.out, &records, &comments)?;
    print_spread(&records, &methods, &grid);
    Ok(())
}

fn print_spread(records: &[EstimateRecord], methods: &[Method], grid: &[usize]) {
    for &n in grid {
        for &m in methods {
            let xs: Vec<f64> = records
                .iter()
                .filter(|r| r.n == n && r.method == m)
                .map(|r| r.estimate)
                .collect();
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len().max(2) - 1) as f64).sqrt();
            println!("n={n} {m}: mean {mean:.6} sd {sd:.6}");
        }
    }
}

/// Market models with the parameters of the benchmark experiments.
pub fn benchmark_model(label: &str) -> Option<MarketModel> {
    let maturity = 2.0 / 12.0;
    match label {
        "bs" => Some(MarketModel::BlackScholes {
            s0: 100.0,
            rate: 0.1,
            sigma: 0.3,
            maturity,
        }),
        "heston" => Some(MarketModel::Heston {
            s0: 100.0,
            rate: 0.1,
            v0: 0.1,
            theta: 0.02,
            kappa: 4.0,
            xi: 0.9,
            rho: 0.8,
            maturity,
        }),
        _ => None,
    }
}

fn price(a: &PriceArgs) -> Outcome<()> {
    let model = benchmark_model(&a.model)
        .ok_or_else(|| Failure::Usage(format!("unknown model '{}'; valid models: bs, heston", a.model)))?;
    let kind = match a.kind.as_str() {
        "up-in" => BarrierKind::UpIn,
        "up-out" => BarrierKind::UpOut,
        other => {
            return Err(Failure::Usage(format!(
                "unknown option kind '{other}'; valid kinds: up-in, up-out"
            )))
        }
    };
    let contract = OptionContract {
        kind,
        strike: a.strike,
        barrier: a.barrier,
        maturity: model.maturity(),
        rate: model.rate(),
    };
    contract.validate().map_err(usage)?;
    let methods = parse_methods(&a.methods)?;
    let grid: Vec<usize> = parse_list("paths", &a.paths)?;
    let rule = AuxRule::new(a.aux.parse::<AuxPolicy>().map_err(usage)?).with_cap(a.aux_cap);
    let truth = if a.oracle_paths > 0 {
        let oracle = reference_price(
            &contract,
            &model,
            a.oracle_paths,
            a.steps,
            derive_seed(a.seed, &[u64::MAX]),
        )?;
        println!("reference price {:.6} (se {:.6})", oracle.price, oracle.std_error);
        Some(oracle)
    } else {
        None
    };
    let mut records = Vec::new();
    for &n in &grid {
        let aux_n = rule.resolve(n, (a.steps - 1) as f64);
        for rep in 0..a.reps {
            let seed = derive_seed(replication_seed(a.seed, rep), &[n as u64]);
            for &method in &methods {
                let mut rec = price_option(&contract, &model, n, a.steps, method, seed, aux_n)
                    .map_err(usage)?
                    .with_rep(rep);
                if let Some(t) = truth {
                    rec = rec.with_truth(t.price);
                }
                records.push(rec);
            }
        }
    }
    let mut pairs = vec![
        kv("model", &a.model),
        kv("kind", &a.kind),
        kv("paths", &a.paths),
        kv("steps", a.steps),
        kv("reps", a.reps),
        kv("methods", &a.methods),
        kv("strike", a.strike),
        kv("barrier", a.barrier),
        kv("seed", a.seed),
        kv("aux", &a.aux),
        kv("aux_cap", a.aux_cap),
        kv("oracle_paths", a.oracle_paths),
    ];
    if let Some(t) = truth {
        pairs.push(kv("reference_price", format_float(t.price)));
        pairs.push(kv("reference_se", format_float(t.std_error)));
    }
    write_records_csv(&a.out, &records, &header("price", pairs))?;
    print_spread(&records, &methods, &grid);
    Ok(())
}
