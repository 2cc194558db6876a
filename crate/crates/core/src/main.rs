use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use series_summary::ingest::{self, CumulativeTable};
use series_summary::model::{
    DEFAULT_D_EPSILON, DEFAULT_DTAU_MIN, DEFAULT_MAX_ITERS, DEFAULT_SEED, DEFAULT_S_MAX,
};
use series_summary::pipeline::DEFAULT_MARTINGALE_HORIZON;
use series_summary::report::{self, EpiParams};
use series_summary::{summarize, Dataset, Error, Hyperparameters, SummarizationResult};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INVARIANT: u8 = 3;

#[derive(Parser)]
#[command(name = "series-summary", version, about = "Summarize related time series as shapelet label words and predict one segment ahead")]
struct Cli {
    /// Worker threads for per-series work (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a dataset, run the summarization and write the summary and plot CSVs
    Summarize(SummarizeArgs),
    /// Write plot CSVs with shapelet and Martingale forecasts
    Predict(PredictArgs),
    /// Print the accumulated number of infections sum_{t<days} r0^(t/serial)
    Stats(StatsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Daily new confirmed minus daily new recovered (needs --confirmed and --recovered)
    NetInfections,
    /// Daily new deaths (needs --deaths)
    DailyDeaths,
    /// Date columns of --input taken as daily values
    RawDaily,
}

#[derive(Clone, Copy, Debug)]
enum KMax {
    DatasetSize,
    Fixed(usize),
}

impl FromStr for KMax {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "N" {
            return Ok(KMax::DatasetSize);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(KMax::Fixed(k)),
            _ => Err(format!("expected a positive integer or N, got {s:?}")),
        }
    }
}

#[derive(Args)]
struct DataArgs {
    #[arg(long, value_enum, default_value = "net-infections")]
    mode: Mode,
    #[arg(long)]
    confirmed: Option<PathBuf>,
    #[arg(long)]
    recovered: Option<PathBuf>,
    #[arg(long)]
    deaths: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// First date column to keep (label as in the header, e.g. 1/22/20)
    #[arg(long)]
    start_date: Option<String>,
    /// Last date column to keep
    #[arg(long)]
    end_date: Option<String>,
}

#[derive(Args)]
struct HyperArgs {
    /// Maximum number of clusters; N means the dataset size
    #[arg(long, default_value = "N")]
    kmax: KMax,
    /// Segment count bound (segments < smax)
    #[arg(long, default_value_t = DEFAULT_S_MAX)]
    smax: usize,
    /// Minimum length of the final segment
    #[arg(long, default_value_t = DEFAULT_DTAU_MIN)]
    dtau_min: usize,
    /// Transaction cost step of the segmentation sweep
    #[arg(long, default_value_t = DEFAULT_D_EPSILON)]
    d_epsilon: f64,
    /// z-normalize every series before clustering
    #[arg(long)]
    z_normalize: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: usize,
}

#[derive(Args)]
struct SummarizeArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    hyper: HyperArgs,
    #[arg(long, default_value_t = DEFAULT_MARTINGALE_HORIZON)]
    martingale_horizon: usize,
    #[arg(long, env = "SERIES_SUMMARY_OUT", default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    /// Summary document from a previous run; otherwise the data flags are used
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    hyper: HyperArgs,
    /// Restrict output to these series ids (repeatable)
    #[arg(long = "id")]
    ids: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_MARTINGALE_HORIZON)]
    martingale_horizon: usize,
    #[arg(long, env = "SERIES_SUMMARY_OUT", default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long, default_value_t = 2.25)]
    r0: f64,
    /// Serial interval in days
    #[arg(long, default_value_t = 4.25)]
    serial: f64,
    #[arg(long, default_value_t = 98)]
    days: usize,
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(Error::Parameter(_)) => EXIT_USAGE,
            Some(Error::InvalidIndex { .. }) | Some(Error::NoConvergence { .. }) => EXIT_INVARIANT,
            _ => EXIT_DATA,
        };
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        error: anyhow::anyhow!(msg.into()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let outcome = match cli.command {
        Command::Summarize(args) => cmd_summarize(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Stats(args) => cmd_stats(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn read_table(path: &Path, data: &DataArgs) -> Result<CumulativeTable, Failure> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let table = ingest::parse_cumulative_csv(file)
        .with_context(|| format!("cannot parse {}", path.display()))?;
    if data.start_date.is_some() || data.end_date.is_some() {
        return Ok(table.crop(data.start_date.as_deref(), data.end_date.as_deref())?);
    }
    Ok(table)
}

fn build_dataset(data: &DataArgs) -> Result<Dataset, Failure> {
    let required = |p: &Option<PathBuf>, flag: &str, mode: &str| {
        p.clone()
            .ok_or_else(|| usage(format!("--{flag} is required in {mode} mode")))
    };
    let dataset = match data.mode {
        Mode::NetInfections => {
            let c = required(&data.confirmed, "confirmed", "net-infections")?;
            let r = required(&data.recovered, "recovered", "net-infections")?;
            ingest::build_net_infections(&read_table(&c, data)?, &read_table(&r, data)?)?
        }
        Mode::DailyDeaths => {
            let d = required(&data.deaths, "deaths", "daily-deaths")?;
            ingest::build_daily_deaths(&read_table(&d, data)?)?
        }
        Mode::RawDaily => {
            let i = required(&data.input, "input", "raw-daily")?;
            ingest::build_raw_daily(&read_table(&i, data)?)?
        }
    };
    Ok(dataset)
}

fn hyperparameters(h: &HyperArgs, n: usize) -> Result<Hyperparameters, Failure> {
    let hyper = Hyperparameters {
        k_max: match h.kmax {
            KMax::DatasetSize => n,
            KMax::Fixed(k) => k,
        },
        s_max: h.smax,
        dtau_min: h.dtau_min,
        d_epsilon: h.d_epsilon,
        z_normalize: h.z_normalize,
        rng_seed: h.seed,
        max_iters: h.max_iters,
    };
    hyper.validate()?;
    Ok(hyper)
}

/// Re-checks the output invariants before anything is written.
fn verify(result: &SummarizationResult) -> Result<(), Failure> {
    let h = &result.manifest.hyperparameters;
    for s in &result.series {
        let broken = |what: &str| Failure {
            code: EXIT_INVARIANT,
            error: anyhow::anyhow!("invariant violated for {:?}: {what}", s.id),
        };
        s.boundaries
            .check(result.manifest.t, h.s_max, h.dtau_min)
            .map_err(|e| broken(&e.to_string()))?;
        if s.prediction.first() != s.observed.last() {
            return Err(broken("prediction is not anchored at the last observation"));
        }
        if s.prediction.len() != s.horizon + 1 || s.horizon < 1 {
            return Err(broken("prediction length does not match horizon"));
        }
        if s.cluster >= result.alphabet.k() {
            return Err(broken("cluster index out of range"));
        }
    }
    Ok(())
}

fn plot_file_name(index: usize, id: &str) -> String {
    let slug: String = id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    format!("{index:03}_{}.csv", slug.trim_matches('_'))
}

fn write_plots(
    result: &SummarizationResult,
    ids: &[String],
    martingale_horizon: usize,
    out: &Path,
) -> Result<usize, Failure> {
    let dir = out.join("plots");
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut written = 0;
    for (i, s) in result.series.iter().enumerate() {
        if !ids.is_empty() && !ids.contains(&s.id) {
            continue;
        }
        let csv = report::export_plot_series(result, &s.id, Some(martingale_horizon))?;
        let path = dir.join(plot_file_name(i, &s.id));
        fs::write(&path, csv).with_context(|| format!("cannot write {}", path.display()))?;
        written += 1;
    }
    Ok(written)
}

fn check_ids(result: &SummarizationResult, ids: &[String]) -> Result<(), Failure> {
    match ids.iter().find(|id| result.get(id).is_none()) {
        Some(id) => Err(Error::UnknownId(id.clone()).into()),
        None => Ok(()),
    }
}

fn run(data: &DataArgs, hyper: &HyperArgs) -> Result<SummarizationResult, Failure> {
    let dataset = build_dataset(data)?;
    let hyper = hyperparameters(hyper, dataset.n())?;
    let start = Instant::now();
    let result = summarize(&dataset, &hyper)?;
    let elapsed = start.elapsed().as_secs_f64();
    verify(&result)?;
    println!(
        "N={} T={} K={} runtime={elapsed:.3}s",
        result.manifest.n, result.manifest.t, result.manifest.k
    );
    Ok(result)
}

fn cmd_summarize(args: SummarizeArgs) -> Result<(), Failure> {
    if args.martingale_horizon < 1 {
        return Err(usage("--martingale-horizon must be at least 1"));
    }
    let result = run(&args.data, &args.hyper)?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    let path = args.out.join("summary.json");
    let file = File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
    report::export_summary(&result, BufWriter::new(file))?;
    let plots = write_plots(&result, &[], args.martingale_horizon, &args.out)?;
    println!("wrote {} and {plots} plot files", path.display());
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<(), Failure> {
    if args.martingale_horizon < 1 {
        return Err(usage("--martingale-horizon must be at least 1"));
    }
    let result = match &args.summary {
        Some(path) => {
            let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
            let result = report::import_summary(file)
                .with_context(|| format!("cannot read summary {}", path.display()))?;
            verify(&result)?;
            result
        }
        None => run(&args.data, &args.hyper)?,
    };
    check_ids(&result, &args.ids)?;
    let plots = write_plots(&result, &args.ids, args.martingale_horizon, &args.out)?;
    println!("wrote {plots} plot files to {}", args.out.join("plots").display());
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> Result<(), Failure> {
    let params = EpiParams::new(args.r0, args.serial, args.days)?;
    println!("{}", report::accumulated_infections(&params));
    Ok(())
}
