//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage and input errors, 2 for internal
//! failures (I/O, transport, diverged training). Primary output goes to
//! `--out` when given, written atomically, and to stdout otherwise.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::data::{
    fetch_player_masteries, generate_synthetic, load_catalog, load_csv, write_records, ApiConfig,
    ApiMode, ChampionCatalog, SynthConfig,
};
use crate::error::{Error, Result};
use crate::evaluation::{
    cohort_recommendations, grid_search, hit_rate_with, histogram, kfold_cv, popular_items,
    popularity_share, sample_cohort, uniform_edges, z_test_one_sided, HyperGrid,
};
use crate::io::{open_input, write_atomic};
use crate::ratings::{build_training_set, Dataset, MasteryRecord};
use crate::recommender::{
    format_recommendations, recommend_for_profile, top_champions, OutputFormat, ProfileScorer,
    PROFILE_SIZE,
};
use crate::slope_one::train_slope_one;
use crate::svd::{load_model, save_model, train, Hyperparams};

#[derive(Debug, Parser)]
#[command(name = "champrec", version, about = "Champion recommendations from mastery points")]
struct Cli {
    /// Seed for every random choice (initialization, shuffles, sampling).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Download mastery records for summoners (or read them from fixtures).
    Fetch(FetchArgs),
    /// Generate a synthetic mastery dataset.
    Synth(SynthArgs),
    /// Train an SVD model; `--out` is the model file, the objective trace goes to stdout.
    Train(TrainArgs),
    /// Recommend champions for one player.
    Recommend(RecommendArgs),
    /// K-fold cross-validated RMSE.
    Cv(CvArgs),
    /// Exhaustive grid search over epochs, lambda and gamma.
    Gridsearch(GridArgs),
    /// Popularity share of SVD and Slope One recommendations.
    Bias(BiasArgs),
    /// Leave-one-out hit rate.
    Hitrate(HitRateArgs),
    /// One-sided two-sample Z-test that mean(a) > mean(b).
    Ztest(ZTestArgs),
    /// Histogram of a column of values, as plot data.
    Hist(HistArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Preset {
    /// 20 epochs, lambda 0.005, gamma 0.02.
    PaperDefault,
    /// 20 epochs, lambda 0.4, gamma 0.0005.
    PaperTuned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Svd,
    SlopeOne,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Scenario {
    /// Two disjoint champion pools.
    TwoArchetype,
    /// A few champions played by everyone on top of niche pools.
    Skewed,
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value_t = Preset::PaperTuned)]
    preset: Preset,
    /// Latent dimensionality.
    #[arg(long)]
    factors: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Learning rate.
    #[arg(long, alias = "learning-rate")]
    gamma: Option<f64>,
    /// Regularization weight.
    #[arg(long, alias = "regularization")]
    lambda: Option<f64>,
    #[arg(long)]
    init_std: Option<f64>,
    /// Ridge penalty for folding in a new player; defaults to lambda.
    #[arg(long)]
    fold_in_lambda: Option<f64>,
}

impl ModelArgs {
    fn hyperparams(&self, seed: u64) -> Result<Hyperparams> {
        let mut h = match self.preset {
            Preset::PaperDefault => Hyperparams::paper_default(),
            Preset::PaperTuned => Hyperparams::paper_tuned(),
        };
        h.seed = seed;
        if let Some(v) = self.factors {
            h.factors = v;
        }
        if let Some(v) = self.epochs {
            h.epochs = v;
        }
        if let Some(v) = self.gamma {
            h.learning_rate = v;
        }
        if let Some(v) = self.lambda {
            h.regularization = v;
            h.fold_in_lambda = v;
        }
        if let Some(v) = self.init_std {
            h.init_std = v;
        }
        if let Some(v) = self.fold_in_lambda {
            h.fold_in_lambda = v;
        }
        h.validate()?;
        Ok(h)
    }
}

#[derive(Debug, Args)]
struct ApiArgs {
    /// TOML file with API settings (region, mode, fixture_dir, rate limits).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Read `<dir>/<summoner>.json` instead of calling the API.
    #[arg(long, conflicts_with = "live")]
    fixtures: Option<PathBuf>,
    /// Call the live API; the key is read from RIOT_API_KEY.
    #[arg(long)]
    live: bool,
    #[arg(long)]
    region: Option<String>,
}

impl ApiArgs {
    fn config(&self) -> Result<ApiConfig> {
        let mut cfg = match &self.config {
            Some(path) => ApiConfig::from_toml(&read_text(path)?)?,
            None => ApiConfig::default(),
        };
        if let Some(dir) = &self.fixtures {
            cfg.mode = ApiMode::Fixture;
            cfg.fixture_dir = dir.clone();
        }
        if self.live {
            cfg.mode = ApiMode::Live;
        }
        if let Some(region) = &self.region {
            cfg.region = region.clone();
        }
        Ok(cfg.with_env_key())
    }
}

#[derive(Debug, Args)]
struct FetchArgs {
    /// Summoner name; repeat for several players.
    #[arg(long, required = true)]
    summoner: Vec<String>,
    #[command(flatten)]
    api: ApiArgs,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, value_enum, default_value_t = Scenario::TwoArchetype)]
    scenario: Scenario,
    #[arg(long, default_value_t = 500)]
    users: usize,
    #[arg(long, default_value_t = 60)]
    items: u32,
    /// Skewed scenario: number of champions everyone plays.
    #[arg(long, default_value_t = 6)]
    popular: u32,
    /// Skewed scenario: number of niche pools.
    #[arg(long, default_value_t = 6)]
    archetypes: u32,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Mastery CSV.
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    /// Also write the objective trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RecommendArgs {
    /// Trained model file (SVD).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Mastery CSV: looked up with `--player`, and the training data for Slope One.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, conflicts_with = "summoner")]
    player: Option<String>,
    #[arg(long)]
    summoner: Option<String>,
    #[arg(short, long, default_value_t = 5)]
    k: usize,
    #[arg(long, value_enum, default_value_t = Algorithm::Svd)]
    algorithm: Algorithm,
    /// `champion_id,name` CSV used for display names.
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Timestamp to print; defaults to SOURCE_DATE_EPOCH, then the current time.
    #[arg(long)]
    generated_at: Option<String>,
    #[command(flatten)]
    api: ApiArgs,
}

#[derive(Debug, Args)]
struct CvArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Comma-separated epoch counts.
    #[arg(long = "epochs", value_delimiter = ',', default_value = "10,20")]
    epochs: Vec<usize>,
    #[arg(long = "lambda", alias = "regularization", value_delimiter = ',', default_value = "0.005,0.02,0.4")]
    lambda: Vec<f64>,
    #[arg(long = "gamma", alias = "learning-rate", value_delimiter = ',', default_value = "0.0005,0.005")]
    gamma: Vec<f64>,
    #[arg(long)]
    factors: Option<usize>,
}

#[derive(Debug, Args)]
struct BiasArgs {
    #[arg(long)]
    data: PathBuf,
    /// Number of players queried.
    #[arg(long, default_value_t = 100)]
    cohort: usize,
    #[arg(short, long, default_value_t = 5)]
    k: usize,
    /// Fraction of champions, by rating count, counted as popular.
    #[arg(long, default_value_t = 0.1)]
    decile: f64,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Debug, Args)]
struct HitRateArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(short, long, default_value_t = 5)]
    k: usize,
    /// Cap on the number of sampled players.
    #[arg(long)]
    max_users: Option<usize>,
    #[arg(long, value_enum, default_value_t = Algorithm::Svd)]
    algorithm: Algorithm,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Debug, Args)]
struct ZTestArgs {
    /// One value per line.
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
}

#[derive(Debug, Args)]
struct HistArgs {
    /// One value per line.
    #[arg(long)]
    values: PathBuf,
    /// Comma-separated ascending bin edges.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["bins", "low", "high"])]
    edges: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    bins: usize,
    #[arg(long, default_value_t = 0.5)]
    low: f64,
    #[arg(long, default_value_t = 10.5)]
    high: f64,
}

/// Runs the CLI with the process's stdout and stderr.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI against the given streams and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut out = Output { cli: &cli, stdout, stderr };
    match execute(&cli, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(out.stderr, "error: {e}");
            if e.is_user_error() {
                1
            } else {
                2
            }
        }
    }
}

struct Output<'a> {
    cli: &'a Cli,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Output<'_> {
    fn primary(&mut self, text: &str) -> Result<()> {
        match &self.cli.out {
            Some(path) => write_atomic(path, text.as_bytes()),
            None => Ok(self.stdout.write_all(text.as_bytes())?),
        }
    }

    fn warn(&mut self, message: &str) {
        let _ = writeln!(self.stderr, "warning: {message}");
    }
}

fn execute(cli: &Cli, out: &mut Output) -> Result<()> {
    let seed = cli.seed;
    let format = cli.format;
    match &cli.command {
        Command::Fetch(args) => {
            let cfg = args.api.config()?;
            let mut records = Vec::new();
            for name in &args.summoner {
                records.extend(fetch_player_masteries(name, &cfg)?);
            }
            out.primary(&render_records(&records, format)?)
        }
        Command::Synth(args) => {
            let cfg = match args.scenario {
                Scenario::TwoArchetype => SynthConfig::two_archetype(args.users, args.items, seed),
                Scenario::Skewed => {
                    if args.popular >= args.items {
                        return Err(Error::invalid("--popular must be below --items"));
                    }
                    SynthConfig::skewed(args.users, args.items, args.popular, args.archetypes, seed)
                }
            };
            out.primary(&render_records(&generate_synthetic(&cfg)?, format)?)
        }
        Command::Train(args) => {
            let h = args.model.hyperparams(seed)?;
            let path = cli
                .out
                .as_deref()
                .ok_or_else(|| Error::invalid("train needs --out for the model file"))?;
            let d = load_dataset(&args.data)?;
            let (model, trace) = train(&d, &h)?;
            let csv = trace_csv(&trace.objective);
            let shown = match format {
                OutputFormat::Text => trace
                    .objective
                    .iter()
                    .enumerate()
                    .map(|(e, j)| format!("epoch {:>3}  objective {j:.6}\n", e + 1))
                    .collect(),
                OutputFormat::Csv => csv.clone(),
                OutputFormat::Json => json(&serde_json::json!({
                    "hyperparams": h,
                    "objective": trace.objective,
                }))?,
            };
            save_model(&model, path)?;
            if let Some(trace_path) = &args.trace {
                write_atomic(trace_path, csv.as_bytes())?;
            }
            Ok(out.stdout.write_all(shown.as_bytes())?)
        }
        Command::Recommend(args) => recommend_command(args, format, out),
        Command::Cv(args) => {
            let h = args.model.hyperparams(seed)?;
            let report = kfold_cv(&load_dataset(&args.data)?, &h, args.folds, seed)?;
            let text = match format {
                OutputFormat::Json => json(&report)?,
                OutputFormat::Csv => {
                    let mut s = String::from("fold,rmse\n");
                    for (i, r) in report.fold_rmse.iter().enumerate() {
                        s.push_str(&format!("{},{r}\n", i + 1));
                    }
                    s
                }
                OutputFormat::Text => format!(
                    "mean rmse  {:.6}\nfold rmse  {}\nevaluated  {}\nskipped    {}\n",
                    report.mean_rmse,
                    join(report.fold_rmse.iter().map(|r| format!("{r:.6}"))),
                    report.evaluated,
                    report.skipped
                ),
            };
            out.primary(&text)
        }
        Command::Gridsearch(args) => {
            let grid = HyperGrid {
                epochs: args.epochs.clone(),
                regularization: args.lambda.clone(),
                learning_rate: args.gamma.clone(),
            };
            let mut base = Hyperparams::paper_tuned();
            base.seed = seed;
            if let Some(f) = args.factors {
                base.factors = f;
            }
            let result = grid_search(&load_dataset(&args.data)?, &grid, &base, args.folds, seed)?;
            for row in result.table.iter().filter(|r| r.diverged) {
                out.warn(&format!(
                    "epochs {} lambda {} gamma {} diverged",
                    row.epochs, row.lambda, row.gamma
                ));
            }
            let text = match format {
                OutputFormat::Json => json(&result)?,
                OutputFormat::Csv => result.to_csv(),
                OutputFormat::Text => format!(
                    "best epochs {} lambda {} gamma {} mean rmse {:.6}\n\n{}",
                    result.best.epochs,
                    result.best.regularization,
                    result.best.learning_rate,
                    result.best_rmse,
                    result.to_csv()
                ),
            };
            out.primary(&text)
        }
        Command::Bias(args) => {
            let h = args.model.hyperparams(seed)?;
            let records = load_csv(&args.data)?;
            let d = build_training_set(&records)?;
            let cohort = sample_cohort(&records, args.cohort, seed);
            let svd = train(&d, &h)?.0;
            let slope_one = train_slope_one(&d);
            let svd_share = popularity_share(&cohort_recommendations(&svd, &records, &cohort, args.k)?, &d, args.decile);
            let slope_one_share =
                popularity_share(&cohort_recommendations(&slope_one, &records, &cohort, args.k)?, &d, args.decile);
            let mut popular: Vec<u32> = popular_items(&d, args.decile).into_iter().collect();
            popular.sort_unstable();
            let report = BiasReport {
                cohort: cohort.len(),
                k: args.k,
                popular,
                svd_share,
                slope_one_share,
            };
            let text = match format {
                OutputFormat::Json => json(&report)?,
                OutputFormat::Csv => format!("algorithm,popularity_share\nsvd,{svd_share}\nslope_one,{slope_one_share}\n"),
                OutputFormat::Text => format!(
                    "cohort {} players, k {}, popular champions {}\nsvd        {:.4}\nslope one  {:.4}\n",
                    report.cohort,
                    report.k,
                    join(report.popular.iter().map(u32::to_string)),
                    svd_share,
                    slope_one_share
                ),
            };
            out.primary(&text)
        }
        Command::Hitrate(args) => {
            let d = load_dataset(&args.data)?;
            let report = match args.algorithm {
                Algorithm::Svd => {
                    let h = args.model.hyperparams(seed)?;
                    hit_rate_with(&d, args.k, seed, args.max_users, |t| Ok(train(t, &h)?.0))?
                }
                Algorithm::SlopeOne => {
                    hit_rate_with(&d, args.k, seed, args.max_users, |t| Ok(train_slope_one(t)))?
                }
            };
            let text = match format {
                OutputFormat::Json => json(&report)?,
                OutputFormat::Csv => format!(
                    "k,hits,trials,skipped,rate\n{},{},{},{},{}\n",
                    args.k, report.hits, report.trials, report.skipped, report.rate
                ),
                OutputFormat::Text => format!(
                    "hit rate@{}  {:.4}  ({} of {} trials, {} skipped)\n",
                    args.k, report.rate, report.hits, report.trials, report.skipped
                ),
            };
            out.primary(&text)
        }
        Command::Ztest(args) => {
            let t = z_test_one_sided(&read_values(&args.a)?, &read_values(&args.b)?)?;
            let text = match format {
                OutputFormat::Json => json(&t)?,
                OutputFormat::Csv => format!(
                    "z,p,mean_a,mean_b,n_a,n_b\n{},{},{},{},{},{}\n",
                    t.z, t.p, t.mean_a, t.mean_b, t.n_a, t.n_b
                ),
                OutputFormat::Text => format!(
                    "z {:.6}\np {:.6e}\nmean a {:.4} (n {})\nmean b {:.4} (n {})\n",
                    t.z, t.p, t.mean_a, t.n_a, t.mean_b, t.n_b
                ),
            };
            out.primary(&text)
        }
        Command::Hist(args) => {
            let edges = if args.edges.is_empty() {
                uniform_edges(args.low, args.high, args.bins)?
            } else {
                args.edges.clone()
            };
            let h = histogram(&read_values(&args.values)?, &edges)?;
            let text = match format {
                OutputFormat::Json => json(&h)?,
                OutputFormat::Csv | OutputFormat::Text => h.to_csv(),
            };
            out.primary(&text)
        }
    }
}

#[derive(Serialize)]
struct BiasReport {
    cohort: usize,
    k: usize,
    popular: Vec<u32>,
    svd_share: f64,
    slope_one_share: f64,
}

fn recommend_command(args: &RecommendArgs, format: OutputFormat, out: &mut Output) -> Result<()> {
    let records: Vec<MasteryRecord> = match (&args.player, &args.summoner) {
        (Some(player), None) => {
            let data = args
                .data
                .as_deref()
                .ok_or_else(|| Error::invalid("--player needs --data"))?;
            let rows: Vec<_> = load_csv(data)?
                .into_iter()
                .filter(|r| &r.player_id == player)
                .collect();
            if rows.is_empty() {
                return Err(Error::UnknownPlayer(player.clone()));
            }
            rows
        }
        (None, Some(summoner)) => fetch_player_masteries(summoner, &args.api.config()?)?,
        _ => return Err(Error::invalid("give exactly one of --player or --summoner")),
    };
    let profile = top_champions(&records, PROFILE_SIZE)?;
    let scorer: Box<dyn ProfileScorer> = match args.algorithm {
        Algorithm::Svd => {
            let path = args
                .model
                .as_deref()
                .ok_or_else(|| Error::invalid("the svd algorithm needs --model"))?;
            Box::new(load_model(path)?)
        }
        Algorithm::SlopeOne => {
            let data = args
                .data
                .as_deref()
                .ok_or_else(|| Error::invalid("the slope-one algorithm needs --data"))?;
            Box::new(train_slope_one(&load_dataset(data)?))
        }
    };
    let list = recommend_for_profile(scorer.as_ref(), &profile, args.k)?;
    let catalog = match &args.catalog {
        Some(path) => load_catalog(path)?,
        None => ChampionCatalog::default(),
    };
    let generated_at = match &args.generated_at {
        Some(t) => t.clone(),
        None => default_timestamp()?,
    };
    let (doc, warnings) = format_recommendations(&list, &catalog, format, &generated_at);
    if args.catalog.is_some() {
        for w in &warnings {
            out.warn(w);
        }
    }
    out.primary(&doc)
}

/// SOURCE_DATE_EPOCH when set, else now; RFC 3339 in UTC.
fn default_timestamp() -> Result<String> {
    let when = match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(v) => {
            let secs: i64 = v
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("SOURCE_DATE_EPOCH is not an integer: {v:?}")))?;
            chrono::DateTime::from_timestamp(secs, 0)
                .ok_or_else(|| Error::invalid(format!("SOURCE_DATE_EPOCH out of range: {secs}")))?
        }
        Err(_) => chrono::Utc::now(),
    };
    Ok(when.to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
}

fn load_dataset(path: &Path) -> Result<Dataset> {
    build_training_set(&load_csv(path)?)
}

fn read_text(path: &Path) -> Result<String> {
    let mut text = String::new();
    std::io::Read::read_to_string(&mut open_input(path)?, &mut text)?;
    Ok(text)
}

/// One number per line. Blank lines and `#` comments are skipped, and a
/// non-numeric first line is taken as a header.
fn read_values(path: &Path) -> Result<Vec<f64>> {
    let text = read_text(path)?;
    let mut values = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            _ if n == 0 => continue,
            _ => {
                return Err(Error::Parse {
                    line: n as u64 + 1,
                    message: format!("not a number: {line:?}"),
                })
            }
        }
    }
    Ok(values)
}

fn render_records(records: &[MasteryRecord], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => json(&records),
        OutputFormat::Csv | OutputFormat::Text => {
            let mut buf = Vec::new();
            write_records(&mut buf, records)?;
            String::from_utf8(buf).map_err(|e| Error::invalid(e.to_string()))
        }
    }
}

fn trace_csv(objective: &[f64]) -> String {
    let mut s = String::from("epoch,objective\n");
    for (e, j) in objective.iter().enumerate() {
        s.push_str(&format!("{},{j}\n", e + 1));
    }
    s
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn join(parts: impl Iterator<Item = String>) -> String {
    parts.collect::<Vec<_>>().join(" ")
}
