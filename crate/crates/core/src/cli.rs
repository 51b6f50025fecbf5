//! The `cds` command-line interface.
//!
//! Exit status is 0 on success, 2 for configuration errors and 3 for IO or
//! data errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cds::{
    beta_grid, class_centroid, deviations, ones_fraction, suggest_beta_from_deviations,
};
use crate::constraints::{stage1_cluster, Constraint, DEFAULT_ALPHA, DEFAULT_LAMBDA};
use crate::data_io::{load_dataset, read_coreset, save_dataset, write_atomic, write_json, Budget, Dataset};
use crate::error::{Error, Result};
use crate::harness::{
    figure3a, gen_train_test, nearest_centroid_accuracy, run_oracle_suite, write_jsonl,
    Figure3aParams, MixtureSpec, Strategy,
};
use crate::pipeline::{class_reports, prepare_group, run_selection, SelectorConfig, DEFAULT_BETA, DEFAULT_PCA_K};
use crate::reduce::PcaMode;
use crate::selectors::{Kernel, Method};

#[derive(Debug, Parser)]
#[command(name = "cds", version, about = "Coreset selection with CDS diversity constraints")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select a coreset and write it as JSON.
    Select(SelectArgs),
    /// Report per-class CDS diversity and distance-bin occupancy of a coreset.
    Analyze(AnalyzeArgs),
    /// Run a built-in benchmark suite.
    Bench(BenchArgs),
    /// Suggest a CDS threshold from the ones-fraction of the signatures.
    SuggestBeta(SuggestBetaArgs),
    /// Check that a dataset loads and is consistent.
    Validate(DataArgs),
    /// Write a synthetic Gaussian-mixture dataset.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub probs: Option<PathBuf>,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset> {
        load_dataset(&self.features, &self.labels, self.probs.as_deref())
    }
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(long = "pca", default_value = "most", value_parser = parse_from_str::<PcaMode>)]
    pub pca_mode: PcaMode,
    #[arg(long, default_value_t = DEFAULT_PCA_K)]
    pub pca_k: usize,
    #[arg(long, default_value_t = DEFAULT_BETA)]
    pub beta: f64,
    /// Select per class with class centroids (default).
    #[arg(long, overrides_with = "imbalanced")]
    pub balanced: bool,
    /// Select once over the whole dataset with the dataset centroid.
    #[arg(long, overrides_with = "balanced")]
    pub imbalanced: bool,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub reduce: ReduceArgs,
    #[arg(long, default_value = "random", value_parser = parse_from_str::<Method>)]
    pub method: Method,
    #[arg(long, default_value = "none", value_parser = parse_from_str::<Constraint>)]
    pub constraint: Constraint,
    /// Fraction in (0, 1] (e.g. 0.1, 1.0) or an absolute count (e.g. 50).
    #[arg(long, default_value = "0.1", value_parser = parse_from_str::<Budget>)]
    pub budget: Budget,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    pub lambda: f64,
    #[arg(long, default_value = "shifted-euclidean", value_parser = parse_from_str::<Kernel>)]
    pub kernel: Kernel,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Allow the hard constraint with craig or gc.
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

impl SelectArgs {
    pub fn config(&self) -> SelectorConfig {
        SelectorConfig {
            method: self.method,
            constraint: self.constraint,
            budget: self.budget,
            pca_mode: self.reduce.pca_mode,
            pca_k: self.reduce.pca_k,
            beta: self.reduce.beta,
            alpha: self.alpha,
            lambda: self.lambda,
            balanced: !self.reduce.imbalanced,
            seed: self.seed,
            kernel: self.kernel,
            force: self.force,
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub reduce: ReduceArgs,
    #[arg(long)]
    pub coreset: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Oracles,
    Figure3a,
    BetaGrid,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Number of seeds (figure3a, beta-grid), starting at --seed.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fuzz instances for the oracles suite.
    #[arg(long, default_value_t = 100)]
    pub instances: usize,
    /// Method evaluated by the beta-grid suite under the hard constraint.
    #[arg(long, default_value = "kcg", value_parser = parse_from_str::<Method>)]
    pub method: Method,
    #[arg(long, default_value = "0.05", value_parser = parse_from_str::<Budget>)]
    pub budget: Budget,
    /// Per-cell records as JSON lines.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SuggestBetaArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub reduce: ReduceArgs,
    #[arg(long, default_value_t = 0.9)]
    pub ratio: f64,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub classes: usize,
    #[arg(long, default_value_t = 500)]
    pub n_per_class: usize,
    #[arg(long, default_value_t = 16)]
    pub dims: usize,
    #[arg(long, default_value_t = 2.5)]
    pub separation: f64,
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write a test split with this many samples per class.
    #[arg(long)]
    pub test_per_class: Option<usize>,
    /// Write CSV instead of binary tensors.
    #[arg(long)]
    pub csv: bool,
}

fn parse_from_str<T: std::str::FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter(_)
        | Error::MissingInput(_)
        | Error::BudgetTooLarge { .. }
        | Error::RatioUnattainable { .. }
        | Error::InstanceTooLarge(_) => 2,
        Error::Io { .. }
        | Error::Format(_)
        | Error::SizeMismatch { .. }
        | Error::NonFinite(_)
        | Error::InvalidDataset(_)
        | Error::DimensionMismatch(_)
        | Error::EmptyGroup
        | Error::IndexOutOfRange { .. }
        | Error::Json(_) => 3,
    }
}

pub fn main_from_env() -> i32 {
    main_with_args(std::env::args_os())
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Select(args) => cmd_select(&args),
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::SuggestBeta(args) => cmd_suggest_beta(&args),
        Command::Validate(args) => cmd_validate(&args),
        Command::Gen(args) => cmd_gen(&args),
    }
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_json(value, path),
        None => {
            let mut s = serde_json::to_string_pretty(value)?;
            s.push('\n');
            std::io::stdout()
                .write_all(s.as_bytes())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

pub fn cmd_select(args: &SelectArgs) -> Result<()> {
    let config = args.config();
    config.validate()?;
    if config.method.needs_probs() && args.data.probs.is_none() {
        return Err(Error::MissingInput(format!(
            "method {} needs class probabilities (--probs)",
            config.method
        )));
    }
    let dataset = args.data.load()?;
    let outcome = run_selection(&dataset, &config)?;
    let json = outcome.coreset.to_json()?;
    write_atomic(&args.out, json.as_bytes())?;
    if let Some(report) = &args.report {
        write_json(&outcome.report, report)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct BinOccupancy {
    bin: usize,
    size: usize,
    selected: usize,
}

#[derive(Debug, Serialize)]
struct GroupOccupancy {
    group: usize,
    bins: Vec<BinOccupancy>,
}

#[derive(Debug, Serialize)]
struct Analysis {
    per_class: Vec<crate::pipeline::ClassReport>,
    psi_total: usize,
    bins: Vec<GroupOccupancy>,
}

fn groups_of(dataset: &Dataset, balanced: bool) -> Vec<Vec<usize>> {
    if balanced {
        dataset.class_members()
    } else {
        vec![(0..dataset.len()).collect()]
    }
}

fn reduce_config(reduce: &ReduceArgs) -> SelectorConfig {
    SelectorConfig {
        pca_mode: reduce.pca_mode,
        pca_k: reduce.pca_k,
        beta: reduce.beta,
        balanced: !reduce.imbalanced,
        ..SelectorConfig::default()
    }
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    let dataset = args.data.load()?;
    let coreset = read_coreset(&args.coreset)?;
    coreset.validate(dataset.len())?;
    let config = SelectorConfig {
        alpha: args.alpha,
        ..reduce_config(&args.reduce)
    };
    config.validate()?;
    let mut selected = vec![false; dataset.len()];
    for &i in &coreset.indices {
        selected[i] = true;
    }

    let mut signatures = vec![None; dataset.len()];
    let mut bins = Vec::new();
    for (g, members) in groups_of(&dataset, config.balanced).iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        let prepared = prepare_group(&dataset, members, &config)?;
        let centroid = class_centroid(prepared.reduced.view())?;
        let stage1 = stage1_cluster(prepared.reduced.view(), &centroid, config.alpha)?;
        bins.push(GroupOccupancy {
            group: g,
            bins: stage1
                .bins
                .iter()
                .map(|(&bin, pos)| BinOccupancy {
                    bin,
                    size: pos.len(),
                    selected: pos.iter().filter(|&&p| selected[members[p]]).count(),
                })
                .collect(),
        });
        for (p, s) in prepared.signatures.into_iter().enumerate() {
            signatures[members[p]] = Some(s);
        }
    }
    let signatures: Vec<_> = signatures.into_iter().map(|s| s.expect("all samples grouped")).collect();
    let per_class = class_reports(&dataset, &signatures, &coreset.indices)?;
    let analysis = Analysis {
        psi_total: per_class.iter().map(|c| c.psi).sum(),
        per_class,
        bins,
    };
    emit(&analysis, args.out.as_deref())
}

#[derive(Debug, Serialize)]
struct BetaSuggestion {
    ratio: f64,
    beta_tilde: f64,
    grid: [f64; 3],
    ones_fraction: [f64; 3],
}

/// Deviations of every sample from its group centroid in the reduced space, pooled over groups.
fn pooled_deviations(dataset: &Dataset, config: &SelectorConfig) -> Result<Vec<f64>> {
    let mut devs = Vec::new();
    for members in groups_of(dataset, config.balanced) {
        if members.is_empty() {
            continue;
        }
        let prepared = prepare_group(dataset, &members, config)?;
        let centroid = class_centroid(prepared.reduced.view())?;
        devs.extend(deviations(prepared.reduced.view(), &centroid)?);
    }
    Ok(devs)
}

fn suggestion(devs: &[f64], ratio: f64) -> Result<BetaSuggestion> {
    let beta_tilde = suggest_beta_from_deviations(devs, ratio)?;
    let grid = beta_grid(beta_tilde);
    Ok(BetaSuggestion {
        ratio,
        beta_tilde,
        grid,
        ones_fraction: grid.map(|b| ones_fraction(devs, b)),
    })
}

pub fn cmd_suggest_beta(args: &SuggestBetaArgs) -> Result<()> {
    let dataset = args.data.load()?;
    let config = reduce_config(&args.reduce);
    config.validate()?;
    let devs = pooled_deviations(&dataset, &config)?;
    emit(&suggestion(&devs, args.ratio)?, None)
}

#[derive(Debug, Serialize)]
struct ValidationSummary {
    n: usize,
    dim: usize,
    num_classes: usize,
    class_sizes: Vec<usize>,
    has_probs: bool,
}

pub fn cmd_validate(args: &DataArgs) -> Result<()> {
    let d = args.load()?;
    emit(
        &ValidationSummary {
            n: d.len(),
            dim: d.dim(),
            num_classes: d.num_classes(),
            class_sizes: d.class_members().iter().map(Vec::len).collect(),
            has_probs: d.probs().is_some(),
        },
        None,
    )
}

pub fn cmd_gen(args: &GenArgs) -> Result<()> {
    let spec = MixtureSpec {
        classes: args.classes,
        n_per_class: args.n_per_class,
        dims: args.dims,
        separation: args.separation,
        noise: args.noise,
        seed: args.seed,
    };
    let (train, test) = gen_train_test(&spec, args.test_per_class.unwrap_or(1))?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    let ext = if args.csv { "csv" } else { "cdsf" };
    let write = |d: &Dataset, prefix: &str| {
        let p = |name: &str| args.out_dir.join(format!("{prefix}{name}.{ext}"));
        save_dataset(d, p("features"), p("labels"), Some(&p("probs")))
    };
    write(&train, "")?;
    if args.test_per_class.is_some() {
        write(&test, "test_")?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct BetaGridRow {
    seed: u64,
    beta: f64,
    ones_fraction: f64,
    accuracy: f64,
}

pub fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let seeds: Vec<u64> = (args.seed..args.seed + args.seeds).collect();
    match args.suite {
        Suite::Oracles => {
            let report = run_oracle_suite(args.instances, args.seed)?;
            println!(
                "oracles: {} instances, {} violations (facility {}, k-center {}, relation {}); \
                 min facility ratio {:.4}, max k-center ratio {:.4}",
                report.instances,
                report.violations(),
                report.facility_violations,
                report.kcenter_violations,
                report.relation_violations,
                report.min_facility_ratio,
                report.max_kcenter_ratio
            );
            if let Some(out) = &args.out {
                write_jsonl(&[report], out)?;
            }
        }
        Suite::Figure3a => {
            let report = figure3a(&Figure3aParams::standard(seeds))?;
            println!("{:<12} {:>8} {:>9} {:>9} {:>20}", "strategy", "budget", "accuracy", "psi", "vs more-random");
            for row in &report.rows {
                println!(
                    "{:<12} {:>8} {:>9.4} {:>9.1} {:>+10.4} ± {:<8.4}",
                    row.strategy.as_str(),
                    row.budget,
                    row.mean_accuracy,
                    row.mean_psi,
                    row.improvement_mean,
                    row.improvement_std
                );
            }
            for &b in &Figure3aParams::standard(vec![]).budgets {
                if let Some(gap) = report.dcds_minus_scds(b) {
                    println!("more-dcds - more-scds at {b}: {gap:+.4}");
                }
            }
            debug_assert!(report.rows.len() == Strategy::ALL.len() * Figure3aParams::standard(vec![]).budgets.len());
            if let Some(out) = &args.out {
                write_jsonl(&report.cells, out)?;
            }
        }
        Suite::BetaGrid => {
            let mut rows = Vec::new();
            for &seed in &seeds {
                let (train, test) = gen_train_test(&MixtureSpec::standard(seed), 200)?;
                let mut config = SelectorConfig {
                    method: args.method,
                    constraint: Constraint::Hard,
                    budget: args.budget,
                    seed,
                    ..SelectorConfig::default()
                };
                config.validate()?;
                let devs = pooled_deviations(&train, &config)?;
                let s = suggestion(&devs, 0.9)?;
                for (&beta, &frac) in s.grid.iter().zip(&s.ones_fraction) {
                    config.beta = beta;
                    let out = run_selection(&train, &config)?;
                    rows.push(BetaGridRow {
                        seed,
                        beta,
                        ones_fraction: frac,
                        accuracy: nearest_centroid_accuracy(&train, &out.coreset.indices, &test)?,
                    });
                }
            }
            for row in &rows {
                println!(
                    "seed {:>3} beta {:>12.6e} ones {:.3} accuracy {:.4}",
                    row.seed, row.beta, row.ones_fraction, row.accuracy
                );
            }
            if let Some(out) = &args.out {
                write_jsonl(&rows, out)?;
            }
        }
    }
    Ok(())
}
