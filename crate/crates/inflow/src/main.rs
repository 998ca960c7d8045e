//! Thin command-line front end; every computation lives in the library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use inflow::dataset::Granularity;
use inflow::pipeline::{self, load_config_overlay, PipelineError, RunConfig, ValidationReport};
use inflow::synth::describe_ground_truth;

#[derive(Parser)]
#[command(
    name = "inflow",
    about = "Trouble-report inflow analytics: failure-inflow prediction, change-footprint clustering, and cluster-augmented models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Corpus directory with commits/trouble_reports/features/releases CSVs
    #[arg(long, global = true)]
    corpus_dir: Option<PathBuf>,

    /// Output directory for reports, tables, and charts
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,

    /// Master seed for generation and every learner
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Aggregation granularity
    #[arg(long, global = true, value_parser = parse_granularity, default_value = "month")]
    granularity: Granularity,

    /// Lag window in periods
    #[arg(long, global = true, default_value_t = 4)]
    lag: usize,

    /// Chronological test fraction
    #[arg(long, global = true, default_value_t = 0.2)]
    split_fraction: f64,

    /// Worker thread cap (0 = all cores); output is identical for any value
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// JSON RunConfig file overriding the flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Load, link, and consolidate a corpus; print counts and diagnostics
    Validate,
    /// Write a synthetic corpus (CSVs + ground_truth.json) to --out-dir
    Synth,
    /// Failure-inflow prediction on the basic period table
    Test1,
    /// Change-footprint clustering with scaler and parameter search
    Test2,
    /// Cluster-augmented prediction, importance analysis, and ablation
    Test3,
    /// Validate + test1 + test2 + test3 in one run
    All,
}

fn parse_granularity(raw: &str) -> Result<Granularity, String> {
    match raw {
        "month" => Ok(Granularity::Month),
        "release" => Ok(Granularity::Release),
        other => Err(format!("unknown granularity '{other}' (month|release)")),
    }
}

fn build_config(cli: &Cli) -> Result<RunConfig, PipelineError> {
    let mut config = RunConfig {
        corpus_dir: cli.corpus_dir.clone(),
        granularity: cli.granularity,
        split_fraction: cli.split_fraction,
        seed: cli.seed,
        out_dir: cli.out_dir.clone(),
        threads: cli.threads,
        ..RunConfig::default()
    };
    config.lag.lag = cli.lag;
    config.synth.seed = cli.seed;
    if let Some(path) = &cli.config {
        config = load_config_overlay(path, config)?;
    }
    config.validate()?;
    Ok(config)
}

fn print_validation(report: &ValidationReport) {
    println!("commits:          {}", report.commits);
    println!("trouble reports:  {}", report.trouble_reports);
    println!("features:         {}", report.features);
    println!("releases:         {}", report.releases);
    if !report.orphan_feature_ids.is_empty() {
        println!("orphan commit feature ids ({}):", report.orphan_feature_ids.len());
        for id in &report.orphan_feature_ids {
            println!("  {id}");
        }
    }
    if !report.unreleased_features.is_empty() {
        println!("unreleased features ({}):", report.unreleased_features.len());
        for id in &report.unreleased_features {
            println!("  {id}");
        }
    }
    println!("clean: {}", report.clean);
}

fn run(cli: &Cli) -> Result<bool, PipelineError> {
    let config = build_config(cli)?;
    match cli.command {
        Command::Validate => {
            let dir = config.corpus_dir.clone().ok_or_else(|| {
                PipelineError::Config("validate requires --corpus-dir".to_string())
            })?;
            let report = pipeline::cmd_validate(&dir, config.subsystem_threshold)?;
            print_validation(&report);
            Ok(report.clean)
        }
        Command::Synth => {
            let (bundle, ground_truth) = pipeline::cmd_synth(&config.synth, &config.out_dir)?;
            println!(
                "wrote {} commits, {} trouble reports, {} features, {} releases to {}",
                bundle.commits.len(),
                bundle.trouble_reports.len(),
                bundle.features.len(),
                bundle.releases.len(),
                config.out_dir.display()
            );
            print!("{}", describe_ground_truth(&ground_truth));
            Ok(true)
        }
        Command::Test1 => {
            let report = pipeline::run_test1(&config)?;
            println!(
                "test1 complete: {} supervised rows, outputs in {}",
                report.supervised_rows,
                config.out_dir.display()
            );
            for (model, eval) in &report.performance {
                let test = &eval.slices["test"];
                match test.f1 {
                    Some(f1) => println!("  {model}: test f1 {f1:.4}"),
                    None => println!("  {model}: test MAE {:.4}", test.mae),
                }
            }
            Ok(true)
        }
        Command::Test2 => {
            let report = pipeline::run_test2(&config)?;
            let w = &report.winner;
            println!(
                "test2 complete: {} candidates; winner {:?} on {}/{} with {} ({} clusters, silhouette {})",
                report.candidates_evaluated,
                w.algorithm,
                w.level,
                w.measure,
                w.scaler,
                w.cluster_count,
                w.silhouette.map_or("n/a".to_string(), |s| format!("{s:.4}")),
            );
            Ok(true)
        }
        Command::Test3 => {
            let report = pipeline::run_test3(&config)?;
            println!(
                "test3 complete: {} cluster columns, {} ablation trials, outputs in {}",
                report.cluster_ids.len(),
                report.ablation.len(),
                config.out_dir.display()
            );
            Ok(true)
        }
        Command::All => {
            let report = pipeline::run_all(&config)?;
            println!("all stages complete: outputs in {}", config.out_dir.display());
            let w = &report.test2.winner;
            println!(
                "  clustering winner: {:?} on {}/{} with {} ({} clusters)",
                w.algorithm, w.level, w.measure, w.scaler, w.cluster_count
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
