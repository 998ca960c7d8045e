//! The whole pipeline in one call: synthesize a corpus, run the three
//! tests, and write report.json, the CSV tables, and the SVG charts.
//!
//! Equivalent to `inflow all` with a smaller corpus so it finishes in a
//! few seconds.
//!
//! ```bash
//! cargo run --release -p inflow --example run_all
//! ```

use inflow::pipeline::{run_all, RunConfig};
use inflow::synth::SynthConfig;

fn main() {
    let out_dir = std::env::temp_dir().join("inflow_example_run");
    let config = RunConfig {
        synth: SynthConfig {
            n_features: 400,
            months: 36,
            cadence_switch_month: 18,
            ..SynthConfig::default()
        },
        out_dir: out_dir.clone(),
        ..RunConfig::default()
    };

    let report = run_all(&config).expect("pipeline run");

    println!("corpus: {} trouble reports over {} releases",
        report.validation.trouble_reports, report.validation.releases);

    println!("\ntest1 performance (test slice):");
    for (model, eval) in &report.test1.performance {
        let m = &eval.slices["test"];
        match m.f1 {
            Some(f1) => println!("  {model:<26} f1 {f1:.4}"),
            None => println!("  {model:<26} MAE {:.4}  MSE {:.4}", m.mae, m.mse),
        }
    }

    let w = &report.test2.winner;
    println!(
        "\ntest2 winner: {:?} on {}/{} with {} ({}; {} clusters, silhouette {:.3})",
        w.algorithm,
        w.level,
        w.measure,
        w.scaler,
        w.params,
        w.cluster_count,
        w.silhouette.unwrap_or(f64::NAN)
    );

    println!("\ntest3 forest importance, inflow target, top 5:");
    let inflow_table = report.test3.importance.iter().find(|t| t.target == "inflow").unwrap();
    for e in inflow_table.methods["forest"].iter().take(5) {
        println!("  rank {}: {} (t{:+}) {:.3}", e.rank, e.feature_name, e.time_offset, e.importance);
    }

    println!("\noutputs written to {}", out_dir.display());
}
