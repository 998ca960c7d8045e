//! Build the lagged supervised dataset from a period table: month
//! aggregation, the lag-4 design matrix, delta categorization, and the
//! chronological split.
//!
//! ```bash
//! cargo run -p inflow --example lagged_dataset
//! ```

use inflow::dataset::{
    aggregate_periods, build_lagged, categorize_delta, chronological_split, Granularity,
    LagConfig, TargetKind,
};
use inflow::pipeline::prepare_bundle;
use inflow::synth::{generate_corpus, SynthConfig};

fn main() {
    let config = SynthConfig {
        n_features: 600,
        ..SynthConfig::default()
    };
    let (raw, _) = generate_corpus(&config).unwrap();
    let bundle = prepare_bundle(&raw, 13);

    let table = aggregate_periods(&bundle, Granularity::Month).unwrap();
    println!("period table: {} month rows", table.rows.len());
    for row in table.rows.iter().take(6) {
        println!(
            "  {}  inflow {:3}  releases {}  features {:2}  mean dev time {:5.1}",
            row.period_key, row.tr_inflow, row.releases_delivered, row.features_delivered,
            row.mean_dev_time
        );
    }

    let dataset = build_lagged(&table, &LagConfig::default(), TargetKind::RegressionInflow).unwrap();
    println!(
        "\nlag-4 dataset: {} rows x {} predictors",
        dataset.x.n_rows(),
        dataset.columns.len()
    );
    let preview: Vec<String> = dataset.columns.iter().take(6).map(|c| c.to_string()).collect();
    println!("first predictors: {preview:?}");

    let (train, test) = chronological_split(&dataset, 0.2).unwrap();
    println!("split: {} train rows, {} test rows (chronological)", train.y.len(), test.y.len());

    println!("\ninflow deltas categorized (last 8 periods):");
    for w in table.rows.windows(2).rev().take(8).collect::<Vec<_>>().iter().rev() {
        let label = categorize_delta(w[1].tr_inflow as f64, w[0].tr_inflow as f64);
        println!(
            "  {} -> {}: delta {:+4} => category {}",
            w[0].period_key,
            w[1].period_key,
            w[1].tr_inflow as i64 - w[0].tr_inflow as i64,
            label.0
        );
    }
}
