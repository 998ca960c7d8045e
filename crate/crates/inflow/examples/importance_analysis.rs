//! Three-way feature-importance analysis (correlation, LASSO, forest)
//! over a lagged dataset, plus a cluster-ablation trial.
//!
//! ```bash
//! cargo run -p inflow --example importance_analysis
//! ```

use std::collections::BTreeMap;

use inflow::dataset::{aggregate_periods, augment_with_clusters, build_lagged, Granularity, LagConfig, TargetKind};
use inflow::evaluate::{
    ablate_clusters, correlation_importance, forest_importance_report, lasso_importance,
    AblationLearner,
};
use inflow::learn::{forest_fit, lasso_fit, Criterion, ForestConfig, LassoConfig};
use inflow::pipeline::prepare_bundle;
use inflow::synth::{generate_corpus, SynthConfig};

fn main() {
    let (raw, ground_truth) = generate_corpus(&SynthConfig::default()).unwrap();
    let bundle = prepare_bundle(&raw, 13);

    // augment with the planted archetypes as if they were the clustering
    let assignments: BTreeMap<String, i64> = ground_truth
        .archetype_of
        .iter()
        .map(|(f, &a)| (f.clone(), a as i64))
        .collect();
    let table = aggregate_periods(&bundle, Granularity::Month).unwrap();
    let augmented = augment_with_clusters(&table, &assignments).unwrap();
    let dataset = build_lagged(&augmented, &LagConfig::default(), TargetKind::RegressionInflow).unwrap();
    println!(
        "dataset: {} rows x {} predictors, causal archetype = cluster_{}",
        dataset.x.n_rows(),
        dataset.columns.len(),
        ground_truth.causal_archetype
    );

    let correlation = correlation_importance(&dataset).unwrap();
    let lasso = lasso_fit(&dataset.x, &dataset.y, &LassoConfig { gamma: 0.05, ..LassoConfig::default() }).unwrap();
    let lasso_ranked = lasso_importance(&lasso, &dataset.columns).unwrap();
    let forest = forest_fit(&dataset.x, &dataset.y, &ForestConfig::new(Criterion::Mse, 42)).unwrap();
    let forest_ranked = forest_importance_report(&forest, &dataset.columns).unwrap();

    for (method, entries) in [
        ("correlation", &correlation),
        ("lasso", &lasso_ranked),
        ("forest", &forest_ranked),
    ] {
        println!("\ntop 5 by {method}:");
        for e in entries.iter().take(5) {
            println!(
                "  rank {}: {} (t{:+})  importance {:+.3}",
                e.rank, e.feature_name, e.time_offset, e.importance
            );
        }
    }

    // remove the causal cluster's columns and refit
    let causal = ground_truth.causal_archetype as i64;
    let learner = AblationLearner::Forest(ForestConfig::new(Criterion::Mse, 42));
    let result = ablate_clusters(&dataset, &[causal], &learner, 0.2).unwrap();
    println!("\nablating cluster_{causal} (the causal one):");
    for (metric, delta) in &result.delta_vs_baseline {
        println!("  {metric}: {delta:+.4}");
    }
}
