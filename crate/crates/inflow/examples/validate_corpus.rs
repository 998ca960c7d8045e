//! Load a corpus from CSV files, link features to releases, consolidate
//! rare subsystems, and print the validation diagnostics.
//!
//! Uses the bundled corpus when run from the repository root, otherwise
//! generates a fresh one.
//!
//! ```bash
//! cargo run -p inflow --example validate_corpus
//! ```

use std::path::Path;

use inflow::corpus::{
    consolidate_rare_subsystems, link_features_to_releases, load_corpus_dir, save_corpus,
    CONSOLIDATION_THRESHOLD,
};
use inflow::synth::{generate_corpus, SynthConfig};

fn main() {
    let bundled = Path::new("data/default_corpus");
    let bundle = if bundled.join("commits.csv").exists() {
        println!("loading {}", bundled.display());
        load_corpus_dir(bundled).expect("bundled corpus is valid")
    } else {
        println!("bundled corpus not found; generating one");
        let (bundle, _) = generate_corpus(&SynthConfig::default()).unwrap();
        let dir = std::env::temp_dir().join("inflow_example_validate");
        save_corpus(&bundle, &dir).unwrap();
        load_corpus_dir(&dir).expect("round trip")
    };

    println!("commits:         {}", bundle.commits.len());
    println!("trouble reports: {}", bundle.trouble_reports.len());
    println!("features:        {}", bundle.features.len());
    println!("releases:        {}", bundle.releases.len());
    println!("orphan commit feature ids: {}", bundle.orphan_feature_ids.len());

    let linked = link_features_to_releases(&bundle);
    println!("unreleased features: {}", linked.unreleased_features().len());

    let consolidated = consolidate_rare_subsystems(&linked, CONSOLIDATION_THRESHOLD);
    let subsystems: std::collections::BTreeSet<&str> = consolidated
        .commits
        .iter()
        .map(|c| c.subsystem.as_str())
        .collect();
    println!(
        "subsystem vocabulary after consolidation ({} names): {:?}",
        subsystems.len(),
        subsystems
    );
}
