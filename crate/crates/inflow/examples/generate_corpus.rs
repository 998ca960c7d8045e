//! Generate a seeded synthetic corpus and print the planted ground truth.
//!
//! ```bash
//! cargo run -p inflow --example generate_corpus
//! ```

use inflow::corpus::save_corpus;
use inflow::synth::{describe_ground_truth, generate_corpus, SynthConfig};

fn main() {
    let config = SynthConfig {
        seed: 7,
        n_features: 500,
        months: 36,
        cadence_switch_month: 18,
        ..SynthConfig::default()
    };
    let (bundle, ground_truth) = generate_corpus(&config).expect("valid config");

    println!(
        "generated {} commits, {} trouble reports, {} features, {} releases",
        bundle.commits.len(),
        bundle.trouble_reports.len(),
        bundle.features.len(),
        bundle.releases.len()
    );
    println!("\nplanted ground truth:\n{}", describe_ground_truth(&ground_truth));

    let out = std::env::temp_dir().join("inflow_example_corpus");
    save_corpus(&bundle, &out).expect("writable temp dir");
    println!("corpus CSVs written to {}", out.display());
}
