//! Cumulative trouble-report inflow for one release: the daily step
//! curve plus the pre-release and early-post detection fractions.
//!
//! ```bash
//! cargo run -p inflow --example cumulative_inflow
//! ```

use inflow::corpus::{corpus_inflow_stats, cumulative_inflow_curve};
use inflow::synth::{generate_corpus, SynthConfig};

fn main() {
    let (bundle, _) = generate_corpus(&SynthConfig::default()).unwrap();

    // pick the release with the most reports
    let busiest = bundle
        .releases
        .iter()
        .map(|r| {
            let count = bundle
                .trouble_reports
                .iter()
                .filter(|tr| tr.release_id == r.release_id)
                .count();
            (count, r.release_id.clone())
        })
        .max()
        .unwrap()
        .1;

    let curve = cumulative_inflow_curve(&bundle, &busiest).unwrap();
    println!(
        "release {} ({}): {} reports",
        curve.release_id, curve.release_date, curve.stats.total
    );
    println!(
        "pre-release fraction:  {:.3} ({} reports)",
        curve.stats.pre_release_fraction, curve.stats.pre_release
    );
    if let Some(early) = curve.stats.early_post_fraction {
        println!(
            "early-post fraction:   {:.3} ({} of {} post-release within 122 days)",
            early, curve.stats.early_post, curve.stats.post_release
        );
    }

    println!("\ncurve (every 5th point):");
    for (date, pct) in curve.points.iter().step_by(5) {
        let bar = "#".repeat((pct / 2.5) as usize);
        println!("  {date}  {pct:6.1}%  {bar}");
    }

    let stats = corpus_inflow_stats(&bundle).unwrap();
    println!(
        "\ncorpus-level: pre-release {:.3}, early-post {:.3} over {} reports",
        stats.pre_release_fraction,
        stats.early_post_fraction.unwrap_or(f64::NAN),
        stats.total
    );
}
