//! Change-footprint clustering: build per-feature footprints from the
//! corpus, scale them, and compare k-means with DBSCAN.
//!
//! ```bash
//! cargo run -p inflow --example cluster_footprints
//! ```

use inflow::cluster::{dbscan_fit, kmeans_fit, silhouette, DbscanConfig, KMeansConfig};
use inflow::corpus::{build_footprints, FootprintLevel, FootprintMeasure};
use inflow::pipeline::prepare_bundle;
use inflow::preprocess::{fit, ScalerKind, ScalerSpec};
use inflow::synth::{generate_corpus, SynthConfig};

fn main() {
    let config = SynthConfig {
        n_features: 400,
        ..SynthConfig::default()
    };
    let (raw, ground_truth) = generate_corpus(&config).unwrap();
    let bundle = prepare_bundle(&raw, 13);

    let set = build_footprints(&bundle, FootprintLevel::System, FootprintMeasure::Files);
    let (matrix, ids, units) = set.to_matrix();
    println!(
        "{} footprints over systems {:?} ({} skipped as empty)",
        matrix.n_rows(),
        units,
        set.skipped_empty.len()
    );

    let scaler = fit(&ScalerSpec::new(ScalerKind::QuantileUniform), &matrix).unwrap();
    let scaled = scaler.transform(&matrix).unwrap();

    let kmeans = kmeans_fit(&scaled, &KMeansConfig::new(5, 42)).unwrap();
    let km_score = silhouette(&scaled, &kmeans.assignments).ok();
    println!(
        "\nk-means (k=5):  {} clusters, largest {:.1}%, silhouette {:?}",
        kmeans.cluster_count,
        100.0 * kmeans.largest_fraction,
        km_score.map(|s| (s * 1000.0).round() / 1000.0)
    );

    let dbscan = dbscan_fit(&scaled, &DbscanConfig { eps: 0.2, min_pts: 5 }).unwrap();
    let db_score = silhouette(&scaled, &dbscan.assignments).ok();
    println!(
        "DBSCAN (0.2/5): {} clusters, noise {:.1}%, silhouette {:?}",
        dbscan.cluster_count,
        100.0 * dbscan.noise_fraction,
        db_score.map(|s| (s * 1000.0).round() / 1000.0)
    );

    // compare the DBSCAN clusters against the planted archetypes
    println!("\nDBSCAN cluster composition (planted archetype -> count):");
    let mut per_cluster: std::collections::BTreeMap<i64, std::collections::BTreeMap<usize, usize>> =
        Default::default();
    for (idx, &label) in dbscan.assignments.iter().enumerate() {
        let archetype = ground_truth.archetype_of[&ids[idx]];
        *per_cluster.entry(label).or_default().entry(archetype).or_insert(0) += 1;
    }
    for (cluster, counts) in per_cluster {
        let name = if cluster < 0 { "noise".to_string() } else { format!("cluster {cluster}") };
        println!("  {name:<10} {counts:?}");
    }
}
