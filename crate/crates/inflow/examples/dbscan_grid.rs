//! The DBSCAN parameter grid (min_pts 5..20 x eps 0.1..1.5, 240 cells)
//! and the silhouette-vs-cluster-count selection policy.
//!
//! ```bash
//! cargo run -p inflow --example dbscan_grid
//! ```

use inflow::cluster::{
    default_eps_values, default_min_pts_values, grid_search_dbscan, select_model, SelectionPolicy,
};
use inflow::matrix::Matrix;
use inflow::rng::Rng;

fn main() {
    // three planted blobs plus uniform noise
    let mut rng = Rng::seed_from(11);
    let mut rows = Vec::new();
    for &(cx, cy) in &[(0.2, 0.2), (1.6, 0.3), (0.9, 1.8)] {
        for _ in 0..60 {
            rows.push(vec![
                cx + rng.next_f64_range(-0.08, 0.08),
                cy + rng.next_f64_range(-0.08, 0.08),
            ]);
        }
    }
    for _ in 0..25 {
        rows.push(vec![rng.next_f64_range(0.0, 2.0), rng.next_f64_range(0.0, 2.0)]);
    }
    let points = Matrix::from_rows(&rows);

    let grid = grid_search_dbscan(&points, &default_min_pts_values(), &default_eps_values()).unwrap();
    println!("evaluated {} grid cells", grid.len());

    println!("\nbest silhouette per cluster count:");
    let mut best: std::collections::BTreeMap<usize, (f64, String)> = Default::default();
    for (config, model) in &grid {
        if let Some(score) = model.silhouette {
            let entry = best
                .entry(model.cluster_count)
                .or_insert((f64::NEG_INFINITY, String::new()));
            if score > entry.0 {
                *entry = (score, format!("eps={:.1} min_pts={}", config.eps, config.min_pts));
            }
        }
    }
    for (clusters, (score, params)) in &best {
        println!("  {clusters:2} clusters: silhouette {score:.3} at {params}");
    }

    let models: Vec<_> = grid.iter().map(|(_, m)| m.clone()).collect();
    let winner_idx = select_model(&models, &SelectionPolicy::default()).unwrap();
    let (config, winner) = &grid[winner_idx];
    println!(
        "\nselected: eps={:.1} min_pts={} -> {} clusters, noise {:.1}%, silhouette {:.3}",
        config.eps,
        config.min_pts,
        winner.cluster_count,
        100.0 * winner.noise_fraction,
        winner.silhouette.unwrap()
    );
}
