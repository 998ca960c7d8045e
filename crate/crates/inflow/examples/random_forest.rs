//! Random Forest in both modes: the Gini classifier on category labels
//! and the MSE regressor, with impurity-based feature importances.
//!
//! ```bash
//! cargo run -p inflow --example random_forest
//! ```

use inflow::learn::{forest_fit, forest_predict, Criterion, ForestConfig};
use inflow::matrix::Matrix;
use inflow::rng::Rng;

fn main() {
    let mut rng = Rng::seed_from(9);
    let n = 120;

    // regression: y driven by column 1, mildly by column 3
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for _ in 0..n {
        let row: Vec<f64> = (0..4).map(|_| rng.next_f64_range(0.0, 10.0)).collect();
        y.push(4.0 * row[1] + 0.8 * row[3] + rng.next_f64_range(-1.0, 1.0));
        rows.push(row);
    }
    let x = Matrix::from_rows(&rows);

    let regressor = forest_fit(&x, &y, &ForestConfig::new(Criterion::Mse, 42)).unwrap();
    println!("regressor importances (10 trees, MSE, min split 2, no depth cap):");
    for (i, imp) in regressor.feature_importances.iter().enumerate() {
        println!("  column {i}: {imp:.3} {}", "#".repeat((imp * 40.0) as usize));
    }
    let pred = forest_predict(&regressor, &x).unwrap();
    let mae = pred.iter().zip(&y).map(|(p, t)| (p - t).abs()).sum::<f64>() / n as f64;
    println!("  training MAE {mae:.3}\n");

    // classification: three bands of column 0
    let labels: Vec<f64> = rows
        .iter()
        .map(|r| if r[0] < 3.3 { 1.0 } else if r[0] < 6.6 { 2.0 } else { 3.0 })
        .collect();
    let classifier = forest_fit(&x, &labels, &ForestConfig::new(Criterion::Gini, 42)).unwrap();
    println!("classifier importances (Gini):");
    for (i, imp) in classifier.feature_importances.iter().enumerate() {
        println!("  column {i}: {imp:.3} {}", "#".repeat((imp * 40.0) as usize));
    }
    let pred = forest_predict(&classifier, &x).unwrap();
    let accuracy = pred.iter().zip(&labels).filter(|(p, t)| p == t).count() as f64 / n as f64;
    println!("  training accuracy {accuracy:.3}");
    println!("  classes: {:?}", classifier.classes);
}
