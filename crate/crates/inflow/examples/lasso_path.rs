//! LASSO by coordinate descent: the regularization path, showing the
//! coefficient shrinkage and the sparsity the L1 penalty produces.
//!
//! ```bash
//! cargo run -p inflow --example lasso_path
//! ```

use inflow::learn::{lasso_fit, lasso_predict, LassoConfig};
use inflow::matrix::Matrix;
use inflow::rng::Rng;

fn main() {
    // y depends on columns 0 and 2; columns 1 and 3 are pure noise
    let mut rng = Rng::seed_from(5);
    let n = 60;
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for _ in 0..n {
        let row: Vec<f64> = (0..4).map(|_| rng.next_f64_range(-2.0, 2.0)).collect();
        y.push(3.0 * row[0] - 1.5 * row[2] + rng.next_f64_range(-0.2, 0.2));
        rows.push(row);
    }
    let x = Matrix::from_rows(&rows);

    println!("true model: y = 3.0*c0 - 1.5*c2 (+noise); c1 and c3 irrelevant\n");
    println!("{:>7}  {:>8} {:>8} {:>8} {:>8}  {:>8} {:>6}", "gamma", "c0", "c1", "c2", "c3", "|theta|1", "sweeps");
    for step in 0..8 {
        let gamma = [0.0, 0.05, 0.1, 0.25, 0.5, 1.0, 1.5, 2.5][step];
        let model = lasso_fit(&x, &y, &LassoConfig { gamma, ..LassoConfig::default() }).unwrap();
        let l1: f64 = model.std_coefficients.iter().map(|v| v.abs()).sum();
        println!(
            "{gamma:7.2}  {:8.3} {:8.3} {:8.3} {:8.3}  {l1:8.3} {:6}",
            model.coefficients[0],
            model.coefficients[1],
            model.coefficients[2],
            model.coefficients[3],
            model.sweeps_used
        );
    }

    let model = lasso_fit(&x, &y, &LassoConfig { gamma: 0.05, ..LassoConfig::default() }).unwrap();
    let pred = lasso_predict(&model, &x).unwrap();
    let mae = pred
        .iter()
        .zip(&y)
        .map(|(p, t)| (p - t).abs())
        .sum::<f64>()
        / n as f64;
    println!("\ngamma=0.05 training MAE: {mae:.4} (objective trace length {})", model.objective_trace.len());
}
