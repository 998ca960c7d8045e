//! Soft-margin SVC with the RBF bandwidth heuristic: three-class blobs
//! classified by one-vs-one SMO-trained pairs.
//!
//! ```bash
//! cargo run -p inflow --example svc_blobs
//! ```

use inflow::learn::{svc_fit, svc_predict, SvcConfig};
use inflow::matrix::Matrix;
use inflow::rng::Rng;

fn main() {
    let mut rng = Rng::seed_from(3);
    let centers = [(1.0, 1.0), (6.0, 1.5), (3.5, 6.0)];
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (class, &(cx, cy)) in centers.iter().enumerate() {
        for _ in 0..15 {
            rows.push(vec![
                cx + rng.next_f64_range(-0.7, 0.7),
                cy + rng.next_f64_range(-0.7, 0.7),
            ]);
            labels.push(class as i64 + 1);
        }
    }
    let x = Matrix::from_rows(&rows);

    let model = svc_fit(&x, &labels, &SvcConfig::default()).unwrap();
    println!("classes: {:?}", model.classes);
    println!("rbf gamma (1 / (features x variance)): {:.4}", model.gamma);
    for pair in &model.pairs {
        println!(
            "pair {} vs {}: {} support vectors, bias {:.3}",
            pair.class_low,
            pair.class_high,
            pair.support_vectors.len(),
            pair.bias
        );
    }

    let pred = svc_predict(&model, &x).unwrap();
    let correct = pred.iter().zip(&labels).filter(|(p, t)| p == t).count();
    println!("\ntraining accuracy: {}/{}", correct, labels.len());

    println!("\nprobe grid (rows = y 7..0, cols = x 0..7):");
    for gy in (0..8).rev() {
        let mut line = String::new();
        for gx in 0..8 {
            let probe = Matrix::from_vec(1, 2, vec![gx as f64, gy as f64]);
            let label = svc_predict(&model, &probe).unwrap()[0];
            line.push_str(&format!("{label} "));
        }
        println!("  {line}");
    }
}
