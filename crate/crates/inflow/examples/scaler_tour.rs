//! The five column scalers side by side on one skewed column, plus the
//! round-trip contract of the invertible kinds.
//!
//! ```bash
//! cargo run -p inflow --example scaler_tour
//! ```

use inflow::matrix::Matrix;
use inflow::preprocess::{fit, ScalerKind, ScalerSpec};

fn main() {
    let values = vec![1.0, 2.0, 2.0, 3.0, 4.0, 5.0, 8.0, 13.0, 40.0, 250.0];
    let column = Matrix::from_vec(values.len(), 1, values.clone());

    println!("raw:              {values:?}\n");
    for kind in ScalerKind::all() {
        let scaler = fit(&ScalerSpec::new(kind), &column).unwrap();
        let out = scaler.transform(&column).unwrap();
        let rendered: Vec<String> = out.data().iter().map(|v| format!("{v:6.2}")).collect();
        println!("{:<17} [{}]", kind.label(), rendered.join(", "));

        match scaler.inverse_transform(&out) {
            Ok(back) => {
                let max_err = back
                    .data()
                    .iter()
                    .zip(&values)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                println!("{:<17} round trip, max error {max_err:.2e}", "");
            }
            Err(err) => println!("{:<17} {err}", ""),
        }
    }

    // out-of-sample behavior: minmax does not clip
    let scaler = fit(&ScalerSpec::new(ScalerKind::MinMax), &column).unwrap();
    let probes = Matrix::from_vec(2, 1, vec![-10.0, 500.0]);
    let out = scaler.transform(&probes).unwrap();
    println!("\nminmax on unseen [-10, 500]: {:?} (no clipping)", out.data());
}
