//! Pearson correlations between metrics with two-tailed p-values.
//!
//!     cargo run --example metric_correlation

use polyhallo::eval::{correlation_matrix, orientation_for, pearson, MetricVector, Source};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = pearson(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.1, 3.9, 6.2, 7.8, 10.1])?;
    println!("r = {:.4}, p = {:.2e}, n = {}", r.r, r.p, r.n);

    let ids: Vec<String> = (0..12).map(|i| format!("doc{i}")).collect();
    let make = |name: &str, f: &dyn Fn(f64) -> f64| {
        let values = ids.iter().enumerate().map(|(i, id)| (id.clone(), f(i as f64))).collect();
        MetricVector::new(name, values, Source::Computed, orientation_for(name))
    };
    let vectors = vec![
        make("ent", &|x| 0.05 * x + 0.1 * (x * 1.7).sin().abs())?,
        make("con", &|x| 0.6 - 0.04 * x + 0.05 * (x * 0.9).cos())?,
        make("r1_p", &|x| 0.3 + 0.02 * x + 0.1 * (x * 2.3).sin())?,
        // Fewer than three shared ids: the cell is reported unavailable.
        MetricVector::new("sparse", vec![("doc0".into(), 0.1), ("doc1".into(), 0.2)], Source::External, orientation_for("sparse"))?,
    ];
    let m = correlation_matrix(&vectors);
    print!("{:>8}", "");
    for n in &m.names {
        print!("{n:>9}");
    }
    println!();
    for (name, row) in m.names.iter().zip(&m.cells) {
        print!("{name:>8}");
        for cell in row {
            match cell.correlation() {
                Some(c) => print!("{:>9.3}", c.r),
                None => print!("{:>9}", "-"),
            }
        }
        println!();
    }
    Ok(())
}
