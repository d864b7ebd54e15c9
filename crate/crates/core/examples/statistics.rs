//! Correlations of the shipped energy table, a Wilcoxon test and a rank table.
//!
//! cargo run --example statistics

use std::path::Path;

use qtopt::harness::correlate::{correlate, read_energy_csv};
use qtopt::metrics::{rank_table, wilcoxon_signed_rank};

fn main() -> qtopt::Result<()> {
    let csv = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/energy_levels.csv");
    print!("{}", correlate(&read_energy_csv(&csv)?)?.to_text());

    // per-image mean objective of two algorithms
    let a = [1.42, 1.51, 1.38, 1.60, 1.47, 1.55, 1.49];
    let b = [1.45, 1.50, 1.44, 1.66, 1.52, 1.61, 1.50];
    let w = wilcoxon_signed_rank(&a, &b)?;
    println!(
        "wilcoxon: W+ {} W- {} p {:.5} (exact: {}) significant at 5%: {}",
        w.w_plus,
        w.w_minus,
        w.p_value,
        w.exact,
        w.significant(0.05)
    );

    let means = vec![
        vec![1.78, 1.42, 1.45, 1.43, 1.52],
        vec![1.91, 1.50, 1.49, 1.55, 1.60],
        vec![1.66, 1.30, 1.33, 1.30, 1.41],
    ];
    let t = rank_table(&means)?;
    println!("average ranks {:?}", t.average);
    println!("overall ranks {:?}", t.overall);
    Ok(())
}
