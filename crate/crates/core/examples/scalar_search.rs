//! Run the five scalarized optimizers on one image and compare with the
//! standard tables.
//!
//! cargo run --release --example scalar_search [-- pop nfe]

use qtopt::harness::synth::{generate, Pattern};
use qtopt::objectives::{ImageProblem, ObjectiveOptions, Weights};
use qtopt::qtable::{annex_k_baseline, decode};
use qtopt::scalar::{run_scalar, Algorithm, RunBudget, ScalarConfig};

fn main() -> qtopt::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer"));
    let pop = args.next().unwrap_or(30);
    let nfe = args.next().unwrap_or(600);

    let img = generate(Pattern::Photo, 128, 128, 3, 0)?;
    let problem = ImageProblem::new(img, Weights::default(), ObjectiveOptions::default());
    let base = problem.evaluate_tables(&annex_k_baseline())?;
    println!(
        "{:<9} F {:.5}  fs {:.5}  psnr {:.3}",
        "baseline", base.scalar_value, base.fs_ratio, base.psnr_db
    );

    for alg in Algorithm::ALL {
        let budget = RunBudget { pop_size: pop, nfe_max: nfe, seed: 1 };
        let r = run_scalar(alg, &problem, &budget, &ScalarConfig::default())?;
        let gain = 100.0 * (base.scalar_value - r.record.scalar_value) / base.scalar_value;
        println!(
            "{:<9} F {:.5}  fs {:.5}  psnr {:.3}  ({gain:+.1}%, {} generations)",
            alg.name(),
            r.record.scalar_value,
            r.record.fs_ratio,
            r.record.psnr_db,
            r.trace.len() - 1
        );
        if alg == Algorithm::Ga {
            let t = decode(&r.best);
            println!("          luma row 0: {:?}", &t.lqt.entries()[..8]);
        }
    }
    Ok(())
}
