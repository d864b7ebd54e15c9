//! Approximate the size/quality trade-off with NSGA-II and NSGA-III and
//! compare the fronts by hypervolume against a shared reference.
//!
//! cargo run --release --example pareto_front

use qtopt::harness::synth::{generate, Pattern};
use qtopt::metrics::{hypervolume_2d, pf_selected, reference_point};
use qtopt::objectives::{ImageProblem, ObjectiveOptions, ObjectivePoint, Weights};
use qtopt::pareto::{run_pareto, ParetoAlgorithm, ParetoConfig};
use qtopt::scalar::RunBudget;

fn main() -> qtopt::Result<()> {
    let img = generate(Pattern::Photo, 128, 128, 3, 2)?;
    let problem = ImageProblem::new(img, Weights::default(), ObjectiveOptions::default());
    let budget = RunBudget { pop_size: 30, nfe_max: 600, seed: 5 };

    let mut fronts = Vec::new();
    for alg in ParetoAlgorithm::ALL {
        let run = run_pareto(alg, &problem, &budget, &ParetoConfig::default())?;
        println!(
            "{alg}: {} points, own-reference HV {:.3e} -> {:.3e}",
            run.front.len(),
            run.initial_hv(),
            run.final_hv()
        );
        fronts.push((alg, run.front.points()));
    }

    let reference = reference_point(fronts.iter().map(|(_, f)| f.as_slice()), 1.05)?;
    println!("shared reference ({:.5}, {:.5})", reference.f1, reference.f2);
    for (alg, front) in &fronts {
        let sel: ObjectivePoint = pf_selected(front, &Weights::default())?;
        println!(
            "{alg}: HV {:.4e}, selected fs {:.4} psnr {:.2}",
            hypervolume_2d(front, reference)?,
            sel.f1,
            1.0 / sel.f2
        );
        for p in front.iter().step_by((front.len() / 6).max(1)) {
            println!("    fs {:.4}  psnr {:6.2}", p.f1, 1.0 / p.f2);
        }
    }
    Ok(())
}
