//! A small multi-run experiment on synthetic images, written to a temp dir.
//!
//! cargo run --release --example experiment

use qtopt::harness::config::SynthSpec;
use qtopt::harness::report::{read_summary, stats};
use qtopt::harness::synth::Pattern;
use qtopt::harness::{run_experiment, AlgorithmId, ExperimentConfig, ImageSource};
use qtopt::pareto::ParetoAlgorithm;
use qtopt::scalar::Algorithm;

fn main() -> qtopt::Result<()> {
    let images = (0..3)
        .map(|seed| ImageSource::Synthetic {
            synthetic: SynthSpec {
                pattern: Pattern::Photo,
                width: 64,
                height: 64,
                channels: 3,
                seed,
            },
            name: format!("photo{seed}"),
        })
        .collect();
    let mut algorithms: Vec<AlgorithmId> = Algorithm::ALL.into_iter().map(AlgorithmId::Scalar).collect();
    algorithms.push(AlgorithmId::Pareto(ParetoAlgorithm::Nsga2));

    let mut cfg = ExperimentConfig::new(images, algorithms);
    cfg.runs = 3;
    cfg.budget.pop_size = 20;
    cfg.budget.nfe_max = 200;
    cfg.master_seed = 42;
    cfg.output_dir = std::env::temp_dir().join("qtopt_example_experiment");

    let summary = run_experiment(&cfg)?;
    print!(
        "{}",
        std::fs::read_to_string(summary.output_dir.join("ranks.txt")).expect("written above")
    );

    let rows = read_summary(&summary.output_dir.join("summary.csv"))?;
    println!();
    print!("{}", stats(&rows, "baseline", 0.05)?.to_text());
    println!("\nresults in {}", summary.output_dir.display());
    Ok(())
}
