use std::path::Path;

use qtopt::harness::config::SynthSpec;
use qtopt::harness::pnm::write_ppm;
use qtopt::harness::synth::{generate, Pattern};
use qtopt::harness::{run_experiment, AlgorithmId, ExperimentConfig, ImageSource, RunOutcome};
use qtopt::pareto::ParetoAlgorithm;
use qtopt::scalar::Algorithm;
use qtopt::Error;

fn synthetic(name: &str, seed: u64) -> ImageSource {
    ImageSource::Synthetic {
        synthetic: SynthSpec {
            pattern: Pattern::Photo,
            width: 32,
            height: 24,
            channels: 3,
            seed,
        },
        name: name.into(),
    }
}

fn small(images: Vec<ImageSource>, algs: Vec<AlgorithmId>, out: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(images, algs);
    cfg.runs = 2;
    cfg.budget.pop_size = 8;
    cfg.budget.nfe_max = 40;
    cfg.output_dir = out.to_path_buf();
    cfg
}

fn count_lines(p: &Path) -> usize {
    std::fs::read_to_string(p).unwrap().lines().count()
}

#[test]
fn two_runs_one_image_one_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(vec![synthetic("img", 1)], vec![AlgorithmId::Scalar(Algorithm::Ga)], dir.path());
    let s = run_experiment(&cfg).unwrap();
    assert_eq!(s.runs.len(), 2);
    let run_dir = dir.path().join("runs/img/EnMOGA");
    let json: Vec<_> = std::fs::read_dir(&run_dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().ends_with(".json"))
        .collect();
    assert_eq!(json.len(), 2);
    // header + one baseline row
    assert_eq!(count_lines(&dir.path().join("baseline.csv")), 2);
    // header + baseline + EnMOGA
    assert_eq!(count_lines(&dir.path().join("summary.csv")), 3);
    assert!(!dir.path().join("hv_summary.csv").exists());
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.starts_with("image,algorithm,mean,std,rank\n"));
    // seeds follow master + run
    assert_eq!(s.runs[0].seed, 0);
    assert_eq!(s.runs[1].seed, 1);
    // traces are best-so-far
    for r in &s.runs {
        let RunOutcome::Scalar { trace, .. } = &r.outcome else { panic!() };
        assert!(trace.windows(2).all(|w| w[1].best_scalar <= w[0].best_scalar));
        assert_eq!(r.nfe, 40);
    }
}

#[test]
fn pareto_runs_write_fronts_and_hv_summary() {
    let dir = tempfile::tempdir().unwrap();
    let algs = vec![
        AlgorithmId::Scalar(Algorithm::Pso),
        AlgorithmId::Pareto(ParetoAlgorithm::Nsga2),
        AlgorithmId::Pareto(ParetoAlgorithm::Nsga3),
    ];
    let cfg = small(vec![synthetic("a", 1), synthetic("b", 2)], algs, dir.path());
    let s = run_experiment(&cfg).unwrap();
    assert_eq!(s.runs.len(), 12);
    assert_eq!(s.hv_summary.len(), 4);
    // one shared reference per image
    assert_eq!(s.hv_summary[0].ref_f1, s.hv_summary[1].ref_f1);
    assert!(s.hv_summary.iter().all(|r| r.mean > 0.0));
    let front = std::fs::read_to_string(dir.path().join("runs/a/EnNSGAIII/front_1.csv")).unwrap();
    assert!(front.starts_with("f1,f2,genotype_id\n"));
    let ranks = std::fs::read_to_string(dir.path().join("ranks.txt")).unwrap();
    assert!(ranks.contains("Mean hypervolume") && ranks.contains("overall rank"));
    // the baseline row has no std
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.lines().nth(1).unwrap().starts_with("a,baseline,") && summary.lines().nth(1).unwrap().contains(",,"));
}

#[test]
fn bad_image_fails_before_any_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let images = vec![
        synthetic("ok", 1),
        ImageSource::File {
            path: dir.path().join("missing.ppm"),
            name: None,
        },
    ];
    let cfg = small(images, vec![AlgorithmId::Scalar(Algorithm::Es)], &out);
    let err = run_experiment(&cfg).unwrap_err();
    assert!(matches!(err, Error::Io { .. }), "{err}");
    assert_eq!(err.exit_code(), 3);
    assert!(!out.exists());
}

#[test]
fn failed_rerun_leaves_previous_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(vec![synthetic("img", 1)], vec![AlgorithmId::Scalar(Algorithm::De)], dir.path());
    run_experiment(&cfg).unwrap();
    let before = std::fs::read(dir.path().join("summary.csv")).unwrap();

    let mut broken = cfg.clone();
    broken.budget.nfe_max = 3;
    assert!(matches!(run_experiment(&broken), Err(Error::Config(_))));
    assert_eq!(std::fs::read(dir.path().join("summary.csv")).unwrap(), before);
    let leftovers = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .any(|e| e.file_name().to_string_lossy().ends_with(".tmp"));
    assert!(!leftovers);
}

#[test]
fn config_file_with_relative_image_path() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("imgs")).unwrap();
    let img = generate(Pattern::Gradient, 24, 16, 3, 0).unwrap();
    write_ppm(dir.path().join("imgs/grad.ppm"), &img).unwrap();
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(
        &cfg_path,
        format!(
            r#"{{"images": [{{"path": "imgs/grad.ppm"}}], "algorithms": ["baseline", "EnMOPS"],
                "runs": 1, "budget": {{"pop_size": 5, "nfe_max": 20}}, "fs_basis": "source_file",
                "output_dir": {:?}}}"#,
            dir.path().join("out")
        ),
    )
    .unwrap();
    let cfg = ExperimentConfig::load(&cfg_path).unwrap();
    let s = run_experiment(&cfg).unwrap();
    assert_eq!(s.summary.len(), 2);
    assert_eq!(s.summary[0].algorithm, "baseline");
    // fs relative to the file on disk, which is slightly larger than the raw samples
    let raw = (24 * 16 * 3) as f64;
    let file = std::fs::metadata(dir.path().join("imgs/grad.ppm")).unwrap().len() as f64;
    assert!(s.baseline[0].fs_ratio < s.baseline[0].fs_ratio * file / raw);
}
