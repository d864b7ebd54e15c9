//! Multi-run orchestration and result files.
//!
//! Layout under `output_dir`:
//!
//! ```text
//! config.json                 resolved configuration
//! baseline.csv                image, fs_ratio, psnr_db, scalar
//! summary.csv                 image, algorithm, mean, std, rank
//! hv_summary.csv              Pareto algorithms only, shared reference per image
//! ranks.txt, ranks.csv        rank tables
//! runs/<image>/<alg>/run_<r>.json
//! runs/<image>/<alg>/trace_<r>.csv   scalar algorithms
//! runs/<image>/<alg>/front_<r>.csv   Pareto algorithms (f1, f2, genotype_id)
//! runs/<image>/<alg>/hv_<r>.csv      Pareto algorithms
//! ```

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::EncodeOptions;
use crate::error::{Error, Result};
use crate::metrics::pf_selected_index;
use crate::objectives::{ImageProblem, ObjectiveOptions, ObjectiveRecord, SizeBasis};
use crate::pareto::{run_pareto, HvRow, ParetoSet};
use crate::qtable::{annex_k_baseline, Genotype};
use crate::scalar::{run_scalar, TraceRow};

use super::config::{AlgorithmId, ExperimentConfig, FsBasis, LoadedImage};
use super::report::{self, HvSummaryRow, SummaryRow};
use super::{write_csv, write_json};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunOutcome {
    Scalar {
        best: Genotype,
        record: ObjectiveRecord,
        trace: Vec<TraceRow>,
    },
    Pareto {
        front: ParetoSet,
        /// Index into `front` minimizing the weighted sum.
        selected: usize,
        hv_reference: crate::objectives::ObjectivePoint,
        hv_trace: Vec<HvRow>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub image: String,
    pub algorithm: AlgorithmId,
    pub run: usize,
    pub seed: u64,
    pub nfe: usize,
    pub outcome: RunOutcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunRecord {
    /// Scalar objective of the run; for Pareto runs, that of the selected member.
    pub fn scalar(&self) -> f64 {
        match &self.outcome {
            RunOutcome::Scalar { record, .. } => record.scalar_value,
            RunOutcome::Pareto {
                front, selected, ..
            } => front.members[*selected].record.scalar_value,
        }
    }

    pub fn front(&self) -> Option<&ParetoSet> {
        match &self.outcome {
            RunOutcome::Pareto { front, .. } => Some(front),
            RunOutcome::Scalar { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRow {
    pub image: String,
    pub fs_ratio: f64,
    pub psnr_db: f64,
    pub scalar: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub output_dir: PathBuf,
    pub baseline: Vec<BaselineRow>,
    pub runs: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
    pub hv_summary: Vec<HvSummaryRow>,
}

#[derive(Serialize)]
struct FrontRow {
    f1: f64,
    f2: f64,
    genotype_id: usize,
}

fn problem_for(cfg: &ExperimentConfig, img: &LoadedImage) -> Result<ImageProblem> {
    let size_basis = match cfg.fs_basis {
        FsBasis::Raw => SizeBasis::Raw,
        FsBasis::SourceFile => SizeBasis::SourceFile(img.file_bytes.ok_or_else(|| {
            Error::Config(format!(
                "image {:?} has no source file for fs_basis = source_file",
                img.name
            ))
        })?),
    };
    let options = ObjectiveOptions {
        encode: EncodeOptions {
            subsampling: cfg.subsampling,
        },
        size_basis,
        psnr_mode: cfg.psnr_mode,
    };
    Ok(ImageProblem::new(img.image.clone(), cfg.weights, options))
}

pub fn run_dir(output_dir: &Path, image: &str, alg: AlgorithmId) -> PathBuf {
    output_dir.join("runs").join(image).join(alg.name())
}

fn run_unit(
    cfg: &ExperimentConfig,
    image: &str,
    problem: &ImageProblem,
    alg: AlgorithmId,
    run: usize,
) -> Result<RunRecord> {
    let seed = cfg.master_seed.wrapping_add(run as u64);
    let budget = cfg.budget.with_seed(seed);
    let start = Instant::now();
    let dir = run_dir(&cfg.output_dir, image, alg);
    let (outcome, nfe) = match alg {
        AlgorithmId::Baseline => {
            return Err(Error::Invariant("baseline scheduled as a run".into()))
        }
        AlgorithmId::Scalar(a) => {
            let r = run_scalar(a, problem, &budget, &cfg.scalar)?;
            write_csv(&dir.join(format!("trace_{run}.csv")), &r.trace)?;
            (
                RunOutcome::Scalar {
                    best: r.best,
                    record: r.record,
                    trace: r.trace,
                },
                r.nfe,
            )
        }
        AlgorithmId::Pareto(a) => {
            let r = run_pareto(a, problem, &budget, &cfg.pareto)?;
            let selected = pf_selected_index(&r.front.points(), &cfg.weights)?;
            let rows: Vec<FrontRow> = r
                .front
                .points()
                .iter()
                .enumerate()
                .map(|(i, p)| FrontRow {
                    f1: p.f1,
                    f2: p.f2,
                    genotype_id: i,
                })
                .collect();
            write_csv(&dir.join(format!("front_{run}.csv")), &rows)?;
            write_csv(&dir.join(format!("hv_{run}.csv")), &r.hv_trace)?;
            (
                RunOutcome::Pareto {
                    front: r.front,
                    selected,
                    hv_reference: r.reference,
                    hv_trace: r.hv_trace,
                },
                r.nfe,
            )
        }
    };
    let rec = RunRecord {
        image: image.to_string(),
        algorithm: alg,
        run,
        seed,
        nfe,
        outcome,
        wall_time_s: cfg
            .record_wall_time
            .then(|| start.elapsed().as_secs_f64()),
    };
    write_json(&dir.join(format!("run_{run}.json")), &rec)?;
    log::debug!("{image} {alg} run {run}: {}", rec.scalar());
    Ok(rec)
}

/// Runs every (image, algorithm, run) unit and writes the result tree.
///
/// Configuration and images are checked before any run starts. Output is a
/// function of the configuration alone unless `record_wall_time` is set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    cfg.validate()?;
    let images: Vec<LoadedImage> = cfg.images.iter().map(|s| s.load()).collect::<Result<_>>()?;
    let problems: Vec<ImageProblem> = images
        .iter()
        .map(|img| problem_for(cfg, img))
        .collect::<Result<_>>()?;

    let out = &cfg.output_dir;
    write_json(&out.join("config.json"), cfg)?;

    let baseline_tables = annex_k_baseline();
    let baseline: Vec<BaselineRow> = images
        .iter()
        .zip(&problems)
        .map(|(img, p)| {
            let r = p.evaluate_tables(&baseline_tables)?;
            Ok(BaselineRow {
                image: img.name.clone(),
                fs_ratio: r.fs_ratio,
                psnr_db: r.psnr_db,
                scalar: r.scalar_value,
            })
        })
        .collect::<Result<_>>()?;
    write_csv(&out.join("baseline.csv"), &baseline)?;

    let searched: Vec<AlgorithmId> = cfg
        .algorithms
        .iter()
        .copied()
        .filter(|&a| a != AlgorithmId::Baseline)
        .collect();
    let units: Vec<(usize, AlgorithmId, usize)> = (0..images.len())
        .flat_map(|i| {
            searched
                .iter()
                .flat_map(move |&a| (0..cfg.runs).map(move |r| (i, a, r)))
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let runs: Vec<RunRecord> = pool.install(|| {
        units
            .par_iter()
            .map(|&(i, a, r)| run_unit(cfg, &images[i].name, &problems[i], a, r))
            .collect::<Result<_>>()
    })?;

    let names: Vec<String> = images.iter().map(|i| i.name.clone()).collect();
    let summary = report::summarize(&names, &baseline, &searched, &runs)?;
    write_csv(&out.join("summary.csv"), &summary)?;
    let mut ranks_txt = report::rank_text("Mean scalar objective", &summary, false)?;
    let mut rank_rows = report::average_ranks(&summary, false)?;

    let hv_summary = report::hv_summarize(&names, &searched, &runs)?;
    if !hv_summary.is_empty() {
        write_csv(&out.join("hv_summary.csv"), &hv_summary)?;
        let hv_plain: Vec<SummaryRow> = hv_summary.iter().map(HvSummaryRow::as_summary).collect();
        ranks_txt.push('\n');
        ranks_txt.push_str(&report::rank_text("Mean hypervolume", &hv_plain, true)?);
        rank_rows.extend(report::average_ranks(&hv_plain, true)?);
    }
    super::write_atomic(&out.join("ranks.txt"), ranks_txt.as_bytes())?;
    write_csv(&out.join("ranks.csv"), &rank_rows)?;

    Ok(ExperimentSummary {
        output_dir: out.clone(),
        baseline,
        runs,
        summary,
        hv_summary,
    })
}
