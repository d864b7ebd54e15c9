//! Aggregation of run results into summary, rank and test tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{
    fractional_ranks, hypervolume_2d, mean_std, pf_selected_index, rank_table, reference_point,
    wilcoxon_signed_rank, RankTable,
};
use crate::objectives::ObjectivePoint;
use crate::pareto::{ParetoMember, ParetoSet};

use super::config::{AlgorithmId, ExperimentConfig};
use super::experiment::{BaselineRow, RunRecord};

/// Reference factor applied to the per-image maxima over all compared fronts.
pub const HV_REFERENCE_FACTOR: f64 = 1.05;

/// One (image, algorithm) cell; the baseline has no standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub image: String,
    pub algorithm: String,
    pub mean: f64,
    pub std: Option<f64>,
    pub rank: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HvSummaryRow {
    pub image: String,
    pub algorithm: String,
    pub mean: f64,
    pub std: Option<f64>,
    pub rank: f64,
    pub ref_f1: f64,
    pub ref_f2: f64,
}

impl HvSummaryRow {
    pub fn as_summary(&self) -> SummaryRow {
        SummaryRow {
            image: self.image.clone(),
            algorithm: self.algorithm.clone(),
            mean: self.mean,
            std: self.std,
            rank: self.rank,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub metric: String,
    pub algorithm: String,
    pub average_rank: f64,
    pub overall_rank: f64,
}

/// Ranks within one image; rank 1 is the smallest value unless `higher_better`.
fn ranks(values: &[f64], higher_better: bool) -> Vec<f64> {
    if higher_better {
        fractional_ranks(&values.iter().map(|v| -v).collect::<Vec<_>>())
    } else {
        fractional_ranks(values)
    }
}

/// Scalar summary: the baseline first, then each searched algorithm in
/// configuration order.
pub fn summarize(
    images: &[String],
    baseline: &[BaselineRow],
    algorithms: &[AlgorithmId],
    runs: &[RunRecord],
) -> Result<Vec<SummaryRow>> {
    let mut out = Vec::new();
    for image in images {
        let b = baseline
            .iter()
            .find(|b| &b.image == image)
            .ok_or_else(|| Error::Invariant(format!("no baseline for {image}")))?;
        let mut cells = vec![(AlgorithmId::Baseline.name().to_string(), b.scalar, None)];
        for &a in algorithms {
            let v: Vec<f64> = runs
                .iter()
                .filter(|r| &r.image == image && r.algorithm == a)
                .map(RunRecord::scalar)
                .collect();
            if v.is_empty() {
                return Err(Error::Invariant(format!("no runs for {image}/{a}")));
            }
            let (m, s) = mean_std(&v);
            cells.push((a.name().to_string(), m, Some(s)));
        }
        let r = ranks(&cells.iter().map(|c| c.1).collect::<Vec<_>>(), false);
        for ((alg, mean, std), rank) in cells.into_iter().zip(r) {
            out.push(SummaryRow {
                image: image.clone(),
                algorithm: alg,
                mean,
                std,
                rank,
            });
        }
    }
    Ok(out)
}

/// Per-image reference points over the final fronts of all Pareto runs.
pub fn shared_references(runs: &[RunRecord]) -> Result<BTreeMap<String, ObjectivePoint>> {
    let mut by_image: BTreeMap<String, Vec<ObjectivePoint>> = BTreeMap::new();
    for r in runs {
        if let Some(f) = r.front() {
            by_image.entry(r.image.clone()).or_default().extend(f.points());
        }
    }
    by_image
        .into_iter()
        .map(|(k, pts)| Ok((k, reference_point([pts.as_slice()], HV_REFERENCE_FACTOR)?)))
        .collect()
}

/// Hypervolume of every Pareto run against `references[image]`.
pub fn run_hypervolumes(
    runs: &[RunRecord],
    references: &BTreeMap<String, ObjectivePoint>,
) -> Result<Vec<f64>> {
    runs.iter()
        .filter_map(|r| r.front().map(|f| (r, f)))
        .map(|(r, f)| {
            let reference = references
                .get(&r.image)
                .ok_or_else(|| Error::Invariant(format!("no reference for {}", r.image)))?;
            hypervolume_2d(&f.points(), *reference)
        })
        .collect()
}

/// Hypervolume summary of the Pareto algorithms; empty when there are none.
pub fn hv_summarize(
    images: &[String],
    algorithms: &[AlgorithmId],
    runs: &[RunRecord],
) -> Result<Vec<HvSummaryRow>> {
    let pareto: Vec<AlgorithmId> = algorithms
        .iter()
        .copied()
        .filter(|a| matches!(a, AlgorithmId::Pareto(_)))
        .collect();
    if pareto.is_empty() {
        return Ok(Vec::new());
    }
    let refs = shared_references(runs)?;
    let mut out = Vec::new();
    for image in images {
        let reference = refs
            .get(image)
            .ok_or_else(|| Error::Invariant(format!("no Pareto runs for {image}")))?;
        let mut cells = Vec::new();
        for &a in &pareto {
            let sel: Vec<RunRecord> = runs
                .iter()
                .filter(|r| &r.image == image && r.algorithm == a)
                .cloned()
                .collect();
            let hv = run_hypervolumes(&sel, &refs)?;
            let (m, s) = mean_std(&hv);
            cells.push((a.name().to_string(), m, s));
        }
        let r = ranks(&cells.iter().map(|c| c.1).collect::<Vec<_>>(), true);
        for ((alg, mean, std), rank) in cells.into_iter().zip(r) {
            out.push(HvSummaryRow {
                image: image.clone(),
                algorithm: alg,
                mean,
                std: Some(std),
                rank,
                ref_f1: reference.f1,
                ref_f2: reference.f2,
            });
        }
    }
    Ok(out)
}

/// Rows of a summary as an image × algorithm matrix, both in first-seen order.
#[derive(Debug, Clone, PartialEq)]
pub struct MeansMatrix {
    pub images: Vec<String>,
    pub algorithms: Vec<String>,
    pub means: Vec<Vec<f64>>,
    pub stds: Vec<Vec<Option<f64>>>,
}

pub fn means_matrix(rows: &[SummaryRow]) -> Result<MeansMatrix> {
    let mut images: Vec<String> = Vec::new();
    let mut algorithms: Vec<String> = Vec::new();
    for r in rows {
        if !images.contains(&r.image) {
            images.push(r.image.clone());
        }
        if !algorithms.contains(&r.algorithm) {
            algorithms.push(r.algorithm.clone());
        }
    }
    let mut means = vec![vec![f64::NAN; algorithms.len()]; images.len()];
    let mut stds = vec![vec![None; algorithms.len()]; images.len()];
    for r in rows {
        let i = images.iter().position(|x| x == &r.image).unwrap_or_default();
        let j = algorithms.iter().position(|x| x == &r.algorithm).unwrap_or_default();
        means[i][j] = r.mean;
        stds[i][j] = r.std;
    }
    if let Some((i, j)) = (0..images.len())
        .flat_map(|i| (0..algorithms.len()).map(move |j| (i, j)))
        .find(|&(i, j)| means[i][j].is_nan())
    {
        return Err(Error::InvalidInput(format!(
            "summary lacks {} on {}",
            algorithms[j], images[i]
        )));
    }
    Ok(MeansMatrix {
        images,
        algorithms,
        means,
        stds,
    })
}

fn ranked(m: &MeansMatrix, higher_better: bool) -> Result<RankTable> {
    if higher_better {
        let neg: Vec<Vec<f64>> = m
            .means
            .iter()
            .map(|r| r.iter().map(|v| -v).collect())
            .collect();
        rank_table(&neg)
    } else {
        rank_table(&m.means)
    }
}

pub fn average_ranks(rows: &[SummaryRow], higher_better: bool) -> Result<Vec<RankRow>> {
    let m = means_matrix(rows)?;
    let t = ranked(&m, higher_better)?;
    let metric = if higher_better { "hypervolume" } else { "scalar" };
    Ok(m.algorithms
        .iter()
        .enumerate()
        .map(|(j, a)| RankRow {
            metric: metric.to_string(),
            algorithm: a.clone(),
            average_rank: t.average[j],
            overall_rank: t.overall[j],
        })
        .collect())
}

/// Five significant digits, so tiny hypervolumes stay readable.
fn sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let digits = (4 - v.abs().log10().floor() as i32).max(0) as usize;
    format!("{v:.digits$}")
}

fn render(header: &[String], body: &[Vec<String>]) -> String {
    let cols = header.len();
    let width: Vec<usize> = (0..cols)
        .map(|c| {
            body.iter()
                .map(|r| r[c].len())
                .chain([header[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| {
        let mut s = String::new();
        for (c, cell) in cells.iter().enumerate() {
            if c == 0 {
                let _ = write!(s, "{cell:<w$}", w = width[c]);
            } else {
                let _ = write!(s, "  {cell:>w$}", w = width[c]);
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(header);
    out.push_str(&"-".repeat(width.iter().sum::<usize>() + 2 * (cols - 1)));
    out.push('\n');
    for r in body {
        out.push_str(&line(r));
    }
    out
}

/// Aligned table with one row per image (`mean ± std (rank)`), then average
/// and overall ranks.
pub fn rank_text(title: &str, rows: &[SummaryRow], higher_better: bool) -> Result<String> {
    let m = means_matrix(rows)?;
    let t = ranked(&m, higher_better)?;
    let mut header = vec!["image".to_string()];
    header.extend(m.algorithms.iter().cloned());
    let mut body = Vec::new();
    for (i, img) in m.images.iter().enumerate() {
        let mut row = vec![img.clone()];
        for j in 0..m.algorithms.len() {
            let cell = match m.stds[i][j] {
                Some(s) => format!("{} ± {} ({})", sig(m.means[i][j]), sig(s), t.per_row[i][j]),
                None => format!("{} ({})", sig(m.means[i][j]), t.per_row[i][j]),
            };
            row.push(cell);
        }
        body.push(row);
    }
    let mut avg = vec!["average rank".to_string()];
    avg.extend(t.average.iter().map(|v| format!("{v:.2}")));
    let mut overall = vec!["overall rank".to_string()];
    overall.extend(t.overall.iter().map(|v| format!("{v}")));
    body.push(avg);
    body.push(overall);
    Ok(format!("{title}\n\n{}", render(&header, &body)))
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Paired Wilcoxon test of one algorithm against the reference, over images.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonRow {
    pub algorithm: String,
    pub reference: String,
    pub n: usize,
    pub w_plus: Option<f64>,
    pub w_minus: Option<f64>,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub exact: Option<bool>,
    /// "+" when the algorithm's means are lower (better) than the
    /// reference's, "-" when higher, "=" when not significant at `alpha`.
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsReport {
    pub matrix: MeansMatrix,
    pub ranks: RankTable,
    pub tests: Vec<WilcoxonRow>,
    pub alpha: f64,
}

/// Ranks plus Wilcoxon tests of every algorithm against `reference` on the
/// per-image means.
pub fn stats(rows: &[SummaryRow], reference: &str, alpha: f64) -> Result<StatsReport> {
    let matrix = means_matrix(rows)?;
    let ranks = rank_table(&matrix.means)?;
    let col = |name: &str| {
        matrix
            .algorithms
            .iter()
            .position(|a| a.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::InvalidArgument(format!("no algorithm {name:?} in summary")))
    };
    let rj = col(reference)?;
    let column = |j: usize| -> Vec<f64> { matrix.means.iter().map(|r| r[j]).collect() };
    let base = column(rj);
    let mut tests = Vec::new();
    for (j, a) in matrix.algorithms.iter().enumerate() {
        if j == rj {
            continue;
        }
        let x = column(j);
        let row = match wilcoxon_signed_rank(&x, &base) {
            Ok(w) => {
                let better = w.w_minus > w.w_plus;
                let verdict = if !w.significant(alpha) {
                    "="
                } else if better {
                    "+"
                } else {
                    "-"
                };
                WilcoxonRow {
                    algorithm: a.clone(),
                    reference: matrix.algorithms[rj].clone(),
                    n: w.n,
                    w_plus: Some(w.w_plus),
                    w_minus: Some(w.w_minus),
                    statistic: Some(w.statistic),
                    p_value: Some(w.p_value),
                    exact: Some(w.exact),
                    verdict: verdict.into(),
                }
            }
            Err(Error::DegenerateSamples) => WilcoxonRow {
                algorithm: a.clone(),
                reference: matrix.algorithms[rj].clone(),
                n: 0,
                w_plus: None,
                w_minus: None,
                statistic: None,
                p_value: None,
                exact: None,
                verdict: "=".into(),
            },
            Err(e) => return Err(e),
        };
        tests.push(row);
    }
    Ok(StatsReport {
        matrix,
        ranks,
        tests,
        alpha,
    })
}

impl StatsReport {
    pub fn to_text(&self) -> String {
        let m = &self.matrix;
        let mut header = vec!["image".to_string()];
        header.extend(m.algorithms.iter().cloned());
        let mut body: Vec<Vec<String>> = m
            .images
            .iter()
            .enumerate()
            .map(|(i, img)| {
                let mut row = vec![img.clone()];
                row.extend((0..m.algorithms.len()).map(|j| {
                    format!("{} ({})", sig(m.means[i][j]), self.ranks.per_row[i][j])
                }));
                row
            })
            .collect();
        let mut avg = vec!["average rank".to_string()];
        avg.extend(self.ranks.average.iter().map(|v| format!("{v:.2}")));
        let mut overall = vec!["overall rank".to_string()];
        overall.extend(self.ranks.overall.iter().map(|v| format!("{v}")));
        body.push(avg);
        body.push(overall);
        let mut out = render(&header, &body);

        let header: Vec<String> = ["algorithm", "vs", "n", "W+", "W-", "p", "exact", "verdict"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let opt = |v: Option<f64>, prec: usize| v.map_or("-".into(), |x| format!("{x:.prec$}"));
        let body: Vec<Vec<String>> = self
            .tests
            .iter()
            .map(|t| {
                vec![
                    t.algorithm.clone(),
                    t.reference.clone(),
                    t.n.to_string(),
                    opt(t.w_plus, 1),
                    opt(t.w_minus, 1),
                    opt(t.p_value, 5),
                    t.exact.map_or("-".into(), |e| e.to_string()),
                    t.verdict.clone(),
                ]
            })
            .collect();
        let _ = write!(
            out,
            "\nWilcoxon signed-rank, alpha = {}\n\n{}",
            self.alpha,
            render(&header, &body)
        );
        out
    }
}

/// Loads `config.json` and every `run_*.json` below `dir/runs`, ordered by
/// image (configuration order), algorithm (configuration order) and run.
pub fn load_runs(dir: &Path) -> Result<(ExperimentConfig, Vec<RunRecord>)> {
    let cfg_path = dir.join("config.json");
    let text = std::fs::read_to_string(&cfg_path)
        .map_err(|e| Error::io(cfg_path.display().to_string(), e))?;
    let cfg: ExperimentConfig = serde_json::from_str(&text)?;
    let mut runs = Vec::new();
    for img in &cfg.images {
        for &a in &cfg.algorithms {
            if a == AlgorithmId::Baseline {
                continue;
            }
            let d = super::experiment::run_dir(dir, &img.name(), a);
            for r in 0..cfg.runs {
                let p = d.join(format!("run_{r}.json"));
                let text =
                    std::fs::read_to_string(&p).map_err(|e| Error::io(p.display().to_string(), e))?;
                runs.push(serde_json::from_str(&text)?);
            }
        }
    }
    Ok((cfg, runs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoRunRow {
    pub image: String,
    pub algorithm: String,
    pub run: usize,
    pub hypervolume: f64,
    pub front_size: usize,
    pub selected_fs: f64,
    pub selected_psnr: f64,
    pub selected_scalar: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoReport {
    pub runs: Vec<ParetoRunRow>,
    pub summary: Vec<HvSummaryRow>,
    /// Union of all runs' fronts per (image, algorithm).
    pub merged: Vec<(String, String, ParetoSet)>,
}

/// Hypervolume and selected members of every Pareto run in an experiment
/// directory. `reference` overrides the shared per-image reference.
pub fn pareto_report(dir: &Path, reference: Option<ObjectivePoint>) -> Result<ParetoReport> {
    let (cfg, runs) = load_runs(dir)?;
    let runs: Vec<RunRecord> = runs.into_iter().filter(|r| r.front().is_some()).collect();
    if runs.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{} holds no Pareto runs",
            dir.display()
        )));
    }
    let mut refs = shared_references(&runs)?;
    if let Some(p) = reference {
        refs.values_mut().for_each(|v| *v = p);
    }
    let hv = run_hypervolumes(&runs, &refs)?;
    let mut rows = Vec::new();
    for (r, h) in runs.iter().zip(&hv) {
        let front = r.front().expect("filtered");
        let i = pf_selected_index(&front.points(), &cfg.weights)?;
        let sel = front.members[i].record;
        rows.push(ParetoRunRow {
            image: r.image.clone(),
            algorithm: r.algorithm.name().to_string(),
            run: r.run,
            hypervolume: *h,
            front_size: front.len(),
            selected_fs: sel.fs_ratio,
            selected_psnr: sel.psnr_db,
            selected_scalar: sel.scalar_value,
        });
    }

    let images: Vec<String> = cfg.images.iter().map(|i| i.name()).collect();
    let mut summary = Vec::new();
    let mut merged = Vec::new();
    for image in &images {
        let reference = refs[image];
        let mut cells = Vec::new();
        for &a in &cfg.algorithms {
            let v: Vec<f64> = rows
                .iter()
                .filter(|r| &r.image == image && r.algorithm == a.name())
                .map(|r| r.hypervolume)
                .collect();
            if v.is_empty() {
                continue;
            }
            let (m, s) = mean_std(&v);
            cells.push((a.name().to_string(), m, s));
            let all: Vec<ParetoMember> = runs
                .iter()
                .filter(|r| &r.image == image && r.algorithm == a)
                .flat_map(|r| r.front().expect("filtered").members.clone())
                .collect();
            merged.push((image.clone(), a.name().to_string(), ParetoSet::from_members(all)));
        }
        let rk = ranks(&cells.iter().map(|c| c.1).collect::<Vec<_>>(), true);
        for ((alg, mean, std), rank) in cells.into_iter().zip(rk) {
            summary.push(HvSummaryRow {
                image: image.clone(),
                algorithm: alg,
                mean,
                std: Some(std),
                rank,
                ref_f1: reference.f1,
                ref_f2: reference.f2,
            });
        }
    }
    Ok(ParetoReport {
        runs: rows,
        summary,
        merged,
    })
}

impl ParetoReport {
    /// Writes `pareto_runs.csv`, `hv_summary.csv` and one
    /// `merged_front_<image>_<alg>.csv` per cell into `out`.
    pub fn write(&self, out: &Path) -> Result<Vec<PathBuf>> {
        #[derive(Serialize)]
        struct Pt {
            f1: f64,
            f2: f64,
            fs_ratio: f64,
            psnr_db: f64,
        }
        let mut written = vec![out.join("pareto_runs.csv"), out.join("hv_summary.csv")];
        super::write_csv(&written[0], &self.runs)?;
        super::write_csv(&written[1], &self.summary)?;
        for (img, alg, set) in &self.merged {
            let rows: Vec<Pt> = set
                .members
                .iter()
                .map(|m| Pt {
                    f1: m.point().f1,
                    f2: m.point().f2,
                    fs_ratio: m.record.fs_ratio,
                    psnr_db: m.record.psnr_db,
                })
                .collect();
            let p = out.join(format!("merged_front_{img}_{alg}.csv"));
            super::write_csv(&p, &rows)?;
            written.push(p);
        }
        Ok(written)
    }

    pub fn to_text(&self) -> Result<String> {
        let plain: Vec<SummaryRow> = self.summary.iter().map(HvSummaryRow::as_summary).collect();
        let mut s = rank_text("Mean hypervolume", &plain, true)?;
        s.push_str("\nreference points\n");
        let mut seen = Vec::new();
        for r in &self.summary {
            if !seen.contains(&&r.image) {
                seen.push(&r.image);
                let _ = writeln!(s, "  {}: ({:.6}, {:.6})", r.image, r.ref_f1, r.ref_f2);
            }
        }
        Ok(s)
    }
}
