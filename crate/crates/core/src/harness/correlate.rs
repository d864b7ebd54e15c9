//! Correlation between an energy proxy, file size and PSNR across quality
//! levels, read from a `level,ec,size,psnr` CSV.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::pearson;

/// One quality level. `psnr` may be `inf` for the uncompressed row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub level: String,
    pub ec: f64,
    pub size: f64,
    pub psnr: f64,
}

impl EnergyRow {
    /// Lossless rows carry an infinite PSNR.
    pub fn is_uncompressed(&self) -> bool {
        self.psnr.is_infinite()
    }

    fn get(&self, v: usize) -> f64 {
        [self.ec, self.size, self.psnr][v]
    }
}

pub const VARIABLES: [&str; 3] = ["EC", "size", "PSNR"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowSet {
    All,
    ExcludingUncompressed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub rows: RowSet,
    pub x: String,
    pub y: String,
    /// Pairs with both values finite.
    pub n: usize,
    pub r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub entries: Vec<CorrelationRow>,
}

pub fn read_energy_csv(path: &Path) -> Result<Vec<EnergyRow>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let rows: Vec<EnergyRow> = r.deserialize().collect::<std::result::Result<_, _>>()?;
    if rows.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "{}: need at least two rows",
            path.display()
        )));
    }
    Ok(rows)
}

/// Pearson correlation for every pair of variables, over all rows and over
/// the compressed rows only. Undefined correlations are reported as `None`.
#[allow(clippy::needless_range_loop)]
pub fn correlate(rows: &[EnergyRow]) -> Result<CorrelationReport> {
    let mut entries = Vec::new();
    for set in [RowSet::All, RowSet::ExcludingUncompressed] {
        let kept: Vec<&EnergyRow> = rows
            .iter()
            .filter(|r| set == RowSet::All || !r.is_uncompressed())
            .collect();
        for a in 0..3 {
            for b in a + 1..3 {
                let x: Vec<f64> = kept.iter().map(|r| r.get(a)).collect();
                let y: Vec<f64> = kept.iter().map(|r| r.get(b)).collect();
                let n = x
                    .iter()
                    .zip(&y)
                    .filter(|(p, q)| p.is_finite() && q.is_finite())
                    .count();
                let r = match pearson(&x, &y) {
                    Ok(r) => Some(r),
                    Err(Error::UndefinedCorrelation(_)) => None,
                    Err(e) => return Err(e),
                };
                entries.push(CorrelationRow {
                    rows: set,
                    x: VARIABLES[a].into(),
                    y: VARIABLES[b].into(),
                    n,
                    r,
                });
            }
        }
    }
    Ok(CorrelationReport { entries })
}

impl CorrelationReport {
    pub fn get(&self, rows: RowSet, x: &str, y: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| {
                e.rows == rows
                    && ((e.x == x && e.y == y) || (e.x == y && e.y == x))
            })
            .and_then(|e| e.r)
    }

    /// Two symmetric 3×3 matrices, one per row set.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (set, title) in [
            (RowSet::All, "all rows"),
            (RowSet::ExcludingUncompressed, "excluding uncompressed rows"),
        ] {
            let _ = writeln!(s, "Pearson correlation, {title}");
            let _ = write!(s, "{:>6}", "");
            for v in VARIABLES {
                let _ = write!(s, "{v:>9}");
            }
            s.push('\n');
            for a in VARIABLES {
                let _ = write!(s, "{a:>6}");
                for b in VARIABLES {
                    let cell = if a == b {
                        "1".to_string()
                    } else {
                        self.get(set, a, b).map_or("-".into(), |r| format!("{r:.5}"))
                    };
                    let _ = write!(s, "{cell:>9}");
                }
                s.push('\n');
            }
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Vec<EnergyRow> {
        let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/energy_levels.csv");
        read_energy_csv(&p).unwrap()
    }

    #[test]
    fn shipped_table_parses() {
        let t = table();
        assert_eq!(t.len(), 6);
        assert!(t[0].is_uncompressed());
        assert_eq!(t[5].psnr, 28.3434);
    }

    #[test]
    fn matches_numpy_corrcoef() {
        // values from numpy.corrcoef on the same columns
        let r = correlate(&table()).unwrap();
        let close = |a: Option<f64>, b: f64| (a.unwrap() - b).abs() < 1e-9;
        assert!(close(r.get(RowSet::All, "EC", "size"), 0.9433259018627104));
        assert!(close(r.get(RowSet::ExcludingUncompressed, "EC", "size"), 0.9895134675630564));
        assert!(close(r.get(RowSet::All, "EC", "PSNR"), 0.9754336379125471));
        assert!(close(r.get(RowSet::All, "size", "PSNR"), 0.9615244407458192));
        assert_eq!(r.get(RowSet::All, "size", "PSNR"), r.get(RowSet::ExcludingUncompressed, "PSNR", "size"));
        let text = r.to_text();
        assert!(text.contains("0.96152"), "{text}");
    }

    #[test]
    fn constant_column_is_undefined() {
        let rows: Vec<EnergyRow> = (0..3)
            .map(|i| EnergyRow {
                level: i.to_string(),
                ec: 1.0,
                size: i as f64,
                psnr: 30.0 + i as f64,
            })
            .collect();
        let r = correlate(&rows).unwrap();
        assert_eq!(r.get(RowSet::All, "EC", "size"), None);
        assert!(r.get(RowSet::All, "size", "PSNR").is_some());
    }
}
