//! The two conflicting objectives (compressed size ratio and reconstruction
//! PSNR) and their weighted scalarization.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::color::rgb_to_ycbcr_f64;
use crate::codec::{EncodeOptions, ImageBuffer, JpegStream, PreparedImage};
use crate::error::{Error, Result};
use crate::qtable::{decode, Bounds, Genotype};

/// Objective weights of the scalarized fitness `w1·fs + w2/psnr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeights")]
pub struct Weights {
    w1: f64,
    w2: f64,
}

#[derive(Deserialize)]
struct RawWeights {
    w1: f64,
    w2: f64,
}

impl TryFrom<RawWeights> for Weights {
    type Error = Error;

    fn try_from(r: RawWeights) -> Result<Self> {
        Weights::new(r.w1, r.w2)
    }
}

impl Default for Weights {
    fn default() -> Self {
        Self { w1: 1.0, w2: 1.0 }
    }
}

impl Weights {
    pub fn new(w1: f64, w2: f64) -> Result<Self> {
        let ok = |w: f64| w.is_finite() && w >= 0.0;
        if !ok(w1) || !ok(w2) || (w1 == 0.0 && w2 == 0.0) {
            return Err(Error::InvalidArgument(format!(
                "weights must be finite, nonnegative and not both zero, got ({w1}, {w2})"
            )));
        }
        Ok(Self { w1, w2 })
    }

    /// `w_i = 1/M` for the two objectives.
    pub fn equal() -> Self {
        Self { w1: 0.5, w2: 0.5 }
    }

    pub fn w1(&self) -> f64 {
        self.w1
    }

    pub fn w2(&self) -> f64 {
        self.w2
    }
}

/// One objective evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveRecord {
    pub fs_ratio: f64,
    /// Decibels; `f64::INFINITY` for a lossless reconstruction.
    pub psnr_db: f64,
    #[serde(rename = "scalar")]
    pub scalar_value: f64,
}

impl ObjectiveRecord {
    pub fn new(fs_ratio: f64, psnr_db: f64, weights: &Weights) -> Result<Self> {
        Ok(Self {
            fs_ratio,
            psnr_db,
            scalar_value: scalarize(fs_ratio, psnr_db, weights)?,
        })
    }

    /// Second minimized objective of the Pareto formulation.
    pub fn inverse_psnr(&self) -> f64 {
        1.0 / self.psnr_db
    }

    pub fn point(&self) -> ObjectivePoint {
        ObjectivePoint::new(self.fs_ratio, self.inverse_psnr())
    }
}

/// A point in the bi-objective space `(fs_ratio, 1/psnr)`, both minimized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectivePoint {
    pub f1: f64,
    pub f2: f64,
}

impl ObjectivePoint {
    pub const fn new(f1: f64, f2: f64) -> Self {
        Self { f1, f2 }
    }

    pub fn get(&self, m: usize) -> f64 {
        match m {
            0 => self.f1,
            1 => self.f2,
            _ => panic!("objective index {m} out of range"),
        }
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.f1, self.f2]
    }
}

impl From<(f64, f64)> for ObjectivePoint {
    fn from((f1, f2): (f64, f64)) -> Self {
        Self { f1, f2 }
    }
}

/// `FS_JPEG / FS_org`.
pub fn fs_ratio(compressed_bytes: usize, original_bytes: usize) -> Result<f64> {
    if original_bytes == 0 {
        return Err(Error::InvalidArgument(
            "original size must be positive".into(),
        ));
    }
    Ok(compressed_bytes as f64 / original_bytes as f64)
}

/// Size objective of an encoded stream against the original's byte count.
pub fn fs_obj(stream: &JpegStream, original_bytes: usize) -> Result<f64> {
    fs_ratio(stream.size_bytes(), original_bytes)
}

fn check_shapes(a: &ImageBuffer, b: &ImageBuffer) -> Result<()> {
    if (a.width(), a.height(), a.channels()) != (b.width(), b.height(), b.channels()) {
        return Err(Error::InvalidArgument(format!(
            "PSNR needs equal shapes, got {}x{}x{} and {}x{}x{}",
            a.width(),
            a.height(),
            a.channels(),
            b.width(),
            b.height(),
            b.channels()
        )));
    }
    Ok(())
}

fn psnr_from_sse(sse: f64, n: usize) -> f64 {
    if sse == 0.0 {
        return f64::INFINITY;
    }
    let rmse = (sse / n as f64).sqrt();
    20.0 * (255.0 / rmse).log10()
}

/// `20·log10(255 / RMSE)` over every sample of every channel.
pub fn psnr(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64> {
    check_shapes(a, b)?;
    let sse: f64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| {
            let d = f64::from(x) - f64::from(y);
            d * d
        })
        .sum();
    Ok(psnr_from_sse(sse, a.raw_len()))
}

/// PSNR of the BT.601 luma of both images (plain PSNR for grayscale).
pub fn psnr_luma(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64> {
    check_shapes(a, b)?;
    if a.channels() == 1 {
        return psnr(a, b);
    }
    let luma = |p: &[u8]| rgb_to_ycbcr_f64(p[0].into(), p[1].into(), p[2].into())[0];
    let sse: f64 = a
        .samples()
        .chunks_exact(3)
        .zip(b.samples().chunks_exact(3))
        .map(|(p, q)| {
            let d = luma(p) - luma(q);
            d * d
        })
        .sum();
    Ok(psnr_from_sse(sse, a.width() * a.height()))
}

/// `w1·fs + w2/psnr`, with an infinite PSNR contributing nothing.
pub fn scalarize(fs_ratio: f64, psnr_db: f64, w: &Weights) -> Result<f64> {
    if psnr_db == 0.0 {
        return Err(Error::DegenerateQuality);
    }
    if psnr_db.is_nan() || psnr_db < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "PSNR must be positive, got {psnr_db}"
        )));
    }
    let quality = if psnr_db.is_infinite() {
        0.0
    } else {
        w.w2 / psnr_db
    };
    Ok(w.w1 * fs_ratio + quality)
}

/// Denominator of the size ratio.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "bytes")]
pub enum SizeBasis {
    /// width × height × channels
    #[default]
    Raw,
    /// Byte size of the source file the image was read from.
    SourceFile(u64),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PsnrMode {
    #[default]
    Rgb,
    Luma,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveOptions {
    #[serde(default)]
    pub encode: EncodeOptions,
    #[serde(default)]
    pub size_basis: SizeBasis,
    #[serde(default)]
    pub psnr_mode: PsnrMode,
}

/// Anything an optimizer can minimize over genotypes.
///
/// Implementations must be pure: equal genotypes give bitwise-equal records.
pub trait Problem: Sync {
    fn bounds(&self) -> Bounds {
        Bounds::default()
    }

    fn evaluate(&self, g: &Genotype) -> Result<ObjectiveRecord>;
}

/// Quantization-table search on one image.
#[derive(Debug, Clone)]
pub struct ImageProblem {
    original: ImageBuffer,
    prepared: PreparedImage,
    weights: Weights,
    options: ObjectiveOptions,
}

impl ImageProblem {
    pub fn new(img: ImageBuffer, weights: Weights, options: ObjectiveOptions) -> Self {
        let prepared = PreparedImage::new(&img, options.encode);
        Self {
            original: img,
            prepared,
            weights,
            options,
        }
    }

    pub fn image(&self) -> &ImageBuffer {
        &self.original
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn options(&self) -> &ObjectiveOptions {
        &self.options
    }

    fn original_bytes(&self) -> usize {
        match self.options.size_basis {
            SizeBasis::Raw => self.original.raw_len(),
            SizeBasis::SourceFile(n) => n as usize,
        }
    }

    /// Evaluates explicit tables rather than a genotype.
    pub fn evaluate_tables(&self, tables: &crate::codec::QuantTables) -> Result<ObjectiveRecord> {
        let (stream, rec) = self.prepared.compress(tables)?;
        let fs = fs_obj(&stream, self.original_bytes())?;
        let q = match self.options.psnr_mode {
            PsnrMode::Rgb => psnr(&self.original, &rec)?,
            PsnrMode::Luma => psnr_luma(&self.original, &rec)?,
        };
        ObjectiveRecord::new(fs, q, &self.weights)
    }

    /// Encoded stream for a genotype.
    pub fn encode(&self, g: &Genotype) -> Result<JpegStream> {
        self.prepared.encode(&decode(g))
    }
}

impl Problem for ImageProblem {
    fn evaluate(&self, g: &Genotype) -> Result<ObjectiveRecord> {
        self.evaluate_tables(&decode(g))
    }
}

/// One-shot evaluation of a genotype on an image.
pub fn evaluate(
    g: &Genotype,
    img: &ImageBuffer,
    w: &Weights,
    opts: &ObjectiveOptions,
) -> Result<ObjectiveRecord> {
    ImageProblem::new(img.clone(), *w, *opts).evaluate(g)
}

/// Counts objective evaluations and evaluates batches in parallel.
///
/// Batch evaluation consumes no randomness, so results do not depend on
/// thread scheduling.
pub struct Evaluator<'a, P: Problem + ?Sized> {
    problem: &'a P,
    nfe: usize,
}

impl<'a, P: Problem + ?Sized> Evaluator<'a, P> {
    pub fn new(problem: &'a P) -> Self {
        Self { problem, nfe: 0 }
    }

    pub fn nfe(&self) -> usize {
        self.nfe
    }

    pub fn bounds(&self) -> Bounds {
        self.problem.bounds()
    }

    pub fn evaluate(&mut self, g: &Genotype) -> Result<ObjectiveRecord> {
        self.nfe += 1;
        self.problem.evaluate(g)
    }

    pub fn evaluate_batch(&mut self, genotypes: &[Genotype]) -> Result<Vec<ObjectiveRecord>> {
        self.nfe += genotypes.len();
        let problem = self.problem;
        genotypes.par_iter().map(|g| problem.evaluate(g)).collect()
    }
}

/// Cheap stand-in problems over the same 128-gene space, used to exercise the
/// optimizers without running the codec.
pub mod surrogate {
    use super::*;

    /// Normalized sphere centred at `centre`: `mean(((x - c) / range)²)`.
    #[derive(Debug, Clone, Copy)]
    pub struct Sphere {
        pub centre: f64,
    }

    impl Default for Sphere {
        fn default() -> Self {
            Self { centre: 60.0 }
        }
    }

    impl Sphere {
        pub fn value(&self, g: &Genotype) -> f64 {
            let b = Bounds::default();
            g.iter()
                .map(|&x| ((x - self.centre) / b.range()).powi(2))
                .sum::<f64>()
                / g.len() as f64
        }
    }

    impl Problem for Sphere {
        fn evaluate(&self, g: &Genotype) -> Result<ObjectiveRecord> {
            let v = self.value(g);
            Ok(ObjectiveRecord {
                fs_ratio: v,
                psnr_db: f64::INFINITY,
                scalar_value: v,
            })
        }
    }

    /// ZDT1-shaped bi-objective problem mapped onto (fs_ratio, 1/psnr).
    #[derive(Debug, Clone, Copy, Default)]
    pub struct Zdt1;

    impl Problem for Zdt1 {
        fn evaluate(&self, g: &Genotype) -> Result<ObjectiveRecord> {
            let b = Bounds::default();
            let x: Vec<f64> = g.iter().map(|&v| (v - b.lower) / b.range()).collect();
            let f1 = x[0];
            let rest = &x[1..];
            let gg = 1.0 + 9.0 * rest.iter().sum::<f64>() / rest.len() as f64;
            let f2 = gg * (1.0 - (f1 / gg).sqrt());
            let fs = 0.01 + f1;
            let psnr = 1.0 / (0.01 + f2);
            ObjectiveRecord::new(fs, psnr, &Weights::default())
        }
    }
}
