//! Deterministic synthetic test images.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::ImageBuffer;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    /// Linear colour ramps.
    Gradient,
    /// Uniform i.i.d. noise.
    Noise,
    /// 8-pixel checkerboard with two colours.
    Checkerboard,
    /// Smooth blobs, soft edges, texture and mild noise; a stand-in for a photograph.
    Photo,
}

impl std::str::FromStr for Pattern {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gradient" => Ok(Pattern::Gradient),
            "noise" => Ok(Pattern::Noise),
            "checkerboard" => Ok(Pattern::Checkerboard),
            "photo" => Ok(Pattern::Photo),
            other => Err(crate::Error::InvalidArgument(format!(
                "unknown pattern {other:?}"
            ))),
        }
    }
}

fn to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Generates a `width × height` image with `channels` (1 or 3) channels.
pub fn generate(
    pattern: Pattern,
    width: usize,
    height: usize,
    channels: usize,
    seed: u64,
) -> Result<ImageBuffer> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match pattern {
        Pattern::Gradient => {
            let phase: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..1.0));
            ImageBuffer::from_fn(width, height, channels, |x, y, c| {
                let fx = x as f64 / width.max(2) as f64;
                let fy = y as f64 / height.max(2) as f64;
                let t = match c {
                    0 => 0.6 * fx + 0.4 * fy,
                    1 => 0.3 * fx + 0.7 * (1.0 - fy),
                    _ => (1.0 - fx) * 0.5 + fy * 0.5,
                };
                to_u8(255.0 * ((t + phase[c] * 0.2) % 1.0))
            })
        }
        Pattern::Noise => {
            let n = width * height * channels;
            let samples = (0..n).map(|_| rng.random::<u8>()).collect();
            ImageBuffer::new(width, height, channels, samples)
        }
        Pattern::Checkerboard => {
            let a: [u8; 3] = rng.random();
            let b: [u8; 3] = rng.random();
            ImageBuffer::from_fn(width, height, channels, |x, y, c| {
                if ((x / 8) + (y / 8)) % 2 == 0 {
                    a[c]
                } else {
                    b[c]
                }
            })
        }
        Pattern::Photo => photo(width, height, channels, &mut rng),
    }
}

struct Blob {
    cx: f64,
    cy: f64,
    radius: f64,
    colour: [f64; 3],
}

fn photo(width: usize, height: usize, channels: usize, rng: &mut ChaCha8Rng) -> Result<ImageBuffer> {
    let (w, h) = (width as f64, height as f64);
    let sky: [f64; 3] = std::array::from_fn(|_| rng.random_range(60.0..200.0));
    let ground: [f64; 3] = std::array::from_fn(|_| rng.random_range(30.0..170.0));
    let horizon = rng.random_range(0.35..0.65) * h;
    let blobs: Vec<Blob> = (0..rng.random_range(4..9))
        .map(|_| Blob {
            cx: rng.random_range(0.0..w),
            cy: rng.random_range(0.0..h),
            radius: rng.random_range(0.06..0.25) * w.min(h),
            colour: std::array::from_fn(|_| rng.random_range(0.0..255.0)),
        })
        .collect();
    let freq = rng.random_range(0.15..0.45);
    let texture_amp = rng.random_range(6.0..18.0);
    let noise_amp = rng.random_range(2.0..6.0);

    let mut samples = Vec::with_capacity(width * height * channels);
    for y in 0..height {
        for x in 0..width {
            let (fx, fy) = (x as f64, y as f64);
            let t = (fy - horizon) / h;
            let mut px: [f64; 3] = if fy < horizon {
                std::array::from_fn(|c| sky[c] * (0.8 + 0.4 * (fy / horizon)))
            } else {
                std::array::from_fn(|c| ground[c] * (1.0 - 0.5 * t))
            };
            // textured ground
            if fy >= horizon {
                let tex = texture_amp * (freq * fx).sin() * (freq * 1.3 * fy + 0.5 * fx.cos()).cos();
                for v in &mut px {
                    *v += tex;
                }
            }
            for b in &blobs {
                let d = ((fx - b.cx).powi(2) + (fy - b.cy).powi(2)).sqrt();
                // soft-edged disc
                let alpha = 1.0 / (1.0 + ((d - b.radius) / 1.5).exp());
                let shade = 1.0 - 0.3 * (d / b.radius).min(1.0);
                for (p, &col) in px.iter_mut().zip(&b.colour) {
                    *p = *p * (1.0 - alpha) + col * shade * alpha;
                }
            }
            let n = noise_amp * (rng.random::<f64>() - 0.5) * 2.0;
            if channels == 1 {
                samples.push(to_u8(0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2] + n));
            } else {
                for v in px {
                    samples.push(to_u8(v + n));
                }
            }
        }
    }
    ImageBuffer::new(width, height, channels, samples)
}

/// A mixed corpus of `count` images cycling through the patterns.
pub fn corpus(count: usize, width: usize, height: usize, seed: u64) -> Result<Vec<ImageBuffer>> {
    const PATTERNS: [Pattern; 4] = [
        Pattern::Photo,
        Pattern::Gradient,
        Pattern::Checkerboard,
        Pattern::Noise,
    ];
    (0..count)
        .map(|i| {
            let channels = if i % 5 == 4 { 1 } else { 3 };
            generate(
                PATTERNS[i % PATTERNS.len()],
                width,
                height,
                channels,
                seed.wrapping_add(i as u64),
            )
        })
        .collect()
}
