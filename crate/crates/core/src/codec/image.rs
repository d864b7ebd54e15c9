use crate::error::{Error, Result};

/// Decoded 8-bit raster, row-major, channels interleaved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    channels: usize,
    samples: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, channels: usize, samples: Vec<u8>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidInput(format!(
                "expected 1 or 3 channels, got {channels}"
            )));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if width > u16::MAX as usize || height > u16::MAX as usize {
            return Err(Error::InvalidInput(format!(
                "{width}x{height} exceeds the 65535 pixel limit of a baseline frame header"
            )));
        }
        let expected = width * height * channels;
        if samples.len() != expected {
            return Err(Error::InvalidInput(format!(
                "sample count {} does not match {width}x{height}x{channels} = {expected}",
                samples.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            samples,
        })
    }

    /// Builds an image from a per-pixel function returning one value per channel.
    pub fn from_fn(
        width: usize,
        height: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> u8,
    ) -> Result<Self> {
        let mut samples = Vec::with_capacity(width * height * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    samples.push(f(x, y, c));
                }
            }
        }
        Self::new(width, height, channels, samples)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    /// Raw raster size in bytes (width × height × channels).
    pub fn raw_len(&self) -> usize {
        self.samples.len()
    }

    pub fn get(&self, x: usize, y: usize, c: usize) -> u8 {
        self.samples[(y * self.width + x) * self.channels + c]
    }

    /// Extracts one channel as a `width × height` plane.
    pub fn plane(&self, c: usize) -> Vec<u8> {
        self.samples
            .iter()
            .skip(c)
            .step_by(self.channels)
            .copied()
            .collect()
    }

    pub(crate) fn from_planes(width: usize, height: usize, planes: &[Vec<u8>]) -> Result<Self> {
        let channels = planes.len();
        let mut samples = Vec::with_capacity(width * height * channels);
        for i in 0..width * height {
            for plane in planes {
                samples.push(plane[i]);
            }
        }
        Self::new(width, height, channels, samples)
    }
}
