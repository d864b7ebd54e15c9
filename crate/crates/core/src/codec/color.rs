//! Full-range BT.601 (JFIF) colour conversion.

use super::image::ImageBuffer;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorDirection {
    RgbToYcbcr,
    YcbcrToRgb,
}

#[inline]
fn to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

#[inline]
pub(crate) fn rgb_to_ycbcr_f64(r: f64, g: f64, b: f64) -> [f64; 3] {
    [
        0.299 * r + 0.587 * g + 0.114 * b,
        -0.168_736 * r - 0.331_264 * g + 0.5 * b + 128.0,
        0.5 * r - 0.418_688 * g - 0.081_312 * b + 128.0,
    ]
}

#[inline]
pub(crate) fn ycbcr_to_rgb_f64(y: f64, cb: f64, cr: f64) -> [f64; 3] {
    let cb = cb - 128.0;
    let cr = cr - 128.0;
    [
        y + 1.402 * cr,
        y - 0.344_136 * cb - 0.714_136 * cr,
        y + 1.772 * cb,
    ]
}

pub fn rgb_to_ycbcr(rgb: [u8; 3]) -> [u8; 3] {
    let [r, g, b] = rgb.map(f64::from);
    rgb_to_ycbcr_f64(r, g, b).map(to_u8)
}

pub fn ycbcr_to_rgb(ycc: [u8; 3]) -> [u8; 3] {
    let [y, cb, cr] = ycc.map(f64::from);
    ycbcr_to_rgb_f64(y, cb, cr).map(to_u8)
}

/// Converts a three-channel image between RGB and YCbCr, clamping to `[0, 255]`.
pub fn color_convert(img: &ImageBuffer, direction: ColorDirection) -> Result<ImageBuffer> {
    if img.channels() != 3 {
        return Err(Error::InvalidInput(format!(
            "colour conversion needs 3 channels, got {}",
            img.channels()
        )));
    }
    let convert = match direction {
        ColorDirection::RgbToYcbcr => rgb_to_ycbcr,
        ColorDirection::YcbcrToRgb => ycbcr_to_rgb,
    };
    let mut out = Vec::with_capacity(img.raw_len());
    for px in img.samples().chunks_exact(3) {
        out.extend_from_slice(&convert([px[0], px[1], px[2]]));
    }
    ImageBuffer::new(img.width(), img.height(), 3, out)
}
