use serde::{Deserialize, Serialize};

use super::dct::CoeffBlock;
use super::zigzag::ZIGZAG;
use crate::error::{Error, Result};

/// One 8×8 quantizer step-size matrix in natural (row-major) order.
///
/// Every entry lies in `[1, 255]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u16>", into = "Vec<u16>")]
pub struct QuantTable([u8; 64]);

impl QuantTable {
    pub fn new(entries: [u16; 64]) -> Result<Self> {
        let mut out = [0u8; 64];
        for (i, (&e, slot)) in entries.iter().zip(out.iter_mut()).enumerate() {
            if !(1..=255).contains(&e) {
                return Err(Error::InvalidTable(format!(
                    "entry {i} is {e}, expected a step size in [1, 255]"
                )));
            }
            *slot = e as u8;
        }
        Ok(Self(out))
    }

    pub fn from_u8(entries: [u8; 64]) -> Result<Self> {
        Self::new(entries.map(u16::from))
    }

    /// Table with every step equal to `step`.
    pub fn uniform(step: u8) -> Result<Self> {
        Self::from_u8([step; 64])
    }

    pub fn entries(&self) -> &[u8; 64] {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.0[row * 8 + col]
    }

    /// Entries in zigzag order, as stored in a DQT segment.
    pub fn zigzag_entries(&self) -> [u8; 64] {
        std::array::from_fn(|k| self.0[ZIGZAG[k]])
    }
}

impl TryFrom<Vec<u16>> for QuantTable {
    type Error = Error;

    fn try_from(v: Vec<u16>) -> Result<Self> {
        let arr: [u16; 64] = v.try_into().map_err(|v: Vec<u16>| {
            Error::InvalidTable(format!("expected 64 entries, got {}", v.len()))
        })?;
        Self::new(arr)
    }
}

impl From<QuantTable> for Vec<u16> {
    fn from(t: QuantTable) -> Self {
        t.0.iter().map(|&e| u16::from(e)).collect()
    }
}

/// Luminance and chrominance quantization tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantTables {
    pub lqt: QuantTable,
    pub cqt: QuantTable,
}

/// Quantizes coefficients against a raw table, validating the step sizes.
pub fn quantize(coeffs: &CoeffBlock, table: &[u16; 64]) -> Result<[i32; 64]> {
    let table = QuantTable::new(*table)?;
    Ok(quantize_with(coeffs, &table))
}

/// `L = round(F / Q)`, rounding half away from zero.
pub fn quantize_with(coeffs: &CoeffBlock, table: &QuantTable) -> [i32; 64] {
    std::array::from_fn(|i| (coeffs.0[i] / f64::from(table.0[i])).round() as i32)
}

/// `F̄ = L × Q`.
pub fn dequantize(levels: &[i32; 64], table: &QuantTable) -> CoeffBlock {
    CoeffBlock(std::array::from_fn(|i| {
        f64::from(levels[i]) * f64::from(table.0[i])
    }))
}
