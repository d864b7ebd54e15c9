//! 8×8 type-II DCT and its inverse, in double precision.
//!
//! Coefficients are stored in natural (row-major) order: index `u * 8 + v`
//! holds the coefficient with vertical frequency `u` and horizontal
//! frequency `v`, so index 0 is the DC term.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

/// 64 DCT coefficients of one block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffBlock(pub [f64; 64]);

impl CoeffBlock {
    pub fn dc(&self) -> f64 {
        self.0[0]
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.0[u * 8 + v]
    }
}

impl Default for CoeffBlock {
    fn default() -> Self {
        Self([0.0; 64])
    }
}

#[inline]
fn norm(r: usize) -> f64 {
    if r == 0 {
        FRAC_1_SQRT_2
    } else {
        1.0
    }
}

/// `basis[u][x] = c_u / 2 * cos((2x + 1) u π / 16)`, so that the 2-D
/// transform is `F = B f Bᵀ` with the overall 1/4 factor split evenly.
fn basis() -> &'static [[f64; 8]; 8] {
    static BASIS: OnceLock<[[f64; 8]; 8]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut b = [[0.0; 8]; 8];
        for (u, row) in b.iter_mut().enumerate() {
            for (x, val) in row.iter_mut().enumerate() {
                *val = 0.5 * norm(u) * ((2 * x + 1) as f64 * u as f64 * PI / 16.0).cos();
            }
        }
        b
    })
}

/// Forward DCT of a level-shifted sample block (values nominally in `[-128, 127]`).
///
/// Row-column evaluation of the direct double sum; agrees with
/// [`forward_dct_direct`] to within floating-point rounding.
pub fn forward_dct(block: &[f64; 64]) -> CoeffBlock {
    let b = basis();
    // tmp[x][v] = sum_y f[x][y] * b[v][y]
    let mut tmp = [0.0; 64];
    for x in 0..8 {
        for v in 0..8 {
            let mut acc = 0.0;
            for y in 0..8 {
                acc += block[x * 8 + y] * b[v][y];
            }
            tmp[x * 8 + v] = acc;
        }
    }
    let mut out = [0.0; 64];
    for u in 0..8 {
        for v in 0..8 {
            let mut acc = 0.0;
            for x in 0..8 {
                acc += b[u][x] * tmp[x * 8 + v];
            }
            out[u * 8 + v] = acc;
        }
    }
    CoeffBlock(out)
}

/// Inverse DCT; output is in the level-shifted domain and unrounded.
pub fn inverse_dct(coeffs: &CoeffBlock) -> [f64; 64] {
    let b = basis();
    let f = &coeffs.0;
    // tmp[u][y] = sum_v F[u][v] * b[v][y]
    let mut tmp = [0.0; 64];
    for u in 0..8 {
        for y in 0..8 {
            let mut acc = 0.0;
            for v in 0..8 {
                acc += f[u * 8 + v] * b[v][y];
            }
            tmp[u * 8 + y] = acc;
        }
    }
    let mut out = [0.0; 64];
    for x in 0..8 {
        for y in 0..8 {
            let mut acc = 0.0;
            for u in 0..8 {
                acc += b[u][x] * tmp[u * 8 + y];
            }
            out[x * 8 + y] = acc;
        }
    }
    out
}

/// Quadruple-sum forward DCT, O(64²) per block. Reference form.
pub fn forward_dct_direct(block: &[f64; 64]) -> CoeffBlock {
    let mut out = [0.0; 64];
    for u in 0..8 {
        for v in 0..8 {
            let mut acc = 0.0;
            for x in 0..8 {
                for y in 0..8 {
                    acc += block[x * 8 + y]
                        * ((2 * x + 1) as f64 * u as f64 * PI / 16.0).cos()
                        * ((2 * y + 1) as f64 * v as f64 * PI / 16.0).cos();
                }
            }
            out[u * 8 + v] = 0.25 * norm(u) * norm(v) * acc;
        }
    }
    CoeffBlock(out)
}

/// Quadruple-sum inverse DCT. Reference form.
pub fn inverse_dct_direct(coeffs: &CoeffBlock) -> [f64; 64] {
    let mut out = [0.0; 64];
    for x in 0..8 {
        for y in 0..8 {
            let mut acc = 0.0;
            for u in 0..8 {
                for v in 0..8 {
                    acc += norm(u)
                        * norm(v)
                        * coeffs.0[u * 8 + v]
                        * ((2 * x + 1) as f64 * u as f64 * PI / 16.0).cos()
                        * ((2 * y + 1) as f64 * v as f64 * PI / 16.0).cos();
                }
            }
            out[x * 8 + y] = 0.25 * acc;
        }
    }
    out
}
