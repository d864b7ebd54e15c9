//! Baseline sequential Huffman coding with the typical tables of ITU-T T.81 Annex K.3.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Code-length counts (`bits[i]` codes of length `i + 1`) and symbol values.
#[derive(Debug, Clone, Copy)]
pub struct HuffmanSpec {
    pub bits: [u8; 16],
    pub values: &'static [u8],
}

pub const LUMA_DC: HuffmanSpec = HuffmanSpec {
    bits: [0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0],
    values: &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
};

pub const CHROMA_DC: HuffmanSpec = HuffmanSpec {
    bits: [0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0],
    values: &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
};

pub const LUMA_AC: HuffmanSpec = HuffmanSpec {
    bits: [0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7d],
    values: &[
        0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61,
        0x07, 0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xa1, 0x08, 0x23, 0x42, 0xb1, 0xc1, 0x15, 0x52,
        0xd1, 0xf0, 0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0a, 0x16, 0x17, 0x18, 0x19, 0x1a, 0x25,
        0x26, 0x27, 0x28, 0x29, 0x2a, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3a, 0x43, 0x44, 0x45,
        0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5a, 0x63, 0x64,
        0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7a, 0x83,
        0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99,
        0x9a, 0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6,
        0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3, 0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9, 0xca, 0xd2, 0xd3,
        0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda, 0xe1, 0xe2, 0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8,
        0xe9, 0xea, 0xf1, 0xf2, 0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa,
    ],
};

pub const CHROMA_AC: HuffmanSpec = HuffmanSpec {
    bits: [0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 0x77],
    values: &[
        0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41, 0x51, 0x07, 0x61,
        0x71, 0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91, 0xa1, 0xb1, 0xc1, 0x09, 0x23, 0x33,
        0x52, 0xf0, 0x15, 0x62, 0x72, 0xd1, 0x0a, 0x16, 0x24, 0x34, 0xe1, 0x25, 0xf1, 0x17, 0x18,
        0x19, 0x1a, 0x26, 0x27, 0x28, 0x29, 0x2a, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3a, 0x43, 0x44,
        0x45, 0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5a, 0x63,
        0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7a,
        0x82, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97,
        0x98, 0x99, 0x9a, 0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4,
        0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3, 0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9, 0xca,
        0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda, 0xe2, 0xe3, 0xe4, 0xe5, 0xe6, 0xe7,
        0xe8, 0xe9, 0xea, 0xf2, 0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa,
    ],
};

const DC_MAX_CATEGORY: u32 = 11;
const AC_MAX_CATEGORY: u32 = 10;

const EOB: u8 = 0x00;
const ZRL: u8 = 0xf0;

/// Encoder lookup: code and length per symbol value.
#[derive(Debug, Clone)]
pub struct HuffmanCode {
    codes: [u16; 256],
    lengths: [u8; 256],
}

impl HuffmanCode {
    /// Canonical code assignment (T.81 Annex C).
    pub fn from_spec(spec: &HuffmanSpec) -> Self {
        let mut codes = [0u16; 256];
        let mut lengths = [0u8; 256];
        let mut code = 0u16;
        let mut k = 0;
        for (len_minus_one, &count) in spec.bits.iter().enumerate() {
            for _ in 0..count {
                let symbol = spec.values[k] as usize;
                codes[symbol] = code;
                lengths[symbol] = (len_minus_one + 1) as u8;
                code += 1;
                k += 1;
            }
            code <<= 1;
        }
        Self { codes, lengths }
    }

    pub fn code(&self, symbol: u8) -> (u16, u8) {
        (self.codes[symbol as usize], self.lengths[symbol as usize])
    }
}

/// Which pair of DC/AC tables a component uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentClass {
    Luma,
    Chroma,
}

pub(crate) struct CodeSet {
    pub dc: HuffmanCode,
    pub ac: HuffmanCode,
}

pub(crate) fn code_set(class: ComponentClass) -> &'static CodeSet {
    static LUMA: OnceLock<CodeSet> = OnceLock::new();
    static CHROMA: OnceLock<CodeSet> = OnceLock::new();
    match class {
        ComponentClass::Luma => LUMA.get_or_init(|| CodeSet {
            dc: HuffmanCode::from_spec(&LUMA_DC),
            ac: HuffmanCode::from_spec(&LUMA_AC),
        }),
        ComponentClass::Chroma => CHROMA.get_or_init(|| CodeSet {
            dc: HuffmanCode::from_spec(&CHROMA_DC),
            ac: HuffmanCode::from_spec(&CHROMA_AC),
        }),
    }
}

/// Number of bits needed for `|v|` (the JPEG magnitude category).
#[inline]
pub fn category(v: i32) -> u32 {
    32 - v.unsigned_abs().leading_zeros()
}

/// The `category` low bits appended after a Huffman code: the value itself when
/// positive, its ones' complement when negative.
#[inline]
fn extra_bits(v: i32, cat: u32) -> u16 {
    if v >= 0 {
        v as u16
    } else {
        ((v - 1) as u32 & ((1u32 << cat) - 1)) as u16
    }
}

/// DPCM difference of successive DC levels.
pub fn dc_dpcm(dc_current: i32, dc_previous: i32) -> i32 {
    dc_current - dc_previous
}

/// One entropy-coding event of a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol {
    Dc { category: u8, bits: u16 },
    Ac { run: u8, category: u8, bits: u16 },
    Zrl,
    Eob,
}

/// Run-length symbolization of one zigzag-ordered block whose DC is already
/// a DPCM difference.
pub fn block_symbols(zz: &[i32; 64]) -> Result<Vec<Symbol>> {
    let mut out = Vec::with_capacity(16);
    let dc = zz[0];
    let cat = category(dc);
    if cat > DC_MAX_CATEGORY {
        return Err(Error::EncodingRange {
            kind: "DC difference",
            category: cat,
            limit: DC_MAX_CATEGORY,
        });
    }
    out.push(Symbol::Dc {
        category: cat as u8,
        bits: extra_bits(dc, cat),
    });
    let mut run = 0u8;
    for &v in &zz[1..] {
        if v == 0 {
            run += 1;
            continue;
        }
        while run >= 16 {
            out.push(Symbol::Zrl);
            run -= 16;
        }
        let cat = category(v);
        if cat > AC_MAX_CATEGORY {
            return Err(Error::EncodingRange {
                kind: "AC coefficient",
                category: cat,
                limit: AC_MAX_CATEGORY,
            });
        }
        out.push(Symbol::Ac {
            run,
            category: cat as u8,
            bits: extra_bits(v, cat),
        });
        run = 0;
    }
    if run > 0 {
        out.push(Symbol::Eob);
    }
    Ok(out)
}

/// MSB-first bit packer with 0xFF byte stuffing.
#[derive(Debug, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    acc: u64,
    pending: u32,
    bit_count: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bytes: usize) -> Self {
        Self {
            bytes: Vec::with_capacity(bytes),
            ..Self::default()
        }
    }

    #[inline]
    pub fn write(&mut self, bits: u16, len: u8) {
        if len == 0 {
            return;
        }
        let len = u32::from(len);
        self.acc = (self.acc << len) | (u64::from(bits) & ((1u64 << len) - 1));
        self.pending += len;
        self.bit_count += u64::from(len);
        while self.pending >= 8 {
            self.pending -= 8;
            let byte = (self.acc >> self.pending) as u8;
            self.bytes.push(byte);
            if byte == 0xff {
                self.bytes.push(0x00);
            }
        }
    }

    /// Entropy-coded bits written so far, excluding padding and stuffing.
    pub fn bit_count(&self) -> u64 {
        self.bit_count
    }

    /// Pads the last partial byte with one-bits and returns the stuffed bytes.
    pub fn finish(mut self) -> Vec<u8> {
        if self.pending > 0 {
            let pad = 8 - self.pending;
            let bc = self.bit_count;
            self.write(((1u32 << pad) - 1) as u16, pad as u8);
            self.bit_count = bc;
        }
        self.bytes
    }
}

/// Writes one zigzag-ordered block (DC already differenced).
pub(crate) fn write_block(w: &mut BitWriter, zz: &[i32; 64], codes: &CodeSet) -> Result<()> {
    for sym in block_symbols(zz)? {
        match sym {
            Symbol::Dc { category, bits } => {
                let (c, l) = codes.dc.code(category);
                w.write(c, l);
                w.write(bits, category);
            }
            Symbol::Ac {
                run,
                category,
                bits,
            } => {
                let (c, l) = codes.ac.code((run << 4) | category);
                w.write(c, l);
                w.write(bits, category);
            }
            Symbol::Zrl => {
                let (c, l) = codes.ac.code(ZRL);
                w.write(c, l);
            }
            Symbol::Eob => {
                let (c, l) = codes.ac.code(EOB);
                w.write(c, l);
            }
        }
    }
    Ok(())
}

/// Entropy-coded output of a block sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropyCoded {
    pub bit_count: u64,
    pub bytes: Vec<u8>,
}

/// Huffman-codes a single component's blocks.
///
/// `blocks` are quantized levels in zigzag order with absolute DC values; DC
/// prediction starts at zero.
pub fn entropy_encode(blocks: &[[i32; 64]], class: ComponentClass) -> Result<EntropyCoded> {
    let codes = code_set(class);
    let mut w = BitWriter::new();
    let mut prev = 0;
    for block in blocks {
        let mut zz = *block;
        zz[0] = dc_dpcm(block[0], prev);
        prev = block[0];
        write_block(&mut w, &zz, codes)?;
    }
    let bit_count = w.bit_count();
    Ok(EntropyCoded {
        bit_count,
        bytes: w.finish(),
    })
}
