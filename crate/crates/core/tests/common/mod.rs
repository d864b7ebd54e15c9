//! Test-only baseline JPEG parser and Huffman decoder, written independently
//! of the encoder: it consumes only the byte stream.

#![allow(dead_code)]

use std::collections::HashMap;

use zune_core::bytestream::ZCursor;
use zune_core::colorspace::ColorSpace;
use zune_core::options::DecoderOptions;
use zune_jpeg::JpegDecoder;

#[derive(Debug, Clone)]
pub struct FrameComponent {
    pub id: u8,
    pub h: usize,
    pub v: usize,
    pub tq: u8,
}

#[derive(Debug, Default)]
pub struct Parsed {
    pub markers: Vec<u8>,
    /// Quantization tables in natural order, keyed by table id.
    pub dqt: HashMap<u8, [u16; 64]>,
    pub dht: HashMap<(u8, u8), DecodeTable>,
    pub width: usize,
    pub height: usize,
    pub components: Vec<FrameComponent>,
    pub scan_tables: Vec<(u8, u8)>,
    pub scan: Vec<u8>,
}

#[derive(Debug, Clone)]
pub struct DecodeTable {
    codes: HashMap<(u8, u16), u8>,
}

const ZZ: [usize; 64] = [
    0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5, 12, 19, 26, 33, 40, 48, 41, 34, 27,
    20, 13, 6, 7, 14, 21, 28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51, 58,
    59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63,
];

fn be16(b: &[u8]) -> usize {
    (usize::from(b[0]) << 8) | usize::from(b[1])
}

pub fn parse(bytes: &[u8]) -> Parsed {
    assert_eq!(&bytes[..2], &[0xff, 0xd8], "missing SOI");
    let mut p = Parsed {
        markers: vec![0xd8],
        ..Parsed::default()
    };
    let mut i = 2;
    loop {
        assert_eq!(bytes[i], 0xff, "expected marker at {i}");
        let m = bytes[i + 1];
        p.markers.push(m);
        if m == 0xd9 {
            assert_eq!(i + 2, bytes.len(), "trailing bytes after EOI");
            break;
        }
        let len = be16(&bytes[i + 2..]);
        let seg = &bytes[i + 4..i + 2 + len];
        match m {
            0xdb => {
                let mut k = 0;
                while k < seg.len() {
                    assert_eq!(seg[k] >> 4, 0, "8-bit precision expected");
                    let id = seg[k] & 0x0f;
                    let mut t = [0u16; 64];
                    for z in 0..64 {
                        t[ZZ[z]] = u16::from(seg[k + 1 + z]);
                    }
                    p.dqt.insert(id, t);
                    k += 65;
                }
            }
            0xc4 => {
                let mut k = 0;
                while k < seg.len() {
                    let class = seg[k] >> 4;
                    let id = seg[k] & 0x0f;
                    let counts = &seg[k + 1..k + 17];
                    let n: usize = counts.iter().map(|&c| c as usize).sum();
                    let values = &seg[k + 17..k + 17 + n];
                    let mut codes = HashMap::new();
                    let mut code = 0u16;
                    let mut vi = 0;
                    for (l, &c) in counts.iter().enumerate() {
                        for _ in 0..c {
                            codes.insert(((l + 1) as u8, code), values[vi]);
                            vi += 1;
                            code += 1;
                        }
                        code <<= 1;
                    }
                    p.dht.insert((class, id), DecodeTable { codes });
                    k += 17 + n;
                }
            }
            0xc0 => {
                assert_eq!(seg[0], 8);
                p.height = be16(&seg[1..]);
                p.width = be16(&seg[3..]);
                let n = seg[5] as usize;
                for c in 0..n {
                    let b = &seg[6 + 3 * c..];
                    p.components.push(FrameComponent {
                        id: b[0],
                        h: (b[1] >> 4) as usize,
                        v: (b[1] & 0x0f) as usize,
                        tq: b[2],
                    });
                }
            }
            0xda => {
                let n = seg[0] as usize;
                for c in 0..n {
                    let t = seg[2 + 2 * c];
                    p.scan_tables.push((t >> 4, t & 0x0f));
                }
                // entropy-coded data runs until the next non-stuffed marker
                let mut j = i + 2 + len;
                while !(bytes[j] == 0xff && bytes[j + 1] != 0x00) {
                    if bytes[j] == 0xff {
                        p.scan.push(0xff);
                        j += 2;
                    } else {
                        p.scan.push(bytes[j]);
                        j += 1;
                    }
                }
                i = j;
                continue;
            }
            _ => {}
        }
        i += 2 + len;
    }
    p
}

struct Bits<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Bits<'_> {
    fn bit(&mut self) -> u16 {
        let byte = self.data.get(self.pos / 8).copied().unwrap_or(0xff);
        let b = (byte >> (7 - self.pos % 8)) & 1;
        self.pos += 1;
        u16::from(b)
    }

    fn bits(&mut self, n: u8) -> u16 {
        (0..n).fold(0, |acc, _| (acc << 1) | self.bit())
    }

    fn symbol(&mut self, t: &DecodeTable) -> u8 {
        let mut code = 0u16;
        for len in 1..=16u8 {
            code = (code << 1) | self.bit();
            if let Some(&s) = t.codes.get(&(len, code)) {
                return s;
            }
        }
        panic!("invalid Huffman code at bit {}", self.pos);
    }
}

fn extend(v: u16, n: u8) -> i32 {
    if n == 0 {
        return 0;
    }
    let v = i32::from(v);
    if v < (1 << (n - 1)) {
        v - (1 << n) + 1
    } else {
        v
    }
}

/// Quantized levels per component (natural order, absolute DC), blocks in raster order.
pub fn decode_levels(p: &Parsed) -> Vec<Vec<[i32; 64]>> {
    let hmax = p.components.iter().map(|c| c.h).max().unwrap();
    let vmax = p.components.iter().map(|c| c.v).max().unwrap();
    let mcus_w = p.width.div_ceil(8 * hmax);
    let mcus_h = p.height.div_ceil(8 * vmax);
    let mut out: Vec<Vec<[i32; 64]>> = p
        .components
        .iter()
        .map(|c| vec![[0; 64]; mcus_w * c.h * mcus_h * c.v])
        .collect();
    let mut pred = vec![0i32; p.components.len()];
    let mut bits = Bits {
        data: &p.scan,
        pos: 0,
    };
    for my in 0..mcus_h {
        for mx in 0..mcus_w {
            for (ci, comp) in p.components.iter().enumerate() {
                let (td, ta) = p.scan_tables[ci];
                let dc_t = &p.dht[&(0, td)];
                let ac_t = &p.dht[&(1, ta)];
                let bw = mcus_w * comp.h;
                for dy in 0..comp.v {
                    for dx in 0..comp.h {
                        let mut blk = [0i32; 64];
                        let s = bits.symbol(dc_t);
                        let diff = extend(bits.bits(s), s);
                        pred[ci] += diff;
                        blk[0] = pred[ci];
                        let mut k = 1;
                        while k < 64 {
                            let rs = bits.symbol(ac_t);
                            let (r, s) = (rs >> 4, rs & 0x0f);
                            if s == 0 {
                                if r == 15 {
                                    k += 16;
                                    continue;
                                }
                                break;
                            }
                            k += r as usize;
                            blk[ZZ[k]] = extend(bits.bits(s), s);
                            k += 1;
                        }
                        let bx = mx * comp.h + dx;
                        let by = my * comp.v + dy;
                        out[ci][by * bw + bx] = blk;
                    }
                }
            }
        }
    }
    // all bits consumed apart from the final 1-padding
    assert!(p.scan.len() * 8 - bits.pos < 8, "unconsumed entropy data");
    out
}

/// Decodes with zune-jpeg into interleaved RGB (or luma) samples.
pub fn zune_decode(bytes: &[u8], channels: usize) -> (usize, usize, Vec<u8>) {
    let cs = if channels == 1 {
        ColorSpace::Luma
    } else {
        ColorSpace::RGB
    };
    zune_decode_as(bytes, cs)
}

/// Decodes with zune-jpeg without colour conversion (Y or YCbCr samples).
pub fn zune_decode_components(bytes: &[u8], channels: usize) -> (usize, usize, Vec<u8>) {
    let cs = if channels == 1 {
        ColorSpace::Luma
    } else {
        ColorSpace::YCbCr
    };
    zune_decode_as(bytes, cs)
}

fn zune_decode_as(bytes: &[u8], cs: ColorSpace) -> (usize, usize, Vec<u8>) {
    let opts = DecoderOptions::default()
        .jpeg_set_out_colorspace(cs)
        .set_strict_mode(true);
    let mut dec = JpegDecoder::new_with_options(ZCursor::new(bytes), opts);
    let pixels = dec.decode().expect("zune-jpeg rejected the stream");
    let info = dec.info().expect("headers decoded");
    (usize::from(info.width), usize::from(info.height), pixels)
}

pub fn max_abs_diff(a: &[u8], b: &[u8]) -> u8 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.abs_diff(*y)).max().unwrap_or(0)
}
