//! Baseline JFIF encoding and the matching decoder-side reconstruction.
//!
//! Both paths start from a [`PreparedImage`], which holds the forward DCT of
//! every block. That transform does not depend on the quantization tables, so
//! an optimizer evaluating many candidate tables on one image pays for it once.

use serde::{Deserialize, Serialize};

use super::color::{rgb_to_ycbcr_f64, ycbcr_to_rgb_f64};
use super::dct::{forward_dct, inverse_dct, CoeffBlock};
use super::huffman::{
    self, code_set, BitWriter, ComponentClass, HuffmanSpec, CHROMA_AC, CHROMA_DC, LUMA_AC,
    LUMA_DC,
};
use super::image::ImageBuffer;
use super::quant::{dequantize, quantize_with, QuantTable, QuantTables};
use super::zigzag::ZIGZAG;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subsampling {
    #[default]
    #[serde(rename = "444")]
    S444,
    #[serde(rename = "420")]
    S420,
}

impl std::str::FromStr for Subsampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "444" | "4:4:4" => Ok(Subsampling::S444),
            "420" | "4:2:0" => Ok(Subsampling::S420),
            other => Err(Error::InvalidArgument(format!(
                "unknown subsampling {other:?}, expected 444 or 420"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EncodeOptions {
    pub subsampling: Subsampling,
}

/// Segment markers in stream order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    Soi,
    App0,
    Dqt,
    Sof0,
    Dht,
    Sos,
    Eoi,
}

impl Marker {
    pub fn code(self) -> u8 {
        match self {
            Marker::Soi => 0xd8,
            Marker::App0 => 0xe0,
            Marker::Dqt => 0xdb,
            Marker::Sof0 => 0xc0,
            Marker::Dht => 0xc4,
            Marker::Sos => 0xda,
            Marker::Eoi => 0xd9,
        }
    }
}

/// A complete baseline JFIF byte stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JpegStream {
    bytes: Vec<u8>,
    markers: Vec<Marker>,
}

impl JpegStream {
    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    /// Total stream length including headers.
    pub fn size_bytes(&self) -> usize {
        self.bytes.len()
    }

    pub fn markers(&self) -> &[Marker] {
        &self.markers
    }
}

/// One colour component's padded plane, as DCT blocks in raster order.
#[derive(Debug, Clone)]
struct ComponentCoeffs {
    blocks_w: usize,
    blocks_h: usize,
    blocks: Vec<CoeffBlock>,
}

impl ComponentCoeffs {
    fn block(&self, bx: usize, by: usize) -> &CoeffBlock {
        &self.blocks[by * self.blocks_w + bx]
    }
}

/// Image transformed up to (but excluding) quantization.
#[derive(Debug, Clone)]
pub struct PreparedImage {
    width: usize,
    height: usize,
    channels: usize,
    subsampling: Subsampling,
    mcus_w: usize,
    mcus_h: usize,
    components: Vec<ComponentCoeffs>,
}

fn pad_plane(plane: &[f64], w: usize, h: usize, pw: usize, ph: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(pw * ph);
    for y in 0..ph {
        let row = &plane[y.min(h - 1) * w..][..w];
        out.extend_from_slice(row);
        out.extend(std::iter::repeat_n(row[w - 1], pw - w));
    }
    out
}

fn plane_blocks(plane: &[f64], pw: usize, ph: usize) -> ComponentCoeffs {
    let blocks_w = pw / 8;
    let blocks_h = ph / 8;
    let mut blocks = Vec::with_capacity(blocks_w * blocks_h);
    for by in 0..blocks_h {
        for bx in 0..blocks_w {
            let mut block = [0.0; 64];
            for r in 0..8 {
                for c in 0..8 {
                    block[r * 8 + c] = plane[(by * 8 + r) * pw + bx * 8 + c] - 128.0;
                }
            }
            blocks.push(forward_dct(&block));
        }
    }
    ComponentCoeffs {
        blocks_w,
        blocks_h,
        blocks,
    }
}

impl PreparedImage {
    pub fn new(img: &ImageBuffer, opts: EncodeOptions) -> Self {
        let (w, h) = (img.width(), img.height());
        // grayscale ignores the subsampling request
        let subsampling = if img.channels() == 1 {
            Subsampling::S444
        } else {
            opts.subsampling
        };
        let mcu = match subsampling {
            Subsampling::S444 => 8,
            Subsampling::S420 => 16,
        };
        let mcus_w = w.div_ceil(mcu);
        let mcus_h = h.div_ceil(mcu);
        let (pw, ph) = (mcus_w * mcu, mcus_h * mcu);

        let planes: Vec<Vec<f64>> = if img.channels() == 1 {
            vec![img.samples().iter().map(|&s| f64::from(s)).collect()]
        } else {
            let mut planes: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(w * h)).collect();
            for px in img.samples().chunks_exact(3) {
                let ycc = rgb_to_ycbcr_f64(px[0].into(), px[1].into(), px[2].into());
                for (plane, v) in planes.iter_mut().zip(ycc) {
                    plane.push(v.round().clamp(0.0, 255.0));
                }
            }
            planes
        };

        let components = planes
            .iter()
            .enumerate()
            .map(|(i, plane)| {
                let padded = pad_plane(plane, w, h, pw, ph);
                if i > 0 && subsampling == Subsampling::S420 {
                    let (cw, ch) = (pw / 2, ph / 2);
                    let mut small = Vec::with_capacity(cw * ch);
                    for y in 0..ch {
                        for x in 0..cw {
                            let sum = padded[2 * y * pw + 2 * x]
                                + padded[2 * y * pw + 2 * x + 1]
                                + padded[(2 * y + 1) * pw + 2 * x]
                                + padded[(2 * y + 1) * pw + 2 * x + 1];
                            small.push((sum / 4.0).round());
                        }
                    }
                    plane_blocks(&small, cw, ch)
                } else {
                    plane_blocks(&padded, pw, ph)
                }
            })
            .collect();

        Self {
            width: w,
            height: h,
            channels: img.channels(),
            subsampling,
            mcus_w,
            mcus_h,
            components,
        }
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

    pub fn subsampling(&self) -> Subsampling {
        self.subsampling
    }

    /// Raw raster size of the source image in bytes.
    pub fn raw_len(&self) -> usize {
        self.width * self.height * self.channels
    }

    fn table_for(component: usize, tables: &QuantTables) -> &QuantTable {
        if component == 0 {
            &tables.lqt
        } else {
            &tables.cqt
        }
    }

    /// Quantized levels (natural order) per component, block raster order.
    pub fn quantize(&self, tables: &QuantTables) -> Vec<Vec<[i32; 64]>> {
        self.components
            .iter()
            .enumerate()
            .map(|(i, comp)| {
                let table = Self::table_for(i, tables);
                comp.blocks.iter().map(|b| quantize_with(b, table)).collect()
            })
            .collect()
    }

    /// Encodes to a complete JFIF stream.
    pub fn encode(&self, tables: &QuantTables) -> Result<JpegStream> {
        let levels = self.quantize(tables);
        self.write_stream(tables, &levels)
    }

    /// Decoder-side reconstruction: dequantize, inverse DCT, upsample and
    /// convert back to the source colour space, cropped to the source extent.
    pub fn reconstruct(&self, tables: &QuantTables) -> Result<ImageBuffer> {
        let levels = self.quantize(tables);
        self.reconstruct_levels(tables, &levels)
    }

    /// Encodes and reconstructs from a single quantization pass.
    pub fn compress(&self, tables: &QuantTables) -> Result<(JpegStream, ImageBuffer)> {
        let levels = self.quantize(tables);
        let stream = self.write_stream(tables, &levels)?;
        let image = self.reconstruct_levels(tables, &levels)?;
        Ok((stream, image))
    }

    fn decode_plane(&self, comp: usize, table: &QuantTable, levels: &[[i32; 64]]) -> Vec<u8> {
        let cc = &self.components[comp];
        let pw = cc.blocks_w * 8;
        let mut plane = vec![0u8; pw * cc.blocks_h * 8];
        for (i, lv) in levels.iter().enumerate() {
            let (bx, by) = (i % cc.blocks_w, i / cc.blocks_w);
            let spatial = inverse_dct(&dequantize(lv, table));
            for r in 0..8 {
                for c in 0..8 {
                    plane[(by * 8 + r) * pw + bx * 8 + c] =
                        (spatial[r * 8 + c] + 128.0).round().clamp(0.0, 255.0) as u8;
                }
            }
        }
        plane
    }

    /// Decoded component samples (Y, or Y/Cb/Cr with chroma upsampled) as a
    /// decoder holds them before colour conversion, cropped to the source extent.
    pub fn reconstruct_components(&self, tables: &QuantTables) -> Result<ImageBuffer> {
        let levels = self.quantize(tables);
        let planes = self.component_planes(tables, &levels);
        ImageBuffer::from_planes(self.width, self.height, &planes)
    }

    fn component_planes(&self, tables: &QuantTables, levels: &[Vec<[i32; 64]>]) -> Vec<Vec<u8>> {
        let (w, h) = (self.width, self.height);
        let luma_pw = self.components[0].blocks_w * 8;
        let crop = |plane: &[u8]| {
            let mut out = Vec::with_capacity(w * h);
            for y in 0..h {
                out.extend_from_slice(&plane[y * luma_pw..][..w]);
            }
            out
        };
        let mut planes = vec![crop(&self.decode_plane(0, &tables.lqt, &levels[0]))];
        for (c, lv) in levels.iter().enumerate().take(self.channels).skip(1) {
            let plane = self.decode_plane(c, &tables.cqt, lv);
            let full = match self.subsampling {
                Subsampling::S444 => plane,
                Subsampling::S420 => {
                    let cc = &self.components[c];
                    upsample_h2v2(&plane, cc.blocks_w * 8, cc.blocks_h * 8)
                }
            };
            planes.push(crop(&full));
        }
        planes
    }

    fn reconstruct_levels(
        &self,
        tables: &QuantTables,
        levels: &[Vec<[i32; 64]>],
    ) -> Result<ImageBuffer> {
        let planes = self.component_planes(tables, levels);
        if self.channels == 1 {
            return ImageBuffer::from_planes(self.width, self.height, &planes);
        }
        let mut out = Vec::with_capacity(self.raw_len());
        for ((&y, &cb), &cr) in planes[0].iter().zip(&planes[1]).zip(&planes[2]) {
            let rgb = ycbcr_to_rgb_f64(y.into(), cb.into(), cr.into());
            out.extend(rgb.map(|v| v.round().clamp(0.0, 255.0) as u8));
        }
        ImageBuffer::new(self.width, self.height, 3, out)
    }

    fn write_stream(&self, tables: &QuantTables, levels: &[Vec<[i32; 64]>]) -> Result<JpegStream> {
        let mut s = StreamWriter::new(self.raw_len() / 8 + 1024);
        s.marker(Marker::Soi);
        s.app0();
        s.dqt(0, &tables.lqt);
        if self.channels == 3 {
            s.dqt(1, &tables.cqt);
        }
        s.sof0(self.width as u16, self.height as u16, self.channels, self.subsampling);
        s.dht(0, 0, &LUMA_DC);
        s.dht(1, 0, &LUMA_AC);
        if self.channels == 3 {
            s.dht(0, 1, &CHROMA_DC);
            s.dht(1, 1, &CHROMA_AC);
        }
        s.sos(self.channels);
        let scan = self.entropy_scan(levels)?;
        s.bytes.extend_from_slice(&scan);
        s.marker(Marker::Eoi);
        Ok(JpegStream {
            bytes: s.bytes,
            markers: s.markers,
        })
    }

    /// Interleaved MCU scan: luma blocks of the MCU first, then Cb, then Cr.
    fn entropy_scan(&self, levels: &[Vec<[i32; 64]>]) -> Result<Vec<u8>> {
        let luma = code_set(ComponentClass::Luma);
        let chroma = code_set(ComponentClass::Chroma);
        let mut w = BitWriter::with_capacity(self.raw_len() / 8);
        let mut pred = vec![0i32; self.channels];
        let luma_per_mcu = match self.subsampling {
            Subsampling::S444 => 1,
            Subsampling::S420 => 2,
        };
        let mut emit = |w: &mut BitWriter, comp: usize, bx: usize, by: usize| -> Result<()> {
            let cc = &self.components[comp];
            let lv = &levels[comp][by * cc.blocks_w + bx];
            let mut zz: [i32; 64] = std::array::from_fn(|k| lv[ZIGZAG[k]]);
            zz[0] = huffman::dc_dpcm(lv[0], pred[comp]);
            pred[comp] = lv[0];
            huffman::write_block(w, &zz, if comp == 0 { luma } else { chroma })
        };
        for my in 0..self.mcus_h {
            for mx in 0..self.mcus_w {
                for dy in 0..luma_per_mcu {
                    for dx in 0..luma_per_mcu {
                        emit(
                            &mut w,
                            0,
                            mx * luma_per_mcu + dx,
                            my * luma_per_mcu + dy,
                        )?;
                    }
                }
                for comp in 1..self.channels {
                    emit(&mut w, comp, mx, my)?;
                }
            }
        }
        Ok(w.finish())
    }

    /// DCT coefficients of one block, for inspection.
    pub fn coefficients(&self, component: usize, bx: usize, by: usize) -> &CoeffBlock {
        self.components[component].block(bx, by)
    }
}

/// Triangle-filter 2×2 chroma upsampling (the "fancy" upsampler of common
/// decoders), edges replicated.
fn upsample_h2v2(plane: &[u8], cw: usize, ch: usize) -> Vec<u8> {
    let at = |x: isize, y: isize| -> f64 {
        let x = x.clamp(0, cw as isize - 1) as usize;
        let y = y.clamp(0, ch as isize - 1) as usize;
        f64::from(plane[y * cw + x])
    };
    let (ow, oh) = (cw * 2, ch * 2);
    let mut out = Vec::with_capacity(ow * oh);
    for oy in 0..oh {
        let sy = (oy / 2) as isize;
        let fy = if oy % 2 == 0 { sy - 1 } else { sy + 1 };
        for ox in 0..ow {
            let sx = (ox / 2) as isize;
            let fx = if ox % 2 == 0 { sx - 1 } else { sx + 1 };
            let col = |x: isize| 0.75 * at(x, sy) + 0.25 * at(x, fy);
            let v = 0.75 * col(sx) + 0.25 * col(fx);
            out.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    out
}

struct StreamWriter {
    bytes: Vec<u8>,
    markers: Vec<Marker>,
}

impl StreamWriter {
    fn new(capacity: usize) -> Self {
        Self {
            bytes: Vec::with_capacity(capacity),
            markers: Vec::with_capacity(12),
        }
    }

    fn marker(&mut self, m: Marker) {
        self.bytes.extend_from_slice(&[0xff, m.code()]);
        self.markers.push(m);
    }

    fn segment(&mut self, m: Marker, payload: &[u8]) {
        self.marker(m);
        self.bytes
            .extend_from_slice(&((payload.len() + 2) as u16).to_be_bytes());
        self.bytes.extend_from_slice(payload);
    }

    fn app0(&mut self) {
        // JFIF 1.01, no density units, 1:1 aspect, no thumbnail
        self.segment(
            Marker::App0,
            &[b'J', b'F', b'I', b'F', 0, 1, 1, 0, 0, 1, 0, 1, 0, 0],
        );
    }

    fn dqt(&mut self, id: u8, table: &QuantTable) {
        let mut p = Vec::with_capacity(65);
        p.push(id); // 8-bit precision
        p.extend_from_slice(&table.zigzag_entries());
        self.segment(Marker::Dqt, &p);
    }

    fn sof0(&mut self, width: u16, height: u16, channels: usize, sub: Subsampling) {
        let mut p = vec![8];
        p.extend_from_slice(&height.to_be_bytes());
        p.extend_from_slice(&width.to_be_bytes());
        p.push(channels as u8);
        for c in 0..channels {
            let sampling = match (c, sub) {
                (0, Subsampling::S420) => 0x22,
                _ => 0x11,
            };
            p.extend_from_slice(&[c as u8 + 1, sampling, u8::from(c > 0)]);
        }
        self.segment(Marker::Sof0, &p);
    }

    fn dht(&mut self, class: u8, id: u8, spec: &HuffmanSpec) {
        let mut p = Vec::with_capacity(17 + spec.values.len());
        p.push((class << 4) | id);
        p.extend_from_slice(&spec.bits);
        p.extend_from_slice(spec.values);
        self.segment(Marker::Dht, &p);
    }

    fn sos(&mut self, channels: usize) {
        let mut p = vec![channels as u8];
        for c in 0..channels {
            let t = u8::from(c > 0);
            p.extend_from_slice(&[c as u8 + 1, (t << 4) | t]);
        }
        p.extend_from_slice(&[0, 63, 0]);
        self.segment(Marker::Sos, &p);
    }
}

/// Encodes `img` as a baseline JFIF stream with the given tables.
pub fn encode_jpeg(img: &ImageBuffer, tables: &QuantTables, opts: EncodeOptions) -> Result<JpegStream> {
    PreparedImage::new(img, opts).encode(tables)
}

/// The image a baseline decoder recovers from `encode_jpeg(img, tables, opts)`.
pub fn reconstruct(img: &ImageBuffer, tables: &QuantTables, opts: EncodeOptions) -> Result<ImageBuffer> {
    PreparedImage::new(img, opts).reconstruct(tables)
}
