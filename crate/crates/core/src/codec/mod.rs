//! Baseline JPEG codec parameterized by arbitrary quantization tables.

pub mod color;
pub mod dct;
pub mod huffman;
pub mod image;
pub mod jpeg;
pub mod quant;
pub mod zigzag;

pub use color::{color_convert, ColorDirection};
pub use dct::{forward_dct, inverse_dct, CoeffBlock};
pub use huffman::{dc_dpcm, entropy_encode, ComponentClass, EntropyCoded};
pub use image::ImageBuffer;
pub use jpeg::{
    encode_jpeg, reconstruct, EncodeOptions, JpegStream, Marker, PreparedImage, Subsampling,
};
pub use quant::{dequantize, quantize, quantize_with, QuantTable, QuantTables};
pub use zigzag::{unzigzag, zigzag, ZIGZAG};
