//! Encode a synthetic photo at several quality factors and compare size and PSNR.
//!
//! cargo run --release --example compress

use qtopt::codec::{encode_jpeg, reconstruct, EncodeOptions, Subsampling};
use qtopt::harness::synth::{generate, Pattern};
use qtopt::objectives::{fs_ratio, psnr};
use qtopt::qtable::{annex_k_baseline, quality_scale};

fn main() -> qtopt::Result<()> {
    let img = generate(Pattern::Photo, 256, 256, 3, 1)?;
    println!("{:>8} {:>6} {:>9} {:>9}", "sampling", "q", "bytes", "psnr");
    for subsampling in [Subsampling::S444, Subsampling::S420] {
        let opts = EncodeOptions { subsampling };
        for q in [10, 30, 50, 75, 90] {
            let tables = quality_scale(&annex_k_baseline(), q)?;
            let jpeg = encode_jpeg(&img, &tables, opts)?;
            let rec = reconstruct(&img, &tables, opts)?;
            println!(
                "{:>8} {:>6} {:>9} {:>9.3}  ratio {:.4}",
                format!("{subsampling:?}"),
                q,
                jpeg.size_bytes(),
                psnr(&img, &rec)?,
                fs_ratio(jpeg.size_bytes(), img.raw_len())?
            );
        }
    }

    let path = std::env::temp_dir().join("qtopt_example_q50.jpg");
    let tables = quality_scale(&annex_k_baseline(), 50)?;
    std::fs::write(&path, encode_jpeg(&img, &tables, EncodeOptions::default())?.bytes())
        .expect("temp dir is writable");
    println!("wrote {}", path.display());
    Ok(())
}
