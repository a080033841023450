use std::fs::{self, File};
use std::io::BufWriter;

use anyhow::{Context, Result};
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, GrayImage, ImageEncoder, Luma};
use nda_core::io::read_frames;

use crate::util::{usage, Outcome};
use crate::DumpArgs;

/// Writes one PGM per selected `(t, p)` plane, scaled so the plane maximum is white.
pub fn run(args: &DumpArgs) -> Result<Outcome> {
    let frames = read_frames(&fs::read(&args.file).with_context(|| format!("reading {}", args.file.display()))?)?;
    let [bins, pols, h, w] = frames.shape();
    if let Some(t) = args.t.filter(|&t| t >= bins) {
        return Err(usage(format!("--t {t} out of range (tensor has {bins} bins)")));
    }
    fs::create_dir_all(&args.out_dir)?;
    let stem = args
        .file
        .file_name()
        .and_then(|n| n.to_str())
        .map(|n| n.trim_end_matches(".ndaf").to_string())
        .unwrap_or_else(|| "frames".into());

    let mut written = 0;
    for t in (0..bins).filter(|t| args.t.is_none_or(|want| want == *t)) {
        for p in (0..pols).filter(|p| args.p.is_none_or(|want| usize::from(want) == *p)) {
            let plane = frames.plane(t, p);
            let max = plane.iter().copied().max().unwrap_or(0).max(1);
            let img = GrayImage::from_fn(w as u32, h as u32, |x, y| {
                let v = plane[y as usize * w + x as usize];
                Luma([(u32::from(v) * 255 / u32::from(max)) as u8])
            });
            let out = args.out_dir.join(format!("{stem}_t{t}_p{p}.pgm"));
            let file = BufWriter::new(File::create(&out).with_context(|| format!("creating {}", out.display()))?);
            PnmEncoder::new(file)
                .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
                .write_image(img.as_raw(), img.width(), img.height(), ExtendedColorType::L8)
                .with_context(|| format!("writing {}", out.display()))?;
            written += 1;
        }
    }
    println!("planes={written} out={}", args.out_dir.display());
    Ok(Outcome::Success)
}
