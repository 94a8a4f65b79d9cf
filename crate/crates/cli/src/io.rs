//! Image and container files.

use std::fs;
use std::path::Path;

use dhwt_core::{CompressedImage, Image};
use image::{DynamicImage, GrayImage, ImageFormat, RgbImage};

use crate::error::{CliError, CliResult};

/// Input name that selects the built-in synthetic test image.
pub const BUILTIN: &str = "builtin";

/// Read an 8-bit gray or RGB PNG/PPM/PGM, or the built-in image.
pub fn read_image(path: &Path) -> CliResult<Image> {
    if path.as_os_str() == BUILTIN {
        return Ok(Image::synthetic_test_image());
    }
    let reader = image::ImageReader::open(path)
        .map_err(|e| CliError::user(format!("cannot open {}: {e}", path.display())))?
        .with_guessed_format()
        .map_err(|e| CliError::user(format!("cannot read {}: {e}", path.display())))?;
    let decoded = reader
        .decode()
        .map_err(|e| CliError::user(format!("cannot decode {}: {e}", path.display())))?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    let img = match decoded {
        DynamicImage::ImageLuma8(buf) => Image::from_interleaved_u8(w, h, 1, buf.as_raw())?,
        DynamicImage::ImageRgb8(buf) => Image::from_interleaved_u8(w, h, 3, buf.as_raw())?,
        other => {
            return Err(CliError::user(format!(
                "{}: unsupported pixel format {:?}; expected 8-bit gray or RGB",
                path.display(),
                other.color()
            )))
        }
    };
    Ok(img)
}

fn output_format(path: &Path) -> CliResult<ImageFormat> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    match ext.as_str() {
        "png" => Ok(ImageFormat::Png),
        "ppm" | "pgm" | "pnm" => Ok(ImageFormat::Pnm),
        _ => Err(CliError::user(format!(
            "{}: output must end in .png, .ppm or .pgm",
            path.display()
        ))),
    }
}

/// Write an image clamped and rounded to 8 bits.
pub fn write_image(img: &Image, path: &Path) -> CliResult<()> {
    let format = output_format(path)?;
    let (w, h) = (img.width() as u32, img.height() as u32);
    let data = img.to_interleaved_u8();
    let dynamic = match img.num_channels() {
        1 => DynamicImage::ImageLuma8(GrayImage::from_raw(w, h, data).expect("sized buffer")),
        _ => DynamicImage::ImageRgb8(RgbImage::from_raw(w, h, data).expect("sized buffer")),
    };
    dynamic
        .save_with_format(path, format)
        .map_err(|e| CliError::user(format!("cannot write {}: {e}", path.display())))
}

pub fn read_container(path: &Path) -> CliResult<CompressedImage> {
    let bytes = fs::read(path).map_err(|e| CliError::user(format!("cannot read {}: {e}", path.display())))?;
    Ok(CompressedImage::from_bytes(&bytes)?)
}

pub fn write_container(ci: &CompressedImage, path: &Path) -> CliResult<usize> {
    let bytes = ci.to_bytes();
    fs::write(path, &bytes).map_err(|e| CliError::user(format!("cannot write {}: {e}", path.display())))?;
    Ok(bytes.len())
}
