//! Quality and rate metrics, and the wavelet × level comparison grid.

use crate::codec::{compress_image_with, ThresholdSchedule};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::image::Image;
use crate::transform::{QuantizedPyramid, SubbandPyramid};

/// Peak value of an 8-bit sample.
pub const PEAK: f64 = 255.0;

/// Metrics of one compression run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    pub mse: f64,
    pub psnr: f64,
    /// Percentage of non-zero quantized coefficients.
    pub cr: f64,
    pub bpp: f64,
    pub energy_retained: f64,
    pub zero_share: f64,
    /// Container size as a percentage of the raw 8-bit sample bytes.
    pub stream_ratio: f64,
}

/// One line of a loop or comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub wavelet: String,
    pub level: usize,
    pub loop_index: usize,
    pub report: QualityReport,
}

impl ReportRow {
    pub const CSV_HEADER: [&'static str; 9] = [
        "wavelet",
        "level",
        "loop",
        "mse",
        "psnr",
        "cr_percent",
        "bpp",
        "energy_retained",
        "zero_share",
    ];

    pub fn csv_fields(&self) -> [String; 9] {
        let r = &self.report;
        [
            self.wavelet.clone(),
            self.level.to_string(),
            self.loop_index.to_string(),
            r.mse.to_string(),
            r.psnr.to_string(),
            r.cr.to_string(),
            r.bpp.to_string(),
            r.energy_retained.to_string(),
            r.zero_share.to_string(),
        ]
    }
}

/// Mean squared difference over every sample of every channel.
pub fn mse(a: &Image, b: &Image) -> Result<f64> {
    if a.dims() != b.dims() || a.num_channels() != b.num_channels() {
        return Err(Error::DimensionMismatch(format!(
            "{:?}x{} vs {:?}x{}",
            a.dims(),
            a.num_channels(),
            b.dims(),
            b.num_channels()
        )));
    }
    let sum: f64 = a
        .channels()
        .iter()
        .zip(b.channels())
        .map(|(pa, pb)| pa.iter().zip(pb).map(|(x, y)| (x - y) * (x - y)).sum::<f64>())
        .sum();
    Ok(sum / a.sample_count() as f64)
}

/// `10·log10(255²/mse)`; infinite for a perfect reconstruction.
pub fn psnr(mse: f64) -> Result<f64> {
    if mse.is_nan() || mse < 0.0 {
        return Err(Error::InvalidParameter(format!("mse {mse} must be non-negative")));
    }
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (PEAK * PEAK / mse).log10())
}

/// Percentage of non-zero coefficients across all channels and bands.
pub fn cr(pq: &QuantizedPyramid) -> f64 {
    let total = pq.total_coefficients();
    if total == 0 {
        return 0.0;
    }
    let nonzero = pq.coefficients().filter(|&&k| k != 0).count();
    100.0 * nonzero as f64 / total as f64
}

/// Bits per pixel of an 8-bit image keeping `cr` percent of its coefficients.
pub fn bpp(cr: f64, channels: usize) -> f64 {
    8.0 * channels as f64 * cr / 100.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyStats {
    pub retained: f64,
    pub zero_share: f64,
}

/// Energy of `after` relative to `before`, and the zero share of `after`.
pub fn energy_stats(before: &SubbandPyramid, after: &SubbandPyramid) -> Result<EnergyStats> {
    if !before.same_shape(after) {
        return Err(Error::DimensionMismatch("pyramids differ in shape".into()));
    }
    let energy = |p: &SubbandPyramid| p.coefficients().map(|c| c * c).sum::<f64>();
    let e0 = energy(before);
    if e0 == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let total = after.total_coefficients();
    let zeros = after.coefficients().filter(|&&c| c == 0.0).count();
    Ok(EnergyStats {
        retained: 100.0 * energy(after) / e0,
        zero_share: 100.0 * zeros as f64 / total as f64,
    })
}

/// Single-shot compression (loop 1 of `schedule`) for every wavelet and
/// level, wavelet-major.
pub fn comparison_table(
    img: &Image,
    wavelet_ids: &[&str],
    levels: impl IntoIterator<Item = usize>,
    schedule: &ThresholdSchedule,
    q: f64,
) -> Result<Vec<ReportRow>> {
    comparison_table_with(img, wavelet_ids, levels, schedule, q, Exec::default())
}

pub fn comparison_table_with(
    img: &Image,
    wavelet_ids: &[&str],
    levels: impl IntoIterator<Item = usize>,
    schedule: &ThresholdSchedule,
    q: f64,
    exec: Exec,
) -> Result<Vec<ReportRow>> {
    let levels: Vec<usize> = levels.into_iter().collect();
    for id in wavelet_ids {
        crate::filter::lookup(id)?;
    }
    let grid: Vec<(&str, usize)> = wavelet_ids
        .iter()
        .flat_map(|&id| levels.iter().map(move |&l| (id, l)))
        .collect();
    // The grid carries the parallelism; each cell runs sequentially.
    exec.map(&grid, |&(id, level)| {
        let (_, report) = compress_image_with(img, id, level, schedule, q, Exec::Sequential)?;
        Ok(ReportRow {
            wavelet: id.to_string(),
            level,
            loop_index: 1,
            report,
        })
    })
    .into_iter()
    .collect()
}
