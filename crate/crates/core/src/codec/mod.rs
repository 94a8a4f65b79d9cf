//! Level-threshold compression: hard thresholding of the detail bands,
//! uniform scalar quantization and the `.dhwt` container.

mod container;

pub use container::{decode, encode, encode_band, CompressedImage, ContainerHeader, MAGIC, VERSION};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::filter::lookup;
use crate::image::Image;
use crate::metrics::{self, QualityReport};
use crate::transform::{decompose_with, reconstruct, QuantizedPyramid, SubbandPyramid};

/// Base thresholds: one value for every detail band, or one per level
/// (index 0 = level 1).
#[derive(Debug, Clone, PartialEq)]
pub enum ThresholdMode {
    Global(f64),
    PerLevel(Vec<f64>),
}

/// Threshold `T_i = T₀·r^{i−1}` for loop `i` (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSchedule {
    pub mode: ThresholdMode,
    pub loop_ratio: f64,
    pub loops: usize,
}

impl Default for ThresholdSchedule {
    fn default() -> Self {
        Self {
            mode: ThresholdMode::Global(100.0),
            loop_ratio: 0.5,
            loops: 11,
        }
    }
}

fn check_threshold(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidParameter(format!("threshold {t} must be non-negative")));
    }
    Ok(())
}

impl ThresholdSchedule {
    pub fn global(base: f64, loop_ratio: f64, loops: usize) -> Result<Self> {
        let s = Self {
            mode: ThresholdMode::Global(base),
            loop_ratio,
            loops,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn per_level(base: Vec<f64>, loop_ratio: f64, loops: usize) -> Result<Self> {
        let s = Self {
            mode: ThresholdMode::PerLevel(base),
            loop_ratio,
            loops,
        };
        s.validate()?;
        Ok(s)
    }

    /// Single-shot schedule with threshold `t`.
    pub fn fixed(t: f64) -> Result<Self> {
        Self::global(t, 0.5, 1)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.mode {
            ThresholdMode::Global(t) => check_threshold(*t)?,
            ThresholdMode::PerLevel(ts) => {
                if ts.is_empty() {
                    return Err(Error::InvalidParameter("empty per-level threshold list".into()));
                }
                ts.iter().try_for_each(|&t| check_threshold(t))?;
            }
        }
        if !(self.loop_ratio > 0.0 && self.loop_ratio < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "loop ratio {} must lie in (0, 1)",
                self.loop_ratio
            )));
        }
        if self.loops == 0 {
            return Err(Error::InvalidParameter("at least one loop is required".into()));
        }
        Ok(())
    }

    fn check_loop(&self, loop_index: usize) -> Result<()> {
        if loop_index == 0 || loop_index > self.loops {
            return Err(Error::OutOfRange(format!(
                "loop {loop_index} outside 1..={}",
                self.loops
            )));
        }
        Ok(())
    }

    /// Thresholds of loop `loop_index` as stored in the container: one value
    /// for a global schedule, one per level otherwise.
    pub fn loop_thresholds(&self, loop_index: usize) -> Result<Vec<f64>> {
        self.validate()?;
        self.check_loop(loop_index)?;
        let scale = self.loop_ratio.powi(loop_index as i32 - 1);
        Ok(match &self.mode {
            ThresholdMode::Global(t) => vec![t * scale],
            ThresholdMode::PerLevel(ts) => ts.iter().map(|t| t * scale).collect(),
        })
    }

    /// Per-level thresholds of loop `loop_index` for a `levels`-deep pyramid.
    pub fn level_thresholds(&self, loop_index: usize, levels: usize) -> Result<Vec<f64>> {
        let ts = self.loop_thresholds(loop_index)?;
        match &self.mode {
            ThresholdMode::Global(_) => Ok(vec![ts[0]; levels]),
            ThresholdMode::PerLevel(_) if ts.len() == levels => Ok(ts),
            ThresholdMode::PerLevel(_) => Err(Error::InvalidParameter(format!(
                "{} per-level thresholds for {levels} levels",
                ts.len()
            ))),
        }
    }
}

/// Hard threshold with per-level values: a detail coefficient `c` at level
/// `ℓ` becomes 0 when `|c| ≤ thresholds[ℓ−1]`. LL is never touched.
pub fn hard_threshold(p: &SubbandPyramid, thresholds: &[f64]) -> Result<SubbandPyramid> {
    if thresholds.len() != p.levels() {
        return Err(Error::InvalidParameter(format!(
            "{} thresholds for {} levels",
            thresholds.len(),
            p.levels()
        )));
    }
    thresholds.iter().try_for_each(|&t| check_threshold(t))?;
    Ok(p.map_bands(|band, &c| match band.level() {
        Some(level) if c.abs() <= thresholds[level - 1] => 0.0,
        _ => c,
    }))
}

/// [`hard_threshold`] with the thresholds of one loop of `schedule`.
pub fn threshold_pyramid(
    p: &SubbandPyramid,
    schedule: &ThresholdSchedule,
    loop_index: usize,
) -> Result<SubbandPyramid> {
    let ts = schedule.level_thresholds(loop_index, p.levels())?;
    hard_threshold(p, &ts)
}

fn check_step(q: f64) -> Result<()> {
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::InvalidParameter(format!("quantizer step {q} must be positive")));
    }
    Ok(())
}

/// `c → round(c / q)`, ties away from zero.
pub fn quantize(p: &SubbandPyramid, q: f64) -> Result<QuantizedPyramid> {
    check_step(q)?;
    const LIMIT: f64 = (1u64 << 62) as f64;
    if let Some(c) = p
        .coefficients()
        .find(|&&c| !(c / q).is_finite() || (c / q).abs() >= LIMIT)
    {
        return Err(Error::OutOfRange(format!("coefficient {c} overflows step {q}")));
    }
    Ok(p.map(|&c| (c / q).round() as i64))
}

/// `k → q·k`.
pub fn dequantize(pq: &QuantizedPyramid, q: f64) -> Result<SubbandPyramid> {
    check_step(q)?;
    Ok(pq.map(|&k| k as f64 * q))
}

fn compress_decomposed(
    img: &Image,
    pyramid: &SubbandPyramid,
    level_thresholds: &[f64],
    header_thresholds: &[f64],
    q: f64,
) -> Result<(CompressedImage, QualityReport)> {
    let thresholded = hard_threshold(pyramid, level_thresholds)?;
    let pq = quantize(&thresholded, q)?;
    let ci = encode(&pq, q, header_thresholds)?;
    let restored = decompress_image(&ci)?;
    let kept = dequantize(&pq, q)?;
    let mse = metrics::mse(img, &restored)?;
    let cr = metrics::cr(&pq);
    // An all-zero image has nothing to lose.
    let energy = match metrics::energy_stats(pyramid, &kept) {
        Err(Error::ZeroEnergy) => metrics::EnergyStats {
            retained: 100.0,
            zero_share: 100.0 - cr,
        },
        other => other?,
    };
    let report = QualityReport {
        mse,
        psnr: metrics::psnr(mse)?,
        cr,
        bpp: metrics::bpp(cr, img.num_channels()),
        energy_retained: energy.retained,
        zero_share: energy.zero_share,
        stream_ratio: 100.0 * ci.to_bytes().len() as f64 / img.sample_count() as f64,
    };
    Ok((ci, report))
}

/// Decompose → threshold (loop 1 of `schedule`) → quantize → encode. The
/// report is measured against the decompressed, unclamped image.
pub fn compress_image(
    img: &Image,
    wavelet_id: &str,
    levels: usize,
    schedule: &ThresholdSchedule,
    q: f64,
) -> Result<(CompressedImage, QualityReport)> {
    compress_image_with(img, wavelet_id, levels, schedule, q, Exec::default())
}

pub fn compress_image_with(
    img: &Image,
    wavelet_id: &str,
    levels: usize,
    schedule: &ThresholdSchedule,
    q: f64,
    exec: Exec,
) -> Result<(CompressedImage, QualityReport)> {
    check_step(q)?;
    let filter = lookup(wavelet_id)?;
    let level_thr = schedule.level_thresholds(1, levels)?;
    let pyramid = decompose_with(img, &filter, levels, exec)?;
    compress_decomposed(img, &pyramid, &level_thr, &schedule.loop_thresholds(1)?, q)
}

/// Decode → dequantize → reconstruct. Samples are left unclamped; use
/// [`Image::clamped`] for display.
pub fn decompress_image(ci: &CompressedImage) -> Result<Image> {
    let pq = decode(ci)?;
    let kept = dequantize(&pq, ci.header.quantizer_step)?;
    let filter = lookup(&ci.header.wavelet_id)?;
    reconstruct(&kept, &filter)
}

/// One independent compress/decompress of the original image per loop,
/// loop `i` using `T_i = T₀·r^{i−1}`. Reports are in loop order.
pub fn compression_loop(
    img: &Image,
    wavelet_id: &str,
    levels: usize,
    schedule: &ThresholdSchedule,
    q: f64,
) -> Result<Vec<QualityReport>> {
    compression_loop_with(img, wavelet_id, levels, schedule, q, Exec::default())
}

pub fn compression_loop_with(
    img: &Image,
    wavelet_id: &str,
    levels: usize,
    schedule: &ThresholdSchedule,
    q: f64,
    exec: Exec,
) -> Result<Vec<QualityReport>> {
    schedule.validate()?;
    check_step(q)?;
    let filter = lookup(wavelet_id)?;
    let pyramid = decompose_with(img, &filter, levels, exec)?;
    exec.map_range(schedule.loops, |i| -> Result<QualityReport> {
        let level_thr = schedule.level_thresholds(i + 1, levels)?;
        let header_thr = schedule.loop_thresholds(i + 1)?;
        Ok(compress_decomposed(img, &pyramid, &level_thr, &header_thr, q)?.1)
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::{dhwt_filter, Wavelet};
    use crate::transform::{decompose, ChannelBands, DetailBands, Pyramid};
    use ndarray::{array, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn toy_pyramid(details: [f64; 3]) -> SubbandPyramid {
        Pyramid {
            wavelet_id: "dhwt".into(),
            original_dims: (2, 2),
            channels: vec![ChannelBands {
                ll: array![[0.2]],
                details: vec![DetailBands {
                    h: array![[details[0]]],
                    v: array![[details[1]]],
                    d: array![[details[2]]],
                }],
            }],
        }
    }

    fn detail_values(p: &SubbandPyramid) -> Vec<f64> {
        let d = &p.channels[0].details[0];
        vec![d.h[[0, 0]], d.v[[0, 0]], d.d[[0, 0]]]
    }

    fn random_image(seed: u64, size: usize) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Image::from_planes(
            (0..3)
                .map(|_| Array2::from_shape_fn((size, size), |_| rng.random_range(0.0..255.0_f64).round()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn hard_threshold_examples() {
        let p = toy_pyramid([-3.0, 0.5, 7.0]);
        let t = hard_threshold(&p, &[1.0]).unwrap();
        assert_eq!(detail_values(&t), vec![-3.0, 0.0, 7.0]);
        assert_eq!(t.channels[0].ll, p.channels[0].ll);
        assert_eq!(hard_threshold(&p, &[0.0]).unwrap(), p);
        let all = hard_threshold(&p, &[f64::INFINITY]).unwrap();
        assert_eq!(detail_values(&all), vec![0.0; 3]);
        assert_eq!(all.channels[0].ll, p.channels[0].ll);
        assert!(hard_threshold(&p, &[1.0, 2.0]).is_err());
        assert!(hard_threshold(&p, &[-1.0]).is_err());
        // boundary |c| = T is zeroed
        assert_eq!(detail_values(&hard_threshold(&p, &[3.0]).unwrap()), vec![0.0, 0.0, 7.0]);
    }

    #[test]
    fn schedule_geometry() {
        let s = ThresholdSchedule::global(100.0, 0.5, 11).unwrap();
        assert_eq!(s.loop_thresholds(1).unwrap(), vec![100.0]);
        assert_eq!(s.loop_thresholds(3).unwrap(), vec![25.0]);
        assert_eq!(s.level_thresholds(2, 3).unwrap(), vec![50.0; 3]);
        assert!(s.loop_thresholds(0).is_err());
        assert!(s.loop_thresholds(12).is_err());
        let p = ThresholdSchedule::per_level(vec![8.0, 4.0], 0.5, 2).unwrap();
        assert_eq!(p.level_thresholds(2, 2).unwrap(), vec![4.0, 2.0]);
        assert!(p.level_thresholds(1, 3).is_err());
        assert!(ThresholdSchedule::global(1.0, 1.0, 3).is_err());
        assert!(ThresholdSchedule::global(1.0, 0.5, 0).is_err());
        assert!(ThresholdSchedule::global(-1.0, 0.5, 1).is_err());
        assert_eq!(
            ThresholdSchedule::default(),
            ThresholdSchedule::global(100.0, 0.5, 11).unwrap()
        );
    }

    #[test]
    fn threshold_pyramid_uses_loop_scale() {
        let p = toy_pyramid([-3.0, 0.5, 7.0]);
        let s = ThresholdSchedule::global(8.0, 0.5, 3).unwrap();
        assert_eq!(detail_values(&threshold_pyramid(&p, &s, 1).unwrap()), vec![0.0; 3]);
        assert_eq!(
            detail_values(&threshold_pyramid(&p, &s, 2).unwrap()),
            vec![0.0, 0.0, 7.0]
        );
        assert_eq!(
            detail_values(&threshold_pyramid(&p, &s, 3).unwrap()),
            vec![-3.0, 0.0, 7.0]
        );
    }

    #[test]
    fn quantizer_rounding() {
        let p = toy_pyramid([2.5, -2.5, 0.74]);
        let q1 = quantize(&p, 1.0).unwrap();
        let d = &q1.channels[0].details[0];
        assert_eq!((d.h[[0, 0]], d.v[[0, 0]]), (3, -3));
        let qh = quantize(&p, 0.5).unwrap();
        assert_eq!(qh.channels[0].details[0].d[[0, 0]], 1);
        assert_eq!(dequantize(&qh, 0.5).unwrap().channels[0].details[0].d[[0, 0]], 0.5);
        assert!(quantize(&p, 0.0).is_err());
        assert!(quantize(&p, -1.0).is_err());
        assert!(dequantize(&q1, 0.0).is_err());
        assert!(quantize(&toy_pyramid([1e300, 0.0, 0.0]), 1e-30).is_err());
    }

    #[test]
    fn container_round_trip_and_header() {
        let img = random_image(1, 24);
        let p = decompose(&img, &dhwt_filter(), 3).unwrap();
        let pq = quantize(&hard_threshold(&p, &[20.0, 30.0, 40.0]).unwrap(), 1.0).unwrap();
        let ci = encode(&pq, 1.0, &[20.0, 30.0, 40.0]).unwrap();
        let bytes = ci.to_bytes();
        assert_eq!(&bytes[..4], b"DHWT");
        assert_eq!(bytes[4], 1);
        assert_eq!(&bytes[5..9], &24u32.to_le_bytes());
        assert_eq!(&bytes[9..13], &24u32.to_le_bytes());
        assert_eq!(bytes[13], 3);
        assert_eq!(bytes[14], 3);
        assert_eq!(bytes[15], 4);
        assert_eq!(&bytes[16..20], b"dhwt");
        assert_eq!(&bytes[20..28], &1.0f64.to_le_bytes());
        assert_eq!(bytes[28], 3);
        let parsed = CompressedImage::from_bytes(&bytes).unwrap();
        assert_eq!(parsed, ci);
        assert_eq!(decode(&parsed).unwrap(), pq);
    }

    #[test]
    fn corrupt_containers_rejected() {
        let img = random_image(2, 16);
        let (ci, _) = compress_image(&img, "haar", 2, &ThresholdSchedule::default(), 1.0).unwrap();
        let bytes = ci.to_bytes();

        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(
            CompressedImage::from_bytes(&bad),
            Err(Error::CorruptContainer(_))
        ));
        let mut bad = bytes.clone();
        bad[4] = 2;
        assert!(CompressedImage::from_bytes(&bad).is_err());
        let mut bad = bytes.clone();
        bad[5] = 17; // width 17 no longer matches the band counts
        let parsed = CompressedImage::from_bytes(&bad).unwrap();
        assert!(matches!(decode(&parsed), Err(Error::CorruptContainer(_))));
        let mut bad = bytes.clone();
        bad[14] = 9;
        assert!(CompressedImage::from_bytes(&bad).is_err());

        let truncated = CompressedImage::from_bytes(&bytes[..bytes.len() - 3]).unwrap();
        assert!(decode(&truncated).is_err());
        assert!(CompressedImage::from_bytes(&bytes[..10]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode(&CompressedImage::from_bytes(&extra).unwrap()).is_err());
    }

    #[test]
    fn constant_image_is_exact() {
        let img = Image::from_planes(vec![Array2::from_elem((32, 32), 93.0); 3]).unwrap();
        for w in ["dhwt", "haar"] {
            let (_, r) = compress_image(&img, w, 2, &ThresholdSchedule::fixed(5.0).unwrap(), 1.0).unwrap();
            // only quantization of LL can perturb the result
            assert!(r.mse < 1.0, "{w}");
            assert!((r.cr - 100.0 * 64.0 / 1024.0).abs() < 1e-12);
        }
        // LL values that land on the integer grid give MSE exactly 0.
        let img = Image::from_planes(vec![Array2::from_elem((8, 8), std::f64::consts::PI / 4.0)]).unwrap();
        let (_, r) = compress_image(&img, "dhwt", 1, &ThresholdSchedule::fixed(5.0).unwrap(), 1.0).unwrap();
        assert!(r.mse < 1e-24);
        assert!((r.cr - 25.0).abs() < 1e-12);
    }

    #[test]
    fn lossless_limit() {
        let img = random_image(3, 32);
        for w in Wavelet::ALL {
            let (ci, r) = compress_image(&img, w.id(), 3, &ThresholdSchedule::fixed(0.0).unwrap(), 1e-6).unwrap();
            assert!(r.mse <= 1e-8, "{w}: {}", r.mse);
            let back = decompress_image(&ci).unwrap();
            assert!(metrics::mse(&img, &back).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn report_is_against_decompressed_image() {
        let img = random_image(4, 32);
        let (ci, r) = compress_image(&img, "db2", 2, &ThresholdSchedule::fixed(40.0).unwrap(), 2.0).unwrap();
        let parsed = CompressedImage::from_bytes(&ci.to_bytes()).unwrap();
        let back = decompress_image(&parsed).unwrap();
        assert_eq!(metrics::mse(&img, &back).unwrap(), r.mse);
        assert!((r.cr + r.zero_share - 100.0).abs() < 1e-9);
    }

    #[test]
    fn loop_one_equals_compress() {
        let img = random_image(5, 32);
        let s = ThresholdSchedule::global(60.0, 0.5, 4).unwrap();
        let reports = compression_loop(&img, "dhwt", 2, &s, 1.0).unwrap();
        assert_eq!(reports.len(), 4);
        let (_, single) = compress_image(&img, "dhwt", 2, &s, 1.0).unwrap();
        assert_eq!(reports[0], single);
        let seq = compression_loop_with(&img, "dhwt", 2, &s, 1.0, Exec::Sequential).unwrap();
        assert_eq!(seq, reports);
        for pair in reports.windows(2) {
            assert!(pair[1].mse <= pair[0].mse);
            assert!(pair[1].cr >= pair[0].cr);
        }
    }

    #[test]
    fn black_image_compresses() {
        let img = Image::from_planes(vec![Array2::zeros((16, 16))]).unwrap();
        let (_, r) = compress_image(&img, "dhwt", 2, &ThresholdSchedule::default(), 1.0).unwrap();
        assert_eq!((r.mse, r.cr, r.energy_retained, r.zero_share), (0.0, 0.0, 100.0, 100.0));
    }

    #[test]
    fn huge_threshold_leaves_only_ll() {
        let img = random_image(6, 64);
        let s = ThresholdSchedule::global(1e9, 0.5, 2).unwrap();
        let r = compression_loop(&img, "dhwt", 2, &s, 1.0).unwrap();
        assert!((r[0].cr - 6.25).abs() < 1e-9);
    }

    #[test]
    fn threshold_idempotent() {
        let img = random_image(7, 16);
        let p = decompose(&img, &dhwt_filter(), 2).unwrap();
        let once = hard_threshold(&p, &[30.0, 30.0]).unwrap();
        assert_eq!(hard_threshold(&once, &[30.0, 30.0]).unwrap(), once);
    }

    #[test]
    fn unknown_wavelet_propagates() {
        let img = random_image(8, 16);
        assert!(matches!(
            compress_image(&img, "db7", 2, &ThresholdSchedule::default(), 1.0),
            Err(Error::UnknownWavelet(_))
        ));
    }
}
