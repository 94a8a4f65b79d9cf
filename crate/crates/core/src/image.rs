//! Multi-channel real-valued images with 8-bit provenance.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// One or three channels of `height × width` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    planes: Vec<Array2<f64>>,
}

impl Image {
    /// Planes are `(rows, cols) = (height, width)`; all must agree and hold
    /// finite values.
    pub fn from_planes(planes: Vec<Array2<f64>>) -> Result<Self> {
        if planes.len() != 1 && planes.len() != 3 {
            return Err(Error::InvalidParameter(format!(
                "images have 1 or 3 channels, got {}",
                planes.len()
            )));
        }
        let (height, width) = planes[0].dim();
        if width == 0 || height == 0 {
            return Err(Error::DimensionMismatch("empty image".into()));
        }
        if planes.iter().any(|p| p.dim() != (height, width)) {
            return Err(Error::DimensionMismatch("channel dimensions differ".into()));
        }
        if planes.iter().flat_map(|p| p.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { width, height, planes })
    }

    /// From interleaved 8-bit samples (`RGBRGB…` or gray).
    pub fn from_interleaved_u8(width: usize, height: usize, channels: usize, data: &[u8]) -> Result<Self> {
        if data.len() != width * height * channels {
            return Err(Error::LengthMismatch(data.len(), width * height * channels));
        }
        let planes = (0..channels)
            .map(|c| {
                Array2::from_shape_fn((height, width), |(y, x)| {
                    f64::from(data[(y * width + x) * channels + c])
                })
            })
            .collect();
        Self::from_planes(planes)
    }

    /// Clamped to `[0, 255]`, rounded, interleaved.
    pub fn to_interleaved_u8(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.width * self.height * self.planes.len());
        for y in 0..self.height {
            for x in 0..self.width {
                for p in &self.planes {
                    out.push(p[[y, x]].round().clamp(0.0, 255.0) as u8);
                }
            }
        }
        out
    }

    /// Display copy: every sample clamped to `[0, 255]` and rounded.
    pub fn clamped(&self) -> Image {
        Image {
            width: self.width,
            height: self.height,
            planes: self
                .planes
                .iter()
                .map(|p| p.mapv(|v| v.round().clamp(0.0, 255.0)))
                .collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `(width, height)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn num_channels(&self) -> usize {
        self.planes.len()
    }

    pub fn channels(&self) -> &[Array2<f64>] {
        &self.planes
    }

    pub fn sample_count(&self) -> usize {
        self.width * self.height * self.planes.len()
    }

    /// Deterministic 256×256 RGB test picture: smooth gradients, a disk, a
    /// rectangle, a stripe patch and seeded sensor-like noise.
    pub fn synthetic_test_image() -> Image {
        const SIZE: usize = 256;
        let mut rng = ChaCha8Rng::seed_from_u64(0xd477_2023);
        let mut planes = vec![Array2::<f64>::zeros((SIZE, SIZE)); 3];
        for y in 0..SIZE {
            for x in 0..SIZE {
                let (xf, yf) = (x as f64 / 255.0, y as f64 / 255.0);
                let mut rgb = [
                    40.0 + 150.0 * xf,
                    60.0 + 120.0 * yf,
                    110.0 + 70.0 * (6.0 * xf + 3.0 * yf).sin(),
                ];
                let (dx, dy) = (x as f64 - 168.0, y as f64 - 92.0);
                if dx * dx + dy * dy <= 50.0 * 50.0 {
                    rgb = [225.0 - 0.4 * dy, 70.0, 55.0 + 0.3 * dx];
                }
                if (24..108).contains(&x) && (150..232).contains(&y) {
                    rgb = [35.0, 175.0 + 0.3 * (y as f64 - 150.0), 95.0];
                }
                if (150..230).contains(&x) && (170..240).contains(&y) && ((x + y) / 16) % 2 == 0 {
                    rgb = [245.0, 240.0, 200.0];
                }
                for (c, v) in rgb.iter().enumerate() {
                    let noise: f64 = rng.random_range(-NOISE..=NOISE);
                    planes[c][[y, x]] = (v + noise).round().clamp(0.0, 255.0);
                }
            }
        }
        Image {
            width: SIZE,
            height: SIZE,
            planes,
        }
    }
}

const NOISE: f64 = 6.0;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interleaved_round_trip() {
        let data: Vec<u8> = (0..2 * 3 * 3).map(|v| v as u8 * 10).collect();
        let img = Image::from_interleaved_u8(2, 3, 3, &data).unwrap();
        assert_eq!(img.dims(), (2, 3));
        assert_eq!(img.channels()[1][[0, 1]], 40.0);
        assert_eq!(img.to_interleaved_u8(), data);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Image::from_planes(vec![Array2::zeros((2, 2)); 2]).is_err());
        assert!(Image::from_planes(vec![
            Array2::zeros((2, 2)),
            Array2::zeros((2, 3)),
            Array2::zeros((2, 2))
        ])
        .is_err());
        assert!(Image::from_planes(vec![Array2::from_elem((1, 1), f64::NAN)]).is_err());
        assert!(Image::from_interleaved_u8(2, 2, 1, &[0; 3]).is_err());
    }

    #[test]
    fn clamping_is_display_only() {
        let img = Image::from_planes(vec![ndarray::array![[-3.2, 260.0], [10.4, 10.6]]]).unwrap();
        assert_eq!(img.clamped().channels()[0], ndarray::array![[0.0, 255.0], [10.0, 11.0]]);
        assert_eq!(img.to_interleaved_u8(), vec![0, 255, 10, 11]);
    }

    #[test]
    fn synthetic_image_is_deterministic_8bit() {
        let a = Image::synthetic_test_image();
        let b = Image::synthetic_test_image();
        assert_eq!(a, b);
        assert_eq!(a.dims(), (256, 256));
        assert_eq!(a.num_channels(), 3);
        assert!(a
            .channels()
            .iter()
            .flat_map(|p| p.iter())
            .all(|&v| v.fract() == 0.0 && (0.0..=255.0).contains(&v)));
    }
}
