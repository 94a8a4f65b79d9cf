//! Separable two-channel analysis/synthesis, multilevel pyramids and 1D
//! wavelet packets.
//!
//! Borders are periodic: the filter wraps around the right edge, which keeps
//! each subband exactly half the (padded) input length. Odd dimensions are
//! padded by replicating the last row/column before each level and cropped
//! again on reconstruction.

use ndarray::{Array2, ArrayView1, ArrayView2, ArrayViewMut1, Axis, Zip};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::filter::FilterPair;
use crate::image::Image;

/// Maximum number of decomposition levels.
pub const MAX_LEVELS: usize = 8;

fn analyze_kernel(s: &[f64], filter: &FilterPair, approx: &mut [f64], detail: &mut [f64]) {
    let n = s.len();
    let taps = filter.len();
    for i in 0..n / 2 {
        let base = 2 * i;
        let (mut a, mut d) = (0.0, 0.0);
        if base + taps <= n {
            for (j, x) in s[base..base + taps].iter().enumerate() {
                a += filter.analysis_low[j] * x;
                d += filter.analysis_high[j] * x;
            }
        } else {
            for j in 0..taps {
                let x = s[(base + j) % n];
                a += filter.analysis_low[j] * x;
                d += filter.analysis_high[j] * x;
            }
        }
        approx[i] = a;
        detail[i] = d;
    }
}

fn synthesize_kernel(approx: &[f64], detail: &[f64], filter: &FilterPair, out: &mut [f64]) {
    let n = out.len();
    let taps = filter.len();
    out.fill(0.0);
    let (low, high) = (&filter.synthesis_low, &filter.synthesis_high);
    for (i, (a, d)) in approx.iter().zip(detail).enumerate() {
        let base = 2 * i;
        if base + taps <= n {
            for ((o, l), h) in out[base..base + taps].iter_mut().zip(low).zip(high) {
                *o += l * a + h * d;
            }
        } else {
            for j in 0..taps {
                out[(base + j) % n] += low[j] * a + high[j] * d;
            }
        }
    }
}

/// One analysis step: `approx[i] = Σ_j low[j]·s[2i+j]`, `detail` likewise
/// with the high-pass taps. The signal length must be even.
pub fn analyze_1d(signal: &[f64], filter: &FilterPair) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = signal.len();
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::OddLength(n));
    }
    let mut approx = vec![0.0; n / 2];
    let mut detail = vec![0.0; n / 2];
    analyze_kernel(signal, filter, &mut approx, &mut detail);
    Ok((approx, detail))
}

/// Inverse of [`analyze_1d`].
pub fn synthesize_1d(approx: &[f64], detail: &[f64], filter: &FilterPair) -> Result<Vec<f64>> {
    if approx.len() != detail.len() {
        return Err(Error::LengthMismatch(approx.len(), detail.len()));
    }
    let mut out = vec![0.0; 2 * approx.len()];
    synthesize_kernel(approx, detail, filter, &mut out);
    Ok(out)
}

/// Run `zip` on the rayon pool or on the calling thread.
macro_rules! run_zip {
    ($zip:expr, $exec:expr, $kernel:expr) => {{
        #[cfg(feature = "parallel")]
        if $exec.is_parallel() {
            $zip.par_for_each($kernel);
        } else {
            $zip.for_each($kernel);
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = $exec;
            $zip.for_each($kernel);
        }
    }};
}

fn analyze_axis(src: ArrayView2<f64>, axis: Axis, filter: &FilterPair, exec: Exec) -> (Array2<f64>, Array2<f64>) {
    if axis == Axis(0) {
        return analyze_columns(src, filter, exec);
    }
    let (rows, cols) = src.dim();
    let mut low = Array2::zeros((rows, cols / 2));
    let mut high = Array2::zeros((rows, cols / 2));
    let kernel = |s: ArrayView1<f64>, mut l: ArrayViewMut1<f64>, mut h: ArrayViewMut1<f64>| {
        let (Some(l), Some(h)) = (l.as_slice_mut(), h.as_slice_mut()) else {
            unreachable!("freshly allocated rows are contiguous")
        };
        match s.as_slice() {
            Some(s) => analyze_kernel(s, filter, l, h),
            None => analyze_kernel(&s.to_vec(), filter, l, h),
        }
    };
    let zip = Zip::from(src.rows()).and(low.rows_mut()).and(high.rows_mut());
    run_zip!(zip, exec, kernel);
    (low, high)
}

/// Column analysis as combinations of whole rows, which keeps memory access
/// contiguous. Output row `i` is `Σ_j f[j]·src[(2i + j) mod n]`.
fn analyze_columns(src: ArrayView2<f64>, filter: &FilterPair, exec: Exec) -> (Array2<f64>, Array2<f64>) {
    let (rows, cols) = src.dim();
    let mut low = Array2::zeros((rows / 2, cols));
    let mut high = Array2::zeros((rows / 2, cols));
    let kernel = |i: usize, mut l: ArrayViewMut1<f64>, mut h: ArrayViewMut1<f64>| {
        for j in 0..filter.len() {
            let (fl, fh) = (filter.analysis_low[j], filter.analysis_high[j]);
            Zip::from(&mut l)
                .and(&mut h)
                .and(src.row((2 * i + j) % rows))
                .for_each(|l, h, &x| {
                    *l += fl * x;
                    *h += fh * x;
                });
        }
    };
    let zip = Zip::indexed(low.rows_mut()).and(high.rows_mut());
    run_zip!(zip, exec, kernel);
    (low, high)
}

fn synthesize_axis(
    low: ArrayView2<f64>,
    high: ArrayView2<f64>,
    axis: Axis,
    filter: &FilterPair,
    exec: Exec,
) -> Array2<f64> {
    if axis == Axis(0) {
        return synthesize_columns(low, high, filter, exec);
    }
    let (rows, cols) = low.dim();
    let mut out = Array2::zeros((rows, 2 * cols));
    let kernel = |a: ArrayView1<f64>, d: ArrayView1<f64>, mut o: ArrayViewMut1<f64>| {
        let o = o.as_slice_mut().expect("freshly allocated rows are contiguous");
        match (a.as_slice(), d.as_slice()) {
            (Some(a), Some(d)) => synthesize_kernel(a, d, filter, o),
            _ => synthesize_kernel(&a.to_vec(), &d.to_vec(), filter, o),
        }
    };
    let zip = Zip::from(low.rows()).and(high.rows()).and(out.rows_mut());
    run_zip!(zip, exec, kernel);
    out
}

/// Column synthesis gathered per output row: row `r` collects every
/// `(i, j)` with `2i + j ≡ r (mod n)`.
fn synthesize_columns(low: ArrayView2<f64>, high: ArrayView2<f64>, filter: &FilterPair, exec: Exec) -> Array2<f64> {
    let (half, cols) = low.dim();
    let n = 2 * half;
    let taps = filter.len();
    let mut out = Array2::zeros((n, cols));
    let kernel = |r: usize, mut o: ArrayViewMut1<f64>| {
        for j in 0..taps {
            let k = (r + n * taps.div_ceil(n) - j) % n;
            if !k.is_multiple_of(2) {
                continue;
            }
            let (fl, fh) = (filter.synthesis_low[j], filter.synthesis_high[j]);
            Zip::from(&mut o)
                .and(low.row(k / 2))
                .and(high.row(k / 2))
                .for_each(|o, &a, &d| *o += fl * a + fh * d);
        }
    };
    let zip = Zip::indexed(out.rows_mut());
    run_zip!(zip, exec, kernel);
    out
}

/// The four quadrants of one 2D analysis step.
///
/// `lh` (row low-pass, column high-pass) holds the horizontal details,
/// `hl` the vertical details and `hh` the diagonal details.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrants {
    pub ll: Array2<f64>,
    pub lh: Array2<f64>,
    pub hl: Array2<f64>,
    pub hh: Array2<f64>,
}

/// Rows first, then the columns of each half.
pub fn analyze_2d(matrix: ArrayView2<f64>, filter: &FilterPair) -> Result<Quadrants> {
    analyze_2d_with(matrix, filter, Exec::default())
}

pub fn analyze_2d_with(matrix: ArrayView2<f64>, filter: &FilterPair, exec: Exec) -> Result<Quadrants> {
    let (rows, cols) = matrix.dim();
    if rows < 2 || cols < 2 || rows % 2 != 0 || cols % 2 != 0 {
        return Err(Error::DimensionMismatch(format!(
            "2D analysis needs even dimensions, got {rows}x{cols}"
        )));
    }
    let (lo, hi) = analyze_axis(matrix, Axis(1), filter, exec);
    let (ll, lh) = analyze_axis(lo.view(), Axis(0), filter, exec);
    let (hl, hh) = analyze_axis(hi.view(), Axis(0), filter, exec);
    Ok(Quadrants { ll, lh, hl, hh })
}

/// Inverse of [`analyze_2d`].
pub fn synthesize_2d(
    ll: ArrayView2<f64>,
    lh: ArrayView2<f64>,
    hl: ArrayView2<f64>,
    hh: ArrayView2<f64>,
    filter: &FilterPair,
) -> Result<Array2<f64>> {
    synthesize_2d_with(ll, lh, hl, hh, filter, Exec::default())
}

pub fn synthesize_2d_with(
    ll: ArrayView2<f64>,
    lh: ArrayView2<f64>,
    hl: ArrayView2<f64>,
    hh: ArrayView2<f64>,
    filter: &FilterPair,
    exec: Exec,
) -> Result<Array2<f64>> {
    let dim = ll.dim();
    if lh.dim() != dim || hl.dim() != dim || hh.dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "quadrants {:?} {:?} {:?} {:?}",
            dim,
            lh.dim(),
            hl.dim(),
            hh.dim()
        )));
    }
    if dim.0 == 0 || dim.1 == 0 {
        return Err(Error::DimensionMismatch("empty quadrants".into()));
    }
    let lo = synthesize_axis(ll, lh, Axis(0), filter, exec);
    let hi = synthesize_axis(hl, hh, Axis(0), filter, exec);
    Ok(synthesize_axis(lo.view(), hi.view(), Axis(1), filter, exec))
}

/// Detail bands of one level.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailBands<T> {
    /// Horizontal details (LH).
    pub h: Array2<T>,
    /// Vertical details (HL).
    pub v: Array2<T>,
    /// Diagonal details (HH).
    pub d: Array2<T>,
}

/// One channel of a pyramid. `details[0]` is level 1 (finest).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelBands<T> {
    pub ll: Array2<T>,
    pub details: Vec<DetailBands<T>>,
}

/// Multilevel 2D decomposition of every channel of an image.
#[derive(Debug, Clone, PartialEq)]
pub struct Pyramid<T> {
    pub wavelet_id: String,
    /// `(width, height)` of the image before any padding.
    pub original_dims: (usize, usize),
    pub channels: Vec<ChannelBands<T>>,
}

pub type SubbandPyramid = Pyramid<f64>;
pub type QuantizedPyramid = Pyramid<i64>;

/// Band identifier in container order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Approx,
    Horizontal(usize),
    Vertical(usize),
    Diagonal(usize),
}

impl Band {
    pub fn is_detail(self) -> bool {
        !matches!(self, Band::Approx)
    }

    /// 1-based level of a detail band.
    pub fn level(self) -> Option<usize> {
        match self {
            Band::Approx => None,
            Band::Horizontal(l) | Band::Vertical(l) | Band::Diagonal(l) => Some(l),
        }
    }
}

impl<T> Pyramid<T> {
    pub fn levels(&self) -> usize {
        self.channels.first().map_or(0, |c| c.details.len())
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    /// Bands of one channel: LL first, then levels from deepest to finest,
    /// each as horizontal, vertical, diagonal.
    pub fn bands(channel: &ChannelBands<T>) -> Vec<(Band, &Array2<T>)> {
        let mut out = vec![(Band::Approx, &channel.ll)];
        for (i, det) in channel.details.iter().enumerate().rev() {
            let level = i + 1;
            out.push((Band::Horizontal(level), &det.h));
            out.push((Band::Vertical(level), &det.v));
            out.push((Band::Diagonal(level), &det.d));
        }
        out
    }

    pub fn bands_mut(channel: &mut ChannelBands<T>) -> Vec<(Band, &mut Array2<T>)> {
        let mut out = vec![(Band::Approx, &mut channel.ll)];
        for (i, det) in channel.details.iter_mut().enumerate().rev() {
            let level = i + 1;
            out.push((Band::Horizontal(level), &mut det.h));
            out.push((Band::Vertical(level), &mut det.v));
            out.push((Band::Diagonal(level), &mut det.d));
        }
        out
    }

    /// All coefficients of all channels.
    pub fn coefficients(&self) -> impl Iterator<Item = &T> {
        self.channels.iter().flat_map(|c| {
            c.ll.iter().chain(
                c.details
                    .iter()
                    .flat_map(|d| d.h.iter().chain(d.v.iter()).chain(d.d.iter())),
            )
        })
    }

    pub fn total_coefficients(&self) -> usize {
        self.channels
            .iter()
            .map(|c| {
                c.ll.len()
                    + c.details
                        .iter()
                        .map(|d| d.h.len() + d.v.len() + d.d.len())
                        .sum::<usize>()
            })
            .sum()
    }

    pub fn map<U, F>(&self, f: F) -> Pyramid<U>
    where
        F: Fn(&T) -> U + Copy,
    {
        self.map_bands(|_, v| f(v))
    }

    /// Map every coefficient, with its band.
    pub fn map_bands<U, F>(&self, f: F) -> Pyramid<U>
    where
        F: Fn(Band, &T) -> U + Copy,
    {
        Pyramid {
            wavelet_id: self.wavelet_id.clone(),
            original_dims: self.original_dims,
            channels: self
                .channels
                .iter()
                .map(|c| ChannelBands {
                    ll: c.ll.map(|v| f(Band::Approx, v)),
                    details: c
                        .details
                        .iter()
                        .enumerate()
                        .map(|(i, d)| DetailBands {
                            h: d.h.map(|v| f(Band::Horizontal(i + 1), v)),
                            v: d.v.map(|v| f(Band::Vertical(i + 1), v)),
                            d: d.d.map(|v| f(Band::Diagonal(i + 1), v)),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    /// Same channel count, level count and band shapes.
    pub fn same_shape<U>(&self, other: &Pyramid<U>) -> bool {
        self.channels.len() == other.channels.len()
            && self.channels.iter().zip(&other.channels).all(|(a, b)| {
                a.ll.dim() == b.ll.dim()
                    && a.details.len() == b.details.len()
                    && a.details
                        .iter()
                        .zip(&b.details)
                        .all(|(x, y)| x.h.dim() == y.h.dim() && x.v.dim() == y.v.dim() && x.d.dim() == y.d.dim())
            })
    }

    /// Checks band shapes against [`level_shapes`] for the recorded dims.
    pub fn validate(&self) -> Result<()> {
        let levels = self.levels();
        let (w, h) = self.original_dims;
        check_levels(w, h, levels)?;
        if self.channels.is_empty() {
            return Err(Error::DimensionMismatch("pyramid has no channels".into()));
        }
        let shapes = level_shapes(w, h, levels);
        for c in &self.channels {
            if c.details.len() != levels {
                return Err(Error::DimensionMismatch("channels disagree on level count".into()));
            }
            if c.ll.dim() != shapes[levels] {
                return Err(Error::DimensionMismatch(format!(
                    "LL is {:?}, expected {:?}",
                    c.ll.dim(),
                    shapes[levels]
                )));
            }
            for (i, d) in c.details.iter().enumerate() {
                let s = shapes[i + 1];
                if d.h.dim() != s || d.v.dim() != s || d.d.dim() != s {
                    return Err(Error::DimensionMismatch(format!(
                        "level {} bands must be {:?}",
                        i + 1,
                        s
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Largest admissible level count for a `width × height` image.
pub fn max_levels(width: usize, height: usize) -> usize {
    let min = width.min(height);
    if min == 0 {
        return 0;
    }
    (min.ilog2() as usize).min(MAX_LEVELS)
}

fn check_levels(width: usize, height: usize, levels: usize) -> Result<()> {
    let max = max_levels(width, height);
    if levels == 0 || levels > max {
        return Err(Error::LevelsOutOfRange {
            levels,
            width,
            height,
            max,
        });
    }
    Ok(())
}

/// `(rows, cols)` of the array entering each level; entry `levels` is the
/// shape of the final LL band, entry `ℓ ≥ 1` the shape of level-ℓ details.
pub fn level_shapes(width: usize, height: usize, levels: usize) -> Vec<(usize, usize)> {
    let mut shapes = Vec::with_capacity(levels + 1);
    let mut cur = (height, width);
    shapes.push(cur);
    for _ in 0..levels {
        cur = (cur.0.div_ceil(2), cur.1.div_ceil(2));
        shapes.push(cur);
    }
    shapes
}

fn pad_even(a: Array2<f64>) -> Array2<f64> {
    let (rows, cols) = a.dim();
    if rows % 2 == 0 && cols % 2 == 0 {
        return a;
    }
    let (pr, pc) = (rows + rows % 2, cols + cols % 2);
    Array2::from_shape_fn((pr, pc), |(r, c)| a[[r.min(rows - 1), c.min(cols - 1)]])
}

/// Multilevel decomposition of every channel.
pub fn decompose(image: &Image, filter: &FilterPair, levels: usize) -> Result<SubbandPyramid> {
    decompose_with(image, filter, levels, Exec::default())
}

pub fn decompose_with(image: &Image, filter: &FilterPair, levels: usize, exec: Exec) -> Result<SubbandPyramid> {
    check_levels(image.width(), image.height(), levels)?;
    let channels = exec.map(image.channels(), |plane| -> Result<ChannelBands<f64>> {
        let mut cur = plane.clone();
        let mut details = Vec::with_capacity(levels);
        for _ in 0..levels {
            let q = analyze_2d_with(pad_even(cur).view(), filter, exec)?;
            details.push(DetailBands {
                h: q.lh,
                v: q.hl,
                d: q.hh,
            });
            cur = q.ll;
        }
        Ok(ChannelBands { ll: cur, details })
    });
    Ok(Pyramid {
        wavelet_id: filter.name.clone(),
        original_dims: (image.width(), image.height()),
        channels: channels.into_iter().collect::<Result<_>>()?,
    })
}

/// Inverse of [`decompose`], cropping the padding of every level.
pub fn reconstruct(pyramid: &SubbandPyramid, filter: &FilterPair) -> Result<Image> {
    reconstruct_with(pyramid, filter, Exec::default())
}

pub fn reconstruct_with(pyramid: &SubbandPyramid, filter: &FilterPair, exec: Exec) -> Result<Image> {
    pyramid.validate()?;
    let (width, height) = pyramid.original_dims;
    let shapes = level_shapes(width, height, pyramid.levels());
    let planes = exec.map(&pyramid.channels, |c| -> Result<Array2<f64>> {
        let mut cur = c.ll.clone();
        for (i, d) in c.details.iter().enumerate().rev() {
            let full = synthesize_2d_with(cur.view(), d.h.view(), d.v.view(), d.d.view(), filter, exec)?;
            let (rows, cols) = shapes[i];
            cur = if full.dim() == (rows, cols) {
                full
            } else {
                full.slice(ndarray::s![..rows, ..cols]).to_owned()
            };
        }
        Ok(cur)
    });
    Image::from_planes(planes.into_iter().collect::<Result<_>>()?)
}

/// Full binary packet tree of a 1D signal; `bands` are in natural order
/// (children of band `i` are `2i` and `2i + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct PacketTree {
    pub depth: usize,
    pub bands: Vec<Vec<f64>>,
}

pub fn packet_decompose(signal: &[f64], filter: &FilterPair, depth: usize) -> Result<PacketTree> {
    if depth == 0 || depth > 30 {
        return Err(Error::InvalidParameter(format!("packet depth {depth}")));
    }
    let block = 1usize << depth;
    if signal.is_empty() || !signal.len().is_multiple_of(block) {
        return Err(Error::InvalidParameter(format!(
            "signal length {} is not divisible by 2^{depth}",
            signal.len()
        )));
    }
    let mut bands = vec![signal.to_vec()];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(bands.len() * 2);
        for b in &bands {
            let (a, d) = analyze_1d(b, filter)?;
            next.push(a);
            next.push(d);
        }
        bands = next;
    }
    Ok(PacketTree { depth, bands })
}

pub fn packet_reconstruct(tree: &PacketTree, filter: &FilterPair) -> Result<Vec<f64>> {
    if tree.bands.len() != 1usize << tree.depth {
        return Err(Error::DimensionMismatch(format!(
            "{} bands for depth {}",
            tree.bands.len(),
            tree.depth
        )));
    }
    let mut bands = tree.bands.clone();
    while bands.len() > 1 {
        bands = bands
            .chunks(2)
            .map(|pair| synthesize_1d(&pair[0], &pair[1], filter))
            .collect::<Result<_>>()?;
    }
    Ok(bands.pop().unwrap_or_default())
}
