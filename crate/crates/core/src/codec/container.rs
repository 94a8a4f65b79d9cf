//! The `.dhwt` container.
//!
//! ```text
//! "DHWT"            4 bytes magic
//! version           u8 (= 1)
//! width, height     u32 LE each
//! channels, levels  u8 each
//! id_len, id        u8 + bytes
//! quantizer step    f64 LE
//! n_thr, thresholds u8 + n_thr × f64 LE
//! per channel, per band (LL, then levels deepest → finest as H, V, D):
//!     count         u32 LE
//!     tokens        [zero-run varint][zigzag varint value] …
//! ```
//!
//! A band stream alternates a LEB128 run of zeros with one non-zero value.
//! The stream ends as soon as `count` coefficients have been produced, so a
//! band ending in a non-zero value has no trailing run and an all-zero band
//! is a single run token.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::transform::{level_shapes, ChannelBands, DetailBands, Pyramid, QuantizedPyramid};

pub const MAGIC: [u8; 4] = *b"DHWT";
pub const VERSION: u8 = 1;

/// Header fields of a container.
#[derive(Debug, Clone, PartialEq)]
pub struct ContainerHeader {
    pub width: u32,
    pub height: u32,
    pub channels: u8,
    pub levels: u8,
    pub wavelet_id: String,
    pub quantizer_step: f64,
    pub thresholds: Vec<f64>,
}

/// A parsed or freshly encoded container: header plus the band streams.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedImage {
    pub header: ContainerHeader,
    payload: Vec<u8>,
}

pub(crate) fn write_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

pub(crate) fn zigzag(v: i64) -> u64 {
    ((v << 1) ^ (v >> 63)) as u64
}

pub(crate) fn unzigzag(v: u64) -> i64 {
    ((v >> 1) as i64) ^ -((v & 1) as i64)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::CorruptContainer(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn varint(&mut self) -> Result<u64> {
        let mut v = 0u64;
        for shift in (0..64).step_by(7) {
            let b = self.u8()?;
            let bits = u64::from(b & 0x7f);
            if shift == 63 && bits > 1 {
                return Err(Error::CorruptContainer("varint overflows 64 bits".into()));
            }
            v |= bits << shift;
            if b & 0x80 == 0 {
                return Ok(v);
            }
        }
        Err(Error::CorruptContainer("varint longer than 10 bytes".into()))
    }

    fn is_empty(&self) -> bool {
        self.pos == self.buf.len()
    }
}

/// Zero-run / zigzag tokens of one band.
pub fn encode_band(values: impl IntoIterator<Item = i64>, out: &mut Vec<u8>) {
    let mut run = 0u64;
    for v in values {
        if v == 0 {
            run += 1;
        } else {
            write_varint(out, run);
            write_varint(out, zigzag(v));
            run = 0;
        }
    }
    if run > 0 {
        write_varint(out, run);
    }
}

fn decode_band(r: &mut Reader<'_>, count: usize) -> Result<Vec<i64>> {
    // `count` comes from the file; let large bands grow as they are filled.
    let mut out = Vec::with_capacity(count.min(1 << 16));
    while out.len() < count {
        let run = usize::try_from(r.varint()?).map_err(|_| Error::CorruptContainer("zero run too long".into()))?;
        if run > count - out.len() {
            return Err(Error::CorruptContainer("zero run past end of band".into()));
        }
        out.resize(out.len() + run, 0);
        if out.len() == count {
            break;
        }
        let v = unzigzag(r.varint()?);
        if v == 0 {
            return Err(Error::CorruptContainer("explicit zero value token".into()));
        }
        out.push(v);
    }
    Ok(out)
}

/// Serialise a quantized pyramid with the parameters that produced it.
pub fn encode(pq: &QuantizedPyramid, quantizer_step: f64, thresholds: &[f64]) -> Result<CompressedImage> {
    pq.validate()?;
    let (w, h) = pq.original_dims;
    let too_big = |what: &str| Error::InvalidParameter(format!("{what} does not fit the container"));
    let header = ContainerHeader {
        width: u32::try_from(w).map_err(|_| too_big("width"))?,
        height: u32::try_from(h).map_err(|_| too_big("height"))?,
        channels: u8::try_from(pq.num_channels()).map_err(|_| too_big("channel count"))?,
        levels: u8::try_from(pq.levels()).map_err(|_| too_big("level count"))?,
        wavelet_id: pq.wavelet_id.clone(),
        quantizer_step,
        thresholds: thresholds.to_vec(),
    };
    if header.wavelet_id.len() > usize::from(u8::MAX) {
        return Err(too_big("wavelet id"));
    }
    if thresholds.len() > usize::from(u8::MAX) {
        return Err(too_big("threshold list"));
    }
    let mut payload = Vec::new();
    for channel in &pq.channels {
        for (_, band) in Pyramid::bands(channel) {
            let count = u32::try_from(band.len()).map_err(|_| too_big("band"))?;
            payload.extend_from_slice(&count.to_le_bytes());
            encode_band(band.iter().copied(), &mut payload);
        }
    }
    Ok(CompressedImage { header, payload })
}

/// Parse the band streams back into a quantized pyramid.
pub fn decode(ci: &CompressedImage) -> Result<QuantizedPyramid> {
    let hd = &ci.header;
    let (w, h) = (hd.width as usize, hd.height as usize);
    let levels = usize::from(hd.levels);
    let shapes = level_shapes(w, h, levels);
    let mut r = Reader::new(&ci.payload);
    let mut read_band = |shape: (usize, usize)| -> Result<Array2<i64>> {
        let count = r.u32()? as usize;
        if count != shape.0 * shape.1 {
            return Err(Error::CorruptContainer(format!(
                "band holds {count} coefficients, header implies {}",
                shape.0 * shape.1
            )));
        }
        let values = decode_band(&mut r, count)?;
        Ok(Array2::from_shape_vec(shape, values).expect("count checked"))
    };
    let mut channels = Vec::with_capacity(usize::from(hd.channels));
    for _ in 0..hd.channels {
        let ll = read_band(shapes[levels])?;
        let mut details: Vec<DetailBands<i64>> = Vec::with_capacity(levels);
        for level in (1..=levels).rev() {
            let s = shapes[level];
            let (hb, vb, db) = (read_band(s)?, read_band(s)?, read_band(s)?);
            details.push(DetailBands { h: hb, v: vb, d: db });
        }
        details.reverse();
        channels.push(ChannelBands { ll, details });
    }
    if !r.is_empty() {
        return Err(Error::CorruptContainer("trailing bytes after last band".into()));
    }
    let pyramid = Pyramid {
        wavelet_id: hd.wavelet_id.clone(),
        original_dims: (w, h),
        channels,
    };
    pyramid.validate().map_err(|e| Error::CorruptContainer(e.to_string()))?;
    Ok(pyramid)
}

impl CompressedImage {
    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let hd = &self.header;
        let mut out = Vec::with_capacity(32 + self.payload.len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&hd.width.to_le_bytes());
        out.extend_from_slice(&hd.height.to_le_bytes());
        out.push(hd.channels);
        out.push(hd.levels);
        out.push(hd.wavelet_id.len() as u8);
        out.extend_from_slice(hd.wavelet_id.as_bytes());
        out.extend_from_slice(&hd.quantizer_step.to_le_bytes());
        out.push(hd.thresholds.len() as u8);
        for t in &hd.thresholds {
            out.extend_from_slice(&t.to_le_bytes());
        }
        out.extend_from_slice(&self.payload);
        out
    }

    /// Parses and validates the header; band streams are checked by
    /// [`decode`].
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        if r.take(4)? != MAGIC {
            return Err(Error::CorruptContainer("bad magic".into()));
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(Error::CorruptContainer(format!("unsupported version {version}")));
        }
        let width = r.u32()?;
        let height = r.u32()?;
        let channels = r.u8()?;
        let levels = r.u8()?;
        let id_len = usize::from(r.u8()?);
        let wavelet_id = std::str::from_utf8(r.take(id_len)?)
            .map_err(|_| Error::CorruptContainer("wavelet id is not UTF-8".into()))?
            .to_string();
        let quantizer_step = r.f64()?;
        let n_thr = usize::from(r.u8()?);
        let thresholds = (0..n_thr).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        if width == 0 || height == 0 {
            return Err(Error::CorruptContainer("zero image dimension".into()));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::CorruptContainer(format!("{channels} channels")));
        }
        let max = crate::transform::max_levels(width as usize, height as usize);
        if levels == 0 || usize::from(levels) > max {
            return Err(Error::CorruptContainer(format!(
                "{levels} levels for a {width}x{height} image"
            )));
        }
        if !(quantizer_step.is_finite() && quantizer_step > 0.0) {
            return Err(Error::CorruptContainer(format!("quantizer step {quantizer_step}")));
        }
        let payload = bytes[r.pos..].to_vec();
        Ok(Self {
            header: ContainerHeader {
                width,
                height,
                channels,
                levels,
                wavelet_id,
                quantizer_step,
                thresholds,
            },
            payload,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tokens(values: &[i64]) -> Vec<u8> {
        let mut out = Vec::new();
        encode_band(values.iter().copied(), &mut out);
        out
    }

    #[test]
    fn band_token_examples() {
        assert_eq!(tokens(&[0; 9]), vec![9]);
        // runs (2, 5), (1, −1): zigzag(5) = 10, zigzag(−1) = 1
        assert_eq!(tokens(&[0, 0, 5, 0, -1]), vec![2, 10, 1, 1]);
        assert_eq!(tokens(&[3]), vec![0, 6]);
        assert!(tokens(&[]).is_empty());
    }

    #[test]
    fn varint_layout() {
        let mut out = Vec::new();
        write_varint(&mut out, 300);
        assert_eq!(out, vec![0xac, 0x02]);
        for v in [0, 1, -1, 63, -64, i64::MAX, i64::MIN] {
            assert_eq!(unzigzag(zigzag(v)), v);
        }
        assert_eq!(zigzag(-1), 1);
        assert_eq!(zigzag(1), 2);
    }

    #[test]
    fn band_decoding_rejects_garbage() {
        let mut r = Reader::new(&[5]);
        assert!(decode_band(&mut r, 3).is_err());
        let mut r = Reader::new(&[0, 0]);
        assert!(decode_band(&mut r, 1).is_err());
        let mut r = Reader::new(&[0xff; 11]);
        assert!(decode_band(&mut r, 1).is_err());
        let mut r = Reader::new(&[1, 10]);
        assert_eq!(decode_band(&mut r, 2).unwrap(), vec![0, 5]);
    }
}
