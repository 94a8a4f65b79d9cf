//! Two-channel filter banks: the DHWT filter and the comparison wavelets.
//!
//! Taps are applied as correlations, `approx[i] = Σ_j low[j]·s[2i+j]`, and
//! synthesis scatters back with the synthesis taps, so a filter bank is
//! perfectly reconstructing exactly when the periodised analysis matrix
//! times the synthesis matrix is the identity.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hermite::hermite_eval;
use crate::transform::{analyze_1d, synthesize_1d};

/// Registered wavelet families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Wavelet {
    Dhwt,
    Haar,
    Db2,
    Sym2,
    Coif2,
}

impl Wavelet {
    pub const ALL: [Wavelet; 5] = [
        Wavelet::Dhwt,
        Wavelet::Haar,
        Wavelet::Db2,
        Wavelet::Sym2,
        Wavelet::Coif2,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Wavelet::Dhwt => "dhwt",
            Wavelet::Haar => "haar",
            Wavelet::Db2 => "db2",
            Wavelet::Sym2 => "sym2",
            Wavelet::Coif2 => "coif2",
        }
    }

    pub fn filter(self) -> FilterPair {
        match self {
            Wavelet::Dhwt => dhwt_filter(),
            Wavelet::Haar => orthogonal("haar", &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
            Wavelet::Db2 => orthogonal("db2", &db2_taps()),
            Wavelet::Sym2 => orthogonal("sym2", &db2_taps()),
            Wavelet::Coif2 => orthogonal("coif2", &COIF2),
        }
    }
}

impl fmt::Display for Wavelet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Wavelet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Wavelet::ALL
            .into_iter()
            .find(|w| w.id() == s)
            .ok_or_else(|| Error::UnknownWavelet(s.to_string()))
    }
}

/// Analysis and synthesis taps of one two-channel filter bank.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPair {
    pub name: String,
    pub analysis_low: Vec<f64>,
    pub analysis_high: Vec<f64>,
    pub synthesis_low: Vec<f64>,
    pub synthesis_high: Vec<f64>,
}

impl FilterPair {
    pub fn len(&self) -> usize {
        self.analysis_low.len()
    }

    pub fn is_empty(&self) -> bool {
        self.analysis_low.is_empty()
    }
}

/// The extracted DHWT filter `F = (1/√π)[[1, −1], [1, 1]]`.
///
/// `[1, 1]/√π` is the low-pass row. `F·Fᵀ = (2/π)·I`, so synthesis uses
/// `(π/2)·Fᵀ`.
pub fn dhwt_filter() -> FilterPair {
    let a = 1.0 / PI.sqrt();
    let s = PI / 2.0 * a;
    FilterPair {
        name: "dhwt".into(),
        analysis_low: vec![a, a],
        analysis_high: vec![a, -a],
        synthesis_low: vec![s, s],
        synthesis_high: vec![s, -s],
    }
}

/// Comparison wavelets by name: `haar`, `db2`, `sym2`, `coif2`.
pub fn standard_filter(name: &str) -> Result<FilterPair> {
    match name.parse::<Wavelet>()? {
        Wavelet::Dhwt => Err(Error::UnknownWavelet(format!("{name} is not a standard wavelet"))),
        w => Ok(w.filter()),
    }
}

/// Any registered filter by id, including `dhwt`.
pub fn lookup(id: &str) -> Result<FilterPair> {
    Ok(id.parse::<Wavelet>()?.filter())
}

/// Orthogonal bank from its scaling filter: `g[j] = (−1)^j h[L−1−j]`,
/// synthesis taps equal analysis taps.
fn orthogonal(name: &str, low: &[f64]) -> FilterPair {
    let len = low.len();
    let high: Vec<f64> = (0..len)
        .map(|j| {
            if j % 2 == 0 {
                low[len - 1 - j]
            } else {
                -low[len - 1 - j]
            }
        })
        .collect();
    FilterPair {
        name: name.into(),
        analysis_low: low.to_vec(),
        analysis_high: high.clone(),
        synthesis_low: low.to_vec(),
        synthesis_high: high,
    }
}

fn db2_taps() -> [f64; 4] {
    let s3 = 3f64.sqrt();
    let d = 4.0 * 2f64.sqrt();
    [(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d]
}

/// Coiflet with 2 vanishing moments (12 taps), scaling filter order.
const COIF2: [f64; 12] = [
    0.01638733646320364,
    -0.04146493678687178,
    -0.0673725547237256,
    0.3861100668227629,
    0.8127236354494135,
    0.4170051844232391,
    -0.07648859907828076,
    -0.05943441864643109,
    0.02368017194684777,
    0.005611434819368834,
    -0.0018232088709110323,
    -0.000720549445520347,
];

/// Perfect-reconstruction check: analysis then synthesis on 100 seeded
/// random signals with even lengths in `2..=256`; true when the largest
/// absolute error is within `tol`.
pub fn verify_pr(filter: &FilterPair, tol: f64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f117);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let len = 2 * rng.random_range(1..=128usize);
        let signal: Vec<f64> = (0..len).map(|_| rng.random_range(-255.0..255.0)).collect();
        let Ok((approx, detail)) = analyze_1d(&signal, filter) else {
            return false;
        };
        let Ok(back) = synthesize_1d(&approx, &detail, filter) else {
            return false;
        };
        for (a, b) in signal.iter().zip(&back) {
            worst = worst.max((a - b).abs());
        }
        if !worst.is_finite() || worst > tol {
            return false;
        }
    }
    worst <= tol
}

/// Packet filters `u` (scaling branch) and `y` (wavelet branch).
#[derive(Debug, Clone, PartialEq)]
pub struct PacketFilters {
    pub u: Vec<f64>,
    pub y: Vec<f64>,
}

impl PacketFilters {
    /// `u₀ = u₁ = 1/√π`, `y₀ = −y₁ = 1/√π`.
    pub fn dhwt() -> Self {
        let a = 1.0 / PI.sqrt();
        Self {
            u: vec![a, a],
            y: vec![a, -a],
        }
    }
}

/// Deepest packet level with tabulated values.
pub const MAX_PACKET_LEVEL: u32 = 2;

/// Packet atom of degree `m` at level `k`, translation `n`:
/// `(1/√π)·H_m(2^k t − n)` on `[n/2^k, (n+1)/2^k)`, zero elsewhere.
///
/// The tabulated functions `h_{k,n}` for `k ≤ 2` are the atoms with `m = n`,
/// e.g. `h_{2,2}(t) = (1/√π)(4(4t − 2)² − 2)`.
pub fn packet_function_eval(m: u32, k: u32, n: u32, t: f64) -> Result<f64> {
    if k > MAX_PACKET_LEVEL {
        return Err(Error::OutOfRange(format!(
            "packet level {k} beyond implemented depth {MAX_PACKET_LEVEL}"
        )));
    }
    let cells = 1u32 << k;
    if n >= cells {
        return Err(Error::OutOfRange(format!("packet translation {n} at level {k}")));
    }
    if !(0.0..1.0).contains(&t) {
        return Err(Error::OutOfRange(format!("t = {t} outside [0, 1)")));
    }
    let x = f64::from(cells) * t - f64::from(n);
    if !(0.0..1.0).contains(&x) {
        return Ok(0.0);
    }
    Ok(hermite_eval(m, x) / PI.sqrt())
}

/// Packet functions from the two-scale recursion
///
/// `P_{2m}(t) = √π Σ_j u_j P_m(2t − j)`, `P_{2m+1}(t) = √π Σ_j y_j P_m(2t − j)`
///
/// starting from the box scaling function `P_0 = 1` on `[0, 1)`. With the
/// DHWT filters this yields the Walsh-ordered ±1 packets.
pub fn packet_recursion_eval(index: u32, t: f64, filters: &PacketFilters) -> f64 {
    if !(0.0..1.0).contains(&t) {
        return 0.0;
    }
    if index == 0 {
        return 1.0;
    }
    let taps = if index.is_multiple_of(2) {
        &filters.u
    } else {
        &filters.y
    };
    let parent = index / 2;
    taps.iter()
        .enumerate()
        .map(|(j, &c)| PI.sqrt() * c * packet_recursion_eval(parent, 2.0 * t - j as f64, filters))
        .sum()
}
