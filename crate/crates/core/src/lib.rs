//! Discrete Hermite wavelet transform (DHWT) toolkit.
//!
//! The crate is organised bottom-up:
//!
//! - [`hermite`]: exact and floating-point Hermite polynomials, Gauss–Hermite
//!   quadrature and the piecewise Hermite wavelet basis `h_{n,m}`.
//! - [`filter`]: the 2-tap DHWT filter bank, the comparison wavelets
//!   (haar, db2, sym2, coif2) and perfect-reconstruction checks.
//! - [`transform`]: 1D/2D separable analysis and synthesis, multilevel
//!   pyramids and 1D wavelet packets.
//! - [`codec`]: hard thresholding, uniform quantization and the `.dhwt`
//!   container.
//! - [`metrics`]: MSE, PSNR, CR, BPP, energy statistics and the comparison grid.
//!
//! Row and column passes, channels and independent compression runs are
//! spread over a rayon pool when the `parallel` feature is enabled. Every
//! entry point that does this has a `*_with` variant taking an [`Exec`] so
//! callers can force the sequential path.

pub mod codec;
pub mod error;
pub mod exec;
pub mod filter;
pub mod hermite;
pub mod image;
pub mod metrics;
pub mod transform;

pub use codec::{CompressedImage, ThresholdSchedule};
pub use error::{Error, Result};
pub use exec::Exec;
pub use filter::{FilterPair, Wavelet};
pub use image::Image;
pub use metrics::{QualityReport, ReportRow};
pub use transform::{Pyramid, QuantizedPyramid, SubbandPyramid};
