//! Verbose and concise Vietoris-Rips barcodes of finite (pseudo-)metric spaces.
//!
//! The crate builds the full Vietoris-Rips filtered chain complex of a finite
//! space over a prime field, reduces it while keeping every zero-length pair,
//! and exposes the distances built on the resulting barcodes: the matching
//! distance, the bottleneck distance, pullback distances over tripods and an
//! exact brute-force Gromov-Hausdorff distance for small spaces.

pub mod barcode;
pub mod complex;
pub mod field;
pub mod gh;
pub mod matching;
pub mod metric;
pub mod pullback;
pub mod reduce;
pub mod scalar;
pub mod svd_check;
pub mod verify;

pub use barcode::{Barcode, Point};
pub use metric::{FiniteMetricSpace, Surjection, Tripod};
pub use scalar::{Exact, Extended, Float, Real};
