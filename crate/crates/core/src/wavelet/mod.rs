//! Boundary-adapted orthonormal wavelet bases on dyadic grids.

mod basis;
mod besov;
mod coeffs;
mod filters;
mod grid;
mod level;

pub use basis::{synthesize, TransformWorkspace, WaveletBasis};
pub use besov::besov_norm;
pub use coeffs::{CoefficientIndex, CoefficientVector, Subband};
pub use grid::{EvalMode, GridFunction, GridShape, Stencil};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaveletFamily {
    Haar,
    /// Daubechies least-asymmetric, 8 vanishing moments (16 taps).
    Symmlet8,
}

/// Boundary handling of the filter bank at the ends of `[0,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Half-sample symmetric reflection, with the boundary rows rebuilt to
    /// be orthonormal and to keep the vanishing moments.
    SymmetricReflection,
    Periodic,
}

impl std::str::FromStr for WaveletFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "haar" => Ok(WaveletFamily::Haar),
            "symmlet8" | "sym8" | "la16" => Ok(WaveletFamily::Symmlet8),
            other => Err(Error::parse("wavelet family", other)),
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "symmetric" | "reflection" => Ok(Boundary::SymmetricReflection),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(Error::parse("boundary", other)),
        }
    }
}
