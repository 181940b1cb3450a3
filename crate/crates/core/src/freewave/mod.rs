//! The two-component radial free wave v = (v1, v2) in odd dimension d = 2k+1.

pub mod bump;
pub mod certify;
pub mod corner;
pub mod field;
pub mod ladder;
pub mod scalar;
pub mod spectral;

pub use ladder::{ladder_coefficients, Branch};
pub use field::FreeWaveField;
pub use scalar::RadialWaveScalar;
pub use spectral::SpectralWave;
