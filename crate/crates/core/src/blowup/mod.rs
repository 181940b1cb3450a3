//! The self-similar cascade: frequencies N_i, patches R_i and the maps U, F.

pub mod certify;
pub mod config;
pub mod nonlinearity;
pub mod patch;
pub mod physical;
pub mod residual;
pub mod scaled;

pub use config::{BlowupConfig, CERTIFIED_DELTA, DEFAULT_DELTA, DEFAULT_I_MAX, DEFAULT_N0};
pub use patch::{Anchor, FJet, PatchMaps, PatchPoint, PatchRect, UJet};
pub use scaled::ScaledReal;
