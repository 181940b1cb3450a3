//! Numerical construction and certification of a finite-time blowup solution
//! for the semilinear wave system □u = f(u) in eleven space dimensions.

pub mod blowup;
pub mod cli;
mod error;
pub mod exponents;
pub mod freewave;
pub mod jet;
pub mod jet2;
pub mod profiles;
pub mod quad;
pub mod special;

pub use error::Error;
