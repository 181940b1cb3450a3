//! Smooth scalar building blocks: the cutoff η, the blend ψ, the remainder R
//! and the profile g, all evaluated through [`Jet`]s.

mod blend;
mod cutoff;
mod poly;
mod profile;

pub use blend::{Blend, BlendConfig};
pub use cutoff::{bump_jet, Cutoff};
pub use poly::Polynomial;
pub use profile::{make_profile, Profile, ProfileCertificate, ProfileFn, Remainder};

use crate::jet::Jet;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Support {
    All,
    Interval(f64, f64),
}

impl Support {
    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Support::All => true,
            Support::Interval(a, b) => a <= x && x <= b,
        }
    }

    /// True when `[lo, hi]` misses the support entirely.
    pub fn misses(&self, lo: f64, hi: f64) -> bool {
        match *self {
            Support::All => false,
            Support::Interval(a, b) => hi < a || lo > b,
        }
    }
}

/// A smooth real function with jet evaluation.
pub trait SmoothFn: Send + Sync {
    fn jet(&self, x: f64, order: usize) -> Jet;

    fn support(&self) -> Support;

    fn smoothness(&self) -> &'static str;

    /// Points where the function is smooth but not analytic. Power series
    /// centred near them are not trustworthy.
    fn junctions(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Degree of the polynomial pieces between junctions, when the function
    /// is piecewise polynomial. Lets quadratures use exact fixed rules.
    fn piece_degree(&self) -> Option<usize> {
        None
    }

    /// Highest derivative order the jets are exact for.
    fn max_order(&self) -> usize {
        usize::MAX
    }

    /// Jet of the first derivative. Overridden where the function value
    /// itself is much dearer than its derivatives.
    fn derivative_jet(&self, x: f64, order: usize) -> Jet {
        self.jet(x, order + 1).differentiate(1)
    }

    fn value(&self, x: f64) -> f64 {
        self.jet(x, 0).value()
    }
}

pub fn make_cutoff() -> Cutoff {
    Cutoff::new()
}

pub fn make_blend(k: usize) -> Result<Blend, crate::Error> {
    Blend::new(k, BlendConfig::default())
}
