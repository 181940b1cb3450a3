//! The vector free wave v = (v₁, v₂) and its squared-coordinate form V.

use std::sync::Arc;

use super::bump::ConvolvedProfile;
use super::scalar::RadialWaveScalar;
use super::spectral::SpectralWave;
use crate::jet::Jet;
use crate::jet2::Jet2;
use crate::profiles::{BlendConfig, Profile, Support};
use crate::Error;

/// Default half-width of the cone neighbourhood carrying v₂.
pub const DEFAULT_EPSILON: f64 = 0.04;

/// Inside this (t, r) radius v₂ is evaluated spectrally: the ladder route
/// would need the slow exact integral there.
const SPECTRAL_RADIUS: f64 = 0.6;

#[derive(Debug)]
pub struct FreeWaveField {
    pub k: usize,
    pub epsilon: f64,
    pub profile: Arc<Profile>,
    pub v1: RadialWaveScalar,
    pub v2: RadialWaveScalar,
    pub spectral: Arc<SpectralWave>,
}

impl FreeWaveField {
    pub fn new(k: usize, blend: BlendConfig, epsilon: f64) -> Result<Self, Error> {
        Self::with_bump_power(k, blend, epsilon, super::bump::BUMP_POWER)
    }

    pub fn with_bump_power(k: usize, blend: BlendConfig, epsilon: f64, m: usize) -> Result<Self, Error> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::Config(format!("epsilon {epsilon} outside (0, 0.5)")));
        }
        let profile = Arc::new(Profile::new(k, blend)?);
        let spectral = Arc::new(SpectralWave::with_power(2 * k + 1, epsilon, m)?);
        let g = ConvolvedProfile::new(spectral.bump().clone());
        Ok(FreeWaveField {
            k,
            epsilon,
            v1: RadialWaveScalar::new(Arc::new(profile.g()), k),
            v2: RadialWaveScalar::new(Arc::new(g), k),
            profile,
            spectral,
        })
    }

    /// d = 11 with the default blend and ε.
    pub fn standard() -> Result<Self, Error> {
        Self::new(5, BlendConfig::default(), DEFAULT_EPSILON)
    }

    pub fn dimension(&self) -> usize {
        2 * self.k + 1
    }

    /// V vanishes unless ||x| - t| is within this bound.
    pub fn support_bound(&self) -> f64 {
        self.profile.support_radius() + self.epsilon
    }

    /// Exact Huygens test: both profiles vanish on {t - r, t + r}.
    pub fn vanishes(&self, t: f64, r: f64) -> bool {
        let miss = |s: Support| !s.contains(t - r) && !s.contains(t + r);
        miss(self.v1.profile().support()) && miss(self.v2.profile().support())
    }

    /// Jets of (V₁, V₂) in (t, y) up to total order `order`.
    pub fn ty_jet(&self, t: f64, y: f64, order: usize) -> Result<[Jet2; 2], Error> {
        let a = self.v1.ty_jet(t, y, order)?;
        let r = y.max(0.0).sqrt();
        let b = if t.abs() + r <= SPECTRAL_RADIUS {
            self.spectral.ty_jet(t, y, order)?
        } else {
            self.v2.ty_jet(t, y, order)?
        };
        Ok([a, b])
    }

    /// Jets of (v₁, v₂) in (t, r) through y = r².
    pub fn tr_jet(&self, t: f64, r: f64, order: usize) -> Result<[Jet2; 2], Error> {
        let [a, b] = self.ty_jet(t, r * r, order)?;
        let tv = Jet2::variable(t, false, order);
        let rv = Jet2::variable(r, true, order);
        let yv = &rv * &rv;
        Ok([a.compose(&tv, &yv), b.compose(&tv, &yv)])
    }

    pub fn value(&self, t: f64, r: f64) -> Result<[f64; 2], Error> {
        let [a, b] = self.ty_jet(t, r * r, 0)?;
        Ok([a.value(), b.value()])
    }

    /// Far-field mantissas of both components (see
    /// [`RadialWaveScalar::far_ty_mantissas`]).
    pub fn far_ty_mantissas(&self, sigma: f64, inv_r: f64, order: usize) -> [Vec<Jet>; 2] {
        [
            self.v1.far_ty_mantissas(sigma, inv_r, order),
            self.v2.far_ty_mantissas(sigma, inv_r, order),
        ]
    }
}
