use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_rational::Rational64;
use serde::Serialize;

use super::scaled::ScaledReal;
use crate::freewave::FreeWaveField;
use crate::jet2::Jet2;
use crate::profiles::{make_cutoff, Cutoff};
use crate::Error;

pub const DEFAULT_DELTA: f64 = 1.0 / 64.0;
/// Smallest δ at which the wedge ∂_tV ∧ ∂_yV keeps one sign over R_{i,3}.
pub const CERTIFIED_DELTA: f64 = 1.0 / 4096.0;
pub const DEFAULT_N0: f64 = 1024.0;
pub const DEFAULT_I_MAX: usize = 6;

#[derive(Clone, Debug)]
pub struct BlowupConfig {
    pub d: usize,
    pub m: usize,
    pub k: usize,
    pub delta: f64,
    pub n0: f64,
    pub i_max: usize,
    pub field: Arc<FreeWaveField>,
    pub eta: Cutoff,
    /// Non-fatal findings at construction (e.g. δ above a quarter of the
    /// corner radius).
    pub flags: Vec<String>,
    /// V-jets at anchors, shared by all patches (the s = i-1 term sees the
    /// same (τ, ρ²) for every i).
    pub cache: Arc<JetCache>,
}

#[derive(Debug, Default)]
pub struct JetCache {
    map: Mutex<HashMap<(u64, u64, usize), [Jet2; 2]>>,
}

impl JetCache {
    pub fn ty_jet(&self, field: &FreeWaveField, t: f64, y: f64, order: usize) -> Result<[Jet2; 2], Error> {
        let key = (t.to_bits(), y.to_bits(), order);
        if let Some(j) = self.map.lock().expect("cache poisoned").get(&key) {
            return Ok(j.clone());
        }
        let j = field.ty_jet(t, y, order)?;
        self.map.lock().expect("cache poisoned").insert(key, j.clone());
        Ok(j)
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigSummary {
    pub d: usize,
    pub m: usize,
    pub k: usize,
    pub delta: f64,
    pub n0: f64,
    pub i_max: usize,
    pub epsilon: f64,
    pub flags: Vec<String>,
}

impl BlowupConfig {
    pub fn new(field: Arc<FreeWaveField>, delta: f64, n0: f64, i_max: usize) -> Result<Self, Error> {
        if !(n0 > 1.0 && n0.powf(1.5) > 2.0) {
            return Err(Error::Config(format!("N0 = {n0} violates N0^(3/2) > 2")));
        }
        if !(delta > 0.0 && delta <= 0.125) {
            return Err(Error::Config(format!("delta = {delta} outside (0, 1/8]")));
        }
        if i_max < 2 {
            return Err(Error::Config(format!("i_max = {i_max} < 2")));
        }
        Ok(BlowupConfig {
            d: field.dimension(),
            m: 2,
            k: field.k,
            delta,
            n0,
            i_max,
            field,
            eta: make_cutoff(),
            flags: Vec::new(),
            cache: Arc::default(),
        })
    }

    pub fn with_defaults(field: Arc<FreeWaveField>, delta: f64) -> Result<Self, Error> {
        Self::new(field, delta, DEFAULT_N0, DEFAULT_I_MAX)
    }

    /// Records whether δ sits below a quarter of the corner neighbourhood radius.
    pub fn check_corner(&mut self, nbhd_radius: f64) -> bool {
        let ok = self.delta < nbhd_radius / 4.0;
        if !ok {
            self.flags.push(format!("delta {} not below corner radius/4 = {}", self.delta, nbhd_radius / 4.0));
        }
        ok
    }

    pub fn summary(&self) -> ConfigSummary {
        ConfigSummary {
            d: self.d,
            m: self.m,
            k: self.k,
            delta: self.delta,
            n0: self.n0,
            i_max: self.i_max,
            epsilon: self.field.epsilon,
            flags: self.flags.clone(),
        }
    }

    /// Exponent (5/2)^i of N_i.
    pub fn q_of(&self, i: usize) -> Rational64 {
        Rational64::new(5, 2).pow(i as i32)
    }

    pub fn lambda_q(&self, i: usize) -> Rational64 {
        Rational64::new(3, 2) * self.q_of(i - 1)
    }

    /// Λ_i = N_i / N_{i-1} = N_{i-1}^{3/2}.
    pub fn lambda(&self, i: usize) -> ScaledReal {
        ScaledReal::power(self.n0, self.lambda_q(i))
    }

    pub fn n(&self, i: usize) -> ScaledReal {
        scale_ladder(self, i)
    }
}

/// N_i = N₀^{(5/2)^i} with exact exponent.
pub fn scale_ladder(cfg: &BlowupConfig, i: usize) -> ScaledReal {
    ScaledReal::power(cfg.n0, cfg.q_of(i))
}
