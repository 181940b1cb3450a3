use serde::{Deserialize, Serialize};

use super::{SmoothFn, Support};
use crate::jet::Jet;
use crate::Error;

/// Jet targets of ψ at 0 and the interval on which ψ turns into the identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlendConfig {
    pub value: f64,
    pub slope: f64,
    pub curvature: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Default for BlendConfig {
    fn default() -> Self {
        BlendConfig { value: 1.0, slope: 0.1, curvature: 1.0, lo: 0.2, hi: 0.9 }
    }
}

/// ψ = (1 - S) p + S x, with p the quadratic fixed by the jet targets at 0
/// and S an exponential partition of unity across `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct Blend {
    cfg: BlendConfig,
}

impl Blend {
    pub fn new(k: usize, cfg: BlendConfig) -> Result<Self, Error> {
        if k == 0 {
            return Err(Error::Config("k must be positive".into()));
        }
        if !(cfg.value > 0.0) || !(cfg.slope > 0.0) {
            return Err(Error::Config("blend needs ψ(0) > 0 and ψ'(0) > 0".into()));
        }
        if cfg.value * cfg.curvature <= (k as f64 + 1.0) * cfg.slope * cfg.slope {
            return Err(Error::Config(format!(
                "blend targets violate ψ(0)ψ''(0) > (k+1)ψ'(0)^2 for k = {k}"
            )));
        }
        if !(0.0 < cfg.lo && cfg.lo < cfg.hi && cfg.hi <= 1.0) {
            return Err(Error::Config("blend interval must satisfy 0 < lo < hi <= 1".into()));
        }
        Ok(Blend { cfg })
    }

    pub fn config(&self) -> &BlendConfig {
        &self.cfg
    }

    /// Start of the region where ψ(x) = x.
    pub fn identity_from(&self) -> f64 {
        self.cfg.hi
    }

    fn poly(&self, x: f64, order: usize) -> Jet {
        let c = &self.cfg;
        let mut tc = vec![0.0; order + 1];
        tc[0] = c.value + c.slope * x + 0.5 * c.curvature * x * x;
        if order >= 1 {
            tc[1] = c.slope + c.curvature * x;
        }
        if order >= 2 {
            tc[2] = 0.5 * c.curvature;
        }
        Jet::from_taylor(x, tc)
    }

    /// Partition S rising from 0 at `lo` to 1 at `hi`.
    fn partition(&self, x: f64, order: usize) -> Jet {
        let (a, b) = (self.cfg.lo, self.cfg.hi);
        let s = (x - a) / (b - a);
        // S = 1 / (1 + e^w) with w = 1/s - 1/(1-s); only e^{-|w|} is ever formed
        let w0 = 1.0 / s - 1.0 / (1.0 - s);
        if w0 > 700.0 {
            return Jet::zero(x, order);
        }
        if w0 < -700.0 {
            return Jet::constant(x, 1.0, order);
        }
        let sj = &(&Jet::variable(x, order) + (-a)) * (1.0 / (b - a));
        let w = &sj.recip() - &(&(&sj * -1.0) + 1.0).recip();
        if w0 >= 0.0 {
            let e = (&w * -1.0).exp();
            &e * &(&e + 1.0).recip()
        } else {
            (&w.exp() + 1.0).recip()
        }
    }
}

impl SmoothFn for Blend {
    fn jet(&self, x: f64, order: usize) -> Jet {
        if x <= self.cfg.lo {
            return self.poly(x, order);
        }
        if x >= self.cfg.hi {
            return Jet::variable(x, order);
        }
        let s = self.partition(x, order);
        let p = self.poly(x, order);
        let id = Jet::variable(x, order);
        let one_minus = &(&s * -1.0) + 1.0;
        &(&one_minus * &p) + &(&s * &id)
    }

    fn support(&self) -> Support {
        Support::All
    }

    fn smoothness(&self) -> &'static str {
        "C-infinity, Gevrey-2 at the blend endpoints"
    }

    fn junctions(&self) -> Vec<f64> {
        vec![self.cfg.lo, self.cfg.hi]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_targets_that_break_the_sign_conditions() {
        let cfg = BlendConfig { slope: 0.5, ..BlendConfig::default() };
        assert!(Blend::new(5, cfg).is_err());
    }

    #[test]
    fn joins_identity_smoothly() {
        let psi = Blend::new(5, BlendConfig::default()).unwrap();
        let below = psi.jet(0.9 - 1e-6, 4);
        assert!((below.value() - (0.9 - 1e-6)).abs() < 1e-12);
        assert!((below.derivative(1) - 1.0).abs() < 1e-9);
        assert!(below.derivative(2).abs() < 1e-6);
    }

    #[test]
    fn stays_positive() {
        let psi = Blend::new(5, BlendConfig::default()).unwrap();
        for i in 0..=2000 {
            let x = -3.0 + 5.0 * i as f64 / 2000.0;
            assert!(psi.value(x) > 0.1, "x = {x}");
        }
    }
}
