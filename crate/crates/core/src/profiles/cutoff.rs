use std::sync::OnceLock;

use super::{SmoothFn, Support};
use crate::jet::Jet;
use crate::quad;

/// Jet of `exp(-1/(s(1-s)))` on `(0, 1)`, zero elsewhere.
pub fn bump_jet(s: f64, order: usize) -> Jet {
    if s <= 0.0 || s >= 1.0 {
        return Jet::zero(s, order);
    }
    let u = s * (1.0 - s);
    if 1.0 / u > 700.0 {
        return Jet::zero(s, order);
    }
    let x = Jet::variable(s, order);
    let one_minus = &(&x * -1.0) + 1.0;
    let prod = &x * &one_minus;
    (&prod.recip() * -1.0).exp()
}

fn bump_integral_total() -> f64 {
    static Z: OnceLock<f64> = OnceLock::new();
    *Z.get_or_init(|| quad::composite(|s| bump_jet(s, 0).value(), 0.0, 1.0, 32, 20))
}

/// Normalized primitive of the bump: 0 at `s <= 0`, 1 at `s >= 1`.
fn bridge(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let f = |x: f64| bump_jet(x, 0).value();
    if s <= 0.5 {
        quad::composite(f, 0.0, s, 16, 20) / bump_integral_total()
    } else {
        1.0 - quad::composite(f, s, 1.0, 16, 20) / bump_integral_total()
    }
}

/// Even cutoff: 1 on `[-1, 1]`, 0 outside `[-2, 2]`.
#[derive(Clone, Debug, Default)]
pub struct Cutoff;

impl Cutoff {
    pub fn new() -> Self {
        Cutoff
    }

    /// Integral of the raw bump over `[0, 1]`.
    pub fn bump_mass() -> f64 {
        bump_integral_total()
    }
}

impl SmoothFn for Cutoff {
    fn jet(&self, x: f64, order: usize) -> Jet {
        let ax = x.abs();
        if ax <= 1.0 {
            return Jet::constant(x, 1.0, order);
        }
        if ax >= 2.0 {
            return Jet::zero(x, order);
        }
        let s = ax - 1.0;
        let mut tc = vec![1.0 - bridge(s)];
        if order >= 1 {
            let sign = if x > 0.0 { -1.0 } else { 1.0 };
            let b = bump_jet(s, order - 1);
            let z = bump_integral_total();
            // d/dx of -bridge(|x|-1); the inner derivative is sign(x)
            let dir: f64 = if x > 0.0 { 1.0 } else { -1.0 };
            for (n, c) in b.taylor().iter().enumerate() {
                tc.push(sign * c * dir.powi(n as i32) / z / (n + 1) as f64);
            }
        }
        Jet::from_taylor(x, tc)
    }

    fn support(&self) -> Support {
        Support::Interval(-2.0, 2.0)
    }

    fn smoothness(&self) -> &'static str {
        "C-infinity, Gevrey-2 at |x| = 1, 2"
    }

    fn junctions(&self) -> Vec<f64> {
        vec![-2.0, -1.0, 1.0, 2.0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_mass_matches_reference() {
        assert!((Cutoff::bump_mass() - 0.007_029_858_406_609_8).abs() < 1e-13);
    }

    #[test]
    fn bridge_is_symmetric() {
        for s in [0.1, 0.3, 0.45] {
            assert!((bridge(s) + bridge(1.0 - s) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let eta = Cutoff::new();
        for x in [-1.7, -1.2, 1.3, 1.5, 1.8] {
            let h = 1e-5;
            let fd = (eta.value(x + h) - eta.value(x - h)) / (2.0 * h);
            let j = eta.jet(x, 2);
            assert!((j.derivative(1) - fd).abs() < 1e-7, "x={x}");
            let fd2 = (eta.jet(x + h, 1).derivative(1) - eta.jet(x - h, 1).derivative(1)) / (2.0 * h);
            assert!((j.derivative(2) - fd2).abs() < 1e-6, "x={x}");
        }
    }
}
