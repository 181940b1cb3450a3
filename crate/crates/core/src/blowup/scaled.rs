//! Reals of the form mantissa · N₀^q with q an exact rational, for the
//! frequencies N_i = N₀^{(5/2)^i} that overflow every float format.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Terms more than 2^40 apart in magnitude are folded into `err`.
pub const ABSORB_BITS: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledReal {
    pub mantissa: f64,
    pub q: Rational64,
    /// Relative error bound accumulated by absorption.
    pub err: f64,
    pub n0: f64,
}

pub fn rational_to_f64(q: Rational64) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl ScaledReal {
    pub fn zero(n0: f64) -> Self {
        ScaledReal { mantissa: 0.0, q: Rational64::zero(), err: 0.0, n0 }
    }

    /// N₀^q exactly.
    pub fn power(n0: f64, q: Rational64) -> Self {
        ScaledReal { mantissa: 1.0, q, err: 0.0, n0 }
    }

    pub fn from_f64(x: f64, n0: f64) -> Self {
        ScaledReal { mantissa: x, q: Rational64::zero(), err: 0.0, n0 }.normalized()
    }

    fn ln_n0(&self) -> f64 {
        self.n0.ln()
    }

    fn normalized(mut self) -> Self {
        if self.mantissa == 0.0 || !self.mantissa.is_finite() {
            if self.mantissa == 0.0 {
                self.q = Rational64::zero();
            }
            return self;
        }
        let k = (self.mantissa.abs().ln() / self.ln_n0()).floor();
        if k != 0.0 {
            self.mantissa /= self.n0.powf(k);
            self.q += Rational64::from_integer(k as i64);
        }
        // guard the float floor at the interval ends
        while self.mantissa.abs() >= self.n0 {
            self.mantissa /= self.n0;
            self.q += 1;
        }
        while self.mantissa.abs() < 1.0 {
            self.mantissa *= self.n0;
            self.q -= 1;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    /// ln |x|; -∞ for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mantissa.abs().ln() + rational_to_f64(self.q) * self.ln_n0()
    }

    pub fn log10_abs(&self) -> f64 {
        self.ln_abs() / std::f64::consts::LN_10
    }

    /// Nearest f64; saturates to ±∞ or 0 outside the float range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        // direct power: exact for integer q, where exp(ln) loses ~|ln x| ulps
        self.mantissa * self.n0.powf(rational_to_f64(self.q))
    }

    pub fn abs(&self) -> Self {
        ScaledReal { mantissa: self.mantissa.abs(), ..*self }
    }

    pub fn scale(&self, x: f64) -> Self {
        ScaledReal { mantissa: self.mantissa * x, ..*self }.normalized()
    }

    pub fn mul(&self, o: &Self) -> Self {
        ScaledReal {
            mantissa: self.mantissa * o.mantissa,
            q: self.q + o.q,
            err: self.err + o.err + self.err * o.err,
            n0: self.n0,
        }
        .normalized()
    }

    pub fn div(&self, o: &Self) -> Self {
        ScaledReal {
            mantissa: self.mantissa / o.mantissa,
            q: self.q - o.q,
            err: self.err + o.err + self.err * o.err,
            n0: self.n0,
        }
        .normalized()
    }

    pub fn powi(&self, n: i64) -> Self {
        ScaledReal {
            mantissa: self.mantissa.powi(n as i32),
            q: self.q * n,
            err: self.err * n.unsigned_abs() as f64,
            n0: self.n0,
        }
        .normalized()
    }

    /// Square root of a non-negative value; q halves exactly.
    pub fn sqrt(&self) -> Self {
        ScaledReal { mantissa: self.mantissa.sqrt(), q: self.q / 2, err: 0.5 * self.err, n0: self.n0 }.normalized()
    }

    /// Exact-exponent power of N₀ times this value.
    pub fn shift(&self, dq: Rational64) -> Self {
        ScaledReal { q: self.q + dq, ..*self }
    }

    pub fn neg(&self) -> Self {
        ScaledReal { mantissa: -self.mantissa, ..*self }
    }

    pub fn add(&self, o: &Self) -> Self {
        if o.is_zero() {
            return *self;
        }
        if self.is_zero() {
            return *o;
        }
        let gap = self.ln_abs() - o.ln_abs();
        let limit = ABSORB_BITS * std::f64::consts::LN_2;
        if gap > limit {
            return ScaledReal { err: self.err + (-gap).exp() * (1.0 + o.err), ..*self };
        }
        if gap < -limit {
            return ScaledReal { err: o.err + gap.exp() * (1.0 + self.err), ..*o };
        }
        let rel = self.n0.powf(rational_to_f64(o.q - self.q));
        let m = self.mantissa + o.mantissa * rel;
        let scale_a = self.mantissa.abs();
        let scale_b = (o.mantissa * rel).abs();
        let err = if m == 0.0 { 0.0 } else { (self.err * scale_a + o.err * scale_b) / m.abs() };
        ScaledReal { mantissa: m, q: self.q, err, n0: self.n0 }.normalized()
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Compares magnitudes.
    pub fn cmp_abs(&self, o: &Self) -> Ordering {
        self.ln_abs().partial_cmp(&o.ln_abs()).unwrap_or(Ordering::Equal)
    }
}

impl fmt::Display for ScaledReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.12e}·N0^({})", self.mantissa, self.q)
    }
}

impl Serialize for ScaledReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ScaledReal", 4)?;
        st.serialize_field("mantissa", &self.mantissa)?;
        st.serialize_field("q", &self.q.to_string())?;
        st.serialize_field("err", &self.err)?;
        st.serialize_field("log10", &self.log10_abs())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational64 {
        Rational64::new(a, b)
    }

    #[test]
    fn products_add_exponents_exactly() {
        let a = ScaledReal::power(1024.0, r(15, 4)).scale(3.0);
        let b = ScaledReal::power(1024.0, r(125, 8)).scale(-7.0);
        let c = a.mul(&b);
        assert_eq!(c.q, r(15, 4) + r(125, 8));
        assert!((c.mantissa + 21.0).abs() < 1e-12);
        assert!((c.mantissa.abs() >= 1.0) && c.mantissa.abs() < 1024.0);
    }

    #[test]
    fn sums_align_or_absorb() {
        let n0 = 1024.0;
        let a = ScaledReal::from_f64(5.0, n0);
        let b = ScaledReal::from_f64(3.0, n0).shift(r(1, 1));
        assert!((a.add(&b).to_f64() - 3077.0).abs() < 1e-9);
        let tiny = ScaledReal::from_f64(1.0, n0).shift(r(-5, 1));
        let s = a.add(&tiny);
        assert_eq!(s.mantissa, 5.0);
        assert!(s.err > 0.0 && s.err < 1e-14);
    }

    #[test]
    fn saturating_conversion() {
        let big = ScaledReal::power(1024.0, r(400, 1));
        assert!(big.to_f64().is_infinite());
        assert!((big.log10_abs() - 400.0 * 1024f64.log10()).abs() < 1e-9);
    }
}
