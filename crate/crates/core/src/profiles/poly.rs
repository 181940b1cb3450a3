use super::{SmoothFn, Support};
use crate::jet::{binomial, Jet};

/// Polynomial `Σ c_j x^j`, entire and with exact jets.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Polynomial { coeffs }
    }
}

impl SmoothFn for Polynomial {
    fn jet(&self, x: f64, order: usize) -> Jet {
        // Taylor shift: coefficient n at x is Σ_j c_j C(j, n) x^{j-n}
        let tc = (0..=order)
            .map(|n| {
                self.coeffs
                    .iter()
                    .enumerate()
                    .skip(n)
                    .map(|(j, c)| c * binomial(j, n) * x.powi((j - n) as i32))
                    .sum()
            })
            .collect();
        Jet::from_taylor(x, tc)
    }

    fn support(&self) -> Support {
        Support::All
    }

    fn smoothness(&self) -> &'static str {
        "polynomial"
    }
}
