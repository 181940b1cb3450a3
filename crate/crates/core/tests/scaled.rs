use blowup_lab::blowup::scaled::ABSORB_BITS;
use blowup_lab::blowup::ScaledReal;
use num_rational::Rational64;
use proptest::prelude::*;

const N0: f64 = 1024.0;

fn scaled() -> impl Strategy<Value = ScaledReal> {
    (1.0f64..1000.0, any::<bool>(), -40i64..40, 1i64..8)
        .prop_map(|(m, neg, p, q)| ScaledReal::from_f64(if neg { -m } else { m }, N0).shift(Rational64::new(p, q)))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

proptest! {
    #[test]
    fn products_add_exponents_exactly(a in scaled(), b in scaled()) {
        let c = a.mul(&b);
        prop_assert!((c.mantissa.abs() >= 1.0) && c.mantissa.abs() < N0);
        prop_assert!(rel(c.ln_abs(), a.ln_abs() + b.ln_abs()) < 1e-12 || (c.ln_abs() - a.ln_abs() - b.ln_abs()).abs() < 1e-10);
        // q moves by integers only during normalization
        prop_assert!((c.q - a.q - b.q).is_integer());
    }

    #[test]
    fn multiplication_is_associative_in_q(a in scaled(), b in scaled(), c in scaled()) {
        let l = a.mul(&b).mul(&c);
        let r = a.mul(&b.mul(&c));
        prop_assert_eq!(l.q, r.q);
        prop_assert!(rel(l.mantissa, r.mantissa) < 1e-14);
    }

    #[test]
    fn division_inverts_multiplication(a in scaled(), b in scaled()) {
        let back = a.mul(&b).div(&b);
        prop_assert_eq!(back.q, a.q);
        prop_assert!(rel(back.mantissa, a.mantissa) < 1e-14);
    }

    #[test]
    fn addition_agrees_with_floats_in_range(x in -1e30f64..1e30, y in -1e30f64..1e30) {
        let s = ScaledReal::from_f64(x, N0).add(&ScaledReal::from_f64(y, N0)).to_f64();
        let scale = x.abs() + y.abs();
        prop_assert!((s - (x + y)).abs() <= 1e-14 * scale);
    }

    #[test]
    fn absorption_only_past_the_threshold(m in 1.0f64..2.0, gap in 1.0f64..80.0) {
        let a = ScaledReal::from_f64(m, N0);
        let small = ScaledReal::from_f64(2f64.powf(-gap), N0);
        let s = a.add(&small);
        let gap_bits = (a.ln_abs() - small.ln_abs()) / std::f64::consts::LN_2;
        if gap_bits > ABSORB_BITS {
            prop_assert_eq!(s.mantissa, a.mantissa);
            let ratio = (small.ln_abs() - a.ln_abs()).exp();
            prop_assert!(rel(s.err, ratio) < 1e-9);
        } else {
            prop_assert_eq!(s.err, 0.0);
            prop_assert!(rel(s.to_f64(), m + 2f64.powf(-gap)) < 1e-15);
        }
    }
}
