mod common;

use blowup_lab::freewave::ladder::ladder_sum;
use blowup_lab::profiles::Polynomial;
use common::BiPoly;
use proptest::prelude::*;

#[test]
fn ladder_matches_symbolic_oracle() {
    let (value, deriv) = common::ladder_oracle_error(20, 1, 1.0);
    assert!(value <= 1e-12, "worst relative value error {value:e}");
    assert!(deriv <= 1e-10, "worst relative derivative error {deriv:e}");
}

/// Between the series switch at r = 1/4 and r = 1 the r^{-(κ+i)} terms of the
/// ladder sum cancel and digits are lost.
#[test]
fn ladder_near_the_series_switch() {
    let (value, deriv) = common::ladder_oracle_error(20, 2, 0.25);
    assert!(value <= 1e-9, "worst relative value error {value:e}");
    assert!(deriv <= 1e-7, "worst relative derivative error {deriv:e}");
}

#[test]
fn oracle_knows_the_three_dimensional_case() {
    // κ = 1, g = x³: (1/r)∂_r((t+r)³ + (t-r)³) = 12t
    let p = BiPoly::symmetric_sum(&[0, 0, 0, 1]).ladder_step();
    assert_eq!(p.eval(0.7, 1.3).0, 12.0 * 0.7);
}

proptest! {
    #[test]
    fn ladder_is_linear_in_the_profile(
        g in prop::collection::vec(-5.0f64..5.0, 8),
        s in -3.0f64..3.0,
        t in -1.0f64..1.0,
        r in 0.5f64..2.0,
    ) {
        let h = Polynomial::new(g.clone());
        let hs = Polynomial::new(g.iter().map(|c| c * s).collect());
        let a = ladder_sum(&h, 3, t, r, 0).derivative(0, 0);
        let b = ladder_sum(&hs, 3, t, r, 0).derivative(0, 0);
        prop_assert!((b - s * a).abs() <= 1e-10 * (1.0 + a.abs() * s.abs()));
    }
}
