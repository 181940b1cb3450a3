use blowup_lab::exponents::*;
use num_rational::Rational64;

fn r(a: i64, b: i64) -> Rational64 {
    Rational64::new(a, b)
}

#[test]
fn ansatz_examples() {
    let l = ansatz_feasibility(11).unwrap();
    assert_eq!((l.alpha, l.step_exponent, l.feasible), (r(3, 2), r(5, 2), true));
    let l = ansatz_feasibility(10).unwrap();
    assert_eq!((l.discriminant, l.feasible), (r(-7, 16), false));
    assert_eq!(ansatz_feasibility(5).unwrap().alpha, r(0, 1));
    assert!(ansatz_feasibility(1).is_err());
}

#[test]
fn feasibility_flips_once_between_ten_and_eleven() {
    for d in 2..=40 {
        let l = ansatz_feasibility(d).unwrap();
        assert_eq!(l.feasible, d >= 11, "d = {d}");
        // the quadratic rearrangement at α = (d-5)/4 leaves exactly the discriminant
        assert_eq!(l.slack, l.discriminant, "d = {d}");
    }
}

#[test]
fn c_of_p_examples() {
    assert_eq!(c_of_p(9, 2.0, Variant::Printed).unwrap(), 1.0);
    assert_eq!(c_of_p(9, 4.0, Variant::Printed).unwrap(), -0.75);
    assert_eq!(7.0 / 4.0 - 2.5, 11.0 / 4.0 - 3.5);
    assert_eq!(c_of_p(10, 4.0, Variant::Printed).unwrap(), -2.0);
    assert_eq!(c_of_p(10, 4.0, Variant::Corrected).unwrap(), -1.0);
    assert!(matches!(c_of_p(8, 4.0, Variant::Printed), Err(blowup_lab::Error::UnsupportedDimension(8))));
    assert!(c_of_p(9, 1.5, Variant::Printed).is_err());
}

#[test]
fn c_is_concave_in_one_over_p() {
    for (d, v) in [(9, Variant::Printed), (10, Variant::Printed), (10, Variant::Corrected)] {
        assert!(max_second_difference(d, v, 1000).unwrap() <= 1e-12);
    }
}

#[test]
fn d9_scan_has_no_failures() {
    let c = regularity_scan(9, 1.0, 3.5, 1e-3, Variant::Printed).unwrap();
    assert_eq!(c.rows.len(), 2501);
    assert!(c.rows.iter().all(|row| row.feasible && row.c2s > row.one_minus_s));
    assert!(c.gap_intervals.is_empty());
    let first = &c.rows[0];
    assert_eq!((first.s, first.c2s, first.one_minus_s), (1.0, 1.0, 0.0));
}

#[test]
fn d10_gaps_contain_two_to_three_in_both_readings() {
    let printed = regularity_scan(10, 1.0, 4.0, 1e-3, Variant::Printed).unwrap();
    let corrected = regularity_scan(10, 1.0, 4.0, 1e-3, Variant::Corrected).unwrap();
    // printed: s + 2/s - 4 <= 0 on [2 - √2, 2 + √2], clipped to the scan start
    assert_eq!(printed.gap_intervals.len(), 1);
    let (a, b) = printed.gap_intervals[0];
    assert_eq!(a, 1.0);
    assert!((b - (2.0 + 2f64.sqrt())).abs() < 1e-9, "{b}");
    // corrected: (s - 2)(s - 3)/s <= 0
    let (a, b) = corrected.gap_intervals[0];
    assert!((a - 2.0).abs() < 1e-9 && (b - 3.0).abs() < 1e-9);
    assert_ne!(printed.gap_intervals, corrected.gap_intervals);
}

#[test]
fn endpoint_offsets_and_interpolation() {
    let t = base_exponent_table(9).unwrap();
    assert_eq!(t.offsets.energy, r(-1, 1));
    assert_eq!(t.offsets.l2l4, r(3, 4));
    assert_eq!(t.offsets.linf_linf, r(7, 2));
    assert_eq!(t.offsets.l1l2, r(-1, 1));
    assert!(t.exact_match && t.pass);
    // oracle: interpolate the negated offsets linearly in 1/p
    let interp = |x: f64| {
        if x <= 0.25 {
            -3.5 + (x / 0.25) * (-0.75 + 3.5)
        } else {
            -0.75 + ((x - 0.25) / 0.25) * (1.0 + 0.75)
        }
    };
    for p in [2.0, 4.0] {
        assert!((interp(1.0 / p) - c_of_p(9, p, Variant::Printed).unwrap()).abs() < 1e-15);
    }
    assert!(base_exponent_table(10).is_err());
}

#[test]
fn figure_csv_columns() {
    let c = regularity_scan(9, 1.0, 1.01, 1e-3, Variant::Printed).unwrap();
    let mut buf = Vec::new();
    write_csv(&mut buf, &c).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,c2s,one_minus_s,feasible"));
    assert_eq!(lines.count(), 11);
    let mut svg = Vec::new();
    write_svg(&mut svg, "d = 9", &[&c]).unwrap();
    assert!(String::from_utf8(svg).unwrap().starts_with("<svg"));
}
