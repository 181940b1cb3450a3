use std::sync::{Arc, OnceLock};

use blowup_lab::blowup::nonlinearity::{invert_local, invert_u, Lookup};
use blowup_lab::blowup::residual::ty_dalembertian;
use blowup_lab::blowup::{BlowupConfig, PatchMaps, PatchPoint, CERTIFIED_DELTA};
use blowup_lab::freewave::FreeWaveField;
use blowup_lab::jet::Jet;
use blowup_lab::jet2::Jet2;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn field() -> Arc<FreeWaveField> {
    static F: OnceLock<Arc<FreeWaveField>> = OnceLock::new();
    F.get_or_init(|| Arc::new(FreeWaveField::standard().unwrap())).clone()
}

fn patch() -> &'static PatchMaps {
    static P: OnceLock<PatchMaps> = OnceLock::new();
    P.get_or_init(|| {
        let cfg = BlowupConfig::with_defaults(field(), CERTIFIED_DELTA).unwrap();
        PatchMaps::new(&cfg, 2).unwrap()
    })
}

#[test]
fn scale_ladder_with_base_hundred() {
    let cfg = BlowupConfig::new(field(), 1.0 / 64.0, 100.0, 6).unwrap();
    assert_eq!(cfg.n(1).q, Rational64::new(5, 2));
    assert!((cfg.n(1).log10_abs() - 5.0).abs() < 1e-12);
    assert!((cfg.n(2).log10_abs() - 12.5).abs() < 1e-12);
    assert_eq!((cfg.n(0).q, cfg.n(0).mantissa), (Rational64::new(1, 1), 1.0));
    assert_eq!(cfg.n(6).q, Rational64::new(15625, 64));
}

/// f(t, r) = e^{at} / (1 + r²) with its radial d'Alembertian worked by hand.
#[test]
fn squared_coordinate_dalembertian_matches_radial_form() {
    let (a, d) = (0.7, 11usize);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let t = rng.gen_range(-2.0..2.0);
        let r: f64 = rng.gen_range(0.05..3.0);
        let y = r * r;
        let et = Jet::variable(t, 2).scale(a).exp();
        let inv = (&Jet::variable(y, 2) + 1.0).recip();
        let jet = &Jet2::from_u(&et, 2) * &Jet2::from_v(&inv, 2);
        let e = (a * t).exp();
        let q = 1.0 + y;
        let f_tt = a * a * e / q;
        let f_r = -2.0 * r * e / (q * q);
        let f_rr = e * (6.0 * y - 2.0) / q.powi(3);
        let radial = -f_tt + f_rr + (d as f64 - 1.0) / r * f_r;
        let got = ty_dalembertian(&jet, y, d);
        let scale = f_tt.abs() + f_rr.abs() + ((d as f64 - 1.0) / r * f_r).abs();
        assert!((got - radial).abs() <= 1e-10 * scale, "t={t} r={r}: {got} vs {radial}");
    }
}

#[test]
fn free_wave_dalembertian_agrees_in_both_coordinates() {
    let f = field();
    let d = f.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let t = rng.gen_range(0.0..3.0);
        let r: f64 = rng.gen_range(0.3..3.0);
        let ty = f.ty_jet(t, r * r, 2).unwrap();
        let tr = f.tr_jet(t, r, 2).unwrap();
        for c in 0..2 {
            let j = &tr[c];
            let terms = [j.derivative(2, 0), j.derivative(0, 2), (d as f64 - 1.0) / r * j.derivative(0, 1)];
            let radial = -terms[0] + terms[1] + terms[2];
            let scale = terms.iter().map(|x| x.abs()).sum::<f64>().max(1e-300);
            let got = ty_dalembertian(&ty[c], r * r, d);
            assert!((got - radial).abs() <= 1e-10 * scale, "c={c} t={t} r={r}: {got} vs {radial}");
        }
    }
}

#[test]
fn inversion_round_trip_at_random_points() {
    let pm = patch();
    let lookup = Lookup::new(pm).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rect = &pm.rect;
    for _ in 0..100 {
        let tau = rng.gen_range(rect.tau.0..rect.tau.1);
        let rho2 = rng.gen_range(rect.rho2.0..rect.rho2.1);
        let target = pm.eval_u(&PatchPoint::at(tau, rho2), 0).unwrap().value();
        let inv = invert_u(pm, &lookup, &target).unwrap();
        assert!(inv.iterations <= 50 && inv.residual <= 1e-10);
        let err = (inv.anchor.tau - tau).abs() / rect.tau.1 + (inv.anchor.rho2 - rho2).abs() / rect.rho2.1;
        assert!(err <= 1e-8, "({tau}, {rho2}): {err:e}");

        // renormalized offsets at a fixed anchor, in units of t̃ and ỹ
        let (a, b) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let p = PatchPoint::at(tau, rho2);
        let u0 = pm.eval_u(&p, 0).unwrap();
        let u1 = pm.eval_u(&p.offset(a, b), 0).unwrap();
        let w = [u1.delta[0].value() - u0.delta[0].value(), u1.delta[1].value() - u0.delta[1].value()];
        let (ra, rb, _) = invert_local(pm, p.anchor, w).unwrap();
        assert!((ra - a).abs() + (rb - b).abs() <= 1e-8, "({a}, {b}) -> ({ra}, {rb})");
    }
}

#[test]
fn center_maps_back_to_center() {
    let pm = patch();
    let lookup = Lookup::new(pm).unwrap();
    let (tau, rho2) = (0.5 * (pm.rect.tau.0 + pm.rect.tau.1), 0.5 * (pm.rect.rho2.0 + pm.rect.rho2.1));
    let target = pm.eval_u(&PatchPoint::at(tau, rho2), 0).unwrap().value();
    let inv = invert_u(pm, &lookup, &target).unwrap();
    assert!((inv.anchor.tau - tau).abs() <= 1e-10 * tau);
    assert!((inv.anchor.rho2 - rho2).abs() <= 1e-10 * rho2);
}

/// Preimage displacement ≈ J⁻¹ · target displacement, error quadratic.
#[test]
fn perturbation_is_linear_to_second_order() {
    let pm = patch();
    let p = PatchPoint::at(1.5 * pm.delta, (1.2 * pm.delta).powi(2));
    let u = pm.eval_u(&p, 1).unwrap();
    let j = u.jacobian();
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let lin = |w: [f64; 2]| [(j[1][1] * w[0] - j[0][1] * w[1]) / det, (j[0][0] * w[1] - j[1][0] * w[0]) / det];
    let err = |h: f64| {
        let w = [0.3 * h * j[0][0].abs(), -0.2 * h * j[1][1].abs()];
        let (a, b, _) = invert_local(pm, p.anchor, w).unwrap();
        let l = lin(w);
        (a - l[0]).abs() + (b - l[1]).abs()
    };
    let (e1, e2) = (err(0.1), err(0.05));
    assert!(e1 > 0.0);
    let ratio = e1 / e2;
    assert!((3.0..5.0).contains(&ratio), "halving ratio {ratio}");
}

#[test]
fn forcing_vanishes_off_the_cone() {
    let pm = patch();
    // the scale-i term lives on the strip τ = ρ; grid anchors miss it
    let p = PatchPoint::at(1.5 * pm.delta, (2.5 * pm.delta).powi(2));
    assert!(pm.eval_f(&p, 2).unwrap().is_zero());
    let on = PatchPoint::at(1.5 * pm.delta, (1.5 * pm.delta).powi(2));
    assert!(pm.strip_hit(&on));
}
