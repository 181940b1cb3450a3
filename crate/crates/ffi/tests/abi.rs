use std::ffi::{c_char, CStr, CString};
use std::ptr;

use blowup_lab_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    unsafe {
        bl_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn field_handle_round_trip() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(bl_field_new(&mut f), BlStatus::Ok);
        let mut v = [0.0; 2];
        assert_eq!(bl_field_value(f, 0.0, 0.0, v.as_mut_ptr()), BlStatus::Ok);
        assert!((v[0].hypot(v[1]) - 768.0007).abs() < 1e-3, "{v:?}");
        let mut eps = 0.0;
        assert_eq!(bl_field_epsilon(f, &mut eps), BlStatus::Ok);
        assert!(eps > 0.0 && eps < 0.1);
        assert_eq!(bl_field_value(f, 0.0, -1.0, v.as_mut_ptr()), BlStatus::InvalidArgument);
        assert!(last_error().contains("r >= 0"));
        bl_field_free(f);
    }
}

#[test]
fn null_pointers_are_reported() {
    unsafe {
        assert_eq!(bl_field_new(ptr::null_mut()), BlStatus::NullPointer);
        assert_eq!(bl_field_value(ptr::null(), 0.0, 0.0, ptr::null_mut()), BlStatus::NullPointer);
        assert!(last_error().contains("null"));
        bl_field_free(ptr::null_mut());
        bl_blowup_free(ptr::null_mut());
    }
}

#[test]
fn blowup_amplitude_and_eval() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(bl_field_new(&mut f), BlStatus::Ok);
        let mut h = ptr::null_mut();
        assert_eq!(bl_blowup_new(f, 0.0, 1024.0, 6, &mut h), BlStatus::Config);
        assert_eq!(bl_blowup_new(f, 1.0 / 64.0, 1024.0, 6, &mut h), BlStatus::Ok);
        // the handle holds its own reference to the field
        bl_field_free(f);
        let mut ratios = [0.0; 2];
        assert_eq!(bl_blowup_amplitude(h, 2, ratios.as_mut_ptr()), BlStatus::Ok);
        for r in ratios {
            assert!(r > 384.0 && r < 1536.0, "{r}");
        }
        // t = δ/N₁ = 2^-6 · 1024^(-5/2), y = 0
        let t = BlScaled { mantissa: 1.0 / 64.0, q_num: -5, q_den: 2, log10: 0.0 };
        let y = BlScaled { mantissa: 0.0, q_num: 0, q_den: 1, log10: 0.0 };
        let mut u = [BlScaled::default(); 2];
        assert_eq!(bl_blowup_eval(h, &t, &y, u.as_mut_ptr()), BlStatus::Ok);
        let log10_n1 = 2.5 * 1024f64.log10();
        assert!((u[0].log10 - 1.5 * log10_n1 - ratios[0].log10()).abs() < 0.05, "{u:?}");
        let bad = BlScaled { q_den: 0, ..t };
        assert_eq!(bl_blowup_eval(h, &bad, &y, u.as_mut_ptr()), BlStatus::InvalidArgument);
        bl_blowup_free(h);
    }
}

#[test]
fn exponent_entry_points() {
    unsafe {
        let mut l = BlExponentLedger::default();
        assert_eq!(bl_ansatz_feasibility(11, &mut l), BlStatus::Ok);
        assert_eq!((l.alpha_num, l.alpha_den, l.step_num, l.step_den), (3, 2, 5, 2));
        assert_eq!((l.discriminant_num, l.discriminant_den, l.feasible), (1, 4, true));
        assert_eq!(bl_ansatz_feasibility(1, &mut l), BlStatus::Config);
        let mut c = 0.0;
        assert_eq!(bl_c_of_p(10, 4.0, false, &mut c), BlStatus::Ok);
        assert_eq!(c, -2.0);
        assert_eq!(bl_c_of_p(10, 4.0, true, &mut c), BlStatus::Ok);
        assert_eq!(c, -1.0);
        assert_eq!(bl_c_of_p(12, 4.0, false, &mut c), BlStatus::Config);
    }
}

#[test]
fn run_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    let cmd = CString::new("numerology").unwrap();
    let mut pass = false;
    unsafe {
        assert_eq!(bl_run(cmd.as_ptr(), ptr::null(), out.as_ptr(), &mut pass), BlStatus::Ok);
        assert!(pass);
        let bogus = CString::new("nope").unwrap();
        assert_eq!(bl_run(bogus.as_ptr(), ptr::null(), out.as_ptr(), &mut pass), BlStatus::InvalidArgument);
        let v = CStr::from_ptr(bl_version()).to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn header_declares_every_entry_point() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/blowup_lab.h")).unwrap();
    for f in [
        "bl_last_error",
        "bl_version",
        "bl_field_new",
        "bl_field_free",
        "bl_field_value",
        "bl_field_epsilon",
        "bl_blowup_new",
        "bl_blowup_free",
        "bl_blowup_eval",
        "bl_blowup_amplitude",
        "bl_ansatz_feasibility",
        "bl_c_of_p",
        "bl_run",
    ] {
        assert!(h.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(h.contains("typedef struct BlField BlField;"));
    assert!(h.contains("BL_STATUS_PANIC = 8"));
}

#[test]
fn header_compiles_as_c99() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/blowup_lab.h");
    let Ok(status) = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c", header])
        .status()
    else {
        eprintln!("no C compiler on PATH; skipped");
        return;
    };
    assert!(status.success());
}
