use std::ffi::{CStr, CString};
use std::ptr;

use szego_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(szego_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn zeros_roundtrip() {
    let fam = CString::new("exp").unwrap();
    let mut set = ptr::null_mut();
    let st = unsafe { szego_zeros_compute(fam.as_ptr(), 7, 0, &mut set) };
    assert_eq!(st, SzegoStatus::Ok, "{}", last_error());
    assert_eq!(unsafe { szego_zeros_len(set) }, 7);
    let (mut re, mut im) = (0.0, 0.0);
    let mut sum = (0.0, 0.0);
    for k in 0..7 {
        assert_eq!(
            unsafe { szego_zeros_get(set, k, &mut re, &mut im) },
            SzegoStatus::Ok
        );
        sum.0 += re;
        sum.1 += im;
    }
    // normalized zeros of s_7(7z): sum of roots = -a_6/a_7 / 7 = -1
    assert!(
        (sum.0 + 1.0).abs() < 1e-12 && sum.1.abs() < 1e-12,
        "{sum:?}"
    );
    assert_eq!(
        unsafe { szego_zeros_get(set, 7, &mut re, &mut im) },
        SzegoStatus::InvalidArgument
    );
    assert!(last_error().contains("out of range"));

    let csv = unsafe { szego_zeros_to_csv(set) };
    assert!(!csv.is_null());
    let text = unsafe { CStr::from_ptr(csv) }.to_str().unwrap().to_owned();
    assert!(text.starts_with("family,n,k,re,im,residual"));
    assert_eq!(text.lines().count(), 8);
    unsafe {
        szego_string_free(csv);
        szego_zeros_free(set);
    }
}

#[test]
fn origin_zeros_first() {
    let fam = CString::new("divergent").unwrap();
    let mut set = ptr::null_mut();
    let st = unsafe { szego_zeros_compute(fam.as_ptr(), 6, 0, &mut set) };
    assert_eq!(st, SzegoStatus::Ok, "{}", last_error());
    assert_eq!(unsafe { szego_zeros_len(set) }, 6);
    unsafe { szego_zeros_free(set) };
}

#[test]
fn bad_arguments() {
    let mut set = ptr::null_mut();
    let st = unsafe { szego_zeros_compute(ptr::null(), 5, 0, &mut set) };
    assert_eq!(st, SzegoStatus::InvalidArgument);
    assert!(set.is_null());
    let fam = CString::new("no_such_family").unwrap();
    let st = unsafe { szego_zeros_compute(fam.as_ptr(), 5, 0, &mut set) };
    assert_eq!(st, SzegoStatus::Config);
    assert!(!last_error().is_empty());
    let fam = CString::new("exp").unwrap();
    assert_eq!(
        unsafe { szego_zeros_compute(fam.as_ptr(), 5, 0, ptr::null_mut()) },
        SzegoStatus::InvalidArgument
    );
    assert_eq!(unsafe { szego_zeros_len(ptr::null()) }, 0);
    assert!(unsafe { szego_zeros_to_csv(ptr::null()) }.is_null());
    unsafe {
        szego_zeros_free(ptr::null_mut());
        szego_curve_free(ptr::null_mut());
        szego_string_free(ptr::null_mut());
    }
}

#[test]
fn curve_sample() {
    let kind = CString::new("exp_szego").unwrap();
    let mut c = ptr::null_mut();
    let st = unsafe { szego_curve_sample(kind.as_ptr(), ptr::null(), 200, &mut c) };
    assert_eq!(st, SzegoStatus::Ok, "{}", last_error());
    let len = unsafe { szego_curve_len(c) };
    assert!(len >= 100);
    let (mut re, mut im) = (0.0, 0.0);
    for k in 0..len {
        assert_eq!(
            unsafe { szego_curve_get(c, k, &mut re, &mut im) },
            SzegoStatus::Ok
        );
        let z = num_complex_abs(re, im);
        // |z e^(1-z)| = 1 on the curve
        assert!((z * (1.0 - re).exp() - 1.0).abs() < 1e-9, "{re} {im}");
    }
    let csv = unsafe { szego_curve_to_csv(c) };
    assert!(unsafe { CStr::from_ptr(csv) }
        .to_str()
        .unwrap()
        .starts_with("theta,re,im"));
    unsafe {
        szego_string_free(csv);
        szego_curve_free(c);
    }

    let kind = CString::new("dab").unwrap();
    let params = CString::new(r#"{"a": "2", "b": "1"}"#).unwrap();
    let st = unsafe { szego_curve_sample(kind.as_ptr(), params.as_ptr(), 64, &mut c) };
    assert_eq!(st, SzegoStatus::Ok, "{}", last_error());
    unsafe { szego_curve_free(c) };

    let bad = CString::new("{not json").unwrap();
    let st = unsafe { szego_curve_sample(kind.as_ptr(), bad.as_ptr(), 64, &mut c) };
    assert_eq!(st, SzegoStatus::Config);
    assert!(c.is_null());
}

fn num_complex_abs(re: f64, im: f64) -> f64 {
    re.hypot(im)
}

#[test]
fn verify_suites() {
    let suite = CString::new("counts").unwrap();
    let params = CString::new(r#"{"family": "exp", "n": "10", "radius": 0.5}"#).unwrap();
    let mut report = ptr::null_mut();
    let st = unsafe { szego_verify(suite.as_ptr(), params.as_ptr(), &mut report) };
    assert_eq!(st, SzegoStatus::Ok, "{}", last_error());
    let json: serde_json::Value =
        serde_json::from_str(unsafe { CStr::from_ptr(report) }.to_str().unwrap()).unwrap();
    assert_eq!(json["check"], "counts");
    assert_eq!(json["pass"], true);
    unsafe { szego_string_free(report) };

    let suite = CString::new("nope").unwrap();
    let st = unsafe { szego_verify(suite.as_ptr(), ptr::null(), &mut report) };
    assert_eq!(st, SzegoStatus::Config);
    assert!(report.is_null());
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(szego_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_everything() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/szego_lab.h"))
            .unwrap();
    for name in [
        "szego_last_error",
        "szego_version",
        "szego_zeros_compute",
        "szego_zeros_len",
        "szego_zeros_get",
        "szego_zeros_to_csv",
        "szego_zeros_free",
        "szego_curve_sample",
        "szego_curve_len",
        "szego_curve_get",
        "szego_curve_to_csv",
        "szego_curve_free",
        "szego_verify",
        "szego_string_free",
        "SZEGO_STATUS_VERIFICATION_FAILED",
        "typedef struct SzegoZeroSet SzegoZeroSet",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/szego_lab.h");
    let Ok(out) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", header])
        .output()
    else {
        return;
    };
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
