use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use qesf::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(qesf_last_error()) }.to_string_lossy().into_owned()
}

fn catalog_model(name: &str, params: Option<&str>, n: usize) -> *mut QesfModel {
    let name = CString::new(name).unwrap();
    let params = params.map(|p| CString::new(p).unwrap());
    let mut m = ptr::null_mut();
    let s = unsafe {
        qesf_model_from_catalog(
            name.as_ptr(),
            params.as_ref().map_or(ptr::null(), |p| p.as_ptr()),
            n,
            &mut m,
        )
    };
    assert_eq!(s, QesfStatus::Ok, "{}", last_error());
    m
}

#[test]
fn harmonic_round_trip() {
    let m = catalog_model("harmonic", Some(r#"{"b": 1.0}"#), 3);
    unsafe {
        let mut class = QesfClass::QesType1;
        assert_eq!(qesf_model_classify(m, &mut class), QesfStatus::Ok);
        assert_eq!(class, QesfClass::ExactlySolvable);

        let mut br = ptr::null_mut();
        assert_eq!(qesf_solve(m, 0, true, 7, &mut br), QesfStatus::Ok);
        assert_eq!(qesf_branches_count(br), 1);

        let mut e = 0.0;
        assert_eq!(qesf_branch_energy(br, 0, &mut e), QesfStatus::Ok);
        assert!((e - 7.0).abs() < 1e-10);

        let mut len = 0;
        assert_eq!(qesf_branch_roots(br, 0, ptr::null_mut(), 0, &mut len), QesfStatus::BufferTooSmall);
        assert_eq!(len, 3);
        let mut roots = [0.0; 3];
        assert_eq!(qesf_branch_roots(br, 0, roots.as_mut_ptr(), 3, &mut len), QesfStatus::Ok);
        assert!((roots[1]).abs() < 1e-12);
        assert!((roots[2] - 1.5f64.sqrt()).abs() < 1e-12);

        let mut v = QesfVerification {
            residual_max: 0.0,
            residual_rms: 0.0,
            node_count: 0,
            normalizable: false,
            pass: false,
        };
        assert_eq!(qesf_branch_verify(br, 0, 0, &mut v), QesfStatus::Ok);
        assert!(v.pass && v.normalizable);
        assert_eq!(v.node_count, 3);

        assert_eq!(qesf_branch_energy(br, 5, &mut e), QesfStatus::OutOfRange);
        assert!(last_error().contains("out of range"));

        qesf_branches_free(br);
        qesf_model_free(m);
    }
}

#[test]
fn json_models_and_errors() {
    unsafe {
        let mut m = ptr::null_mut();
        let good = CString::new(r#"{"Q": [0, 4], "P": [0, 0, 2], "N": 1}"#).unwrap();
        assert_eq!(qesf_model_from_json(good.as_ptr(), &mut m), QesfStatus::Ok);
        let mut n = 0;
        assert_eq!(qesf_model_n(m, &mut n), QesfStatus::Ok);
        assert_eq!(n, 1);
        let mut br = ptr::null_mut();
        assert_eq!(qesf_solve(m, 0, false, 0, &mut br), QesfStatus::Ok);
        assert_eq!(qesf_branches_count(br), 2);
        let (mut e0, mut e1) = (0.0, 0.0);
        qesf_branch_energy(br, 0, &mut e0);
        qesf_branch_energy(br, 1, &mut e1);
        assert!(e0 < e1);
        qesf_branches_free(br);
        qesf_model_free(m);

        let bad = CString::new(r#"{"Q": [1], "N": 1}"#).unwrap();
        let mut m = ptr::null_mut();
        assert_eq!(qesf_model_from_json(bad.as_ptr(), &mut m), QesfStatus::Parse);
        assert!(last_error().contains("\"P\""));
        assert!(m.is_null());

        assert_eq!(qesf_model_from_json(ptr::null(), &mut m), QesfStatus::NullPointer);

        let name = CString::new("nonsense").unwrap();
        assert_eq!(
            qesf_model_from_catalog(name.as_ptr(), ptr::null(), 1, &mut m),
            QesfStatus::UnknownEntry
        );
        let name = CString::new("sextic").unwrap();
        let p = CString::new(r#"{"a": -1}"#).unwrap();
        assert_eq!(
            qesf_model_from_catalog(name.as_ptr(), p.as_ptr(), 1, &mut m),
            QesfStatus::InvalidModel
        );

        qesf_model_free(ptr::null_mut());
        qesf_branches_free(ptr::null_mut());
        assert_eq!(qesf_branches_count(ptr::null()), 0);
    }
}

#[test]
fn errors_are_per_thread() {
    unsafe {
        let mut m = ptr::null_mut();
        qesf_model_from_json(ptr::null(), &mut m);
    }
    assert!(!last_error().is_empty());
    let other = std::thread::spawn(last_error).join().unwrap();
    assert!(other.is_empty());
}

#[test]
fn header_declares_the_api_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/qesf.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in [
        "qesf_last_error",
        "qesf_model_from_json",
        "qesf_model_from_catalog",
        "qesf_model_free",
        "qesf_model_classify",
        "qesf_solve",
        "qesf_branches_free",
        "qesf_branch_roots",
        "qesf_branch_verify",
        "typedef struct QesfModel QesfModel",
        "QESF_STATUS_OK = 0",
    ] {
        assert!(text.contains(f), "header lacks {f}");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-xc", "-std=c99", "-Wall", "-Werror"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler; skipping syntax check");
        return;
    };
    assert!(status.success());
}
