use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use polya_mst_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(polya_last_error()) }
        .to_str()
        .unwrap()
        .to_string()
}

fn take(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { polya_string_free(s) };
    out
}

fn model(kind: &str, m: u32) -> *mut PolyaModel {
    let kind = CString::new(kind).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { polya_model_new(kind.as_ptr(), m, &mut out) },
        PolyaStatus::Ok
    );
    out
}

#[test]
fn ternary_protected_law_is_exact() {
    let m = model("protected", 3);
    assert_eq!(unsafe { polya_model_types(m) }, 19);
    let mut law = ptr::null_mut();
    assert_eq!(unsafe { polya_law_new(m, &mut law) }, PolyaStatus::Ok);
    let name = CString::new("protected").unwrap();
    let (mut mean, mut var) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(
        unsafe { polya_law_functional_exact(law, name.as_ptr(), &mut mean, &mut var) },
        PolyaStatus::Ok
    );
    assert_eq!(take(mean), "57/700");
    assert_eq!(take(var), "1692302314867/43692253605000");

    let (mut mf, mut vf) = (0.0, 0.0);
    assert_eq!(
        unsafe { polya_law_functional(law, name.as_ptr(), &mut mf, &mut vf) },
        PolyaStatus::Ok
    );
    assert_eq!(mf, 57.0 / 700.0);
    assert!((vf - 1692302314867.0 / 43692253605000.0).abs() < 1e-15);
    unsafe {
        polya_law_free(law);
        polya_model_free(m);
    }
}

#[test]
fn leaves_gap_urn() {
    let m = model("leaves", 3);
    let mut law = ptr::null_mut();
    assert_eq!(unsafe { polya_law_new(m, &mut law) }, PolyaStatus::Ok);
    let name = CString::new("leaves").unwrap();
    let (mut mean, mut var) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(
        unsafe { polya_law_functional_exact(law, name.as_ptr(), &mut mean, &mut var) },
        PolyaStatus::Ok
    );
    assert_eq!(
        (take(mean), take(var)),
        ("3/10".to_string(), "89/2100".to_string())
    );
    unsafe {
        polya_law_free(law);
        polya_model_free(m);
    }
}

#[test]
fn error_codes() {
    let mut out = ptr::null_mut();
    let bad = CString::new("bogus").unwrap();
    assert_eq!(
        unsafe { polya_model_new(bad.as_ptr(), 3, &mut out) },
        PolyaStatus::InvalidArgument
    );
    assert!(out.is_null());
    assert!(!last_error().is_empty());

    let p = CString::new("protected").unwrap();
    assert_eq!(
        unsafe { polya_model_new(p.as_ptr(), 1, &mut out) },
        PolyaStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { polya_model_new(p.as_ptr(), 9, &mut out) },
        PolyaStatus::Size
    );
    assert_eq!(
        unsafe { polya_model_new(ptr::null(), 3, &mut out) },
        PolyaStatus::NullPointer
    );
    assert_eq!(
        unsafe { polya_model_new(p.as_ptr(), 3, ptr::null_mut()) },
        PolyaStatus::NullPointer
    );

    let nodes = model("nodes", 27);
    let mut law = ptr::null_mut();
    assert_eq!(
        unsafe { polya_law_new(nodes, &mut law) },
        PolyaStatus::NotNormal
    );
    assert!(law.is_null());
    assert!(last_error().contains("not-normal"), "{}", last_error());
    unsafe { polya_model_free(nodes) };

    let m = model("protected", 2);
    assert_eq!(unsafe { polya_law_new(m, &mut law) }, PolyaStatus::Ok);
    let (mut a, mut b) = (0.0, 0.0);
    assert_eq!(
        unsafe { polya_law_functional(law, bad.as_ptr(), &mut a, &mut b) },
        PolyaStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { polya_law_functional(law, p.as_ptr(), &mut a, &mut b) },
        PolyaStatus::Ok
    );
    assert!(last_error().is_empty());
    unsafe {
        polya_law_free(law);
        polya_model_free(m);
        polya_model_free(ptr::null_mut());
        polya_law_free(ptr::null_mut());
        polya_string_free(ptr::null_mut());
    }
}

#[test]
fn simulate_is_seeded() {
    let stat = CString::new("two_protected").unwrap();
    let run = |seed| {
        let (mut mean, mut var) = (0.0, 0.0);
        assert_eq!(
            unsafe { polya_simulate(2, 500, 50, seed, stat.as_ptr(), &mut mean, &mut var) },
            PolyaStatus::Ok
        );
        (mean, var)
    };
    let a = run(7);
    assert_eq!(a, run(7));
    assert_ne!(a, run(8));
    assert!((a.0 / 500.0 - 11.0 / 30.0).abs() < 0.02);

    let (mut mean, mut var) = (0.0, 0.0);
    assert_eq!(
        unsafe { polya_simulate(2, 10, 0, 1, stat.as_ptr(), &mut mean, &mut var) },
        PolyaStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { polya_simulate(2, 1_000_000_000, 1, 1, stat.as_ptr(), &mut mean, &mut var) },
        PolyaStatus::Size
    );
}

#[test]
fn ledger_through_abi() {
    let (mut passed, mut total) = (0, 0);
    assert_eq!(
        unsafe { polya_verify(&mut passed, &mut total) },
        PolyaStatus::Ok
    );
    assert_eq!(passed, total);
    assert!(total > 30);
}

#[test]
fn header_declares_the_abi() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/polya_mst.h");
    let text = std::fs::read_to_string(header).unwrap();
    for f in [
        "polya_last_error",
        "polya_model_new",
        "polya_model_types",
        "polya_model_free",
        "polya_law_new",
        "polya_law_free",
        "polya_law_functional",
        "polya_law_functional_exact",
        "polya_string_free",
        "polya_simulate",
        "polya_verify",
        "POLYA_STATUS_NOT_NORMAL = 5",
    ] {
        assert!(text.contains(f), "header lacks {f}");
    }
    // Compile a translation unit against it when a C compiler is present.
    let dir = std::env::temp_dir().join("polya_mst_header_check");
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("use.c");
    std::fs::write(
        &src,
        "#include \"polya_mst.h\"\nint main(void) { PolyaModel *m = 0; return polya_model_new(\"leaves\", 3, &m) == POLYA_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let inc = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    match Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", inc])
        .arg(&src)
        .status()
    {
        Ok(s) => assert!(s.success(), "header does not compile as C99"),
        Err(_) => eprintln!("no C compiler; skipped compile check"),
    }
}
