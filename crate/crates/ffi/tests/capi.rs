use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use qdesign_ffi::*;

fn last_error() -> String {
    let p = qd_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { qd_string_free(p) };
    s
}

#[test]
fn qbinom_values_and_errors() {
    let mut v = 0u64;
    assert_eq!(unsafe { qd_qbinom_u64(6, 3, 2, &mut v) }, QdStatus::Ok);
    assert_eq!(v, 1395);
    assert_eq!(unsafe { qd_qbinom_u64(40, 20, 32, &mut v) }, QdStatus::Overflow);
    assert!(last_error().contains("64 bits"));
    assert_eq!(unsafe { qd_qbinom_u64(4, 2, 2, ptr::null_mut()) }, QdStatus::NullPointer);

    let mut s = ptr::null_mut();
    assert_eq!(unsafe { qd_qbinom_string(40, 20, 32, &mut s) }, QdStatus::Ok);
    let big = take_string(s);
    assert_eq!(big, qdesign::qbinom(40, 20, 32).to_string());

    let ks = [3u32, 4];
    assert_eq!(unsafe { qd_lambda_max_u64(6, 2, ks.as_ptr(), 2, 2, &mut v) }, QdStatus::Ok);
    assert_eq!(v, 50);
    assert_eq!(unsafe { qd_lambda_max_u64(6, 2, ptr::null(), 2, 2, &mut v) }, QdStatus::NullPointer);
}

#[test]
fn field_handle() {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { qd_field_new(4, &mut f) }, QdStatus::Ok);
    let mut r = 0u32;
    assert_eq!(unsafe { qd_field_mul(f, 2, 2, &mut r) }, QdStatus::Ok);
    assert_eq!(r, 3);
    assert_eq!(unsafe { qd_field_inv(f, 2, &mut r) }, QdStatus::Ok);
    assert_eq!(r, 3);
    assert_eq!(unsafe { qd_field_add(f, 1, 3, &mut r) }, QdStatus::Ok);
    assert_eq!(r, 2);
    assert_eq!(unsafe { qd_field_inv(f, 0, &mut r) }, QdStatus::InvalidArgument);
    assert_eq!(unsafe { qd_field_mul(f, 4, 1, &mut r) }, QdStatus::InvalidArgument);
    assert_eq!(unsafe { qd_field_order(f) }, 4);
    unsafe { qd_field_free(f) };

    assert_eq!(unsafe { qd_field_new(6, &mut f) }, QdStatus::InvalidArgument);
    assert!(last_error().contains('6'));
}

#[test]
fn family_design_round_trip_and_verify() {
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { qd_design_family(2, 2, &mut d) }, QdStatus::Ok);
    assert_eq!(unsafe { qd_design_lambda(d) }, 15);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { qd_design_to_json(d, &mut json) }, QdStatus::Ok);
    let text = CString::new(take_string(json)).unwrap();
    unsafe { qd_design_free(d) };

    let mut d2 = ptr::null_mut();
    assert_eq!(unsafe { qd_design_from_json(text.as_ptr(), &mut d2) }, QdStatus::Ok);
    let (mut ok, mut lambda) = (false, 0u64);
    assert_eq!(unsafe { qd_design_verify(d2, 0, 1_000_000, &mut ok, &mut lambda) }, QdStatus::Ok);
    assert!(ok);
    assert_eq!(lambda, 15);
    unsafe { qd_design_free(d2) };

    let mut s = ptr::null_mut();
    assert_eq!(unsafe { qd_design_family(3, 1, &mut s) }, QdStatus::Ok);
    assert_eq!(unsafe { qd_design_verify(s, 0, 1_000_000, &mut ok, &mut lambda) }, QdStatus::Ok);
    assert!(ok);
    assert_eq!(lambda, 4);
    unsafe { qd_design_free(s) };

    let bad = CString::new("{\"params\": 3}").unwrap();
    assert_eq!(unsafe { qd_design_from_json(bad.as_ptr(), &mut d2) }, QdStatus::InvalidArgument);
}

#[test]
fn km_solve_pipeline() {
    let group = CString::new("singer").unwrap();
    let ks = [3u32, 4];
    let mut km = ptr::null_mut();
    assert_eq!(unsafe { qd_km_new(group.as_ptr(), 6, 2, 2, ks.as_ptr(), 2, 1_000_000, &mut km) }, QdStatus::Ok);
    let (rows, cols) = unsafe { (qd_km_rows(km), qd_km_cols(km)) };
    assert_eq!((rows, cols), (11, 34));
    for r in 0..rows {
        let mut sum = 0;
        for c in 0..cols {
            let mut e = 0u64;
            assert_eq!(unsafe { qd_km_entry(km, r, c, &mut e) }, QdStatus::Ok);
            sum += e;
        }
        assert_eq!(sum, 50);
    }
    let mut e = 0u64;
    assert_eq!(unsafe { qd_km_entry(km, rows, 0, &mut e) }, QdStatus::OutOfRange);

    let mut sols = ptr::null_mut();
    assert_eq!(unsafe { qd_km_solve(km, 15, 1, 0.0, &mut sols) }, QdStatus::Ok);
    assert_eq!(unsafe { qd_solutions_count(sols) }, 1);
    let mut len = 0usize;
    assert_eq!(unsafe { qd_solutions_columns(sols, 0, ptr::null_mut(), 0, &mut len) }, QdStatus::OutOfRange);
    let mut buf = vec![0usize; len];
    assert_eq!(unsafe { qd_solutions_columns(sols, 0, buf.as_mut_ptr(), len, &mut len) }, QdStatus::Ok);
    assert!(buf.windows(2).all(|w| w[0] < w[1]));

    let mut d = ptr::null_mut();
    assert_eq!(unsafe { qd_solutions_design(sols, 0, &mut d) }, QdStatus::Ok);
    let (mut ok, mut lambda) = (false, 0u64);
    assert_eq!(unsafe { qd_design_verify(d, 0, 1_000_000, &mut ok, &mut lambda) }, QdStatus::Ok);
    assert!(ok);
    assert_eq!(lambda, 15);
    unsafe { qd_design_free(d) };
    unsafe { qd_solutions_free(sols) };

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { qd_km_to_json(km, &mut json) }, QdStatus::Ok);
    assert!(take_string(json).contains("\"singer\""));
    unsafe { qd_km_free(km) };

    let mut small = ptr::null_mut();
    assert_eq!(unsafe { qd_km_new(group.as_ptr(), 6, 2, 2, ks.as_ptr(), 2, 10, &mut small) }, QdStatus::GuardExceeded);
}

#[test]
fn solver_timeout_keeps_partial_result() {
    let group = CString::new("trivial").unwrap();
    let ks = [2u32];
    let mut km = ptr::null_mut();
    assert_eq!(unsafe { qd_km_new(group.as_ptr(), 5, 2, 1, ks.as_ptr(), 1, 1_000_000, &mut km) }, QdStatus::Ok);
    let mut sols = ptr::null_mut();
    let status = unsafe { qd_km_solve(km, 7, usize::MAX, 1e-9, &mut sols) };
    assert_eq!(status, QdStatus::Timeout);
    assert!(!sols.is_null());
    assert!(!unsafe { qd_solutions_complete(sols) });
    unsafe { qd_solutions_free(sols) };
    unsafe { qd_km_free(km) };
}

/// Compiles a C program against the generated header and the static library.
#[test]
fn c_program_links_against_header() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    // target/<profile>/deps/<test-binary>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libqdesign_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let src = dir.join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "qdesign.h"
int main(void) {
    uint64_t v = 0;
    if (qd_qbinom_u64(6, 3, 2, &v) != QD_STATUS_OK || v != 1395) return 1;
    QdDesign *d = NULL;
    if (qd_design_family(1, 2, &d) != QD_STATUS_OK) return 2;
    bool ok = false; uint64_t lambda = 0;
    if (qd_design_verify(d, 0, 1000000, &ok, &lambda) != QD_STATUS_OK || !ok || lambda != 15) return 3;
    qd_design_free(d);
    if (qd_field_new(6, NULL) != QD_STATUS_NULL_POINTER) return 4;
    printf("ok\n");
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.join("smoke");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C smoke program exited with {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}
