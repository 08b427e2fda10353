use std::ffi::{CStr, CString};
use std::ptr;

use itu_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn owned(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { itu_string_free(p) };
    s
}

fn parse_type(src: &str) -> *mut ItuType {
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { itu_type_parse(c(src).as_ptr(), &mut out) },
        ItuStatus::Ok
    );
    out
}

fn last_error() -> String {
    let p = itu_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

#[test]
fn subtype_and_organize() {
    let lhs = parse_type("a -> b & c");
    let rhs = parse_type("(a -> b) & (a -> c)");
    unsafe {
        assert_eq!(itu_subtype(lhs, rhs), ItuStatus::Ok);
        assert_eq!(itu_type_equal(lhs, rhs), ItuStatus::Ok);
        let mut org = ptr::null_mut();
        assert_eq!(itu_type_organize(lhs, &mut org), ItuStatus::Ok);
        assert_eq!(itu_type_equal(org, rhs), ItuStatus::Ok);
        assert_eq!(owned(itu_type_to_string(org)), "(a -> b) & (a -> c)");
        itu_type_free(org);
        let b = parse_type("b");
        assert_eq!(itu_subtype(b, lhs), ItuStatus::No);
        itu_type_free(b);
        itu_type_free(lhs);
        itu_type_free(rhs);
    }
}

#[test]
fn errors_are_reported() {
    let mut out = ptr::null_mut();
    let status = unsafe { itu_type_parse(c("a -> ").as_ptr(), &mut out) };
    assert_eq!(status, ItuStatus::ParseError);
    assert!(out.is_null());
    assert!(!last_error().is_empty());

    assert_eq!(
        unsafe { itu_type_parse(ptr::null(), &mut out) },
        ItuStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { itu_subtype(ptr::null(), ptr::null()) },
        ItuStatus::InvalidArgument
    );
    assert_eq!(last_error(), "null handle");

    let t = parse_type("a");
    assert!(itu_last_error_message().is_null());
    unsafe { itu_type_free(t) };
    unsafe { itu_type_free(ptr::null_mut()) };
    unsafe { itu_string_free(ptr::null_mut()) };
}

#[test]
fn verify_and_rank1() {
    let mut cs = ptr::null_mut();
    let mut good = ptr::null_mut();
    let mut bad = ptr::null_mut();
    unsafe {
        assert_eq!(
            itu_constraints_parse(c("'x <= 'x -> a").as_ptr(), &mut cs),
            ItuStatus::Ok
        );
        assert_eq!(
            itu_substitution_parse(c("'x := a & (a -> a)").as_ptr(), &mut good),
            ItuStatus::Ok
        );
        assert_eq!(
            itu_substitution_parse(c("'x := a").as_ptr(), &mut bad),
            ItuStatus::Ok
        );
        assert_eq!(itu_verify(cs, good), ItuStatus::Ok);
        assert_eq!(itu_verify(cs, bad), ItuStatus::No);

        let mut solved = ptr::null_mut();
        assert_eq!(itu_rank1_solve(cs, 3, 6, &mut solved), ItuStatus::Ok);
        assert_eq!(itu_verify(cs, solved), ItuStatus::Ok);
        assert!(owned(itu_substitution_to_string(solved)).contains("'x"));
        itu_substitution_free(solved);

        let mut unsat = ptr::null_mut();
        assert_eq!(
            itu_constraints_parse(c("a <= b").as_ptr(), &mut unsat),
            ItuStatus::Ok
        );
        let mut none = ptr::null_mut();
        assert_eq!(itu_rank1_solve(unsat, 3, 6, &mut none), ItuStatus::No);
        assert!(none.is_null());

        itu_constraints_free(unsat);
        itu_constraints_free(cs);
        itu_substitution_free(good);
        itu_substitution_free(bad);
    }
}

const SPIRAL: &str = "tiles: a b\nh: a a\nh: a b\nh: b a\nh: b b\nv: a a\nv: a b\nv: b b\nbottom: a a a\ntop: b b b\nn: 3\n";
const LOSING: &str = "tiles: a b\nh: a b\nh: b a\nh: b b\nv: a a\nv: a b\nv: b a\nv: b b\nbottom: a a a\ntop: b b b\nn: 3\n";

#[test]
fn tiling_pipeline() {
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(itu_tiling_parse(c(SPIRAL).as_ptr(), &mut t), ItuStatus::Ok);
        let mut added = 0usize;
        assert_eq!(itu_tiling_solve(t, 0, &mut added), ItuStatus::Ok);
        assert!(added > 0);

        for variant in [ItuVariant::Standard, ItuVariant::OmegaFree] {
            let mut cs = ptr::null_mut();
            assert_eq!(itu_tiling_reduce(t, variant, &mut cs), ItuStatus::Ok);
            let mut s = ptr::null_mut();
            assert_eq!(
                itu_tiling_compile(t, variant, 0, &mut s),
                ItuStatus::Ok,
                "{}",
                last_error()
            );
            assert_eq!(itu_verify(cs, s), ItuStatus::Ok);
            itu_substitution_free(s);
            itu_constraints_free(cs);
        }
        itu_tiling_free(t);

        let mut lose = ptr::null_mut();
        assert_eq!(
            itu_tiling_parse(c(LOSING).as_ptr(), &mut lose),
            ItuStatus::Ok
        );
        assert_eq!(itu_tiling_solve(lose, 0, ptr::null_mut()), ItuStatus::No);
        let mut s = ptr::null_mut();
        assert_eq!(
            itu_tiling_compile(lose, ItuVariant::Standard, 0, &mut s),
            ItuStatus::No
        );
        itu_tiling_free(lose);
    }
}
