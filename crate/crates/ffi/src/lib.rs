//! C ABI over `itu-core`.
//!
//! Objects are opaque handles created by `*_parse` or by operations and
//! released with the matching `*_free`. Every fallible function returns an
//! [`ItuStatus`]; on failure the message is available from
//! [`itu_last_error_message`] on the same thread. Strings returned to the
//! caller are owned by the caller and released with [`itu_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use itu_core::constraints::{verify, ConstraintSet, Substitution};
use itu_core::rank1::{solve_rank1, SetBudget};
use itu_core::reduction::{build_constraints, compile_strategy, CompileLimits, Variant};
use itu_core::tiling::{solve_spiral_game, TilingSystem};
use itu_core::types::{organize, parse_type, Type};
use itu_core::{subtype, type_equal};

/// Result of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItuStatus {
    /// Success, or an affirmative answer.
    Ok = 0,
    /// A negative answer (not a subtype, unsatisfied, no strategy, no
    /// solution found).
    No = 1,
    /// Malformed input text.
    ParseError = 2,
    /// A null pointer, invalid UTF-8 or an out-of-range argument.
    InvalidArgument = 3,
    /// The operation was refused or failed on well-formed input.
    Failed = 4,
    /// A Rust panic was caught at the boundary.
    Panic = 5,
}

/// Constraint system variant for the tiling reduction.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItuVariant {
    /// Uses `omega` wildcards.
    Standard = 0,
    /// Uses no `omega`.
    OmegaFree = 1,
}

impl From<ItuVariant> for Variant {
    fn from(v: ItuVariant) -> Self {
        match v {
            ItuVariant::Standard => Variant::Standard,
            ItuVariant::OmegaFree => Variant::OmegaFree,
        }
    }
}

/// An intersection type.
pub struct ItuType(Type);
/// A list of `<=` / `==` constraints.
pub struct ItuConstraints(ConstraintSet);
/// A substitution of types for variables.
pub struct ItuSubstitution(Substitution);
/// A spiral tiling system.
pub struct ItuTiling(TilingSystem);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(ItuStatus, String);

fn fail<T>(status: ItuStatus, message: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, message.into()))
}

fn guard(f: impl FnOnce() -> Result<ItuStatus, Failure>) -> ItuStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("panic inside itu");
            ItuStatus::Panic
        }
    }
}

fn answer(b: bool) -> ItuStatus {
    if b {
        ItuStatus::Ok
    } else {
        ItuStatus::No
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return fail(ItuStatus::InvalidArgument, "null string");
    }
    match CStr::from_ptr(p).to_str() {
        Ok(s) => Ok(s),
        Err(_) => fail(ItuStatus::InvalidArgument, "string is not UTF-8"),
    }
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref()
        .map_or_else(|| fail(ItuStatus::InvalidArgument, "null handle"), Ok)
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<ItuStatus, Failure> {
    if out.is_null() {
        return fail(ItuStatus::InvalidArgument, "null output pointer");
    }
    *out = Box::into_raw(Box::new(value));
    Ok(ItuStatus::Ok)
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn itu_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn itu_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Releases a type. Null is ignored.
///
/// # Safety
/// The handle must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn itu_type_free(h: *mut ItuType) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Text form of a type, or null for a null handle.
///
/// # Safety
/// The handle must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn itu_type_to_string(h: *const ItuType) -> *mut c_char {
    h.as_ref()
        .map_or(ptr::null_mut(), |v| to_c_string(v.0.to_string()))
}

/// Releases a constraint set. Null is ignored.
///
/// # Safety
/// The handle must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn itu_constraints_free(h: *mut ItuConstraints) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Text form of a constraint set, or null for a null handle.
///
/// # Safety
/// The handle must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn itu_constraints_to_string(h: *const ItuConstraints) -> *mut c_char {
    h.as_ref()
        .map_or(ptr::null_mut(), |v| to_c_string(v.0.to_string()))
}

/// Releases a substitution. Null is ignored.
///
/// # Safety
/// The handle must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn itu_substitution_free(h: *mut ItuSubstitution) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Text form of a substitution, or null for a null handle.
///
/// # Safety
/// The handle must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn itu_substitution_to_string(h: *const ItuSubstitution) -> *mut c_char {
    h.as_ref()
        .map_or(ptr::null_mut(), |v| to_c_string(v.0.to_string()))
}

/// Releases a tiling system. Null is ignored.
///
/// # Safety
/// The handle must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn itu_tiling_free(h: *mut ItuTiling) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Text form of a tiling system, or null for a null handle.
///
/// # Safety
/// The handle must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn itu_tiling_to_string(h: *const ItuTiling) -> *mut c_char {
    h.as_ref()
        .map_or(ptr::null_mut(), |v| to_c_string(v.0.to_string()))
}

/// Parses a type such as `(a -> b) & 'x`.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn itu_type_parse(src: *const c_char, out: *mut *mut ItuType) -> ItuStatus {
    guard(|| match parse_type(text(src)?) {
        Ok(t) => store(out, ItuType(t)),
        Err(e) => fail(ItuStatus::ParseError, e.to_string()),
    })
}

/// `Ok` when `lhs <= rhs`, `No` otherwise.
///
/// # Safety
/// Both handles must be valid.
#[no_mangle]
pub unsafe extern "C" fn itu_subtype(lhs: *const ItuType, rhs: *const ItuType) -> ItuStatus {
    guard(|| Ok(answer(subtype(&handle(lhs)?.0, &handle(rhs)?.0))))
}

/// `Ok` when the types are equal, `No` otherwise.
///
/// # Safety
/// Both handles must be valid.
#[no_mangle]
pub unsafe extern "C" fn itu_type_equal(lhs: *const ItuType, rhs: *const ItuType) -> ItuStatus {
    guard(|| Ok(answer(type_equal(&handle(lhs)?.0, &handle(rhs)?.0))))
}

/// Stores the organized form of `t` in `out`.
///
/// # Safety
/// `t` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn itu_type_organize(t: *const ItuType, out: *mut *mut ItuType) -> ItuStatus {
    guard(|| store(out, ItuType(organize(&handle(t)?.0))))
}

/// Parses constraint lines `TYPE <= TYPE` / `TYPE == TYPE`.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn itu_constraints_parse(
    src: *const c_char,
    out: *mut *mut ItuConstraints,
) -> ItuStatus {
    guard(|| match ConstraintSet::parse(text(src)?) {
        Ok(cs) => store(out, ItuConstraints(cs)),
        Err(e) => fail(ItuStatus::ParseError, e.to_string()),
    })
}

/// Parses substitution lines `'name := TYPE`.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn itu_substitution_parse(
    src: *const c_char,
    out: *mut *mut ItuSubstitution,
) -> ItuStatus {
    guard(|| match Substitution::parse(text(src)?) {
        Ok(s) => store(out, ItuSubstitution(s)),
        Err(e) => fail(ItuStatus::ParseError, e.to_string()),
    })
}

/// `Ok` when `s` satisfies every constraint, `No` otherwise.
///
/// # Safety
/// Both handles must be valid.
#[no_mangle]
pub unsafe extern "C" fn itu_verify(
    cs: *const ItuConstraints,
    s: *const ItuSubstitution,
) -> ItuStatus {
    guard(|| Ok(answer(verify(&handle(s)?.0, &handle(cs)?.0))))
}

/// Searches for a rank 1 solution within the budget. Stores it and returns
/// `Ok`, or returns `No` when none is found.
///
/// # Safety
/// `cs` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn itu_rank1_solve(
    cs: *const ItuConstraints,
    max_card: usize,
    max_depth: usize,
    out: *mut *mut ItuSubstitution,
) -> ItuStatus {
    guard(|| {
        let budget = SetBudget {
            max_card,
            max_depth,
            ..SetBudget::default()
        };
        match solve_rank1(&handle(cs)?.0, budget) {
            Some(s) => store(out, ItuSubstitution(s)),
            None => Ok(ItuStatus::No),
        }
    })
}

/// Parses a tiling system (`tiles:`, `h:`, `v:`, `bottom:`, `top:` lines).
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn itu_tiling_parse(
    src: *const c_char,
    out: *mut *mut ItuTiling,
) -> ItuStatus {
    guard(|| match TilingSystem::parse(text(src)?) {
        Ok(t) => store(out, ItuTiling(t)),
        Err(e) => fail(ItuStatus::ParseError, e.to_string()),
    })
}

/// Solves the spiral game. `horizon` 0 selects the default bound. On `Ok`,
/// `added` (if not null) receives the worst-case number of added tiles.
///
/// # Safety
/// `t` must be valid; `added` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn itu_tiling_solve(
    t: *const ItuTiling,
    horizon: usize,
    added: *mut usize,
) -> ItuStatus {
    guard(|| {
        let limit = (horizon > 0).then_some(horizon);
        match solve_spiral_game(&handle(t)?.0, limit) {
            Some(sol) => {
                if !added.is_null() {
                    *added = sol.worst_case_added;
                }
                Ok(ItuStatus::Ok)
            }
            None => Ok(ItuStatus::No),
        }
    })
}

/// Builds the constraint system of a tiling system.
///
/// # Safety
/// `t` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn itu_tiling_reduce(
    t: *const ItuTiling,
    variant: ItuVariant,
    out: *mut *mut ItuConstraints,
) -> ItuStatus {
    guard(|| match build_constraints(&handle(t)?.0, variant.into()) {
        Ok(cs) => store(out, ItuConstraints(cs)),
        Err(e) => fail(ItuStatus::Failed, e.to_string()),
    })
}

/// Solves the game and compiles the strategy into a solution of the
/// constraint system. `max_length` 0 keeps the default size limits.
/// Returns `No` when Constructor has no winning strategy.
///
/// # Safety
/// `t` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn itu_tiling_compile(
    t: *const ItuTiling,
    variant: ItuVariant,
    max_length: usize,
    out: *mut *mut ItuSubstitution,
) -> ItuStatus {
    guard(|| {
        let sys = &handle(t)?.0;
        let Some(sol) = solve_spiral_game(sys, None) else {
            return Ok(ItuStatus::No);
        };
        let limits = if max_length == 0 {
            CompileLimits::default()
        } else {
            CompileLimits {
                max_tiles: usize::MAX,
                max_length,
            }
        };
        match compile_strategy(sys, &sol.strategy, variant.into(), &limits) {
            Ok(s) => store(out, ItuSubstitution(s)),
            Err(e) => fail(ItuStatus::Failed, e.to_string()),
        }
    })
}
