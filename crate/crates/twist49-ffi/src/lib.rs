//! C ABI for the twist49 verification workbench.
//!
//! The expensive shared state (the a_n table behind the L-series, the
//! period lattice behind the modular parametrization) lives inside opaque
//! handles created and destroyed by the `_new`/`_free` pairs; everything
//! else is plain data written through out-pointers.  Every entry point
//! returns a `Twist49Status` code, catches panics at the boundary, and
//! treats null pointers as an error rather than undefined behaviour.
//!
//! The C header `include/twist49.h` is generated by cbindgen at build time.

use std::panic::{catch_unwind, AssertUnwindSafe};

use libc::c_char;

use twist49::classgroup::class_group;
use twist49::descent::{selmer2_report, Dim2};
use twist49::heegner::{heegner_trace, Parametrization, RingCharacter};
use twist49::lseries::{root_number, Evaluator, LSeriesError};
use twist49::tamagawa::{bsd_predicted_ord2, TamagawaError};
use twist49::waldspurger::{y_d, GrossSetup, WaldspurgerError};
use twist49::{factor_twist, kronecker};

/// Result codes of every API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Twist49Status {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// The label fails the domain preconditions (zero, not squarefree,
    /// divisible by 7, wrong residue class, out of range, ...).
    InvalidLabel = 2,
    /// A numerical pipeline could not resolve the value (snap instability,
    /// insufficient convergence, calibration failure).
    Numeric = 3,
    /// The instance is valid but outside the regime of the requested
    /// prediction.
    OutsideRegime = 4,
    /// An internal invariant failed; treat as a bug, not bad input.
    Internal = 5,
}

/// Opaque owner of the L-series evaluator state.
pub struct Twist49Evaluator {
    inner: Evaluator,
}

/// Opaque owner of the modular parametrization of X0(49).
pub struct Twist49Parametrization {
    inner: Parametrization,
}

/// One central L-value or derivative record.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct Twist49LValue {
    pub m: i64,
    pub conductor: i64,
    pub root_number: i32,
    pub l_numeric: f64,
    pub l_prime_numeric: f64,
    pub has_l_prime: u8,
    pub omega: f64,
    pub lalg_num: i64,
    pub lalg_den: i64,
    pub has_lalg: u8,
    pub ord2: i32,
    pub has_ord2: u8,
    pub terms_used: u64,
    pub error_bound: f64,
}

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");

/// Version of the library, as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn twist49_version() -> *const c_char {
    VERSION.as_ptr() as *const c_char
}

/// Static human-readable name of a status code.
#[no_mangle]
pub extern "C" fn twist49_status_name(status: Twist49Status) -> *const c_char {
    let name: &'static str = match status {
        Twist49Status::Ok => "ok\0",
        Twist49Status::NullArgument => "null argument\0",
        Twist49Status::InvalidLabel => "invalid label\0",
        Twist49Status::Numeric => "numerical failure\0",
        Twist49Status::OutsideRegime => "outside regime\0",
        Twist49Status::Internal => "internal error\0",
    };
    name.as_ptr() as *const c_char
}

fn lseries_status(err: &LSeriesError) -> Twist49Status {
    match err {
        LSeriesError::SnapUnstable { .. } | LSeriesError::Calibration { .. } => {
            Twist49Status::Numeric
        }
        _ => Twist49Status::InvalidLabel,
    }
}

fn waldspurger_status(err: &WaldspurgerError) -> Twist49Status {
    match err {
        WaldspurgerError::BadN(_) | WaldspurgerError::BadDivisor(_, _) => {
            Twist49Status::InvalidLabel
        }
        WaldspurgerError::LSeries(e) => lseries_status(e),
        _ => Twist49Status::Internal,
    }
}

// Panic fence: the C boundary must never unwind.
fn guarded(f: impl FnOnce() -> Twist49Status) -> Twist49Status {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(Twist49Status::Internal)
}

/// Creates an evaluator handle.  Never fails; free with
/// `twist49_evaluator_free`.
#[no_mangle]
pub extern "C" fn twist49_evaluator_new() -> *mut Twist49Evaluator {
    Box::into_raw(Box::new(Twist49Evaluator {
        inner: Evaluator::new(),
    }))
}

/// Releases an evaluator handle.  Null is a no-op.
#[no_mangle]
pub extern "C" fn twist49_evaluator_free(handle: *mut Twist49Evaluator) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Root number of the twist A^(M); returns 0 for invalid labels.
#[no_mangle]
pub extern "C" fn twist49_root_number(m: i64) -> i32 {
    if factor_twist(m).is_err() {
        return 0;
    }
    root_number(m)
}

fn write_record(record: &twist49::lseries::LValueRecord, out: &mut Twist49LValue) {
    *out = Twist49LValue {
        m: record.m,
        conductor: record.conductor,
        root_number: record.root_number,
        l_numeric: record.l_numeric,
        l_prime_numeric: record.l_prime_numeric.unwrap_or(0.0),
        has_l_prime: u8::from(record.l_prime_numeric.is_some()),
        omega: record.omega,
        lalg_num: record.lalg.map_or(0, |r| r.num),
        lalg_den: record.lalg.map_or(1, |r| r.den),
        has_lalg: u8::from(record.lalg.is_some()),
        ord2: record.ord2.unwrap_or(0),
        has_ord2: u8::from(record.ord2.is_some()),
        terms_used: record.terms_used as u64,
        error_bound: record.error_bound,
    };
}

/// Central value L(A^(M), 1) with the rational snap of L/Omega.
#[no_mangle]
pub extern "C" fn twist49_l_central(
    handle: *const Twist49Evaluator,
    m: i64,
    out: *mut Twist49LValue,
) -> Twist49Status {
    if handle.is_null() || out.is_null() {
        return Twist49Status::NullArgument;
    }
    guarded(|| {
        let ev = unsafe { &*handle };
        match ev.inner.l_central(m) {
            Ok(record) => {
                write_record(&record, unsafe { &mut *out });
                Twist49Status::Ok
            }
            Err(e) => lseries_status(&e),
        }
    })
}

/// Derivative L'(A^(M), 1) for twists of root number -1.
#[no_mangle]
pub extern "C" fn twist49_l_derivative(
    handle: *const Twist49Evaluator,
    m: i64,
    out: *mut Twist49LValue,
) -> Twist49Status {
    if handle.is_null() || out.is_null() {
        return Twist49Status::NullArgument;
    }
    guarded(|| {
        let ev = unsafe { &*handle };
        match ev.inner.l_derivative(m) {
            Ok(record) => {
                write_record(&record, unsafe { &mut *out });
                Twist49Status::Ok
            }
            Err(e) => lseries_status(&e),
        }
    })
}

/// Class group of the quadratic discriminant: order and 2/4/8-ranks.
#[no_mangle]
pub extern "C" fn twist49_class_group(
    disc: i64,
    out_h: *mut u64,
    out_h2: *mut u32,
    out_h4: *mut u32,
    out_h8: *mut u32,
) -> Twist49Status {
    if out_h.is_null() || out_h2.is_null() || out_h4.is_null() || out_h8.is_null() {
        return Twist49Status::NullArgument;
    }
    guarded(|| match class_group(disc) {
        Ok(data) => {
            unsafe {
                *out_h = data.h as u64;
                *out_h2 = data.h2;
                *out_h4 = data.h4;
                *out_h8 = data.h8;
            }
            Twist49Status::Ok
        }
        Err(_) => Twist49Status::InvalidLabel,
    })
}

/// Dimensions of the two isogeny Selmer groups of A^(M) and, when the
/// parity theorem pins it, of the 2-Selmer group (otherwise dim2 = -1).
#[no_mangle]
pub extern "C" fn twist49_selmer_dims(
    m: i64,
    out_phi_quotient: *mut u32,
    out_phihat: *mut u32,
    out_dim2: *mut i32,
) -> Twist49Status {
    if out_phi_quotient.is_null() || out_phihat.is_null() || out_dim2.is_null() {
        return Twist49Status::NullArgument;
    }
    guarded(|| {
        let ft = match factor_twist(m) {
            Ok(ft) => ft,
            Err(_) => return Twist49Status::InvalidLabel,
        };
        let report = selmer2_report(&ft);
        unsafe {
            *out_phi_quotient = report.dim_phi_quot;
            *out_phihat = report.dim_phihat;
            *out_dim2 = match report.dim2 {
                Dim2::Exact(k) => k as i32,
                Dim2::Interval(_, _) => -1,
            };
        }
        Twist49Status::Ok
    })
}

/// The BSD-predicted ord_2 of the algebraic central value, given an assumed
/// 2-adic valuation of Sha.  Only defined for M > 0, M = 1 mod 4, odd,
/// coprime to 7.
#[no_mangle]
pub extern "C" fn twist49_bsd_predicted_ord2(
    m: i64,
    sha2_ord: i64,
    out: *mut i64,
) -> Twist49Status {
    if out.is_null() {
        return Twist49Status::NullArgument;
    }
    guarded(|| {
        let ft = match factor_twist(m) {
            Ok(ft) => ft,
            Err(_) => return Twist49Status::InvalidLabel,
        };
        match bsd_predicted_ord2(&ft, sha2_ord) {
            Ok(v) => {
                unsafe { *out = v };
                Twist49Status::Ok
            }
            Err(TamagawaError::OutsideRegime(_)) => Twist49Status::OutsideRegime,
            Err(_) => Twist49Status::InvalidLabel,
        }
    })
}

/// The Gross-point character sum y_d for the field Q(sqrt(-7n)), with the
/// test vector matched to chi^(n).  Also reports delta (0 iff n is a QR
/// mod 7) and the class number of the field.
#[no_mangle]
pub extern "C" fn twist49_waldspurger_y(
    n: i64,
    d: i64,
    out_y: *mut i64,
    out_delta: *mut u8,
    out_class_number: *mut u64,
) -> Twist49Status {
    if out_y.is_null() || out_delta.is_null() || out_class_number.is_null() {
        return Twist49Status::NullArgument;
    }
    guarded(|| {
        let setup = match GrossSetup::new(n) {
            Ok(s) => s,
            Err(e) => return waldspurger_status(&e),
        };
        match y_d(&setup, d) {
            Ok(y) => {
                unsafe {
                    *out_y = y;
                    *out_delta = setup.delta;
                    *out_class_number = setup.class_number() as u64;
                }
                Twist49Status::Ok
            }
            Err(e) => waldspurger_status(&e),
        }
    })
}

/// Creates a parametrization handle for X0(49); returns null when the
/// period pipeline fails.  Free with `twist49_parametrization_free`.
#[no_mangle]
pub extern "C" fn twist49_parametrization_new() -> *mut Twist49Parametrization {
    catch_unwind(|| Parametrization::new().ok())
        .ok()
        .flatten()
        .map_or(std::ptr::null_mut(), |inner| {
            Box::into_raw(Box::new(Twist49Parametrization { inner }))
        })
}

/// Releases a parametrization handle.  Null is a no-op.
#[no_mangle]
pub extern "C" fn twist49_parametrization_free(handle: *mut Twist49Parametrization) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Character-weighted Heegner trace for Q(sqrt(-l0)) and conductor r*n.
/// `use_chi_r` selects the genus character attached to r instead of the
/// trivial one.  Writes whether the trace is non-torsion, whether it lies
/// in the minus eigenspace of conjugation mod torsion, and the orbit size.
#[no_mangle]
pub extern "C" fn twist49_heegner_trace(
    handle: *const Twist49Parametrization,
    l0: i64,
    r: i64,
    n: i64,
    use_chi_r: u8,
    out_nontorsion: *mut u8,
    out_minus_eigen: *mut u8,
    out_orbit_size: *mut u64,
) -> Twist49Status {
    if handle.is_null()
        || out_nontorsion.is_null()
        || out_minus_eigen.is_null()
        || out_orbit_size.is_null()
    {
        return Twist49Status::NullArgument;
    }
    guarded(|| {
        let param = unsafe { &*handle };
        let character = if use_chi_r != 0 {
            RingCharacter::ChiR
        } else {
            RingCharacter::Trivial
        };
        match heegner_trace(&param.inner, l0, r, n, character) {
            Ok(trace) => {
                unsafe {
                    *out_nontorsion = u8::from(!trace.torsion_flag);
                    *out_minus_eigen = u8::from(trace.minus_eigen_flag);
                    *out_orbit_size = trace.orbit_size as u64;
                }
                Twist49Status::Ok
            }
            Err(twist49::heegner::HeegnerError::BadLabel { .. })
            | Err(twist49::heegner::HeegnerError::BadField(_))
            | Err(twist49::heegner::HeegnerError::BadConductor(_)) => Twist49Status::InvalidLabel,
            Err(twist49::heegner::HeegnerError::Convergence { .. }) => Twist49Status::Numeric,
            Err(_) => Twist49Status::Internal,
        }
    })
}

/// Kronecker symbol, exposed for eligibility rechecks on the C side.
#[no_mangle]
pub extern "C" fn twist49_kronecker(a: i64, n: i64) -> i32 {
    kronecker(a, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;

    #[test]
    fn version_is_nul_terminated() {
        let s = unsafe { CStr::from_ptr(twist49_version()) };
        assert_eq!(s.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn central_value_through_the_boundary() {
        let ev = twist49_evaluator_new();
        let mut out = Twist49LValue {
            m: 0,
            conductor: 0,
            root_number: 0,
            l_numeric: 0.0,
            l_prime_numeric: 0.0,
            has_l_prime: 0,
            omega: 0.0,
            lalg_num: 0,
            lalg_den: 1,
            has_lalg: 0,
            ord2: 0,
            has_ord2: 0,
            terms_used: 0,
            error_bound: 0.0,
        };
        assert_eq!(twist49_l_central(ev, 1, &mut out), Twist49Status::Ok);
        assert_eq!((out.lalg_num, out.lalg_den), (1, 2));
        assert_eq!((out.ord2, out.has_ord2), (-1, 1));
        // wrong root number and bad labels come back as InvalidLabel
        assert_eq!(twist49_l_central(ev, -1, &mut out), Twist49Status::InvalidLabel);
        assert_eq!(twist49_l_central(ev, 12, &mut out), Twist49Status::InvalidLabel);
        assert_eq!(twist49_l_derivative(ev, -19, &mut out), Twist49Status::Ok);
        assert_eq!(out.has_l_prime, 1);
        assert!(out.l_prime_numeric > 1.0);
        assert_eq!(
            twist49_l_central(std::ptr::null(), 1, &mut out),
            Twist49Status::NullArgument
        );
        twist49_evaluator_free(ev);
    }

    #[test]
    fn pure_helpers() {
        assert_eq!(twist49_root_number(5), 1);
        assert_eq!(twist49_root_number(-5), -1);
        assert_eq!(twist49_root_number(0), 0);
        assert_eq!(twist49_root_number(14), 0);
        assert_eq!(twist49_kronecker(-7, 11), 1);
        assert_eq!(twist49_kronecker(-7, 13), -1);
        let name = unsafe { CStr::from_ptr(twist49_status_name(Twist49Status::Numeric)) };
        assert_eq!(name.to_str().unwrap(), "numerical failure");
    }

    #[test]
    fn class_group_and_selmer() {
        let (mut h, mut h2, mut h4, mut h8) = (0u64, 0u32, 0u32, 0u32);
        assert_eq!(
            twist49_class_group(-1288, &mut h, &mut h2, &mut h4, &mut h8),
            Twist49Status::Ok
        );
        assert_eq!((h, h2, h4, h8), (8, 2, 1, 0));
        assert_eq!(
            twist49_class_group(5, &mut h, &mut h2, &mut h4, &mut h8),
            Twist49Status::InvalidLabel
        );
        let (mut pq, mut ph, mut d2) = (9u32, 9u32, 9i32);
        assert_eq!(
            twist49_selmer_dims(-19, &mut pq, &mut ph, &mut d2),
            Twist49Status::Ok
        );
        assert_eq!((pq, ph, d2), (1, 1, 1));
        assert_eq!(
            twist49_selmer_dims(21, &mut pq, &mut ph, &mut d2),
            Twist49Status::InvalidLabel
        );
    }

    #[test]
    fn bsd_prediction() {
        let mut out = 0i64;
        assert_eq!(twist49_bsd_predicted_ord2(53, 0, &mut out), Twist49Status::Ok);
        assert_eq!(out, 1);
        assert_eq!(
            twist49_bsd_predicted_ord2(-5, 0, &mut out),
            Twist49Status::OutsideRegime
        );
    }

    #[test]
    fn waldspurger_and_heegner() {
        let (mut y, mut delta, mut h) = (0i64, 9u8, 0u64);
        assert_eq!(
            twist49_waldspurger_y(29, 1, &mut y, &mut delta, &mut h),
            Twist49Status::Ok
        );
        assert_eq!((y, delta, h), (2, 0, 4));
        assert_eq!(
            twist49_waldspurger_y(12, 1, &mut y, &mut delta, &mut h),
            Twist49Status::InvalidLabel
        );
        let param = twist49_parametrization_new();
        assert!(!param.is_null());
        let (mut nt, mut me, mut orbit) = (0u8, 0u8, 0u64);
        assert_eq!(
            twist49_heegner_trace(param, 19, 1, 1, 0, &mut nt, &mut me, &mut orbit),
            Twist49Status::Ok
        );
        assert_eq!((nt, me, orbit), (1, 1, 1));
        assert_eq!(
            twist49_heegner_trace(param, 11, 1, 1, 0, &mut nt, &mut me, &mut orbit),
            Twist49Status::InvalidLabel
        );
        twist49_parametrization_free(param);
    }

    #[test]
    fn generated_header_covers_the_api() {
        let header = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/include/twist49.h"
        ))
        .expect("build script wrote the header");
        for symbol in [
            "twist49_version",
            "twist49_evaluator_new",
            "twist49_l_central",
            "twist49_l_derivative",
            "twist49_class_group",
            "twist49_selmer_dims",
            "twist49_bsd_predicted_ord2",
            "twist49_waldspurger_y",
            "twist49_heegner_trace",
            "Twist49Status",
            "Twist49LValue",
        ] {
            assert!(header.contains(symbol), "header is missing {symbol}");
        }
        // opaque handles stay opaque
        assert!(header.contains("typedef struct Twist49Evaluator Twist49Evaluator;"));
        assert!(header.contains("typedef struct Twist49Parametrization Twist49Parametrization;"));
    }
}
