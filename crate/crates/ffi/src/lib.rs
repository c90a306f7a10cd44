//! C interface to `rsk`.
//!
//! Bundles are opaque handles. Every call returns an [`RskStatus`]; on any
//! status other than `Ok` and `NotFound`, [`rsk_last_error`] returns a
//! message for the calling thread. Strings handed out by the library are
//! NUL-terminated UTF-8 and must be released with [`rsk_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rsk::groups::XsyChoice;
use rsk::oracle::{SearchConfig, DEFAULT_MAX_ELEMENTS};
use rsk::rational::Automaton;
use rsk::reduction::{
    find_trivial_stabilizer_vector, mon_to_rat, pair_from_json, pair_to_rat, reduce_pair,
    signed_permutation_group, tighter_aut, witness_to_path, MonToRatOptions, ReductionBundle,
};
use rsk::verify::{run_suite, Suite, VerifyOptions};
use rsk::Error;
use serde_json::{json, Value};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RskStatus {
    Ok = 0,
    /// Nothing found within the search bound, or a verification suite failed.
    NotFound = 1,
    NullArgument = 2,
    InvalidArgument = 3,
    Schema = 4,
    SpecMismatch = 5,
    ResourceLimit = 6,
    MalformedWitness = 7,
    Internal = 8,
    Panic = 9,
}

/// A reduction bundle.
pub struct RskBundle {
    inner: ReductionBundle,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(RskStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::SpecMismatch(_) | Error::IndexOutOfRange { .. } => RskStatus::SpecMismatch,
            Error::InvalidParameter(_) => RskStatus::InvalidArgument,
            Error::ResourceLimit { .. } => RskStatus::ResourceLimit,
            Error::MalformedWitness(_) => RskStatus::MalformedWitness,
            Error::Schema { .. } | Error::Json(_) => RskStatus::Schema,
            _ => RskStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(RskStatus::Schema, e.to_string())
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(RskStatus::InvalidArgument, message.into())
}

/// Runs `f`, records any error or panic, and maps it to a status.
fn guard(f: impl FnOnce() -> Result<RskStatus, Failure>) -> RskStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {message}"));
            RskStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(RskStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{name} is not UTF-8")))
}

unsafe fn bundle_arg<'a>(p: *const RskBundle) -> Result<&'a ReductionBundle, Failure> {
    p.as_ref()
        .map(|b| &b.inner)
        .ok_or_else(|| Failure(RskStatus::NullArgument, "bundle is null".into()))
}

unsafe fn put_string(out: *mut *mut c_char, v: &Value) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(
            RskStatus::NullArgument,
            "output pointer is null".into(),
        ));
    }
    let c = CString::new(v.to_string()).map_err(|e| Failure(RskStatus::Internal, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

fn search_config(max_len: usize, max_elements: usize) -> SearchConfig {
    let cap = if max_elements == 0 {
        DEFAULT_MAX_ELEMENTS
    } else {
        max_elements
    };
    SearchConfig::new(max_len)
        .with_max_elements(cap)
        .with_parallel(true)
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rsk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a bundle. `variant` is one of `pair`, `pair2rat`, `mon2rat`,
/// `tighter`; `input_json` is an automaton, or `{group, a, b}` for `pair`.
/// `signed_perm` is the dimension of the finite group used by `tighter`.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsk_bundle_build(
    input_json: *const c_char,
    variant: *const c_char,
    pad_pow2: bool,
    signed_perm: u32,
    out: *mut *mut RskBundle,
) -> RskStatus {
    guard(|| {
        let text = str_arg(input_json, "input_json")?;
        let variant = str_arg(variant, "variant")?;
        if out.is_null() {
            return Err(Failure(
                RskStatus::NullArgument,
                "output pointer is null".into(),
            ));
        }
        let v: Value = serde_json::from_str(text)?;
        let xsy = XsyChoice::Rotation;
        let bundle = match variant {
            "pair" => {
                let (g, a, b) = pair_from_json(&v)?;
                reduce_pair(&g, &a, &b, xsy)?
            }
            "pair2rat" => pair_to_rat(&Automaton::from_json(&v)?, pad_pow2)?.bundle,
            "mon2rat" => mon_to_rat(
                &Automaton::from_json(&v)?,
                MonToRatOptions { pad_pow2, xsy },
            )?,
            "tighter" => {
                let a = signed_permutation_group(signed_perm as usize)?;
                let sv = find_trivial_stabilizer_vector(&a);
                tighter_aut(&Automaton::from_json(&v)?, &a, &sv, xsy)?
            }
            other => return Err(invalid(format!("unknown variant `{other}`"))),
        };
        *out = Box::into_raw(Box::new(RskBundle { inner: bundle }));
        Ok(RskStatus::Ok)
    })
}

/// Reads a bundle from its JSON form.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsk_bundle_from_json(
    json: *const c_char,
    out: *mut *mut RskBundle,
) -> RskStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        if out.is_null() {
            return Err(Failure(
                RskStatus::NullArgument,
                "output pointer is null".into(),
            ));
        }
        let bundle = ReductionBundle::from_json_str(text)?;
        *out = Box::into_raw(Box::new(RskBundle { inner: bundle }));
        Ok(RskStatus::Ok)
    })
}

/// Writes the JSON form of a bundle to `*out`.
///
/// # Safety
/// `bundle` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsk_bundle_to_json(
    bundle: *const RskBundle,
    out: *mut *mut c_char,
) -> RskStatus {
    guard(|| {
        let b = bundle_arg(bundle)?;
        put_string(out, &b.to_json())?;
        Ok(RskStatus::Ok)
    })
}

/// Number of generators, or 0 for a null handle.
///
/// # Safety
/// `bundle` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn rsk_bundle_generator_count(bundle: *const RskBundle) -> usize {
    bundle.as_ref().map_or(0, |b| b.inner.len())
}

/// Bounded membership of the pair (g, target) where `g_json` is an element
/// of the base group. Returns `Ok` when found and `NotFound` otherwise; in
/// both cases `*out` receives a JSON report with the verdict, and with the
/// witness and decoded path when found. `max_elements = 0` keeps the default
/// cap.
///
/// # Safety
/// `bundle` must come from this library; `g_json` must be NUL-terminated;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsk_bundle_member(
    bundle: *const RskBundle,
    g_json: *const c_char,
    max_len: usize,
    max_elements: usize,
    out: *mut *mut c_char,
) -> RskStatus {
    guard(|| {
        let b = bundle_arg(bundle)?;
        let g = b
            .g_spec()
            .element_from_json(&serde_json::from_str(str_arg(g_json, "g_json")?)?)?;
        let target = b.ambient_target(&g)?;
        let r = b.member_bounded(&target, &search_config(max_len, max_elements))?;
        let mut report = json!({ "verdict": r.verdict.as_str(), "max_len": max_len });
        if let Some(w) = &r.witness {
            report["witness"] = json!(w.indices()?);
            if b.source.is_some() {
                report["path"] = json!(witness_to_path(b, w)?);
            }
        }
        put_string(out, &report)?;
        Ok(if r.found() {
            RskStatus::Ok
        } else {
            RskStatus::NotFound
        })
    })
}

/// Section elements with witnesses of length at most `max_len`, as a JSON
/// array of `{element, length, witness}`.
///
/// # Safety
/// `bundle` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsk_bundle_section(
    bundle: *const RskBundle,
    max_len: usize,
    max_elements: usize,
    out: *mut *mut c_char,
) -> RskStatus {
    guard(|| {
        let b = bundle_arg(bundle)?;
        let hits = b.section_bounded(&search_config(max_len, max_elements))?;
        let g = b.g_spec();
        let list: Vec<Value> = hits
            .iter()
            .map(|h| {
                Ok(json!({
                    "element": g.element_to_json(&h.element),
                    "length": h.length,
                    "witness": h.witness.indices()?,
                }))
            })
            .collect::<Result<_, Error>>()?;
        put_string(out, &Value::Array(list))?;
        Ok(RskStatus::Ok)
    })
}

/// Runs a verification suite by name. Returns `Ok` when it passes and
/// `NotFound` when it reports failures; `*out` receives the report.
///
/// # Safety
/// `suite` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsk_verify(
    suite: *const c_char,
    seed: u64,
    out: *mut *mut c_char,
) -> RskStatus {
    guard(|| {
        let suite: Suite = str_arg(suite, "suite")?.parse()?;
        let r = run_suite(
            suite,
            &VerifyOptions {
                seed,
                ..VerifyOptions::default()
            },
        )?;
        put_string(out, &r.to_json())?;
        Ok(if r.passed() {
            RskStatus::Ok
        } else {
            RskStatus::NotFound
        })
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn rsk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `bundle` must be null or a handle returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn rsk_bundle_free(bundle: *mut RskBundle) {
    if !bundle.is_null() {
        drop(Box::from_raw(bundle));
    }
}
