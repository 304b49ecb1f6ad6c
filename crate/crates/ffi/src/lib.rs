//! C ABI for the slitwalk simulator.
//!
//! All objects are opaque handles created and destroyed by this library.
//! Every fallible call returns an [`SwStatus`]; on failure a message is kept
//! per thread and can be read with [`sw_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use slitwalk::cli::{parse_config, write_outputs};
use slitwalk::{
    preset, run, step, AmplitudeField, CoinIndex, CoinKind, CoinOperator, Error, ExperimentConfig,
    ExperimentResult, LinkSet, Site, C64,
};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwStatus {
    SwOk = 0,
    SwNullPointer = 1,
    SwInvalidArgument = 2,
    SwConfigError = 3,
    SwRuntimeError = 4,
    SwIoError = 5,
    SwBufferTooSmall = 6,
    SwPanic = 7,
}

/// Built-in coin selector for [`sw_walk_new`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwCoin {
    SwCoinHadamard = 0,
    SwCoinGrover = 1,
    SwCoinFourier = 2,
}

/// Experiment configuration handle.
pub struct SwConfig(ExperimentConfig);

/// Finished experiment handle.
pub struct SwResult(ExperimentResult);

/// Step-by-step walk handle.
pub struct SwWalk {
    field: AmplitudeField,
    coin: CoinOperator,
    links: LinkSet,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: SwStatus, msg: impl Into<String>) -> SwStatus {
    set_error(msg);
    status
}

fn runtime(err: Error) -> SwStatus {
    let status = match err {
        Error::InvalidConfig(_)
        | Error::InvalidBarrier(_)
        | Error::OverlappingSlits(..)
        | Error::UnknownPreset(_)
        | Error::NonNormalizedCoinState { .. }
        | Error::NonUnitary { .. } => SwStatus::SwConfigError,
        Error::OddParitySite(_) | Error::SiteOutsideBox { .. } => SwStatus::SwInvalidArgument,
        _ => SwStatus::SwRuntimeError,
    };
    fail(status, err.to_string())
}

fn guard(f: impl FnOnce() -> SwStatus) -> SwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == SwStatus::SwOk {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            status
        }
        Err(_) => fail(SwStatus::SwPanic, "internal panic"),
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, SwStatus> {
    if s.is_null() {
        return Err(fail(SwStatus::SwNullPointer, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(SwStatus::SwInvalidArgument, "string is not valid UTF-8"))
}

macro_rules! deref {
    ($ptr:expr) => {
        match $ptr.as_ref() {
            Some(v) => v,
            None => return fail(SwStatus::SwNullPointer, concat!("null ", stringify!($ptr))),
        }
    };
}

macro_rules! deref_mut {
    ($ptr:expr) => {
        match $ptr.as_mut() {
            Some(v) => v,
            None => return fail(SwStatus::SwNullPointer, concat!("null ", stringify!($ptr))),
        }
    };
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn sw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Create a config from a preset name such as `"fig5_double"`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sw_config_from_preset(name: *const c_char, out: *mut *mut SwConfig) -> SwStatus {
    guard(|| {
        let out = deref_mut!(out);
        let name = match read_str(name) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match preset(name) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(SwConfig(cfg)));
                SwStatus::SwOk
            }
            Err(e) => runtime(e),
        }
    })
}

/// Parse config text in the CLI file format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sw_config_parse(text: *const c_char, out: *mut *mut SwConfig) -> SwStatus {
    guard(|| {
        let out = deref_mut!(out);
        let text = match read_str(text) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match parse_config(text) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(SwConfig(cfg)));
                SwStatus::SwOk
            }
            Err(e) => fail(SwStatus::SwConfigError, e.to_string()),
        }
    })
}

/// Number of time steps in a config.
///
/// # Safety
/// `config` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sw_config_steps(config: *const SwConfig, out: *mut usize) -> SwStatus {
    guard(|| {
        let config = deref!(config);
        *deref_mut!(out) = config.0.steps;
        SwStatus::SwOk
    })
}

/// # Safety
/// `config` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sw_config_free(config: *mut SwConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Run a config to completion.
///
/// # Safety
/// `config` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sw_run(config: *const SwConfig, out: *mut *mut SwResult) -> SwStatus {
    guard(|| {
        let config = deref!(config);
        let out = deref_mut!(out);
        match run(&config.0) {
            Ok(result) => {
                *out = Box::into_raw(Box::new(SwResult(result)));
                SwStatus::SwOk
            }
            Err(e) => runtime(e),
        }
    })
}

/// Final-time probability at site `(m, n)`; zero outside the box or on odd sites.
///
/// # Safety
/// `result` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sw_result_probability(result: *const SwResult, m: i32, n: i32, out: *mut f64) -> SwStatus {
    guard(|| {
        let result = deref!(result);
        *deref_mut!(out) = result.0.probability.get(Site::new(m, n));
        SwStatus::SwOk
    })
}

/// Largest `|norm - 1|` seen during the run.
///
/// # Safety
/// `result` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sw_result_norm_deviation(result: *const SwResult, out: *mut f64) -> SwStatus {
    guard(|| {
        let result = deref!(result);
        *deref_mut!(out) = result.0.max_norm_deviation;
        SwStatus::SwOk
    })
}

/// Copy the analysed screen profile into caller buffers.
///
/// `len` receives the profile length. Passing `capacity` 0 with NULL buffers
/// queries the length. A run without a screen has length 0.
///
/// # Safety
/// `slots` and `values` must each hold `capacity` elements (or be NULL when
/// `capacity` is 0); `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_result_screen_profile(
    result: *const SwResult,
    slots: *mut i32,
    values: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> SwStatus {
    guard(|| {
        let result = deref!(result);
        let len = deref_mut!(len);
        let profile = result.0.screen_profile().unwrap_or_default();
        *len = profile.len();
        if capacity == 0 {
            return SwStatus::SwOk;
        }
        if slots.is_null() || values.is_null() {
            return fail(SwStatus::SwNullPointer, "null profile buffer");
        }
        if capacity < profile.len() {
            return fail(
                SwStatus::SwBufferTooSmall,
                format!("profile has {} entries, buffer holds {capacity}", profile.len()),
            );
        }
        for (i, (slot, value)) in profile.into_iter().enumerate() {
            *slots.add(i) = slot;
            *values.add(i) = value;
        }
        SwStatus::SwOk
    })
}

/// Number of accepted maxima and minima on the screen (both 0 without a screen).
///
/// # Safety
/// `result` must be a live handle; `maxima` and `minima` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_result_extrema_counts(
    result: *const SwResult,
    maxima: *mut usize,
    minima: *mut usize,
) -> SwStatus {
    guard(|| {
        let result = deref!(result);
        let (a, b) = result.0.extrema.as_ref().map_or((0, 0), |e| (e.maxima.len(), e.minima.len()));
        *deref_mut!(maxima) = a;
        *deref_mut!(minima) = b;
        SwStatus::SwOk
    })
}

/// Write `field.csv`, `screen.csv`, `extrema.json` and `manifest.json` into `dir`.
///
/// # Safety
/// `result` must be a live handle and `dir` a NUL-terminated path.
#[no_mangle]
pub unsafe extern "C" fn sw_result_write(result: *const SwResult, dir: *const c_char) -> SwStatus {
    guard(|| {
        let result = deref!(result);
        let dir = match read_str(dir) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match write_outputs(&result.0, Path::new(dir)) {
            Ok(_) => SwStatus::SwOk,
            Err(e) => fail(SwStatus::SwIoError, format!("{dir}: {e}")),
        }
    })
}

/// # Safety
/// `result` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sw_result_free(result: *mut SwResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Create a walk at the origin in a box of half-width `radius`.
///
/// `state` holds 8 doubles: re/im pairs for coins `(0,0), (0,1), (1,0), (1,1)`.
///
/// # Safety
/// `state` must point to 8 doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sw_walk_new(
    coin: SwCoin,
    radius: usize,
    state: *const f64,
    out: *mut *mut SwWalk,
) -> SwStatus {
    guard(|| {
        let out = deref_mut!(out);
        if state.is_null() {
            return fail(SwStatus::SwNullPointer, "null coin state");
        }
        let s = std::slice::from_raw_parts(state, 8);
        let coin_state = std::array::from_fn(|c| C64::new(s[2 * c], s[2 * c + 1]));
        let kind = match coin {
            SwCoin::SwCoinHadamard => CoinKind::Hadamard,
            SwCoin::SwCoinGrover => CoinKind::Grover,
            SwCoin::SwCoinFourier => CoinKind::Fourier,
        };
        let coin = CoinOperator::of_kind(kind).expect("built-in coin");
        match AmplitudeField::new_localized(Site::ORIGIN, coin_state, radius) {
            Ok(field) => {
                *out = Box::into_raw(Box::new(SwWalk { field, coin, links: LinkSet::new() }));
                SwStatus::SwOk
            }
            Err(e) => runtime(e),
        }
    })
}

/// Break the edge from `(m, n)` toward coin direction `(j, k)`.
///
/// # Safety
/// `walk` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sw_walk_break_edge(walk: *mut SwWalk, m: i32, n: i32, j: u8, k: u8) -> SwStatus {
    guard(|| {
        let walk = deref_mut!(walk);
        let site = Site::new(m, n);
        if !site.is_even() || j > 1 || k > 1 {
            return fail(SwStatus::SwInvalidArgument, format!("no edge at ({m}, {n}) toward ({j}, {k})"));
        }
        walk.links = std::mem::take(&mut walk.links).break_edge(site, CoinIndex::new(j, k));
        SwStatus::SwOk
    })
}

/// Advance the walk by `steps` steps.
///
/// # Safety
/// `walk` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sw_walk_step(walk: *mut SwWalk, steps: usize) -> SwStatus {
    guard(|| {
        let walk = deref_mut!(walk);
        for _ in 0..steps {
            match step(&walk.field, &walk.coin, &walk.links) {
                Ok(next) => walk.field = next,
                Err(e) => return runtime(e),
            }
        }
        SwStatus::SwOk
    })
}

/// Current time, total probability, and the probability at `(m, n)`.
///
/// # Safety
/// `walk` must be a live handle; each output pointer may be NULL to skip it.
#[no_mangle]
pub unsafe extern "C" fn sw_walk_query(
    walk: *const SwWalk,
    m: i32,
    n: i32,
    time: *mut usize,
    norm: *mut f64,
    probability: *mut f64,
) -> SwStatus {
    guard(|| {
        let walk = deref!(walk);
        if let Some(t) = time.as_mut() {
            *t = walk.field.time();
        }
        if let Some(v) = norm.as_mut() {
            *v = walk.field.norm();
        }
        if let Some(p) = probability.as_mut() {
            *p = walk.field.site_probability(Site::new(m, n));
        }
        SwStatus::SwOk
    })
}

/// # Safety
/// `walk` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sw_walk_free(walk: *mut SwWalk) {
    if !walk.is_null() {
        drop(Box::from_raw(walk));
    }
}
