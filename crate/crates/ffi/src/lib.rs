//! C ABI for the falldet detection chain.
//!
//! Every fallible function returns an `FD_*` status code and writes its
//! result through an out pointer. On failure the message is available from
//! `fd_last_error` on the same thread. Strings returned through `char **`
//! out pointers are owned by the caller and must be released with
//! `fd_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use falldet::geometry::{back_project, CameraIntrinsics, DepthFrame, SensorRange};
use falldet::pipeline::{process_frame, run_session, Config, FrameBundle, NullSink, SessionDir};
use falldet::pose::parse_keypoints_json;
use falldet::reasoning::dubois_bsa;
use falldet::Error;

pub const FD_OK: i32 = 0;
pub const FD_ERR_NULL: i32 = 1;
pub const FD_ERR_INVALID_INPUT: i32 = 2;
pub const FD_ERR_PARSE: i32 = 3;
pub const FD_ERR_IO: i32 = 4;
pub const FD_ERR_NO_DEPTH: i32 = 5;
pub const FD_ERR_LIFT: i32 = 6;
pub const FD_ERR_NO_GROUND: i32 = 7;
pub const FD_ERR_PANIC: i32 = 99;

/// Pinhole intrinsics in pixels.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FdIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

/// A camera-frame point in meters.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FdPoint3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Opaque engine holding a validated configuration.
pub struct FdEngine {
    config: Config,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

enum Failure {
    Null(&'static str),
    Core(Error),
    Utf8(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::Input(_)
        | Error::UnknownPart(_)
        | Error::Scenario(_)
        | Error::Unlabeled(_)
        | Error::Config(_)
        | Error::InsufficientEvidence { .. } => FD_ERR_INVALID_INPUT,
        Error::Json(_) | Error::Csv(_) | Error::Image(_) => FD_ERR_PARSE,
        Error::Io { .. } | Error::Sink(_) => FD_ERR_IO,
        Error::NoDepth { .. } => FD_ERR_NO_DEPTH,
        Error::LiftFailure { .. } => FD_ERR_LIFT,
        Error::NoGround => FD_ERR_NO_GROUND,
    }
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

/// Runs `f`, recording any failure and turning panics into `FD_ERR_PANIC`.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(String::new());
            FD_OK
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("`{what}` is null"));
            FD_ERR_NULL
        }
        Ok(Err(Failure::Utf8(what))) => {
            set_last_error(format!("`{what}` is not valid UTF-8"));
            FD_ERR_INVALID_INPUT
        }
        Ok(Err(Failure::Core(e))) => {
            set_last_error(e.to_string());
            code_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            FD_ERR_PANIC
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Utf8(what))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let s = CString::new(s).map_err(|_| Failure::Core(Error::Input("output contains a NUL byte".into())))?;
    *out = s.into_raw();
    Ok(())
}

fn intrinsics(k: &FdIntrinsics) -> falldet::Result<CameraIntrinsics> {
    CameraIntrinsics::new(k.fx, k.fy, k.cx, k.cy, k.width, k.height)
}

/// Creates an engine. `config_toml` may be null for the defaults; otherwise
/// it is a configuration document with `[reasoning]` and `[ground]` tables.
///
/// # Safety
/// `config_toml` must be null or a NUL-terminated string; `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fd_engine_new(config_toml: *const c_char, out: *mut *mut FdEngine) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let config = if config_toml.is_null() {
            Config::default()
        } else {
            Config::from_toml_str(str_arg(config_toml, "config_toml")?)?
        };
        *out = Box::into_raw(Box::new(FdEngine { config }));
        Ok(())
    })
}

/// Releases an engine. Null is ignored.
///
/// # Safety
/// `engine` must be null or a pointer from `fd_engine_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fd_engine_free(engine: *mut FdEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Classifies every person of one frame. `depth_m` holds `width * height`
/// row-major depths in meters (NaN or out-of-range values are holes);
/// `keypoints_json` is a keypoints document. On success `*out_json` is a
/// JSON array with one report per person.
///
/// # Safety
/// Pointers must be valid; `depth_m` must hold `depth_len` floats.
#[no_mangle]
pub unsafe extern "C" fn fd_engine_process_frame(
    engine: *const FdEngine,
    k: *const FdIntrinsics,
    depth_m: *const f32,
    depth_len: usize,
    keypoints_json: *const c_char,
    frame_id: u64,
    out_json: *mut *mut c_char,
) -> i32 {
    guard(|| {
        let engine = engine.as_ref().ok_or(Failure::Null("engine"))?;
        let k = k.as_ref().ok_or(Failure::Null("k"))?;
        if depth_m.is_null() {
            return Err(Failure::Null("depth_m"));
        }
        if out_json.is_null() {
            return Err(Failure::Null("out_json"));
        }
        let doc = parse_keypoints_json(str_arg(keypoints_json, "keypoints_json")?)?;
        let intrinsics = intrinsics(k)?;
        let raw = std::slice::from_raw_parts(depth_m, depth_len);
        let depth = DepthFrame::from_meters(k.width, k.height, raw, SensorRange::default())?;
        let bundle = FrameBundle {
            frame_id,
            timestamp: doc.timestamp.unwrap_or(frame_id as f64),
            depth,
            intrinsics,
            poses: doc.people,
        };
        bundle.validate()?;
        let reports = process_frame(&bundle, &engine.config.reasoning, &engine.config.ground)?;
        write_string(out_json, serde_json::to_string(&reports).map_err(Error::from)?)
    })
}

/// Runs a whole session directory. `*out_json` receives the session result,
/// including metrics when the directory has `labels.csv`.
///
/// # Safety
/// Pointers must be valid; `session_dir` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn fd_engine_process_session(
    engine: *const FdEngine,
    session_dir: *const c_char,
    out_json: *mut *mut c_char,
) -> i32 {
    guard(|| {
        let engine = engine.as_ref().ok_or(Failure::Null("engine"))?;
        if out_json.is_null() {
            return Err(Failure::Null("out_json"));
        }
        let dir = SessionDir::open(Path::new(str_arg(session_dir, "session_dir")?))?;
        let labels = dir.labels()?;
        let cfg = &engine.config;
        let result = run_session(dir.bundles(), &cfg.reasoning, &cfg.ground, &mut NullSink, labels.as_ref())?;
        write_string(out_json, result.to_json()?)
    })
}

/// Back-projects pixel `(u, v)` at `depth` meters.
///
/// # Safety
/// `k` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn fd_back_project(
    k: *const FdIntrinsics,
    u: f64,
    v: f64,
    depth: f64,
    out: *mut FdPoint3,
) -> i32 {
    guard(|| {
        let k = k.as_ref().ok_or(Failure::Null("k"))?;
        let out = out.as_mut().ok_or(Failure::Null("out"))?;
        let p = back_project((u, v), depth, &intrinsics(k)?)?;
        *out = FdPoint3 { x: p.x, y: p.y, z: p.z };
        Ok(())
    })
}

/// Body surface area in m² from weight in kg and height in cm.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fd_dubois_bsa(weight_kg: f64, height_cm: f64, out: *mut f64) -> i32 {
    guard(|| {
        let out = out.as_mut().ok_or(Failure::Null("out"))?;
        *out = dubois_bsa(weight_kg, height_cm)?;
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, or an empty string. Valid
/// until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn fd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn fd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
