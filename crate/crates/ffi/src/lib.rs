//! C interface to `mapalign`.
//!
//! Every object crosses the boundary as an opaque handle created by a
//! `*_new`/`*_load`/`*_from_*` function and released by the matching `*_free`.
//! Fallible calls return an [`MaStatus`]; the message of the most recent
//! failure on the calling thread is available from [`ma_last_error`].
//! Strings returned to the caller are owned by the caller and released with
//! [`ma_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mapalign::config::PipelineConfig;
use mapalign::geometry::Point2;
use mapalign::pipeline::{self, AlignmentResult, MapSource, PipelineError};
use mapalign::raster::OccupancyGrid;
use mapalign::vector::Segment;

/// Result of a fallible call. Values 1 to 5 equal the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaStatus {
    Ok = 0,
    /// Bad configuration key or value, or an out-of-range parameter.
    Config = 1,
    /// A file could not be read, decoded or written.
    Io = 2,
    /// No line traits were found in a map.
    NoTraits = 3,
    /// No room survived pruning.
    NoFaces = 4,
    /// Every hypothesis was rejected.
    EmptyPool = 5,
    /// Null pointer, invalid UTF-8, or inconsistent sizes.
    InvalidArgument = 6,
    /// An internal panic was caught at the boundary.
    Internal = 7,
}

impl From<&PipelineError> for MaStatus {
    fn from(e: &PipelineError) -> Self {
        match e.exit_code() {
            1 => MaStatus::Config,
            2 => MaStatus::Io,
            3 => MaStatus::NoTraits,
            4 => MaStatus::NoFaces,
            5 => MaStatus::EmptyPool,
            _ => MaStatus::Internal,
        }
    }
}

/// Pipeline parameters.
pub struct MaConfig(PipelineConfig);

/// A loaded map: an occupancy bitmap or a set of wall segments.
pub struct MaMap(MapSource);

/// Outcome of an alignment.
pub struct MaAlignment(AlignmentResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(MaStatus, String);

impl From<PipelineError> for Fail {
    fn from(e: PipelineError) -> Self {
        Fail(MaStatus::from(&e), e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(MaStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MaStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MaStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {msg}"));
            MaStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(invalid(format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| invalid(format!("{what} is null")))
}

unsafe fn out_arg<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(invalid("output pointer is null"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Message describing the last failed call on this thread, or null after a
/// successful call. Valid until the next call into this library on the same
/// thread.
#[no_mangle]
pub extern "C" fn ma_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ma_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn ma_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Default parameters.
#[no_mangle]
pub extern "C" fn ma_config_new() -> *mut MaConfig {
    Box::into_raw(Box::new(MaConfig(PipelineConfig::default())))
}

/// # Safety
/// `cfg` must be null or a handle from [`ma_config_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ma_config_free(cfg: *mut MaConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Sets one `section.key` to a value given as text, e.g.
/// `("prune.thr_e", "0.1")`.
///
/// # Safety
/// `cfg` must be a live config handle; `key` and `value` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ma_config_set(
    cfg: *mut MaConfig,
    key: *const c_char,
    value: *const c_char,
) -> MaStatus {
    guard(|| {
        let cfg = cfg.as_mut().ok_or_else(|| invalid("config is null"))?;
        let key = str_arg(key, "key")?;
        let value = str_arg(value, "value")?;
        cfg.0.set(key, value).map_err(PipelineError::from)?;
        Ok(())
    })
}

/// Current value of a key as a caller-owned string, or null for an unknown
/// key.
///
/// # Safety
/// `cfg` must be a live config handle; `key` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ma_config_get(cfg: *const MaConfig, key: *const c_char) -> *mut c_char {
    let mut out = ptr::null_mut();
    guard(|| {
        let cfg = ref_arg(cfg, "config")?;
        let key = str_arg(key, "key")?;
        let v = cfg
            .0
            .get(key)
            .ok_or_else(|| Fail(MaStatus::Config, format!("unknown key {key:?}")))?;
        out = owned_string(v);
        Ok(())
    });
    out
}

/// Applies a config file of `key = value` lines on top of the current values.
///
/// # Safety
/// `cfg` must be a live config handle; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ma_config_load(cfg: *mut MaConfig, path: *const c_char) -> MaStatus {
    guard(|| {
        let cfg = cfg.as_mut().ok_or_else(|| invalid("config is null"))?;
        let path = str_arg(path, "path")?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| Fail(MaStatus::Io, format!("cannot read {path}: {e}")))?;
        cfg.0.apply_text(&text).map_err(PipelineError::from)?;
        Ok(())
    })
}

/// Loads a map file. `.txt` and `.lines` files are wall line lists, anything
/// else an image. A null `cfg` uses the defaults.
///
/// # Safety
/// `path` NUL-terminated; `cfg` null or live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ma_map_load(
    path: *const c_char,
    cfg: *const MaConfig,
    out: *mut *mut MaMap,
) -> MaStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let default = PipelineConfig::default();
        let cfg = cfg.as_ref().map_or(&default, |c| &c.0);
        let source = pipeline::load_map(path, cfg)?;
        out_arg(out, MaMap(source))
    })
}

/// Map from a row-major 8-bit gray image. Levels below `occupied_threshold`
/// are walls, above `255 - occupied_threshold` free space, the rest unknown.
///
/// # Safety
/// `gray` must hold `width * height` bytes; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ma_map_from_gray(
    width: usize,
    height: usize,
    gray: *const u8,
    occupied_threshold: u8,
    out: *mut *mut MaMap,
) -> MaStatus {
    guard(|| {
        if gray.is_null() {
            return Err(invalid("gray is null"));
        }
        let n = width
            .checked_mul(height)
            .ok_or_else(|| invalid("image size overflows"))?;
        let pixels = std::slice::from_raw_parts(gray, n);
        let grid = OccupancyGrid::from_gray(width, height, pixels, occupied_threshold)
            .map_err(|e| invalid(e.to_string()))?;
        out_arg(out, MaMap(MapSource::Raster(grid)))
    })
}

/// Map from `count` wall segments given as consecutive `x0 y0 x1 y1`
/// quadruples.
///
/// # Safety
/// `coords` must hold `4 * count` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ma_map_from_segments(
    coords: *const f64,
    count: usize,
    out: *mut *mut MaMap,
) -> MaStatus {
    guard(|| {
        if coords.is_null() {
            return Err(invalid("coords is null"));
        }
        let n = count
            .checked_mul(4)
            .ok_or_else(|| invalid("segment count overflows"))?;
        let v = std::slice::from_raw_parts(coords, n);
        if v.iter().any(|c| !c.is_finite()) {
            return Err(invalid("segment coordinates must be finite"));
        }
        let segs = v
            .chunks_exact(4)
            .map(|c| Segment::new(Point2::new(c[0], c[1]), Point2::new(c[2], c[3])))
            .collect();
        out_arg(out, MaMap(MapSource::Lines(segs)))
    })
}

/// # Safety
/// `map` must be null or a live map handle.
#[no_mangle]
pub unsafe extern "C" fn ma_map_free(map: *mut MaMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Decomposes a map into rooms and reports how many were found.
///
/// # Safety
/// `map` live; `cfg` null or live; `rooms` writable.
#[no_mangle]
pub unsafe extern "C" fn ma_map_count_rooms(
    map: *const MaMap,
    cfg: *const MaConfig,
    rooms: *mut usize,
) -> MaStatus {
    guard(|| {
        let map = ref_arg(map, "map")?;
        let default = PipelineConfig::default();
        let cfg = cfg.as_ref().map_or(&default, |c| &c.0);
        if rooms.is_null() {
            return Err(invalid("rooms is null"));
        }
        let i = pipeline::interpret(&map.0, cfg, "map")?;
        *rooms = i.stats.rooms;
        Ok(())
    })
}

/// Finds the similarity transform taking `map1` onto `map2`.
///
/// # Safety
/// `map1`, `map2` live; `cfg` null or live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ma_align(
    map1: *const MaMap,
    map2: *const MaMap,
    cfg: *const MaConfig,
    out: *mut *mut MaAlignment,
) -> MaStatus {
    guard(|| {
        let m1 = ref_arg(map1, "map1")?;
        let m2 = ref_arg(map2, "map2")?;
        let default = PipelineConfig::default();
        let cfg = cfg.as_ref().map_or(&default, |c| &c.0);
        let r = pipeline::align(&m1.0, &m2.0, cfg)?;
        out_arg(out, MaAlignment(r))
    })
}

/// # Safety
/// `a` must be null or a live alignment handle.
#[no_mangle]
pub unsafe extern "C" fn ma_alignment_free(a: *mut MaAlignment) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Writes the 3x3 homogeneous transform, row-major, into `out[0..9]`.
///
/// # Safety
/// `a` live; `out` must hold 9 doubles.
#[no_mangle]
pub unsafe extern "C" fn ma_alignment_transform(a: *const MaAlignment, out: *mut f64) -> MaStatus {
    guard(|| {
        let a = ref_arg(a, "alignment")?;
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        let m = a.0.report.transform.to_row_major();
        ptr::copy_nonoverlapping(m.as_ptr(), out, 9);
        Ok(())
    })
}

/// Score of the winning hypothesis in [0, 1], or NaN for a null handle.
///
/// # Safety
/// `a` null or live.
#[no_mangle]
pub unsafe extern "C" fn ma_alignment_score(a: *const MaAlignment) -> f64 {
    a.as_ref().map_or(f64::NAN, |a| a.0.report.score)
}

/// True when every hypothesis scored zero and the winner is arbitrary.
///
/// # Safety
/// `a` null or live.
#[no_mangle]
pub unsafe extern "C" fn ma_alignment_low_confidence(a: *const MaAlignment) -> bool {
    a.as_ref().is_some_and(|a| a.0.report.low_confidence)
}

/// Hypothesis counts before and after rejection. Either pointer may be null.
///
/// # Safety
/// `a` live; non-null outputs writable.
#[no_mangle]
pub unsafe extern "C" fn ma_alignment_hypotheses(
    a: *const MaAlignment,
    initial: *mut usize,
    kept: *mut usize,
) -> MaStatus {
    guard(|| {
        let r = &ref_arg(a, "alignment")?.0.report;
        if let Some(p) = initial.as_mut() {
            *p = r.initial_hypotheses;
        }
        if let Some(p) = kept.as_mut() {
            *p = r.kept_hypotheses;
        }
        Ok(())
    })
}

/// Rooms found in each map. Either pointer may be null.
///
/// # Safety
/// `a` live; non-null outputs writable.
#[no_mangle]
pub unsafe extern "C" fn ma_alignment_rooms(
    a: *const MaAlignment,
    map1: *mut usize,
    map2: *mut usize,
) -> MaStatus {
    guard(|| {
        let r = &ref_arg(a, "alignment")?.0.report;
        if let Some(p) = map1.as_mut() {
            *p = r.map1.rooms;
        }
        if let Some(p) = map2.as_mut() {
            *p = r.map2.rooms;
        }
        Ok(())
    })
}

/// The `key = value` result document, as printed by the command line tool.
/// Caller-owned; null for a null handle.
///
/// # Safety
/// `a` null or live.
#[no_mangle]
pub unsafe extern "C" fn ma_alignment_document(a: *const MaAlignment) -> *mut c_char {
    a.as_ref()
        .map_or(ptr::null_mut(), |a| owned_string(a.0.report.to_document()))
}

/// The hypothesis pool as JSON lines. Caller-owned; null for a null handle.
///
/// # Safety
/// `a` null or live.
#[no_mangle]
pub unsafe extern "C" fn ma_alignment_pool_jsonl(a: *const MaAlignment) -> *mut c_char {
    a.as_ref().map_or(ptr::null_mut(), |a| {
        owned_string(pipeline::pool_to_jsonl(&a.0.pool))
    })
}
