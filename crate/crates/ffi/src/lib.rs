//! C ABI over `foa-augment`.
//!
//! Signals and label tracks cross the boundary as opaque handles that the
//! caller releases with [`foa_signal_free`] and [`foa_labels_free`]. Every
//! fallible call returns a [`FoaStatus`]; on failure the message is kept per
//! thread and read back with [`foa_last_error_message`]. Output handles are
//! written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use foa_augment::channels_first::{apply_channels_first, apply_rotation};
use foa_augment::doa::{doa_error, estimate_doa, estimates_to_labels, frame_recall, labels_to_estimates};
use foa_augment::io::{read_foa_wav, read_labels_csv, write_foa_wav, write_labels_csv};
use foa_augment::labels_first::{apply_labels_first, ElevationMode, ElevationRangePolicy};
use foa_augment::patterns::{apply_pattern, PatternId};
use foa_augment::{Error, Rotation3};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Opaque four-channel signal.
pub struct FoaSignal(foa_augment::FoaSignal);

/// Opaque per-frame label track.
pub struct FoaLabels(foa_augment::LabelTrack);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SpanMismatch = 3,
    NoActiveFrames = 4,
    OverlapUnsupported = 5,
    RngFailure = 6,
    NoCoactiveFrames = 7,
    BadChannelCount = 8,
    UnsupportedFormat = 9,
    CorruptHeader = 10,
    Parse = 11,
    Range = 12,
    Io = 13,
    Panic = 14,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoaElevationMode {
    /// Limits are the dataset's elevation range.
    LabelRange = 0,
    /// Limits are the elevation-shift interval itself.
    FixedRange = 1,
}

/// One active source in one frame. Angles in radians.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoaLabelEntry {
    pub source_id: u32,
    pub azimuth: f64,
    pub elevation: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> FoaStatus {
    match err {
        Error::SpanMismatch { .. } => FoaStatus::SpanMismatch,
        Error::NoActiveFrames => FoaStatus::NoActiveFrames,
        Error::OverlapUnsupported { .. } => FoaStatus::OverlapUnsupported,
        Error::RngFailure(_) => FoaStatus::RngFailure,
        Error::NoCoactiveFrames => FoaStatus::NoCoactiveFrames,
        Error::BadChannelCount(_) => FoaStatus::BadChannelCount,
        Error::UnsupportedFormat(_) => FoaStatus::UnsupportedFormat,
        Error::CorruptHeader(_) => FoaStatus::CorruptHeader,
        Error::Parse { .. } => FoaStatus::Parse,
        Error::Range { .. } => FoaStatus::Range,
        Error::InvalidArgument(_) => FoaStatus::InvalidArgument,
        Error::Io(_) => FoaStatus::Io,
    }
}

/// Failure raised inside this layer before reaching the library.
struct Fail(FoaStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), format!("{} ({})", e, e.kind()))
    }
}

fn null(what: &str) -> Fail {
    Fail(FoaStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FoaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(String::new());
            FoaStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside foa-augment".into());
            FoaStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    // SAFETY: caller passes null or a live pointer of the right type.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, Fail> {
    if p.is_null() {
        return Err(null("path"));
    }
    // SAFETY: non-null, caller guarantees a NUL-terminated string.
    let s = unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| Fail(FoaStatus::InvalidArgument, "path is not UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

unsafe fn put<T>(out: *mut *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null, caller guarantees it is writable.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

unsafe fn check_out<T>(out: *mut T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        Err(null(what))
    } else {
        Ok(())
    }
}

/// Message of the last failed call on this thread, empty after a success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn foa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a signal from four planar channel buffers in W, Y, Z, X order,
/// each `len` samples long.
///
/// # Safety
/// `channels` points to four readable buffers of `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn foa_signal_new(
    sample_rate: u32,
    channels: *const *const f64,
    len: usize,
    out: *mut *mut FoaSignal,
) -> FoaStatus {
    guard(|| {
        if channels.is_null() {
            return Err(null("channels"));
        }
        // SAFETY: caller guarantees four channel pointers.
        let ptrs = unsafe { std::slice::from_raw_parts(channels, 4) };
        let mut bufs: [Vec<f64>; 4] = Default::default();
        for (buf, &p) in bufs.iter_mut().zip(ptrs) {
            if p.is_null() && len > 0 {
                return Err(null("channel buffer"));
            }
            if len > 0 {
                // SAFETY: non-null and `len` doubles long.
                buf.extend_from_slice(unsafe { std::slice::from_raw_parts(p, len) });
            }
        }
        let sig = foa_augment::FoaSignal::new(sample_rate, bufs)?;
        // SAFETY: forwarded caller guarantee.
        unsafe { put(out, FoaSignal(sig), "out") }
    })
}

/// # Safety
/// `path` is a NUL-terminated UTF-8 string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn foa_signal_read_wav(path: *const c_char, out: *mut *mut FoaSignal) -> FoaStatus {
    guard(|| {
        // SAFETY: forwarded caller guarantees.
        let path = unsafe { path_arg(path) }?;
        unsafe { check_out(out, "out") }?;
        let sig = read_foa_wav(path)?;
        unsafe { put(out, FoaSignal(sig), "out") }
    })
}

/// Writes 32-bit float WAV.
///
/// # Safety
/// `sig` is a live handle; `path` is a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn foa_signal_write_wav(sig: *const FoaSignal, path: *const c_char) -> FoaStatus {
    guard(|| {
        // SAFETY: forwarded caller guarantees.
        let sig = unsafe { deref(sig, "sig") }?;
        let path = unsafe { path_arg(path) }?;
        write_foa_wav(&sig.0, path)?;
        Ok(())
    })
}

/// Samples per channel; 0 for a null handle.
///
/// # Safety
/// `sig` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn foa_signal_len(sig: *const FoaSignal) -> usize {
    // SAFETY: caller guarantee.
    unsafe { sig.as_ref() }.map_or(0, |s| s.0.len())
}

/// # Safety
/// `sig` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn foa_signal_sample_rate(sig: *const FoaSignal) -> u32 {
    // SAFETY: caller guarantee.
    unsafe { sig.as_ref() }.map_or(0, |s| s.0.sample_rate())
}

/// Copies channel `channel` (0 W, 1 Y, 2 Z, 3 X) into `dst`, which holds
/// `dst_len` doubles and must fit the whole channel.
///
/// # Safety
/// `sig` is a live handle; `dst` is writable for `dst_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn foa_signal_copy_channel(
    sig: *const FoaSignal,
    channel: u32,
    dst: *mut f64,
    dst_len: usize,
) -> FoaStatus {
    guard(|| {
        // SAFETY: forwarded caller guarantee.
        let sig = unsafe { deref(sig, "sig") }?;
        let data = sig
            .0
            .channels()
            .get(channel as usize)
            .ok_or_else(|| Fail(FoaStatus::InvalidArgument, format!("channel {channel} outside 0..4")))?;
        if dst_len < data.len() {
            return Err(Fail(FoaStatus::InvalidArgument, format!("buffer holds {dst_len}, channel has {}", data.len())));
        }
        if data.is_empty() {
            return Ok(());
        }
        unsafe { check_out(dst, "dst") }?;
        // SAFETY: `dst` holds at least `data.len()` doubles and does not alias `data`.
        unsafe { ptr::copy_nonoverlapping(data.as_ptr(), dst, data.len()) };
        Ok(())
    })
}

/// # Safety
/// `sig` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn foa_signal_free(sig: *mut FoaSignal) {
    if !sig.is_null() {
        // SAFETY: handle came from Box::into_raw in this library.
        drop(unsafe { Box::from_raw(sig) });
    }
}

/// # Safety
/// `path` is a NUL-terminated UTF-8 string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn foa_labels_read_csv(path: *const c_char, out: *mut *mut FoaLabels) -> FoaStatus {
    guard(|| {
        // SAFETY: forwarded caller guarantees.
        let path = unsafe { path_arg(path) }?;
        unsafe { check_out(out, "out") }?;
        let track = read_labels_csv(path)?;
        unsafe { put(out, FoaLabels(track), "out") }
    })
}

/// Writes a label CSV. A `sample_rate` of 0 omits it from the header.
///
/// # Safety
/// `labels` is a live handle; `path` is a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn foa_labels_write_csv(labels: *const FoaLabels, sample_rate: u32, path: *const c_char) -> FoaStatus {
    guard(|| {
        // SAFETY: forwarded caller guarantees.
        let labels = unsafe { deref(labels, "labels") }?;
        let path = unsafe { path_arg(path) }?;
        write_labels_csv(&labels.0, (sample_rate > 0).then_some(sample_rate), path)?;
        Ok(())
    })
}

/// Number of frames; 0 for a null handle.
///
/// # Safety
/// `labels` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn foa_labels_frame_count(labels: *const FoaLabels) -> usize {
    // SAFETY: caller guarantee.
    unsafe { labels.as_ref() }.map_or(0, |l| l.0.len())
}

/// Frame hop in seconds; 0 for a null handle.
///
/// # Safety
/// `labels` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn foa_labels_frame_hop(labels: *const FoaLabels) -> f64 {
    // SAFETY: caller guarantee.
    unsafe { labels.as_ref() }.map_or(0.0, |l| l.0.frame_hop())
}

/// Active sources in `frame`; 0 for a null handle or a frame past the end.
///
/// # Safety
/// `labels` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn foa_labels_entry_count(labels: *const FoaLabels, frame: usize) -> usize {
    // SAFETY: caller guarantee.
    unsafe { labels.as_ref() }.and_then(|l| l.0.frames().get(frame)).map_or(0, Vec::len)
}

/// # Safety
/// `labels` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn foa_labels_get_entry(
    labels: *const FoaLabels,
    frame: usize,
    index: usize,
    out: *mut FoaLabelEntry,
) -> FoaStatus {
    guard(|| {
        // SAFETY: forwarded caller guarantees.
        let labels = unsafe { deref(labels, "labels") }?;
        unsafe { check_out(out, "out") }?;
        let e = labels
            .0
            .frames()
            .get(frame)
            .and_then(|f| f.get(index))
            .ok_or_else(|| Fail(FoaStatus::InvalidArgument, format!("no entry {index} in frame {frame}")))?;
        let entry = FoaLabelEntry {
            source_id: e.source_id,
            azimuth: e.direction.azimuth(),
            elevation: e.direction.elevation(),
        };
        // SAFETY: checked non-null above.
        unsafe { *out = entry };
        Ok(())
    })
}

/// # Safety
/// `labels` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn foa_labels_free(labels: *mut FoaLabels) {
    if !labels.is_null() {
        // SAFETY: handle came from Box::into_raw in this library.
        drop(unsafe { Box::from_raw(labels) });
    }
}

/// Shared tail of the augmentation calls.
unsafe fn augment_with(
    sig: *const FoaSignal,
    labels: *const FoaLabels,
    out_sig: *mut *mut FoaSignal,
    out_labels: *mut *mut FoaLabels,
    f: impl FnOnce(&foa_augment::FoaSignal, &foa_augment::LabelTrack) -> Result<(foa_augment::FoaSignal, foa_augment::LabelTrack), Fail>,
) -> FoaStatus {
    guard(|| {
        // SAFETY: forwarded caller guarantees.
        let sig = unsafe { deref(sig, "sig") }?;
        let labels = unsafe { deref(labels, "labels") }?;
        unsafe { check_out(out_sig, "out_sig") }?;
        unsafe { check_out(out_labels, "out_labels") }?;
        let (s, l) = f(&sig.0, &labels.0)?;
        unsafe { put(out_sig, FoaSignal(s), "out_sig") }?;
        unsafe { put(out_labels, FoaLabels(l), "out_labels") }
    })
}

/// Applies one of the 16 fixed patterns, named like `s+d+90e-`.
///
/// # Safety
/// Handles are live; `pattern` is a NUL-terminated string; outputs are writable.
#[no_mangle]
pub unsafe extern "C" fn foa_apply_pattern(
    sig: *const FoaSignal,
    labels: *const FoaLabels,
    pattern: *const c_char,
    out_sig: *mut *mut FoaSignal,
    out_labels: *mut *mut FoaLabels,
) -> FoaStatus {
    // SAFETY: forwarded caller guarantees.
    unsafe {
        augment_with(sig, labels, out_sig, out_labels, |s, l| {
            if pattern.is_null() {
                return Err(null("pattern"));
            }
            let text = CStr::from_ptr(pattern).to_string_lossy();
            let p: PatternId = text.parse()?;
            Ok(apply_pattern(s, l, p)?)
        })
    }
}

/// Labels-first augmentation. Angles are radians; `out_alpha` and `out_beta`
/// may be null.
///
/// # Safety
/// Handles are live; non-null outputs are writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn foa_apply_labels_first(
    sig: *const FoaSignal,
    labels: *const FoaLabels,
    mode: FoaElevationMode,
    range_min: f64,
    range_max: f64,
    seed: u64,
    out_sig: *mut *mut FoaSignal,
    out_labels: *mut *mut FoaLabels,
    out_alpha: *mut f64,
    out_beta: *mut f64,
) -> FoaStatus {
    let mode = match mode {
        FoaElevationMode::LabelRange => ElevationMode::LabelRange,
        FoaElevationMode::FixedRange => ElevationMode::FixedRange,
    };
    // SAFETY: forwarded caller guarantees.
    unsafe {
        augment_with(sig, labels, out_sig, out_labels, |s, l| {
            let policy = ElevationRangePolicy::new(mode, range_min, range_max)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (s, l, draw) = apply_labels_first(s, l, &policy, &mut rng)?;
            if !out_alpha.is_null() {
                *out_alpha = draw.alpha;
            }
            if !out_beta.is_null() {
                *out_beta = draw.beta;
            }
            Ok((s, l))
        })
    }
}

/// Channels-first augmentation with a seeded random orthonormal matrix.
/// `out_rotation` (9 doubles, row-major) may be null.
///
/// # Safety
/// Handles are live; non-null outputs are writable.
#[no_mangle]
pub unsafe extern "C" fn foa_apply_channels_first(
    sig: *const FoaSignal,
    labels: *const FoaLabels,
    seed: u64,
    out_sig: *mut *mut FoaSignal,
    out_labels: *mut *mut FoaLabels,
    out_rotation: *mut f64,
) -> FoaStatus {
    // SAFETY: forwarded caller guarantees.
    unsafe {
        augment_with(sig, labels, out_sig, out_labels, |s, l| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (s, l, r) = apply_channels_first(s, l, &mut rng)?;
            if !out_rotation.is_null() {
                ptr::copy_nonoverlapping(r.to_row_major().as_ptr(), out_rotation, 9);
            }
            Ok((s, l))
        })
    }
}

/// Channels-first augmentation with a caller-supplied orthonormal matrix
/// (9 doubles, row-major).
///
/// # Safety
/// Handles are live; `rotation` is readable for 9 doubles; outputs are writable.
#[no_mangle]
pub unsafe extern "C" fn foa_apply_rotation(
    sig: *const FoaSignal,
    labels: *const FoaLabels,
    rotation: *const f64,
    out_sig: *mut *mut FoaSignal,
    out_labels: *mut *mut FoaLabels,
) -> FoaStatus {
    // SAFETY: forwarded caller guarantees.
    unsafe {
        augment_with(sig, labels, out_sig, out_labels, |s, l| {
            if rotation.is_null() {
                return Err(null("rotation"));
            }
            let m = std::slice::from_raw_parts(rotation, 9);
            let r = Rotation3::from_rows(std::array::from_fn(|i| std::array::from_fn(|j| m[3 * i + j])))?;
            Ok(apply_rotation(s, l, &r)?)
        })
    }
}

/// Per-frame DOA estimate as a label track with source id 0.
///
/// # Safety
/// `sig` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn foa_estimate_doa(
    sig: *const FoaSignal,
    frame_hop: f64,
    activity_threshold: f64,
    out: *mut *mut FoaLabels,
) -> FoaStatus {
    guard(|| {
        // SAFETY: forwarded caller guarantees.
        let sig = unsafe { deref(sig, "sig") }?;
        unsafe { check_out(out, "out") }?;
        let est = estimate_doa(&sig.0, frame_hop, activity_threshold)?;
        let track = estimates_to_labels(&est, frame_hop)?;
        unsafe { put(out, FoaLabels(track), "out") }
    })
}

/// Mean angular error in degrees over frames active in both tracks.
///
/// # Safety
/// Handles are live; `out_deg` is writable.
#[no_mangle]
pub unsafe extern "C" fn foa_doa_error(estimate: *const FoaLabels, reference: *const FoaLabels, out_deg: *mut f64) -> FoaStatus {
    guard(|| {
        // SAFETY: forwarded caller guarantees.
        let est = unsafe { deref(estimate, "estimate") }?;
        let reference = unsafe { deref(reference, "reference") }?;
        unsafe { check_out(out_deg, "out_deg") }?;
        let er = doa_error(&labels_to_estimates(&est.0), &reference.0)?;
        unsafe { *out_deg = er };
        Ok(())
    })
}

/// Fraction of frames whose active-source count matches, in `[0, 1]`.
///
/// # Safety
/// Handles are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn foa_frame_recall(estimate: *const FoaLabels, reference: *const FoaLabels, out: *mut f64) -> FoaStatus {
    guard(|| {
        // SAFETY: forwarded caller guarantees.
        let est = unsafe { deref(estimate, "estimate") }?;
        let reference = unsafe { deref(reference, "reference") }?;
        unsafe { check_out(out, "out") }?;
        let fr = frame_recall(&labels_to_estimates(&est.0), &reference.0);
        unsafe { *out = fr };
        Ok(())
    })
}

/// Azimuth wrapped to `[-π, π)`.
#[no_mangle]
pub extern "C" fn foa_wrap_azimuth(azimuth: f64) -> f64 {
    foa_augment::wrap_azimuth(azimuth)
}
