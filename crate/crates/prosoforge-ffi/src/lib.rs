//! C ABI for the prosoforge speech-prosody toolkit.
//!
//! Conventions:
//! - every fallible entry point returns a [`PfStatus`]; `PF_STATUS_OK` is 0
//! - output parameters are written only on success (and are nulled on entry,
//!   so they never hold garbage)
//! - [`pf_last_error_message`] describes the most recent failure on the
//!   calling thread; the pointer stays valid until the next failing call on
//!   that thread
//! - handles are opaque; release each with its matching `*_free`, which
//!   accepts `NULL`
//!
//! The generated header lives at `include/prosoforge.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use prosoforge::metrics::{evaluate_pair, EvalConfig};
use prosoforge::prosody::{convert, ProsodyProfile};
use prosoforge::signal::{read_wav, write_wav, AudioBuffer};
use prosoforge::Error;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfStatus {
    Ok = 0,
    /// A required pointer argument was `NULL`.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The operating system reported an I/O failure.
    Io = 3,
    /// A file was malformed or uses an unsupported codec/layout.
    Format = 4,
    /// An argument or parameter combination failed validation.
    Validation = 5,
    /// A computation produced non-finite or otherwise unusable values.
    Numeric = 6,
    /// An internal invariant was violated; the handle state is unchanged.
    Panic = 7,
}

/// Decoded mono audio. Create with `pf_audio_read_wav` or
/// `pf_audio_from_samples`; release with `pf_audio_free`.
pub struct PfAudio {
    inner: AudioBuffer,
}

/// A prosody conversion profile. Create with `pf_profile_preset` or
/// `pf_profile_from_json`; release with `pf_profile_free`.
pub struct PfProfile {
    inner: ProsodyProfile,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(status: PfStatus, message: &str) -> PfStatus {
    let owned = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(owned));
    status
}

fn fail(err: &Error) -> PfStatus {
    let status = match err {
        Error::Io { .. } => PfStatus::Io,
        Error::Format(_) | Error::UnsupportedFormat(_) => PfStatus::Format,
        Error::Validation(_) => PfStatus::Validation,
        Error::Numeric(_) => PfStatus::Numeric,
    };
    set_error(status, &err.to_string())
}

fn guarded(f: impl FnOnce() -> PfStatus) -> PfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => set_error(PfStatus::Panic, "internal panic"),
    }
}

/// # Safety
/// `ptr` must be NULL or a NUL-terminated string valid for the call.
unsafe fn arg_str<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, PfStatus> {
    if ptr.is_null() {
        return Err(set_error(PfStatus::NullArgument, &format!("{name} is NULL")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| set_error(PfStatus::InvalidUtf8, &format!("{name} is not valid UTF-8")))
}

unsafe fn arg_ref<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, PfStatus> {
    ptr.as_ref()
        .ok_or_else(|| set_error(PfStatus::NullArgument, &format!("{name} is NULL")))
}

fn require_out<T>(out: *mut T, name: &str) -> Result<(), PfStatus> {
    if out.is_null() {
        return Err(set_error(PfStatus::NullArgument, &format!("{name} is NULL")));
    }
    Ok(())
}

fn catch<F: FnOnce() -> Result<PfStatus, PfStatus>>(f: F) -> PfStatus {
    guarded(|| match f() {
        Ok(status) | Err(status) => status,
    })
}

/// Library version as a static NUL-terminated string; never free it.
#[no_mangle]
pub extern "C" fn pf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failure on this thread, or `NULL` if no call
/// has failed yet. Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |msg| msg.as_ptr())
    })
}

/// Decode a WAV file (PCM16/PCM24/float32, mono or downmixed) into a new
/// audio handle.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pf_audio_read_wav(
    path: *const c_char,
    out: *mut *mut PfAudio,
) -> PfStatus {
    catch(|| {
        require_out(out, "out")?;
        *out = std::ptr::null_mut();
        let path = arg_str(path, "path")?;
        let inner = read_wav(Path::new(path)).map_err(|e| fail(&e))?;
        *out = Box::into_raw(Box::new(PfAudio { inner }));
        Ok(PfStatus::Ok)
    })
}

/// Build an audio handle from a caller-owned sample buffer (copied).
///
/// # Safety
/// `samples` must point to `len` readable floats; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pf_audio_from_samples(
    samples: *const f32,
    len: usize,
    sample_rate_hz: u32,
    out: *mut *mut PfAudio,
) -> PfStatus {
    catch(|| {
        require_out(out, "out")?;
        *out = std::ptr::null_mut();
        if samples.is_null() {
            return Err(set_error(PfStatus::NullArgument, "samples is NULL"));
        }
        let data = std::slice::from_raw_parts(samples, len).to_vec();
        let inner = AudioBuffer::new(data, sample_rate_hz).map_err(|e| fail(&e))?;
        *out = Box::into_raw(Box::new(PfAudio { inner }));
        Ok(PfStatus::Ok)
    })
}

/// Write an audio handle to a PCM16 WAV file.
///
/// # Safety
/// `audio` must be a live handle; `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pf_audio_write_wav(
    audio: *const PfAudio,
    path: *const c_char,
) -> PfStatus {
    catch(|| {
        let audio = arg_ref(audio, "audio")?;
        let path = arg_str(path, "path")?;
        write_wav(Path::new(path), &audio.inner).map_err(|e| fail(&e))?;
        Ok(PfStatus::Ok)
    })
}

/// Number of samples in the handle; 0 for `NULL`.
///
/// # Safety
/// `audio` must be `NULL` or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pf_audio_len(audio: *const PfAudio) -> usize {
    audio.as_ref().map_or(0, |a| a.inner.len())
}

/// Sample rate in Hz; 0 for `NULL`.
///
/// # Safety
/// `audio` must be `NULL` or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pf_audio_sample_rate(audio: *const PfAudio) -> u32 {
    audio.as_ref().map_or(0, |a| a.inner.sample_rate_hz())
}

/// Borrow the handle's sample buffer (length `pf_audio_len`). The pointer is
/// valid while the handle lives; `NULL` for a `NULL` handle.
///
/// # Safety
/// `audio` must be `NULL` or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pf_audio_samples(audio: *const PfAudio) -> *const f32 {
    audio.as_ref().map_or(std::ptr::null(), |a| a.inner.samples().as_ptr())
}

/// Release an audio handle. Accepts `NULL`.
///
/// # Safety
/// `audio` must be `NULL` or a pointer from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn pf_audio_free(audio: *mut PfAudio) {
    if !audio.is_null() {
        drop(Box::from_raw(audio));
    }
}

/// Look up a built-in profile by name ("neutral", "conversational-casual",
/// "conversational-expressive").
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pf_profile_preset(
    name: *const c_char,
    out: *mut *mut PfProfile,
) -> PfStatus {
    catch(|| {
        require_out(out, "out")?;
        *out = std::ptr::null_mut();
        let name = arg_str(name, "name")?;
        let inner = ProsodyProfile::preset(name).ok_or_else(|| {
            set_error(
                PfStatus::Validation,
                &format!(
                    "unknown preset {name:?}; available: {}",
                    ProsodyProfile::PRESET_NAMES.join(", ")
                ),
            )
        })?;
        *out = Box::into_raw(Box::new(PfProfile { inner }));
        Ok(PfStatus::Ok)
    })
}

/// Parse a profile from a JSON object; omitted fields keep their neutral
/// values.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pf_profile_from_json(
    json: *const c_char,
    out: *mut *mut PfProfile,
) -> PfStatus {
    catch(|| {
        require_out(out, "out")?;
        *out = std::ptr::null_mut();
        let json = arg_str(json, "json")?;
        let inner: ProsodyProfile = serde_json::from_str(json)
            .map_err(|e| set_error(PfStatus::Format, &format!("profile JSON: {e}")))?;
        inner.validate().map_err(|e| fail(&e))?;
        *out = Box::into_raw(Box::new(PfProfile { inner }));
        Ok(PfStatus::Ok)
    })
}

/// Release a profile handle. Accepts `NULL`.
///
/// # Safety
/// `profile` must be `NULL` or a pointer from this library, freed at most
/// once.
#[no_mangle]
pub unsafe extern "C" fn pf_profile_free(profile: *mut PfProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Apply a prosody profile to audio, producing a new handle.
///
/// # Safety
/// `audio` and `profile` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pf_convert(
    audio: *const PfAudio,
    profile: *const PfProfile,
    out: *mut *mut PfAudio,
) -> PfStatus {
    catch(|| {
        require_out(out, "out")?;
        *out = std::ptr::null_mut();
        let audio = arg_ref(audio, "audio")?;
        let profile = arg_ref(profile, "profile")?;
        let inner = convert(&audio.inner, &profile.inner).map_err(|e| fail(&e))?;
        *out = Box::into_raw(Box::new(PfAudio { inner }));
        Ok(PfStatus::Ok)
    })
}

/// Compare two WAV files with the default evaluation settings and return the
/// metric report as a JSON string. Free the string with `pf_string_free`.
///
/// # Safety
/// `reference` and `synthesized` must be NUL-terminated strings; `out_json`
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn pf_evaluate_files(
    reference: *const c_char,
    synthesized: *const c_char,
    out_json: *mut *mut c_char,
) -> PfStatus {
    catch(|| {
        require_out(out_json, "out_json")?;
        *out_json = std::ptr::null_mut();
        let reference = arg_str(reference, "reference")?;
        let synthesized = arg_str(synthesized, "synthesized")?;
        let report = evaluate_pair(
            Path::new(reference),
            Path::new(synthesized),
            &EvalConfig::default(),
        )
        .map_err(|e| fail(&e))?;
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| set_error(PfStatus::Format, &format!("report JSON: {e}")))?;
        let owned = CString::new(json)
            .map_err(|_| set_error(PfStatus::Format, "report JSON contains NUL"))?;
        *out_json = owned.into_raw();
        Ok(PfStatus::Ok)
    })
}

/// Release a string returned by this library. Accepts `NULL`.
///
/// # Safety
/// `s` must be `NULL` or a pointer from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn pf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
