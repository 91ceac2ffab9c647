#ifndef PROSOFORGE_H
#define PROSOFORGE_H

/* Generated by cbindgen from the prosoforge-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum PfStatus {
  PF_STATUS_OK = 0,
  /**
   * A required pointer argument was `NULL`.
   */
  PF_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  PF_STATUS_INVALID_UTF8 = 2,
  /**
   * The operating system reported an I/O failure.
   */
  PF_STATUS_IO = 3,
  /**
   * A file was malformed or uses an unsupported codec/layout.
   */
  PF_STATUS_FORMAT = 4,
  /**
   * An argument or parameter combination failed validation.
   */
  PF_STATUS_VALIDATION = 5,
  /**
   * A computation produced non-finite or otherwise unusable values.
   */
  PF_STATUS_NUMERIC = 6,
  /**
   * An internal invariant was violated; the handle state is unchanged.
   */
  PF_STATUS_PANIC = 7,
} PfStatus;

/**
 * Decoded mono audio. Create with `pf_audio_read_wav` or
 * `pf_audio_from_samples`; release with `pf_audio_free`.
 */
typedef struct PfAudio PfAudio;

/**
 * A prosody conversion profile. Create with `pf_profile_preset` or
 * `pf_profile_from_json`; release with `pf_profile_free`.
 */
typedef struct PfProfile PfProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; never free it.
 */
const char *pf_version(void);

/**
 * Message for the most recent failure on this thread, or `NULL` if no call
 * has failed yet. Valid until the next failing call on the same thread.
 */
const char *pf_last_error_message(void);

/**
 * Decode a WAV file (PCM16/PCM24/float32, mono or downmixed) into a new
 * audio handle.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum PfStatus pf_audio_read_wav(const char *path, struct PfAudio **out);

/**
 * Build an audio handle from a caller-owned sample buffer (copied).
 *
 * # Safety
 * `samples` must point to `len` readable floats; `out` must be valid.
 */
enum PfStatus pf_audio_from_samples(const float *samples,
                                    size_t len,
                                    uint32_t sample_rate_hz,
                                    struct PfAudio **out);

/**
 * Write an audio handle to a PCM16 WAV file.
 *
 * # Safety
 * `audio` must be a live handle; `path` must be a NUL-terminated string.
 */
enum PfStatus pf_audio_write_wav(const struct PfAudio *audio, const char *path);

/**
 * Number of samples in the handle; 0 for `NULL`.
 *
 * # Safety
 * `audio` must be `NULL` or a live handle.
 */
size_t pf_audio_len(const struct PfAudio *audio);

/**
 * Sample rate in Hz; 0 for `NULL`.
 *
 * # Safety
 * `audio` must be `NULL` or a live handle.
 */
uint32_t pf_audio_sample_rate(const struct PfAudio *audio);

/**
 * Borrow the handle's sample buffer (length `pf_audio_len`). The pointer is
 * valid while the handle lives; `NULL` for a `NULL` handle.
 *
 * # Safety
 * `audio` must be `NULL` or a live handle.
 */
const float *pf_audio_samples(const struct PfAudio *audio);

/**
 * Release an audio handle. Accepts `NULL`.
 *
 * # Safety
 * `audio` must be `NULL` or a pointer from this library, freed at most once.
 */
void pf_audio_free(struct PfAudio *audio);

/**
 * Look up a built-in profile by name ("neutral", "conversational-casual",
 * "conversational-expressive").
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be valid.
 */
enum PfStatus pf_profile_preset(const char *name, struct PfProfile **out);

/**
 * Parse a profile from a JSON object; omitted fields keep their neutral
 * values.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be valid.
 */
enum PfStatus pf_profile_from_json(const char *json, struct PfProfile **out);

/**
 * Release a profile handle. Accepts `NULL`.
 *
 * # Safety
 * `profile` must be `NULL` or a pointer from this library, freed at most
 * once.
 */
void pf_profile_free(struct PfProfile *profile);

/**
 * Apply a prosody profile to audio, producing a new handle.
 *
 * # Safety
 * `audio` and `profile` must be live handles; `out` must be valid.
 */
enum PfStatus pf_convert(const struct PfAudio *audio,
                         const struct PfProfile *profile,
                         struct PfAudio **out);

/**
 * Compare two WAV files with the default evaluation settings and return the
 * metric report as a JSON string. Free the string with `pf_string_free`.
 *
 * # Safety
 * `reference` and `synthesized` must be NUL-terminated strings; `out_json`
 * must be valid.
 */
enum PfStatus pf_evaluate_files(const char *reference, const char *synthesized, char **out_json);

/**
 * Release a string returned by this library. Accepts `NULL`.
 *
 * # Safety
 * `s` must be `NULL` or a pointer from this library, freed at most once.
 */
void pf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROSOFORGE_H */
