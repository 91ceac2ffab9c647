//! Pitch-scale modification. Each span is redrawn on a denser or sparser
//! grid (raising or lowering pitch by the ratio, shortening or lengthening
//! it), then WSOLA-stretched back to the span's exact original length.
//! Formants move with the pitch; duration is preserved to the sample.

use crate::error::{Error, Result};
use crate::prosody::stretch::{wsola, Span, TimeMap};
use crate::signal::{resample_by, AudioBuffer};

pub const RATIO_MIN: f64 = 0.5;
pub const RATIO_MAX: f64 = 2.0;

/// Half-open input range with a pitch ratio (2.0 = up an octave).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchSpan {
    pub start: usize,
    pub end: usize,
    pub ratio: f64,
}

/// Uniform-ratio convenience wrapper around [`shift_pitch`].
pub fn shift_pitch_uniform(audio: &AudioBuffer, ratio: f64) -> Result<AudioBuffer> {
    shift_pitch(
        audio,
        &[PitchSpan {
            start: 0,
            end: audio.len(),
            ratio,
        }],
    )
}

pub fn shift_pitch(audio: &AudioBuffer, spans: &[PitchSpan]) -> Result<AudioBuffer> {
    if audio.is_empty() {
        return Err(Error::Validation("pitch shift of empty signal".into()));
    }
    let mut cursor = 0usize;
    for (i, span) in spans.iter().enumerate() {
        if !(RATIO_MIN..=RATIO_MAX).contains(&span.ratio) {
            return Err(Error::Validation(format!(
                "span {i} ratio {} outside [{RATIO_MIN}, {RATIO_MAX}]",
                span.ratio
            )));
        }
        if span.start != cursor || span.end <= span.start {
            return Err(Error::Validation(format!(
                "span {i} does not tile the input: [{}, {})",
                span.start, span.end
            )));
        }
        cursor = span.end;
    }
    if cursor != audio.len() {
        return Err(Error::Validation(format!(
            "spans cover {cursor} samples, signal has {}",
            audio.len()
        )));
    }
    if spans.iter().all(|s| s.ratio == 1.0) {
        return Ok(audio.clone());
    }

    let sr = audio.sample_rate_hz();
    let mut out = Vec::with_capacity(audio.len());
    for span in spans {
        let piece = &audio.samples()[span.start..span.end];
        let len = piece.len();
        if span.ratio == 1.0 {
            out.extend_from_slice(piece);
            continue;
        }
        // Redraw on a grid 1/ratio as long: pitch scales by ratio.
        let sped = resample_by(piece, 1.0 / span.ratio);
        let sped_len = sped.len();
        let sped_buf = AudioBuffer::new(sped, sr)?;
        // Stretch back to the exact original length.
        let map = TimeMap::new(
            &[Span {
                start: 0,
                end: sped_len,
                rate: sped_len as f64 / len as f64,
            }],
            sped_len,
        )?;
        debug_assert_eq!(map.out_len(), len);
        let restored = wsola(&sped_buf, &map)?;
        out.extend_from_slice(restored.samples());
    }
    AudioBuffer::new(out, sr).map(AudioBuffer::peak_limited)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prosody::{track_pitch, PitchRange};
    use crate::signal::FrameSpec;
    use crate::synth;

    fn median_f0(audio: &AudioBuffer) -> f64 {
        track_pitch(audio, &PitchRange::default(), &FrameSpec::default())
            .unwrap()
            .median_voiced_f0()
            .unwrap()
    }

    #[test]
    fn ratio_one_is_identity() {
        let audio = synth::speech_like(140.0, 16000, 1.0, 8).unwrap();
        let out = shift_pitch_uniform(&audio, 1.0).unwrap();
        assert_eq!(out, audio);
    }

    #[test]
    fn tone_150_up_an_octave() {
        let audio = synth::tone(150.0, 16000, 1.5).unwrap();
        let out = shift_pitch_uniform(&audio, 2.0).unwrap();
        assert_eq!(out.len(), audio.len());
        let f0 = median_f0(&out);
        assert!((f0 - 300.0).abs() / 300.0 <= 0.02, "tracked {f0}");
    }

    #[test]
    fn tone_300_down_an_octave() {
        let audio = synth::tone(300.0, 16000, 1.5).unwrap();
        let out = shift_pitch_uniform(&audio, 0.5).unwrap();
        assert_eq!(out.len(), audio.len());
        let f0 = median_f0(&out);
        assert!((f0 - 150.0).abs() / 150.0 <= 0.02, "tracked {f0}");
    }

    #[test]
    fn round_trip_restores_pitch() {
        let audio = synth::tone(200.0, 16000, 1.5).unwrap();
        let up = shift_pitch_uniform(&audio, 1.5).unwrap();
        let back = shift_pitch_uniform(&up, 1.0 / 1.5).unwrap();
        let f0 = median_f0(&back);
        assert!((f0 - 200.0).abs() / 200.0 <= 0.03, "tracked {f0}");
        assert_eq!(back.len(), audio.len());
    }

    #[test]
    fn per_span_ratios_apply_locally() {
        // First half up, second half unchanged.
        let audio = synth::tone(200.0, 16000, 2.0).unwrap();
        let spans = [
            PitchSpan {
                start: 0,
                end: 16000,
                ratio: 1.5,
            },
            PitchSpan {
                start: 16000,
                end: 32000,
                ratio: 1.0,
            },
        ];
        let out = shift_pitch(&audio, &spans).unwrap();
        assert_eq!(out.len(), 32000);
        let first = AudioBuffer::new(out.samples()[2000..14000].to_vec(), 16000).unwrap();
        let second = AudioBuffer::new(out.samples()[18000..30000].to_vec(), 16000).unwrap();
        let f1 = median_f0(&first);
        let f2 = median_f0(&second);
        assert!((f1 - 300.0).abs() / 300.0 <= 0.02, "first {f1}");
        assert!((f2 - 200.0).abs() / 200.0 <= 0.02, "second {f2}");
    }

    #[test]
    fn out_of_range_ratio_rejected() {
        let audio = synth::tone(200.0, 16000, 0.5).unwrap();
        assert!(shift_pitch_uniform(&audio, 0.4).is_err());
        assert!(shift_pitch_uniform(&audio, 2.4).is_err());
    }
}
