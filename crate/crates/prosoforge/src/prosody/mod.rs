//! Read-to-conversational prosody transformation: pitch tracking, pause
//! segmentation, contour reshaping, time-scale and pitch-scale modification,
//! and emphatic stress.

mod contour;
mod convert;
mod emphasis;
mod pitch;
mod segments;
mod shift;
mod stretch;

pub use contour::transform_contour;
pub use convert::convert;
pub use emphasis::apply_emphasis;
pub use pitch::{track_pitch, PitchRange, CMND_THRESHOLD};
pub use segments::{detect_segments, DEFAULT_MIN_PAUSE_S, DEFAULT_THRESHOLD_RATIO};
pub use shift::{shift_pitch, shift_pitch_uniform, PitchSpan};
pub use stretch::{time_stretch, time_stretch_uniform, Span, TimeMap};

use crate::error::{Error, Result};

/// Per-frame fundamental-frequency track. `f0_hz[t] > 0` exactly on voiced
/// frames; the search range travels with the contour so later transforms
/// know the legal f0 band.
#[derive(Debug, Clone, PartialEq)]
pub struct PitchContour {
    pub f0_hz: Vec<f64>,
    pub voiced: Vec<bool>,
    pub rms: Vec<f64>,
    pub hop_s: f64,
    pub sample_rate_hz: u32,
    pub f0_min_hz: f64,
    pub f0_max_hz: f64,
}

impl PitchContour {
    pub fn len(&self) -> usize {
        self.f0_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f0_hz.is_empty()
    }

    pub fn voiced_count(&self) -> usize {
        self.voiced.iter().filter(|v| **v).count()
    }

    pub fn voiced_fraction(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.voiced_count() as f64 / self.len() as f64
    }

    /// Median over voiced frames; `None` when everything is unvoiced.
    pub fn median_voiced_f0(&self) -> Option<f64> {
        let mut v: Vec<f64> = self
            .f0_hz
            .iter()
            .zip(&self.voiced)
            .filter(|(_, vo)| **vo)
            .map(|(f, _)| *f)
            .collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = v.len();
        Some(if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        })
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.f0_hz.len();
        if self.voiced.len() != n || self.rms.len() != n {
            return Err(Error::Validation(
                "contour field lengths disagree".into(),
            ));
        }
        // NaN hop or bounds must fail, hence the explicit is_nan checks.
        if self.hop_s.is_nan()
            || self.hop_s <= 0.0
            || self.f0_min_hz.is_nan()
            || self.f0_max_hz.is_nan()
            || self.f0_min_hz <= 0.0
            || self.f0_min_hz >= self.f0_max_hz
        {
            return Err(Error::Validation(
                "contour hop or f0 range malformed".into(),
            ));
        }
        for t in 0..n {
            if self.voiced[t] != (self.f0_hz[t] > 0.0) {
                return Err(Error::Validation(format!(
                    "frame {t}: voicing flag disagrees with f0 {}",
                    self.f0_hz[t]
                )));
            }
            if self.voiced[t]
                && !(self.f0_hz[t] >= self.f0_min_hz - 1e-9
                    && self.f0_hz[t] <= self.f0_max_hz + 1e-9)
            {
                return Err(Error::Validation(format!(
                    "frame {t}: f0 {} outside [{}, {}]",
                    self.f0_hz[t], self.f0_min_hz, self.f0_max_hz
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    Speech,
    Pause,
}

/// Half-open frame range `[start_frame, end_frame)` of one kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub start_frame: usize,
    pub end_frame: usize,
    pub kind: SegmentKind,
}

impl Segment {
    pub fn frames(&self) -> usize {
        self.end_frame - self.start_frame
    }
}

/// Tiling of the frame axis into speech and pause segments, plus which
/// speech segments carry emphatic stress.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentMap {
    pub segments: Vec<Segment>,
    /// Indices into `segments` marking emphasis targets (always speech).
    pub emphasis_targets: Vec<usize>,
    pub total_frames: usize,
    /// Samples per frame, for converting frame ranges to sample ranges.
    pub hop: usize,
}

impl PitchContour {
    /// Samples per frame on this contour's grid.
    pub fn hop_samples(&self) -> usize {
        (self.hop_s * f64::from(self.sample_rate_hz)).round() as usize
    }
}

impl SegmentMap {
    /// Sample range of segment `i`; the final segment absorbs the tail so
    /// the ranges tile `[0, total_samples)`.
    pub fn sample_range(&self, i: usize, total_samples: usize) -> (usize, usize) {
        let seg = &self.segments[i];
        let start = (seg.start_frame * self.hop).min(total_samples);
        let end = if i + 1 == self.segments.len() {
            total_samples
        } else {
            (seg.end_frame * self.hop).min(total_samples)
        };
        (start, end)
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::Validation("segment map is empty".into()));
        }
        let mut cursor = 0usize;
        let mut prev_kind: Option<SegmentKind> = None;
        for (i, seg) in self.segments.iter().enumerate() {
            if seg.start_frame != cursor || seg.end_frame <= seg.start_frame {
                return Err(Error::Validation(format!(
                    "segment {i} does not tile the frame axis"
                )));
            }
            if prev_kind == Some(seg.kind) {
                return Err(Error::Validation(format!(
                    "segments {} and {i} share a kind and were not merged",
                    i - 1
                )));
            }
            cursor = seg.end_frame;
            prev_kind = Some(seg.kind);
        }
        if cursor != self.total_frames {
            return Err(Error::Validation(format!(
                "segments cover {cursor} frames, contour has {}",
                self.total_frames
            )));
        }
        for &i in &self.emphasis_targets {
            if i >= self.segments.len() || self.segments[i].kind != SegmentKind::Speech {
                return Err(Error::Validation(format!(
                    "emphasis target {i} is not a speech segment"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ContourKind {
    #[default]
    None,
    Rise,
    Fall,
}

/// Terminal intonation: a linear-in-semitones ramp over the tail of the
/// last voiced run.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct FinalContour {
    pub kind: ContourKind,
    pub extent_semitones: f64,
    pub tail_fraction: f64,
}

impl Default for FinalContour {
    fn default() -> Self {
        FinalContour {
            kind: ContourKind::None,
            extent_semitones: 0.0,
            tail_fraction: 0.2,
        }
    }
}

/// A named bundle of prosody-transformation parameters. Unset JSON fields
/// fall back to the neutral (identity) values.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct ProsodyProfile {
    pub name: String,
    pub pitch_shift_semitones: f64,
    /// Pitch range scale factor: log-distance from the melody's geometric
    /// mean is multiplied by this.
    pub pitch_range_scale: f64,
    pub final_contour: FinalContour,
    pub tempo: f64,
    pub pause_scale: f64,
    pub emphasis_gain_db: f64,
    pub emphasis_top_fraction: f64,
}

impl Default for ProsodyProfile {
    fn default() -> Self {
        ProsodyProfile::neutral()
    }
}

impl ProsodyProfile {
    pub fn neutral() -> Self {
        ProsodyProfile {
            name: "neutral".into(),
            pitch_shift_semitones: 0.0,
            pitch_range_scale: 1.0,
            final_contour: FinalContour::default(),
            tempo: 1.0,
            pause_scale: 1.0,
            emphasis_gain_db: 0.0,
            emphasis_top_fraction: 0.2,
        }
    }

    /// Moderate conversational delivery: slightly widened melody, a touch
    /// faster, longer pauses, falling finals.
    pub fn conversational_casual() -> Self {
        ProsodyProfile {
            name: "conversational-casual".into(),
            pitch_range_scale: 1.3,
            tempo: 1.05,
            pause_scale: 1.4,
            final_contour: FinalContour {
                kind: ContourKind::Fall,
                extent_semitones: 2.0,
                tail_fraction: 0.2,
            },
            ..ProsodyProfile::neutral()
        }
    }

    /// Animated conversational delivery: wide melody, emphatic stress,
    /// rising finals.
    pub fn conversational_expressive() -> Self {
        ProsodyProfile {
            name: "conversational-expressive".into(),
            pitch_range_scale: 1.5,
            emphasis_gain_db: 4.0,
            final_contour: FinalContour {
                kind: ContourKind::Rise,
                extent_semitones: 3.0,
                tail_fraction: 0.2,
            },
            ..ProsodyProfile::neutral()
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "neutral" => Some(ProsodyProfile::neutral()),
            "conversational-casual" => Some(ProsodyProfile::conversational_casual()),
            "conversational-expressive" => Some(ProsodyProfile::conversational_expressive()),
            _ => None,
        }
    }

    pub const PRESET_NAMES: &'static [&'static str] = &[
        "neutral",
        "conversational-casual",
        "conversational-expressive",
    ];

    pub fn from_json(json: &str) -> Result<Self> {
        let profile: ProsodyProfile = serde_json::from_str(json)
            .map_err(|e| Error::Format(format!("profile JSON: {e}")))?;
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("tempo", self.tempo, 0.5, 2.0),
            ("pitch_range_scale", self.pitch_range_scale, 0.25, 4.0),
            ("pause_scale", self.pause_scale, 0.25, 4.0),
            ("emphasis_gain_db", self.emphasis_gain_db, 0.0, 12.0),
            (
                "emphasis_top_fraction",
                self.emphasis_top_fraction,
                0.0,
                1.0,
            ),
            (
                "final_contour.tail_fraction",
                self.final_contour.tail_fraction,
                0.0,
                1.0,
            ),
        ];
        for (name, v, lo, hi) in checks {
            if !v.is_finite() || v < lo || v > hi {
                return Err(Error::Validation(format!(
                    "{name} = {v} outside [{lo}, {hi}]"
                )));
            }
        }
        if !self.pitch_shift_semitones.is_finite()
            || self.pitch_shift_semitones.abs() > 24.0
        {
            return Err(Error::Validation(format!(
                "pitch_shift_semitones = {} outside [-24, 24]",
                self.pitch_shift_semitones
            )));
        }
        if !self.final_contour.extent_semitones.is_finite()
            || self.final_contour.extent_semitones.abs() > 12.0
        {
            return Err(Error::Validation(format!(
                "final_contour.extent_semitones = {} outside [-12, 12]",
                self.final_contour.extent_semitones
            )));
        }
        Ok(())
    }
}
