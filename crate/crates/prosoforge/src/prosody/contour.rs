//! Pitch-contour reshaping in the log (semitone) domain.

use crate::error::{Error, Result};
use crate::prosody::{ContourKind, PitchContour, ProsodyProfile};

const LN2: f64 = std::f64::consts::LN_2;

/// Rewrites voiced f0 values: around the melody's geometric mean mu,
/// `ln f0' = ln mu + shift·ln2/12 + alpha·(ln f0 − ln mu)`, then a linear
/// semitone ramp of ±extent over the tail of the final voiced run, then a
/// clamp to the contour's own f0 search range. Unvoiced frames pass through
/// untouched.
pub fn transform_contour(
    contour: &PitchContour,
    profile: &ProsodyProfile,
) -> Result<PitchContour> {
    contour.validate()?;
    profile.validate()?;

    let voiced_logs: Vec<f64> = contour
        .f0_hz
        .iter()
        .zip(&contour.voiced)
        .filter(|(_, v)| **v)
        .map(|(f, _)| f.ln())
        .collect();
    if voiced_logs.is_empty() {
        return Err(Error::Validation(
            "nothing to transform: contour has no voiced frames".into(),
        ));
    }
    let ln_mu = voiced_logs.iter().sum::<f64>() / voiced_logs.len() as f64;
    let shift_ln = profile.pitch_shift_semitones * LN2 / 12.0;
    let alpha = profile.pitch_range_scale;

    let mut out = contour.clone();
    // exp(ln f0) is not bit-exact, so the identity mapping skips the log
    // round trip entirely: alpha=1, shift=0 must leave f0 values untouched.
    if shift_ln != 0.0 || alpha != 1.0 {
        for t in 0..out.len() {
            if !out.voiced[t] {
                continue;
            }
            let ln_f0 = contour.f0_hz[t].ln();
            out.f0_hz[t] = (ln_mu + shift_ln + alpha * (ln_f0 - ln_mu)).exp();
        }
    }

    // Terminal ramp over the last voiced run.
    if out.final_ramp_applies(profile) {
        let (run_start, run_end) = last_voiced_run(&out.voiced).expect("voiced run exists");
        let run_len = run_end - run_start;
        let tail_len = ((profile.final_contour.tail_fraction * run_len as f64).round() as usize)
            .min(run_len);
        if tail_len > 0 {
            let t0 = run_end - tail_len;
            let sign = match profile.final_contour.kind {
                ContourKind::Rise => 1.0,
                ContourKind::Fall => -1.0,
                ContourKind::None => unreachable!(),
            };
            for (step, t) in (t0..run_end).enumerate() {
                let progress = (step + 1) as f64 / tail_len as f64;
                let semitones = sign * profile.final_contour.extent_semitones * progress;
                out.f0_hz[t] *= (semitones * LN2 / 12.0).exp();
            }
        }
    }

    for t in 0..out.len() {
        if out.voiced[t] {
            out.f0_hz[t] = out.f0_hz[t].clamp(out.f0_min_hz, out.f0_max_hz);
        }
    }
    Ok(out)
}

impl PitchContour {
    fn final_ramp_applies(&self, profile: &ProsodyProfile) -> bool {
        profile.final_contour.kind != ContourKind::None
            && profile.final_contour.extent_semitones != 0.0
            && profile.final_contour.tail_fraction > 0.0
    }
}

/// Half-open range of the last maximal run of voiced frames.
fn last_voiced_run(voiced: &[bool]) -> Option<(usize, usize)> {
    let end = voiced.iter().rposition(|v| *v)? + 1;
    let mut start = end - 1;
    while start > 0 && voiced[start - 1] {
        start -= 1;
    }
    Some((start, end))
}
