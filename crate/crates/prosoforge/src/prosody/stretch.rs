//! WSOLA time-scale modification: 25 ms frames placed every half frame on
//! the output axis, each copied from the input near a piecewise-linear time
//! map, aligned within a ±5 ms tolerance by cross-correlation against the
//! natural continuation of the previous frame, and overlap-added under a
//! Hann window. Changes duration, preserves pitch.

use crate::error::{Error, Result};
use crate::signal::AudioBuffer;

/// Half-open input sample range stretched at a constant rate:
/// `rate > 1` speeds up (shortens), `rate < 1` slows down (lengthens).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub rate: f64,
}

pub const RATE_MIN: f64 = 0.5;
pub const RATE_MAX: f64 = 2.0;

#[derive(Debug, Clone, Copy)]
struct Piece {
    in_start: usize,
    in_end: usize,
    out_start: usize,
    out_end: usize,
}

/// Monotone piecewise-linear map between input and output sample positions.
/// Each span's output length is `round(len / rate)`, so span boundaries land
/// on exact integers in both coordinate systems.
#[derive(Debug, Clone)]
pub struct TimeMap {
    pieces: Vec<Piece>,
    in_len: usize,
    out_len: usize,
}

impl TimeMap {
    pub(crate) fn new(spans: &[Span], in_len: usize) -> Result<Self> {
        if spans.is_empty() {
            return Err(Error::Validation("no stretch spans given".into()));
        }
        let mut pieces = Vec::with_capacity(spans.len());
        let mut in_cursor = 0usize;
        let mut out_cursor = 0usize;
        for (i, span) in spans.iter().enumerate() {
            if span.start != in_cursor || span.end <= span.start {
                return Err(Error::Validation(format!(
                    "span {i} does not tile the input: [{}, {})",
                    span.start, span.end
                )));
            }
            if !(span.rate.is_finite() && span.rate > 0.0) {
                return Err(Error::Validation(format!(
                    "span {i} rate {} not positive",
                    span.rate
                )));
            }
            let len = span.end - span.start;
            let out_len = ((len as f64 / span.rate).round() as usize).max(1);
            pieces.push(Piece {
                in_start: span.start,
                in_end: span.end,
                out_start: out_cursor,
                out_end: out_cursor + out_len,
            });
            in_cursor = span.end;
            out_cursor += out_len;
        }
        if in_cursor != in_len {
            return Err(Error::Validation(format!(
                "spans cover {in_cursor} samples, signal has {in_len}"
            )));
        }
        Ok(TimeMap {
            pieces,
            in_len,
            out_len: out_cursor,
        })
    }

    pub fn out_len(&self) -> usize {
        self.out_len
    }

    /// Input position for output position `m` (fractional).
    fn input_pos(&self, m: usize) -> f64 {
        let i = self
            .pieces
            .partition_point(|p| p.out_end <= m)
            .min(self.pieces.len() - 1);
        let p = &self.pieces[i];
        let in_span = (p.in_end - p.in_start) as f64;
        let out_span = (p.out_end - p.out_start) as f64;
        p.in_start as f64 + (m.min(p.out_end) - p.out_start) as f64 * in_span / out_span
    }

    /// Output position for an input boundary position. Span boundaries map
    /// exactly; interior positions round to the nearest output sample.
    pub fn forward(&self, x: usize) -> usize {
        if x >= self.in_len {
            return self.out_len;
        }
        let i = self
            .pieces
            .partition_point(|p| p.in_end <= x)
            .min(self.pieces.len() - 1);
        let p = &self.pieces[i];
        let in_span = (p.in_end - p.in_start) as f64;
        let out_span = (p.out_end - p.out_start) as f64;
        p.out_start + ((x - p.in_start) as f64 * out_span / in_span).round() as usize
    }
}

/// Uniform-rate convenience wrapper around [`time_stretch`].
pub fn time_stretch_uniform(audio: &AudioBuffer, rate: f64) -> Result<AudioBuffer> {
    time_stretch(
        audio,
        &[Span {
            start: 0,
            end: audio.len(),
            rate,
        }],
    )
}

pub fn time_stretch(audio: &AudioBuffer, spans: &[Span]) -> Result<AudioBuffer> {
    for (i, span) in spans.iter().enumerate() {
        if !(RATE_MIN..=RATE_MAX).contains(&span.rate) {
            return Err(Error::Validation(format!(
                "span {i} rate {} outside [{RATE_MIN}, {RATE_MAX}]",
                span.rate
            )));
        }
    }
    if audio.is_empty() {
        return Err(Error::Validation("time stretch of empty signal".into()));
    }
    if spans.iter().all(|s| s.rate == 1.0) {
        // Exact identity; also keeps rate-1 output bit-identical to input.
        TimeMap::new(spans, audio.len())?;
        return Ok(audio.clone());
    }
    let map = TimeMap::new(spans, audio.len())?;
    wsola(audio, &map)
}

/// Core WSOLA synthesis against an arbitrary time map.
pub(crate) fn wsola(audio: &AudioBuffer, map: &TimeMap) -> Result<AudioBuffer> {
    let sr = audio.sample_rate_hz();
    let x = audio.samples();
    let n = x.len();
    let l_out = map.out_len();

    // Frame 25 ms (forced even for an exact half-frame hop), tolerance 5 ms.
    let frame = 2 * ((0.0125 * f64::from(sr)).round() as usize).max(2);
    let hop = frame / 2;
    let tol = (0.005 * f64::from(sr)).round() as isize;

    if n <= frame || l_out <= frame {
        // Too short for overlap-add; nearest-sample redraw along the map.
        let samples = (0..l_out)
            .map(|m| {
                let pos = map.input_pos(m).round() as usize;
                x[pos.min(n - 1)]
            })
            .collect();
        return AudioBuffer::new(samples, sr);
    }

    let window: Vec<f64> = (0..frame)
        .map(|j| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * j as f64 / frame as f64).cos())
        .collect();
    let read = |pos: usize| -> f64 {
        if pos < n {
            f64::from(x[pos])
        } else {
            0.0
        }
    };

    let mut acc = vec![0.0f64; l_out + frame];
    let mut wsum = vec![0.0f64; l_out + frame];
    let mut prev_start: Option<usize> = None;

    let mut out_pos = 0usize;
    while out_pos < l_out {
        let nominal = map.input_pos(out_pos).round() as isize;
        let chosen = match prev_start {
            None => nominal.clamp(0, n as isize - 1) as usize,
            Some(prev) => {
                // Reference: the natural continuation of the previous copy.
                let cont = prev + hop;
                let mut best_s = nominal.clamp(0, n as isize - 1) as usize;
                let mut best_ncc = f64::MIN;
                // Candidates ordered by distance from nominal so ties keep
                // the time map honest.
                for k in 0..=(2 * tol) {
                    let offset = if k % 2 == 0 { k / 2 } else { -(k / 2 + 1) };
                    let s = nominal + offset;
                    if s < 0 || s >= n as isize {
                        continue;
                    }
                    let s = s as usize;
                    let mut dot = 0.0f64;
                    let mut ea = 0.0f64;
                    let mut eb = 0.0f64;
                    for j in 0..frame {
                        let a = read(s + j);
                        let b = read(cont + j);
                        dot += a * b;
                        ea += a * a;
                        eb += b * b;
                    }
                    let ncc = dot / (ea * eb + 1e-12).sqrt();
                    if ncc > best_ncc {
                        best_ncc = ncc;
                        best_s = s;
                    }
                }
                best_s
            }
        };

        for j in 0..frame {
            acc[out_pos + j] += window[j] * read(chosen + j);
            wsum[out_pos + j] += window[j];
        }
        prev_start = Some(chosen);
        out_pos += hop;
    }

    let samples = (0..l_out)
        .map(|i| {
            if wsum[i] > 1e-6 {
                (acc[i] / wsum[i]) as f32
            } else {
                acc[i] as f32
            }
        })
        .collect();
    AudioBuffer::new(samples, sr).map(AudioBuffer::peak_limited)
}
