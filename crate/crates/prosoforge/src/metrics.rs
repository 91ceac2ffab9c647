//! Objective and subjective evaluation: mel-cepstral distortion, pitch
//! contour distance, waveform RMSE, MOS aggregation, and a file-level
//! evaluation pipeline that emits JSON reports.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::melspec::{mel_spectrogram, mfcc, MelSpec};
use crate::prosody::{track_pitch, PitchContour, PitchRange};
use crate::signal::{read_wav, resample, AudioBuffer, FrameSpec};

/// Which mel-cepstral distortion formula to apply.
///
/// `Paper` sums squared differences over every frame before the square root
/// and scales by 10·ln10/√2. `Conventional` is the per-frame-averaged form
/// common elsewhere in the literature: (10/ln10)·(1/T)·Σ_t √(2·Σ_k d²).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum McdMode {
    #[default]
    Paper,
    Conventional,
}

impl McdMode {
    pub fn as_str(self) -> &'static str {
        match self {
            McdMode::Paper => "paper",
            McdMode::Conventional => "conventional",
        }
    }
}

impl std::str::FromStr for McdMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(McdMode::Paper),
            "conventional" => Ok(McdMode::Conventional),
            other => Err(Error::Validation(format!(
                "unknown mcd mode {other:?} (expected \"paper\" or \"conventional\")"
            ))),
        }
    }
}

/// Mel-cepstral distortion between two MFCC matrices (frames x K).
/// Frame counts are aligned by truncation to the shorter matrix.
pub fn mcd(reference: &Mat, synthesized: &Mat, mode: McdMode) -> Result<f64> {
    if reference.cols() != synthesized.cols() {
        return Err(Error::Validation(format!(
            "MFCC coefficient counts differ: {} vs {}",
            reference.cols(),
            synthesized.cols()
        )));
    }
    let frames = reference.rows().min(synthesized.rows());
    if frames == 0 || reference.cols() == 0 {
        return Err(Error::Validation("MFCC matrices have no frames".into()));
    }
    let ln10 = std::f64::consts::LN_10;
    match mode {
        McdMode::Paper => {
            let mut total = 0.0;
            for t in 0..frames {
                for (a, b) in reference.row(t).iter().zip(synthesized.row(t)) {
                    total += (a - b) * (a - b);
                }
            }
            Ok(10.0 * ln10 / std::f64::consts::SQRT_2 * total.sqrt())
        }
        McdMode::Conventional => {
            let mut total = 0.0;
            for t in 0..frames {
                let frame_sq: f64 = reference
                    .row(t)
                    .iter()
                    .zip(synthesized.row(t))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                total += (2.0 * frame_sq).sqrt();
            }
            Ok(10.0 / ln10 * total / frames as f64)
        }
    }
}

/// Pitch contour distance: mean squared f0 difference (Hz²) over frames
/// voiced in BOTH contours, after truncation to the common frame count.
/// Returns the distance and the number of frames actually compared.
pub fn pcd(reference: &PitchContour, synthesized: &PitchContour) -> Result<(f64, usize)> {
    if reference.hop_s != synthesized.hop_s {
        return Err(Error::Validation(format!(
            "contour hops differ: {} s vs {} s",
            reference.hop_s, synthesized.hop_s
        )));
    }
    let frames = reference.len().min(synthesized.len());
    let mut total = 0.0;
    let mut compared = 0usize;
    for t in 0..frames {
        if reference.voiced[t] && synthesized.voiced[t] {
            let d = reference.f0_hz[t] - synthesized.f0_hz[t];
            total += d * d;
            compared += 1;
        }
    }
    if compared == 0 {
        return Err(Error::Validation("no comparable voiced frames".into()));
    }
    Ok((total / compared as f64, compared))
}

/// Root-mean-square error between two waveforms at the same sample rate.
/// Lengths must match unless `allow_truncate`, which compares the common
/// prefix.
pub fn rmse(reference: &AudioBuffer, synthesized: &AudioBuffer, allow_truncate: bool) -> Result<f64> {
    if reference.sample_rate_hz() != synthesized.sample_rate_hz() {
        return Err(Error::Validation(format!(
            "sample rates differ: {} vs {}",
            reference.sample_rate_hz(),
            synthesized.sample_rate_hz()
        )));
    }
    if reference.len() != synthesized.len() && !allow_truncate {
        return Err(Error::Validation(format!(
            "lengths differ ({} vs {}) and truncation is not enabled",
            reference.len(),
            synthesized.len()
        )));
    }
    let n = reference.len().min(synthesized.len());
    if n == 0 {
        return Err(Error::Validation("no samples to compare".into()));
    }
    let total: f64 = reference.samples()[..n]
        .iter()
        .zip(&synthesized.samples()[..n])
        .map(|(&a, &b)| {
            let d = f64::from(a) - f64::from(b);
            d * d
        })
        .sum();
    Ok((total / n as f64).sqrt())
}

/// One listener's rating of one sample.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RatingRow {
    pub listener_id: String,
    pub sample_id: String,
    pub rating: f64,
}

/// Subjective listening-test ratings on a bounded scale.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingsTable {
    pub rows: Vec<RatingRow>,
    pub scale_min: f64,
    pub scale_max: f64,
}

impl RatingsTable {
    pub fn new(rows: Vec<RatingRow>) -> Self {
        RatingsTable {
            rows,
            scale_min: 1.0,
            scale_max: 5.0,
        }
    }

    /// Parses `listener_id,sample_id,rating` CSV (header required).
    pub fn from_csv_reader(r: impl Read) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let headers = reader
            .headers()
            .map_err(|e| Error::Format(format!("ratings CSV header: {e}")))?;
        let expected = ["listener_id", "sample_id", "rating"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Format(format!(
                "ratings CSV header must be {}, got {:?}",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Format(format!("ratings CSV row {}: {e}", i + 2)))?;
            if record.len() != 3 {
                return Err(Error::Format(format!(
                    "ratings CSV row {}: expected 3 fields, got {}",
                    i + 2,
                    record.len()
                )));
            }
            let rating: f64 = record[2]
                .parse()
                .map_err(|_| Error::Format(format!("ratings CSV row {}: bad rating {:?}", i + 2, &record[2])))?;
            rows.push(RatingRow {
                listener_id: record[0].to_string(),
                sample_id: record[1].to_string(),
                rating,
            });
        }
        Ok(RatingsTable::new(rows))
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rating.is_finite()
                || row.rating < self.scale_min
                || row.rating > self.scale_max
            {
                return Err(Error::Validation(format!(
                    "row {} (listener {:?}, sample {:?}): rating {} outside [{}, {}]",
                    i + 1,
                    row.listener_id,
                    row.sample_id,
                    row.rating,
                    self.scale_min,
                    self.scale_max
                )));
            }
            if !seen.insert((row.listener_id.clone(), row.sample_id.clone())) {
                return Err(Error::Validation(format!(
                    "row {}: duplicate (listener {:?}, sample {:?})",
                    i + 1,
                    row.listener_id,
                    row.sample_id
                )));
            }
        }
        Ok(())
    }
}

/// Aggregated mean-opinion-score statistics.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MosSummary {
    pub mos: f64,
    pub ci95: f64,
    pub n: usize,
    pub per_sample: BTreeMap<String, f64>,
}

/// Grand-mean MOS with a normal-approximation 95% interval
/// (1.96·sd/√N, sample standard deviation; 0 when N = 1) plus per-sample
/// means.
pub fn mos_aggregate(table: &RatingsTable) -> Result<MosSummary> {
    table.validate()?;
    if table.rows.is_empty() {
        return Err(Error::Validation("ratings table is empty".into()));
    }
    let n = table.rows.len();
    let mean = table.rows.iter().map(|r| r.rating).sum::<f64>() / n as f64;
    let ci95 = if n == 1 {
        0.0
    } else {
        let var = table
            .rows
            .iter()
            .map(|r| (r.rating - mean) * (r.rating - mean))
            .sum::<f64>()
            / (n - 1) as f64;
        1.96 * var.sqrt() / (n as f64).sqrt()
    };
    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for row in &table.rows {
        let e = sums.entry(row.sample_id.clone()).or_insert((0.0, 0));
        e.0 += row.rating;
        e.1 += 1;
    }
    let per_sample = sums
        .into_iter()
        .map(|(k, (sum, count))| (k, sum / count as f64))
        .collect();
    Ok(MosSummary {
        mos: mean,
        ci95,
        n,
        per_sample,
    })
}

/// Everything `evaluate_pair` needs; echoed verbatim into the report.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub frame: FrameSpec,
    pub mel: MelSpec,
    pub pitch: PitchRange,
    pub mfcc_coeffs: usize,
    pub mcd_mode: McdMode,
    pub allow_truncate: bool,
    pub pesq_external: Option<f64>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            frame: FrameSpec::default(),
            mel: MelSpec::default(),
            pitch: PitchRange::default(),
            mfcc_coeffs: 13,
            mcd_mode: McdMode::Paper,
            allow_truncate: false,
            pesq_external: None,
        }
    }
}

/// Pairwise evaluation result; serializes to the report JSON schema.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MetricReport {
    #[serde(rename = "ref")]
    pub ref_path: String,
    pub syn: String,
    pub mcd: f64,
    pub mcd_mode: String,
    pub pcd: Option<f64>,
    pub pcd_skip_reason: Option<String>,
    pub frames_compared: usize,
    pub rmse: Option<f64>,
    pub voiced_fraction_ref: f64,
    pub voiced_fraction_syn: f64,
    pub pesq_external: Option<f64>,
    pub config: EvalConfig,
}

fn stage<T>(label: &str, result: Result<T>) -> Result<T> {
    result.map_err(|e| match e {
        Error::Validation(msg) => Error::Validation(format!("{label}: {msg}")),
        Error::Numeric(msg) => Error::Numeric(format!("{label}: {msg}")),
        other => other,
    })
}

/// Reads two WAV files, resamples the synthesized one to the reference rate,
/// and computes every applicable metric. PCD falls back to a skip reason when
/// the contours share no voiced frames; RMSE is omitted when lengths differ
/// and truncation is off.
pub fn evaluate_pair(
    ref_path: impl AsRef<Path>,
    syn_path: impl AsRef<Path>,
    config: &EvalConfig,
) -> Result<MetricReport> {
    let ref_path = ref_path.as_ref();
    let syn_path = syn_path.as_ref();
    let reference = read_wav(ref_path)?;
    let synthesized = read_wav(syn_path)?;
    let synthesized = if synthesized.sample_rate_hz() == reference.sample_rate_hz() {
        synthesized
    } else {
        stage("resample", resample(&synthesized, reference.sample_rate_hz()))?
    };

    let mfcc_of = |audio: &AudioBuffer| -> Result<Mat> {
        let log_mel = mel_spectrogram(audio, &config.frame, &config.mel)?;
        mfcc(&log_mel, config.mfcc_coeffs)
    };
    let mcd_value = stage(
        "mcd",
        mcd(
            &mfcc_of(&reference)?,
            &mfcc_of(&synthesized)?,
            config.mcd_mode,
        ),
    )?;

    let contour_ref = stage("pitch", track_pitch(&reference, &config.pitch, &config.frame))?;
    let contour_syn = stage("pitch", track_pitch(&synthesized, &config.pitch, &config.frame))?;
    let (pcd_value, pcd_skip_reason, frames_compared) =
        match pcd(&contour_ref, &contour_syn) {
            Ok((value, compared)) => (Some(value), None, compared),
            Err(Error::Validation(msg)) => (None, Some(msg), 0),
            Err(other) => return Err(other),
        };

    let rmse_value = if reference.len() == synthesized.len() || config.allow_truncate {
        Some(stage(
            "rmse",
            rmse(&reference, &synthesized, config.allow_truncate),
        )?)
    } else {
        None
    };

    Ok(MetricReport {
        ref_path: ref_path.display().to_string(),
        syn: syn_path.display().to_string(),
        mcd: mcd_value,
        mcd_mode: config.mcd_mode.as_str().to_string(),
        pcd: pcd_value,
        pcd_skip_reason,
        frames_compared,
        rmse: rmse_value,
        voiced_fraction_ref: contour_ref.voiced_fraction(),
        voiced_fraction_syn: contour_syn.voiced_fraction(),
        pesq_external: config.pesq_external,
        config: config.clone(),
    })
}
