//! Command-line surface: one binary, subcommand per pipeline stage.
//!
//! Exit codes are stable for scripting: 0 success, 1 usage error, 2 I/O or
//! file-format error, 3 validation or computation error. Configuration comes
//! from a JSON file (`--config`, or the `PROSOFORGE_CONFIG` environment
//! variable) with individual flags overriding file values. Every command is
//! deterministic: rerunning with the same inputs produces byte-identical
//! artifacts.

mod artifacts;

pub use artifacts::{dump_waveform_csv, mel_pgm_bytes, render_mel_pgm, waveform_csv_bytes};

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::dataset;
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::melspec::{build_mel_filterbank, mel_spectrogram, MelSpec};
use crate::metrics::{evaluate_pair, mos_aggregate, EvalConfig, McdMode, RatingsTable};
use crate::prosody::{
    convert, detect_segments, track_pitch, PitchRange, ProsodyProfile, SegmentKind,
    DEFAULT_MIN_PAUSE_S, DEFAULT_THRESHOLD_RATIO,
};
use crate::signal::{read_tensor, read_wav, write_tensor, write_wav, FrameSpec, Tensor};
use crate::vocoder::{
    generator_forward, griffin_lim, mel_pseudo_inverse, toy_training_run, GeneratorConfig,
    WeightStore,
};

pub const CONFIG_ENV_VAR: &str = "PROSOFORGE_CONFIG";

/// Vocoding back end for `vocode`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum VocoderMethod {
    #[default]
    Griffinlim,
    Gan,
}

/// Full run configuration: framing, mel, pitch, profile, metric, and vocoder
/// options. JSON fields all optional; unset fields take these defaults.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub sample_rate_hz: u32,
    pub frame: FrameSpec,
    pub mel: MelSpec,
    pub pitch: PitchRange,
    /// Preset name or path to a profile JSON file.
    pub profile: String,
    pub mcd_mode: McdMode,
    pub mfcc_coeffs: usize,
    pub allow_truncate: bool,
    pub vocoder: VocoderMethod,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            sample_rate_hz: 16_000,
            frame: FrameSpec::default(),
            mel: MelSpec::default(),
            pitch: PitchRange::default(),
            profile: "neutral".into(),
            mcd_mode: McdMode::Paper,
            mfcc_coeffs: 13,
            allow_truncate: false,
            vocoder: VocoderMethod::Griffinlim,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.frame.validate()?;
        self.mel.validate(self.sample_rate_hz)?;
        self.pitch.validate(self.sample_rate_hz)?;
        if self.mfcc_coeffs == 0 || self.mfcc_coeffs >= self.mel.n_mels {
            return Err(Error::Validation(format!(
                "mfcc_coeffs {} must lie in [1, n_mels {})",
                self.mfcc_coeffs, self.mel.n_mels
            )));
        }
        Ok(())
    }

    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            frame: self.frame,
            mel: self.mel,
            pitch: self.pitch,
            mfcc_coeffs: self.mfcc_coeffs,
            mcd_mode: self.mcd_mode,
            allow_truncate: self.allow_truncate,
            pesq_external: None,
        }
    }

    /// Resolves the profile field: preset name first, then JSON file path.
    pub fn resolve_profile(&self) -> Result<ProsodyProfile> {
        if let Some(p) = ProsodyProfile::preset(&self.profile) {
            return Ok(p);
        }
        let path = Path::new(&self.profile);
        if !path.exists() {
            return Err(Error::Validation(format!(
                "profile {:?} is neither a preset ({}) nor a file",
                self.profile,
                ProsodyProfile::PRESET_NAMES.join(", ")
            )));
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ProsodyProfile::from_json(&text)
    }
}

/// Loads the config file named by `--config` or `PROSOFORGE_CONFIG`;
/// defaults when neither is set.
pub fn load_run_config(explicit: Option<&Path>) -> Result<RunConfig> {
    let path = match explicit {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::var_os(CONFIG_ENV_VAR).map(PathBuf::from),
    };
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Format(format!("config {}: {e}", path.display())))
}

#[derive(Debug, Parser)]
#[command(
    name = "prosoforge",
    version,
    about = "Prosody toolkit: convert read speech toward conversational delivery, \
             vocode mel spectrograms, and score the result"
)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Flags that override config-file values (flags win).
#[derive(Debug, Default, Args)]
struct Overrides {
    /// JSON config file; overrides PROSOFORGE_CONFIG
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    sample_rate_hz: Option<u32>,
    #[arg(long, global = true)]
    n_fft: Option<usize>,
    #[arg(long, global = true)]
    hop: Option<usize>,
    #[arg(long, global = true)]
    n_mels: Option<usize>,
    #[arg(long, global = true)]
    fmin_hz: Option<f64>,
    #[arg(long, global = true)]
    fmax_hz: Option<f64>,
    #[arg(long, global = true)]
    f0_min_hz: Option<f64>,
    #[arg(long, global = true)]
    f0_max_hz: Option<f64>,
    /// Prosody profile: preset name or JSON file path
    #[arg(long, global = true)]
    profile: Option<String>,
    #[arg(long, global = true)]
    mcd_mode: Option<McdMode>,
    #[arg(long, global = true)]
    mfcc_coeffs: Option<usize>,
    /// Compare only the common prefix when waveform lengths differ
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    allow_truncate: Option<bool>,
    #[arg(long, global = true)]
    vocoder: Option<VocoderMethod>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

impl Overrides {
    fn apply(&self, mut cfg: RunConfig) -> RunConfig {
        macro_rules! set {
            ($($field:expr => $opt:expr),* $(,)?) => {
                $(if let Some(v) = $opt { $field = v; })*
            };
        }
        set! {
            cfg.sample_rate_hz => self.sample_rate_hz,
            cfg.frame.n_fft => self.n_fft,
            cfg.frame.hop => self.hop,
            cfg.mel.n_mels => self.n_mels,
            cfg.mel.fmin_hz => self.fmin_hz,
            cfg.mel.fmax_hz => self.fmax_hz.map(Some),
            cfg.pitch.f0_min_hz => self.f0_min_hz,
            cfg.pitch.f0_max_hz => self.f0_max_hz,
            cfg.profile => self.profile.clone(),
            cfg.mcd_mode => self.mcd_mode,
            cfg.mfcc_coeffs => self.mfcc_coeffs,
            cfg.allow_truncate => self.allow_truncate,
            cfg.vocoder => self.vocoder,
            cfg.seed => self.seed,
        }
        cfg
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert read speech toward conversational delivery
    Convert { input: PathBuf, output: PathBuf },
    /// Track pitch and segment speech/pauses; emits CSVs and a JSON summary
    Analyze {
        input: PathBuf,
        /// Write the per-frame contour CSV here
        #[arg(long, value_name = "CSV")]
        contour: Option<PathBuf>,
        /// Write the segment table CSV here
        #[arg(long, value_name = "CSV")]
        segments: Option<PathBuf>,
    },
    /// Compute a mel spectrogram into a tensor file, optionally a PGM image
    Melspec {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, value_name = "PGM")]
        pgm: Option<PathBuf>,
    },
    /// Invert a mel-spectrogram tensor back to a waveform
    Vocode {
        input: PathBuf,
        output: PathBuf,
        /// Weight store for the gan method
        #[arg(long, value_name = "FILE")]
        weights: Option<PathBuf>,
        /// Generator topology JSON for the gan method
        #[arg(long, value_name = "JSON")]
        generator_config: Option<PathBuf>,
        /// Griffin-Lim iteration count
        #[arg(long, default_value_t = 60)]
        iterations: usize,
    },
    /// Score a synthesized file against a reference; prints a JSON report
    Eval {
        reference: PathBuf,
        synthesized: PathBuf,
        #[arg(long, value_name = "JSON")]
        output: Option<PathBuf>,
    },
    /// Aggregate listener ratings from CSV into MOS statistics
    Mos {
        ratings: PathBuf,
        #[arg(long, value_name = "JSON")]
        output: Option<PathBuf>,
    },
    /// Corpus ingestion and chunking
    Dataset {
        #[command(subcommand)]
        command: DatasetCommand,
    },
    /// Tiny SPSA training demo; writes a loss-curve CSV
    TrainToy {
        output: PathBuf,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Also save the trained weight store here
        #[arg(long, value_name = "FILE")]
        weights: Option<PathBuf>,
    },
    /// Emit plot artifacts from a waveform
    #[command(group(
        clap::ArgGroup::new("artifact").required(true).multiple(true).args(["waveform", "mel_pgm"])
    ))]
    Plot {
        input: PathBuf,
        /// Waveform CSV output path
        #[arg(long, value_name = "CSV")]
        waveform: Option<PathBuf>,
        /// Mel spectrogram PGM output path
        #[arg(long, value_name = "PGM")]
        mel_pgm: Option<PathBuf>,
        /// Keep every Nth sample in the waveform CSV
        #[arg(long, default_value_t = 1)]
        decimate: usize,
    },
}

#[derive(Debug, Subcommand)]
enum DatasetCommand {
    /// Scan a directory tree of WAVs into a JSONL manifest
    Ingest {
        root: PathBuf,
        output: PathBuf,
        /// JSON list of {"glob", "style"} rules
        #[arg(long, value_name = "JSON")]
        style_rules: Option<PathBuf>,
    },
    /// Split a recording into chunks, cutting at pauses when possible
    Segment {
        input: PathBuf,
        out_dir: PathBuf,
        #[arg(long, default_value_t = dataset::DEFAULT_MAX_CHUNK_S)]
        max_len_s: f64,
    },
}

/// Parses argv and runs; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("prosoforge: {e}");
            i32::from(e.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let cfg = cli.overrides.apply(load_run_config(cli.overrides.config.as_deref())?);
    // reject bad configuration before any command opens an output file
    cfg.validate()?;
    match cli.command {
        Command::Convert { input, output } => cmd_convert(&cfg, &input, &output),
        Command::Analyze {
            input,
            contour,
            segments,
        } => cmd_analyze(&cfg, &input, contour.as_deref(), segments.as_deref()),
        Command::Melspec { input, output, pgm } => {
            cmd_melspec(&cfg, &input, &output, pgm.as_deref())
        }
        Command::Vocode {
            input,
            output,
            weights,
            generator_config,
            iterations,
        } => cmd_vocode(
            &cfg,
            &input,
            &output,
            weights.as_deref(),
            generator_config.as_deref(),
            iterations,
        ),
        Command::Eval {
            reference,
            synthesized,
            output,
        } => cmd_eval(&cfg, &reference, &synthesized, output.as_deref()),
        Command::Mos { ratings, output } => cmd_mos(&ratings, output.as_deref()),
        Command::Dataset { command } => match command {
            DatasetCommand::Ingest {
                root,
                output,
                style_rules,
            } => cmd_ingest(&root, &output, style_rules.as_deref()),
            DatasetCommand::Segment {
                input,
                out_dir,
                max_len_s,
            } => cmd_segment(&input, &out_dir, max_len_s),
        },
        Command::TrainToy {
            output,
            steps,
            weights,
        } => cmd_train_toy(&cfg, &output, steps, weights.as_deref()),
        Command::Plot {
            input,
            waveform,
            mel_pgm,
            decimate,
        } => cmd_plot(&cfg, &input, waveform.as_deref(), mel_pgm.as_deref(), decimate),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn emit_json(value: &serde_json::Value, output: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    if let Some(path) = output {
        write_text(path, &text)?;
    }
    print!("{text}");
    Ok(())
}

fn cmd_convert(cfg: &RunConfig, input: &Path, output: &Path) -> Result<()> {
    let profile = cfg.resolve_profile()?;
    let audio = read_wav(input)?;
    let converted = convert(&audio, &profile)?;
    write_wav(output, &converted)?;
    emit_json(
        &serde_json::json!({
            "profile": profile.name,
            "input_s": audio.duration_s(),
            "output_s": converted.duration_s(),
        }),
        None,
    )
}

fn cmd_analyze(
    cfg: &RunConfig,
    input: &Path,
    contour_out: Option<&Path>,
    segments_out: Option<&Path>,
) -> Result<()> {
    let audio = read_wav(input)?;
    let contour = track_pitch(&audio, &cfg.pitch, &cfg.frame)?;
    let map = detect_segments(&contour, DEFAULT_MIN_PAUSE_S, DEFAULT_THRESHOLD_RATIO, 0.2)?;

    if let Some(path) = contour_out {
        let mut text = String::from("frame,time_s,f0_hz,voiced,rms\n");
        for t in 0..contour.len() {
            text.push_str(&format!(
                "{t},{},{},{},{}\n",
                t as f64 * contour.hop_s,
                contour.f0_hz[t],
                u8::from(contour.voiced[t]),
                contour.rms[t]
            ));
        }
        write_text(path, &text)?;
    }
    if let Some(path) = segments_out {
        let hop_s = contour.hop_s;
        let mut text = String::from("index,kind,start_s,end_s,emphasis\n");
        for (i, seg) in map.segments.iter().enumerate() {
            let kind = match seg.kind {
                SegmentKind::Speech => "speech",
                SegmentKind::Pause => "pause",
            };
            text.push_str(&format!(
                "{i},{kind},{},{},{}\n",
                seg.start_frame as f64 * hop_s,
                seg.end_frame as f64 * hop_s,
                u8::from(map.emphasis_targets.contains(&i))
            ));
        }
        write_text(path, &text)?;
    }

    let pauses = map
        .segments
        .iter()
        .filter(|s| s.kind == SegmentKind::Pause)
        .count();
    emit_json(
        &serde_json::json!({
            "duration_s": audio.duration_s(),
            "frames": contour.len(),
            "voiced_fraction": contour.voiced_fraction(),
            "median_f0_hz": contour.median_voiced_f0(),
            "segments": map.segments.len(),
            "pauses": pauses,
        }),
        None,
    )
}

fn mel_to_tensor(mel: &Mat) -> Tensor {
    let data: Vec<f32> = mel.iter().map(|v| v as f32).collect();
    Tensor::new(vec![mel.rows() as u64, mel.cols() as u64], data).expect("dims match data")
}

fn tensor_to_mat(tensor: &Tensor, context: &str) -> Result<Mat> {
    let [rows, cols] = tensor.dims[..] else {
        return Err(Error::Validation(format!(
            "{context}: expected a 2-d tensor, got {} dims",
            tensor.dims.len()
        )));
    };
    let data: Vec<f64> = tensor.data.iter().map(|&v| f64::from(v)).collect();
    Ok(Mat::from_vec(rows as usize, cols as usize, data))
}

fn cmd_melspec(cfg: &RunConfig, input: &Path, output: &Path, pgm: Option<&Path>) -> Result<()> {
    let audio = read_wav(input)?;
    let mel = mel_spectrogram(&audio, &cfg.frame, &cfg.mel)?;
    write_tensor(output, &mel_to_tensor(&mel))?;
    if let Some(path) = pgm {
        render_mel_pgm(&mel, path)?;
    }
    emit_json(
        &serde_json::json!({
            "frames": mel.rows(),
            "n_mels": mel.cols(),
            "sample_rate_hz": audio.sample_rate_hz(),
        }),
        None,
    )
}

fn cmd_vocode(
    cfg: &RunConfig,
    input: &Path,
    output: &Path,
    weights: Option<&Path>,
    generator_config: Option<&Path>,
    iterations: usize,
) -> Result<()> {
    let log_mel = tensor_to_mat(&read_tensor(input)?, "mel tensor")?;
    match cfg.vocoder {
        VocoderMethod::Griffinlim => {
            if log_mel.cols() != cfg.mel.n_mels {
                return Err(Error::Validation(format!(
                    "mel tensor has {} bands, config expects {}",
                    log_mel.cols(),
                    cfg.mel.n_mels
                )));
            }
            let bank = build_mel_filterbank(cfg.sample_rate_hz, cfg.frame.n_fft, &cfg.mel)?;
            let mag = mel_pseudo_inverse(&log_mel, &bank)?;
            let result = griffin_lim(&mag, &cfg.frame, iterations, cfg.sample_rate_hz)?;
            write_wav(output, &result.audio)?;
            emit_json(
                &serde_json::json!({
                    "method": "griffinlim",
                    "iterations": iterations,
                    "sc_initial": result.sc_initial,
                    "sc_final": result.sc_final,
                    "samples": result.audio.len(),
                }),
                None,
            )
        }
        VocoderMethod::Gan => {
            let weights = weights.ok_or_else(|| {
                Error::Validation("the gan vocoder needs --weights".into())
            })?;
            let store = WeightStore::load(weights)?;
            let config = match generator_config {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                    GeneratorConfig::from_json(&text)?
                }
                None => GeneratorConfig::default(),
            };
            let audio = generator_forward(&log_mel, &config, &store, cfg.sample_rate_hz)?;
            write_wav(output, &audio)?;
            emit_json(
                &serde_json::json!({
                    "method": "gan",
                    "samples": audio.len(),
                    "parameters": store.parameter_count(),
                }),
                None,
            )
        }
    }
}

fn cmd_eval(cfg: &RunConfig, reference: &Path, synthesized: &Path, output: Option<&Path>) -> Result<()> {
    let report = evaluate_pair(reference, synthesized, &cfg.eval_config())?;
    let value = serde_json::to_value(&report).expect("report serializes");
    emit_json(&value, output)
}

fn cmd_mos(ratings: &Path, output: Option<&Path>) -> Result<()> {
    let table = RatingsTable::from_csv_path(ratings)?;
    let summary = mos_aggregate(&table)?;
    let value = serde_json::to_value(&summary).expect("summary serializes");
    emit_json(&value, output)
}

fn cmd_ingest(root: &Path, output: &Path, style_rules: Option<&Path>) -> Result<()> {
    let rules = match style_rules {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            dataset::style_rules_from_json(&text)?
        }
        None => Vec::new(),
    };
    let manifest = dataset::ingest(root, &rules)?;
    manifest.save(output)?;
    emit_json(
        &serde_json::json!({
            "entries": manifest.entries.len(),
            "skipped": manifest.skipped,
        }),
        None,
    )
}

fn cmd_segment(input: &Path, out_dir: &Path, max_len_s: f64) -> Result<()> {
    let audio = read_wav(input)?;
    let chunks = dataset::segment(&audio, max_len_s, DEFAULT_MIN_PAUSE_S, DEFAULT_THRESHOLD_RATIO)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "chunk".into());
    let mut index = String::from("index,offset_samples,length_samples,file\n");
    for (i, chunk) in chunks.iter().enumerate() {
        let name = format!("{stem}.seg{i:03}.wav");
        write_wav(out_dir.join(&name), &chunk.audio)?;
        index.push_str(&format!("{i},{},{},{name}\n", chunk.offset, chunk.audio.len()));
    }
    write_text(&out_dir.join(format!("{stem}.segments.csv")), &index)?;
    emit_json(&serde_json::json!({ "chunks": chunks.len() }), None)
}

fn cmd_train_toy(cfg: &RunConfig, output: &Path, steps: usize, weights: Option<&Path>) -> Result<()> {
    let (store, losses) = toy_training_run(cfg.seed, steps)?;
    let mut text = String::from("step,loss\n");
    for (i, loss) in losses.iter().enumerate() {
        text.push_str(&format!("{i},{loss}\n"));
    }
    write_text(output, &text)?;
    if let Some(path) = weights {
        store.save(path)?;
    }
    emit_json(
        &serde_json::json!({
            "steps": losses.len(),
            "parameters": store.parameter_count(),
            "first_loss": losses.first(),
            "last_loss": losses.last(),
        }),
        None,
    )
}

fn cmd_plot(
    cfg: &RunConfig,
    input: &Path,
    waveform: Option<&Path>,
    mel_pgm: Option<&Path>,
    decimate: usize,
) -> Result<()> {
    let audio = read_wav(input)?;
    if let Some(path) = waveform {
        dump_waveform_csv(&audio, path, decimate)?;
    }
    if let Some(path) = mel_pgm {
        let mel = mel_spectrogram(&audio, &cfg.frame, &cfg.mel)?;
        render_mel_pgm(&mel, path)?;
    }
    emit_json(
        &serde_json::json!({
            "duration_s": audio.duration_s(),
            "samples": audio.len(),
        }),
        None,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_grammar_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn overrides_win_over_config_values() {
        let cfg = RunConfig::default();
        let ov = Overrides {
            n_fft: Some(512),
            hop: Some(128),
            profile: Some("conversational-casual".into()),
            allow_truncate: Some(true),
            seed: Some(9),
            ..Overrides::default()
        };
        let out = ov.apply(cfg);
        assert_eq!(out.frame.n_fft, 512);
        assert_eq!(out.frame.hop, 128);
        assert_eq!(out.profile, "conversational-casual");
        assert!(out.allow_truncate);
        assert_eq!(out.seed, 9);
        // untouched fields keep their defaults
        assert_eq!(out.mel.n_mels, 80);
        assert_eq!(out.mcd_mode, McdMode::Paper);
    }

    #[test]
    fn config_json_roundtrip_and_unknown_field_rejection() {
        let cfg = RunConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);

        let partial: RunConfig = serde_json::from_str(r#"{"seed": 5}"#).unwrap();
        assert_eq!(partial.seed, 5);
        assert_eq!(partial.frame.n_fft, 1024);

        assert!(serde_json::from_str::<RunConfig>(r#"{"sede": 5}"#).is_err());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let cfg = RunConfig {
            mfcc_coeffs: 80,
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());

        let mut cfg = RunConfig::default();
        cfg.pitch.f0_max_hz = 10_000.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn profile_resolution_prefers_presets() {
        let mut cfg = RunConfig::default();
        assert_eq!(cfg.resolve_profile().unwrap().name, "neutral");
        cfg.profile = "no-such-thing".into();
        assert!(cfg.resolve_profile().is_err());

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("custom.json");
        std::fs::write(&path, r#"{"name": "custom", "tempo": 1.2}"#).unwrap();
        cfg.profile = path.display().to_string();
        let p = cfg.resolve_profile().unwrap();
        assert_eq!(p.name, "custom");
        assert_eq!(p.tempo, 1.2);
    }

    #[test]
    fn tensor_mat_conversion_roundtrip() {
        let mel = Mat::from_vec(3, 2, vec![1.0, -2.0, 0.5, 4.0, 0.0, -1.5]);
        let t = mel_to_tensor(&mel);
        assert_eq!(t.dims, [3, 2]);
        let back = tensor_to_mat(&t, "test").unwrap();
        assert_eq!(back.as_slice(), mel.as_slice());

        let flat = Tensor::new(vec![6], vec![0.0; 6]).unwrap();
        assert!(tensor_to_mat(&flat, "test").is_err());
    }
}
