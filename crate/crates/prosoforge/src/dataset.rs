//! Corpus ingestion into JSON Lines manifests, plus pause-aware chunk
//! segmentation for long recordings.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::prosody::{detect_segments, track_pitch, PitchRange, SegmentKind};
use crate::signal::{probe_wav, AudioBuffer, FrameSpec};

/// Recording delivery style.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Style {
    Read,
    Conversational,
    #[default]
    Unknown,
}

impl std::str::FromStr for Style {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "read" => Ok(Style::Read),
            "conversational" => Ok(Style::Conversational),
            "unknown" => Ok(Style::Unknown),
            other => Err(Error::Validation(format!(
                "unknown style {other:?} (expected read, conversational, or unknown)"
            ))),
        }
    }
}

/// One corpus recording. `path` is relative to the ingest root, with `/`
/// separators on every platform.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub path: String,
    pub speaker: String,
    pub text: String,
    pub style: Style,
    pub duration_s: f64,
    pub sample_rate_hz: u32,
}

/// Ingested corpus: ordered entries plus the count of files that were not
/// decodable WAVs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
    pub skipped: usize,
}

impl Manifest {
    pub fn validate(&self) -> Result<()> {
        let mut ids = std::collections::BTreeSet::new();
        for e in &self.entries {
            if !ids.insert(&e.id) {
                return Err(Error::Validation(format!("duplicate manifest id {:?}", e.id)));
            }
            // NaN duration must fail, hence the explicit is_nan check.
            if e.duration_s.is_nan() || e.duration_s <= 0.0 {
                return Err(Error::Validation(format!(
                    "entry {:?}: duration {} s must be positive",
                    e.id, e.duration_s
                )));
            }
        }
        Ok(())
    }

    /// One JSON object per line.
    pub fn write_jsonl(&self, mut w: impl Write) -> Result<()> {
        for e in &self.entries {
            let line = serde_json::to_string(e)
                .map_err(|err| Error::Format(format!("manifest entry {:?}: {err}", e.id)))?;
            writeln!(w, "{line}").map_err(|err| Error::Format(format!("manifest write: {err}")))?;
        }
        Ok(())
    }

    pub fn read_jsonl(r: impl BufRead) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::Format(format!("manifest line {}: {e}", i + 1)))?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: ManifestEntry = serde_json::from_str(&line)
                .map_err(|e| Error::Format(format!("manifest line {}: {e}", i + 1)))?;
            entries.push(entry);
        }
        let manifest = Manifest { entries, skipped: 0 };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_jsonl(std::io::BufWriter::new(file))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_jsonl(std::io::BufReader::new(file))
    }
}

/// Assigns a style to paths matching a glob; first matching rule wins.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StyleRule {
    pub glob: String,
    pub style: Style,
}

/// Parses a JSON list of `{"glob": ..., "style": ...}` objects. Globs are
/// compiled here too, so malformed patterns fail at load time.
pub fn style_rules_from_json(text: &str) -> Result<Vec<StyleRule>> {
    let rules: Vec<StyleRule> =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("style rules JSON: {e}")))?;
    compile_rules(&rules)?;
    Ok(rules)
}

fn compile_rules(rules: &[StyleRule]) -> Result<Vec<(globset::GlobMatcher, Style)>> {
    rules
        .iter()
        .map(|r| {
            let glob = globset::Glob::new(&r.glob)
                .map_err(|e| Error::Validation(format!("style rule glob {:?}: {e}", r.glob)))?;
            Ok((glob.compile_matcher(), r.style))
        })
        .collect()
}

/// Recursively collects `*.wav` files under `root` into a manifest.
///
/// Entries are ordered by relative path; ids are the relative path with the
/// extension dropped, so duplicate basenames in different directories stay
/// distinct. The speaker is the first directory component (empty for files
/// directly under the root) and the text is read from a sibling `.txt` with
/// the same stem when one exists. Files that are not decodable WAVs are
/// skipped and counted, sidecar transcripts included.
pub fn ingest(root: impl AsRef<Path>, rules: &[StyleRule]) -> Result<Manifest> {
    let root = root.as_ref();
    let matchers = compile_rules(rules)?;
    let mut files: Vec<(String, PathBuf)> = Vec::new();
    let mut skipped = 0usize;
    for entry in walkdir::WalkDir::new(root) {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            match e.into_io_error() {
                Some(io) => Error::io(path, io),
                None => Error::Validation(format!("{}: filesystem loop", path.display())),
            }
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let path = entry.into_path();
        let is_wav = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("wav"));
        if !is_wav {
            skipped += 1;
            continue;
        }
        let rel = path
            .strip_prefix(root)
            .expect("walkdir yields paths under root")
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        files.push((rel, path));
    }
    files.sort();

    let mut entries = Vec::with_capacity(files.len());
    for (rel, path) in files {
        // named .wav but not probeable (malformed or truncated header):
        // treat like any other non-WAV
        let Ok(info) = probe_wav(&path) else {
            skipped += 1;
            continue;
        };
        let id = rel.strip_suffix(&format!(".{}", path.extension().unwrap().to_string_lossy()))
            .unwrap_or(&rel)
            .to_string();
        let speaker = match rel.split('/').collect::<Vec<_>>().as_slice() {
            [_file] => String::new(),
            [first, ..] => (*first).to_string(),
            [] => String::new(),
        };
        let text = std::fs::read_to_string(path.with_extension("txt"))
            .map(|t| t.trim().to_string())
            .unwrap_or_default();
        let style = matchers
            .iter()
            .find(|(m, _)| m.is_match(&rel))
            .map(|(_, s)| *s)
            .unwrap_or_default();
        entries.push(ManifestEntry {
            id,
            path: rel,
            speaker,
            text,
            style,
            duration_s: f64::from(info.frames) / f64::from(info.sample_rate_hz),
            sample_rate_hz: info.sample_rate_hz,
        });
    }
    let manifest = Manifest { entries, skipped };
    manifest.validate()?;
    Ok(manifest)
}

/// One segmentation output: the chunk and where it starts in the source.
#[derive(Debug, Clone, PartialEq)]
pub struct Chunk {
    pub offset: usize,
    pub audio: AudioBuffer,
}

pub const DEFAULT_MAX_CHUNK_S: f64 = 4.0;

fn pause_midpoints(buffer: &AudioBuffer, min_pause_s: f64, threshold_ratio: f64) -> Vec<usize> {
    let contour = match track_pitch(buffer, &PitchRange::default(), &FrameSpec::default()) {
        Ok(c) => c,
        Err(_) => return Vec::new(), // too short to analyze: uniform grid only
    };
    let map = match detect_segments(&contour, min_pause_s, threshold_ratio, 0.0) {
        Ok(m) => m,
        Err(_) => return Vec::new(),
    };
    map.segments
        .iter()
        .filter(|s| s.kind == SegmentKind::Pause)
        .map(|s| (s.start_frame + s.end_frame) * map.hop / 2)
        .filter(|&c| c > 0 && c < buffer.len())
        .collect()
}

/// Splits a recording into chunks of at most `max_len_s` seconds.
///
/// The chunk count is the smallest that can satisfy the bound; split points
/// snap to the midpoint of a detected pause when one lies within 20% of the
/// uniform grid spacing (and both neighboring chunks still fit), otherwise
/// they fall on the grid. Concatenating the chunks at their offsets
/// reproduces the input sample-for-sample.
pub fn segment(
    buffer: &AudioBuffer,
    max_len_s: f64,
    min_pause_s: f64,
    threshold_ratio: f64,
) -> Result<Vec<Chunk>> {
    // NaN must fail, hence the explicit is_nan check.
    if max_len_s.is_nan() || max_len_s < 0.5 {
        return Err(Error::Validation(format!(
            "max chunk length {max_len_s} s must be at least 0.5 s"
        )));
    }
    let len = buffer.len();
    let max_samples = (max_len_s * f64::from(buffer.sample_rate_hz())).floor() as usize;
    if len <= max_samples {
        return Ok(vec![Chunk {
            offset: 0,
            audio: buffer.clone(),
        }]);
    }
    let n_chunks = len.div_ceil(max_samples);
    let tolerance = 0.2 * len as f64 / n_chunks as f64;
    let candidates = pause_midpoints(buffer, min_pause_s, threshold_ratio);

    let mut boundaries = Vec::with_capacity(n_chunks + 1);
    boundaries.push(0usize);
    let mut prev = 0usize;
    for i in 1..n_chunks {
        let grid = i * len / n_chunks;
        // the next boundary may fall back to its grid point, so a snapped
        // boundary must leave that chunk within the bound too
        let next_grid = (i + 1) * len / n_chunks;
        let snapped = candidates
            .iter()
            .copied()
            .filter(|&c| c > prev)
            .filter(|&c| (c as f64 - grid as f64).abs() <= tolerance)
            .filter(|&c| c - prev <= max_samples && next_grid.saturating_sub(c) <= max_samples)
            .min_by_key(|&c| c.abs_diff(grid));
        let b = snapped.unwrap_or(grid);
        debug_assert!(b > prev && b - prev <= max_samples);
        boundaries.push(b);
        prev = b;
    }
    boundaries.push(len);

    let chunks = boundaries
        .windows(2)
        .map(|w| {
            let audio = AudioBuffer::new(
                buffer.samples()[w[0]..w[1]].to_vec(),
                buffer.sample_rate_hz(),
            )?;
            Ok(Chunk {
                offset: w[0],
                audio,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    debug_assert_eq!(chunks.len(), n_chunks);
    Ok(chunks)
}
