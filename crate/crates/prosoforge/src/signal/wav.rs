//! WAV reading and writing. Reads PCM16/PCM24/float32, mono or multichannel
//! (downmixed by channel mean); writes mono PCM16.

use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::AudioBuffer;

/// Header facts for a WAV file, without decoding the payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WavInfo {
    pub sample_rate_hz: u32,
    pub channels: u16,
    pub bits_per_sample: u16,
    pub frames: u32,
}

fn open_reader(path: &Path) -> Result<hound::WavReader<std::io::BufReader<std::fs::File>>> {
    hound::WavReader::open(path).map_err(|e| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => Error::Format(format!("{}: {other}", path.display())),
    })
}

pub fn probe_wav(path: impl AsRef<Path>) -> Result<WavInfo> {
    let path = path.as_ref();
    let reader = open_reader(path)?;
    let spec = reader.spec();
    Ok(WavInfo {
        sample_rate_hz: spec.sample_rate,
        channels: spec.channels,
        bits_per_sample: spec.bits_per_sample,
        frames: reader.duration(),
    })
}

/// Decodes a WAV file to a mono [`AudioBuffer`]. Multichannel input is
/// downmixed by the per-frame mean over channels.
pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let path = path.as_ref();
    let mut reader = open_reader(path)?;
    let spec = reader.spec();
    if spec.channels == 0 {
        return Err(Error::Format(format!(
            "{}: zero channels",
            path.display()
        )));
    }

    let mono = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => {
            decode(path, reader.samples::<i16>(), spec.channels, |s| {
                s as f32 / 32768.0
            })?
        }
        (hound::SampleFormat::Int, 24) => {
            decode(path, reader.samples::<i32>(), spec.channels, |s| {
                s as f32 / 8_388_608.0
            })?
        }
        (hound::SampleFormat::Float, 32) => {
            decode(path, reader.samples::<f32>(), spec.channels, |s| s)?
        }
        (fmt, bits) => {
            return Err(Error::UnsupportedFormat(format!(
                "{}: {bits}-bit {} WAV (supported: 16-bit int, 24-bit int, 32-bit float)",
                path.display(),
                match fmt {
                    hound::SampleFormat::Int => "integer",
                    hound::SampleFormat::Float => "float",
                }
            )));
        }
    };

    AudioBuffer::new(mono, spec.sample_rate)
}

fn decode<S, I>(path: &Path, samples: I, channels: u16, to_f32: impl Fn(S) -> f32) -> Result<Vec<f32>>
where
    I: Iterator<Item = std::result::Result<S, hound::Error>>,
{
    let channels = channels as usize;
    let mut mono = Vec::new();
    let mut acc = 0.0f32;
    let mut in_frame = 0usize;
    for s in samples {
        let s = s.map_err(|e| match e {
            hound::Error::IoError(io) => Error::io(path, io),
            other => Error::Format(format!("{}: {other}", path.display())),
        })?;
        acc += to_f32(s);
        in_frame += 1;
        if in_frame == channels {
            mono.push(acc / channels as f32);
            acc = 0.0;
            in_frame = 0;
        }
    }
    // Trailing partial frame is a container bug; keep the complete frames.
    Ok(mono)
}

/// Writes a mono 16-bit PCM WAV. Samples are quantized by round(s * 32768)
/// and clamped to the i16 range.
pub fn write_wav(path: impl AsRef<Path>, audio: &AudioBuffer) -> Result<()> {
    let path = path.as_ref();
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: audio.sample_rate_hz(),
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let map_err = |e: hound::Error| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => Error::Format(format!("{}: {other}", path.display())),
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(map_err)?;
    for &s in audio.samples() {
        let q = (f64::from(s) * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        writer.write_sample(q).map_err(map_err)?;
    }
    writer.finalize().map_err(map_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_pcm16() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.wav");
        let audio = AudioBuffer::new(vec![0.0, 0.5, -0.5, 0.25], 16000).unwrap();
        write_wav(&path, &audio).unwrap();
        let back = read_wav(&path).unwrap();
        assert_eq!(back.sample_rate_hz(), 16000);
        assert_eq!(back.len(), 4);
        // 0.5 quantizes to 16384 and decodes to exactly 0.5.
        assert_eq!(back.samples()[1], 0.5);
        for (a, b) in audio.samples().iter().zip(back.samples()) {
            assert!((a - b).abs() <= 1.0 / 32768.0);
        }
    }

    #[test]
    fn stereo_downmix_is_channel_mean() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("st.wav");
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 16000,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&path, spec).unwrap();
        // Frames: (16384, 0), (-16384, 16384)
        for s in [16384i16, 0, -16384, 16384] {
            w.write_sample(s).unwrap();
        }
        w.finalize().unwrap();
        let audio = read_wav(&path).unwrap();
        assert_eq!(audio.len(), 2);
        assert!((audio.samples()[0] - 0.25).abs() < 1e-7);
        assert!((audio.samples()[1] - 0.0).abs() < 1e-7);
    }

    #[test]
    fn float32_and_pcm24_supported() {
        let dir = tempfile::tempdir().unwrap();

        let f32_path = dir.path().join("f.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 22050,
            bits_per_sample: 32,
            sample_format: hound::SampleFormat::Float,
        };
        let mut w = hound::WavWriter::create(&f32_path, spec).unwrap();
        w.write_sample(0.125f32).unwrap();
        w.finalize().unwrap();
        let audio = read_wav(&f32_path).unwrap();
        assert_eq!(audio.samples(), &[0.125]);

        let p24_path = dir.path().join("p24.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 16000,
            bits_per_sample: 24,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&p24_path, spec).unwrap();
        w.write_sample(4_194_304i32).unwrap(); // 2^22 -> 0.5
        w.finalize().unwrap();
        let audio = read_wav(&p24_path).unwrap();
        assert_eq!(audio.samples(), &[0.5]);
    }

    #[test]
    fn unsupported_bit_depth_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u8.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 16000,
            bits_per_sample: 8,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&path, spec).unwrap();
        w.write_sample(1i8).unwrap();
        w.finalize().unwrap();
        match read_wav(&path) {
            Err(Error::UnsupportedFormat(msg)) => assert!(msg.contains("8-bit")),
            other => panic!("expected UnsupportedFormat, got {other:?}"),
        }
    }

    #[test]
    fn garbage_file_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.wav");
        std::fs::write(&path, b"XXXXnot a wav at all").unwrap();
        match read_wav(&path) {
            Err(Error::Format(_)) => {}
            other => panic!("expected Format error, got {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        match read_wav("/nonexistent/dir/missing.wav") {
            Err(Error::Io { .. }) => {}
            other => panic!("expected Io error, got {other:?}"),
        }
    }

    #[test]
    fn probe_reports_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.wav");
        let audio = AudioBuffer::new(vec![0.0; 123], 16000).unwrap();
        write_wav(&path, &audio).unwrap();
        let info = probe_wav(&path).unwrap();
        assert_eq!(
            info,
            WavInfo {
                sample_rate_hz: 16000,
                channels: 1,
                bits_per_sample: 16,
                frames: 123
            }
        );
    }

    #[test]
    fn clipping_write_saturates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.wav");
        let audio = AudioBuffer::new(vec![1.5, -1.5], 16000).unwrap();
        write_wav(&path, &audio).unwrap();
        let back = read_wav(&path).unwrap();
        assert!((back.samples()[0] - 32767.0 / 32768.0).abs() < 1e-7);
        assert_eq!(back.samples()[1], -1.0);
    }
}
