//! WAV reading and writing through `hound`.
//!
//! Integer PCM is scaled by `2^(bits-1)`; writing 16-bit PCM clamps to the
//! representable range.

use std::io::{Cursor, Read, Seek};
use std::path::Path;
use std::str::FromStr;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::error::{Error, Result};
use crate::foa::FoaClip;

pub const DEFAULT_SAMPLE_RATE: u32 = 44_100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WavFormat {
    #[default]
    Float32,
    Pcm16,
}

impl FromStr for WavFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f32" | "float32" => Ok(WavFormat::Float32),
            "pcm16" | "i16" => Ok(WavFormat::Pcm16),
            _ => Err(Error::InvalidParameter(format!("unknown WAV format '{s}' (f32, pcm16)"))),
        }
    }
}

/// Deinterleaved audio as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct WavAudio {
    pub channels: Vec<Vec<f64>>,
    pub sample_rate: u32,
}

fn decode<R: Read>(reader: WavReader<R>) -> Result<WavAudio> {
    let spec = reader.spec();
    let n = spec.channels as usize;
    if n == 0 {
        return Err(Error::InvalidInput("WAV file declares zero channels".into()));
    }
    let interleaved: Vec<f64> = match spec.sample_format {
        SampleFormat::Float => reader.into_samples::<f32>().map(|s| s.map(f64::from)).collect::<std::result::Result<_, _>>()?,
        SampleFormat::Int => {
            let scale = (1u64 << (spec.bits_per_sample - 1)) as f64;
            reader
                .into_samples::<i32>()
                .map(|s| s.map(|v| v as f64 / scale))
                .collect::<std::result::Result<_, _>>()?
        }
    };
    let frames = interleaved.len() / n;
    let channels = (0..n).map(|c| (0..frames).map(|f| interleaved[f * n + c]).collect()).collect();
    Ok(WavAudio {
        channels,
        sample_rate: spec.sample_rate,
    })
}

pub fn read_wav_bytes(bytes: &[u8]) -> Result<WavAudio> {
    decode(WavReader::new(Cursor::new(bytes))?)
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<WavAudio> {
    let path = path.as_ref();
    WavReader::open(path)
        .map_err(Error::from)
        .and_then(decode)
        .map_err(|e| e.in_file(path))
}

/// Reads a 4-channel W, X, Y, Z file.
pub fn read_foa(path: impl AsRef<Path>) -> Result<FoaClip> {
    let path = path.as_ref();
    let audio = read_wav(path)?;
    foa_from_audio(audio).map_err(|e| e.in_file(path))
}

pub fn foa_from_audio(audio: WavAudio) -> Result<FoaClip> {
    let n = audio.channels.len();
    let channels: [Vec<f64>; 4] = audio
        .channels
        .try_into()
        .map_err(|_| Error::InvalidInput(format!("expected 4 FOA channels, found {n}")))?;
    FoaClip::new(channels, audio.sample_rate)
}

/// Reads a single-channel file.
pub fn read_mono(path: impl AsRef<Path>) -> Result<(Vec<f64>, u32)> {
    let path = path.as_ref();
    let mut audio = read_wav(path)?;
    if audio.channels.len() != 1 {
        return Err(Error::InvalidInput(format!("expected a mono file, found {} channels", audio.channels.len())).in_file(path));
    }
    Ok((audio.channels.remove(0), audio.sample_rate))
}

fn encode<W: std::io::Write + Seek>(sink: W, channels: &[&[f64]], sample_rate: u32, format: WavFormat) -> Result<()> {
    let len = channels.first().map_or(0, |c| c.len());
    if channels.is_empty() || channels.iter().any(|c| c.len() != len) {
        return Err(Error::InvalidInput("channels must be non-empty and of equal length".into()));
    }
    let spec = WavSpec {
        channels: channels.len() as u16,
        sample_rate,
        bits_per_sample: match format {
            WavFormat::Float32 => 32,
            WavFormat::Pcm16 => 16,
        },
        sample_format: match format {
            WavFormat::Float32 => SampleFormat::Float,
            WavFormat::Pcm16 => SampleFormat::Int,
        },
    };
    let mut writer = WavWriter::new(sink, spec)?;
    for i in 0..len {
        for ch in channels {
            match format {
                WavFormat::Float32 => writer.write_sample(ch[i] as f32)?,
                WavFormat::Pcm16 => writer.write_sample((ch[i] * 32768.0).round().clamp(-32768.0, 32767.0) as i16)?,
            }
        }
    }
    writer.finalize()?;
    Ok(())
}

pub fn wav_bytes(channels: &[&[f64]], sample_rate: u32, format: WavFormat) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    encode(Cursor::new(&mut buf), channels, sample_rate, format)?;
    Ok(buf)
}

pub fn foa_wav_bytes(clip: &FoaClip, format: WavFormat) -> Result<Vec<u8>> {
    let ch: Vec<&[f64]> = clip.channels().iter().map(|c| c.as_slice()).collect();
    wav_bytes(&ch, clip.sample_rate(), format)
}

pub fn write_foa(clip: &FoaClip, path: impl AsRef<Path>, format: WavFormat) -> Result<()> {
    let path = path.as_ref();
    foa_wav_bytes(clip, format)
        .and_then(|b| std::fs::write(path, b).map_err(Error::from))
        .map_err(|e| e.in_file(path))
}
