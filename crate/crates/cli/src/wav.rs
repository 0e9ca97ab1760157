//! PCM-16 WAV reading and writing.
//!
//! Decode maps integer samples to `[-1, 1)` by division by 32768; encode maps
//! amplitude `a` to `round(a * 32767)` clamped to the i16 range. Only plain
//! RIFF/WAVE containers with a PCM fmt chunk, 16 bits per sample and one or
//! two channels are accepted; anything else is rejected, not transcoded.

use fakestereo_core::clip::{Clip, ClipError, MonoClip, StereoClip};
use std::fs;
use std::io;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WavError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("not a RIFF container")]
    NotRiff,
    #[error("not a WAVE file")]
    NotWave,
    #[error("truncated file or chunk")]
    Truncated,
    #[error("missing fmt chunk")]
    MissingFmt,
    #[error("missing data chunk")]
    MissingData,
    #[error("unsupported audio format code {0}, only PCM (1) is supported")]
    UnsupportedFormat(u16),
    #[error("unsupported bit depth {0}, only 16-bit PCM is supported")]
    UnsupportedBitDepth(u16),
    #[error("unsupported channel count {0}, only mono and stereo are supported")]
    UnsupportedChannels(u16),
    #[error("data chunk holds no samples")]
    EmptyData,
    #[error("data bytes do not divide evenly into sample frames")]
    RaggedData,
    #[error("invalid clip: {0}")]
    Clip(#[from] ClipError),
}

fn io_err(path: &Path, source: io::Error) -> WavError {
    WavError::Io { path: path.display().to_string(), source }
}

/// `s / 32768`, the load-time amplitude of a PCM sample.
pub fn decode_sample(s: i16) -> f64 {
    s as f64 / 32768.0
}

/// `round(a * 32767)` clamped to the i16 range.
pub fn encode_sample(a: f64) -> i16 {
    (a * 32767.0).round().clamp(-32768.0, 32767.0) as i16
}

fn u16_at(bytes: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([bytes[at], bytes[at + 1]])
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
}

struct Format {
    channels: u16,
    sample_rate: u32,
}

fn parse_fmt(chunk: &[u8]) -> Result<Format, WavError> {
    if chunk.len() < 16 {
        return Err(WavError::Truncated);
    }
    let audio_format = u16_at(chunk, 0);
    if audio_format != 1 {
        return Err(WavError::UnsupportedFormat(audio_format));
    }
    let bits = u16_at(chunk, 14);
    if bits != 16 {
        return Err(WavError::UnsupportedBitDepth(bits));
    }
    let channels = u16_at(chunk, 2);
    if channels != 1 && channels != 2 {
        return Err(WavError::UnsupportedChannels(channels));
    }
    Ok(Format { channels, sample_rate: u32_at(chunk, 4) })
}

/// Parses a WAV image already in memory.
pub fn parse_wav(bytes: &[u8]) -> Result<Clip, WavError> {
    if bytes.len() < 4 || &bytes[0..4] != b"RIFF" {
        return Err(WavError::NotRiff);
    }
    if bytes.len() < 12 {
        return Err(WavError::Truncated);
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(WavError::NotWave);
    }

    let mut fmt: Option<Format> = None;
    let mut data: Option<&[u8]> = None;
    let mut at = 12usize;
    while at < bytes.len() {
        if at + 8 > bytes.len() {
            return Err(WavError::Truncated);
        }
        let id = &bytes[at..at + 4];
        let size = u32_at(bytes, at + 4) as usize;
        let body_start = at + 8;
        let body_end = body_start.checked_add(size).ok_or(WavError::Truncated)?;
        if body_end > bytes.len() {
            return Err(WavError::Truncated);
        }
        match id {
            b"fmt " => fmt = Some(parse_fmt(&bytes[body_start..body_end])?),
            b"data" => data = Some(&bytes[body_start..body_end]),
            _ => {}
        }
        at = body_end + (size & 1); // chunks are word-aligned
    }

    let fmt = fmt.ok_or(WavError::MissingFmt)?;
    let data = data.ok_or(WavError::MissingData)?;
    if data.is_empty() {
        return Err(WavError::EmptyData);
    }
    let frame_bytes = 2 * fmt.channels as usize;
    if data.len() % frame_bytes != 0 {
        return Err(WavError::RaggedData);
    }

    let samples = data
        .chunks_exact(2)
        .map(|b| decode_sample(i16::from_le_bytes([b[0], b[1]])));
    match fmt.channels {
        1 => Ok(Clip::Mono(MonoClip::new(samples.collect(), fmt.sample_rate)?)),
        _ => {
            let interleaved: Vec<f64> = samples.collect();
            let mut left = Vec::with_capacity(interleaved.len() / 2);
            let mut right = Vec::with_capacity(interleaved.len() / 2);
            for pair in interleaved.chunks_exact(2) {
                left.push(pair[0]);
                right.push(pair[1]);
            }
            Ok(Clip::Stereo(StereoClip::new(left, right, fmt.sample_rate)?))
        }
    }
}

pub fn read_wav(path: &Path) -> Result<Clip, WavError> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    parse_wav(&bytes)
}

/// Renders the canonical 44-byte-header PCM-16 image of a clip.
pub fn wav_bytes(clip: &Clip) -> Vec<u8> {
    let (channels, rate, frames): (u16, u32, usize) = match clip {
        Clip::Mono(c) => (1, c.sample_rate_hz(), c.samples().len()),
        Clip::Stereo(c) => (2, c.sample_rate_hz(), c.left().len()),
    };
    let data_len = frames * channels as usize * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&channels.to_le_bytes());
    out.extend_from_slice(&rate.to_le_bytes());
    out.extend_from_slice(&(rate * channels as u32 * 2).to_le_bytes());
    out.extend_from_slice(&(channels * 2).to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    match clip {
        Clip::Mono(c) => {
            for &s in c.samples() {
                out.extend_from_slice(&encode_sample(s).to_le_bytes());
            }
        }
        Clip::Stereo(c) => {
            for (&l, &r) in c.left().iter().zip(c.right()) {
                out.extend_from_slice(&encode_sample(l).to_le_bytes());
                out.extend_from_slice(&encode_sample(r).to_le_bytes());
            }
        }
    }
    out
}

pub fn write_wav(clip: &Clip, path: &Path) -> Result<(), WavError> {
    fs::write(path, wav_bytes(clip)).map_err(|e| io_err(path, e))
}

pub fn write_mono(clip: &MonoClip, path: &Path) -> Result<(), WavError> {
    write_wav(&Clip::Mono(clip.clone()), path)
}

pub fn write_stereo(clip: &StereoClip, path: &Path) -> Result<(), WavError> {
    write_wav(&Clip::Stereo(clip.clone()), path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_definition() {
        assert_eq!(decode_sample(0), 0.0);
        assert_eq!(decode_sample(-32768), -1.0);
        assert_eq!(encode_sample(1.0), 32767);
        assert_eq!(encode_sample(0.5), 16384); // round(0.5 * 32767) = round(16383.5)
        assert_eq!(encode_sample(-1.0), -32767);
        assert_eq!(encode_sample(-1.5), -32768); // clamped
        assert_eq!(encode_sample(2.0), 32767); // clamped
    }

    #[test]
    fn decode_encode_is_identity_up_to_half_scale() {
        // |s| <= 16384 survives a decode/encode round trip; 16385 does not.
        for s in [-16384i16, -12345, -1, 0, 1, 9999, 16384] {
            assert_eq!(encode_sample(decode_sample(s)), s);
        }
        assert_eq!(encode_sample(decode_sample(16385)), 16384);
    }

    #[test]
    fn mono_round_trip() {
        let clip = MonoClip::new(vec![0.0, 0.25, -0.25, 0.4375], 44100).unwrap();
        let bytes = wav_bytes(&Clip::Mono(clip.clone()));
        match parse_wav(&bytes).unwrap() {
            Clip::Mono(got) => {
                assert_eq!(got.sample_rate_hz(), 44100);
                for (a, b) in got.samples().iter().zip(clip.samples()) {
                    assert!((a - b).abs() < 1.0 / 32767.0);
                }
            }
            Clip::Stereo(_) => panic!("expected mono"),
        }
    }

    #[test]
    fn stereo_interleaving_round_trip() {
        let clip = StereoClip::new(vec![0.1, -0.2, 0.3], vec![-0.1, 0.2, -0.3], 48000).unwrap();
        let bytes = wav_bytes(&Clip::Stereo(clip));
        match parse_wav(&bytes).unwrap() {
            Clip::Stereo(got) => {
                assert_eq!(got.sample_rate_hz(), 48000);
                assert!(got.left()[0] > 0.0 && got.right()[0] < 0.0);
                assert_eq!(got.left().len(), 3);
            }
            Clip::Mono(_) => panic!("expected stereo"),
        }
    }

    #[test]
    fn error_taxonomy() {
        assert!(matches!(parse_wav(b"OGGS"), Err(WavError::NotRiff)));
        assert!(matches!(parse_wav(b"RIFF\x00\x00\x00\x00LIST"), Err(WavError::NotWave)));
        assert!(matches!(parse_wav(b"RIFF\x04\x00\x00\x00WAVE"), Err(WavError::MissingFmt)));

        // Valid header, no data chunk.
        let clip = MonoClip::new(vec![0.1], 8000).unwrap();
        let mut bytes = wav_bytes(&Clip::Mono(clip));
        bytes.truncate(36); // drop the data chunk entirely
        assert!(matches!(parse_wav(&bytes), Err(WavError::MissingData)));

        // Zero-length data chunk.
        let mut bytes = wav_bytes(&Clip::Mono(MonoClip::new(vec![0.1], 8000).unwrap()));
        bytes.truncate(44);
        if let Some(size) = bytes.get_mut(40..44) {
            size.copy_from_slice(&0u32.to_le_bytes());
        }
        assert!(matches!(parse_wav(&bytes), Err(WavError::EmptyData)));

        // Chunk size pointing past the end of the file.
        let mut bytes = wav_bytes(&Clip::Mono(MonoClip::new(vec![0.1, 0.2], 8000).unwrap()));
        let end = bytes.len();
        bytes.truncate(end - 1);
        assert!(matches!(parse_wav(&bytes), Err(WavError::Truncated)));
    }

    #[test]
    fn rejects_unsupported_formats() {
        let base = wav_bytes(&Clip::Mono(MonoClip::new(vec![0.1], 8000).unwrap()));

        let mut float_fmt = base.clone();
        float_fmt[20..22].copy_from_slice(&3u16.to_le_bytes());
        assert!(matches!(parse_wav(&float_fmt), Err(WavError::UnsupportedFormat(3))));

        let mut bits8 = base.clone();
        bits8[34..36].copy_from_slice(&8u16.to_le_bytes());
        assert!(matches!(parse_wav(&bits8), Err(WavError::UnsupportedBitDepth(8))));

        let mut five_one = base;
        five_one[22..24].copy_from_slice(&6u16.to_le_bytes());
        assert!(matches!(parse_wav(&five_one), Err(WavError::UnsupportedChannels(6))));
    }

    #[test]
    fn skips_foreign_chunks() {
        // LIST chunk between fmt and data must be ignored.
        let clip = Clip::Mono(MonoClip::new(vec![0.25, -0.25], 8000).unwrap());
        let bytes = wav_bytes(&clip);
        let mut patched = bytes[..36].to_vec();
        patched.extend_from_slice(b"LIST");
        patched.extend_from_slice(&4u32.to_le_bytes());
        patched.extend_from_slice(b"INFO");
        patched.extend_from_slice(&bytes[36..]);
        let riff_len = (patched.len() - 8) as u32;
        patched[4..8].copy_from_slice(&riff_len.to_le_bytes());
        assert!(matches!(parse_wav(&patched), Ok(Clip::Mono(_))));
    }
}
