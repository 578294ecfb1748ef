use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::error::{Error, Result};
use crate::signal::FoaSignal;

/// Sample encoding used when writing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WavEncoding {
    #[default]
    Float32,
    Int16,
}

fn map_hound(err: hound::Error) -> Error {
    match err {
        // hound reports short reads as `Other`
        hound::Error::IoError(e)
            if matches!(e.kind(), std::io::ErrorKind::UnexpectedEof | std::io::ErrorKind::Other) =>
        {
            Error::CorruptHeader(format!("truncated file: {e}"))
        }
        hound::Error::IoError(e) => Error::Io(e),
        hound::Error::FormatError(msg) => Error::CorruptHeader(msg.into()),
        hound::Error::UnfinishedSample => Error::CorruptHeader("truncated sample data".into()),
        hound::Error::Unsupported => Error::UnsupportedFormat("unsupported WAV encoding".into()),
        hound::Error::TooWide | hound::Error::InvalidSampleFormat => {
            Error::UnsupportedFormat("invalid sample format".into())
        }
    }
}

/// Reads a 4-channel WAV file. Channels map positionally to `(W, Y, Z, X)`;
/// 16-bit samples are scaled by `1/32768`.
pub fn read_foa_wav(path: impl AsRef<Path>) -> Result<FoaSignal> {
    let mut reader = WavReader::open(path).map_err(map_hound)?;
    let spec = reader.spec();
    if spec.channels != 4 {
        return Err(Error::BadChannelCount(spec.channels));
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(map_hound)?,
        (SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| f64::from(v) / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(map_hound)?,
        (format, bits) => {
            return Err(Error::UnsupportedFormat(format!("{bits}-bit {format:?}")));
        }
    };
    let mut channels: [Vec<f64>; 4] =
        std::array::from_fn(|_| Vec::with_capacity(interleaved.len() / 4));
    for frame in interleaved.chunks_exact(4) {
        for (ch, &v) in channels.iter_mut().zip(frame) {
            ch.push(v);
        }
    }
    FoaSignal::new(spec.sample_rate, channels)
}

/// Writes 32-bit float samples.
pub fn write_foa_wav(sig: &FoaSignal, path: impl AsRef<Path>) -> Result<()> {
    write_foa_wav_as(sig, path, WavEncoding::Float32)
}

pub fn write_foa_wav_as(sig: &FoaSignal, path: impl AsRef<Path>, encoding: WavEncoding) -> Result<()> {
    let (bits_per_sample, sample_format) = match encoding {
        WavEncoding::Float32 => (32, SampleFormat::Float),
        WavEncoding::Int16 => (16, SampleFormat::Int),
    };
    let spec = WavSpec {
        channels: 4,
        sample_rate: sig.sample_rate(),
        bits_per_sample,
        sample_format,
    };
    let mut writer = WavWriter::create(path, spec).map_err(map_hound)?;
    let chans = sig.channels();
    for t in 0..sig.len() {
        for ch in chans {
            match encoding {
                WavEncoding::Float32 => writer.write_sample(ch[t] as f32),
                WavEncoding::Int16 => {
                    writer.write_sample((ch[t] * 32768.0).round().clamp(-32768.0, 32767.0) as i16)
                }
            }
            .map_err(map_hound)?;
        }
    }
    writer.finalize().map_err(map_hound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn float_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.wav");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let chans = std::array::from_fn(|_| (0..1000).map(|_| rng.random_range(-1.0f32..1.0) as f64).collect());
        let sig = FoaSignal::new(32_000, chans).unwrap();
        write_foa_wav(&sig, &path).unwrap();
        let back = read_foa_wav(&path).unwrap();
        assert_eq!(back.sample_rate(), 32_000);
        for (a, b) in sig.channels().iter().zip(back.channels()) {
            assert!(a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }

    #[test]
    fn int16_is_scaled() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("i.wav");
        let spec = WavSpec {
            channels: 4,
            sample_rate: 8000,
            bits_per_sample: 16,
            sample_format: SampleFormat::Int,
        };
        let mut w = WavWriter::create(&path, spec).unwrap();
        for v in [-32768i16, 16384, 0, 32767] {
            w.write_sample(v).unwrap();
        }
        w.finalize().unwrap();
        let sig = read_foa_wav(&path).unwrap();
        let got: Vec<f64> = sig.channels().iter().map(|c| c[0]).collect();
        assert_eq!(got, [-1.0, 0.5, 0.0, 32767.0 / 32768.0]);
    }

    #[test]
    fn wrong_channel_count() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("st.wav");
        let spec = WavSpec {
            channels: 2,
            sample_rate: 8000,
            bits_per_sample: 16,
            sample_format: SampleFormat::Int,
        };
        let mut w = WavWriter::create(&path, spec).unwrap();
        w.write_sample(0i16).unwrap();
        w.write_sample(0i16).unwrap();
        w.finalize().unwrap();
        assert!(matches!(read_foa_wav(&path), Err(Error::BadChannelCount(2))));
    }

    #[test]
    fn unsupported_and_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("24.wav");
        let spec = WavSpec {
            channels: 4,
            sample_rate: 8000,
            bits_per_sample: 24,
            sample_format: SampleFormat::Int,
        };
        let mut w = WavWriter::create(&path, spec).unwrap();
        for _ in 0..4 {
            w.write_sample(0i32).unwrap();
        }
        w.finalize().unwrap();
        assert!(matches!(read_foa_wav(&path), Err(Error::UnsupportedFormat(_))));

        let junk = dir.path().join("junk.wav");
        std::fs::write(&junk, b"RIFF\x10\x00\x00\x00WAVEfmt ").unwrap();
        let e = read_foa_wav(&junk);
        assert!(matches!(e, Err(Error::CorruptHeader(_))), "{e:?}");
        std::fs::write(&junk, b"not a wav file at all").unwrap();
        assert!(matches!(read_foa_wav(&junk), Err(Error::CorruptHeader(_))));
    }
}
