//! Synthetic FOA scenes: each channel is the source-count-normalized sum of
//! every source weighted by its steering gain. Scenes built here are the
//! ground truth every augmentation is checked against.

use std::f64::consts::TAU;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{steering_vector, Direction};
use crate::signal::{frame_count, hop_samples, FoaSignal, LabelEntry, LabelTrack};

/// A frame is labelled active for a source when the source's RMS in that
/// frame exceeds this fraction of its peak amplitude.
pub const ACTIVITY_RMS_FRACTION: f64 = 1e-6;

pub const DEFAULT_SAMPLE_RATE: u32 = 32_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SourceTrack {
    pub source_id: u32,
    /// Mono samples starting at `onset`.
    pub samples: Vec<f64>,
    /// Direction per scene frame, indexed from scene frame 0.
    pub trajectory: Vec<Direction>,
    /// First scene sample of `samples`.
    pub onset: usize,
}

impl SourceTrack {
    /// A source that stays at one direction for `n_frames` frames.
    pub fn fixed(source_id: u32, samples: Vec<f64>, onset: usize, dir: Direction, n_frames: usize) -> Self {
        SourceTrack {
            source_id,
            samples,
            trajectory: vec![dir; n_frames],
            onset,
        }
    }

    /// Same samples and timing, each trajectory point passed through `f`.
    pub fn map_trajectory(&self, f: impl FnMut(&Direction) -> Direction) -> SourceTrack {
        SourceTrack {
            trajectory: self.trajectory.iter().map(f).collect(),
            ..self.clone()
        }
    }
}

/// Encodes `sources` into a `length`-sample FOA signal and its label track.
///
/// Gains are held constant within each frame. The normalization is `1/N`
/// with `N = sources.len()`; an empty scene is silence with no labels.
pub fn encode_scene(
    sources: &[SourceTrack],
    sample_rate: u32,
    length: usize,
    frame_hop: f64,
) -> Result<(FoaSignal, LabelTrack)> {
    if sample_rate == 0 || !(frame_hop > 0.0) {
        return Err(Error::invalid("sample rate and frame hop must be positive"));
    }
    let hop = hop_samples(sample_rate, frame_hop);
    let n_frames = frame_count(length, hop);
    let mut channels: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; length]);
    let mut frames: Vec<Vec<LabelEntry>> = vec![Vec::new(); n_frames];
    let norm = 1.0 / sources.len().max(1) as f64;

    for src in sources {
        let peak = src.samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        let end = (src.onset + src.samples.len()).min(length);
        if src.onset >= end {
            continue;
        }
        let last_frame = (end - 1) / hop;
        if src.trajectory.len() <= last_frame {
            return Err(Error::invalid(format!(
                "source {} trajectory covers {} frames but audio reaches frame {}",
                src.source_id,
                src.trajectory.len(),
                last_frame
            )));
        }
        let spanned = src.trajectory.iter().zip(frames.iter_mut()).enumerate();
        for (frame, (&dir, labelled)) in spanned.take(last_frame + 1).skip(src.onset / hop) {
            let start = (frame * hop).max(src.onset);
            let stop = ((frame + 1) * hop).min(end);
            let gains = steering_vector(dir).to_channel_array().map(|g| g * norm);
            let mut energy = 0.0;
            for t in start..stop {
                let s = src.samples[t - src.onset];
                energy += s * s;
                for (ch, g) in channels.iter_mut().zip(gains) {
                    ch[t] += g * s;
                }
            }
            // RMS over the whole frame, zero outside the source
            let rms = (energy / hop as f64).sqrt();
            if peak > 0.0 && rms > ACTIVITY_RMS_FRACTION * peak {
                labelled.push(LabelEntry {
                    source_id: src.source_id,
                    direction: dir,
                });
            }
        }
    }

    Ok((
        FoaSignal::new(sample_rate, channels)?,
        LabelTrack::new(frame_hop, frames)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceKind {
    /// Uniform noise in `[-1, 1)`.
    WhiteNoise,
    /// Unit-amplitude sine.
    Sine { freq_hz: f64 },
    /// Unit impulses every `period_samples` samples, starting at sample 0.
    PulseTrain { period_samples: usize },
}

/// Mono fixture signal with peak amplitude at most 1.
pub fn gen_test_source<R: Rng + ?Sized>(
    kind: SourceKind,
    length: usize,
    sample_rate: u32,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if length == 0 || sample_rate == 0 {
        return Err(Error::invalid("length and sample rate must be positive"));
    }
    Ok(match kind {
        SourceKind::WhiteNoise => (0..length).map(|_| rng.random_range(-1.0..1.0)).collect(),
        SourceKind::Sine { freq_hz } => {
            if !(freq_hz.is_finite() && freq_hz > 0.0) {
                return Err(Error::invalid("sine frequency must be positive"));
            }
            let step = TAU * freq_hz / sample_rate as f64;
            (0..length).map(|t| (step * t as f64).sin()).collect()
        }
        SourceKind::PulseTrain { period_samples } => {
            if period_samples == 0 {
                return Err(Error::invalid("pulse period must be positive"));
            }
            (0..length)
                .map(|t| if t % period_samples == 0 { 1.0 } else { 0.0 })
                .collect()
        }
    })
}
