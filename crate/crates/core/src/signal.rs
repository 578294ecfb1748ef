//! FOA sample buffers and frame-based label tracks.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::geometry::Direction;

/// Channel positions in ACN order. Index `i` carries steering response `H_{i+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    W = 0,
    Y = 1,
    Z = 2,
    X = 3,
}

/// Four equal-length channels in `(W, Y, Z, X)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct FoaSignal {
    sample_rate: u32,
    channels: [Vec<f64>; 4],
}

impl FoaSignal {
    pub fn new(sample_rate: u32, channels: [Vec<f64>; 4]) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::invalid("sample rate must be positive"));
        }
        let len = channels[0].len();
        if channels.iter().any(|c| c.len() != len) {
            return Err(Error::invalid("FOA channels must have equal length"));
        }
        Ok(FoaSignal {
            sample_rate,
            channels,
        })
    }

    pub fn silent(sample_rate: u32, len: usize) -> Result<Self> {
        FoaSignal::new(sample_rate, std::array::from_fn(|_| vec![0.0; len]))
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn duration(&self) -> f64 {
        self.len() as f64 / self.sample_rate as f64
    }

    pub fn channel(&self, ch: Channel) -> &[f64] {
        &self.channels[ch as usize]
    }

    pub fn channels(&self) -> &[Vec<f64>; 4] {
        &self.channels
    }

    pub fn into_channels(self) -> [Vec<f64>; 4] {
        self.channels
    }

    /// The `(X, Y, Z)` triple at sample `t`.
    #[inline]
    pub fn xyz(&self, t: usize) -> [f64; 3] {
        [self.channels[3][t], self.channels[1][t], self.channels[2][t]]
    }

    /// Rewrites every `(X, Y, Z)` triple through `f(sample_index, xyz)`.
    /// W is carried over untouched.
    pub fn map_xyz(&self, mut f: impl FnMut(usize, [f64; 3]) -> [f64; 3]) -> FoaSignal {
        let n = self.len();
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        let mut z = Vec::with_capacity(n);
        for t in 0..n {
            let [a, b, c] = f(t, self.xyz(t));
            x.push(a);
            y.push(b);
            z.push(c);
        }
        FoaSignal {
            sample_rate: self.sample_rate,
            channels: [self.channels[0].clone(), y, z, x],
        }
    }

    /// Number of samples per label frame of length `frame_hop` seconds.
    pub fn hop_samples(&self, frame_hop: f64) -> usize {
        hop_samples(self.sample_rate, frame_hop)
    }
}

pub(crate) fn hop_samples(sample_rate: u32, frame_hop: f64) -> usize {
    ((frame_hop * sample_rate as f64).round() as usize).max(1)
}

pub(crate) fn frame_count(len: usize, hop: usize) -> usize {
    len.div_ceil(hop)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelEntry {
    pub source_id: u32,
    pub direction: Direction,
}

/// Per-frame list of active sources. An empty frame is inactive.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelTrack {
    frame_hop: f64,
    frames: Vec<Vec<LabelEntry>>,
}

impl LabelTrack {
    pub fn new(frame_hop: f64, frames: Vec<Vec<LabelEntry>>) -> Result<Self> {
        if !(frame_hop > 0.0 && frame_hop.is_finite()) {
            return Err(Error::invalid("frame hop must be positive"));
        }
        for (i, frame) in frames.iter().enumerate() {
            let mut seen = HashSet::with_capacity(frame.len());
            if !frame.iter().all(|e| seen.insert(e.source_id)) {
                return Err(Error::invalid(format!("frame {i} repeats a source id")));
            }
        }
        Ok(LabelTrack { frame_hop, frames })
    }

    /// `n_frames` inactive frames.
    pub fn inactive(frame_hop: f64, n_frames: usize) -> Result<Self> {
        LabelTrack::new(frame_hop, vec![Vec::new(); n_frames])
    }

    pub fn frame_hop(&self) -> f64 {
        self.frame_hop
    }

    pub fn frames(&self) -> &[Vec<LabelEntry>] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.frames.len() as f64 * self.frame_hop
    }

    pub fn active_frame_count(&self) -> usize {
        self.frames.iter().filter(|f| !f.is_empty()).count()
    }

    pub fn directions(&self) -> impl Iterator<Item = Direction> + '_ {
        self.frames.iter().flatten().map(|e| e.direction)
    }

    /// Same frame structure and ids, each direction passed through `f`.
    pub fn map_directions(&self, mut f: impl FnMut(Direction) -> Direction) -> LabelTrack {
        LabelTrack {
            frame_hop: self.frame_hop,
            frames: self
                .frames
                .iter()
                .map(|frame| {
                    frame
                        .iter()
                        .map(|e| LabelEntry {
                            source_id: e.source_id,
                            direction: f(e.direction),
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

/// Fails with `SpanMismatch` when the two durations differ by more than one hop.
pub fn check_span(sig: &FoaSignal, labels: &LabelTrack) -> Result<()> {
    let (signal, label_span) = (sig.duration(), labels.duration());
    if (signal - label_span).abs() > labels.frame_hop() * (1.0 + 1e-9) {
        return Err(Error::SpanMismatch {
            signal,
            labels: label_span,
        });
    }
    Ok(())
}
