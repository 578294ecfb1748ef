//! Intensity-vector DOA estimation and frame-level evaluation metrics.
//!
//! The estimator is the time-domain cross moment of the omni channel with
//! each dipole: `E[W·X] ∝ cos φ cos θ`, `E[W·Y] ∝ sin φ cos θ`,
//! `E[W·Z] ∝ sin θ`. It is exact for one noiseless source per frame; with
//! several sources it returns their intensity centroid.

use crate::error::{Error, Result};
use crate::geometry::{angular_distance, to_spherical, CartesianDir, Direction};
use crate::signal::{frame_count, FoaSignal, LabelEntry, LabelTrack};

pub const DEFAULT_ACTIVITY_THRESHOLD: f64 = 1e-4;
pub const DEFAULT_FRAME_HOP: f64 = 0.02;

/// Below this norm the intensity vector is treated as a diffuse field.
const MIN_INTENSITY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameEstimate {
    pub frame_index: usize,
    pub active: bool,
    /// Meaningful only when `active`.
    pub direction: Direction,
}

/// Per-frame DOA estimate.
///
/// A frame is active when its W energy exceeds `activity_threshold` times the
/// largest frame W energy and its intensity vector is not vanishing.
pub fn estimate_doa(
    sig: &FoaSignal,
    frame_hop: f64,
    activity_threshold: f64,
) -> Result<Vec<FrameEstimate>> {
    if !(frame_hop > 0.0) {
        return Err(Error::invalid("frame hop must be positive"));
    }
    if !(activity_threshold >= 0.0) {
        return Err(Error::invalid("activity threshold must be nonnegative"));
    }
    let hop = sig.hop_samples(frame_hop);
    let n_frames = frame_count(sig.len(), hop);
    let [w, y, z, x] = sig.channels();

    struct Moments {
        energy: f64,
        cx: f64,
        cy: f64,
        cz: f64,
    }
    let moments: Vec<Moments> = (0..n_frames)
        .map(|f| {
            let range = f * hop..((f + 1) * hop).min(sig.len());
            let n = range.len() as f64;
            let mut m = Moments {
                energy: 0.0,
                cx: 0.0,
                cy: 0.0,
                cz: 0.0,
            };
            for t in range {
                m.energy += w[t] * w[t];
                m.cx += w[t] * x[t];
                m.cy += w[t] * y[t];
                m.cz += w[t] * z[t];
            }
            Moments {
                energy: m.energy,
                cx: m.cx / n,
                cy: m.cy / n,
                cz: m.cz / n,
            }
        })
        .collect();

    let loudest = moments.iter().fold(0.0f64, |a, m| a.max(m.energy));
    Ok(moments
        .iter()
        .enumerate()
        .map(|(frame_index, m)| {
            let loud = loudest > 0.0 && m.energy > activity_threshold * loudest;
            let norm = (m.cx * m.cx + m.cy * m.cy + m.cz * m.cz).sqrt();
            if loud && norm >= MIN_INTENSITY {
                FrameEstimate {
                    frame_index,
                    active: true,
                    direction: to_spherical(CartesianDir::new_unchecked(
                        m.cx / norm,
                        m.cy / norm,
                        m.cz / norm,
                    )),
                }
            } else {
                FrameEstimate {
                    frame_index,
                    active: false,
                    direction: Direction::FRONT,
                }
            }
        })
        .collect())
}

/// One source (id 0) per active frame.
pub fn estimates_to_labels(est: &[FrameEstimate], frame_hop: f64) -> Result<LabelTrack> {
    let mut frames = vec![Vec::new(); est.iter().map(|e| e.frame_index + 1).max().unwrap_or(0)];
    for e in est.iter().filter(|e| e.active) {
        frames[e.frame_index].push(LabelEntry {
            source_id: 0,
            direction: e.direction,
        });
    }
    LabelTrack::new(frame_hop, frames)
}

/// Reads a label track as estimates, taking the first entry of each frame.
pub fn labels_to_estimates(labels: &LabelTrack) -> Vec<FrameEstimate> {
    labels
        .frames()
        .iter()
        .enumerate()
        .map(|(frame_index, f)| FrameEstimate {
            frame_index,
            active: !f.is_empty(),
            direction: f.first().map_or(Direction::FRONT, |e| e.direction),
        })
        .collect()
}

/// Mean angular error in degrees over frames active in both `est` and `reference`.
///
/// When a reference frame lists several sources, the closest one counts.
pub fn doa_error(est: &[FrameEstimate], reference: &LabelTrack) -> Result<f64> {
    let mut total = 0.0;
    let mut count = 0usize;
    for e in est.iter().filter(|e| e.active) {
        let Some(frame) = reference.frames().get(e.frame_index) else {
            continue;
        };
        let closest = frame
            .iter()
            .map(|r| angular_distance(e.direction, r.direction))
            .fold(None, |best: Option<f64>, d| Some(best.map_or(d, |b| b.min(d))));
        if let Some(d) = closest {
            total += d;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::NoCoactiveFrames);
    }
    Ok((total / count as f64).to_degrees())
}

/// Fraction of frames whose estimated source count equals the reference count.
///
/// Frames missing from either side count as inactive. Two empty inputs agree
/// vacuously.
pub fn frame_recall(est: &[FrameEstimate], reference: &LabelTrack) -> f64 {
    let mut est_counts = vec![0usize; est.iter().map(|e| e.frame_index + 1).max().unwrap_or(0)];
    for e in est.iter().filter(|e| e.active) {
        est_counts[e.frame_index] += 1;
    }
    let n = est_counts.len().max(reference.len());
    if n == 0 {
        return 1.0;
    }
    let hits = (0..n)
        .filter(|&f| {
            let e = est_counts.get(f).copied().unwrap_or(0);
            let r = reference.frames().get(f).map_or(0, Vec::len);
            e == r
        })
        .count();
    hits as f64 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{encode_scene, gen_test_source, SourceKind, SourceTrack};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn deg(az: f64, el: f64) -> Direction {
        Direction::from_degrees(az, el).unwrap()
    }

    fn single(dir: Direction, seed: u64) -> (FoaSignal, LabelTrack) {
        let s = gen_test_source(SourceKind::WhiteNoise, 64_000, 32_000, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        encode_scene(&[SourceTrack::fixed(0, s, 0, dir, 100)], 32_000, 64_000, 0.02).unwrap()
    }

    fn est_at(frames: &[Option<Direction>]) -> Vec<FrameEstimate> {
        frames
            .iter()
            .enumerate()
            .map(|(i, d)| FrameEstimate {
                frame_index: i,
                active: d.is_some(),
                direction: d.unwrap_or(Direction::FRONT),
            })
            .collect()
    }

    fn track(frames: &[Option<Direction>]) -> LabelTrack {
        LabelTrack::new(
            0.02,
            frames
                .iter()
                .map(|d| d.map(|direction| LabelEntry { source_id: 0, direction }).into_iter().collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn recovers_a_static_source() {
        let target = deg(30.0, 20.0);
        let (sig, _) = single(target, 1);
        let est = estimate_doa(&sig, 0.02, DEFAULT_ACTIVITY_THRESHOLD).unwrap();
        assert_eq!(est.len(), 100);
        for e in &est {
            assert!(e.active);
            assert!(angular_distance(e.direction, target).to_degrees() < 0.5);
        }
    }

    #[test]
    fn front_source_moments() {
        let (sig, _) = single(deg(0.0, 0.0), 2);
        let est = estimate_doa(&sig, 0.02, DEFAULT_ACTIVITY_THRESHOLD).unwrap();
        for e in est {
            assert!(e.direction.azimuth().abs() < 1e-9 && e.direction.elevation().abs() < 1e-9);
        }
    }

    #[test]
    fn silence_is_inactive() {
        let sig = FoaSignal::silent(32_000, 6400).unwrap();
        let est = estimate_doa(&sig, 0.02, DEFAULT_ACTIVITY_THRESHOLD).unwrap();
        assert_eq!(est.len(), 10);
        assert!(est.iter().all(|e| !e.active));
    }

    #[test]
    fn omni_only_frame_is_diffuse() {
        let w: Vec<f64> = (0..100).map(|t| (t as f64 * 0.3).sin()).collect();
        let sig = FoaSignal::new(1000, [w, vec![0.0; 100], vec![0.0; 100], vec![0.0; 100]]).unwrap();
        assert!(estimate_doa(&sig, 0.05, 1e-4).unwrap().iter().all(|e| !e.active));
    }

    #[test]
    fn error_examples() {
        let a = deg(10.0, 0.0);
        let frames = [Some(a), None, Some(deg(-40.0, 30.0))];
        assert_eq!(doa_error(&est_at(&frames), &track(&frames)).unwrap(), 0.0);

        let off = est_at(&[Some(deg(90.0, 0.0)), Some(deg(180.0, 0.0))]);
        let r = track(&[Some(deg(0.0, 0.0)), Some(deg(90.0, 0.0))]);
        assert!((doa_error(&off, &r).unwrap() - 90.0).abs() < 1e-9);

        let est = est_at(&[Some(deg(10.0, 0.0)), Some(deg(20.0, 0.0)), Some(deg(30.0, 0.0))]);
        let r = track(&[Some(deg(0.0, 0.0)); 3]);
        assert!((doa_error(&est, &r).unwrap() - 20.0).abs() < 1e-9);

        let none = est_at(&[None, Some(a)]);
        assert!(matches!(doa_error(&none, &track(&[Some(a), None])), Err(Error::NoCoactiveFrames)));
    }

    #[test]
    fn recall_examples() {
        let a = Some(Direction::FRONT);
        assert_eq!(frame_recall(&est_at(&[a, None, a]), &track(&[a, None, a])), 1.0);
        assert_eq!(frame_recall(&est_at(&[a, a, a, a]), &track(&[a, None, a, None])), 0.5);
        assert_eq!(frame_recall(&est_at(&[None, None]), &track(&[None, None])), 1.0);
        assert_eq!(frame_recall(&[], &LabelTrack::inactive(0.02, 0).unwrap()), 1.0);
    }

    #[test]
    fn labels_and_estimates_convert() {
        let frames = [Some(deg(5.0, 5.0)), None, Some(deg(-5.0, 0.0))];
        let est = est_at(&frames);
        let labels = estimates_to_labels(&est, 0.02).unwrap();
        assert_eq!(labels, track(&frames));
        assert_eq!(labels_to_estimates(&labels), est);
    }
}
