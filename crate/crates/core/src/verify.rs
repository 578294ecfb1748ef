//! Oracle-equivalence checks on random synthetic scenes.
//!
//! Each check augments a scene, re-encodes the same sources at the augmented
//! directions and compares the two signals frame by frame. This backs the
//! `verify` subcommand.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use rand::Rng;

use crate::channels_first::{apply_channels_first, apply_rotation};
use crate::doa::{doa_error, estimate_doa, DEFAULT_ACTIVITY_THRESHOLD};
use crate::error::Result;
use crate::geometry::{angular_distance, wrap_azimuth, Direction};
use crate::io::format_labels_csv;
use crate::labels_first::{apply_labels_first, ElevationRangePolicy};
use crate::patterns::{apply_pattern, pattern_channel_matrix, pattern_label_map, PatternId};
use crate::scene::{encode_scene, gen_test_source, SourceKind, SourceTrack};
use crate::signal::{frame_count, FoaSignal, LabelEntry, LabelTrack};

/// Per-frame relative RMS error bound for oracle equivalence.
pub const ORACLE_REL_RMS_TOL: f64 = 1e-6;
/// Per-frame bound between estimated and augmented label directions, degrees.
pub const EQUIVARIANCE_TOL_DEG: f64 = 0.5;
/// Bound on the change of the DOA error caused by augmentation, degrees.
pub const CONSISTENCY_TOL_DEG: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneParams {
    pub sample_rate: u32,
    pub duration: f64,
    pub frame_hop: f64,
    /// Source elevations are drawn within `±elevation_limit`.
    pub elevation_limit: f64,
}

impl Default for SceneParams {
    fn default() -> Self {
        SceneParams {
            sample_rate: 32_000,
            duration: 2.0,
            frame_hop: 0.02,
            elevation_limit: 40f64.to_radians(),
        }
    }
}

impl SceneParams {
    pub fn length(&self) -> usize {
        (self.duration * self.sample_rate as f64).round() as usize
    }

    pub fn hop(&self) -> usize {
        crate::signal::hop_samples(self.sample_rate, self.frame_hop)
    }

    pub fn n_frames(&self) -> usize {
        frame_count(self.length(), self.hop())
    }
}

/// A scene together with the sources that produced it.
#[derive(Debug, Clone)]
pub struct SyntheticScene {
    pub params: SceneParams,
    pub sources: Vec<SourceTrack>,
    pub signal: FoaSignal,
    pub labels: LabelTrack,
}

impl SyntheticScene {
    pub fn encode(params: SceneParams, sources: Vec<SourceTrack>) -> Result<Self> {
        let (signal, labels) = encode_scene(&sources, params.sample_rate, params.length(), params.frame_hop)?;
        Ok(SyntheticScene {
            params,
            sources,
            signal,
            labels,
        })
    }

    /// Re-encodes the same sources with every trajectory point mapped by `f`.
    pub fn reencode_mapped(&self, mut f: impl FnMut(Direction) -> Direction) -> Result<FoaSignal> {
        let moved: Vec<_> = self.sources.iter().map(|s| s.map_trajectory(|d| f(*d))).collect();
        self.reencode(&moved)
    }

    /// Re-encodes one source per frame at the directions listed in `labels`;
    /// frames without a label keep the original direction.
    pub fn reencode_from_labels(&self, labels: &LabelTrack) -> Result<FoaSignal> {
        let moved: Vec<_> = self
            .sources
            .iter()
            .map(|s| {
                let mut track = s.clone();
                for (f, dir) in track.trajectory.iter_mut().enumerate() {
                    if let Some(e) = labels.frames().get(f).and_then(|fr| fr.iter().find(|e| e.source_id == s.source_id)) {
                        *dir = e.direction;
                    }
                }
                track
            })
            .collect();
        self.reencode(&moved)
    }

    fn reencode(&self, sources: &[SourceTrack]) -> Result<FoaSignal> {
        let p = &self.params;
        Ok(encode_scene(sources, p.sample_rate, p.length(), p.frame_hop)?.0)
    }
}

/// Random white-noise scene. A single source spans the whole scene; with
/// several sources each gets a random onset and length, overlapping in the
/// middle. Moving sources sweep linearly in azimuth and elevation.
pub fn random_scene<R: Rng + ?Sized>(
    rng: &mut R,
    n_sources: usize,
    moving: bool,
    params: SceneParams,
) -> Result<SyntheticScene> {
    let length = params.length();
    let n_frames = params.n_frames();
    let lim = params.elevation_limit;
    let mut sources = Vec::with_capacity(n_sources);
    for id in 0..n_sources {
        let (onset, len) = if n_sources == 1 {
            (0, length)
        } else {
            let onset = rng.random_range(0..=length / 4);
            let end = rng.random_range(3 * length / 4..=length);
            (onset, end - onset)
        };
        let samples = gen_test_source(SourceKind::WhiteNoise, len, params.sample_rate, rng)?;
        let start = random_direction(rng, lim);
        let trajectory = if moving {
            let end = random_direction(rng, lim);
            let daz = wrap_azimuth(end.azimuth() - start.azimuth());
            (0..n_frames)
                .map(|f| {
                    let w = f as f64 / (n_frames.max(2) - 1) as f64;
                    Direction::new_unchecked(
                        wrap_azimuth(start.azimuth() + w * daz),
                        start.elevation() + w * (end.elevation() - start.elevation()),
                    )
                })
                .collect()
        } else {
            vec![start; n_frames]
        };
        sources.push(SourceTrack {
            source_id: id as u32,
            samples,
            trajectory,
            onset,
        });
    }
    SyntheticScene::encode(params, sources)
}

pub fn random_direction<R: Rng + ?Sized>(rng: &mut R, elevation_limit: f64) -> Direction {
    let lim = elevation_limit.clamp(0.0, FRAC_PI_2);
    let el = if lim > 0.0 { rng.random_range(-lim..=lim) } else { 0.0 };
    Direction::new_unchecked(rng.random_range(-PI..PI), el)
}

/// Per-frame `rms(actual − expected) / rms(expected)` over all four channels.
/// A silent expected frame scores 0 if `actual` is silent too, else infinity.
pub fn frame_relative_errors(actual: &FoaSignal, expected: &FoaSignal, hop: usize) -> Vec<f64> {
    let n = expected.len().min(actual.len());
    (0..frame_count(n, hop))
        .map(|f| {
            let range = f * hop..((f + 1) * hop).min(n);
            let (mut diff, mut energy) = (0.0, 0.0);
            for (a, e) in actual.channels().iter().zip(expected.channels()) {
                for t in range.clone() {
                    diff += (a[t] - e[t]).powi(2);
                    energy += e[t] * e[t];
                }
            }
            match (energy > 0.0, diff > 0.0) {
                (true, _) => (diff / energy).sqrt(),
                (false, false) => 0.0,
                (false, true) => f64::INFINITY,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub measured: f64,
    pub tolerance: f64,
    pub cases: usize,
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<34} worst={:.3e} tol={:.1e} cases={}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.tolerance,
            self.cases
        )
    }
}

fn report(name: &'static str, measured: f64, tolerance: f64, cases: usize) -> PropertyReport {
    PropertyReport {
        name,
        passed: measured <= tolerance,
        measured,
        tolerance,
        cases,
    }
}

fn worst(errors: impl IntoIterator<Item = f64>) -> f64 {
    errors.into_iter().fold(0.0, |m: f64, e| if e.is_nan() { f64::INFINITY } else { m.max(e) })
}

/// All 16 patterns on each scene against the scene encoder.
pub fn check_patterns_oracle<R: Rng + ?Sized>(rng: &mut R, scenes: &[(usize, bool)], params: SceneParams) -> Result<PropertyReport> {
    let mut w = 0.0f64;
    for &(n, moving) in scenes {
        let scene = random_scene(rng, n, moving, params)?;
        for p in PatternId::all() {
            let (out, _) = apply_pattern(&scene.signal, &scene.labels, p)?;
            let expected = scene.reencode_mapped(|d| pattern_label_map(p, d))?;
            w = w.max(worst(frame_relative_errors(&out, &expected, params.hop())));
        }
    }
    Ok(report("patterns16 oracle equivalence", w, ORACLE_REL_RMS_TOL, scenes.len() * 16))
}

/// Labels-first on single-source scenes; also checks elevations stay in range.
pub fn check_labels_first_oracle<R: Rng + ?Sized>(rng: &mut R, n_scenes: usize, params: SceneParams) -> Result<(PropertyReport, PropertyReport)> {
    let lim = params.elevation_limit;
    let policy = ElevationRangePolicy::label_range(-lim, lim)?;
    let (mut w, mut out_of_range) = (0.0f64, 0.0f64);
    for k in 0..n_scenes {
        let scene = random_scene(rng, 1, k % 2 == 1, params)?;
        let (out, labels, _) = apply_labels_first(&scene.signal, &scene.labels, &policy, rng)?;
        let expected = scene.reencode_from_labels(&labels)?;
        let errors = frame_relative_errors(&out, &expected, params.hop());
        w = w.max(worst(
            errors.iter().zip(labels.frames()).filter(|(_, f)| !f.is_empty()).map(|(e, _)| *e),
        ));
        for d in labels.directions() {
            let excess = (d.elevation().abs() - lim).max(0.0);
            out_of_range = out_of_range.max(excess);
        }
    }
    Ok((
        report("labels_first oracle equivalence", w, ORACLE_REL_RMS_TOL, n_scenes),
        report("labels_first elevation in range", out_of_range, 0.0, n_scenes),
    ))
}

/// Channels-first on scenes with 1-3 sources; also checks each R.
pub fn check_channels_first_oracle<R: Rng + ?Sized>(rng: &mut R, n_scenes: usize, params: SceneParams) -> Result<(PropertyReport, PropertyReport)> {
    let (mut w, mut ortho) = (0.0f64, 0.0f64);
    for k in 0..n_scenes {
        let scene = random_scene(rng, 1 + k % 3, k % 2 == 0, params)?;
        let (out, _, r) = apply_channels_first(&scene.signal, &scene.labels, rng)?;
        ortho = ortho.max(r.orthonormality_error()).max((r.determinant().abs() - 1.0).abs());
        let expected = scene.reencode_mapped(|d| r.apply_direction(d))?;
        w = w.max(worst(frame_relative_errors(&out, &expected, params.hop())));
    }
    Ok((
        report("channels_first oracle equivalence", w, ORACLE_REL_RMS_TOL, n_scenes),
        report("channels_first orthonormality", ortho, crate::rotation::ORTHONORMAL_TOL, n_scenes),
    ))
}

/// Closure, identity and inverses over all 256 products.
pub fn check_pattern_group() -> PropertyReport {
    let mats: Vec<_> = PatternId::all().iter().map(|&p| pattern_channel_matrix(p)).collect();
    let mut failures = 0usize;
    for a in &mats {
        if !mats.iter().any(|b| (*a * *b) == crate::patterns::SignedPermutation3::IDENTITY) {
            failures += 1;
        }
        for b in &mats {
            if !mats.contains(&(*a * *b)) {
                failures += 1;
            }
        }
    }
    if !mats.contains(&crate::patterns::SignedPermutation3::IDENTITY) {
        failures += 1;
    }
    let distinct = mats.iter().enumerate().all(|(i, a)| !mats[..i].contains(a));
    if !distinct {
        failures += 1;
    }
    report("patterns16 group of order 16", failures as f64, 0.0, 256)
}

/// Estimator equivariance and metric consistency under each method.
pub fn check_estimator_equivariance<R: Rng + ?Sized>(rng: &mut R, n_scenes: usize, params: SceneParams) -> Result<(PropertyReport, PropertyReport)> {
    let lim = params.elevation_limit;
    let policy = ElevationRangePolicy::label_range(-lim, lim)?;
    let (mut w_dir, mut w_er) = (0.0f64, 0.0f64);
    for k in 0..n_scenes {
        let scene = random_scene(rng, 1, k % 2 == 1, params)?;
        let (out, labels) = match k % 3 {
            0 => apply_pattern(&scene.signal, &scene.labels, PatternId::random(rng))?,
            1 => {
                let (s, l, _) = apply_labels_first(&scene.signal, &scene.labels, &policy, rng)?;
                (s, l)
            }
            _ => {
                let r = crate::channels_first::random_orthonormal(rng)?;
                apply_rotation(&scene.signal, &scene.labels, &r)?
            }
        };
        let est = estimate_doa(&out, params.frame_hop, DEFAULT_ACTIVITY_THRESHOLD)?;
        for e in est.iter().filter(|e| e.active) {
            if let Some(LabelEntry { direction, .. }) = labels.frames().get(e.frame_index).and_then(|f| f.first()) {
                w_dir = w_dir.max(angular_distance(e.direction, *direction).to_degrees());
            }
        }
        let before = doa_error(&estimate_doa(&scene.signal, params.frame_hop, DEFAULT_ACTIVITY_THRESHOLD)?, &scene.labels)?;
        let after = doa_error(&est, &labels)?;
        w_er = w_er.max((after - before).abs());
    }
    Ok((
        report("estimator equivariance (deg)", w_dir, EQUIVARIANCE_TOL_DEG, n_scenes),
        report("doa_error consistency (deg)", w_er, CONSISTENCY_TOL_DEG, n_scenes),
    ))
}

/// 10°-grid labels within ±40° stay on the grid and in range under every pattern,
/// as written to the label CSV.
pub fn check_domain_preservation() -> Result<PropertyReport> {
    let frames: Vec<Vec<LabelEntry>> = (-18..18)
        .flat_map(|a| (-4..=4).map(move |e| (a, e)))
        .map(|(a, e)| {
            vec![LabelEntry {
                source_id: 0,
                direction: Direction::from_degrees(a as f64 * 10.0, e as f64 * 10.0).unwrap(),
            }]
        })
        .collect();
    let track = LabelTrack::new(0.02, frames)?;
    let mut violations = 0usize;
    for p in PatternId::all() {
        let mapped = track.map_directions(|d| pattern_label_map(p, d));
        let csv = format_labels_csv(&mapped, None);
        for row in csv.lines().skip(2) {
            let cols: Vec<&str> = row.split(',').collect();
            let on_grid = |s: &str, lo: f64, hi: f64| {
                s.parse::<f64>().is_ok_and(|v| v % 10.0 == 0.0 && (lo..=hi).contains(&v))
            };
            if !on_grid(cols[2], -180.0, 170.0) || !on_grid(cols[3], -40.0, 40.0) {
                violations += 1;
            }
        }
    }
    Ok(report("patterns16 domain preservation", violations as f64, 0.0, 16 * track.len()))
}

/// `wrap_azimuth` against the literal `(a + π) mod 2π − π` on an even sweep.
pub fn check_wrap_formula(points: usize) -> PropertyReport {
    let mut w = 0.0f64;
    for i in 0..points {
        let a = -20.0 + 40.0 * (i as f64 + 0.5) / points as f64;
        let shifted = a + PI;
        let reference = shifted - 2.0 * PI * (shifted / (2.0 * PI)).floor() - PI;
        let got = wrap_azimuth(a);
        let err = if (-PI..PI).contains(&got) { (got - reference).abs() } else { f64::INFINITY };
        w = w.max(err);
    }
    report("wrap_azimuth formula", w, 1e-12, points)
}

/// Runs every check; `scenes` scales the random workload.
pub fn run_all<R: Rng + ?Sized>(rng: &mut R, scenes: usize) -> Result<Vec<PropertyReport>> {
    let params = SceneParams::default();
    let n = scenes.max(1);
    let mut pattern_scenes: Vec<(usize, bool)> = (0..n.div_ceil(2)).map(|k| (1, k % 2 == 1)).collect();
    pattern_scenes.extend((0..n.div_ceil(5)).map(|k| (3, k % 2 == 0)));
    let mut out = vec![check_patterns_oracle(rng, &pattern_scenes, params)?];
    let (a, b) = check_labels_first_oracle(rng, n, params)?;
    out.extend([a, b]);
    let (a, b) = check_channels_first_oracle(rng, n.div_ceil(2), params)?;
    out.extend([a, b]);
    out.push(check_pattern_group());
    let (a, b) = check_estimator_equivariance(rng, n, params)?;
    out.extend([a, b]);
    out.push(check_domain_preservation()?);
    out.push(check_wrap_formula(10_000));
    Ok(out)
}
