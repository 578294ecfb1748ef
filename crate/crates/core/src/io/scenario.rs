//! Plain-text scene descriptions for fixture generation.
//!
//! ```text
//! # settings are optional
//! sample_rate = 32000
//! duration = 2.0
//! frame_hop_ms = 20
//! # id, kind, onset_s, duration_s, waypoints "time_s az_deg el_deg; ..."
//! 1, white_noise, 0.0, 1.0, 0.0 30 10; 1.0 90 10
//! 2, sine:440, 1.2, 0.5, 1.2 -60 0
//! 3, pulse_train:0.1, 0.0, 2.0, 0.0 180 -20
//! ```
//!
//! Waypoint times are scene times. Directions are interpolated linearly
//! between waypoints (shortest way round in azimuth), evaluated at each frame
//! centre, and held before the first and after the last waypoint.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{wrap_azimuth, Direction};
use crate::scene::{encode_scene, gen_test_source, SourceKind, SourceTrack, DEFAULT_SAMPLE_RATE};
use crate::signal::{frame_count, hop_samples, FoaSignal, LabelTrack};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub time: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSource {
    pub id: u32,
    pub kind: SourceKind,
    pub onset: f64,
    pub duration: f64,
    pub waypoints: Vec<Waypoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub sample_rate: u32,
    pub frame_hop: f64,
    /// Scene length in seconds; defaults to the end of the last source.
    pub duration: Option<f64>,
    pub sources: Vec<ScenarioSource>,
}

impl Scenario {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        std::fs::read_to_string(path)?.parse()
    }

    pub fn length_samples(&self) -> usize {
        let seconds = self.duration.unwrap_or_else(|| {
            self.sources
                .iter()
                .map(|s| s.onset + s.duration)
                .fold(0.0, f64::max)
        });
        (seconds * self.sample_rate as f64).round() as usize
    }

    /// Materializes the sources; noise is drawn from one stream seeded by `seed`
    /// in file order.
    pub fn sources(&self, seed: u64) -> Result<Vec<SourceTrack>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sr = self.sample_rate as f64;
        let hop = hop_samples(self.sample_rate, self.frame_hop);
        let n_frames = frame_count(self.length_samples(), hop).max(1);
        self.sources
            .iter()
            .map(|src| {
                let onset = (src.onset * sr).round() as usize;
                let len = ((src.duration * sr).round() as usize).max(1);
                let samples = gen_test_source(src.kind, len, self.sample_rate, &mut rng)?;
                let trajectory = (0..n_frames)
                    .map(|f| {
                        let centre = (f as f64 + 0.5) * hop as f64 / sr;
                        interpolate(&src.waypoints, centre)
                    })
                    .collect();
                Ok(SourceTrack {
                    source_id: src.id,
                    samples,
                    trajectory,
                    onset,
                })
            })
            .collect()
    }

    pub fn render(&self, seed: u64) -> Result<(FoaSignal, LabelTrack)> {
        let sources = self.sources(seed)?;
        encode_scene(&sources, self.sample_rate, self.length_samples(), self.frame_hop)
    }
}

fn interpolate(waypoints: &[Waypoint], time: f64) -> Direction {
    let first = waypoints[0];
    if time <= first.time {
        return first.direction;
    }
    for pair in waypoints.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if time <= b.time {
            let span = b.time - a.time;
            if span <= 0.0 {
                return b.direction;
            }
            let w = (time - a.time) / span;
            let daz = wrap_azimuth(b.direction.azimuth() - a.direction.azimuth());
            let el = a.direction.elevation() + w * (b.direction.elevation() - a.direction.elevation());
            return Direction::new_unchecked(wrap_azimuth(a.direction.azimuth() + w * daz), el);
        }
    }
    waypoints[waypoints.len() - 1].direction
}

fn parse_kind(s: &str, line: usize, sample_rate: u32) -> Result<SourceKind> {
    let bad = |msg: String| Error::Parse { line, msg };
    let (name, arg) = match s.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (s.trim(), None),
    };
    let number = |what: &str| -> Result<f64> {
        let a = arg.ok_or_else(|| bad(format!("{name} needs a {what}, e.g. {name}:<value>")))?;
        let v: f64 = a.parse().map_err(|_| bad(format!("bad {what} {a:?}")))?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Range {
                line,
                msg: format!("{what} must be positive"),
            });
        }
        Ok(v)
    };
    match name {
        "white_noise" => Ok(SourceKind::WhiteNoise),
        "sine" => Ok(SourceKind::Sine {
            freq_hz: number("frequency")?,
        }),
        "pulse_train" => Ok(SourceKind::PulseTrain {
            period_samples: ((number("period")? * sample_rate as f64).round() as usize).max(1),
        }),
        other => Err(bad(format!("unknown source kind {other:?}"))),
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut sample_rate = DEFAULT_SAMPLE_RATE;
        let mut frame_hop = crate::doa::DEFAULT_FRAME_HOP;
        let mut duration = None;
        let mut source_lines = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some((key, value)) = line.split_once('=') {
                let bad = || Error::Parse {
                    line: line_no,
                    msg: format!("bad value for {}: {:?}", key.trim(), value.trim()),
                };
                let value = value.trim();
                match key.trim() {
                    "sample_rate" => sample_rate = value.parse().map_err(|_| bad())?,
                    "frame_hop_ms" => frame_hop = value.parse::<f64>().map_err(|_| bad())? / 1e3,
                    "duration" => duration = Some(value.parse::<f64>().map_err(|_| bad())?),
                    other => {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("unknown setting {other:?}"),
                        })
                    }
                }
                continue;
            }
            source_lines.push((line_no, line));
        }
        if sample_rate == 0 || !(frame_hop > 0.0) || duration.is_some_and(|d: f64| !(d >= 0.0)) {
            return Err(Error::Range {
                line: 0,
                msg: "sample rate, frame hop and duration must be positive".into(),
            });
        }

        let mut sources = Vec::new();
        for (line, text) in source_lines {
            let bad = |msg: String| Error::Parse { line, msg };
            let cols: Vec<&str> = text.splitn(5, ',').map(str::trim).collect();
            if cols.len() != 5 {
                return Err(bad("expected id, kind, onset, duration, waypoints".into()));
            }
            let id: u32 = cols[0].parse().map_err(|_| bad(format!("bad id {:?}", cols[0])))?;
            let kind = parse_kind(cols[1], line, sample_rate)?;
            let onset: f64 = cols[2].parse().map_err(|_| bad(format!("bad onset {:?}", cols[2])))?;
            let dur: f64 = cols[3].parse().map_err(|_| bad(format!("bad duration {:?}", cols[3])))?;
            if !(onset >= 0.0) || !(dur > 0.0) {
                return Err(Error::Range {
                    line,
                    msg: "onset must be nonnegative and duration positive".into(),
                });
            }
            let mut waypoints = Vec::new();
            for wp in cols[4].split(';').map(str::trim).filter(|w| !w.is_empty()) {
                let nums: Vec<f64> = wp
                    .split_whitespace()
                    .map(|n| n.parse().map_err(|_| bad(format!("bad waypoint number {n:?}"))))
                    .collect::<Result<_>>()?;
                let [time, az, el] = nums[..] else {
                    return Err(bad(format!("waypoint {wp:?} needs time az el")));
                };
                if !(-90.0..=90.0).contains(&el) || !az.is_finite() {
                    return Err(Error::Range {
                        line,
                        msg: format!("waypoint direction ({az}, {el}) out of range"),
                    });
                }
                if waypoints.last().is_some_and(|w: &Waypoint| w.time > time) {
                    return Err(bad("waypoint times must be nondecreasing".into()));
                }
                waypoints.push(Waypoint {
                    time,
                    direction: Direction::from_degrees(az, el)?,
                });
            }
            if waypoints.is_empty() {
                return Err(bad("source needs at least one waypoint".into()));
            }
            if sources.iter().any(|s: &ScenarioSource| s.id == id) {
                return Err(bad(format!("duplicate source id {id}")));
            }
            sources.push(ScenarioSource {
                id,
                kind,
                onset,
                duration: dur,
                waypoints,
            });
        }
        Ok(Scenario {
            sample_rate,
            frame_hop,
            duration,
            sources,
        })
    }
}
