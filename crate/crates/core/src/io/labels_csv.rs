//! Frame label CSV.
//!
//! ```text
//! # frame_hop_ms=20.000000,sample_rate=32000,frames=100
//! frame,source_id,azimuth_deg,elevation_deg
//! 0,1,30.000000,-10.000000
//! ```
//!
//! Inactive frames have no rows. The comment line is optional; without it the
//! hop defaults to 20 ms and the frame count to one past the last row.

use std::fmt::Write as _;
use std::path::Path;

use crate::doa::DEFAULT_FRAME_HOP;
use crate::error::{Error, Result};
use crate::geometry::Direction;
use crate::signal::{LabelEntry, LabelTrack};

pub const HEADER: &str = "frame,source_id,azimuth_deg,elevation_deg";

/// A label track with the optional sample-rate sidecar field.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelCsv {
    pub track: LabelTrack,
    pub sample_rate: Option<u32>,
}

pub fn read_labels_csv(path: impl AsRef<Path>) -> Result<LabelTrack> {
    Ok(read_labels_csv_with_rate(path)?.track)
}

pub fn read_labels_csv_with_rate(path: impl AsRef<Path>) -> Result<LabelCsv> {
    parse_labels_csv(&std::fs::read_to_string(path)?)
}

pub fn write_labels_csv(track: &LabelTrack, sample_rate: Option<u32>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_labels_csv(track, sample_rate))?;
    Ok(())
}

/// Six decimals, with `-0` and values that round to `+180` normalized.
fn format_angle(deg: f64, wrap_at_180: bool) -> String {
    let mut s = format!("{deg:.6}");
    if wrap_at_180 && s == "180.000000" {
        s = "-180.000000".into();
    }
    if s == "-0.000000" {
        s = "0.000000".into();
    }
    s
}

pub fn format_labels_csv(track: &LabelTrack, sample_rate: Option<u32>) -> String {
    let mut out = format!("# frame_hop_ms={:.6}", track.frame_hop() * 1e3);
    if let Some(sr) = sample_rate {
        let _ = write!(out, ",sample_rate={sr}");
    }
    let _ = writeln!(out, ",frames={}", track.len());
    out.push_str(HEADER);
    out.push('\n');
    for (frame, entries) in track.frames().iter().enumerate() {
        for e in entries {
            let _ = writeln!(
                out,
                "{frame},{},{},{}",
                e.source_id,
                format_angle(e.direction.azimuth_deg(), true),
                format_angle(e.direction.elevation_deg(), false)
            );
        }
    }
    out
}

pub fn parse_labels_csv(text: &str) -> Result<LabelCsv> {
    let parse_err = |line: usize, msg: String| Error::Parse { line, msg };
    let mut frame_hop = DEFAULT_FRAME_HOP;
    let mut sample_rate = None;
    let mut declared_frames = None;
    let mut frames: Vec<Vec<LabelEntry>> = Vec::new();
    let mut seen_header = false;
    let mut last_frame = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if seen_header {
                return Err(parse_err(line_no, "comment after header".into()));
            }
            for field in comment.split(',').map(str::trim).filter(|f| !f.is_empty()) {
                let (key, value) = field
                    .split_once('=')
                    .ok_or_else(|| parse_err(line_no, format!("expected key=value, got {field:?}")))?;
                let bad = || parse_err(line_no, format!("bad value for {key}: {value:?}"));
                match key.trim() {
                    "frame_hop_ms" => {
                        let ms: f64 = value.trim().parse().map_err(|_| bad())?;
                        if !(ms > 0.0 && ms.is_finite()) {
                            return Err(Error::Range {
                                line: line_no,
                                msg: format!("frame hop {ms} ms must be positive"),
                            });
                        }
                        frame_hop = ms / 1e3;
                    }
                    "sample_rate" => sample_rate = Some(value.trim().parse().map_err(|_| bad())?),
                    "frames" => declared_frames = Some(value.trim().parse::<usize>().map_err(|_| bad())?),
                    _ => {}
                }
            }
            continue;
        }
        if !seen_header {
            if line.trim() != HEADER {
                return Err(parse_err(line_no, format!("expected header {HEADER:?}")));
            }
            seen_header = true;
            continue;
        }

        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 4 {
            return Err(parse_err(line_no, format!("expected 4 columns, found {}", cols.len())));
        }
        let frame: usize = cols[0]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad frame index {:?}", cols[0])))?;
        let source_id: u32 = cols[1]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad source id {:?}", cols[1])))?;
        let az: f64 = cols[2]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad azimuth {:?}", cols[2])))?;
        let el: f64 = cols[3]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad elevation {:?}", cols[3])))?;
        if !(-180.0..180.0).contains(&az) {
            return Err(Error::Range {
                line: line_no,
                msg: format!("azimuth {az} outside [-180, 180)"),
            });
        }
        if !(-90.0..=90.0).contains(&el) {
            return Err(Error::Range {
                line: line_no,
                msg: format!("elevation {el} outside [-90, 90]"),
            });
        }
        if frame < last_frame {
            return Err(parse_err(line_no, format!("frame {frame} after frame {last_frame}")));
        }
        last_frame = frame;
        if frames.len() <= frame {
            frames.resize(frame + 1, Vec::new());
        }
        if frames[frame].iter().any(|e| e.source_id == source_id) {
            return Err(parse_err(line_no, format!("source {source_id} repeated in frame {frame}")));
        }
        frames[frame].push(LabelEntry {
            source_id,
            direction: Direction::from_degrees(az, el)?,
        });
    }

    if !seen_header {
        return Err(parse_err(text.lines().count().max(1), "missing header".into()));
    }
    if let Some(n) = declared_frames {
        if n < frames.len() {
            return Err(Error::Range {
                line: 1,
                msg: format!("rows reach frame {} but only {n} frames declared", frames.len() - 1),
            });
        }
        frames.resize(n, Vec::new());
    }
    Ok(LabelCsv {
        track: LabelTrack::new(frame_hop, frames)?,
        sample_rate,
    })
}
