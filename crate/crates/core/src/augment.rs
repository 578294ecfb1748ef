//! Dataset-scale augmentation over a directory of `(name.wav, name.csv)` pairs.
//!
//! Every input pair is copied to the output directory. With probability
//! `probability` a file is also augmented and written as `name_aug1.*`. Each
//! file draws from its own generator seeded by `hash(seed, name)`, so results
//! do not depend on processing order.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channels_first::apply_channels_first;
use crate::error::{Error, Result};
use crate::io::{read_foa_wav, read_labels_csv_with_rate, write_foa_wav, write_labels_csv};
use crate::labels_first::{apply_labels_first, ElevationRangePolicy};
use crate::patterns::{apply_pattern, PatternId};
use crate::rotation::Rotation3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[value(name = "patterns16", alias = "16p")]
    Patterns16,
    #[value(name = "labels_first", alias = "labels-first")]
    LabelsFirst,
    #[value(name = "channels_first", alias = "channels-first")]
    ChannelsFirst,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Patterns16 => "patterns16",
            Method::LabelsFirst => "labels_first",
            Method::ChannelsFirst => "channels_first",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct AugmentConfig {
    pub method: Method,
    /// Fraction of inputs to augment, in `[0, 1]`.
    pub probability: f64,
    pub seed: u64,
    pub elevation_policy: ElevationRangePolicy,
    /// Forces one pattern for `patterns16` instead of a uniform draw.
    pub pattern: Option<PatternId>,
    pub input_dir: PathBuf,
    pub output_dir: PathBuf,
    /// Defaults to `output_dir/manifest.json`.
    pub manifest_path: Option<PathBuf>,
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.probability) {
            return Err(Error::invalid(format!(
                "probability {} outside [0, 1]",
                self.probability
            )));
        }
        Ok(())
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.manifest_path
            .clone()
            .unwrap_or_else(|| self.output_dir.join("manifest.json"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub input: String,
    pub seed: u64,
    /// Method name, or `"none"` for a plain copy.
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_rad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_rad: Option<f64>,
    /// Row-major, 17 significant digits, space separated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<String>,
    pub outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub method: Method,
    pub probability: f64,
    pub seed: u64,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn augmented_count(&self) -> usize {
        self.entries.iter().filter(|e| e.method != "none").count()
    }
}

/// Per-file seed: the first 8 bytes of `SHA-256(seed_le || name)`.
pub fn file_seed(seed: u64, name: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(name.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

pub fn format_rotation(r: &Rotation3) -> String {
    r.to_row_major()
        .iter()
        .map(|v| format!("{v:.16e}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn parse_rotation(s: &str) -> Result<Rotation3> {
    let vals: Vec<f64> = s
        .split_whitespace()
        .map(|v| v.parse().map_err(|_| Error::invalid(format!("bad matrix entry {v:?}"))))
        .collect::<Result<_>>()?;
    let [a, b, c, d, e, f, g, h, i] = vals[..] else {
        return Err(Error::invalid("matrix needs 9 entries"));
    };
    Rotation3::from_rows([[a, b, c], [d, e, f], [g, h, i]])
}

/// Sorted stems of every `*.wav` in `dir`; each must have a sibling `.csv`.
/// Earlier outputs (`*_augN`) are skipped so in-place runs do not compound.
pub fn list_pairs(dir: &Path) -> Result<Vec<String>> {
    let mut stems = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("wav") {
            continue;
        }
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::invalid(format!("non UTF-8 file name {}", path.display())))?
            .to_string();
        if is_augmented_stem(&stem) {
            continue;
        }
        if !dir.join(format!("{stem}.csv")).is_file() {
            return Err(Error::invalid(format!("{stem}.wav has no matching {stem}.csv")));
        }
        stems.push(stem);
    }
    stems.sort();
    Ok(stems)
}

fn is_augmented_stem(stem: &str) -> bool {
    stem.rsplit_once("_aug")
        .is_some_and(|(_, n)| !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()))
}

fn same_dir(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

/// Processes every pair and writes the manifest.
pub fn run_augment(config: &AugmentConfig) -> Result<Manifest> {
    config.validate()?;
    fs::create_dir_all(&config.output_dir)?;
    let in_place = same_dir(&config.input_dir, &config.output_dir);
    let mut entries = Vec::new();
    for stem in list_pairs(&config.input_dir)? {
        entries.push(process_file(config, &stem, in_place)?);
    }
    let manifest = Manifest {
        method: config.method,
        probability: config.probability,
        seed: config.seed,
        entries,
    };
    let mut json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::invalid(e.to_string()))?;
    json.push('\n');
    fs::write(config.manifest_path(), json)?;
    Ok(manifest)
}

fn process_file(config: &AugmentConfig, stem: &str, in_place: bool) -> Result<ManifestEntry> {
    let seed = file_seed(config.seed, stem);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let wav_name = format!("{stem}.wav");
    let csv_name = format!("{stem}.csv");
    let src_wav = config.input_dir.join(&wav_name);
    let src_csv = config.input_dir.join(&csv_name);
    if !in_place {
        fs::copy(&src_wav, config.output_dir.join(&wav_name))?;
        fs::copy(&src_csv, config.output_dir.join(&csv_name))?;
    }
    let mut entry = ManifestEntry {
        input: stem.to_string(),
        seed,
        method: "none".into(),
        pattern: None,
        alpha_rad: None,
        beta_rad: None,
        rotation: None,
        outputs: vec![wav_name, csv_name],
        note: None,
    };

    let draw: f64 = rng.random();
    if draw >= config.probability {
        return Ok(entry);
    }

    let sig = read_foa_wav(&src_wav)?;
    let labels = read_labels_csv_with_rate(&src_csv)?;
    let result = match config.method {
        Method::Patterns16 => {
            let p = config.pattern.unwrap_or_else(|| PatternId::random(&mut rng));
            apply_pattern(&sig, &labels.track, p).map(|(s, l)| {
                entry.pattern = Some(p.to_string());
                (s, l)
            })
        }
        Method::LabelsFirst => {
            apply_labels_first(&sig, &labels.track, &config.elevation_policy, &mut rng).map(|(s, l, d)| {
                entry.alpha_rad = Some(d.alpha);
                entry.beta_rad = Some(d.beta);
                (s, l)
            })
        }
        Method::ChannelsFirst => apply_channels_first(&sig, &labels.track, &mut rng).map(|(s, l, r)| {
            entry.rotation = Some(format_rotation(&r));
            (s, l)
        }),
    };
    let (out_sig, out_labels) = match result {
        Ok(v) => v,
        // inputs the method cannot handle are passed through
        Err(e @ (Error::OverlapUnsupported { .. } | Error::NoActiveFrames)) => {
            entry.note = Some(format!("skipped: {}: {e}", e.kind()));
            return Ok(entry);
        }
        Err(e) => return Err(e),
    };

    let aug_wav = format!("{stem}_aug1.wav");
    let aug_csv = format!("{stem}_aug1.csv");
    write_foa_wav(&out_sig, config.output_dir.join(&aug_wav))?;
    let rate = labels.sample_rate.or(Some(sig.sample_rate()));
    write_labels_csv(&out_labels, rate, config.output_dir.join(&aug_csv))?;
    entry.method = config.method.to_string();
    entry.outputs.extend([aug_wav, aug_csv]);
    Ok(entry)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_seed_depends_on_both_inputs() {
        assert_eq!(file_seed(1, "a"), file_seed(1, "a"));
        assert_ne!(file_seed(1, "a"), file_seed(2, "a"));
        assert_ne!(file_seed(1, "a"), file_seed(1, "b"));
    }

    #[test]
    fn generated_outputs_are_not_inputs() {
        assert!(is_augmented_stem("clip_aug1"));
        assert!(is_augmented_stem("clip_aug12"));
        assert!(!is_augmented_stem("clip_aug"));
        assert!(!is_augmented_stem("clip_augx"));
        assert!(!is_augmented_stem("clip"));
    }

    #[test]
    fn rotation_text_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let r = crate::channels_first::random_orthonormal(&mut rng).unwrap();
        let text = format_rotation(&r);
        assert_eq!(text.split(' ').count(), 9);
        assert_eq!(parse_rotation(&text).unwrap(), r);
        assert!(parse_rotation("1 0 0").is_err());
    }

    #[test]
    fn probability_is_validated() {
        let config = AugmentConfig {
            method: Method::Patterns16,
            probability: 1.5,
            seed: 0,
            elevation_policy: ElevationRangePolicy::fixed_range(0.0, 0.0).unwrap(),
            pattern: None,
            input_dir: ".".into(),
            output_dir: ".".into(),
            manifest_path: None,
        };
        assert!(matches!(config.validate(), Err(Error::InvalidArgument(_))));
    }
}
