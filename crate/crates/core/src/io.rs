//! Persistence and reporting: CSV serialization of datasets, labels and
//! clusterings, the reproducibility manifest, flat config files, and the
//! summary report generators.
//!
//! CSV is the single interchange format so external clustering tools can
//! read and write candidates easily. Floats are serialized with Rust's
//! shortest-round-trip formatting, which keeps regenerated trees
//! byte-identical under equal seeds.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Write as _};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::datagen::{
    generate_subject, Completeness, GenerationConfig, SegmentLabel, Split, Stage, SubjectDataset,
};
use crate::degrade::{ClusterSegment, Clustering, Provenance};
use crate::estimators::{self, Measure, SegmentBlock};
use crate::evaluation::{mae, EvaluationReport};
use crate::patterns::{self, CorrelationVector};
use crate::stats::{mean, median, quantile};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Timestamps
// ---------------------------------------------------------------------------

fn civil_from_days(z: i64) -> (i64, u32, u32) {
    let z = z + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
    (if m <= 2 { y + 1 } else { y }, m, d)
}

fn days_from_civil(y: i64, m: u32, d: u32) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = y.div_euclid(400);
    let yoe = y - era * 400;
    let mp = if m > 2 { m - 3 } else { m + 9 } as i64;
    let doy = (153 * mp + 2) / 5 + d as i64 - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

/// Epoch seconds to ISO-8601 UTC, second resolution.
pub fn iso8601(ts: i64) -> String {
    let days = ts.div_euclid(86_400);
    let sod = ts.rem_euclid(86_400);
    let (y, m, d) = civil_from_days(days);
    format!(
        "{y:04}-{m:02}-{d:02}T{:02}:{:02}:{:02}Z",
        sod / 3600,
        sod % 3600 / 60,
        sod % 60
    )
}

/// Inverse of [`iso8601`].
pub fn parse_iso8601(s: &str) -> Option<i64> {
    let b = s.as_bytes();
    if b.len() != 20
        || b[4] != b'-'
        || b[7] != b'-'
        || b[10] != b'T'
        || b[13] != b':'
        || b[16] != b':'
        || b[19] != b'Z'
    {
        return None;
    }
    let num = |r: std::ops::Range<usize>| s[r].parse::<i64>().ok();
    let (y, m, d) = (num(0..4)?, num(5..7)? as u32, num(8..10)? as u32);
    let (hh, mm, ss) = (num(11..13)?, num(14..16)?, num(17..19)?);
    Some(days_from_civil(y, m, d) * 86_400 + hh * 3600 + mm * 60 + ss)
}

// ---------------------------------------------------------------------------
// Dataset serialization
// ---------------------------------------------------------------------------

const DATA_HEADER: &str = "datetime,iob,cob,ig";
const LABELS_HEADER: &str = "subject_id,segment_id,start_datetime,end_datetime,length,pattern_id,\
target_r12,target_r13,target_r23,empirical_r12,empirical_r13,empirical_r23,mae";
const DEGRADED_HEADER_SUFFIX: &str = ",provenance,k,m";

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Variant directory name, e.g. `correlated_100`.
pub fn variant_dir_name(stage: Stage, completeness: Completeness) -> String {
    format!("{}_{}", stage.name(), completeness.percent())
}

/// Inverse of [`variant_dir_name`].
pub fn parse_variant_dir_name(name: &str) -> Option<(Stage, Completeness)> {
    let (stage_s, pct_s) = name.rsplit_once('_')?;
    Some((Stage::parse(stage_s)?, Completeness::parse(pct_s)?))
}

fn labels_csv(ds: &SubjectDataset) -> String {
    let mut out = String::from(LABELS_HEADER);
    out.push('\n');
    for l in &ds.labels {
        let t = l.target.as_array();
        let e = l.empirical.as_array();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            ds.subject_id,
            l.segment_id,
            iso8601(l.start_ts),
            iso8601(l.end_ts),
            l.n_obs,
            l.pattern_id,
            t[0],
            t[1],
            t[2],
            e[0],
            e[1],
            e[2],
            l.mae
        );
    }
    out
}

/// Writes `data.csv` and `labels.csv` for one dataset into `dir`.
pub fn write_dataset(ds: &SubjectDataset, dir: &Path) -> Result<Vec<PathBuf>> {
    if ds.n_rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;

    let data_path = dir.join("data.csv");
    let mut data = String::with_capacity(ds.n_rows() * 48);
    data.push_str(DATA_HEADER);
    data.push('\n');
    for i in 0..ds.n_rows() {
        let _ = writeln!(
            data,
            "{},{},{},{}",
            iso8601(ds.timestamps[i]),
            ds.v1[i],
            ds.v2[i],
            ds.v3[i]
        );
    }
    fs::write(&data_path, data).map_err(|e| io_err(&data_path, e))?;

    let labels_path = dir.join("labels.csv");
    fs::write(&labels_path, labels_csv(ds)).map_err(|e| io_err(&labels_path, e))?;
    Ok(vec![data_path, labels_path])
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let f = fs::File::open(path).map_err(|e| io_err(path, e))?;
    BufReader::new(f)
        .lines()
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(|e| io_err(path, e))
}

/// Parses a labels CSV (ground truth or degraded; extra columns ignored).
pub fn read_labels(path: &Path) -> Result<(String, Vec<SegmentLabel>)> {
    let lines = read_lines(path)?;
    if lines.is_empty() || !lines[0].starts_with(LABELS_HEADER) {
        return Err(parse_err(path, 1, "unexpected labels header"));
    }
    let mut subject_id = String::new();
    let mut labels = Vec::new();
    for (i, line) in lines.iter().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() < 13 {
            return Err(parse_err(path, i + 1, "expected at least 13 columns"));
        }
        subject_id = f[0].to_string();
        let num = |idx: usize| -> Result<f64> {
            f[idx]
                .parse()
                .map_err(|_| parse_err(path, i + 1, format!("bad number in column {}", idx + 1)))
        };
        let ts = |idx: usize| -> Result<i64> {
            parse_iso8601(f[idx]).ok_or_else(|| {
                parse_err(path, i + 1, format!("bad datetime in column {}", idx + 1))
            })
        };
        labels.push(SegmentLabel {
            segment_id: num(1)? as usize,
            start_ts: ts(2)?,
            end_ts: ts(3)?,
            n_obs: num(4)? as usize,
            pattern_id: num(5)? as usize,
            target: CorrelationVector::new(num(6)?, num(7)?, num(8)?),
            empirical: CorrelationVector::new(num(9)?, num(10)?, num(11)?),
            mae: num(12)?,
        });
    }
    Ok((subject_id, labels))
}

/// Reads one subject's dataset for a variant and validates data/label
/// consistency: strictly increasing timestamps, every row inside exactly
/// one label span, label counts matching actual row counts.
pub fn read_dataset(
    split_root: &Path,
    subject: &str,
    stage: Stage,
    completeness: Completeness,
) -> Result<SubjectDataset> {
    let dir = split_root
        .join(variant_dir_name(stage, completeness))
        .join(subject);
    let data_path = dir.join("data.csv");
    let lines = read_lines(&data_path)?;
    if lines.is_empty() || lines[0] != DATA_HEADER {
        return Err(parse_err(&data_path, 1, "unexpected data header"));
    }
    let mut ds = SubjectDataset {
        subject_id: subject.to_string(),
        stage,
        completeness,
        timestamps: Vec::with_capacity(lines.len() - 1),
        v1: Vec::with_capacity(lines.len() - 1),
        v2: Vec::with_capacity(lines.len() - 1),
        v3: Vec::with_capacity(lines.len() - 1),
        labels: Vec::new(),
    };
    for (i, line) in lines.iter().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(parse_err(&data_path, i + 1, "expected 4 columns"));
        }
        let ts = parse_iso8601(f[0]).ok_or_else(|| parse_err(&data_path, i + 1, "bad datetime"))?;
        if let Some(&last) = ds.timestamps.last() {
            if ts <= last {
                return Err(Error::NonMonotoneTimestamps {
                    path: data_path.display().to_string(),
                    row: i + 1,
                });
            }
        }
        ds.timestamps.push(ts);
        for (j, target) in [&mut ds.v1, &mut ds.v2, &mut ds.v3].into_iter().enumerate() {
            target.push(f[j + 1].parse().map_err(|_| {
                parse_err(&data_path, i + 1, format!("bad value column {}", j + 2))
            })?);
        }
    }

    let labels_path = dir.join("labels.csv");
    let (_, labels) = read_labels(&labels_path)?;
    ds.labels = labels;

    let mut covered = 0usize;
    for l in &ds.labels {
        let (lo, hi) = ds.row_range(l.start_ts, l.end_ts);
        if hi - lo != l.n_obs {
            return Err(Error::LabelSpanMismatch {
                path: labels_path.display().to_string(),
                start: l.start_ts,
                end: l.end_ts,
                detail: format!("label says {} observations, data has {}", l.n_obs, hi - lo),
            });
        }
        covered += hi - lo;
    }
    if covered != ds.n_rows() {
        return Err(Error::LabelSpanMismatch {
            path: labels_path.display().to_string(),
            start: 0,
            end: 0,
            detail: format!("labels cover {} of {} rows", covered, ds.n_rows()),
        });
    }
    Ok(ds)
}

// ---------------------------------------------------------------------------
// Clustering serialization
// ---------------------------------------------------------------------------

/// Writes a clustering in the labels schema plus provenance columns.
/// Empirical vectors are recomputed over the clustering's own spans.
pub fn write_clustering(c: &Clustering, ds: &SubjectDataset, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    let cat = patterns::catalogue();
    let mut out = String::from(LABELS_HEADER);
    out.push_str(DEGRADED_HEADER_SUFFIX);
    out.push('\n');
    for s in &c.segments {
        let (v1, v2, v3) = ds.slice(s.start_ts, s.end_ts);
        let block = SegmentBlock::new(v1, v2, v3)?;
        let emp = estimators::spearman(&block)?;
        let target = cat
            .get(s.cluster_id)
            .and_then(|p| p.relaxed)
            .unwrap_or(CorrelationVector::new(0.0, 0.0, 0.0));
        let t = target.as_array();
        let e = emp.as_array();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            ds.subject_id,
            s.segment_id,
            iso8601(s.start_ts),
            iso8601(s.end_ts),
            v1.len(),
            s.cluster_id,
            t[0],
            t[1],
            t[2],
            e[0],
            e[1],
            e[2],
            mae(&emp, &target),
            c.provenance.label(),
            c.provenance.k(),
            c.provenance.m()
        );
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

fn parse_provenance(label: &str, k: usize, m: usize) -> Provenance {
    if label == "ground_truth" {
        Provenance::GroundTruth
    } else if label.starts_with("shifted") {
        Provenance::Shifted { k }
    } else if label.starts_with("misassigned") {
        Provenance::Misassigned { m }
    } else if label.starts_with("combined") {
        Provenance::Combined { k, m }
    } else {
        Provenance::External
    }
}

/// Reads a clustering from a labels-schema CSV. Files without provenance
/// columns are treated as external candidates.
pub fn read_clustering(path: &Path) -> Result<Clustering> {
    let lines = read_lines(path)?;
    if lines.is_empty() || !lines[0].starts_with(LABELS_HEADER) {
        return Err(parse_err(path, 1, "unexpected labels header"));
    }
    let has_provenance = lines[0].ends_with(DEGRADED_HEADER_SUFFIX);
    let mut segments = Vec::new();
    let mut provenance = Provenance::External;
    for (i, line) in lines.iter().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() < 13 {
            return Err(parse_err(path, i + 1, "expected at least 13 columns"));
        }
        let start_ts =
            parse_iso8601(f[2]).ok_or_else(|| parse_err(path, i + 1, "bad start datetime"))?;
        let end_ts =
            parse_iso8601(f[3]).ok_or_else(|| parse_err(path, i + 1, "bad end datetime"))?;
        segments.push(ClusterSegment {
            segment_id: f[1]
                .parse()
                .map_err(|_| parse_err(path, i + 1, "bad segment id"))?,
            start_ts,
            end_ts,
            cluster_id: f[5]
                .parse()
                .map_err(|_| parse_err(path, i + 1, "bad cluster id"))?,
        });
        if has_provenance && f.len() >= 16 {
            let k = f[14].parse().unwrap_or(0);
            let m = f[15].parse().unwrap_or(0);
            provenance = parse_provenance(f[13], k, m);
        }
    }
    // External tools may emit rows in any order; evaluation walks segments
    // chronologically.
    segments.sort_by_key(|s| s.start_ts);
    Ok(Clustering {
        segments,
        provenance,
    })
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

/// Reproducibility record: config snapshot, seeds, and a content digest per
/// output file. Regenerating with the same manifest reproduces the tree
/// byte for byte.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunManifest {
    pub version: String,
    pub config: Vec<(String, String)>,
    pub digests: BTreeMap<String, String>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl RunManifest {
    pub fn new(cfg: &GenerationConfig, split: Split) -> Self {
        let mut config = vec![
            ("split".to_string(), split.name().to_string()),
            ("n_subjects".to_string(), cfg.n_subjects.to_string()),
            ("n_segments".to_string(), cfg.n_segments.to_string()),
            (
                "segment_length_menu".to_string(),
                cfg.segment_length_menu
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            (
                "sampling_interval_s".to_string(),
                cfg.sampling_interval_s.to_string(),
            ),
            (
                "downsample_interval_s".to_string(),
                cfg.downsample_interval_s.to_string(),
            ),
            (
                "partial_retention".to_string(),
                cfg.partial_retention.to_string(),
            ),
            (
                "sparse_retention".to_string(),
                cfg.sparse_retention.to_string(),
            ),
            ("main_seed".to_string(), cfg.main_seed.to_string()),
            ("sparsify_seed".to_string(), cfg.sparsify_seed.to_string()),
            ("degrade_seed".to_string(), cfg.degrade_seed.to_string()),
        ];
        for (key, r) in [
            ("v1_shape", cfg.v1_shape),
            ("v1_location", cfg.v1_location),
            ("v1_scale", cfg.v1_scale),
            ("v2_p", cfg.v2_p),
            ("v3_shape", cfg.v3_shape),
            ("v3_location", cfg.v3_location),
            ("v3_scale", cfg.v3_scale),
        ] {
            config.push((key.to_string(), format!("{},{}", r.0, r.1)));
        }
        RunManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            digests: BTreeMap::new(),
        }
    }

    /// Digests a freshly written file, keyed by path relative to `root`.
    pub fn add_file(&mut self, root: &Path, path: &Path) -> Result<()> {
        let rel = path
            .strip_prefix(root)
            .unwrap_or(path)
            .to_string_lossy()
            .replace('\\', "/");
        self.digests.insert(rel, sha256_file(path)?);
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        let _ = writeln!(out, "version={}", self.version);
        for (k, v) in &self.config {
            let _ = writeln!(out, "config.{k}={v}");
        }
        for (rel, digest) in &self.digests {
            let _ = writeln!(out, "sha256 {digest} {rel}");
        }
        fs::write(path, out).map_err(|e| io_err(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut m = RunManifest::default();
        for (i, line) in read_lines(path)?.iter().enumerate() {
            if line.is_empty() {
                continue;
            }
            if let Some(v) = line.strip_prefix("version=") {
                m.version = v.to_string();
            } else if let Some(rest) = line.strip_prefix("config.") {
                let (k, v) = rest
                    .split_once('=')
                    .ok_or_else(|| parse_err(path, i + 1, "bad config line"))?;
                m.config.push((k.to_string(), v.to_string()));
            } else if let Some(rest) = line.strip_prefix("sha256 ") {
                let (digest, rel) = rest
                    .split_once(' ')
                    .ok_or_else(|| parse_err(path, i + 1, "bad digest line"))?;
                m.digests.insert(rel.to_string(), digest.to_string());
            } else {
                return Err(parse_err(path, i + 1, "unrecognized manifest line"));
            }
        }
        Ok(m)
    }
}

// ---------------------------------------------------------------------------
// Config files
// ---------------------------------------------------------------------------

/// Applies a flat key-value config file over split defaults. Lines are
/// `key = value`; `#` starts a comment.
pub fn load_config(path: &Path, split: Split) -> Result<GenerationConfig> {
    let mut cfg = GenerationConfig::for_split(split);
    for (i, raw) in read_lines(path)?.iter().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| parse_err(path, i + 1, "expected key = value"))?;
        let bad = |what: &str| parse_err(path, i + 1, format!("bad {what}: {value}"));
        let parse_range = |v: &str| -> Option<(f64, f64)> {
            let (a, b) = v.split_once(',')?;
            Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
        };
        match key {
            "n_subjects" => cfg.n_subjects = value.parse().map_err(|_| bad("integer"))?,
            "n_segments" => cfg.n_segments = value.parse().map_err(|_| bad("integer"))?,
            "segment_length_menu" => {
                cfg.segment_length_menu = value
                    .split(',')
                    .map(|s| s.trim().parse::<u32>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("length list"))?
            }
            "sampling_interval_s" => {
                cfg.sampling_interval_s = value.parse().map_err(|_| bad("integer"))?
            }
            "downsample_interval_s" => {
                cfg.downsample_interval_s = value.parse().map_err(|_| bad("integer"))?
            }
            "partial_retention" => {
                cfg.partial_retention = value.parse().map_err(|_| bad("float"))?
            }
            "sparse_retention" => cfg.sparse_retention = value.parse().map_err(|_| bad("float"))?,
            "main_seed" => cfg.main_seed = value.parse().map_err(|_| bad("seed"))?,
            "sparsify_seed" => cfg.sparsify_seed = value.parse().map_err(|_| bad("seed"))?,
            "degrade_seed" => cfg.degrade_seed = value.parse().map_err(|_| bad("seed"))?,
            "v1_shape" => cfg.v1_shape = parse_range(value).ok_or_else(|| bad("range"))?,
            "v1_location" => cfg.v1_location = parse_range(value).ok_or_else(|| bad("range"))?,
            "v1_scale" => cfg.v1_scale = parse_range(value).ok_or_else(|| bad("range"))?,
            "v2_p" => cfg.v2_p = parse_range(value).ok_or_else(|| bad("range"))?,
            "v3_shape" => cfg.v3_shape = parse_range(value).ok_or_else(|| bad("range"))?,
            "v3_location" => cfg.v3_location = parse_range(value).ok_or_else(|| bad("range"))?,
            "v3_scale" => cfg.v3_scale = parse_range(value).ok_or_else(|| bad("range"))?,
            other => return Err(parse_err(path, i + 1, format!("unknown key {other}"))),
        }
    }
    Ok(cfg)
}

// ---------------------------------------------------------------------------
// Split generation driver
// ---------------------------------------------------------------------------

/// Generates a full split tree under `out_root/<split>/...` and writes the
/// manifest. Returns the manifest for digest comparison.
pub fn generate_split(
    cfg: &GenerationConfig,
    split: Split,
    out_root: &Path,
    n_subjects: Option<usize>,
) -> Result<RunManifest> {
    let n = n_subjects.unwrap_or(cfg.n_subjects);
    let split_root = out_root.join(split.name());
    let mut manifest = RunManifest::new(cfg, split);
    for idx in 0..n {
        let subject = generate_subject(cfg, idx)?;
        for ((stage, level), ds) in &subject.variants {
            let dir = split_root
                .join(variant_dir_name(*stage, *level))
                .join(&subject.subject_id);
            for path in write_dataset(ds, &dir)? {
                manifest.add_file(out_root, &path)?;
            }
        }
    }
    manifest.write(&out_root.join("manifest.txt"))?;
    Ok(manifest)
}

/// Subject directories under one variant directory, sorted.
pub fn list_subjects(split_root: &Path, stage: Stage, completeness: Completeness) -> Vec<String> {
    let dir = split_root.join(variant_dir_name(stage, completeness));
    let mut subjects: Vec<String> = fs::read_dir(&dir)
        .map(|entries| {
            entries
                .filter_map(|e| e.ok())
                .filter(|e| e.path().is_dir())
                .map(|e| e.file_name().to_string_lossy().into_owned())
                .collect()
        })
        .unwrap_or_default();
    subjects.sort();
    subjects
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

fn stat_line(xs: &[f64]) -> (f64, f64, f64, f64) {
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0).max(1.0);
    let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (m, var.sqrt(), min, max)
}

/// Per-variant descriptive statistics over all subjects found in the tree:
/// per-segment MAE, segments outside tolerance, segment lengths and
/// per-subject observation counts.
pub fn variant_summary(split_root: &Path) -> Result<(String, Vec<String>)> {
    let mut out = String::from(
        "stage,completeness,n_subjects,mae_mean,mae_sd,mae_min,mae_max,\
oot_mean,oot_sd,oot_min,oot_max,seglen_mean,seglen_sd,seglen_min,seglen_max,\
obs_mean,obs_sd,obs_min,obs_max\n",
    );
    let mut warnings = Vec::new();
    let cat = patterns::catalogue();
    for stage in [
        Stage::Raw,
        Stage::Correlated,
        Stage::NonNormal,
        Stage::Downsampled,
    ] {
        for level in [
            Completeness::Complete,
            Completeness::Partial,
            Completeness::Sparse,
        ] {
            let subjects = list_subjects(split_root, stage, level);
            if subjects.is_empty() {
                warnings.push(format!(
                    "missing variant: {}",
                    variant_dir_name(stage, level)
                ));
                continue;
            }
            let mut maes = Vec::new();
            let mut lens = Vec::new();
            let mut oots = Vec::new();
            let mut obs_counts = Vec::new();
            for subject in &subjects {
                let labels_path = split_root
                    .join(variant_dir_name(stage, level))
                    .join(subject)
                    .join("labels.csv");
                let (_, labels) = read_labels(&labels_path)?;
                let mut oot = 0usize;
                let mut obs = 0usize;
                for l in &labels {
                    maes.push(l.mae);
                    lens.push(l.n_obs as f64);
                    obs += l.n_obs;
                    if !patterns::within_tolerance(&l.empirical, &cat[l.pattern_id])? {
                        oot += 1;
                    }
                }
                oots.push(oot as f64);
                obs_counts.push(obs as f64);
            }
            let (m1, s1, lo1, hi1) = stat_line(&maes);
            let (m2, s2, lo2, hi2) = stat_line(&oots);
            let (m3, s3, lo3, hi3) = stat_line(&lens);
            let (m4, s4, lo4, hi4) = stat_line(&obs_counts);
            let _ = writeln!(
                out,
                "{},{},{},{m1},{s1},{lo1},{hi1},{m2},{s2},{lo2},{hi2},{m3},{s3},{lo3},{hi3},{m4},{s4},{lo4},{hi4}",
                stage.name(),
                level.percent(),
                subjects.len()
            );
        }
    }
    Ok((out, warnings))
}

/// Per-pattern MAE statistics for one variant, ordered by descending mean.
pub fn per_pattern_table(
    split_root: &Path,
    stage: Stage,
    completeness: Completeness,
) -> Result<String> {
    let cat = patterns::catalogue();
    let mut by_pattern: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut oot_by_pattern: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for subject in list_subjects(split_root, stage, completeness) {
        let labels_path = split_root
            .join(variant_dir_name(stage, completeness))
            .join(&subject)
            .join("labels.csv");
        let (_, labels) = read_labels(&labels_path)?;
        for l in &labels {
            by_pattern.entry(l.pattern_id).or_default().push(l.mae);
            let e = oot_by_pattern.entry(l.pattern_id).or_default();
            e.1 += 1;
            if !patterns::within_tolerance(&l.empirical, &cat[l.pattern_id])? {
                e.0 += 1;
            }
        }
    }
    let mut rows: Vec<(usize, Vec<f64>)> = by_pattern.into_iter().collect();
    rows.sort_by(|a, b| {
        mean(&b.1)
            .partial_cmp(&mean(&a.1))
            .unwrap()
            .then(a.0.cmp(&b.0))
    });
    let mut out = String::from(
        "pattern_id,r12,r13,r23,ideal,count,median,mean,std,q25,q75,min,max,oot_pct\n",
    );
    for (id, maes) in rows {
        let p = &cat[id];
        let r = p.relaxed.unwrap_or(CorrelationVector::new(0.0, 0.0, 0.0));
        let (m, s, lo, hi) = stat_line(&maes);
        let (oot, total) = oot_by_pattern[&id];
        let _ = writeln!(
            out,
            "{id},{},{},{},{},{},{},{m},{s},{},{},{lo},{hi},{}",
            r.rho12,
            r.rho13,
            r.rho23,
            p.ideal,
            maes.len(),
            median(&maes),
            quantile(&maes, 0.25),
            quantile(&maes, 0.75),
            100.0 * oot as f64 / total as f64
        );
    }
    Ok(out)
}

/// Re-estimates every segment with Spearman, Pearson and Kendall and
/// tabulates MAE statistics per variant and measure.
pub fn measure_comparison(split_root: &Path, variants: &[(Stage, Completeness)]) -> Result<String> {
    let cat = patterns::catalogue();
    let mut out =
        String::from("stage,completeness,measure,mae_mean,mae_median,mae_q25,mae_q75,oot_mean\n");
    for &(stage, level) in variants {
        let subjects = list_subjects(split_root, stage, level);
        let mut per_measure: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        let mut oot_per_measure: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for subject in &subjects {
            let ds = read_dataset(split_root, subject, stage, level)?;
            let mut oot: BTreeMap<&str, usize> = BTreeMap::new();
            for l in &ds.labels {
                let (v1, v2, v3) = ds.slice(l.start_ts, l.end_ts);
                let block = SegmentBlock::new(v1, v2, v3)?;
                for m in [Measure::Spearman, Measure::Pearson, Measure::Kendall] {
                    let est = m.estimate(&block)?;
                    per_measure
                        .entry(m.name())
                        .or_default()
                        .push(mae(&est, &l.target));
                    if !patterns::within_tolerance(&est, &cat[l.pattern_id])? {
                        *oot.entry(m.name()).or_default() += 1;
                    }
                }
            }
            for m in [Measure::Spearman, Measure::Pearson, Measure::Kendall] {
                oot_per_measure
                    .entry(m.name())
                    .or_default()
                    .push(*oot.get(m.name()).unwrap_or(&0) as f64);
            }
        }
        for m in ["spearman", "pearson", "kendall"] {
            if let Some(maes) = per_measure.get(m) {
                let _ = writeln!(
                    out,
                    "{},{},{m},{},{},{},{},{}",
                    stage.name(),
                    level.percent(),
                    mean(maes),
                    median(maes),
                    quantile(maes, 0.25),
                    quantile(maes, 0.75),
                    mean(&oot_per_measure[m])
                );
            }
        }
    }
    Ok(out)
}

/// Spearman MAE when each segment is truncated to its first `length`
/// observations, per length.
pub fn length_sensitivity(
    split_root: &Path,
    stage: Stage,
    completeness: Completeness,
    lengths: &[usize],
) -> Result<String> {
    let subjects = list_subjects(split_root, stage, completeness);
    let mut per_length: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for subject in &subjects {
        let ds = read_dataset(split_root, subject, stage, completeness)?;
        for l in &ds.labels {
            let (lo, hi) = ds.row_range(l.start_ts, l.end_ts);
            for &len in lengths {
                if hi - lo < len {
                    continue;
                }
                let block = SegmentBlock::new(
                    &ds.v1[lo..lo + len],
                    &ds.v2[lo..lo + len],
                    &ds.v3[lo..lo + len],
                )?;
                let est = estimators::spearman(&block)?;
                per_length
                    .entry(len)
                    .or_default()
                    .push(mae(&est, &l.target));
            }
        }
    }
    let mut out = String::from("length,mean,median,q25,q75,n\n");
    for (len, maes) in per_length {
        let _ = writeln!(
            out,
            "{len},{},{},{},{},{}",
            mean(&maes),
            median(&maes),
            quantile(&maes, 0.25),
            quantile(&maes, 0.75),
            maes.len()
        );
    }
    Ok(out)
}

/// Serializes evaluation reports, one row per clustering.
pub fn reports_csv(rows: &[(String, EvaluationReport)]) -> String {
    let mut out = String::from(
        "candidate,provenance,k,m,n_clusters,n_segments,swc,dbi,dbi_degenerate,jaccard,\
mae_mean,segments_outside_tolerance,pattern_discovery_pct,pattern_specificity_pct,\
segmentation_ratio,segment_length_ratio,reference_row\n",
    );
    for (name, r) in rows {
        let reference = r
            .reference
            .map(|row| {
                format!(
                    "obs={} clust={} J={}",
                    row.shifted_obs, row.misassigned, row.jaccard.mean
                )
            })
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{name},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{reference}",
            r.provenance.label(),
            r.provenance.k(),
            r.provenance.m(),
            r.n_clusters,
            r.n_segments,
            r.swc,
            r.dbi,
            r.dbi_degenerate,
            r.jaccard,
            r.mae_mean,
            r.segments_outside_tolerance,
            r.pattern_discovery_pct,
            r.pattern_specificity_pct,
            r.segmentation_ratio,
            r.segment_length_ratio
        );
    }
    out
}

/// Writes the full report bundle for a split tree. Missing variants are
/// listed in the returned warnings; the report is still produced for what
/// exists.
pub fn write_reports(split_root: &Path, out_dir: &Path) -> Result<Vec<String>> {
    fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let mut written = Vec::new();
    let mut save = |name: &str, content: String| -> Result<()> {
        let path = out_dir.join(name);
        fs::write(&path, content).map_err(|e| io_err(&path, e))?;
        written.push(name.to_string());
        Ok(())
    };

    let (summary, warnings) = variant_summary(split_root)?;
    save("variant_summary.csv", summary)?;
    save("catalogue.csv", patterns::catalogue_csv())?;

    for (stage, level) in [
        (Stage::NonNormal, Completeness::Complete),
        (Stage::Downsampled, Completeness::Complete),
        (Stage::NonNormal, Completeness::Sparse),
        (Stage::Downsampled, Completeness::Sparse),
    ] {
        if !list_subjects(split_root, stage, level).is_empty() {
            save(
                &format!("per_pattern_{}_{}.csv", stage.name(), level.percent()),
                per_pattern_table(split_root, stage, level)?,
            )?;
        }
    }

    let available: Vec<(Stage, Completeness)> = [
        (Stage::Correlated, Completeness::Complete),
        (Stage::NonNormal, Completeness::Complete),
        (Stage::Downsampled, Completeness::Complete),
    ]
    .into_iter()
    .filter(|&(s, c)| !list_subjects(split_root, s, c).is_empty())
    .collect();
    if !available.is_empty() {
        save(
            "measure_comparison.csv",
            measure_comparison(split_root, &available)?,
        )?;
    }

    if !list_subjects(split_root, Stage::NonNormal, Completeness::Complete).is_empty() {
        save(
            "length_sensitivity.csv",
            length_sensitivity(
                split_root,
                Stage::NonNormal,
                Completeness::Complete,
                &[10, 15, 20, 30, 60, 100, 200, 400, 800],
            )?,
        )?;
    }

    if !warnings.is_empty() {
        let path = out_dir.join("warnings.txt");
        let mut f = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
        for w in &warnings {
            writeln!(f, "{w}").map_err(|e| io_err(&path, e))?;
        }
        written.push("warnings.txt".to_string());
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{self, Split};

    fn tiny_config() -> GenerationConfig {
        let mut cfg = GenerationConfig::for_split(Split::Exploratory);
        cfg.n_segments = 92;
        cfg.segment_length_menu = vec![300, 360];
        cfg
    }

    #[test]
    fn iso8601_round_trip() {
        for ts in [0i64, 1_483_228_800, 1_234_567_890, -86_400, 86_399] {
            assert_eq!(parse_iso8601(&iso8601(ts)), Some(ts), "ts {ts}");
        }
        assert_eq!(iso8601(1_483_228_800), "2017-01-01T00:00:00Z");
        assert_eq!(parse_iso8601("2017-01-01T00:00:00Z"), Some(1_483_228_800));
        assert_eq!(parse_iso8601("not a date"), None);
    }

    #[test]
    fn dataset_round_trip() {
        let cfg = tiny_config();
        let plan = datagen::plan_segments(cfg.subject_seed(0), &cfg).unwrap();
        let raw = datagen::generate_raw(&plan, "subj-0", cfg.subject_seed(0), &cfg).unwrap();
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp
            .path()
            .join(variant_dir_name(Stage::Raw, Completeness::Complete))
            .join("subj-0");
        write_dataset(&raw, &dir).unwrap();
        let back = read_dataset(tmp.path(), "subj-0", Stage::Raw, Completeness::Complete).unwrap();
        assert_eq!(back.timestamps, raw.timestamps);
        assert_eq!(back.v1, raw.v1);
        assert_eq!(back.labels.len(), raw.labels.len());
        for (a, b) in back.labels.iter().zip(&raw.labels) {
            assert_eq!(a.pattern_id, b.pattern_id);
            assert_eq!(a.n_obs, b.n_obs);
            assert_eq!(a.empirical, b.empirical);
        }
        // Write -> read -> write is byte-identical.
        let dir2 = tmp.path().join("again");
        write_dataset(&back, &dir2).unwrap();
        assert_eq!(
            fs::read(dir.join("data.csv")).unwrap(),
            fs::read(dir2.join("data.csv")).unwrap()
        );
        assert_eq!(
            fs::read(dir.join("labels.csv")).unwrap(),
            fs::read(dir2.join("labels.csv")).unwrap()
        );
    }

    #[test]
    fn corrupted_files_yield_distinct_errors() {
        let cfg = tiny_config();
        let plan = datagen::plan_segments(cfg.subject_seed(0), &cfg).unwrap();
        let raw = datagen::generate_raw(&plan, "s0", cfg.subject_seed(0), &cfg).unwrap();
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp
            .path()
            .join(variant_dir_name(Stage::Raw, Completeness::Complete))
            .join("s0");
        write_dataset(&raw, &dir).unwrap();

        // Shuffled rows -> monotonicity error.
        let data_path = dir.join("data.csv");
        let content = fs::read_to_string(&data_path).unwrap();
        let mut lines: Vec<&str> = content.lines().collect();
        lines.swap(1, 2);
        fs::write(&data_path, lines.join("\n")).unwrap();
        assert!(matches!(
            read_dataset(tmp.path(), "s0", Stage::Raw, Completeness::Complete),
            Err(Error::NonMonotoneTimestamps { .. })
        ));
        fs::write(&data_path, content).unwrap();

        // Label count lies -> span mismatch.
        let labels_path = dir.join("labels.csv");
        let content = fs::read_to_string(&labels_path).unwrap();
        let tweaked = content.replacen(",300,", ",301,", 1);
        let tweaked = if tweaked == content {
            content.replacen(",360,", ",361,", 1)
        } else {
            tweaked
        };
        fs::write(&labels_path, tweaked).unwrap();
        assert!(matches!(
            read_dataset(tmp.path(), "s0", Stage::Raw, Completeness::Complete),
            Err(Error::LabelSpanMismatch { .. })
        ));
    }

    #[test]
    fn empty_dataset_rejected() {
        let ds = SubjectDataset {
            subject_id: "x".into(),
            stage: Stage::Raw,
            completeness: Completeness::Complete,
            timestamps: vec![],
            v1: vec![],
            v2: vec![],
            v3: vec![],
            labels: vec![],
        };
        let tmp = tempfile::tempdir().unwrap();
        assert!(matches!(
            write_dataset(&ds, tmp.path()),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn clustering_rows_sorted_on_read() {
        let cfg = tiny_config();
        let plan = datagen::plan_segments(cfg.subject_seed(2), &cfg).unwrap();
        let raw = datagen::generate_raw(&plan, "s2", cfg.subject_seed(2), &cfg).unwrap();
        let gt = Clustering::ground_truth(&raw);
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("cand.csv");
        write_clustering(&gt, &raw, &path).unwrap();
        // Reverse the data rows to simulate an unsorted external file.
        let content = fs::read_to_string(&path).unwrap();
        let mut lines: Vec<&str> = content.lines().collect();
        lines[1..].reverse();
        fs::write(&path, lines.join("\n")).unwrap();
        let back = read_clustering(&path).unwrap();
        assert!(back
            .segments
            .windows(2)
            .all(|w| w[0].start_ts < w[1].start_ts));
        assert_eq!(back.segments.len(), gt.segments.len());
    }

    #[test]
    fn clustering_round_trip() {
        let cfg = tiny_config();
        let plan = datagen::plan_segments(cfg.subject_seed(1), &cfg).unwrap();
        let raw = datagen::generate_raw(&plan, "s1", cfg.subject_seed(1), &cfg).unwrap();
        let cor = datagen::correlate(&raw).unwrap();
        let gt = Clustering::ground_truth(&cor);
        let degraded = crate::degrade::misassign(&gt, 10, 42).unwrap();
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("degraded").join("0.csv");
        write_clustering(&degraded, &cor, &path).unwrap();
        let back = read_clustering(&path).unwrap();
        assert_eq!(back.provenance, Provenance::Misassigned { m: 10 });
        assert_eq!(back.segments, degraded.segments);
    }

    #[test]
    fn manifest_round_trip_and_digests() {
        let cfg = tiny_config();
        let tmp = tempfile::tempdir().unwrap();
        let m1 = generate_split(&cfg, Split::Exploratory, tmp.path(), Some(1)).unwrap();
        let m2 = RunManifest::read(&tmp.path().join("manifest.txt")).unwrap();
        assert_eq!(m1.digests, m2.digests);
        assert_eq!(m1.digests.len(), 24); // 12 variants x 2 files
    }

    #[test]
    fn config_file_overrides() {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("run.conf");
        fs::write(
            &path,
            "# test config\nn_subjects = 3\nsegment_length_menu = 120,180\nv2_p = 0.1, 0.3\n",
        )
        .unwrap();
        let cfg = load_config(&path, Split::Exploratory).unwrap();
        assert_eq!(cfg.n_subjects, 3);
        assert_eq!(cfg.segment_length_menu, vec![120, 180]);
        assert_eq!(cfg.v2_p, (0.1, 0.3));
        assert_eq!(cfg.main_seed, 666);

        fs::write(&path, "bogus_key = 1\n").unwrap();
        assert!(load_config(&path, Split::Exploratory).is_err());
    }

    #[test]
    fn variant_dir_names() {
        assert_eq!(
            variant_dir_name(Stage::NonNormal, Completeness::Partial),
            "non-normal_70"
        );
        assert_eq!(
            parse_variant_dir_name("non-normal_70"),
            Some((Stage::NonNormal, Completeness::Partial))
        );
        assert_eq!(parse_variant_dir_name("bogus"), None);
    }
}
