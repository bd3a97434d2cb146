//! Controlled, labelled imperfect clusterings derived from ground truth:
//! boundary shifts, wrong-cluster assignments, their combination, plus
//! reduced-cluster and reduced-segment dataset versions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::datagen::{derive_seed, Stage, SubjectDataset};
use crate::patterns;
use crate::{Error, Result};

/// How a clustering came to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    GroundTruth,
    Shifted { k: usize },
    Misassigned { m: usize },
    Combined { k: usize, m: usize },
    External,
}

impl Provenance {
    pub fn label(&self) -> String {
        match self {
            Provenance::GroundTruth => "ground_truth".into(),
            Provenance::Shifted { k } => format!("shifted({k})"),
            Provenance::Misassigned { m } => format!("misassigned({m})"),
            Provenance::Combined { k, m } => format!("combined({k},{m})"),
            Provenance::External => "external".into(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            Provenance::Shifted { k } | Provenance::Combined { k, .. } => *k,
            _ => 0,
        }
    }

    pub fn m(&self) -> usize {
        match self {
            Provenance::Misassigned { m } | Provenance::Combined { m, .. } => *m,
            _ => 0,
        }
    }
}

/// One segment of a clustering: an inclusive time span and its cluster.
/// For ground truth and internally degraded clusterings the cluster id is a
/// pattern id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterSegment {
    pub segment_id: usize,
    pub start_ts: i64,
    pub end_ts: i64,
    pub cluster_id: usize,
}

/// A segmentation plus a cluster assignment per segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub segments: Vec<ClusterSegment>,
    pub provenance: Provenance,
}

impl Clustering {
    /// Ground-truth clustering of a dataset: segment spans with pattern ids
    /// as cluster ids.
    pub fn ground_truth(ds: &SubjectDataset) -> Self {
        let segments = ds
            .labels
            .iter()
            .map(|l| ClusterSegment {
                segment_id: l.segment_id,
                start_ts: l.start_ts,
                end_ts: l.end_ts,
                cluster_id: l.pattern_id,
            })
            .collect();
        Clustering {
            segments,
            provenance: Provenance::GroundTruth,
        }
    }

    pub fn n_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn cluster_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.segments.iter().map(|s| s.cluster_id).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

/// Per-segment observation counts for a clustering over a timestamp axis.
pub fn segment_obs_counts(c: &Clustering, timestamps: &[i64]) -> Vec<usize> {
    c.segments
        .iter()
        .map(|s| {
            let lo = timestamps.partition_point(|&t| t < s.start_ts);
            let hi = timestamps.partition_point(|&t| t <= s.end_ts);
            hi - lo
        })
        .collect()
}

/// Shift range used when building suites: min segment length minus 100 on
/// long-segment variants; short-segment variants (sparse, downsampled) fall
/// back to the mean length so mid-range shifts stay available.
pub fn suite_shift_cap(gt: &Clustering, timestamps: &[i64]) -> usize {
    let counts = segment_obs_counts(gt, timestamps);
    let min_len = counts.iter().copied().min().unwrap_or(0);
    if min_len > 100 {
        min_len - 100
    } else {
        (timestamps.len() / counts.len().max(1)).max(1)
    }
}

/// Moves every internal segment end forward by `k` observations; the last
/// segment end stays fixed. Assignments are unchanged and the result is
/// still a partition of the subject's span.
///
/// Each boundary clamps at the subject's end, so a shift larger than a
/// segment's length pushes that segment's window entirely into its
/// successors' territory and segments squeezed past the end are dropped:
/// per boundary, min(k, next segment length) observations change cluster.
pub fn shift_boundaries(gt: &Clustering, k: usize, timestamps: &[i64]) -> Result<Clustering> {
    let n_rows = timestamps.len();
    if k >= n_rows {
        return Err(Error::ShiftOutOfRange { k, max: n_rows - 1 });
    }
    let n = gt.segments.len();
    let last_row = n_rows - 1;
    // Original end rows; internal boundaries move forward by k, clamped.
    let mut end_rows: Vec<usize> = gt
        .segments
        .iter()
        .map(|s| timestamps.partition_point(|&t| t <= s.end_ts) - 1)
        .collect();
    for row in end_rows.iter_mut().take(n.saturating_sub(1)) {
        *row = (*row + k).min(last_row);
    }

    let mut segments = Vec::with_capacity(n);
    let mut start_row = 0usize;
    for (i, &end_row) in end_rows.iter().enumerate() {
        if end_row < start_row {
            continue; // squeezed out entirely
        }
        let mut s = gt.segments[i];
        s.start_ts = timestamps[start_row];
        s.end_ts = timestamps[end_row];
        segments.push(s);
        start_row = end_row + 1;
        if start_row > last_row {
            break;
        }
    }
    Ok(Clustering {
        segments,
        provenance: Provenance::Shifted { k },
    })
}

/// Reassigns `m` distinct segments, chosen uniformly, each to a uniformly
/// chosen modelled pattern different from its true one.
pub fn misassign(gt: &Clustering, m: usize, seed: u64) -> Result<Clustering> {
    let n = gt.n_segments();
    if m > n {
        return Err(Error::MisassignOutOfRange { m, max: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    // Partial Fisher-Yates: the first m entries are the victims.
    for i in 0..m {
        let j = rng.random_range(i..n);
        order.swap(i, j);
    }
    let pattern_ids: Vec<usize> = patterns::modelled_patterns().iter().map(|p| p.id).collect();
    let mut segments = gt.segments.clone();
    for &idx in &order[..m] {
        loop {
            let candidate = pattern_ids[rng.random_range(0..pattern_ids.len())];
            if candidate != gt.segments[idx].cluster_id {
                segments[idx].cluster_id = candidate;
                break;
            }
        }
    }
    Ok(Clustering {
        segments,
        provenance: Provenance::Misassigned { m },
    })
}

/// Shift then misassign, with independent seed streams. A large shift can
/// squeeze out tail segments, so the misassignment count clamps to what
/// survives; the provenance records the effective values.
pub fn combined(
    gt: &Clustering,
    k: usize,
    m: usize,
    seed: u64,
    timestamps: &[i64],
) -> Result<Clustering> {
    let shifted = shift_boundaries(gt, k, timestamps)?;
    let m = m.min(shifted.n_segments());
    let mut c = misassign(&shifted, m, derive_seed(seed, 0xC0))?;
    c.provenance = Provenance::Combined { k, m };
    Ok(c)
}

/// The 66 degraded clusterings for one subject plus its ground truth.
pub struct DegradationSuite {
    pub ground_truth: Clustering,
    pub degraded: Vec<Clustering>,
}

const PER_STRATEGY: usize = 22;
const K_ANCHORS: [usize; 6] = [1, 50, 100, 200, 400, 800];
const M_ANCHORS: [usize; 7] = [1, 5, 20, 40, 60, 80, usize::MAX];
const KM_ANCHORS: [(usize, usize); 10] = [
    (50, 5),
    (100, 20),
    (200, 40),
    (400, 60),
    (800, usize::MAX),
    (100, usize::MAX),
    (50, usize::MAX),
    (800, 1),
    (1, 80),
    (400, 20),
];

/// Builds 22 clusterings per strategy. Fixed anchor parameters (where
/// segment lengths permit) are topped up with seeded random draws, so the
/// achieved Jaccard values span the full [0, 1] range.
pub fn build_suite(gt: &Clustering, timestamps: &[i64], seed: u64) -> Result<DegradationSuite> {
    let n = gt.n_segments();
    let max_k = suite_shift_cap(gt, timestamps);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0xA5));

    let mut ks: Vec<usize> = K_ANCHORS.iter().copied().filter(|&k| k <= max_k).collect();
    while ks.len() < PER_STRATEGY {
        ks.push(rng.random_range(1..=max_k.max(1)));
    }
    let mut ms: Vec<usize> = M_ANCHORS.iter().map(|&m| m.min(n)).collect();
    ms.dedup();
    while ms.len() < PER_STRATEGY {
        ms.push(rng.random_range(1..=n));
    }
    let mut kms: Vec<(usize, usize)> = KM_ANCHORS
        .iter()
        .map(|&(k, m)| (k.min(max_k.max(1)), m.min(n)))
        .collect();
    kms.dedup();
    while kms.len() < PER_STRATEGY {
        kms.push((rng.random_range(1..=max_k.max(1)), rng.random_range(1..=n)));
    }

    let mut degraded = Vec::with_capacity(3 * PER_STRATEGY);
    for k in ks {
        degraded.push(shift_boundaries(gt, k, timestamps)?);
    }
    for (i, m) in ms.into_iter().enumerate() {
        degraded.push(misassign(gt, m, derive_seed(seed, 0x100 + i as u64))?);
    }
    for (i, (k, m)) in kms.into_iter().enumerate() {
        degraded.push(combined(
            gt,
            k,
            m,
            derive_seed(seed, 0x200 + i as u64),
            timestamps,
        )?);
    }
    Ok(DegradationSuite {
        ground_truth: gt.clone(),
        degraded,
    })
}

/// Dataset reduction mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReduceMode {
    Clusters,
    Segments,
}

/// Reduced-cluster or reduced-segment version of a ground-truth dataset.
///
/// Cluster mode keeps `round(fraction * n_patterns)` pattern ids chosen
/// uniformly and splices the surviving segments contiguously; segment mode
/// keeps the first `round(fraction * n_segments)` segments.
pub fn reduce(
    ds: &SubjectDataset,
    mode: ReduceMode,
    fraction: f64,
    seed: u64,
) -> Result<SubjectDataset> {
    if fraction != 0.5 && fraction != 0.25 {
        return Err(Error::InvalidFraction(fraction));
    }
    let keep_labels: Vec<usize> = match mode {
        ReduceMode::Segments => {
            let keep = (fraction * ds.labels.len() as f64).round() as usize;
            (0..keep).collect()
        }
        ReduceMode::Clusters => {
            let mut ids: Vec<usize> = ds.labels.iter().map(|l| l.pattern_id).collect();
            ids.sort_unstable();
            ids.dedup();
            let keep = (fraction * ids.len() as f64).round() as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in 0..keep {
                let j = rng.random_range(i..ids.len());
                ids.swap(i, j);
            }
            let kept: std::collections::HashSet<usize> = ids[..keep].iter().copied().collect();
            ds.labels
                .iter()
                .enumerate()
                .filter(|(_, l)| kept.contains(&l.pattern_id))
                .map(|(i, _)| i)
                .collect()
        }
    };

    let tick = match ds.stage {
        Stage::Downsampled => 60,
        _ => 1,
    };
    let mut out = SubjectDataset {
        subject_id: ds.subject_id.clone(),
        stage: ds.stage,
        completeness: ds.completeness,
        timestamps: Vec::new(),
        v1: Vec::new(),
        v2: Vec::new(),
        v3: Vec::new(),
        labels: Vec::new(),
    };
    let mut next_start = ds.labels.first().map(|l| l.start_ts).unwrap_or(0);
    for (new_id, &li) in keep_labels.iter().enumerate() {
        let label = &ds.labels[li];
        let (lo, hi) = ds.row_range(label.start_ts, label.end_ts);
        let offset = next_start - label.start_ts;
        for i in lo..hi {
            out.timestamps.push(ds.timestamps[i] + offset);
            out.v1.push(ds.v1[i]);
            out.v2.push(ds.v2[i]);
            out.v3.push(ds.v3[i]);
        }
        let mut l = label.clone();
        l.segment_id = new_id;
        l.start_ts += offset;
        l.end_ts += offset;
        next_start = l.end_ts + tick;
        out.labels.push(l);
    }
    if out.labels.is_empty() {
        return Err(Error::EmptyDataset);
    }
    out.relabel()?;
    Ok(out)
}
