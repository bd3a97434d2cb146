//! The evaluation protocol: Minkowski distances over correlation vectors,
//! internal indices (SWC, DBI), observation-level Jaccard, cluster-to-ground
//! -truth mapping, pattern and segmentation measures, and report assembly
//! against the shipped reference tables.

use std::collections::BTreeMap;

use crate::datagen::SubjectDataset;
use crate::degrade::{Clustering, Provenance};
use crate::estimators::{spearman, SegmentBlock};
use crate::patterns::{self, CorrelationVector};
use crate::reference::{self, ReferenceRow};
use crate::{Error, Result};

/// Minkowski exponent: p = 1 for pattern mapping, p = 5 for the internal
/// indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceSpec {
    pub p: f64,
}

impl DistanceSpec {
    pub const MAPPING: DistanceSpec = DistanceSpec { p: 1.0 };
    pub const INDEX: DistanceSpec = DistanceSpec { p: 5.0 };
}

impl Default for DistanceSpec {
    fn default() -> Self {
        DistanceSpec::INDEX
    }
}

/// Lp norm distance over the three upper-triangle coefficients.
pub fn lp_distance(a: &CorrelationVector, b: &CorrelationVector, spec: DistanceSpec) -> f64 {
    let x = a.as_array();
    let y = b.as_array();
    let sum: f64 = (0..3).map(|i| (x[i] - y[i]).abs().powf(spec.p)).sum();
    sum.powf(1.0 / spec.p)
}

/// Mean absolute coefficient difference; identically lp_distance at p=1
/// divided by 3.
pub fn mae(a: &CorrelationVector, b: &CorrelationVector) -> f64 {
    lp_distance(a, b, DistanceSpec::MAPPING) / 3.0
}

/// Silhouette width criterion over segment vectors grouped by cluster,
/// in [-1, 1]. Segments in singleton clusters contribute silhouette 0.
pub fn swc(vectors: &[CorrelationVector], cluster_of: &[usize], spec: DistanceSpec) -> Result<f64> {
    let n = vectors.len();
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in cluster_of.iter().enumerate() {
        members.entry(c).or_default().push(i);
    }
    if members.len() < 2 {
        return Err(Error::SingleCluster(members.len()));
    }
    let mut total = 0.0;
    for m in 0..n {
        let own = &members[&cluster_of[m]];
        if own.len() == 1 {
            continue; // silhouette 0
        }
        let a = own
            .iter()
            .filter(|&&y| y != m)
            .map(|&y| lp_distance(&vectors[m], &vectors[y], spec))
            .sum::<f64>()
            / (own.len() - 1) as f64;
        let b = members
            .iter()
            .filter(|(&c, _)| c != cluster_of[m])
            .map(|(_, idx)| {
                idx.iter()
                    .map(|&y| lp_distance(&vectors[m], &vectors[y], spec))
                    .sum::<f64>()
                    / idx.len() as f64
            })
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}

/// Davies-Bouldin index outcome. `degenerate` flags near-coincident
/// centroids, which blow the ratio up instead of failing the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbiValue {
    pub value: f64,
    pub degenerate: bool,
}

/// Davies-Bouldin index with caller-supplied centroids (the pooled
/// correlation vector of all observations in each cluster).
pub fn dbi(
    vectors: &[CorrelationVector],
    cluster_of: &[usize],
    centroids: &BTreeMap<usize, CorrelationVector>,
    spec: DistanceSpec,
) -> Result<DbiValue> {
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in cluster_of.iter().enumerate() {
        members.entry(c).or_default().push(i);
    }
    if members.len() < 2 {
        return Err(Error::SingleCluster(members.len()));
    }
    let scatter: BTreeMap<usize, f64> = members
        .iter()
        .map(|(&c, idx)| {
            let s = idx
                .iter()
                .map(|&i| lp_distance(&vectors[i], &centroids[&c], spec))
                .sum::<f64>()
                / idx.len() as f64;
            (c, s)
        })
        .collect();

    let ids: Vec<usize> = members.keys().copied().collect();
    let mut degenerate = false;
    let mut total = 0.0;
    for &k in &ids {
        let mut worst = 0.0f64;
        for &y in &ids {
            if y == k {
                continue;
            }
            let d = lp_distance(&centroids[&k], &centroids[&y], spec);
            let ratio = if d > 0.0 {
                (scatter[&k] + scatter[&y]) / d
            } else {
                f64::INFINITY
            };
            if d < 1e-12 {
                degenerate = true;
            }
            worst = worst.max(ratio);
        }
        total += worst;
    }
    Ok(DbiValue {
        value: total / ids.len() as f64,
        degenerate,
    })
}

/// Observation-level Jaccard index: the fraction of observations whose
/// cluster label matches ground truth, J = t_p / T.
pub fn jaccard(candidate: &Clustering, gt: &Clustering, timestamps: &[i64]) -> Result<f64> {
    let total = timestamps.len();
    let mut matched = 0usize;
    let mut covered_cand = 0usize;
    let mut covered_gt = 0usize;

    let mut ci = 0;
    let mut gi = 0;
    for &t in timestamps {
        while ci < candidate.segments.len() && candidate.segments[ci].end_ts < t {
            ci += 1;
        }
        while gi < gt.segments.len() && gt.segments[gi].end_ts < t {
            gi += 1;
        }
        let cand = candidate
            .segments
            .get(ci)
            .filter(|s| s.start_ts <= t)
            .map(|s| s.cluster_id);
        let truth = gt
            .segments
            .get(gi)
            .filter(|s| s.start_ts <= t)
            .map(|s| s.cluster_id);
        covered_cand += cand.is_some() as usize;
        covered_gt += truth.is_some() as usize;
        if let (Some(a), Some(b)) = (cand, truth) {
            matched += (a == b) as usize;
        }
    }
    if covered_cand != total || covered_gt != total {
        return Err(Error::CoverageMismatch {
            candidate: covered_cand,
            ground_truth: covered_gt,
        });
    }
    Ok(matched as f64 / total as f64)
}

/// Tolerance for declaring a mapped cluster a match: every coefficient
/// within +-0.1 of the mapped ground-truth structure.
pub const MATCH_TOLERANCE: f64 = 0.1;

/// One row of the cluster-to-ground-truth mapping table.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingEntry {
    pub cluster_id: usize,
    /// Coefficient-wise median over the cluster's segment vectors.
    pub median_vector: CorrelationVector,
    /// Nearest ground-truth structure by L1 distance.
    pub mapped_pattern: usize,
    pub distance: f64,
    /// All coefficients within the match tolerance of the mapped structure.
    pub matched: bool,
    /// How many ground-truth structures lie within tolerance.
    pub n_within_tolerance: usize,
}

/// Mapping of candidate clusters to ground-truth structures.
#[derive(Debug, Clone, Default)]
pub struct MappingTable {
    pub entries: Vec<MappingEntry>,
    pub warnings: Vec<String>,
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

fn median_vector(vs: &[CorrelationVector]) -> CorrelationVector {
    let mut c12: Vec<f64> = vs.iter().map(|v| v.rho12).collect();
    let mut c13: Vec<f64> = vs.iter().map(|v| v.rho13).collect();
    let mut c23: Vec<f64> = vs.iter().map(|v| v.rho23).collect();
    CorrelationVector::new(median(&mut c12), median(&mut c13), median(&mut c23))
}

/// Per-pattern ground-truth structures: the coefficient-wise median of the
/// ground-truth segments' empirical vectors, i.e. what the data actually
/// achieves rather than the theoretical target.
pub fn ground_truth_structures(ds: &SubjectDataset) -> BTreeMap<usize, CorrelationVector> {
    let mut by_pattern: BTreeMap<usize, Vec<CorrelationVector>> = BTreeMap::new();
    for l in &ds.labels {
        by_pattern
            .entry(l.pattern_id)
            .or_default()
            .push(l.empirical);
    }
    by_pattern
        .into_iter()
        .map(|(id, vs)| (id, median_vector(&vs)))
        .collect()
}

fn within_match_tolerance(a: &CorrelationVector, b: &CorrelationVector) -> bool {
    let x = a.as_array();
    let y = b.as_array();
    (0..3).all(|i| (x[i] - y[i]).abs() <= MATCH_TOLERANCE)
}

/// Maps each candidate cluster to the closest ground-truth structure on the
/// cluster's median segment vector; L1 distance by default.
pub fn map_clusters(
    vectors: &[CorrelationVector],
    cluster_of: &[usize],
    gt_structures: &BTreeMap<usize, CorrelationVector>,
) -> MappingTable {
    map_clusters_with(vectors, cluster_of, gt_structures, DistanceSpec::MAPPING)
}

/// [`map_clusters`] with an explicit mapping distance.
pub fn map_clusters_with(
    vectors: &[CorrelationVector],
    cluster_of: &[usize],
    gt_structures: &BTreeMap<usize, CorrelationVector>,
    spec: DistanceSpec,
) -> MappingTable {
    let mut members: BTreeMap<usize, Vec<CorrelationVector>> = BTreeMap::new();
    for (i, &c) in cluster_of.iter().enumerate() {
        members.entry(c).or_default().push(vectors[i]);
    }
    let mut table = MappingTable::default();
    for (cluster_id, vs) in members {
        if vs.is_empty() {
            table.warnings.push(format!(
                "cluster {cluster_id} is empty, excluded from mapping"
            ));
            continue;
        }
        let med = median_vector(&vs);
        let (mapped_pattern, distance) = gt_structures
            .iter()
            .map(|(&id, v)| (id, lp_distance(&med, v, spec)))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("ground truth structures nonempty");
        let n_within = gt_structures
            .values()
            .filter(|v| within_match_tolerance(&med, v))
            .count();
        table.entries.push(MappingEntry {
            cluster_id,
            median_vector: med,
            mapped_pattern,
            distance,
            matched: within_match_tolerance(&med, &gt_structures[&mapped_pattern]),
            n_within_tolerance: n_within,
        });
    }
    table
}

/// Pattern discovery rate and specificity, both in percent.
///
/// Discovery: ground-truth structures matched (within tolerance) by at
/// least one cluster. Specificity: candidate clusters matching exactly one
/// ground-truth structure.
pub fn pattern_measures(
    mapping: &MappingTable,
    gt_structures: &BTreeMap<usize, CorrelationVector>,
) -> (f64, f64) {
    if mapping.entries.is_empty() || gt_structures.is_empty() {
        return (0.0, 0.0);
    }
    let discovered = gt_structures
        .keys()
        .filter(|id| {
            mapping
                .entries
                .iter()
                .any(|e| e.mapped_pattern == **id && e.matched)
        })
        .count();
    let specific = mapping
        .entries
        .iter()
        .filter(|e| e.n_within_tolerance == 1)
        .count();
    (
        100.0 * discovered as f64 / gt_structures.len() as f64,
        100.0 * specific as f64 / mapping.entries.len() as f64,
    )
}

/// Segment count ratio and median segment length ratio, candidate over
/// ground truth. Values above 1 mean over-segmentation and over-long
/// segments respectively.
pub fn segmentation_measures(
    candidate: &Clustering,
    gt: &Clustering,
    timestamps: &[i64],
) -> (f64, f64) {
    let cand_counts = crate::degrade::segment_obs_counts(candidate, timestamps);
    let gt_counts = crate::degrade::segment_obs_counts(gt, timestamps);
    let mut c: Vec<f64> = cand_counts.iter().map(|&x| x as f64).collect();
    let mut g: Vec<f64> = gt_counts.iter().map(|&x| x as f64).collect();
    let count_ratio = c.len() as f64 / g.len() as f64;
    let length_ratio = median(&mut c) / median(&mut g);
    (count_ratio, length_ratio)
}

/// Count of segments whose empirical vector falls outside the tolerance
/// bands of its pattern.
pub fn out_of_tolerance_count(ds: &SubjectDataset) -> Result<usize> {
    let cat = patterns::catalogue();
    let mut count = 0;
    for l in &ds.labels {
        if !patterns::within_tolerance(&l.empirical, &cat[l.pattern_id])? {
            count += 1;
        }
    }
    Ok(count)
}

/// Per-clustering scores.
#[derive(Debug, Clone)]
pub struct EvaluationReport {
    pub provenance: Provenance,
    pub n_clusters: usize,
    pub n_segments: usize,
    pub swc: f64,
    pub dbi: f64,
    pub dbi_degenerate: bool,
    pub jaccard: f64,
    pub mae_mean: f64,
    pub segments_outside_tolerance: usize,
    pub pattern_discovery_pct: f64,
    pub pattern_specificity_pct: f64,
    pub segmentation_ratio: f64,
    pub segment_length_ratio: f64,
    pub mapping: MappingTable,
    /// Closest row of the shipped reference tables, for context.
    pub reference: Option<&'static ReferenceRow>,
}

/// Distance exponents for one evaluation run. The defaults (p = 5 for the
/// internal indices, p = 1 for mapping) are what the reference tables were
/// calibrated with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub index_spec: DistanceSpec,
    pub mapping_spec: DistanceSpec,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            index_spec: DistanceSpec::INDEX,
            mapping_spec: DistanceSpec::MAPPING,
        }
    }
}

/// Runs the full protocol for one candidate clustering against a dataset
/// and its ground truth, at the default distance exponents.
///
/// Internally generated clusterings carry pattern ids as cluster ids and
/// are scored directly; external clusterings are first mapped to ground
/// truth structures by the L1 rule.
pub fn evaluate(
    candidate: &Clustering,
    ds: &SubjectDataset,
    gt: &Clustering,
) -> Result<EvaluationReport> {
    evaluate_with(candidate, ds, gt, EvalOptions::default())
}

/// [`evaluate`] with explicit distance exponents.
pub fn evaluate_with(
    candidate: &Clustering,
    ds: &SubjectDataset,
    gt: &Clustering,
    opts: EvalOptions,
) -> Result<EvaluationReport> {
    if candidate.segments.is_empty() {
        return Err(Error::EmptyClustering);
    }

    // Per-candidate-segment Spearman vectors.
    let mut vectors = Vec::with_capacity(candidate.segments.len());
    let mut cluster_of = Vec::with_capacity(candidate.segments.len());
    for s in &candidate.segments {
        let (v1, v2, v3) = ds.slice(s.start_ts, s.end_ts);
        if v1.len() < 3 {
            return Err(Error::SegmentTooShort {
                segment_id: s.segment_id,
                n_obs: v1.len(),
            });
        }
        let block = SegmentBlock::new(v1, v2, v3)?;
        vectors.push(spearman(&block)?);
        cluster_of.push(s.cluster_id);
    }

    // Pooled per-cluster centroids.
    type Columns = (Vec<f64>, Vec<f64>, Vec<f64>);
    let mut member_rows: BTreeMap<usize, Columns> = BTreeMap::new();
    for s in &candidate.segments {
        let (v1, v2, v3) = ds.slice(s.start_ts, s.end_ts);
        let entry = member_rows.entry(s.cluster_id).or_default();
        entry.0.extend_from_slice(v1);
        entry.1.extend_from_slice(v2);
        entry.2.extend_from_slice(v3);
    }
    let mut centroids = BTreeMap::new();
    for (c, (v1, v2, v3)) in &member_rows {
        let block = SegmentBlock::new(v1, v2, v3)?;
        centroids.insert(*c, spearman(&block)?);
    }

    let swc_value = swc(&vectors, &cluster_of, opts.index_spec)?;
    let dbi_value = dbi(&vectors, &cluster_of, &centroids, opts.index_spec)?;

    let gt_structures = ground_truth_structures(ds);
    let mapping = map_clusters_with(&vectors, &cluster_of, &gt_structures, opts.mapping_spec);
    let (discovery, specificity) = pattern_measures(&mapping, &gt_structures);

    let external = candidate.provenance == Provenance::External;
    let scored = if external {
        // Relabel clusters to their mapped patterns before external validation.
        let by_cluster: BTreeMap<usize, usize> = mapping
            .entries
            .iter()
            .map(|e| (e.cluster_id, e.mapped_pattern))
            .collect();
        let mut c = candidate.clone();
        for s in c.segments.iter_mut() {
            s.cluster_id = by_cluster[&s.cluster_id];
        }
        c
    } else {
        candidate.clone()
    };
    let jaccard_value = jaccard(&scored, gt, &ds.timestamps)?;

    // Pattern accuracy: MAE between each segment's empirical vector and the
    // structure its cluster stands for.
    let cat = patterns::catalogue();
    let target_of = |cluster_id: usize| -> Result<CorrelationVector> {
        if external {
            Ok(gt_structures[&mapping
                .entries
                .iter()
                .find(|e| e.cluster_id == cluster_id)
                .expect("mapped cluster")
                .mapped_pattern])
        } else {
            cat[cluster_id].relaxed_or_err()
        }
    };
    let mut mae_sum = 0.0;
    let mut oot = 0;
    for (i, s) in candidate.segments.iter().enumerate() {
        let target = target_of(s.cluster_id)?;
        mae_sum += mae(&vectors[i], &target);
        let pattern_id = if external {
            mapping
                .entries
                .iter()
                .find(|e| e.cluster_id == s.cluster_id)
                .map(|e| e.mapped_pattern)
                .unwrap_or(s.cluster_id)
        } else {
            s.cluster_id
        };
        if !patterns::within_tolerance(&vectors[i], &cat[pattern_id])? {
            oot += 1;
        }
    }
    let mae_mean = mae_sum / candidate.segments.len() as f64;

    let (seg_ratio, len_ratio) = segmentation_measures(candidate, gt, &ds.timestamps);

    Ok(EvaluationReport {
        provenance: candidate.provenance,
        n_clusters: centroids.len(),
        n_segments: candidate.segments.len(),
        swc: swc_value,
        dbi: dbi_value.value,
        dbi_degenerate: dbi_value.degenerate,
        jaccard: jaccard_value,
        mae_mean,
        segments_outside_tolerance: oot,
        pattern_discovery_pct: discovery,
        pattern_specificity_pct: specificity,
        segmentation_ratio: seg_ratio,
        segment_length_ratio: len_ratio,
        mapping,
        reference: reference::nearest_row(ds.stage, ds.completeness, jaccard_value),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(a: f64, b: f64, c: f64) -> CorrelationVector {
        CorrelationVector::new(a, b, c)
    }

    #[test]
    fn lp_distance_examples() {
        let a = v(1.0, 0.0, 0.0);
        let zero = v(0.0, 0.0, 0.0);
        assert_eq!(lp_distance(&a, &a, DistanceSpec::INDEX), 0.0);
        assert_eq!(lp_distance(&a, &zero, DistanceSpec::MAPPING), 1.0);
        let ones = v(1.0, 1.0, 1.0);
        let neg = v(-1.0, -1.0, -1.0);
        let expected = (3.0 * 2f64.powi(5)).powf(0.2);
        let got = lp_distance(&ones, &neg, DistanceSpec::INDEX);
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 2.4915).abs() < 1e-4);
    }

    #[test]
    fn mae_examples() {
        let got = mae(&v(-0.67, -0.66, 0.04), &v(-0.71, -0.7, 0.0));
        assert!((got - 0.04).abs() < 1e-12);
        assert_eq!(mae(&v(0.2, 0.3, -0.1), &v(0.2, 0.3, -0.1)), 0.0);
        let got2 = mae(&v(-0.53, -0.52, 0.18), &v(-0.71, -0.7, 0.0));
        assert!((got2 - 0.18).abs() < 1e-12);
    }

    #[test]
    fn mae_is_l1_over_three() {
        let a = v(0.3, -0.6, 0.9);
        let b = v(-0.2, 0.4, 0.1);
        let l1 = lp_distance(&a, &b, DistanceSpec::MAPPING);
        assert!((mae(&a, &b) - l1 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn lp_distance_is_a_metric() {
        let pts = [
            v(0.1, 0.2, 0.3),
            v(-0.5, 0.0, 0.9),
            v(0.7, -0.7, 0.0),
            v(-1.0, 1.0, -1.0),
        ];
        for spec in [DistanceSpec::MAPPING, DistanceSpec::INDEX] {
            for a in &pts {
                for b in &pts {
                    let dab = lp_distance(a, b, spec);
                    assert!(dab >= 0.0);
                    assert!((dab - lp_distance(b, a, spec)).abs() < 1e-12);
                    for c in &pts {
                        let dac = lp_distance(a, c, spec);
                        let dcb = lp_distance(c, b, spec);
                        assert!(dab <= dac + dcb + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn swc_two_identical_clusters_far_apart() {
        let vectors = vec![
            v(0.9, 0.9, 0.9),
            v(0.9, 0.9, 0.9),
            v(-0.9, -0.9, -0.9),
            v(-0.9, -0.9, -0.9),
        ];
        let clusters = vec![0, 0, 1, 1];
        let s = swc(&vectors, &clusters, DistanceSpec::INDEX).unwrap();
        assert_eq!(s, 1.0);
    }

    #[test]
    fn swc_single_cluster_errors() {
        let vectors = vec![v(0.0, 0.0, 0.0); 3];
        let clusters = vec![1, 1, 1];
        assert!(matches!(
            swc(&vectors, &clusters, DistanceSpec::INDEX),
            Err(Error::SingleCluster(1))
        ));
    }

    #[test]
    fn swc_within_bounds() {
        let vectors = vec![
            v(0.1, 0.0, 0.0),
            v(0.2, 0.1, 0.0),
            v(0.0, 0.2, 0.1),
            v(-0.1, 0.0, 0.2),
        ];
        let clusters = vec![0, 1, 0, 1];
        let s = swc(&vectors, &clusters, DistanceSpec::INDEX).unwrap();
        assert!((-1.0..=1.0).contains(&s));
    }

    #[test]
    fn dbi_flags_coincident_centroids() {
        let vectors = vec![v(0.5, 0.0, 0.0), v(0.5, 0.0, 0.0)];
        let clusters = vec![0, 1];
        let mut centroids = BTreeMap::new();
        centroids.insert(0, v(0.5, 0.0, 0.0));
        centroids.insert(1, v(0.5, 0.0, 0.0));
        let d = dbi(&vectors, &clusters, &centroids, DistanceSpec::INDEX).unwrap();
        assert!(d.degenerate);
        assert!(d.value.is_infinite() || d.value > 1e9);
    }

    #[test]
    fn jaccard_identity_and_coverage() {
        use crate::degrade::ClusterSegment;
        let timestamps: Vec<i64> = (0..100).collect();
        let seg = |s, e, c| ClusterSegment {
            segment_id: 0,
            start_ts: s,
            end_ts: e,
            cluster_id: c,
        };
        let gt = Clustering {
            segments: vec![seg(0, 49, 3), seg(50, 99, 7)],
            provenance: Provenance::GroundTruth,
        };
        assert_eq!(jaccard(&gt, &gt, &timestamps).unwrap(), 1.0);

        let half = Clustering {
            segments: vec![seg(0, 49, 3), seg(50, 99, 4)],
            provenance: Provenance::External,
        };
        assert_eq!(jaccard(&half, &gt, &timestamps).unwrap(), 0.5);

        let gap = Clustering {
            segments: vec![seg(0, 39, 3)],
            provenance: Provenance::External,
        };
        assert!(jaccard(&gap, &gt, &timestamps).is_err());
    }

    #[test]
    fn mapping_nearest_and_tolerance() {
        // Ground-truth structures: pattern 10-like and a far-away one.
        let mut gts = BTreeMap::new();
        gts.insert(10, v(0.71, 0.0, 0.7));
        gts.insert(13, v(1.0, 1.0, 1.0));
        // Cluster 0 sits near pattern 10.
        let vectors = vec![v(0.69, 0.02, 0.68), v(0.70, 0.01, 0.69), v(0.0, 0.4, 0.4)];
        let clusters = vec![0, 0, 1];
        let table = map_clusters(&vectors, &clusters, &gts);
        let e0 = table.entries.iter().find(|e| e.cluster_id == 0).unwrap();
        assert_eq!(e0.mapped_pattern, 10);
        assert!(e0.matched);
        assert_eq!(e0.n_within_tolerance, 1);
        // Cluster 1 maps somewhere but misses the tolerance flag.
        let e1 = table.entries.iter().find(|e| e.cluster_id == 1).unwrap();
        assert!(!e1.matched);
    }

    #[test]
    fn pattern_measures_self_mapping() {
        let mut gts = BTreeMap::new();
        gts.insert(1, v(0.0, 0.0, 1.0));
        gts.insert(2, v(0.0, 0.0, -1.0));
        let vectors = vec![v(0.0, 0.0, 0.99), v(0.01, 0.0, -0.98)];
        let clusters = vec![1, 2];
        let table = map_clusters(&vectors, &clusters, &gts);
        let (d, s) = pattern_measures(&table, &gts);
        assert_eq!(d, 100.0);
        assert_eq!(s, 100.0);
    }

    #[test]
    fn segmentation_measures_construction() {
        use crate::degrade::ClusterSegment;
        let timestamps: Vec<i64> = (0..100).collect();
        let seg = |id, s, e, c| ClusterSegment {
            segment_id: id,
            start_ts: s,
            end_ts: e,
            cluster_id: c,
        };
        let gt = Clustering {
            segments: vec![seg(0, 0, 49, 0), seg(1, 50, 99, 1)],
            provenance: Provenance::GroundTruth,
        };
        let halves = Clustering {
            segments: vec![
                seg(0, 0, 24, 0),
                seg(1, 25, 49, 0),
                seg(2, 50, 74, 1),
                seg(3, 75, 99, 1),
            ],
            provenance: Provenance::External,
        };
        let (cr, lr) = segmentation_measures(&halves, &gt, &timestamps);
        assert_eq!(cr, 2.0);
        assert_eq!(lr, 0.5);
        let (cr1, lr1) = segmentation_measures(&gt, &gt, &timestamps);
        assert_eq!((cr1, lr1), (1.0, 1.0));
    }
}
