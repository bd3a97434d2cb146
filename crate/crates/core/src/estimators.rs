//! Correlation estimation primitives over three-variate segment blocks:
//! Pearson, Spearman (average ranks for ties), and Kendall tau-b.

use crate::patterns::CorrelationVector;
use crate::{Error, Result};

/// A view over one segment's n x 3 values, column-major.
#[derive(Debug, Clone, Copy)]
pub struct SegmentBlock<'a> {
    pub cols: [&'a [f64]; 3],
}

impl<'a> SegmentBlock<'a> {
    pub fn new(v1: &'a [f64], v2: &'a [f64], v3: &'a [f64]) -> Result<Self> {
        let n = v1.len();
        if n < 3 {
            return Err(Error::BlockTooShort(n));
        }
        debug_assert!(v2.len() == n && v3.len() == n);
        let cols = [v1, v2, v3];
        for (j, col) in cols.iter().enumerate() {
            if col.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(j + 1));
            }
        }
        Ok(Self { cols })
    }

    pub fn len(&self) -> usize {
        self.cols[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn pearson_pair(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

fn check_variance(block: &SegmentBlock) -> Result<()> {
    for (j, col) in block.cols.iter().enumerate() {
        let first = col[0];
        if col.iter().all(|&x| x == first) {
            return Err(Error::ZeroVariance(j + 1));
        }
    }
    Ok(())
}

/// Product-moment coefficients for the three pairs.
pub fn pearson(block: &SegmentBlock) -> Result<CorrelationVector> {
    check_variance(block)?;
    let [v1, v2, v3] = block.cols;
    Ok(CorrelationVector::new(
        pearson_pair(v1, v2),
        pearson_pair(v1, v3),
        pearson_pair(v2, v3),
    ))
}

/// Average ranks (1-based); ties share the mean of their positions.
pub fn ranks(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap());
    let mut r = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Pearson applied to average ranks.
pub fn spearman(block: &SegmentBlock) -> Result<CorrelationVector> {
    check_variance(block)?;
    let r: Vec<Vec<f64>> = block.cols.iter().map(|c| ranks(c)).collect();
    Ok(CorrelationVector::new(
        pearson_pair(&r[0], &r[1]),
        pearson_pair(&r[0], &r[2]),
        pearson_pair(&r[1], &r[2]),
    ))
}

/// Counts strict inversions in `y` by merge sort.
fn merge_count(y: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = y.len();
    if n <= 1 {
        return 0;
    }
    let mid = n / 2;
    let (left, right) = y.split_at_mut(mid);
    let mut swaps = merge_count(left, &mut buf[..mid]) + merge_count(right, &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, 0, 0);
    while i < left.len() && j < right.len() {
        if left[i] <= right[j] {
            buf[k] = left[i];
            i += 1;
        } else {
            // left[i..] are all > right[j]
            swaps += (left.len() - i) as u64;
            buf[k] = right[j];
            j += 1;
        }
        k += 1;
    }
    buf[k..k + left.len() - i].copy_from_slice(&left[i..]);
    buf[k + left.len() - i..].copy_from_slice(&right[j..]);
    y.copy_from_slice(&buf[..n]);
    swaps
}

fn tie_pairs(sorted: &[f64]) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for i in 1..sorted.len() {
        if sorted[i] == sorted[i - 1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

fn kendall_pair(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let n0 = (n as u64) * (n as u64 - 1) / 2;

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        x[a].partial_cmp(&x[b])
            .unwrap()
            .then(y[a].partial_cmp(&y[b]).unwrap())
    });

    // Tie counts: n1 over x runs, n3 over joint (x, y) runs.
    let mut n1 = 0u64;
    let mut n3 = 0u64;
    let mut run_x = 1u64;
    let mut run_xy = 1u64;
    for w in 1..n {
        let (a, b) = (idx[w - 1], idx[w]);
        if x[a] == x[b] {
            run_x += 1;
            if y[a] == y[b] {
                run_xy += 1;
            } else {
                n3 += run_xy * (run_xy - 1) / 2;
                run_xy = 1;
            }
        } else {
            n1 += run_x * (run_x - 1) / 2;
            n3 += run_xy * (run_xy - 1) / 2;
            run_x = 1;
            run_xy = 1;
        }
    }
    n1 += run_x * (run_x - 1) / 2;
    n3 += run_xy * (run_xy - 1) / 2;

    let mut y_ord: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let mut buf = vec![0.0; n];
    let discordant = merge_count(&mut y_ord, &mut buf);
    // y_ord is sorted now.
    let n2 = tie_pairs(&y_ord);

    let concordant_minus_discordant =
        n0 as i64 - n1 as i64 - n2 as i64 + n3 as i64 - 2 * discordant as i64;
    let denom = ((n0 - n1) as f64).sqrt() * ((n0 - n2) as f64).sqrt();
    (concordant_minus_discordant as f64 / denom).clamp(-1.0, 1.0)
}

/// Kendall tau-b with tie correction, O(n log n).
pub fn kendall(block: &SegmentBlock) -> Result<CorrelationVector> {
    check_variance(block)?;
    let [v1, v2, v3] = block.cols;
    Ok(CorrelationVector::new(
        kendall_pair(v1, v2),
        kendall_pair(v1, v3),
        kendall_pair(v2, v3),
    ))
}

/// Which estimator to run; the evaluation CLI exposes this choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Pearson,
    Spearman,
    Kendall,
}

impl Measure {
    pub fn estimate(&self, block: &SegmentBlock) -> Result<CorrelationVector> {
        match self {
            Measure::Pearson => pearson(block),
            Measure::Spearman => spearman(block),
            Measure::Kendall => kendall(block),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Measure::Pearson => "pearson",
            Measure::Spearman => "spearman",
            Measure::Kendall => "kendall",
        }
    }
}
