//! Statistical validation utilities: exact Wilcoxon signed-rank tests with
//! Bonferroni correction, effect sizes, and split equivalence/independence
//! checks.

use crate::estimators::ranks;
use crate::{Error, Result};

/// Differences smaller than this are treated as zero and discarded before
/// ranking.
pub const ZERO_DIFF_THRESHOLD: f64 = 1e-8;

/// Alternative hypothesis for the signed-rank test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternative {
    TwoSided,
    Greater,
    Less,
}

impl Alternative {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "two-sided" => Some(Alternative::TwoSided),
            "greater" => Some(Alternative::Greater),
            "less" => Some(Alternative::Less),
            _ => None,
        }
    }
}

/// How the p-value was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PValueMethod {
    Exact,
    NormalApprox,
}

/// Signed-rank test result. The statistic is W+, the sum of ranks of
/// positive differences. Three effect-size conventions are reported side by
/// side since none is universal: the matched-pairs rank-biserial
/// correlation, r = Z / sqrt(n), and Cohen's d on the paired differences.
#[derive(Debug, Clone, Copy)]
pub struct WilcoxonResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n_used: usize,
    pub method: PValueMethod,
    pub z: f64,
    pub rank_biserial: f64,
    pub r_from_z: f64,
    pub cohen_d: f64,
}

/// Counts of sign assignments reaching each rank sum 0..=n(n+1)/2 when all
/// |differences| are distinct: the exact null distribution of W+ up to the
/// 2^n normalization.
pub fn signed_rank_distribution(n: usize) -> Vec<u64> {
    let max_sum = n * (n + 1) / 2;
    let mut counts = vec![0u64; max_sum + 1];
    counts[0] = 1;
    for rank in 1..=n {
        for s in (rank..=max_sum).rev() {
            counts[s] += counts[s - rank];
        }
    }
    counts
}

fn exact_p(w_plus: f64, n: usize, alternative: Alternative) -> f64 {
    let counts = signed_rank_distribution(n);
    let total = 2f64.powi(n as i32);
    let w = w_plus.round() as usize;
    let p_le: f64 = counts[..=w].iter().map(|&c| c as f64).sum::<f64>() / total;
    let p_ge: f64 = counts[w..].iter().map(|&c| c as f64).sum::<f64>() / total;
    match alternative {
        Alternative::Greater => p_ge,
        Alternative::Less => p_le,
        Alternative::TwoSided => (2.0 * p_le.min(p_ge)).min(1.0),
    }
}

fn normal_p(z: f64, alternative: Alternative) -> f64 {
    let phi = crate::dist::normal_cdf(z);
    match alternative {
        Alternative::Greater => 1.0 - phi,
        Alternative::Less => phi,
        Alternative::TwoSided => (2.0 * phi.min(1.0 - phi)).min(1.0),
    }
}

/// Wilcoxon signed-rank test on paired samples.
///
/// Pairs with |difference| below [`ZERO_DIFF_THRESHOLD`] are discarded.
/// The p-value is exact (dynamic programming over the signed-rank-sum
/// distribution) when the remaining |differences| are tie-free, and a
/// tie-corrected normal approximation otherwise.
pub fn wilcoxon_signed_rank(
    a: &[f64],
    b: &[f64],
    alternative: Alternative,
) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| d.abs() >= ZERO_DIFF_THRESHOLD)
        .collect();
    if diffs.is_empty() {
        return Err(Error::AllDifferencesDiscarded);
    }
    let n = diffs.len();
    if n < 5 {
        return Err(Error::SampleTooSmall(n));
    }

    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let r = ranks(&abs);
    let w_plus: f64 = diffs
        .iter()
        .zip(&r)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, rank)| rank)
        .sum();
    let w_minus = n as f64 * (n as f64 + 1.0) / 2.0 - w_plus;

    // Tie correction for the normal approximation.
    let mut sorted = abs.clone();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut tie_term = 0.0;
    let mut has_ties = false;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        if t > 1.0 {
            has_ties = true;
            tie_term += t * t * t - t;
        }
        i = j + 1;
    }
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    let z = (w_plus - mean) / var.sqrt();

    let (p_value, method) = if has_ties {
        (normal_p(z, alternative), PValueMethod::NormalApprox)
    } else {
        (exact_p(w_plus, n, alternative), PValueMethod::Exact)
    };

    let d_mean = diffs.iter().sum::<f64>() / nf;
    let d_var = diffs
        .iter()
        .map(|d| (d - d_mean) * (d - d_mean))
        .sum::<f64>()
        / (nf - 1.0);

    Ok(WilcoxonResult {
        statistic: w_plus,
        p_value,
        n_used: n,
        method,
        z,
        rank_biserial: (w_plus - w_minus) / (w_plus + w_minus),
        r_from_z: z / nf.sqrt(),
        cohen_d: d_mean / d_var.sqrt(),
    })
}

/// Bonferroni-adjusted significance level.
pub fn bonferroni_alpha(alpha: f64, n_tests: usize) -> f64 {
    alpha / n_tests as f64
}

/// Bonferroni-adjusted p-value, capped at 1.
pub fn bonferroni_p(p: f64, n_tests: usize) -> f64 {
    (p * n_tests as f64).min(1.0)
}

// ---------------------------------------------------------------------------
// Special functions for the Spearman significance test.
// ---------------------------------------------------------------------------

/// Regularized incomplete beta function I_x(a, b) by continued fraction.
fn beta_inc(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front =
        libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - libm::exp(
            libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b)
                + b * (1.0 - x).ln()
                + a * x.ln(),
        ) * beta_cf(b, a, 1.0 - x)
            / b
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-14;
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Two-sided p-value for a t statistic with `df` degrees of freedom.
pub fn t_test_p_two_sided(t: f64, df: f64) -> f64 {
    beta_inc(df / 2.0, 0.5, df / (df + t * t))
}

/// Spearman rank correlation with a two-sided t-approximation p-value.
pub fn spearman_r(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::SampleTooSmall(n));
    }
    let rx = ranks(x);
    let ry = ranks(y);
    let nf = n as f64;
    let mx = rx.iter().sum::<f64>() / nf;
    let my = ry.iter().sum::<f64>() / nf;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let p = if r.abs() >= 1.0 {
        0.0
    } else {
        let t = r * ((nf - 2.0) / (1.0 - r * r)).sqrt();
        t_test_p_two_sided(t, nf - 2.0)
    };
    Ok((r, p))
}

// ---------------------------------------------------------------------------
// Split consistency
// ---------------------------------------------------------------------------

/// Linear-interpolation quantile on unsorted data (numpy default).
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if v.is_empty() {
        return f64::NAN;
    }
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        v[lo]
    } else {
        v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// One measure observed in both splits, paired element-wise.
#[derive(Debug, Clone)]
pub struct MeasurePair {
    pub name: String,
    pub exploratory: Vec<f64>,
    pub confirmatory: Vec<f64>,
}

/// Independence (Spearman r, p) plus equivalence summary per measure.
#[derive(Debug, Clone)]
pub struct ConsistencyRow {
    pub name: String,
    pub r: f64,
    pub p: f64,
    pub mean_exploratory: f64,
    pub mean_confirmatory: f64,
    pub median_exploratory: f64,
    pub median_confirmatory: f64,
    pub q25_exploratory: f64,
    pub q25_confirmatory: f64,
    pub q75_exploratory: f64,
    pub q75_confirmatory: f64,
}

/// Checks that paired per-segment measures from the two splits are
/// uncorrelated (independence) while matching in location (equivalence).
pub fn split_consistency(pairs: &[MeasurePair]) -> Result<Vec<ConsistencyRow>> {
    let mut rows = Vec::with_capacity(pairs.len());
    for pair in pairs {
        if pair.exploratory.len() != pair.confirmatory.len() {
            return Err(Error::LengthMismatch(
                pair.exploratory.len(),
                pair.confirmatory.len(),
            ));
        }
        let (r, p) = spearman_r(&pair.exploratory, &pair.confirmatory)?;
        rows.push(ConsistencyRow {
            name: pair.name.clone(),
            r,
            p,
            mean_exploratory: mean(&pair.exploratory),
            mean_confirmatory: mean(&pair.confirmatory),
            median_exploratory: median(&pair.exploratory),
            median_confirmatory: median(&pair.confirmatory),
            q25_exploratory: quantile(&pair.exploratory, 0.25),
            q25_confirmatory: quantile(&pair.confirmatory, 0.25),
            q75_exploratory: quantile(&pair.exploratory, 0.75),
            q75_confirmatory: quantile(&pair.confirmatory, 0.75),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_distribution_sums_and_symmetry() {
        for n in 1..=12 {
            let counts = signed_rank_distribution(n);
            let total: u64 = counts.iter().sum();
            assert_eq!(total, 1u64 << n);
            let m = counts.len() - 1;
            for s in 0..=m {
                assert_eq!(counts[s], counts[m - s], "n={n} s={s}");
            }
        }
    }

    #[test]
    fn exact_p_matches_enumeration() {
        // Enumerate all 2^n sign assignments for tie-free ranks.
        for n in [5usize, 8, 10] {
            let max_sum = n * (n + 1) / 2;
            for w in [0, max_sum / 3, max_sum / 2, max_sum] {
                let mut count_ge = 0u64;
                let mut count_le = 0u64;
                for mask in 0u64..(1 << n) {
                    let s: usize = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).sum();
                    if s >= w {
                        count_ge += 1;
                    }
                    if s <= w {
                        count_le += 1;
                    }
                }
                let total = (1u64 << n) as f64;
                let expect_greater = count_ge as f64 / total;
                let expect_less = count_le as f64 / total;
                let got_g = exact_p(w as f64, n, Alternative::Greater);
                let got_l = exact_p(w as f64, n, Alternative::Less);
                assert!((got_g - expect_greater).abs() < 1e-12);
                assert!((got_l - expect_less).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn all_positive_differences_one_sided() {
        let a = [2.0, 3.0, 4.0, 5.0, 6.0];
        let b = [1.0, 1.0, 1.0, 1.0, 1.0];
        let res = wilcoxon_signed_rank(&a, &b, Alternative::Greater).unwrap();
        assert_eq!(res.method, PValueMethod::Exact);
        assert!((res.p_value - 1.0 / 32.0).abs() < 1e-12);
        assert_eq!(res.rank_biserial, 1.0);
    }

    #[test]
    fn identical_sequences_error() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!(matches!(
            wilcoxon_signed_rank(&a, &a, Alternative::TwoSided),
            Err(Error::AllDifferencesDiscarded)
        ));
    }

    #[test]
    fn near_zero_differences_discarded() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let b = [1.0 + 5e-9, 1.0, 2.0, 3.0, 4.0, 5.0];
        let res = wilcoxon_signed_rank(&a, &b, Alternative::TwoSided).unwrap();
        assert_eq!(res.n_used, 5);
    }

    #[test]
    fn large_shift_tiny_p() {
        let a: Vec<f64> = (0..30).map(|i| 10.0 + i as f64 * 0.10111).collect();
        let b: Vec<f64> = (0..30).map(|i| i as f64 * 0.09917).collect();
        let res = wilcoxon_signed_rank(&a, &b, Alternative::TwoSided).unwrap();
        assert_eq!(res.method, PValueMethod::Exact);
        assert!(res.p_value < 1e-4, "p = {}", res.p_value);
        assert!(res.cohen_d > 1.0);
    }

    #[test]
    fn p_depends_only_on_signs_and_rank_order() {
        let a = [3.0, 5.5, 1.2, 9.0, 4.4, 7.7, 2.2, 6.1];
        let b = [2.0, 6.0, 0.8, 7.5, 4.9, 6.9, 1.1, 6.3];
        let base = wilcoxon_signed_rank(&a, &b, Alternative::TwoSided).unwrap();
        // Apply a strictly increasing odd transform to the differences:
        // signs and |difference| ranks survive, so p must not change.
        let diffs: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let ta: Vec<f64> = diffs
            .iter()
            .map(|d| d.signum() * (d.abs().powi(3) + d.abs()))
            .collect();
        let tb = vec![0.0; ta.len()];
        let trans = wilcoxon_signed_rank(&ta, &tb, Alternative::TwoSided).unwrap();
        assert!((base.p_value - trans.p_value).abs() < 1e-12);
        assert_eq!(base.statistic, trans.statistic);
    }

    #[test]
    fn bonferroni_helpers() {
        assert!((bonferroni_alpha(0.05, 3) - 0.0166666).abs() < 1e-4);
        assert_eq!(bonferroni_p(0.4, 3), 1.0);
        assert!((bonferroni_p(0.01, 3) - 0.03).abs() < 1e-12);
    }

    #[test]
    fn beta_inc_reference_values() {
        // I_0.5(0.5, 0.5) = 0.5 by symmetry.
        assert!((beta_inc(0.5, 0.5, 0.5) - 0.5).abs() < 1e-10);
        // t distribution: p for t=2.0, df=10 is 0.07338...
        let p = t_test_p_two_sided(2.0, 10.0);
        assert!((p - 0.0733879).abs() < 1e-5, "{p}");
    }

    #[test]
    fn spearman_r_self_correlation() {
        let x = [1.0, 4.0, 2.0, 8.0, 5.0, 7.0];
        let (r, p) = spearman_r(&x, &x).unwrap();
        assert_eq!(r, 1.0);
        assert_eq!(p, 0.0);
    }

    #[test]
    fn spearman_r_independent_noise() {
        // Deterministic pseudo-noise sequences.
        let x: Vec<f64> = (0..3000)
            .map(|i| ((i * 2654435761u64 as usize) % 9973) as f64)
            .collect();
        let y: Vec<f64> = (0..3000).map(|i| ((i * 40503 + 7) % 9967) as f64).collect();
        let (r, _) = spearman_r(&x, &y).unwrap();
        assert!(r.abs() < 0.05, "r = {r}");
    }

    #[test]
    fn split_consistency_shapes() {
        let pairs = vec![MeasurePair {
            name: "mae".into(),
            exploratory: vec![0.01, 0.02, 0.03, 0.04, 0.05],
            confirmatory: vec![0.05, 0.01, 0.04, 0.02, 0.03],
        }];
        let rows = split_consistency(&pairs).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].median_exploratory, rows[0].median_confirmatory);

        let bad = vec![MeasurePair {
            name: "broken".into(),
            exploratory: vec![1.0],
            confirmatory: vec![1.0, 2.0],
        }];
        assert!(split_consistency(&bad).is_err());
    }

    #[test]
    fn quantile_linear_interpolation() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&xs, 0.0), 1.0);
        assert_eq!(quantile(&xs, 1.0), 4.0);
        assert_eq!(quantile(&xs, 0.5), 2.5);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
    }
}
