//! Distribution primitives for the rank-preserving marginal shift:
//! standard normal CDF plus quantile functions for the generalized extreme
//! value and negative binomial targets.

/// Standard normal CDF via the complementary error function, accurate in
/// both tails.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Generalized extreme value distribution.
///
/// `shape` follows the convention where the quantile function is
/// `loc + scale * (1 - (-ln u)^shape) / shape` (shape 0 degenerates to the
/// Gumbel case `loc - scale * ln(-ln u)`), matching how the parameter
/// ranges for the IOB- and IG-like variates were fitted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gev {
    pub shape: f64,
    pub location: f64,
    pub scale: f64,
}

impl Gev {
    pub fn new(shape: f64, location: f64, scale: f64) -> Self {
        debug_assert!(scale > 0.0);
        Self {
            shape,
            location,
            scale,
        }
    }

    /// Inverse CDF for u in (0, 1).
    pub fn quantile(&self, u: f64) -> f64 {
        debug_assert!(u > 0.0 && u < 1.0);
        let neg_ln_u = -u.ln();
        if self.shape.abs() < 1e-14 {
            self.location - self.scale * neg_ln_u.ln()
        } else {
            self.location + self.scale * (1.0 - neg_ln_u.powf(self.shape)) / self.shape
        }
    }
}

/// Negative binomial distribution with the number of successes fixed at
/// one, i.e. the count of failures before the first success. CDF over the
/// support k = 0, 1, 2, ... is `1 - (1-p)^(k+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegBinomial {
    pub p: f64,
}

impl NegBinomial {
    pub fn new(p: f64) -> Self {
        debug_assert!(p > 0.0 && p < 1.0);
        Self { p }
    }

    pub fn cdf(&self, k: f64) -> f64 {
        if k < 0.0 {
            0.0
        } else {
            -f64::exp_m1((k.floor() + 1.0) * f64::ln_1p(-self.p))
        }
    }

    /// Smallest integer k with CDF(k) >= u.
    pub fn quantile(&self, u: f64) -> f64 {
        debug_assert!(u > 0.0 && u < 1.0);
        let raw = f64::ln_1p(-u) / f64::ln_1p(-self.p) - 1.0;
        let mut k = raw.ceil().max(0.0);
        // Guard against round-off at the CDF jump points.
        while self.cdf(k) < u {
            k += 1.0;
        }
        while k > 0.0 && self.cdf(k - 1.0) >= u {
            k -= 1.0;
        }
        k
    }
}
