//! Reference values for the validation measures under controlled
//! degradation conditions, per generation stage and completeness level.
//! Each row records the scores achieved by clusterings with a known number
//! of shifted observations and misassigned segments; evaluation reports
//! attach the nearest row for context.

use crate::datagen::{Completeness, Stage};

/// Mean with quartiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat3 {
    pub mean: f64,
    pub q25: f64,
    pub q75: f64,
}

/// One calibration point: scores achieved with `shifted_obs` observations
/// shifted at every boundary and `misassigned` segments given wrong
/// clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceRow {
    pub completeness: u8,
    pub shifted_obs: u32,
    pub misassigned: u32,
    pub jaccard: Stat3,
    pub swc: Stat3,
    pub dbi: Stat3,
    pub mae: Stat3,
}

/// Thresholds indicating good structural quality of a clustering.
pub const GOOD_SWC: f64 = 0.8;
pub const GOOD_DBI: f64 = 0.2;

const fn s(mean: f64, q25: f64, q75: f64) -> Stat3 {
    Stat3 { mean, q25, q75 }
}

const fn row(
    completeness: u8,
    shifted_obs: u32,
    misassigned: u32,
    jaccard: Stat3,
    swc: Stat3,
    dbi: Stat3,
    mae: Stat3,
) -> ReferenceRow {
    ReferenceRow {
        completeness,
        shifted_obs,
        misassigned,
        jaccard,
        swc,
        dbi,
        mae,
    }
}

/// Normally distributed (raw/correlated) data variants.
pub static REFERENCE_NORMAL: [ReferenceRow; 32] = [
    row(
        100,
        0,
        0,
        s(1.0, 1.0, 1.0),
        s(0.98, 0.98, 0.98),
        s(0.04, 0.04, 0.05),
        s(0.02, 0.02, 0.03),
    ),
    row(
        100,
        50,
        0,
        s(0.99, 0.99, 0.99),
        s(0.95, 0.95, 0.95),
        s(0.08, 0.08, 0.08),
        s(0.03, 0.03, 0.03),
    ),
    row(
        100,
        200,
        0,
        s(0.98, 0.98, 0.98),
        s(0.80, 0.80, 0.80),
        s(0.28, 0.28, 0.28),
        s(0.06, 0.06, 0.06),
    ),
    row(
        100,
        400,
        0,
        s(0.97, 0.97, 0.97),
        s(0.54, 0.54, 0.54),
        s(0.56, 0.56, 0.56),
        s(0.11, 0.11, 0.11),
    ),
    row(
        100,
        0,
        5,
        s(0.96, 0.94, 0.98),
        s(0.80, 0.80, 0.81),
        s(0.88, 0.74, 1.05),
        s(0.06, 0.06, 0.06),
    ),
    row(
        100,
        800,
        0,
        s(0.94, 0.94, 0.94),
        s(0.23, 0.22, 0.25),
        s(1.13, 1.08, 1.20),
        s(0.19, 0.18, 0.20),
    ),
    row(
        100,
        0,
        20,
        s(0.79, 0.76, 0.82),
        s(0.33, 0.32, 0.34),
        s(2.58, 2.32, 2.80),
        s(0.18, 0.17, 0.19),
    ),
    row(
        100,
        0,
        40,
        s(0.58, 0.53, 0.62),
        s(-0.08, -0.11, -0.08),
        s(4.14, 3.95, 4.52),
        s(0.33, 0.32, 0.34),
    ),
    row(
        100,
        0,
        60,
        s(0.40, 0.37, 0.42),
        s(-0.28, -0.30, -0.26),
        s(6.32, 5.54, 6.57),
        s(0.46, 0.45, 0.47),
    ),
    row(
        100,
        0,
        80,
        s(0.23, 0.21, 0.23),
        s(-0.36, -0.37, -0.35),
        s(7.37, 6.85, 7.87),
        s(0.63, 0.62, 0.64),
    ),
    row(
        100,
        800,
        100,
        s(0.002, 0.003, 0.004),
        s(-0.37, -0.39, -0.35),
        s(6.73, 5.67, 6.94),
        s(0.73, 0.71, 0.75),
    ),
    row(
        100,
        0,
        100,
        s(0.0, 0.0, 0.0),
        s(-0.38, -0.41, -0.36),
        s(7.05, 6.33, 7.62),
        s(0.77, 0.76, 0.79),
    ),
    row(
        70,
        0,
        0,
        s(1.0, 1.0, 1.0),
        s(0.97, 0.97, 0.97),
        s(0.05, 0.04, 0.06),
        s(0.03, 0.02, 0.03),
    ),
    row(
        70,
        50,
        0,
        s(0.99, 0.99, 0.99),
        s(0.94, 0.94, 0.94),
        s(0.10, 0.10, 0.10),
        s(0.03, 0.03, 0.03),
    ),
    row(
        70,
        200,
        0,
        s(0.98, 0.98, 0.98),
        s(0.69, 0.68, 0.69),
        s(0.40, 0.40, 0.41),
        s(0.08, 0.08, 0.08),
    ),
    row(
        70,
        0,
        5,
        s(0.96, 0.94, 0.98),
        s(0.80, 0.79, 0.81),
        s(0.88, 0.74, 1.04),
        s(0.06, 0.06, 0.06),
    ),
    row(
        70,
        400,
        0,
        s(0.96, 0.96, 0.96),
        s(0.42, 0.42, 0.42),
        s(0.82, 0.82, 0.82),
        s(0.13, 0.13, 0.13),
    ),
    row(
        70,
        0,
        20,
        s(0.79, 0.76, 0.82),
        s(0.32, 0.32, 0.34),
        s(2.58, 2.34, 2.80),
        s(0.18, 0.17, 0.19),
    ),
    row(
        70,
        0,
        40,
        s(0.58, 0.53, 0.62),
        s(-0.09, -0.11, -0.08),
        s(4.12, 3.93, 4.50),
        s(0.33, 0.32, 0.34),
    ),
    row(
        70,
        0,
        60,
        s(0.40, 0.37, 0.42),
        s(-0.28, -0.31, -0.26),
        s(6.31, 5.58, 6.58),
        s(0.46, 0.45, 0.47),
    ),
    row(
        70,
        0,
        80,
        s(0.23, 0.21, 0.23),
        s(-0.36, -0.37, -0.35),
        s(7.36, 6.86, 8.10),
        s(0.63, 0.62, 0.64),
    ),
    row(
        70,
        0,
        100,
        s(0.0, 0.0, 0.0),
        s(-0.38, -0.41, -0.36),
        s(7.02, 6.30, 7.59),
        s(0.77, 0.75, 0.79),
    ),
    row(
        10,
        0,
        0,
        s(1.0, 1.0, 1.0),
        s(0.92, 0.91, 0.93),
        s(0.14, 0.13, 0.15),
        s(0.03, 0.03, 0.04),
    ),
    row(
        10,
        50,
        0,
        s(0.96, 0.96, 0.96),
        s(0.44, 0.43, 0.45),
        s(0.74, 0.71, 0.75),
        s(0.13, 0.12, 0.14),
    ),
    row(
        10,
        0,
        5,
        s(0.96, 0.94, 0.98),
        s(0.75, 0.73, 0.76),
        s(0.93, 0.77, 1.09),
        s(0.07, 0.07, 0.07),
    ),
    row(
        10,
        100,
        0,
        s(0.92, 0.92, 0.92),
        s(0.13, 0.12, 0.15),
        s(1.40, 1.33, 1.42),
        s(0.23, 0.22, 0.24),
    ),
    row(
        10,
        0,
        20,
        s(0.79, 0.76, 0.82),
        s(0.29, 0.28, 0.30),
        s(2.63, 2.38, 2.90),
        s(0.19, 0.18, 0.20),
    ),
    row(
        10,
        0,
        40,
        s(0.58, 0.53, 0.62),
        s(-0.10, -0.12, -0.08),
        s(4.16, 4.08, 4.63),
        s(0.34, 0.33, 0.35),
    ),
    row(
        10,
        0,
        60,
        s(0.40, 0.37, 0.42),
        s(-0.28, -0.30, -0.26),
        s(6.23, 5.51, 6.67),
        s(0.47, 0.46, 0.48),
    ),
    row(
        10,
        0,
        80,
        s(0.23, 0.21, 0.23),
        s(-0.36, -0.37, -0.35),
        s(7.26, 7.00, 7.78),
        s(0.63, 0.62, 0.64),
    ),
    row(
        10,
        100,
        100,
        s(0.004, 0.002, 0.005),
        s(-0.37, -0.39, -0.35),
        s(6.55, 5.57, 7.0),
        s(0.73, 0.72, 0.76),
    ),
    row(
        10,
        0,
        100,
        s(0.0, 0.0, 0.0),
        s(-0.38, -0.40, -0.36),
        s(7.00, 6.14, 7.72),
        s(0.77, 0.76, 0.79),
    ),
];

/// Non-normal data variants.
pub static REFERENCE_NON_NORMAL: [ReferenceRow; 32] = [
    row(
        100,
        0,
        0,
        s(1.0, 1.0, 1.0),
        s(0.98, 0.98, 0.98),
        s(0.04, 0.04, 0.05),
        s(0.02, 0.02, 0.03),
    ),
    row(
        100,
        50,
        0,
        s(0.99, 0.99, 0.99),
        s(0.95, 0.95, 0.95),
        s(0.08, 0.08, 0.08),
        s(0.03, 0.03, 0.03),
    ),
    row(
        100,
        200,
        0,
        s(0.98, 0.98, 0.98),
        s(0.80, 0.80, 0.80),
        s(0.28, 0.28, 0.28),
        s(0.06, 0.06, 0.06),
    ),
    row(
        100,
        400,
        0,
        s(0.97, 0.97, 0.97),
        s(0.54, 0.54, 0.54),
        s(0.56, 0.56, 0.56),
        s(0.11, 0.11, 0.11),
    ),
    row(
        100,
        0,
        5,
        s(0.96, 0.94, 0.98),
        s(0.80, 0.80, 0.81),
        s(0.88, 0.74, 1.04),
        s(0.06, 0.06, 0.06),
    ),
    row(
        100,
        800,
        0,
        s(0.94, 0.94, 0.94),
        s(0.23, 0.22, 0.25),
        s(1.13, 1.08, 1.20),
        s(0.19, 0.18, 0.20),
    ),
    row(
        100,
        0,
        20,
        s(0.79, 0.76, 0.82),
        s(0.33, 0.32, 0.34),
        s(2.58, 2.32, 2.80),
        s(0.18, 0.17, 0.19),
    ),
    row(
        100,
        0,
        40,
        s(0.58, 0.53, 0.62),
        s(-0.08, -0.11, -0.08),
        s(4.14, 3.96, 4.51),
        s(0.33, 0.32, 0.34),
    ),
    row(
        100,
        0,
        60,
        s(0.40, 0.37, 0.42),
        s(-0.28, -0.30, -0.26),
        s(6.36, 5.55, 6.62),
        s(0.46, 0.45, 0.47),
    ),
    row(
        100,
        0,
        80,
        s(0.23, 0.21, 0.23),
        s(-0.36, -0.37, -0.35),
        s(7.37, 6.86, 7.97),
        s(0.63, 0.61, 0.64),
    ),
    row(
        100,
        800,
        100,
        s(0.003, 0.002, 0.004),
        s(-0.37, -0.39, -0.35),
        s(6.73, 5.67, 6.96),
        s(0.73, 0.71, 0.75),
    ),
    row(
        100,
        0,
        100,
        s(0.0, 0.0, 0.0),
        s(-0.38, -0.41, -0.36),
        s(7.05, 6.33, 7.61),
        s(0.77, 0.75, 0.78),
    ),
    row(
        70,
        0,
        0,
        s(1.0, 1.0, 1.0),
        s(0.97, 0.97, 0.97),
        s(0.05, 0.05, 0.06),
        s(0.03, 0.02, 0.03),
    ),
    row(
        70,
        50,
        0,
        s(0.99, 0.99, 0.99),
        s(0.94, 0.94, 0.94),
        s(0.10, 0.10, 0.10),
        s(0.03, 0.03, 0.03),
    ),
    row(
        70,
        200,
        0,
        s(0.98, 0.98, 0.98),
        s(0.69, 0.68, 0.69),
        s(0.40, 0.40, 0.41),
        s(0.08, 0.08, 0.08),
    ),
    row(
        70,
        0,
        5,
        s(0.96, 0.94, 0.98),
        s(0.80, 0.79, 0.81),
        s(0.88, 0.74, 1.04),
        s(0.06, 0.06, 0.06),
    ),
    row(
        70,
        400,
        0,
        s(0.96, 0.96, 0.96),
        s(0.42, 0.42, 0.42),
        s(0.82, 0.82, 0.82),
        s(0.13, 0.13, 0.13),
    ),
    row(
        70,
        0,
        20,
        s(0.79, 0.76, 0.82),
        s(0.32, 0.32, 0.34),
        s(2.58, 2.34, 2.80),
        s(0.18, 0.17, 0.19),
    ),
    row(
        70,
        0,
        40,
        s(0.58, 0.53, 0.62),
        s(-0.09, -0.11, -0.08),
        s(4.12, 3.93, 4.50),
        s(0.33, 0.32, 0.34),
    ),
    row(
        70,
        0,
        60,
        s(0.40, 0.37, 0.42),
        s(-0.28, -0.31, -0.26),
        s(6.33, 5.59, 6.64),
        s(0.46, 0.45, 0.47),
    ),
    row(
        70,
        0,
        80,
        s(0.23, 0.21, 0.23),
        s(-0.36, -0.37, -0.35),
        s(7.36, 6.86, 8.16),
        s(0.63, 0.61, 0.64),
    ),
    row(
        70,
        0,
        100,
        s(0.0, 0.0, 0.0),
        s(-0.38, -0.41, -0.36),
        s(7.02, 6.30, 7.56),
        s(0.77, 0.75, 0.78),
    ),
    row(
        10,
        0,
        0,
        s(1.0, 1.0, 1.0),
        s(0.92, 0.91, 0.93),
        s(0.14, 0.13, 0.15),
        s(0.03, 0.03, 0.04),
    ),
    row(
        10,
        50,
        0,
        s(0.96, 0.96, 0.96),
        s(0.44, 0.43, 0.45),
        s(0.74, 0.71, 0.76),
        s(0.13, 0.12, 0.14),
    ),
    row(
        10,
        0,
        5,
        s(0.96, 0.94, 0.98),
        s(0.75, 0.73, 0.76),
        s(0.93, 0.77, 1.09),
        s(0.07, 0.07, 0.07),
    ),
    row(
        10,
        100,
        0,
        s(0.92, 0.92, 0.92),
        s(0.13, 0.11, 0.15),
        s(1.40, 1.33, 1.42),
        s(0.23, 0.22, 0.24),
    ),
    row(
        10,
        0,
        20,
        s(0.79, 0.76, 0.82),
        s(0.29, 0.28, 0.29),
        s(2.62, 2.38, 2.90),
        s(0.19, 0.18, 0.20),
    ),
    row(
        10,
        0,
        40,
        s(0.58, 0.53, 0.62),
        s(-0.10, -0.12, -0.08),
        s(4.16, 4.08, 4.63),
        s(0.34, 0.33, 0.35),
    ),
    row(
        10,
        0,
        60,
        s(0.40, 0.37, 0.42),
        s(-0.28, -0.30, -0.26),
        s(6.25, 5.50, 6.72),
        s(0.47, 0.46, 0.48),
    ),
    row(
        10,
        0,
        80,
        s(0.23, 0.21, 0.23),
        s(-0.36, -0.37, -0.35),
        s(7.31, 7.00, 7.83),
        s(0.63, 0.62, 0.64),
    ),
    row(
        10,
        100,
        100,
        s(0.004, 0.002, 0.005),
        s(-0.37, -0.39, -0.35),
        s(6.55, 5.57, 6.99),
        s(0.73, 0.71, 0.76),
    ),
    row(
        10,
        0,
        100,
        s(0.0, 0.0, 0.0),
        s(-0.38, -0.40, -0.36),
        s(7.00, 6.14, 7.71),
        s(0.77, 0.76, 0.79),
    ),
];

/// Downsampled data variants.
// One DBI quartile is genuinely 3.14; it is a table value, not pi.
#[allow(clippy::approx_constant)]
pub static REFERENCE_DOWNSAMPLED: [ReferenceRow; 30] = [
    row(
        100,
        0,
        0,
        s(1.0, 1.0, 1.0),
        s(0.63, 0.58, 0.67),
        s(0.50, 0.45, 0.56),
        s(0.13, 0.12, 0.15),
    ),
    row(
        100,
        0,
        5,
        s(0.96, 0.94, 0.98),
        s(0.46, 0.43, 0.48),
        s(1.14, 1.02, 1.29),
        s(0.18, 0.17, 0.18),
    ),
    row(
        100,
        50,
        0,
        s(0.80, 0.80, 0.80),
        s(-0.16, -0.17, -0.15),
        s(2.87, 2.63, 3.12),
        s(0.39, 0.38, 0.40),
    ),
    row(
        100,
        0,
        20,
        s(0.79, 0.76, 0.82),
        s(0.09, 0.06, 0.12),
        s(2.86, 2.61, 3.01),
        s(0.27, 0.26, 0.28),
    ),
    row(
        100,
        100,
        0,
        s(0.65, 0.65, 0.66),
        s(-0.28, -0.29, -0.27),
        s(4.88, 4.43, 5.39),
        s(0.48, 0.46, 0.50),
    ),
    row(
        100,
        0,
        40,
        s(0.58, 0.53, 0.62),
        s(-0.18, -0.20, -0.16),
        s(4.16, 3.77, 4.66),
        s(0.38, 0.36, 0.39),
    ),
    row(
        100,
        0,
        60,
        s(0.40, 0.37, 0.42),
        s(-0.31, -0.33, -0.29),
        s(6.26, 5.41, 7.21),
        s(0.48, 0.47, 0.48),
    ),
    row(
        100,
        0,
        80,
        s(0.23, 0.21, 0.23),
        s(-0.36, -0.38, -0.35),
        s(7.77, 6.74, 8.15),
        s(0.61, 0.60, 0.62),
    ),
    row(
        100,
        100,
        100,
        s(0.017, 0.012, 0.02),
        s(-0.38, -0.39, -0.36),
        s(7.78, 6.79, 7.77),
        s(0.68, 0.66, 0.70),
    ),
    row(
        100,
        0,
        100,
        s(0.0, 0.0, 0.0),
        s(-0.38, -0.40, -0.36),
        s(7.31, 6.43, 7.61),
        s(0.72, 0.70, 0.74),
    ),
    row(
        70,
        0,
        0,
        s(1.0, 1.0, 1.0),
        s(0.63, 0.59, 0.66),
        s(0.49, 0.45, 0.52),
        s(0.13, 0.11, 0.15),
    ),
    row(
        70,
        0,
        5,
        s(0.96, 0.94, 0.98),
        s(0.47, 0.45, 0.49),
        s(1.13, 1.00, 1.28),
        s(0.17, 0.16, 0.17),
    ),
    row(
        70,
        50,
        0,
        s(0.80, 0.80, 0.80),
        s(-0.16, -0.18, -0.14),
        s(2.98, 2.72, 3.24),
        s(0.39, 0.38, 0.40),
    ),
    row(
        70,
        0,
        20,
        s(0.79, 0.76, 0.82),
        s(0.10, 0.07, 0.12),
        s(2.92, 2.55, 3.14),
        s(0.27, 0.26, 0.28),
    ),
    row(
        70,
        100,
        0,
        s(0.65, 0.65, 0.66),
        s(-0.28, -0.29, -0.27),
        s(5.04, 4.39, 4.75),
        s(0.48, 0.46, 0.49),
    ),
    row(
        70,
        0,
        40,
        s(0.58, 0.53, 0.62),
        s(-0.17, -0.19, -0.16),
        s(4.18, 3.93, 4.71),
        s(0.37, 0.36, 0.39),
    ),
    row(
        70,
        0,
        60,
        s(0.40, 0.37, 0.42),
        s(-0.31, -0.33, -0.29),
        s(6.31, 5.61, 6.52),
        s(0.48, 0.46, 0.49),
    ),
    row(
        70,
        0,
        80,
        s(0.23, 0.21, 0.23),
        s(-0.36, -0.38, -0.35),
        s(7.48, 6.73, 8.10),
        s(0.61, 0.60, 0.62),
    ),
    row(
        70,
        100,
        100,
        s(0.02, 0.01, 0.02),
        s(-0.38, -0.40, -0.35),
        s(7.45, 6.55, 7.85),
        s(0.68, 0.66, 0.70),
    ),
    row(
        70,
        0,
        100,
        s(0.0, 0.0, 0.0),
        s(-0.38, -0.39, -0.36),
        s(7.28, 6.15, 7.86),
        s(0.73, 0.71, 0.74),
    ),
    row(
        10,
        0,
        0,
        s(1.0, 1.0, 1.0),
        s(0.67, 0.65, 0.70),
        s(0.44, 0.41, 0.47),
        s(0.11, 0.10, 0.12),
    ),
    row(
        10,
        0,
        5,
        s(0.96, 0.94, 0.98),
        s(0.53, 0.52, 0.53),
        s(1.08, 0.91, 1.26),
        s(0.14, 0.14, 0.15),
    ),
    row(
        10,
        50,
        0,
        s(0.80, 0.80, 0.80),
        s(-0.15, -0.17, -0.14),
        s(3.08, 2.67, 3.13),
        s(0.39, 0.38, 0.40),
    ),
    row(
        10,
        0,
        20,
        s(0.79, 0.76, 0.82),
        s(0.14, 0.12, 0.17),
        s(2.73, 2.61, 2.88),
        s(0.25, 0.24, 0.26),
    ),
    row(
        10,
        100,
        0,
        s(0.65, 0.65, 0.66),
        s(-0.28, -0.29, -0.26),
        s(4.79, 4.28, 4.93),
        s(0.48, 0.46, 0.50),
    ),
    row(
        10,
        0,
        40,
        s(0.58, 0.53, 0.62),
        s(-0.16, -0.18, -0.15),
        s(4.23, 4.00, 4.53),
        s(0.37, 0.36, 0.37),
    ),
    row(
        10,
        0,
        60,
        s(0.40, 0.37, 0.42),
        s(-0.30, -0.32, -0.29),
        s(6.16, 5.50, 7.11),
        s(0.47, 0.46, 0.48),
    ),
    row(
        10,
        0,
        80,
        s(0.23, 0.21, 0.23),
        s(-0.36, -0.37, -0.35),
        s(7.15, 6.29, 7.50),
        s(0.62, 0.60, 0.63),
    ),
    row(
        10,
        100,
        100,
        s(0.02, 0.01, 0.02),
        s(-0.38, -0.39, -0.35),
        s(7.66, 6.77, 8.02),
        s(0.70, 0.67, 0.71),
    ),
    row(
        10,
        0,
        100,
        s(0.0, 0.0, 0.0),
        s(-0.38, -0.40, -0.36),
        s(7.11, 6.46, 7.48),
        s(0.74, 0.73, 0.76),
    ),
];

/// Table for a generation stage. Raw shares the normal-distribution table
/// with correlated.
pub fn table_for(stage: Stage) -> &'static [ReferenceRow] {
    match stage {
        Stage::Raw | Stage::Correlated => &REFERENCE_NORMAL,
        Stage::NonNormal => &REFERENCE_NON_NORMAL,
        Stage::Downsampled => &REFERENCE_DOWNSAMPLED,
    }
}

/// Row with the closest mean Jaccard among the matching completeness rows.
pub fn nearest_row(
    stage: Stage,
    completeness: Completeness,
    jaccard: f64,
) -> Option<&'static ReferenceRow> {
    table_for(stage)
        .iter()
        .filter(|r| r.completeness == completeness.percent())
        .min_by(|a, b| {
            (a.jaccard.mean - jaccard)
                .abs()
                .partial_cmp(&(b.jaccard.mean - jaccard).abs())
                .unwrap()
        })
}

/// Reference row lookup by exact degradation parameters.
pub fn row_for(
    stage: Stage,
    completeness: Completeness,
    shifted_obs: u32,
    misassigned: u32,
) -> Option<&'static ReferenceRow> {
    table_for(stage).iter().find(|r| {
        r.completeness == completeness.percent()
            && r.shifted_obs == shifted_obs
            && r.misassigned == misassigned
    })
}
