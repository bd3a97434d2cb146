//! Catalogue of the 27 canonical correlation structures for three variates,
//! their relaxed positive semi-definite versions, and the tolerance bands
//! that classify coefficients as strong negative, negligible, or strong
//! positive.

use crate::matrix::Sym3;
use crate::{Error, Result};

/// Eigenvalue tolerance for the PSD check. Relaxed patterns like
/// (0, 0.71, 0.7) sit near the PSD boundary, so a small negative slack
/// absorbs floating-point round-off.
pub const PSD_EIGENVALUE_TOLERANCE: f64 = -1e-9;

/// The three pairwise coefficients (rho12, rho13, rho23) of a 3-variate
/// segment, ordered as the upper triangle of the correlation matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationVector {
    pub rho12: f64,
    pub rho13: f64,
    pub rho23: f64,
}

impl CorrelationVector {
    pub fn new(rho12: f64, rho13: f64, rho23: f64) -> Self {
        Self {
            rho12,
            rho13,
            rho23,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.rho12, self.rho13, self.rho23]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// The induced 3x3 symmetric unit-diagonal matrix.
    pub fn matrix(&self) -> Sym3 {
        Sym3::from_upper(self.rho12, self.rho13, self.rho23)
    }

    /// Inverse of [`CorrelationVector::matrix`].
    pub fn from_matrix(m: &Sym3) -> Self {
        let (a, b, c) = m.upper();
        Self::new(a, b, c)
    }
}

impl From<[f64; 3]> for CorrelationVector {
    fn from(a: [f64; 3]) -> Self {
        Self::from_array(a)
    }
}

/// One of the 27 idealized structures with its relaxed PSD-valid version.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalPattern {
    /// 0..=26, enumeration order of {0, 1, -1}^3 over (rho12, rho13, rho23).
    pub id: usize,
    /// Coefficients in {-1, 0, 1}.
    pub canonical: CorrelationVector,
    /// PSD-valid version within the tolerance bands; `None` when the
    /// structure cannot be modelled.
    pub relaxed: Option<CorrelationVector>,
    /// The canonical matrix is already PSD; no relaxation was needed.
    pub ideal: bool,
    /// A valid relaxed version exists.
    pub modelled: bool,
}

impl CanonicalPattern {
    /// The relaxed vector, or an error for the four unmodellable patterns.
    pub fn relaxed_or_err(&self) -> Result<CorrelationVector> {
        self.relaxed.ok_or(Error::UnmodelledPattern(self.id))
    }
}

/// (canonical coefficients, relaxed coefficients or None), in id order.
type CatalogueRow = (f64, f64, f64, Option<(f64, f64, f64)>);

/// Relaxed values are fixed catalogue constants, not re-derived: the
/// published table is normative and this keeps the catalogue bit-stable.
const CATALOGUE_DATA: [CatalogueRow; 27] = [
    (0.0, 0.0, 0.0, Some((0.0, 0.0, 0.0))),
    (0.0, 0.0, 1.0, Some((0.0, 0.0, 1.0))),
    (0.0, 0.0, -1.0, Some((0.0, 0.0, -1.0))),
    (0.0, 1.0, 0.0, Some((0.0, 1.0, 0.0))),
    (0.0, 1.0, 1.0, Some((0.0, 0.71, 0.7))),
    (0.0, 1.0, -1.0, Some((0.0, 0.71, -0.7))),
    (0.0, -1.0, 0.0, Some((0.0, -1.0, 0.0))),
    (0.0, -1.0, 1.0, Some((0.0, -0.71, 0.7))),
    (0.0, -1.0, -1.0, Some((0.0, -0.71, -0.7))),
    (1.0, 0.0, 0.0, Some((1.0, 0.0, 0.0))),
    (1.0, 0.0, 1.0, Some((0.71, 0.0, 0.7))),
    (1.0, 0.0, -1.0, Some((0.71, 0.0, -0.7))),
    (1.0, 1.0, 0.0, Some((0.71, 0.7, 0.0))),
    (1.0, 1.0, 1.0, Some((1.0, 1.0, 1.0))),
    (1.0, 1.0, -1.0, None),
    (1.0, -1.0, 0.0, Some((0.71, -0.7, 0.0))),
    (1.0, -1.0, 1.0, None),
    (1.0, -1.0, -1.0, Some((1.0, -1.0, -1.0))),
    (-1.0, 0.0, 0.0, Some((-1.0, 0.0, 0.0))),
    (-1.0, 0.0, 1.0, Some((-0.71, 0.0, 0.7))),
    (-1.0, 0.0, -1.0, Some((-0.71, 0.0, -0.7))),
    (-1.0, 1.0, 0.0, Some((-0.71, 0.7, 0.0))),
    (-1.0, 1.0, 1.0, None),
    (-1.0, 1.0, -1.0, Some((-1.0, 1.0, -1.0))),
    (-1.0, -1.0, 0.0, Some((-0.71, -0.7, 0.0))),
    (-1.0, -1.0, 1.0, Some((-1.0, -1.0, 1.0))),
    (-1.0, -1.0, -1.0, None),
];

/// The full catalogue of 27 patterns in id order.
pub fn catalogue() -> Vec<CanonicalPattern> {
    CATALOGUE_DATA
        .iter()
        .enumerate()
        .map(|(id, &(a, b, c, relaxed))| {
            let canonical = CorrelationVector::new(a, b, c);
            let relaxed = relaxed.map(|(x, y, z)| CorrelationVector::new(x, y, z));
            CanonicalPattern {
                id,
                canonical,
                relaxed,
                ideal: relaxed == Some(CorrelationVector::new(a, b, c)),
                modelled: relaxed.is_some(),
            }
        })
        .collect()
}

/// The 23 modelled patterns in id order.
pub fn modelled_patterns() -> Vec<CanonicalPattern> {
    catalogue().into_iter().filter(|p| p.modelled).collect()
}

/// Catalogue lookup by id.
pub fn pattern(id: usize) -> Option<CanonicalPattern> {
    catalogue().into_iter().find(|p| p.id == id)
}

/// True iff the induced unit-diagonal matrix has smallest eigenvalue
/// >= the PSD tolerance.
pub fn is_psd(v: &CorrelationVector) -> bool {
    v.matrix().min_eigenvalue() >= PSD_EIGENVALUE_TOLERANCE
}

/// Coefficient classification intervals. Fixed by default to strong
/// negative [-1, -0.7], negligible [-0.2, 0.2], strong positive [0.7, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceBands {
    pub negative: (f64, f64),
    pub negligible: (f64, f64),
    pub positive: (f64, f64),
}

impl Default for ToleranceBands {
    fn default() -> Self {
        Self {
            negative: (-1.0, -0.7),
            negligible: (-0.2, 0.2),
            positive: (0.7, 1.0),
        }
    }
}

impl ToleranceBands {
    /// The band matching the sign of a canonical coefficient.
    pub fn band_of(&self, canonical: f64) -> Result<(f64, f64)> {
        if canonical == -1.0 {
            Ok(self.negative)
        } else if canonical == 0.0 {
            Ok(self.negligible)
        } else if canonical == 1.0 {
            Ok(self.positive)
        } else {
            Err(Error::InvalidCanonicalCoefficient(canonical))
        }
    }

    fn contains(band: (f64, f64), x: f64) -> bool {
        band.0 <= x && x <= band.1
    }

    /// True iff all three empirical coefficients fall inside the band of
    /// the corresponding canonical coefficient.
    pub fn within_tolerance(
        &self,
        empirical: &CorrelationVector,
        pattern: &CanonicalPattern,
    ) -> Result<bool> {
        if !pattern.modelled {
            return Err(Error::UnmodelledPattern(pattern.id));
        }
        let e = empirical.as_array();
        let c = pattern.canonical.as_array();
        for i in 0..3 {
            if !Self::contains(self.band_of(c[i])?, e[i]) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Uses default bands. See [`ToleranceBands::band_of`].
pub fn band_of(canonical: f64) -> Result<(f64, f64)> {
    ToleranceBands::default().band_of(canonical)
}

/// Uses default bands. See [`ToleranceBands::within_tolerance`].
pub fn within_tolerance(empirical: &CorrelationVector, pattern: &CanonicalPattern) -> Result<bool> {
    ToleranceBands::default().within_tolerance(empirical, pattern)
}

/// Catalogue as CSV with header
/// `id,c12,c13,c23,r12,r13,r23,ideal,modelled`; relaxed columns are empty
/// for unmodelled patterns.
pub fn catalogue_csv() -> String {
    let mut out = String::from("id,c12,c13,c23,r12,r13,r23,ideal,modelled\n");
    for p in catalogue() {
        let c = p.canonical.as_array();
        let (r12, r13, r23) = match p.relaxed {
            Some(r) => (
                r.rho12.to_string(),
                r.rho13.to_string(),
                r.rho23.to_string(),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            p.id, c[0], c[1], c[2], r12, r13, r23, p.ideal, p.modelled
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn catalogue_has_27_patterns_23_modelled() {
        let cat = catalogue();
        assert_eq!(cat.len(), 27);
        assert_eq!(cat.iter().filter(|p| p.modelled).count(), 23);
        for (i, p) in cat.iter().enumerate() {
            assert_eq!(p.id, i);
        }
    }

    #[test]
    fn unmodelled_ids_are_14_16_22_26() {
        let unmodelled: Vec<usize> = catalogue()
            .iter()
            .filter(|p| !p.modelled)
            .map(|p| p.id)
            .collect();
        assert_eq!(unmodelled, vec![14, 16, 22, 26]);
        for id in unmodelled {
            assert!(pattern(id).unwrap().relaxed.is_none());
        }
    }

    #[test]
    fn canonical_vectors_enumerate_all_combinations_once() {
        let seen: HashSet<[i8; 3]> = catalogue()
            .iter()
            .map(|p| {
                let c = p.canonical.as_array();
                [c[0] as i8, c[1] as i8, c[2] as i8]
            })
            .collect();
        assert_eq!(seen.len(), 27);
    }

    #[test]
    fn table_values_for_selected_patterns() {
        let p4 = pattern(4).unwrap();
        assert_eq!(p4.canonical, CorrelationVector::new(0.0, 1.0, 1.0));
        assert_eq!(p4.relaxed, Some(CorrelationVector::new(0.0, 0.71, 0.7)));
        assert!(!p4.ideal);
        assert!(p4.modelled);

        let p0 = pattern(0).unwrap();
        assert_eq!(p0.relaxed, Some(CorrelationVector::new(0.0, 0.0, 0.0)));
        assert!(p0.ideal);

        let p14 = pattern(14).unwrap();
        assert_eq!(p14.canonical, CorrelationVector::new(1.0, 1.0, -1.0));
        assert!(p14.relaxed.is_none());
        assert!(!p14.modelled);

        let p24 = pattern(24).unwrap();
        assert_eq!(p24.relaxed, Some(CorrelationVector::new(-0.71, -0.7, 0.0)));
    }

    #[test]
    fn psd_of_relaxed_and_canonical() {
        for p in catalogue() {
            if let Some(r) = p.relaxed {
                assert!(is_psd(&r), "relaxed pattern {} should be PSD", p.id);
            }
            assert_eq!(
                is_psd(&p.canonical),
                p.ideal,
                "canonical PSD must coincide with ideal flag for pattern {}",
                p.id
            );
        }
    }

    #[test]
    fn psd_examples() {
        assert!(is_psd(&CorrelationVector::new(0.0, 0.0, 0.0)));
        assert!(!is_psd(&CorrelationVector::new(1.0, 1.0, -1.0)));
        assert!(is_psd(&CorrelationVector::new(0.71, 0.0, 0.7)));
    }

    #[test]
    fn band_of_maps_sign_to_interval() {
        assert_eq!(band_of(-1.0).unwrap(), (-1.0, -0.7));
        assert_eq!(band_of(0.0).unwrap(), (-0.2, 0.2));
        assert_eq!(band_of(1.0).unwrap(), (0.7, 1.0));
        assert!(band_of(0.5).is_err());
    }

    #[test]
    fn within_tolerance_examples() {
        let p23 = pattern(23).unwrap();
        let ok = CorrelationVector::new(-0.96, 0.96, -0.96);
        assert!(within_tolerance(&ok, &p23).unwrap());

        let p24 = pattern(24).unwrap();
        let outside = CorrelationVector::new(-0.67, -0.66, 0.04);
        assert!(!within_tolerance(&outside, &p24).unwrap());

        let p0 = pattern(0).unwrap();
        let boundary = CorrelationVector::new(0.0, 0.0, 0.21);
        assert!(!within_tolerance(&boundary, &p0).unwrap());

        let p14 = pattern(14).unwrap();
        assert!(within_tolerance(&ok, &p14).is_err());
    }

    #[test]
    fn relaxed_coefficients_lie_in_their_bands() {
        let bands = ToleranceBands::default();
        for p in modelled_patterns() {
            let r = p.relaxed.unwrap().as_array();
            let c = p.canonical.as_array();
            for i in 0..3 {
                let band = bands.band_of(c[i]).unwrap();
                assert!(
                    band.0 <= r[i] && r[i] <= band.1,
                    "pattern {} coefficient {} = {} outside band {:?}",
                    p.id,
                    i,
                    r[i],
                    band
                );
            }
        }
    }

    #[test]
    fn bands_are_disjoint() {
        let b = ToleranceBands::default();
        assert!(b.negative.1 < b.negligible.0 || b.negligible.1 < b.negative.0);
        assert!(b.negligible.1 < b.positive.0);
    }

    #[test]
    fn csv_export_shape() {
        let csv = catalogue_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 28);
        assert_eq!(lines[0], "id,c12,c13,c23,r12,r13,r23,ideal,modelled");
        assert_eq!(lines[5], "4,0,1,1,0,0.71,0.7,false,true");
        assert_eq!(lines[15], "14,1,1,-1,,,,false,false");
    }

    #[test]
    fn round_trip_matrix_form() {
        let v = CorrelationVector::new(0.3, -0.2, 0.9);
        assert_eq!(CorrelationVector::from_matrix(&v.matrix()), v);
    }
}
