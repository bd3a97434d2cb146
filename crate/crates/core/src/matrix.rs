//! Minimal dense linear algebra for symmetric 3x3 matrices.
//!
//! The toolkit only ever decomposes 3x3 correlation matrices, so a cyclic
//! Jacobi sweep is plenty: it converges in a handful of sweeps and is
//! deterministic, which matters for reproducible data generation.

/// Symmetric 3x3 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sym3(pub [[f64; 3]; 3]);

impl Sym3 {
    /// Unit-diagonal matrix from the three upper-triangle coefficients
    /// (m12, m13, m23).
    pub fn from_upper(m12: f64, m13: f64, m23: f64) -> Self {
        Sym3([[1.0, m12, m13], [m12, 1.0, m23], [m13, m23, 1.0]])
    }

    pub fn upper(&self) -> (f64, f64, f64) {
        (self.0[0][1], self.0[0][2], self.0[1][2])
    }

    /// Eigendecomposition by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues in descending order with eigenvectors as the
    /// columns of the returned matrix. Each eigenvector's largest-magnitude
    /// component is made positive so the decomposition is unique.
    pub fn eigen(&self) -> Eigen3 {
        let mut a = self.0;
        let mut v = [[0.0; 3]; 3];
        for (i, row) in v.iter_mut().enumerate() {
            row[i] = 1.0;
        }

        for _sweep in 0..50 {
            let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
            if off < 1e-30 {
                break;
            }
            for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
                let apq = a[p][q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                let app = a[p][p];
                let aqq = a[q][q];
                a[p][p] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                a[q][q] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                let r = 3 - p - q;
                let arp = a[r][p];
                let arq = a[r][q];
                a[r][p] = c * arp - s * arq;
                a[p][r] = a[r][p];
                a[r][q] = s * arp + c * arq;
                a[q][r] = a[r][q];
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }

        let mut pairs: Vec<(f64, [f64; 3])> = (0..3)
            .map(|j| (a[j][j], [v[0][j], v[1][j], v[2][j]]))
            .collect();
        // Descending eigenvalues; ties broken by the original column order,
        // which sort_by preserves (stable sort).
        pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());

        let mut values = [0.0; 3];
        let mut vectors = [[0.0; 3]; 3];
        for (j, (lambda, mut col)) in pairs.into_iter().enumerate() {
            let mut arg = 0;
            for i in 1..3 {
                if col[i].abs() > col[arg].abs() {
                    arg = i;
                }
            }
            if col[arg] < 0.0 {
                for x in col.iter_mut() {
                    *x = -*x;
                }
            }
            values[j] = lambda;
            for i in 0..3 {
                vectors[i][j] = col[i];
            }
        }
        Eigen3 { values, vectors }
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().values[2]
    }
}

/// Result of [`Sym3::eigen`]: `values` descending, `vectors` column-wise.
#[derive(Debug, Clone, Copy)]
pub struct Eigen3 {
    pub values: [f64; 3],
    pub vectors: [[f64; 3]; 3],
}

impl Eigen3 {
    /// Reconstructs U * diag(values) * U^T.
    pub fn reconstruct(&self) -> Sym3 {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3)
                    .map(|k| self.vectors[i][k] * self.values[k] * self.vectors[j][k])
                    .sum();
            }
        }
        Sym3(m)
    }
}

/// General 3x3 matrix used for the correlation transform W.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub fn identity() -> Self {
        Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    /// W^T * W.
    pub fn gram(&self) -> Sym3 {
        let w = &self.0;
        let mut g = [[0.0; 3]; 3];
        for (i, row) in g.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| w[k][i] * w[k][j]).sum();
            }
        }
        Sym3(g)
    }

    /// Applies the transform to a row vector: returns x * W.
    #[inline]
    pub fn apply_row(&self, x: [f64; 3]) -> [f64; 3] {
        let w = &self.0;
        [
            x[0] * w[0][0] + x[1] * w[1][0] + x[2] * w[2][0],
            x[0] * w[0][1] + x[1] * w[1][1] + x[2] * w[2][1],
            x[0] * w[0][2] + x[1] * w[1][2] + x[2] * w[2][2],
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn identity_eigen() {
        let e = Sym3::from_upper(0.0, 0.0, 0.0).eigen();
        for v in e.values {
            assert_close(v, 1.0, 1e-14);
        }
    }

    #[test]
    fn all_ones_is_rank_one() {
        let e = Sym3::from_upper(1.0, 1.0, 1.0).eigen();
        assert_close(e.values[0], 3.0, 1e-12);
        assert_close(e.values[1], 0.0, 1e-12);
        assert_close(e.values[2], 0.0, 1e-12);
    }

    #[test]
    fn known_indefinite_matrix() {
        // (1, 1, -1) has eigenvalues 2, 2, -1.
        let e = Sym3::from_upper(1.0, 1.0, -1.0).eigen();
        assert_close(e.values[0], 2.0, 1e-12);
        assert_close(e.values[1], 2.0, 1e-12);
        assert_close(e.values[2], -1.0, 1e-12);
    }

    #[test]
    fn reconstruction_matches_input() {
        let cases = [
            (0.3, -0.5, 0.2),
            (0.71, 0.0, 0.7),
            (-0.9, 0.9, -0.9),
            (0.0, 1.0, 1.0),
        ];
        for (a, b, c) in cases {
            let m = Sym3::from_upper(a, b, c);
            let r = m.eigen().reconstruct();
            for i in 0..3 {
                for j in 0..3 {
                    assert_close(r.0[i][j], m.0[i][j], 1e-12);
                }
            }
        }
    }

    #[test]
    fn eigenvalue_sum_is_trace() {
        let m = Sym3::from_upper(0.4, -0.3, 0.6);
        let e = m.eigen();
        assert_close(e.values.iter().sum::<f64>(), 3.0, 1e-12);
    }

    #[test]
    fn gram_of_identity() {
        let g = Mat3::identity().gram();
        assert_eq!(g, Sym3::from_upper(0.0, 0.0, 0.0));
    }
}
