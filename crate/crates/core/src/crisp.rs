//! Classic crisp DEMATEL.
//!
//! Expert matrices are averaged, scaled by the reciprocal of the largest row
//! sum, and closed into the total-relation matrix `T = D (I - D)^-1`. Row and
//! column sums of `T` give each criterion's dispatched and received influence.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Square, nonnegative direct-relation matrix with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CrispDirectMatrix(Matrix);

impl CrispDirectMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        let n = m.dim();
        for i in 0..n {
            if m[(i, i)] != 0.0 {
                return Err(Error::invalid(format!(
                    "diagonal entry ({i},{i}) is {}, must be 0",
                    m[(i, i)]
                )));
            }
            for j in 0..n {
                let v = m[(i, j)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::invalid(format!(
                        "entry ({i},{j}) is {v}, must be finite and nonnegative"
                    )));
                }
            }
        }
        Ok(CrispDirectMatrix(m))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        CrispDirectMatrix::new(Matrix::from_rows(rows)?)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// Entrywise mean of several experts' matrices.
pub fn average_expert_matrices(matrices: &[CrispDirectMatrix]) -> Result<CrispDirectMatrix> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::invalid("no expert matrices to average"))?;
    let n = first.dim();
    let mut sum = Matrix::zeros(n);
    for (k, m) in matrices.iter().enumerate() {
        if m.dim() != n {
            return Err(Error::Shape(format!(
                "expert matrix {k} is {0}x{0}, expected {n}x{n}",
                m.dim()
            )));
        }
        sum = sum.add(&m.0);
    }
    Ok(CrispDirectMatrix(sum.scale(1.0 / matrices.len() as f64)))
}

/// Direct-relation matrix scaled so its largest row sum is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedMatrix {
    /// Reciprocal of the largest row sum.
    pub scale: f64,
    pub matrix: Matrix,
}

pub fn normalize_crisp(z: &CrispDirectMatrix) -> Result<NormalizedMatrix> {
    let max = z.0.max_row_sum();
    if max <= 0.0 {
        return Err(Error::Degenerate(
            "direct-relation matrix has no nonzero entry".into(),
        ));
    }
    let scale = 1.0 / max;
    Ok(NormalizedMatrix {
        scale,
        matrix: z.0.scale(scale),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrispTotalMatrix(pub Matrix);

impl CrispTotalMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }
}

pub fn total_relation_crisp(d: &Matrix) -> Result<CrispTotalMatrix> {
    linalg::total_relation(d).map(CrispTotalMatrix)
}

/// Row sums `R`, column sums `D`, and their sum and difference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrispScores {
    pub row_sums: Vec<f64>,
    pub column_sums: Vec<f64>,
    pub prominence: Vec<f64>,
    pub relation: Vec<f64>,
}

pub fn crisp_scores(t: &CrispTotalMatrix) -> CrispScores {
    let row_sums = t.0.row_sums();
    let column_sums = t.0.column_sums();
    let prominence = row_sums
        .iter()
        .zip(&column_sums)
        .map(|(r, d)| r + d)
        .collect();
    let relation = row_sums
        .iter()
        .zip(&column_sums)
        .map(|(r, d)| r - d)
        .collect();
    CrispScores {
        row_sums,
        column_sums,
        prominence,
        relation,
    }
}

/// Averaging, normalization, total relation and scores in one call.
pub fn crisp_dematel(matrices: &[CrispDirectMatrix]) -> Result<(CrispTotalMatrix, CrispScores)> {
    let z = average_expert_matrices(matrices)?;
    let d = normalize_crisp(&z)?;
    let t = total_relation_crisp(&d.matrix)?;
    let scores = crisp_scores(&t);
    Ok((t, scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cm(rows: &[&[f64]]) -> CrispDirectMatrix {
        CrispDirectMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn table_a1() -> CrispDirectMatrix {
        cm(&[
            &[0., 4., 4., 0., 0., 4., 0.],
            &[1., 0., 2., 0., 0., 4., 0.],
            &[4., 3., 0., 0., 0., 4., 0.],
            &[4., 2., 4., 0., 0., 3., 0.],
            &[2., 2., 1., 0., 0., 3., 3.],
            &[4., 4., 4., 0., 0., 0., 0.],
            &[3., 3., 2., 0., 0., 3., 0.],
        ])
    }

    #[test]
    fn validation() {
        assert!(CrispDirectMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).is_err());
        assert!(CrispDirectMatrix::from_rows(&[vec![0.0, -1.0], vec![0.0, 0.0]]).is_err());
        assert!(CrispDirectMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0]]).is_err());
    }

    #[test]
    fn average_examples() {
        let a = cm(&[&[0., 2.], &[4., 0.]]);
        assert_eq!(average_expert_matrices(&[a.clone(), a.clone()]).unwrap(), a);

        let z = cm(&[&[0., 0.], &[0., 0.]]);
        let avg = average_expert_matrices(&[a, z]).unwrap();
        assert_eq!(avg, cm(&[&[0., 1.], &[2., 0.]]));

        let a1 = table_a1();
        assert_eq!(
            average_expert_matrices(std::slice::from_ref(&a1)).unwrap(),
            a1
        );
    }

    #[test]
    fn average_errors() {
        assert!(matches!(
            average_expert_matrices(&[]),
            Err(Error::InvalidArgument(_))
        ));
        let a = cm(&[&[0., 1.], &[1., 0.]]);
        let b = cm(&[&[0., 1., 1.], &[1., 0., 1.], &[1., 1., 0.]]);
        assert!(matches!(
            average_expert_matrices(&[a, b]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn normalize_examples() {
        let a1 = table_a1();
        assert_eq!(
            a1.matrix().row_sums(),
            vec![12., 7., 11., 13., 11., 12., 11.]
        );
        let d = normalize_crisp(&a1).unwrap();
        assert_abs_diff_eq!(d.scale, 1.0 / 13.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.matrix.max_row_sum(), 1.0, epsilon = 1e-15);

        let d = normalize_crisp(&cm(&[&[0., 2.], &[1., 0.]])).unwrap();
        assert_eq!(d.matrix.to_rows(), vec![vec![0.0, 1.0], vec![0.5, 0.0]]);

        assert!(matches!(
            normalize_crisp(&cm(&[&[0., 0.], &[0., 0.]])),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn total_relation_examples() {
        let d = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.5, 0.0]]).unwrap();
        let t = total_relation_crisp(&d).unwrap();
        let expected = Matrix::from_rows(&[vec![1.0, 2.0], vec![1.0, 1.0]]).unwrap();
        assert!(t.matrix().max_abs_diff(&expected) < 1e-12);

        let t = total_relation_crisp(&Matrix::zeros(3)).unwrap();
        assert_eq!(t.matrix(), &Matrix::zeros(3));
    }

    #[test]
    fn singular_total_relation() {
        // Both rows sum to 1, so I - D is singular.
        let d = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            total_relation_crisp(&d),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn table_a1_matches_power_series() {
        let d = normalize_crisp(&table_a1()).unwrap().matrix;
        let t = total_relation_crisp(&d).unwrap();
        // Forty terms are not enough here (spectral radius ~0.80 leaves a
        // tail near 2e-4), so run the series until the next power is negligible.
        let mut power = d.clone();
        let mut series = d.clone();
        let mut terms = 1;
        while power.norm_inf() >= 1e-12 {
            power = power.matmul(&d);
            series = series.add(&power);
            terms += 1;
        }
        assert!(terms > 40);
        assert!(t.matrix().max_abs_diff(&series) < 1e-9);
    }

    #[test]
    fn scores_examples() {
        let t = CrispTotalMatrix(Matrix::from_rows(&[vec![1.0, 2.0], vec![1.0, 1.0]]).unwrap());
        let s = crisp_scores(&t);
        assert_eq!(s.row_sums, vec![3.0, 2.0]);
        assert_eq!(s.column_sums, vec![2.0, 3.0]);
        assert_eq!(s.prominence, vec![5.0, 5.0]);
        assert_eq!(s.relation, vec![1.0, -1.0]);

        let s = crisp_scores(&CrispTotalMatrix(Matrix::zeros(3)));
        assert!(s.prominence.iter().chain(&s.relation).all(|&v| v == 0.0));
    }
}
