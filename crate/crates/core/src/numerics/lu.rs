use crate::scalar::Scalar;

use super::{DenseMatrix, NumericsError, MAX_CONDITION};

/// LU factorisation with partial pivoting, `P·A = L·U`.
///
/// For exact scalars only a zero pivot is rejected. For floating-point
/// scalars the ratio of the largest to the smallest pivot magnitude serves
/// as a cheap condition estimate and is capped at [`MAX_CONDITION`].
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: DenseMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    pub fn factor(a: &DenseMatrix<T>) -> Result<Self, NumericsError> {
        if !a.is_square() {
            return Err(NumericsError::DimensionMismatch {
                expected: "square matrix".into(),
                found: format!("{}x{}", a.rows(), a.cols()),
            });
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut max_pivot = 0.0f64;
        let mut min_pivot = f64::INFINITY;

        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, lu[(i, k)].magnitude()))
                .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if best == 0.0 {
                return Err(NumericsError::Singular { column: k });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)].clone();
                    lu[(k, j)] = lu[(p, j)].clone();
                    lu[(p, j)] = tmp;
                }
            }
            max_pivot = max_pivot.max(best);
            min_pivot = min_pivot.min(best);

            let pivot = lu[(k, k)].clone();
            for i in k + 1..n {
                if lu[(i, k)] == T::zero() {
                    continue;
                }
                let factor = lu[(i, k)].clone() / pivot.clone();
                for j in k + 1..n {
                    let delta = factor.clone() * lu[(k, j)].clone();
                    lu[(i, j)] = lu[(i, j)].clone() - delta;
                }
                lu[(i, k)] = factor;
            }
        }

        if !T::EXACT {
            let condition = max_pivot / min_pivot;
            if condition > MAX_CONDITION {
                return Err(NumericsError::IllConditioned { condition });
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>, NumericsError> {
        let n = self.dim();
        if b.len() != n {
            return Err(NumericsError::DimensionMismatch {
                expected: format!("right-hand side of length {n}"),
                found: format!("length {}", b.len()),
            });
        }
        let mut y: Vec<T> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for k in 0..i {
                let delta = self.lu[(i, k)].clone() * y[k].clone();
                y[i] = y[i].clone() - delta;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let delta = self.lu[(i, k)].clone() * y[k].clone();
                y[i] = y[i].clone() - delta;
            }
            y[i] = y[i].clone() / self.lu[(i, i)].clone();
        }
        Ok(y)
    }
}

/// Solves `A·x = b` for square nonsingular `A`.
pub fn solve_linear<T: Scalar>(a: &DenseMatrix<T>, b: &[T]) -> Result<Vec<T>, NumericsError> {
    Lu::factor(a)?.solve(b)
}
