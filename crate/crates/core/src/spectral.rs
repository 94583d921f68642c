//! Sorting objects from a rating matrix with equal row sums.
//!
//! The second Schur vector of the sorted real Schur form, rescaled to
//! `[0, 1]`, gives each object's membership in the first of two fuzzy
//! clusters. Its complement is the membership in the second.

use thiserror::Error;

use crate::numerics::{solve_linear, sorted_real_schur, DenseMatrix, NumericsError, SortedSchur};
use crate::scalar::Real;

/// Largest accepted condition number of `χᵀχ`.
pub const MAX_CHI_CONDITION: f64 = 1e12;
/// Eigenvalues with `|im| ≤ REALNESS_TOLERANCE · target` count as real.
pub const REALNESS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("rating matrix must be at least 2x2, got {rows}x{cols}")]
    Shape { rows: usize, cols: usize },
    #[error("negative rating {value} at ({row}, {col})")]
    NegativeRating { row: usize, col: usize, value: f64 },
    #[error("non-finite rating at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("row {row} sums to {found}, expected {expected}")]
    UnequalRowSums { row: usize, expected: f64, found: f64 },
    #[error(
        "second eigenvalue is part of a conjugate complex pair ({re} ± {im}i); \
         the two-cluster assumption is questionable"
    )]
    ComplexPair { re: f64, im: f64 },
    #[error("second and third eigenvalues are equally far from the dominant one ({distance}); u2 is not unique")]
    EigenvalueTie { distance: f64 },
    #[error("second Schur vector is constant; no ordering can be derived")]
    ConstantVector,
    #[error("membership matrix is degenerate (condition of chi^T chi is {condition:.3e})")]
    DegenerateMembership { condition: f64 },
    #[error(transparent)]
    Numerics(NumericsError),
}

impl SpectralError {
    /// True for errors caused by the data violating the clustering model
    /// rather than by malformed input.
    pub fn is_model_violation(&self) -> bool {
        matches!(
            self,
            SpectralError::ComplexPair { .. }
                | SpectralError::EigenvalueTie { .. }
                | SpectralError::ConstantVector
                | SpectralError::DegenerateMembership { .. }
        )
    }
}

impl From<NumericsError> for SpectralError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::ComplexLeadingPair { re, im, .. } => SpectralError::ComplexPair { re, im },
            other => SpectralError::Numerics(other),
        }
    }
}

/// Non-negative square matrix whose rows all sum to `row_sum_target`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingMatrix<T> {
    entries: DenseMatrix<T>,
    row_sum_target: T,
}

impl<T: Real> RatingMatrix<T> {
    /// Fills the diagonal so that every row sums to the largest off-diagonal
    /// row sum. The given diagonal is ignored.
    pub fn assemble(off_diag: &DenseMatrix<T>) -> Result<Self, SpectralError> {
        let n = Self::check_shape(off_diag)?;
        let mut sums = Vec::with_capacity(n);
        for i in 0..n {
            let mut s = T::zero();
            for j in (0..n).filter(|&j| j != i) {
                let v = off_diag[(i, j)];
                Self::check_entry(i, j, v)?;
                s = s + v;
            }
            sums.push(s);
        }
        let target = sums.iter().copied().fold(T::zero(), T::max);
        let mut entries = off_diag.clone();
        for (i, s) in sums.into_iter().enumerate() {
            entries[(i, i)] = target - s;
        }
        Ok(Self { entries, row_sum_target: target })
    }

    /// Accepts a complete matrix whose rows already share a common sum.
    pub fn from_matrix(m: &DenseMatrix<T>) -> Result<Self, SpectralError> {
        let n = Self::check_shape(m)?;
        let mut sums = Vec::with_capacity(n);
        for i in 0..n {
            for j in 0..n {
                Self::check_entry(i, j, m[(i, j)])?;
            }
            sums.push(m.row(i).iter().fold(T::zero(), |a, v| a + *v));
        }
        let target = sums[0];
        let tol = T::tolerance(1e-12) * target.abs().max(T::one()) * T::lit(n as f64);
        for (row, s) in sums.iter().enumerate() {
            if (*s - target).abs() > tol {
                return Err(SpectralError::UnequalRowSums {
                    row,
                    expected: target.to_f64().unwrap_or(f64::NAN),
                    found: s.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(Self { entries: m.clone(), row_sum_target: target })
    }

    fn check_shape(m: &DenseMatrix<T>) -> Result<usize, SpectralError> {
        if !m.is_square() || m.rows() < 2 {
            return Err(SpectralError::Shape { rows: m.rows(), cols: m.cols() });
        }
        Ok(m.rows())
    }

    fn check_entry(row: usize, col: usize, v: T) -> Result<(), SpectralError> {
        if !v.is_finite() {
            return Err(SpectralError::NonFinite { row, col });
        }
        if v < T::zero() {
            return Err(SpectralError::NegativeRating { row, col, value: v.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &DenseMatrix<T> {
        &self.entries
    }

    pub fn row_sum_target(&self) -> T {
        self.row_sum_target
    }

    /// `R + c·I`, which keeps equal row sums.
    pub fn shifted(&self, c: T) -> Result<Self, SpectralError> {
        Self::from_matrix(&self.entries.shifted(c))
    }
}

#[derive(Debug, Clone)]
pub struct SortResult<T> {
    /// Membership in the first cluster, scaled to `[0, 1]`.
    pub vec: Vec<T>,
    /// Object indices by descending `vec`; ties keep index order.
    pub order: Vec<usize>,
    /// `n × 2` membership matrix `[vec, 1 − vec]`.
    pub chi: DenseMatrix<T>,
    /// Coupling matrix `(χᵀχ)⁻¹χᵀRχ`.
    pub rc: DenseMatrix<T>,
    /// Sorted Schur form with the second column oriented like `vec`.
    pub schur: SortedSchur<T>,
    pub u1: Vec<T>,
    pub u2: Vec<T>,
    pub v11: T,
    pub v12: T,
    pub v22: T,
    /// Indices with positive and non-positive oriented `u2`.
    pub fiedler_cut: (Vec<usize>, Vec<usize>),
    /// Whether the orientation rule replaced `vec` by `1 − vec`.
    pub flipped: bool,
}

/// Sorted-Schur ordering and two-cluster membership of the objects.
pub fn sort_objects<T: Real>(r: &RatingMatrix<T>) -> Result<SortResult<T>, SpectralError> {
    let n = r.size();
    let target = r.row_sum_target();
    let scale = target.abs().max(T::one());
    let imag_tol = T::lit(REALNESS_TOLERANCE) * scale;
    let mut schur = sorted_real_schur(r.entries(), imag_tol)?;

    let lambda_max = schur.eigenvalues[0].re;
    if n >= 3 {
        let d2 = (schur.eigenvalues[1] - num_complex::Complex::new(lambda_max, T::zero())).norm();
        let d3 = (schur.eigenvalues[2] - num_complex::Complex::new(lambda_max, T::zero())).norm();
        if (d3 - d2).abs() <= imag_tol {
            return Err(SpectralError::EigenvalueTie { distance: d2.to_f64().unwrap_or(f64::NAN) });
        }
    }

    let mut u2 = schur.u.column(1);
    let (lo, hi) = u2.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    let range = hi - lo;
    if range <= T::tolerance(1e-12) {
        return Err(SpectralError::ConstantVector);
    }
    let mut vec: Vec<T> = u2.iter().map(|v| (*v - lo) / range).collect();

    let half = T::lit(0.5);
    let flipped = vec.iter().find(|v| **v != half).is_some_and(|v| *v < half);
    if flipped {
        vec.iter_mut().for_each(|v| *v = T::one() - *v);
        u2.iter_mut().for_each(|v| *v = -*v);
        // Negate the second Schur vector: U ← U·S, V ← S·V·S with S = diag(1, −1, 1, …).
        for i in 0..n {
            schur.u[(i, 1)] = -schur.u[(i, 1)];
            if i != 1 {
                schur.v[(i, 1)] = -schur.v[(i, 1)];
                schur.v[(1, i)] = -schur.v[(1, i)];
            }
        }
    }

    let chi = DenseMatrix::from_fn(n, 2, |i, j| if j == 0 { vec[i] } else { T::one() - vec[i] });
    let chit = chi.transpose();
    let gram = chit.matmul(&chi)?;
    let condition = symmetric_condition(&gram);
    if condition.is_nan() || condition > MAX_CHI_CONDITION {
        return Err(SpectralError::DegenerateMembership { condition });
    }
    let projected = chit.matmul(r.entries())?.matmul(&chi)?;
    let mut rc = DenseMatrix::zeros(2, 2);
    for j in 0..2 {
        let col = solve_linear(&gram, &projected.column(j))?;
        for i in 0..2 {
            rc[(i, j)] = col[i];
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vec[b].partial_cmp(&vec[a]).unwrap_or(std::cmp::Ordering::Equal));
    let (pos, nonpos): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| u2[i] > T::zero());

    Ok(SortResult {
        u1: schur.u.column(0),
        u2,
        v11: schur.v[(0, 0)],
        v12: schur.v[(0, 1)],
        v22: schur.v[(1, 1)],
        vec,
        order,
        chi,
        rc,
        schur,
        fiedler_cut: (pos, nonpos),
        flipped,
    })
}

fn symmetric_condition<T: Real>(m: &DenseMatrix<T>) -> f64 {
    let (a, b, d) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
    let mean = (a + d) / T::lit(2.0);
    let radius = ((a - d) / T::lit(2.0)).hypot(b);
    let (big, small) = ((mean + radius).abs(), (mean - radius).abs());
    if small == T::zero() {
        f64::INFINITY
    } else {
        (big / small).to_f64().unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone)]
pub struct SymmetryCheck<T> {
    /// `χᵀ(R + D)χ` with `D = −v12·u1·u2ᵀ`.
    pub c: DenseMatrix<T>,
    /// `max |C − Cᵀ|`.
    pub symmetry_defect: T,
    /// Coordinates of the columns of `χ` in the basis `u1, u2`.
    pub alpha: [T; 2],
    pub beta: [T; 2],
    /// `max |C_ij − (v11·αi·αj + v22·βi·βj)|`.
    pub formula_defect: T,
}

/// Removes the non-normal coupling `v12` and checks that the projected
/// matrix is symmetric.
pub fn symmetrize_check<T: Real>(s: &SortResult<T>, r: &RatingMatrix<T>) -> Result<SymmetryCheck<T>, SpectralError> {
    let n = r.size();
    let d = DenseMatrix::from_fn(n, n, |i, j| -s.v12 * s.u1[i] * s.u2[j]);
    let mut sum = r.entries().clone();
    for i in 0..n {
        for j in 0..n {
            sum[(i, j)] = sum[(i, j)] + d[(i, j)];
        }
    }
    let c = s.chi.transpose().matmul(&sum)?.matmul(&s.chi)?;
    let symmetry_defect = (c[(0, 1)] - c[(1, 0)]).abs();

    let dot = |x: &[T], j: usize| (0..n).fold(T::zero(), |acc, i| acc + x[i] * s.chi[(i, j)]);
    let alpha = [dot(&s.u1, 0), dot(&s.u1, 1)];
    let beta = [dot(&s.u2, 0), dot(&s.u2, 1)];
    let mut formula_defect = T::zero();
    for i in 0..2 {
        for j in 0..2 {
            let expected = s.v11 * alpha[i] * alpha[j] + s.v22 * beta[i] * beta[j];
            formula_defect = formula_defect.max((c[(i, j)] - expected).abs());
        }
    }
    Ok(SymmetryCheck { c, symmetry_defect, alpha, beta, formula_defect })
}
