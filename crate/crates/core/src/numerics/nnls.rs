//! Lawson–Hanson active-set solver for `min ‖A·x − b‖²` subject to `x ≥ 0`.

use crate::scalar::Real;

use super::{DenseMatrix, NumericsError};

#[derive(Debug, Clone, Copy)]
pub struct NnlsOptions {
    /// Outer iteration cap; `None` uses `10·q²` for `q` unknowns.
    pub max_iterations: Option<usize>,
    /// Dual feasibility tolerance, relative to `max(1, ‖Aᵀb‖∞)`.
    pub tolerance: f64,
}

impl Default for NnlsOptions {
    fn default() -> Self {
        Self { max_iterations: None, tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone)]
pub struct NnlsSolution<T> {
    pub x: Vec<T>,
    /// Gradient `Aᵀ(A·x − b)` at the solution.
    pub gradient: Vec<T>,
    pub residual_norm: T,
    pub iterations: usize,
}

/// Non-negative least squares with default options.
pub fn nnls<T: Real>(a: &DenseMatrix<T>, b: &[T]) -> Result<NnlsSolution<T>, NumericsError> {
    NnlsOptions::default().solve(a, b)
}

impl NnlsOptions {
    pub fn solve<T: Real>(&self, a: &DenseMatrix<T>, b: &[T]) -> Result<NnlsSolution<T>, NumericsError> {
        let (p, q) = (a.rows(), a.cols());
        if b.len() != p {
            return Err(NumericsError::DimensionMismatch {
                expected: format!("right-hand side of length {p}"),
                found: format!("length {}", b.len()),
            });
        }
        a.ensure_finite()?;
        if let Some(i) = b.iter().position(|v| !v.is_finite()) {
            return Err(NumericsError::NonFinite { row: i, col: 0 });
        }

        let cap = self.max_iterations.unwrap_or(10 * q * q).max(1);
        let atb = dual(a, b, &vec![T::zero(); q]);
        let scale = atb.iter().fold(T::one(), |m, v| m.max(v.abs()));
        let tol = T::tolerance(self.tolerance) * scale;

        let mut x = vec![T::zero(); q];
        let mut passive = vec![false; q];
        let mut rejected = vec![false; q];
        let mut iterations = 0;

        loop {
            let w = dual(a, b, &x);
            let candidate = (0..q)
                .filter(|&j| !passive[j] && !rejected[j] && w[j] > tol)
                .max_by(|&i, &j| w[i].partial_cmp(&w[j]).unwrap_or(std::cmp::Ordering::Equal));
            let Some(j) = candidate else { break };

            iterations += 1;
            if iterations > cap {
                return Err(NumericsError::IterationCap { cap });
            }
            passive[j] = true;

            let mut first = true;
            loop {
                let z = passive_solution(a, b, &passive);
                let Some(z) = z else {
                    // column j is numerically dependent on the passive set
                    passive[j] = false;
                    rejected[j] = true;
                    break;
                };
                if first && z[j] <= T::zero() {
                    passive[j] = false;
                    rejected[j] = true;
                    break;
                }
                first = false;
                if (0..q).filter(|&i| passive[i]).all(|i| z[i] > T::zero()) {
                    x = z;
                    break;
                }
                let mut alpha = T::one();
                for i in (0..q).filter(|&i| passive[i] && z[i] <= T::zero()) {
                    let step = x[i] / (x[i] - z[i]);
                    if step < alpha {
                        alpha = step;
                    }
                }
                for i in 0..q {
                    x[i] = x[i] + alpha * (z[i] - x[i]);
                }
                for i in 0..q {
                    if passive[i] && x[i] <= tol {
                        passive[i] = false;
                        x[i] = T::zero();
                    }
                }
                iterations += 1;
                if iterations > cap {
                    return Err(NumericsError::IterationCap { cap });
                }
            }
            // A newly freed dual sign can make earlier rejections viable again.
            if !rejected[j] {
                rejected.iter_mut().for_each(|r| *r = false);
            }
        }

        let resid: Vec<T> = a.matvec(&x)?.iter().zip(b).map(|(ax, bi)| *ax - *bi).collect();
        let residual_norm = resid.iter().fold(T::zero(), |acc, v| acc.hypot(*v));
        let gradient = dual(a, b, &x).into_iter().map(|v| -v).collect();
        Ok(NnlsSolution { x, gradient, residual_norm, iterations })
    }
}

/// `Aᵀ(b − A·x)`, the negative gradient.
fn dual<T: Real>(a: &DenseMatrix<T>, b: &[T], x: &[T]) -> Vec<T> {
    let r: Vec<T> = (0..a.rows())
        .map(|i| b[i] - a.row(i).iter().zip(x).fold(T::zero(), |acc, (aij, xj)| acc + *aij * *xj))
        .collect();
    (0..a.cols())
        .map(|j| (0..a.rows()).fold(T::zero(), |acc, i| acc + a[(i, j)] * r[i]))
        .collect()
}

fn passive_solution<T: Real>(a: &DenseMatrix<T>, b: &[T], passive: &[bool]) -> Option<Vec<T>> {
    let cols: Vec<usize> = (0..a.cols()).filter(|&j| passive[j]).collect();
    let sub = DenseMatrix::from_fn(a.rows(), cols.len(), |i, k| a[(i, cols[k])]);
    let z = least_squares(&sub, b).ok()?;
    let mut full = vec![T::zero(); a.cols()];
    for (k, &j) in cols.iter().enumerate() {
        full[j] = z[k];
    }
    Some(full)
}

/// Unconstrained least squares via Householder QR; requires full column rank.
pub fn least_squares<T: Real>(a: &DenseMatrix<T>, b: &[T]) -> Result<Vec<T>, NumericsError> {
    let (p, q) = (a.rows(), a.cols());
    if b.len() != p {
        return Err(NumericsError::DimensionMismatch {
            expected: format!("right-hand side of length {p}"),
            found: format!("length {}", b.len()),
        });
    }
    if q > p {
        return Err(NumericsError::Singular { column: p });
    }
    let mut r = a.clone();
    let mut y = b.to_vec();
    let norm = a.max_abs().max(T::min_positive_value());
    for k in 0..q {
        let col_norm = (k..p).fold(T::zero(), |acc, i| acc.hypot(r[(i, k)]));
        if col_norm <= T::epsilon() * norm * T::lit(64.0 * p as f64) {
            return Err(NumericsError::Singular { column: k });
        }
        let alpha = if r[(k, k)] > T::zero() { -col_norm } else { col_norm };
        let mut v: Vec<T> = (k..p).map(|i| r[(i, k)]).collect();
        v[0] = v[0] - alpha;
        let vv = v.iter().fold(T::zero(), |acc, c| acc + *c * *c);
        if vv == T::zero() {
            continue;
        }
        let beta = T::lit(2.0) / vv;
        for j in k..q {
            let s = v.iter().enumerate().fold(T::zero(), |acc, (i, vi)| acc + *vi * r[(k + i, j)]);
            for (i, vi) in v.iter().enumerate() {
                r[(k + i, j)] = r[(k + i, j)] - beta * s * *vi;
            }
        }
        let s = v.iter().enumerate().fold(T::zero(), |acc, (i, vi)| acc + *vi * y[k + i]);
        for (i, vi) in v.iter().enumerate() {
            y[k + i] = y[k + i] - beta * s * *vi;
        }
    }
    let mut x = vec![T::zero(); q];
    for i in (0..q).rev() {
        let mut s = y[i];
        for j in i + 1..q {
            s = s - r[(i, j)] * x[j];
        }
        x[i] = s / r[(i, i)];
    }
    Ok(x)
}
