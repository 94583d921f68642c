//! Real Schur decomposition with eigenvalues ordered by their distance from
//! the dominant (largest real part) eigenvalue.
//!
//! Eigenvalues come from a Hessenberg reduction followed by Francis
//! double-shift QR. The ordered form is then built by deflation: for each
//! eigenvalue in the requested order an eigenvector (or, for a complex pair,
//! a real basis of the invariant plane) is obtained by inverse iteration on
//! the trailing block and rotated onto the leading coordinates with
//! Householder reflectors. The result satisfies `M = U·V·Uᵀ` with `U`
//! orthogonal and `V` upper quasi-triangular.

use std::cmp::Ordering;

use num_complex::Complex;

use crate::scalar::{Real, Scalar};

use super::{DenseMatrix, NumericsError};

const MAX_QR_SWEEPS: usize = 60;
const MAX_INVERSE_ITERATIONS: usize = 8;

#[derive(Debug, Clone)]
pub struct SortedSchur<T> {
    /// Orthogonal Schur vectors, one per column.
    pub u: DenseMatrix<T>,
    /// Upper quasi-triangular factor.
    pub v: DenseMatrix<T>,
    /// Eigenvalues in the order they appear on the diagonal of `v`.
    pub eigenvalues: Vec<Complex<T>>,
}

/// All eigenvalues of a square real matrix, in no particular order.
pub fn eigenvalues<T: Real>(m: &DenseMatrix<T>) -> Result<Vec<Complex<T>>, NumericsError> {
    check_square(m)?;
    m.ensure_finite()?;
    let mut h = m.clone();
    hessenberg(&mut h);
    hqr(h)
}

/// Sorted real Schur form of `m`.
///
/// Eigenvalues with `|im| <= imag_tol` are treated as real. The dominant
/// eigenvalue and the next one in distance order must both be real, otherwise
/// [`NumericsError::ComplexLeadingPair`] is returned.
pub fn sorted_real_schur<T: Real>(
    m: &DenseMatrix<T>,
    imag_tol: T,
) -> Result<SortedSchur<T>, NumericsError> {
    let eig = eigenvalues(m)?;
    let n = m.rows();
    let groups = order_spectrum(&eig, imag_tol)?;

    let norm = m.max_abs().max(T::one());
    let mut a = m.clone();
    let mut u = DenseMatrix::<T>::identity(n);
    let mut k = 0;
    for group in &groups {
        let r = n - k;
        match *group {
            Group::Real(lambda) => {
                if r == 1 {
                    break;
                }
                let x = real_eigenvector(&block(&a, k), lambda, norm);
                if let Some((v, beta)) = reflector(&x) {
                    apply_left(&mut a, k, &v, beta);
                    apply_right(&mut a, k, &v, beta);
                    apply_right(&mut u, k, &v, beta);
                }
                for i in k + 1..n {
                    a[(i, k)] = T::zero();
                }
                k += 1;
            }
            Group::Pair(re, im) => {
                if r == 2 {
                    break;
                }
                let (xr, xi) = complex_eigenvector(&block(&a, k), re, im, norm);
                let mut xi = xi;
                if let Some((v, beta)) = reflector(&xr) {
                    apply_left(&mut a, k, &v, beta);
                    apply_right(&mut a, k, &v, beta);
                    apply_right(&mut u, k, &v, beta);
                    reflect_vector(&mut xi, &v, beta);
                }
                if let Some((v, beta)) = reflector(&xi[1..]) {
                    apply_left(&mut a, k + 1, &v, beta);
                    apply_right(&mut a, k + 1, &v, beta);
                    apply_right(&mut u, k + 1, &v, beta);
                }
                for i in k + 2..n {
                    a[(i, k)] = T::zero();
                    a[(i, k + 1)] = T::zero();
                }
                k += 2;
            }
        }
    }

    let eigenvalues = diagonal_eigenvalues(&a);
    Ok(SortedSchur { u, v: a, eigenvalues })
}

#[derive(Debug, Clone, Copy)]
enum Group<T> {
    Real(T),
    /// Complex conjugate pair `re ± i·im` with `im > 0`.
    Pair(T, T),
}

fn check_square<T: Clone>(m: &DenseMatrix<T>) -> Result<(), NumericsError> {
    if m.is_square() {
        Ok(())
    } else {
        Err(NumericsError::DimensionMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", m.rows(), m.cols()),
        })
    }
}

fn order_spectrum<T: Real>(
    eig: &[Complex<T>],
    imag_tol: T,
) -> Result<Vec<Group<T>>, NumericsError> {
    let is_real = |z: &Complex<T>| z.im.abs() <= imag_tol;
    let dominant = eig
        .iter()
        .copied()
        .max_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap_or(Ordering::Equal)
                .then_with(|| is_real(a).cmp(&is_real(b)))
        })
        .expect("non-empty spectrum");
    if !is_real(&dominant) {
        return Err(NumericsError::ComplexLeadingPair {
            index: 0,
            re: dominant.re.to_f64().unwrap_or(f64::NAN),
            im: dominant.im.to_f64().unwrap_or(f64::NAN),
        });
    }
    let top = Complex::new(dominant.re, T::zero());

    let mut idx: Vec<usize> = (0..eig.len()).collect();
    idx.sort_by(|&i, &j| {
        let (a, b) = (eig[i], eig[j]);
        (a - top)
            .norm()
            .partial_cmp(&(b - top).norm())
            .unwrap_or(Ordering::Equal)
            .then_with(|| is_real(&b).cmp(&is_real(&a)))
            .then_with(|| b.re.partial_cmp(&a.re).unwrap_or(Ordering::Equal))
            .then_with(|| b.im.partial_cmp(&a.im).unwrap_or(Ordering::Equal))
    });

    let mut used = vec![false; eig.len()];
    let mut groups = Vec::with_capacity(eig.len());
    for &i in &idx {
        if used[i] {
            continue;
        }
        used[i] = true;
        let z = eig[i];
        if is_real(&z) {
            groups.push(Group::Real(z.re));
            continue;
        }
        let partner = idx
            .iter()
            .copied()
            .filter(|&j| !used[j] && !is_real(&eig[j]))
            .min_by(|&p, &q| {
                let dp = (eig[p] - z.conj()).norm();
                let dq = (eig[q] - z.conj()).norm();
                dp.partial_cmp(&dq).unwrap_or(Ordering::Equal)
            });
        if let Some(j) = partner {
            used[j] = true;
        }
        groups.push(Group::Pair(z.re, z.im.abs()));
    }

    for (position, g) in groups.iter().take(2).enumerate() {
        if let Group::Pair(re, im) = *g {
            return Err(NumericsError::ComplexLeadingPair {
                index: position,
                re: re.to_f64().unwrap_or(f64::NAN),
                im: im.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(groups)
}

fn block<T: Real>(a: &DenseMatrix<T>, k: usize) -> DenseMatrix<T> {
    let r = a.rows() - k;
    DenseMatrix::from_fn(r, r, |i, j| a[(k + i, k + j)])
}

fn diagonal_eigenvalues<T: Real>(v: &DenseMatrix<T>) -> Vec<Complex<T>> {
    let n = v.rows();
    let mut out = Vec::with_capacity(n);
    let mut k = 0;
    while k < n {
        if k + 1 < n && v[(k + 1, k)] != T::zero() {
            let (p, q, r, s) = (v[(k, k)], v[(k, k + 1)], v[(k + 1, k)], v[(k + 1, k + 1)]);
            let half = T::lit(0.5);
            let mean = (p + s) * half;
            let disc = ((p - s) * half).powi(2) + q * r;
            if disc >= T::zero() {
                let d = disc.sqrt();
                out.push(Complex::new(mean + d, T::zero()));
                out.push(Complex::new(mean - d, T::zero()));
            } else {
                let d = (-disc).sqrt();
                out.push(Complex::new(mean, d));
                out.push(Complex::new(mean, -d));
            }
            k += 2;
        } else {
            out.push(Complex::new(v[(k, k)], T::zero()));
            k += 1;
        }
    }
    out
}

/// Householder reflector `I − beta·v·vᵀ` mapping `x` onto a multiple of `e1`.
fn reflector<T: Real>(x: &[T]) -> Option<(Vec<T>, T)> {
    let norm = x.iter().fold(T::zero(), |acc, v| acc.hypot(*v));
    if norm == T::zero() {
        return None;
    }
    let alpha = if x[0] > T::zero() { -norm } else { norm };
    let mut v = x.to_vec();
    v[0] = v[0] - alpha;
    let vv = v.iter().fold(T::zero(), |acc, c| acc + *c * *c);
    if vv == T::zero() {
        return None;
    }
    Some((v, T::lit(2.0) / vv))
}

/// Rows `start..start+v.len()` of `a` ← `H·a`.
fn apply_left<T: Real>(a: &mut DenseMatrix<T>, start: usize, v: &[T], beta: T) {
    for j in 0..a.cols() {
        let s = v.iter().enumerate().fold(T::zero(), |acc, (i, vi)| acc + *vi * a[(start + i, j)]);
        let f = beta * s;
        for (i, vi) in v.iter().enumerate() {
            a[(start + i, j)] = a[(start + i, j)] - f * *vi;
        }
    }
}

/// Columns `start..start+v.len()` of `a` ← `a·H`.
fn apply_right<T: Real>(a: &mut DenseMatrix<T>, start: usize, v: &[T], beta: T) {
    for i in 0..a.rows() {
        let s = v.iter().enumerate().fold(T::zero(), |acc, (j, vj)| acc + a[(i, start + j)] * *vj);
        let f = beta * s;
        for (j, vj) in v.iter().enumerate() {
            a[(i, start + j)] = a[(i, start + j)] - f * *vj;
        }
    }
}

fn reflect_vector<T: Real>(x: &mut [T], v: &[T], beta: T) {
    let s = x.iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + *a * *b);
    let f = beta * s;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi = *xi - f * *vi;
    }
}

fn hessenberg<T: Real>(a: &mut DenseMatrix<T>) {
    let n = a.rows();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<T> = (k + 1..n).map(|i| a[(i, k)]).collect();
        if let Some((v, beta)) = reflector(&x) {
            apply_left(a, k + 1, &v, beta);
            apply_right(a, k + 1, &v, beta);
        }
        for i in k + 2..n {
            a[(i, k)] = T::zero();
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.
fn hqr<T: Real>(mut a: DenseMatrix<T>) -> Result<Vec<Complex<T>>, NumericsError> {
    let n = a.rows();
    let eps = T::epsilon();
    let zero = T::zero();
    let mut anorm = zero;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm = anorm + a[(i, j)].abs();
        }
    }
    let mut out = Vec::with_capacity(n);
    let mut t = zero;
    let mut nn = n as isize - 1;

    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l >= 1 {
                let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s == zero {
                    s = anorm;
                }
                if a[(l, l - 1)].abs() <= eps * s {
                    a[(l, l - 1)] = zero;
                    break;
                }
                l -= 1;
            }
            let mut x = a[(nu, nu)];
            if l == nu {
                out.push(Complex::new(x + t, zero));
                nn -= 1;
                break;
            }
            let mut y = a[(nu - 1, nu - 1)];
            let mut w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
            if l == nu - 1 {
                let p = T::lit(0.5) * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x = x + t;
                if q >= zero {
                    let z = p + if p >= zero { z } else { -z };
                    let first = x + z;
                    let second = if z != zero { x - w / z } else { first };
                    out.push(Complex::new(first, zero));
                    out.push(Complex::new(second, zero));
                } else {
                    out.push(Complex::new(x + p, z));
                    out.push(Complex::new(x + p, -z));
                }
                nn -= 2;
                break;
            }

            if its == MAX_QR_SWEEPS {
                return Err(NumericsError::EigenNoConvergence { iterations: its });
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift
                t = t + x;
                for i in 0..=nu {
                    a[(i, i)] = a[(i, i)] - x;
                }
                let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                x = T::lit(0.75) * s;
                y = x;
                w = T::lit(-0.4375) * s * s;
            }
            its += 1;

            let (mut p, mut q, mut r);
            let mut m = nu - 2;
            loop {
                let z = a[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - rr - ss;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p = p / s;
                q = q / s;
                r = r / s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[(i, i - 2)] = zero;
                if i != m + 2 {
                    a[(i, i - 3)] = zero;
                }
            }
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = if k != nu - 1 { a[(k + 2, k - 1)] } else { zero };
                    x = p.abs() + q.abs() + r.abs();
                    if x != zero {
                        p = p / x;
                        q = q / x;
                        r = r / x;
                    }
                }
                let norm = (p * p + q * q + r * r).sqrt();
                let s = if p >= zero { norm } else { -norm };
                if s != zero {
                    if k == m {
                        if l != m {
                            a[(k, k - 1)] = -a[(k, k - 1)];
                        }
                    } else {
                        a[(k, k - 1)] = -s * x;
                    }
                    p = p + s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q = q / p;
                    r = r / p;
                    for j in k..=nu {
                        let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                        if k != nu - 1 {
                            pp = pp + r * a[(k + 2, j)];
                            a[(k + 2, j)] = a[(k + 2, j)] - pp * z;
                        }
                        a[(k + 1, j)] = a[(k + 1, j)] - pp * y;
                        a[(k, j)] = a[(k, j)] - pp * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = x * a[(i, k)] + y * a[(i, k + 1)];
                        if k != nu - 1 {
                            pp = pp + z * a[(i, k + 2)];
                            a[(i, k + 2)] = a[(i, k + 2)] - pp * r;
                        }
                        a[(i, k + 1)] = a[(i, k + 1)] - pp * q;
                        a[(i, k)] = a[(i, k)] - pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(out)
}

/// LU factorisation for inverse iteration: tiny pivots are floored instead
/// of rejected, since the shifted matrix is singular by construction.
struct ShiftedLu<S> {
    lu: DenseMatrix<S>,
    perm: Vec<usize>,
}

impl<S: Scalar> ShiftedLu<S> {
    fn factor(mut lu: DenseMatrix<S>, floor: f64) -> Self {
        let n = lu.rows();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| {
                    lu[(i, k)].magnitude().partial_cmp(&lu[(j, k)].magnitude()).unwrap_or(Ordering::Equal)
                })
                .unwrap_or(k);
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)].clone();
                    lu[(k, j)] = lu[(p, j)].clone();
                    lu[(p, j)] = tmp;
                }
            }
            if lu[(k, k)].magnitude() < floor {
                lu[(k, k)] = S::from_f64_lossy(floor);
            }
            let pivot = lu[(k, k)].clone();
            for i in k + 1..n {
                let factor = lu[(i, k)].clone() / pivot.clone();
                for j in k + 1..n {
                    let d = factor.clone() * lu[(k, j)].clone();
                    lu[(i, j)] = lu[(i, j)].clone() - d;
                }
                lu[(i, k)] = factor;
            }
        }
        Self { lu, perm }
    }

    fn solve(&self, b: &[S]) -> Vec<S> {
        let n = self.lu.rows();
        let mut y: Vec<S> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for k in 0..i {
                let d = self.lu[(i, k)].clone() * y[k].clone();
                y[i] = y[i].clone() - d;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let d = self.lu[(i, k)].clone() * y[k].clone();
                y[i] = y[i].clone() - d;
            }
            y[i] = y[i].clone() / self.lu[(i, i)].clone();
        }
        y
    }
}

fn start_vector<T: Real>(r: usize, phase: f64) -> Vec<T> {
    (0..r).map(|i| T::lit(1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_034 + phase).sin())).collect()
}

fn real_eigenvector<T: Real>(b: &DenseMatrix<T>, lambda: T, norm: T) -> Vec<T> {
    let r = b.rows();
    let floor = (T::epsilon() * norm).to_f64().unwrap_or(f64::EPSILON);
    let shifted = DenseMatrix::from_fn(r, r, |i, j| if i == j { b[(i, j)] - lambda } else { b[(i, j)] });
    let lu = ShiftedLu::factor(shifted, floor);
    let target = T::epsilon() * norm * T::lit(8.0 * r as f64);

    let mut x = start_vector::<T>(r, 0.0);
    normalize(&mut x);
    for _ in 0..MAX_INVERSE_ITERATIONS {
        let mut y = lu.solve(&x);
        if y.iter().any(|v| !v.is_finite()) {
            break;
        }
        normalize(&mut y);
        x = y;
        let bx = b.matvec(&x).expect("square block");
        let rq = bx.iter().zip(&x).fold(T::zero(), |acc, (p, q)| acc + *p * *q);
        let resid = bx.iter().zip(&x).fold(T::zero(), |m, (p, q)| m.max((*p - rq * *q).abs()));
        if resid <= target {
            break;
        }
    }
    x
}

fn complex_eigenvector<T: Real>(b: &DenseMatrix<T>, re: T, im: T, norm: T) -> (Vec<T>, Vec<T>) {
    let r = b.rows();
    let floor = (T::epsilon() * norm).to_f64().unwrap_or(f64::EPSILON);
    let mu = Complex::new(re, im);
    let shifted = DenseMatrix::from_fn(r, r, |i, j| {
        let v = Complex::new(b[(i, j)], T::zero());
        if i == j {
            v - mu
        } else {
            v
        }
    });
    let lu = ShiftedLu::factor(shifted, floor);
    let re0 = start_vector::<T>(r, 0.0);
    let im0 = start_vector::<T>(r, 1.3);
    let mut z: Vec<Complex<T>> = re0.into_iter().zip(im0).map(|(a, c)| Complex::new(a, c)).collect();
    for _ in 0..MAX_INVERSE_ITERATIONS {
        let mut y = lu.solve(&z);
        let len = y.iter().fold(T::zero(), |acc, c| acc.hypot(c.norm()));
        if !len.is_finite() || len == T::zero() {
            break;
        }
        for c in &mut y {
            *c = *c / len;
        }
        z = y;
    }
    (z.iter().map(|c| c.re).collect(), z.iter().map(|c| c.im).collect())
}

fn normalize<T: Real>(x: &mut [T]) {
    let len = x.iter().fold(T::zero(), |acc, v| acc.hypot(*v));
    if len > T::zero() {
        for v in x.iter_mut() {
            *v = *v / len;
        }
    }
}
