//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use objcmp::order_laplacian::ComparisonGraph;
use objcmp::{DenseMatrix, RatingMatrix};
use rand::Rng;

/// Random DAG on `n` vertices with edges only from lower to higher index.
/// Vertex 0 always reaches the last vertex.
pub fn random_dag(rng: &mut impl Rng, n: usize, density: f64) -> ComparisonGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(density) {
                edges.push((i, j));
            }
        }
    }
    if n > 1 && !edges.iter().any(|&(i, _)| i == 0) {
        edges.push((0, n - 1));
    }
    let labels = (0..n).map(|i| format!("v{i}")).collect();
    ComparisonGraph::new(labels, &edges).expect("forward edges form a DAG")
}

/// Absorption counts of uniform random walks from `start`, indexed by vertex.
pub fn absorption_counts(g: &ComparisonGraph, start: usize, walks: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut counts = vec![0; g.len()];
    for _ in 0..walks {
        let mut v = start;
        while g.out_degree(v) > 0 {
            let s = g.successors(v);
            v = s[rng.random_range(0..s.len())];
        }
        counts[v] += 1;
    }
    counts
}

/// Projected gradient descent for `min ‖Ax − b‖², x ≥ 0`, run until the
/// projected step stalls below `tol`.
pub fn projected_gradient_nnls(a: &DenseMatrix<f64>, b: &[f64], tol: f64) -> Vec<f64> {
    let (p, q) = (a.rows(), a.cols());
    let frob2: f64 = a.as_slice().iter().map(|v| v * v).sum();
    let step = 1.0 / frob2;
    let mut x = vec![0.0; q];
    let mut y = x.clone();
    let mut t = 1.0f64;
    for _ in 0..2_000_000 {
        let r: Vec<f64> = (0..p).map(|i| (0..q).map(|j| a[(i, j)] * y[j]).sum::<f64>() - b[i]).collect();
        let g: Vec<f64> = (0..q).map(|j| (0..p).map(|i| a[(i, j)] * r[i]).sum()).collect();
        let next: Vec<f64> = (0..q).map(|j| (y[j] - step * g[j]).max(0.0)).collect();
        let change = next.iter().zip(&x).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        y = next.iter().zip(&x).map(|(n, o)| n + (t - 1.0) / t_next * (n - o)).collect();
        x = next;
        t = t_next;
        if change < tol {
            break;
        }
    }
    x
}

/// Power sums `Σ λᵢ^k` for `k = 1..=n` from traces of matrix powers.
pub fn trace_power_sums(m: &DenseMatrix<f64>) -> Vec<f64> {
    let n = m.rows();
    let mut p = m.clone();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push((0..n).map(|i| p[(i, i)]).sum());
        p = p.matmul(m).unwrap();
    }
    out
}

/// Random ratings in `[lo, hi)` assembled into an equal-row-sum matrix.
pub fn random_ratings(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> RatingMatrix<f64> {
    let off = DenseMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { rng.random_range(lo..hi) });
    RatingMatrix::assemble(&off).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Absorption probabilities into `sink` by backward recursion; requires edges
/// to point from lower to higher index.
pub fn forward_dag_committor(g: &ComparisonGraph, sink: usize) -> Vec<f64> {
    let n = g.len();
    let mut q = vec![0.0; n];
    for v in (0..n).rev() {
        let s = g.successors(v);
        q[v] = if s.is_empty() {
            if v == sink { 1.0 } else { 0.0 }
        } else {
            s.iter().map(|&w| q[w]).sum::<f64>() / s.len() as f64
        };
    }
    q
}
