//! Subset-order graphs, their Laplacians and committor vectors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{DenseMatrix, Lu, NumericsError};
use crate::ring::{enumerate_normal_form_order, RingContext, RingElement, RingError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("duplicate vertex label {0:?}")]
    DuplicateVertex(String),
    #[error("edge {index} refers to unknown vertex {vertex:?}")]
    UnknownVertex { index: usize, vertex: String },
    #[error("edge {index} is a self-loop on {vertex:?}")]
    SelfLoop { index: usize, vertex: String },
    #[error("graph contains a directed cycle through {0:?}")]
    Cycle(String),
    #[error("graph has no sink")]
    NoSink,
    #[error("malformed graph file: {0}")]
    Format(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Directed acyclic graph; an edge `i → j` means vertex `i` strictly
/// dominates vertex `j`.
#[derive(Debug, Clone)]
pub struct ComparisonGraph {
    labels: Vec<String>,
    elements: Option<Vec<RingElement>>,
    successors: Vec<Vec<usize>>,
}

impl ComparisonGraph {
    /// Builds a graph from labels and index edges, validating the result.
    pub fn new(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if labels.is_empty() {
            return Err(GraphError::Empty);
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(GraphError::DuplicateVertex(l.clone()));
            }
        }
        let n = labels.len();
        let mut successors = vec![Vec::new(); n];
        for (index, &(from, to)) in edges.iter().enumerate() {
            for v in [from, to] {
                if v >= n {
                    return Err(GraphError::UnknownVertex { index, vertex: v.to_string() });
                }
            }
            if from == to {
                return Err(GraphError::SelfLoop { index, vertex: labels[from].clone() });
            }
            if !successors[from].contains(&to) {
                successors[from].push(to);
            }
        }
        successors.iter_mut().for_each(|s| s.sort_unstable());
        let graph = Self { labels, elements: None, successors };
        graph.check_acyclic()?;
        Ok(graph)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Ring elements behind the vertices, when built from a ring.
    pub fn elements(&self) -> Option<&[RingElement]> {
        self.elements.as_deref()
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.successors[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.successors[v].len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.successors.iter().enumerate().flat_map(|(i, s)| s.iter().map(move |&j| (i, j))).collect()
    }

    fn check_acyclic(&self) -> Result<(), GraphError> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let n = self.len();
        let mut state = vec![0u8; n];
        for root in 0..n {
            if state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            state[root] = 1;
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if let Some(&w) = self.successors[v].get(*next) {
                    *next += 1;
                    match state[w] {
                        0 => {
                            state[w] = 1;
                            stack.push((w, 0));
                        }
                        1 => return Err(GraphError::Cycle(self.labels[w].clone())),
                        _ => {}
                    }
                } else {
                    state[v] = 2;
                    stack.pop();
                }
            }
        }
        Ok(())
    }

    /// Parses `{"vertices": [...], "edges": [[from, to], ...]}`. Edge ends may
    /// be vertex labels or zero-based indices.
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| GraphError::Format(e.to_string()))?;
        let mut edges = Vec::with_capacity(file.edges.len());
        for (index, [from, to]) in file.edges.iter().enumerate() {
            let resolve = |end: &Endpoint| match end {
                Endpoint::Index(i) if (*i as usize) < file.vertices.len() => Ok(*i as usize),
                Endpoint::Index(i) => Err(GraphError::UnknownVertex { index, vertex: i.to_string() }),
                Endpoint::Label(l) => file
                    .vertices
                    .iter()
                    .position(|v| v == l)
                    .ok_or_else(|| GraphError::UnknownVertex { index, vertex: l.clone() }),
            };
            edges.push((resolve(from)?, resolve(to)?));
        }
        Self::new(file.vertices, &edges)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            vertices: self.labels.clone(),
            edges: self.edges().into_iter().map(|(i, j)| [Endpoint::Index(i as u64), Endpoint::Index(j as u64)]).collect(),
        };
        serde_json::to_string(&file).expect("graph serialisation cannot fail")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    vertices: Vec<String>,
    #[serde(default)]
    edges: Vec<[Endpoint; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Endpoint {
    Index(u64),
    Label(String),
}

/// Order graph over the nonzero elements of the ring, in normal-form order.
pub fn build_graph(ctx: &RingContext) -> Result<ComparisonGraph, GraphError> {
    let elements: Vec<RingElement> =
        enumerate_normal_form_order(ctx)?.into_iter().filter(|e| !e.is_zero()).collect();
    let n = elements.len();
    let mut successors = vec![Vec::new(); n];
    for (i, x) in elements.iter().enumerate() {
        for (j, y) in elements.iter().enumerate() {
            if i != j && x.geq(y)? {
                successors[i].push(j);
            }
        }
    }
    Ok(ComparisonGraph {
        labels: elements.iter().map(ToString::to_string).collect(),
        elements: Some(elements),
        successors,
    })
}

/// `L_ij = 1` for an edge `i → j`, `L_ii = −outdeg(i)`.
pub fn laplacian<T: Scalar>(g: &ComparisonGraph) -> DenseMatrix<T> {
    let n = g.len();
    let mut l = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for &j in g.successors(i) {
            l[(i, j)] = T::one();
        }
        l[(i, i)] = -T::from_f64_lossy(g.out_degree(i) as f64);
    }
    l
}

/// Vertices with out-degree zero, ascending.
pub fn sinks(g: &ComparisonGraph) -> Vec<usize> {
    (0..g.len()).filter(|&v| g.out_degree(v) == 0).collect()
}

/// Absorption probabilities of the uniform random walk, one vector per
/// sink in [`sinks`] order.
pub fn committors<T: Scalar>(g: &ComparisonGraph) -> Result<Vec<Vec<T>>, GraphError> {
    let sink_list = sinks(g);
    if sink_list.is_empty() {
        return Err(GraphError::NoSink);
    }
    let n = g.len();
    let interior: Vec<usize> = (0..n).filter(|&v| g.out_degree(v) > 0).collect();
    let mut slot = vec![usize::MAX; n];
    for (k, &v) in interior.iter().enumerate() {
        slot[v] = k;
    }

    let lu = if interior.is_empty() {
        None
    } else {
        let mut a = DenseMatrix::zeros(interior.len(), interior.len());
        for (k, &v) in interior.iter().enumerate() {
            a[(k, k)] = T::from_f64_lossy(g.out_degree(v) as f64);
            for &w in g.successors(v) {
                if slot[w] != usize::MAX {
                    a[(k, slot[w])] = a[(k, slot[w])].clone() - T::one();
                }
            }
        }
        Some(Lu::factor(&a)?)
    };

    let mut out = Vec::with_capacity(sink_list.len());
    for &c in &sink_list {
        let mut q = vec![T::zero(); n];
        q[c] = T::one();
        if let Some(lu) = &lu {
            let rhs: Vec<T> = interior
                .iter()
                .map(|&v| if g.successors(v).contains(&c) { T::one() } else { T::zero() })
                .collect();
            for (k, value) in lu.solve(&rhs)?.into_iter().enumerate() {
                q[interior[k]] = value;
            }
        }
        out.push(q);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn two_generator_graph() {
        let ctx = RingContext::new(["A", "B"]).unwrap();
        let g = build_graph(&ctx).unwrap();
        assert_eq!(g.labels(), ["A", "B", "A*B", "A+B", "A+A*B", "B+A*B", "A+B+A*B"]);
        let l: DenseMatrix<f64> = laplacian(&g);
        let expected = [
            [-2., 0., 1., 0., 1., 0., 0.],
            [0., -2., 1., 0., 0., 1., 0.],
            [0.; 7],
            [0., 0., 0., -2., 1., 1., 0.],
            [0.; 7],
            [0.; 7],
            [1., 1., 1., 1., 1., 1., -6.],
        ];
        assert_eq!(l, DenseMatrix::from_rows(&expected).unwrap());
        assert_eq!(sinks(&g), vec![2, 4, 5]);

        let q: Vec<Vec<BigRational>> = committors(&g).unwrap();
        assert_eq!(q[0], vec![r(1, 2), r(1, 2), r(1, 1), r(0, 1), r(0, 1), r(0, 1), r(1, 3)]);
        assert_eq!(q[1], vec![r(1, 2), r(0, 1), r(0, 1), r(1, 2), r(1, 1), r(0, 1), r(1, 3)]);
        assert_eq!(q[2], vec![r(0, 1), r(1, 2), r(0, 1), r(1, 2), r(0, 1), r(1, 1), r(1, 3)]);
    }

    #[test]
    fn single_vertex_and_three_generators() {
        let g = build_graph(&RingContext::new(["a"]).unwrap()).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(laplacian::<f64>(&g).to_rows(), vec![vec![0.0]]);
        assert_eq!(committors::<f64>(&g).unwrap(), vec![vec![1.0]]);

        let g = build_graph(&RingContext::new(["a", "b", "c"]).unwrap()).unwrap();
        assert_eq!(g.len(), 127);
        let s = sinks(&g);
        assert_eq!(s.len(), 7);
        assert!(s.iter().all(|&v| g.elements().unwrap()[v].is_atom()));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let g = ComparisonGraph::from_json(r#"{"vertices":["x","y","z"],"edges":[["x","y"],[1,2]]}"#).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(sinks(&g), vec![2]);
        let back = ComparisonGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(back.edges(), g.edges());

        let bad = |s: &str| ComparisonGraph::from_json(s).unwrap_err();
        assert!(matches!(bad(r#"{"vertices":["x"],"edges":[["x","x"]]}"#), GraphError::SelfLoop { .. }));
        assert!(matches!(bad(r#"{"vertices":["x","y"],"edges":[["x","y"],["y","x"]]}"#), GraphError::Cycle(_)));
        assert!(matches!(bad(r#"{"vertices":["x"],"edges":[["x","q"]]}"#), GraphError::UnknownVertex { .. }));
        assert!(matches!(bad(r#"{"vertices":[]}"#), GraphError::Empty));
        assert!(matches!(bad(r#"{"vertices":"x"}"#), GraphError::Format(_)));
    }
}
