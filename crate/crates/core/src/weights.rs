//! Non-negative characteristic weights learned from pairwise commonalities.

use thiserror::Error;

use crate::numerics::{DenseMatrix, NnlsOptions, NumericsError};
use crate::scalar::Real;

/// Default exponent scale of the similarity kernel `exp(−scale·‖x−y‖²)`.
pub const DEFAULT_SCALE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightsError {
    #[error("at least two objects are required, got {0}")]
    TooFewObjects(usize),
    #[error("duplicate {kind} label {label:?}")]
    DuplicateLabel { kind: &'static str, label: String },
    #[error("row {row} has {found} bits, expected {expected}")]
    RowLength { row: usize, expected: usize, found: usize },
    #[error("{0} targets given for {1} pairs")]
    TargetCount(usize, usize),
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("invalid bit {found:?} at row {row}, column {col}")]
    InvalidBit { row: usize, col: usize, found: char },
    #[error("scale must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("feature matrix is all zero; nothing can be learned")]
    NoFeatures,
    #[error("bit {column} is set but its weight was never learned")]
    UnlearnedColumn { column: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Bit strings coding which characteristics each object has.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureCoding {
    objects: Vec<String>,
    characteristics: Vec<String>,
    bits: Vec<Vec<bool>>,
}

impl FeatureCoding {
    pub fn new(objects: Vec<String>, characteristics: Vec<String>, bits: Vec<Vec<bool>>) -> Result<Self, WeightsError> {
        check_unique("object", &objects)?;
        check_unique("characteristic", &characteristics)?;
        if bits.len() != objects.len() {
            return Err(WeightsError::RowLength { row: bits.len(), expected: objects.len(), found: bits.len() });
        }
        for (row, b) in bits.iter().enumerate() {
            if b.len() != characteristics.len() {
                return Err(WeightsError::RowLength { row, expected: characteristics.len(), found: b.len() });
            }
        }
        Ok(Self { objects, characteristics, bits })
    }

    /// Builds a coding from `'0'`/`'1'` strings; characteristics are named
    /// `w1, w2, …`.
    pub fn from_bit_strings<S: AsRef<str>>(objects: Vec<String>, strings: &[S]) -> Result<Self, WeightsError> {
        let h = strings.first().map_or(0, |s| s.as_ref().len());
        let mut bits = Vec::with_capacity(strings.len());
        for (row, s) in strings.iter().enumerate() {
            let mut r = Vec::with_capacity(h);
            for (col, c) in s.as_ref().chars().enumerate() {
                match c {
                    '0' => r.push(false),
                    '1' => r.push(true),
                    other => return Err(WeightsError::InvalidBit { row, col, found: other }),
                }
            }
            bits.push(r);
        }
        Self::new(objects, (1..=h).map(|k| format!("w{k}")).collect(), bits)
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn characteristics(&self) -> &[String] {
        &self.characteristics
    }

    pub fn bits(&self) -> &[Vec<bool>] {
        &self.bits
    }
}

fn check_unique(kind: &'static str, labels: &[String]) -> Result<(), WeightsError> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(WeightsError::DuplicateLabel { kind, label: l.clone() });
        }
    }
    Ok(())
}

/// Unordered object pairs `(j, k)`, `j < k`, in row-major order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|j| (j + 1..n).map(move |k| (j, k))).collect()
}

/// Bitwise AND of every pair of object rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairFeatures {
    pub pairs: Vec<(usize, usize)>,
    pub rows: Vec<Vec<bool>>,
}

pub fn commonality_features(coding: &FeatureCoding) -> Result<PairFeatures, WeightsError> {
    let n = coding.objects.len();
    if n < 2 {
        return Err(WeightsError::TooFewObjects(n));
    }
    let pairs = pairs(n);
    let rows = pairs
        .iter()
        .map(|&(j, k)| coding.bits[j].iter().zip(&coding.bits[k]).map(|(a, b)| *a && *b).collect())
        .collect();
    Ok(PairFeatures { pairs, rows })
}

/// `exp(−scale·‖x_j − x_k‖²)` for every pair, with one object per row of
/// `coords`.
pub fn similarity_targets<T: Real>(coords: &DenseMatrix<T>, scale: T) -> Result<Vec<T>, WeightsError> {
    if !(scale.is_finite() && scale > T::zero()) {
        return Err(WeightsError::InvalidScale(scale.to_f64().unwrap_or(f64::NAN)));
    }
    coords.ensure_finite().map_err(|e| match e {
        NumericsError::NonFinite { row, col } => WeightsError::NonFinite { row, col },
        other => WeightsError::Numerics(other),
    })?;
    let n = coords.rows();
    if n < 2 {
        return Err(WeightsError::TooFewObjects(n));
    }
    Ok(pairs(n)
        .into_iter()
        .map(|(j, k)| {
            let d2 = coords.row(j).iter().zip(coords.row(k)).fold(T::zero(), |acc, (a, b)| acc + (*a - *b) * (*a - *b));
            (-scale * d2).exp()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightModel<T> {
    /// One entry per characteristic; `None` for columns never observed.
    pub weights: Vec<Option<T>>,
    /// Characteristic indices that entered the fit.
    pub active_columns: Vec<usize>,
    /// `Fᵀ(F·w − t)` over the active columns.
    pub gradient: Vec<T>,
    pub residual_norm: T,
}

/// Non-negative least-squares fit of `targets` by sums of weights over the
/// shared characteristics. All-zero columns are left unlearned.
pub fn fit_weights<T: Real>(features: &PairFeatures, targets: &[T]) -> Result<WeightModel<T>, WeightsError> {
    fit_weights_with(features, targets, &NnlsOptions::default())
}

pub fn fit_weights_with<T: Real>(
    features: &PairFeatures,
    targets: &[T],
    options: &NnlsOptions,
) -> Result<WeightModel<T>, WeightsError> {
    let p = features.rows.len();
    if targets.len() != p {
        return Err(WeightsError::TargetCount(targets.len(), p));
    }
    if p == 0 {
        return Err(WeightsError::NoFeatures);
    }
    let h = features.rows[0].len();
    let active: Vec<usize> = (0..h).filter(|&c| features.rows.iter().any(|r| r[c])).collect();
    if active.is_empty() {
        return Err(WeightsError::NoFeatures);
    }
    let a = DenseMatrix::from_fn(p, active.len(), |i, k| if features.rows[i][active[k]] { T::one() } else { T::zero() });
    let sol = options.solve(&a, targets)?;
    let mut weights = vec![None; h];
    for (k, &c) in active.iter().enumerate() {
        weights[c] = Some(sol.x[k]);
    }
    Ok(WeightModel { weights, active_columns: active, gradient: sol.gradient, residual_norm: sol.residual_norm })
}

/// Sum of the weights of the set bits.
pub fn predict<T: Real>(model: &WeightModel<T>, row: &[bool]) -> Result<T, WeightsError> {
    if row.len() != model.weights.len() {
        return Err(WeightsError::RowLength { row: 0, expected: model.weights.len(), found: row.len() });
    }
    let mut total = T::zero();
    for (column, (&bit, w)) in row.iter().zip(&model.weights).enumerate() {
        if bit {
            total = total + w.ok_or(WeightsError::UnlearnedColumn { column })?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn fairy_tale() -> FeatureCoding {
        FeatureCoding::from_bit_strings(
            names(&["Hansel", "Witch", "Stepmother", "Gretel", "Father"]),
            &["00011110", "11100001", "11110000", "10010110", "01011010"],
        )
        .unwrap()
    }

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn pair_features() {
        let f = commonality_features(&fairy_tale()).unwrap();
        assert_eq!(f.rows.len(), 10);
        assert_eq!(f.pairs[0], (0, 1));
        assert_eq!(f.rows[0], bits("00000000"));
        assert_eq!(f.rows[4], bits("11100000"));
    }

    #[test]
    fn targets_and_fit() {
        let coords = DenseMatrix::<f64>::from_vec(5, 1, vec![0.67003, 0.10815, 0.0, 1.0, 0.27644]).unwrap();
        let t = similarity_targets(&coords, 10.0).unwrap();
        assert!((t[0] - 0.04254).abs() < 1e-4);
        assert!((t[4] - 0.88962).abs() < 1e-4);

        let f = commonality_features(&fairy_tale()).unwrap();
        let model = fit_weights(&f, &t).unwrap();
        assert_eq!(model.active_columns, (0..7).collect::<Vec<_>>());
        assert_eq!(model.weights[7], None);
        let expected = [0.00020, 0.60954, 0.27988, 0.0, 0.20711, 0.33130, 0.00532];
        for (w, e) in model.weights.iter().zip(expected) {
            assert!((w.unwrap() - e).abs() < 2e-4, "{:?}", model.weights);
        }
        assert!(matches!(predict(&model, &bits("00000001")), Err(WeightsError::UnlearnedColumn { column: 7 })));
        assert_eq!(predict(&model, &bits("00000000")).unwrap(), 0.0);
    }

    #[test]
    fn single_pair() {
        let f = PairFeatures { pairs: vec![(0, 1)], rows: vec![bits("100")] };
        let m = fit_weights(&f, &[0.5]).unwrap();
        assert_eq!(m.weights, vec![Some(0.5), None, None]);
    }

    #[test]
    fn identical_coordinates_give_unit_targets() {
        let coords = DenseMatrix::from_vec(3, 2, vec![0.3, 0.1, 0.3, 0.1, 0.3, 0.1]).unwrap();
        assert_eq!(similarity_targets(&coords, 10.0).unwrap(), vec![1.0; 3]);
        assert!(similarity_targets(&coords, 0.0).is_err());
    }
}
