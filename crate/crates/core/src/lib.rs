//! Boolean ring calculus for comparing objects.
//!
//! The crate codes a finite set of basic objects as generators of a free
//! Boolean ring, evaluates comparison formulas built from `⊕` (symmetric
//! difference) and `⊙` (intersection), reduces assumption systems to a
//! principal ideal, analyses the subset order through committor functions,
//! sorts objects from expert rating matrices with a sorted Schur
//! decomposition, and learns non-negative characteristic weights.
//!
//! Numeric code is generic over the scalar type; the aliases at the crate
//! root fix the common `f64` and exact rational instantiations.

pub mod expr;
pub mod ideal;
pub mod numerics;
pub mod order_laplacian;
pub mod ring;
pub mod scalar;
pub mod spectral;
pub mod weights;

pub use expr::{CanonicalPolynomial, ExprError, Expression, Monomial};
pub use ideal::{IdealError, Relation};
pub use numerics::{DenseMatrix, NumericsError};
pub use order_laplacian::{ComparisonGraph, GraphError};
pub use ring::{enumerate_normal_form_order, enumerate_ring, RingContext, RingElement, RingError};
pub use spectral::{RatingMatrix, SortResult, SpectralError, SymmetryCheck};
pub use weights::{FeatureCoding, PairFeatures, WeightModel, WeightsError};
pub use scalar::{Real, Scalar};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

/// Double-precision dense matrix.
pub type Matrix = DenseMatrix<f64>;
/// Dense matrix over exact rationals.
pub type ExactMatrix = DenseMatrix<Rational>;
/// Rating matrix over `f64`.
pub type Ratings = RatingMatrix<f64>;
/// Sorting result over `f64`.
pub type Sorting = SortResult<f64>;
/// Learned weights over `f64`.
pub type Weights = WeightModel<f64>;
