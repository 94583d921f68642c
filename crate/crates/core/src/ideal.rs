//! Principal ideals generated by assumption relations.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::expr::{self, ExprError, Expression};
use crate::ring::{RingContext, RingElement, RingError};

/// Largest generator popcount accepted by [`ideal_elements`].
pub const MAX_IDEAL_ATOMS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error("relation list is empty")]
    NoRelations,
    #[error("ideal has 2^{atoms} elements, enumeration is limited to 2^{limit}")]
    TooLarge { atoms: usize, limit: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// An assumption: `lhs = 0` or `greater ≥ lesser`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Relation {
    Equation(Expression),
    Dominance { greater: Expression, lesser: Expression },
}

impl Relation {
    /// Left-hand side of the equivalent equation `lhs = 0`.
    pub fn lhs(&self) -> Expression {
        match self {
            Relation::Equation(lhs) => lhs.clone(),
            Relation::Dominance { greater, lesser } => dominance_to_equation(greater, lesser),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Equation(lhs) => write!(f, "{lhs} = 0"),
            Relation::Dominance { greater, lesser } => write!(f, "{greater} >= {lesser}"),
        }
    }
}

/// `greater ≥ lesser` is equivalent to `lesser ⊕ (greater ⊙ lesser) = 0`.
pub fn dominance_to_equation(greater: &Expression, lesser: &Expression) -> Expression {
    Expression::xor([lesser.clone(), Expression::and([greater.clone(), lesser.clone()])])
}

/// Union of the evaluated relation left-hand sides.
pub fn principal_generator(relations: &[Relation], ctx: &RingContext) -> Result<RingElement, IdealError> {
    if relations.is_empty() {
        return Err(IdealError::NoRelations);
    }
    let mut g = ctx.zero();
    for r in relations {
        let v = expr::eval(&r.lhs(), ctx, None::<&HashMap<String, RingElement>>)?;
        g = g.union(&v)?;
    }
    Ok(g)
}

/// `x ∈ ⟨g⟩`, i.e. `x ⊙ g = x`.
pub fn in_ideal(x: &RingElement, g: &RingElement) -> Result<bool, IdealError> {
    Ok(g.geq(x)?)
}

/// All multiples of `g`, ascending by atom mask.
pub fn ideal_elements(g: &RingElement) -> Result<Vec<RingElement>, IdealError> {
    let codes = g.atom_codes();
    if codes.len() > MAX_IDEAL_ATOMS {
        return Err(IdealError::TooLarge { atoms: codes.len(), limit: MAX_IDEAL_ATOMS });
    }
    let ctx = g.context();
    let mut out: Vec<RingElement> = (0u64..1 << codes.len())
        .map(|sub| ctx.from_atoms(codes.iter().enumerate().filter(|(i, _)| sub >> i & 1 == 1).map(|(_, &c)| c)))
        .collect();
    out.sort();
    Ok(out)
}

/// Coset representative `x ⊙ (1 ⊕ g)`.
pub fn residue(x: &RingElement, g: &RingElement) -> Result<RingElement, IdealError> {
    Ok(x.and(&g.complement())?)
}

/// Distinct nonzero residues of the atoms of unity, in atom order.
pub fn relevant_characteristics(relations: &[Relation], ctx: &RingContext) -> Result<Vec<RingElement>, IdealError> {
    let g = principal_generator(relations, ctx)?;
    let mut out: Vec<RingElement> = Vec::new();
    for atom in ctx.one().atoms() {
        let r = residue(&atom, &g)?;
        if !r.is_zero() && !out.contains(&r) {
            out.push(r);
        }
    }
    Ok(out)
}

/// Reads one relation per line: `EXPR = 0` or `EXPR >= EXPR`. `#` starts a
/// comment.
pub fn parse_relations(text: &str, ctx: &RingContext) -> Result<Vec<Relation>, IdealError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |e: ExprError| IdealError::Parse { line: i + 1, message: e.to_string() };
        let relation = if let Some((l, r)) = line.split_once(">=") {
            Relation::Dominance { greater: expr::parse(l, ctx).map_err(err)?, lesser: expr::parse(r, ctx).map_err(err)? }
        } else if let Some((l, r)) = line.split_once('=') {
            if r.trim() != "0" {
                return Err(IdealError::Parse { line: i + 1, message: "right-hand side of '=' must be 0".into() });
            }
            Relation::Equation(expr::parse(l, ctx).map_err(err)?)
        } else {
            return Err(IdealError::Parse { line: i + 1, message: "expected 'EXPR = 0' or 'EXPR >= EXPR'".into() });
        };
        out.push(relation);
    }
    if out.is_empty() {
        return Err(IdealError::NoRelations);
    }
    Ok(out)
}
