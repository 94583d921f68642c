//! Comparison formulas over ring generators.
//!
//! Grammar (whitespace insignificant, `^` is an alias for `+`):
//!
//! ```text
//! expr   := term (('+'|'^') term)* ;
//! term   := factor ('*' factor)* ;
//! factor := '~' factor | IDENT | '0' | '1' | '(' expr ')' ;
//! ```
//!
//! `+` is `⊕`, `*` is `⊙` and `~x` is sugar for `1 + x`. Juxtaposition is not
//! accepted, so `ab` is a single identifier.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::ring::{is_identifier, RingContext, RingElement, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier {name:?} at position {position}")]
    UnknownIdentifier { name: String, position: usize },
    #[error("variable {0:?} is not bound")]
    Unbound(String),
    #[error("binding for {0:?} belongs to a different ring")]
    BindingMismatch(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Abstract syntax tree. `Xor` and `And` hold at least two children.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expression {
    Zero,
    One,
    Var(String),
    Xor(Vec<Expression>),
    And(Vec<Expression>),
}

impl Expression {
    pub fn var(name: impl Into<String>) -> Self {
        Expression::Var(name.into())
    }

    /// n-ary `⊕`, flattening nested sums. An empty list is `0`, a single
    /// child is returned unchanged.
    pub fn xor(children: impl IntoIterator<Item = Expression>) -> Self {
        let mut out = Vec::new();
        for c in children {
            match c {
                Expression::Xor(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Expression::Zero,
            1 => out.pop().unwrap(),
            _ => Expression::Xor(out),
        }
    }

    /// n-ary `⊙`, flattening nested products. An empty list is `1`.
    pub fn and(children: impl IntoIterator<Item = Expression>) -> Self {
        let mut out = Vec::new();
        for c in children {
            match c {
                Expression::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Expression::One,
            1 => out.pop().unwrap(),
            _ => Expression::And(out),
        }
    }

    /// `1 ⊕ x`.
    pub fn complement(x: Expression) -> Self {
        Expression::xor([Expression::One, x])
    }

    /// `x ⊕ y ⊕ (x ⊙ y)`.
    pub fn union(x: Expression, y: Expression) -> Self {
        let prod = Expression::And(vec![x.clone(), y.clone()]);
        Expression::xor([x, y, prod])
    }

    /// Parses without checking identifiers against a ring.
    pub fn parse(text: &str) -> Result<Self, ExprError> {
        Parser::new(text)?.parse_all(None)
    }

    /// Variable names in first-occurrence order.
    pub fn variables(&self) -> Vec<String> {
        fn walk(e: &Expression, out: &mut Vec<String>) {
            match e {
                Expression::Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                Expression::Xor(cs) | Expression::And(cs) => cs.iter().for_each(|c| walk(c, out)),
                Expression::Zero | Expression::One => {}
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

/// Parses `text`, requiring every identifier to be a generator of `ctx`.
pub fn parse(text: &str, ctx: &RingContext) -> Result<Expression, ExprError> {
    Parser::new(text)?.parse_all(Some(ctx))
}

/// Evaluates bottom-up. Unbound variables default to the generator of the
/// same name.
pub fn eval(
    e: &Expression,
    ctx: &RingContext,
    bindings: Option<&HashMap<String, RingElement>>,
) -> Result<RingElement, ExprError> {
    if let Some(b) = bindings {
        if let Some((name, _)) = b.iter().find(|(_, v)| v.context() != ctx) {
            return Err(ExprError::BindingMismatch(name.clone()));
        }
    }
    eval_inner(e, ctx, bindings)
}

fn eval_inner(
    e: &Expression,
    ctx: &RingContext,
    bindings: Option<&HashMap<String, RingElement>>,
) -> Result<RingElement, ExprError> {
    Ok(match e {
        Expression::Zero => ctx.zero(),
        Expression::One => ctx.one(),
        Expression::Var(name) => match bindings.and_then(|b| b.get(name)) {
            Some(v) => v.clone(),
            None => ctx.generator(name).map_err(|_| ExprError::Unbound(name.clone()))?,
        },
        Expression::Xor(cs) => {
            let mut acc = ctx.zero();
            for c in cs {
                acc = acc.xor(&eval_inner(c, ctx, bindings)?)?;
            }
            acc
        }
        Expression::And(cs) => {
            let mut acc = ctx.one();
            for c in cs {
                acc = acc.and(&eval_inner(c, ctx, bindings)?)?;
            }
            acc
        }
    })
}

/// Number of binary `⊕`/`⊙` applications.
pub fn cost(e: &Expression) -> usize {
    match e {
        Expression::Zero | Expression::One | Expression::Var(_) => 0,
        Expression::Xor(cs) | Expression::And(cs) => cs.len() - 1 + cs.iter().map(cost).sum::<usize>(),
    }
}

/// Fully distributed XOR-of-AND form.
pub fn expand(e: &Expression) -> CanonicalPolynomial {
    match e {
        Expression::Zero => CanonicalPolynomial::zero(),
        Expression::One => CanonicalPolynomial::one(),
        Expression::Var(v) => CanonicalPolynomial::variable(v),
        Expression::Xor(cs) => cs.iter().fold(CanonicalPolynomial::zero(), |acc, c| acc.add(&expand(c))),
        Expression::And(cs) => cs.iter().fold(CanonicalPolynomial::one(), |acc, c| acc.mul(&expand(c))),
    }
}

/// True iff both expressions have the same normal form.
pub fn equivalent(e1: &Expression, e2: &Expression) -> bool {
    expand(e1) == expand(e2)
}

/// A product of distinct variables; the empty product is the constant 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(BTreeSet<String>);

impl Monomial {
    pub fn new<I, S>(vars: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Monomial(vars.into_iter().map(Into::into).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.union(&other.0).cloned().collect())
    }
}

/// Ascending degree, then lexicographic on the sorted variable names.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.iter().cmp(other.0.iter()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "1")
        } else {
            let v: Vec<&str> = self.variables().collect();
            write!(f, "{}", v.join("*"))
        }
    }
}

/// XOR of distinct monomials (`A⊕A = 0` and `A⊙A = A` applied).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct CanonicalPolynomial(BTreeSet<Monomial>);

impl CanonicalPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self(BTreeSet::from([Monomial(BTreeSet::new())]))
    }

    pub fn variable(name: &str) -> Self {
        Self(BTreeSet::from([Monomial::new([name])]))
    }

    pub fn from_monomials(monomials: impl IntoIterator<Item = Monomial>) -> Self {
        monomials.into_iter().fold(Self::zero(), |mut acc, m| {
            acc.toggle(m);
            acc
        })
    }

    /// Normal form of a ring element over its generator names.
    pub fn from_element(x: &RingElement) -> Self {
        let names = x.context().names();
        Self(
            x.monomial_codes()
                .into_iter()
                .map(|t| Monomial((0..names.len()).filter(|k| t >> k & 1 == 1).map(|k| names[k].clone()).collect()))
                .collect(),
        )
    }

    fn toggle(&mut self, m: Monomial) {
        if !self.0.remove(&m) {
            self.0.insert(m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.0.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.symmetric_difference(&other.0).cloned().collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for a in &self.0 {
            for b in &other.0 {
                out.toggle(a.times(b));
            }
        }
        out
    }

    pub fn to_expression(&self) -> Expression {
        Expression::xor(self.0.iter().map(|m| {
            if m.0.is_empty() {
                Expression::One
            } else {
                Expression::and(m.0.iter().map(Expression::var))
            }
        }))
    }
}

impl fmt::Display for CanonicalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("+"))
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Zero => write!(f, "0"),
            Expression::One => write!(f, "1"),
            Expression::Var(v) => write!(f, "{v}"),
            Expression::Xor(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    match c {
                        Expression::Xor(_) => write!(f, "({c})")?,
                        _ => write!(f, "{c}")?,
                    }
                }
                Ok(())
            }
            Expression::And(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    match c {
                        Expression::Xor(_) | Expression::And(_) => write!(f, "({c})")?,
                        _ => write!(f, "{c}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Zero,
    One,
    Plus,
    Star,
    Tilde,
    LParen,
    RParen,
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ExprError> {
        let mut tokens = Vec::new();
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut i = 0;
        while i < chars.len() {
            let (at, c) = chars[i];
            let single = match c {
                c if c.is_whitespace() => {
                    i += 1;
                    continue;
                }
                '+' | '^' => Some(Token::Plus),
                '*' => Some(Token::Star),
                '~' => Some(Token::Tilde),
                '(' => Some(Token::LParen),
                ')' => Some(Token::RParen),
                '0' => Some(Token::Zero),
                '1' => Some(Token::One),
                _ => None,
            };
            if let Some(t) = single {
                tokens.push((at, t));
                i += 1;
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                let name: String = chars[start..i].iter().map(|(_, c)| c).collect();
                debug_assert!(is_identifier(&name));
                tokens.push((at, Token::Ident(name)));
                continue;
            }
            return Err(ExprError::Syntax { position: at, message: format!("unexpected character {c:?}") });
        }
        Ok(Self { tokens, pos: 0, end: text.len() })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn position(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error(&self, message: impl Into<String>) -> ExprError {
        ExprError::Syntax { position: self.position(), message: message.into() }
    }

    fn parse_all(mut self, ctx: Option<&RingContext>) -> Result<Expression, ExprError> {
        if self.tokens.is_empty() {
            return Err(self.error("empty expression"));
        }
        let e = self.expr(ctx)?;
        if self.pos != self.tokens.len() {
            return Err(self.error("unexpected trailing input"));
        }
        Ok(e)
    }

    fn expr(&mut self, ctx: Option<&RingContext>) -> Result<Expression, ExprError> {
        let mut terms = vec![self.term(ctx)?];
        while self.peek() == Some(&Token::Plus) {
            self.pos += 1;
            terms.push(self.term(ctx)?);
        }
        Ok(Expression::xor(terms))
    }

    fn term(&mut self, ctx: Option<&RingContext>) -> Result<Expression, ExprError> {
        let mut factors = vec![self.factor(ctx)?];
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            factors.push(self.factor(ctx)?);
        }
        Ok(Expression::and(factors))
    }

    fn factor(&mut self, ctx: Option<&RingContext>) -> Result<Expression, ExprError> {
        let at = self.position();
        let tok = self.peek().cloned().ok_or_else(|| self.error("unexpected end of input"))?;
        self.pos += 1;
        match tok {
            Token::Tilde => Ok(Expression::complement(self.factor(ctx)?)),
            Token::Zero => Ok(Expression::Zero),
            Token::One => Ok(Expression::One),
            Token::Ident(name) => {
                if let Some(ctx) = ctx {
                    if ctx.index_of(&name).is_none() {
                        return Err(ExprError::UnknownIdentifier { name, position: at });
                    }
                }
                Ok(Expression::Var(name))
            }
            Token::LParen => {
                let inner = self.expr(ctx)?;
                if self.peek() != Some(&Token::RParen) {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            other => {
                self.pos -= 1;
                Err(self.error(format!("unexpected token {other:?}")))
            }
        }
    }
}
