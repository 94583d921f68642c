//! Free Boolean ring on `m` basic objects.
//!
//! An element is stored as the set of atoms it contains. The atom for a
//! non-empty generator subset `S` (encoded as `s = Σ_{k∈S} 2^k`) is the
//! region inside every generator of `S` and outside all others; it occupies
//! bit `s − 1` of the mask. `⊕` is XOR of masks, `⊙` is AND, and unity is
//! the union of all generators (the full mask), giving `2^(2^m − 1)`
//! elements.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

/// Largest supported number of generators.
pub const MAX_GENERATORS: usize = 24;
/// Largest ring that may be enumerated element by element.
pub const MAX_ENUMERABLE_GENERATORS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("at least one generator is required")]
    NoGenerators,
    #[error("{0} generators requested; at most {MAX_GENERATORS} are supported")]
    TooManyGenerators(usize),
    #[error("invalid generator name {0:?}")]
    InvalidName(String),
    #[error("duplicate generator name {0:?}")]
    DuplicateName(String),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("elements belong to different rings")]
    ContextMismatch,
    #[error("ring on {generators} generators is too large to enumerate (limit {limit})")]
    TooLarge { generators: usize, limit: usize },
}

#[derive(Debug)]
struct ContextInner {
    names: Vec<String>,
}

/// The generator alphabet of a free Boolean ring. Cheap to clone.
#[derive(Debug, Clone)]
pub struct RingContext(Arc<ContextInner>);

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl RingContext {
    pub fn new<I, S>(names: I) -> Result<Self, RingError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(RingError::NoGenerators);
        }
        if names.len() > MAX_GENERATORS {
            return Err(RingError::TooManyGenerators(names.len()));
        }
        for (i, n) in names.iter().enumerate() {
            if !is_identifier(n) {
                return Err(RingError::InvalidName(n.clone()));
            }
            if names[..i].contains(n) {
                return Err(RingError::DuplicateName(n.clone()));
            }
        }
        Ok(Self(Arc::new(ContextInner { names })))
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    /// Number of generators `m`.
    pub fn len(&self) -> usize {
        self.0.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `2^m − 1`.
    pub fn atom_count(&self) -> usize {
        (1usize << self.len()) - 1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.names.iter().position(|n| n == name)
    }

    pub fn zero(&self) -> RingElement {
        RingElement { ctx: self.clone(), mask: AtomMask::empty(self.atom_count()) }
    }

    /// Union of all generators, the multiplicative unit.
    pub fn one(&self) -> RingElement {
        RingElement { ctx: self.clone(), mask: AtomMask::full(self.atom_count()) }
    }

    pub fn generator(&self, name: &str) -> Result<RingElement, RingError> {
        let k = self.index_of(name).ok_or_else(|| RingError::UnknownGenerator(name.to_string()))?;
        Ok(self.generator_at(k))
    }

    /// Generator by 0-based index. Panics if out of range.
    pub fn generator_at(&self, k: usize) -> RingElement {
        assert!(k < self.len(), "generator index out of range");
        let mut mask = AtomMask::empty(self.atom_count());
        for s in 1..=self.atom_count() {
            if s >> k & 1 == 1 {
                mask.set(s - 1);
            }
        }
        RingElement { ctx: self.clone(), mask }
    }

    /// The atom for subset code `s` (`1 ≤ s ≤ 2^m − 1`).
    pub fn atom(&self, s: usize) -> RingElement {
        assert!(s >= 1 && s <= self.atom_count(), "subset code out of range");
        let mut mask = AtomMask::empty(self.atom_count());
        mask.set(s - 1);
        RingElement { ctx: self.clone(), mask }
    }

    /// The product of the generators in subset `t`; `t = 0` yields unity.
    pub fn monomial(&self, t: usize) -> RingElement {
        let mut mask = AtomMask::empty(self.atom_count());
        for s in 1..=self.atom_count() {
            if s & t == t {
                mask.set(s - 1);
            }
        }
        RingElement { ctx: self.clone(), mask }
    }

    /// Element from atom subset codes.
    pub fn from_atoms(&self, codes: impl IntoIterator<Item = usize>) -> RingElement {
        let mut mask = AtomMask::empty(self.atom_count());
        for s in codes {
            assert!(s >= 1 && s <= self.atom_count(), "subset code out of range");
            mask.set(s - 1);
        }
        RingElement { ctx: self.clone(), mask }
    }

    /// Element from the low `2^m − 1` bits of `bits`; only for `m ≤ 6`.
    pub fn from_bits(&self, bits: u64) -> RingElement {
        assert!(self.len() <= 6, "from_bits requires at most 6 generators");
        let n = self.atom_count();
        let trimmed = if n == 64 { bits } else { bits & ((1u64 << n) - 1) };
        RingElement { ctx: self.clone(), mask: AtomMask { len: n, words: vec![trimmed] } }
    }

    /// XOR of the monomials with the given subset codes (`0` is the constant 1).
    pub fn from_monomials(&self, codes: impl IntoIterator<Item = usize>) -> RingElement {
        codes.into_iter().fold(self.zero(), |acc, t| {
            let mut mask = acc.mask;
            mask.xor_assign(&self.monomial(t).mask);
            RingElement { ctx: self.clone(), mask }
        })
    }

    fn check_enumerable(&self) -> Result<(), RingError> {
        if self.len() > MAX_ENUMERABLE_GENERATORS {
            Err(RingError::TooLarge { generators: self.len(), limit: MAX_ENUMERABLE_GENERATORS })
        } else {
            Ok(())
        }
    }
}

impl PartialEq for RingContext {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.names == other.0.names
    }
}

impl Eq for RingContext {}

impl Hash for RingContext {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.names.hash(state);
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct AtomMask {
    len: usize,
    words: Vec<u64>,
}

impl AtomMask {
    fn empty(len: usize) -> Self {
        Self { len, words: vec![0; len.div_ceil(64)] }
    }

    fn full(len: usize) -> Self {
        let mut m = Self { len, words: vec![u64::MAX; len.div_ceil(64)] };
        m.trim();
        m
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    fn get(&self, bit: usize) -> bool {
        self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    fn set(&mut self, bit: usize) {
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    fn xor_assign(&mut self, other: &Self) {
        self.words.iter_mut().zip(&other.words).for_each(|(a, b)| *a ^= b);
    }

    fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + b)
                }
            })
        })
    }

    /// Numeric comparison of the masks read as binary integers.
    fn cmp_value(&self, other: &Self) -> Ordering {
        self.words.iter().rev().cmp(other.words.iter().rev())
    }
}

/// A ring element: a set of atoms of a [`RingContext`].
#[derive(Clone)]
pub struct RingElement {
    ctx: RingContext,
    mask: AtomMask,
}

impl RingElement {
    pub fn context(&self) -> &RingContext {
        &self.ctx
    }

    fn same_ring(&self, other: &Self) -> Result<(), RingError> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(RingError::ContextMismatch)
        }
    }

    fn combine(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Result<Self, RingError> {
        self.same_ring(other)?;
        let words = self.mask.words.iter().zip(&other.mask.words).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { ctx: self.ctx.clone(), mask: AtomMask { len: self.mask.len, words } })
    }

    /// `x ⊕ y`, symmetric difference.
    pub fn xor(&self, other: &Self) -> Result<Self, RingError> {
        self.combine(other, |a, b| a ^ b)
    }

    /// `x ⊙ y`, intersection.
    pub fn and(&self, other: &Self) -> Result<Self, RingError> {
        self.combine(other, |a, b| a & b)
    }

    /// `x ⊕ y ⊕ (x ⊙ y)`.
    pub fn union(&self, other: &Self) -> Result<Self, RingError> {
        self.combine(other, |a, b| a | b)
    }

    /// `1 ⊕ x`.
    pub fn complement(&self) -> Self {
        let mut mask = self.mask.clone();
        mask.words.iter_mut().for_each(|w| *w = !*w);
        mask.trim();
        Self { ctx: self.ctx.clone(), mask }
    }

    /// `self ≥ other`, i.e. `other = self ⊙ other`.
    pub fn geq(&self, other: &Self) -> Result<bool, RingError> {
        self.same_ring(other)?;
        Ok(self.mask.words.iter().zip(&other.mask.words).all(|(&a, &b)| b & !a == 0))
    }

    pub fn is_zero(&self) -> bool {
        self.mask.words.iter().all(|&w| w == 0)
    }

    pub fn is_one(&self) -> bool {
        self.mask == AtomMask::full(self.mask.len)
    }

    /// Number of atoms below this element.
    pub fn atom_count(&self) -> usize {
        self.mask.count()
    }

    pub fn is_atom(&self) -> bool {
        self.atom_count() == 1
    }

    pub fn contains_atom(&self, s: usize) -> bool {
        s >= 1 && s <= self.mask.len && self.mask.get(s - 1)
    }

    /// Subset codes of the atoms, ascending.
    pub fn atom_codes(&self) -> Vec<usize> {
        self.mask.ones().map(|b| b + 1).collect()
    }

    /// One single-atom element per atom, ascending by subset code.
    pub fn atoms(&self) -> Vec<RingElement> {
        self.atom_codes().into_iter().map(|s| self.ctx.atom(s)).collect()
    }

    /// Number of ring elements `y` with `self ≥ y`, i.e. `2^popcount`.
    pub fn geq_degree(&self) -> BigUint {
        BigUint::one() << self.atom_count()
    }

    /// Subset codes of the monomials in the XOR-of-products normal form
    /// (algebraic normal form), ascending. Never contains the constant 1.
    pub fn monomial_codes(&self) -> Vec<usize> {
        let size = 1usize << self.ctx.len();
        let mut coeff = vec![false; size];
        for b in self.mask.ones() {
            coeff[b + 1] = true;
        }
        // c_T = XOR of mask(S) over S ⊆ T
        for k in 0..self.ctx.len() {
            let bit = 1 << k;
            for t in 0..size {
                if t & bit != 0 && coeff[t ^ bit] {
                    coeff[t] = !coeff[t];
                }
            }
        }
        (1..size).filter(|&t| coeff[t]).collect()
    }

    /// Mask as an integer; only for `m ≤ 6`.
    pub fn to_bits(&self) -> u64 {
        assert!(self.ctx.len() <= 6, "to_bits requires at most 6 generators");
        self.mask.words[0]
    }
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.mask == other.mask
    }
}

impl Eq for RingElement {}

impl Hash for RingElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ctx.hash(state);
        self.mask.hash(state);
    }
}

impl PartialOrd for RingElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by context, then by atom mask read as an integer.
impl Ord for RingElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ctx
            .names()
            .cmp(other.ctx.names())
            .then_with(|| self.mask.cmp_value(&other.mask))
    }
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingElement{:?}", self.atom_codes())
    }
}

/// Short product notation over generator names, e.g. `b+c+a*b`; `0` for zero.
impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.ctx.names();
        let mut codes = self.monomial_codes();
        codes.sort_by(|&a, &b| monomial_order(a, b));
        if codes.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in codes.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            let vars: Vec<&str> = (0..names.len()).filter(|k| t >> k & 1 == 1).map(|k| names[k].as_str()).collect();
            write!(f, "{}", vars.join("*"))?;
        }
        Ok(())
    }
}

/// Monomial order: ascending degree, then lexicographic on generator indices.
pub fn monomial_order(a: usize, b: usize) -> Ordering {
    let idx = |t: usize| (0..usize::BITS as usize).filter(|k| t >> k & 1 == 1).collect::<Vec<_>>();
    a.count_ones().cmp(&b.count_ones()).then_with(|| idx(a).cmp(&idx(b)))
}

/// All `2^(2^m − 1)` elements, ascending by atom mask.
pub fn enumerate_ring(ctx: &RingContext) -> Result<Vec<RingElement>, RingError> {
    ctx.check_enumerable()?;
    let total = 1u64 << ctx.atom_count();
    Ok((0..total).map(|bits| ctx.from_bits(bits)).collect())
}

/// All elements in normal-form order: by number of monomials, then by the
/// monomial lists under [`monomial_order`]. For two generators this is the
/// numbering `0, A, B, A⊙B, A⊕B, A⊕A⊙B, B⊕A⊙B, A⊕B⊕A⊙B`.
pub fn enumerate_normal_form_order(ctx: &RingContext) -> Result<Vec<RingElement>, RingError> {
    let mut all: Vec<(Vec<usize>, RingElement)> = enumerate_ring(ctx)?
        .into_iter()
        .map(|e| {
            let mut codes = e.monomial_codes();
            codes.sort_by(|&a, &b| monomial_order(a, b));
            (codes, e)
        })
        .collect();
    all.sort_by(|(a, _), (b, _)| {
        a.len().cmp(&b.len()).then_with(|| {
            a.iter()
                .zip(b)
                .map(|(&x, &y)| monomial_order(x, y))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    });
    Ok(all.into_iter().map(|(_, e)| e).collect())
}
