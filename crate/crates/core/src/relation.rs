//! Finite relations, functions, and the Kleisli bridge to powersets.
//!
//! Composition is diagrammatic: `compose(R, S)` is `R;S`, first `R` then `S`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::functor::powerset;
use crate::value::{FiniteSet, Value};

/// Dense row-major bit matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    fn new(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        BitMatrix { rows, cols, words, data: vec![0; rows * words] }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize) {
        self.data[i * self.words + j / 64] |= 1 << (j % 64);
    }

    #[inline]
    fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.words..(i + 1) * self.words]
    }

    fn row_ones(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i).iter().enumerate().flat_map(|(w, &bits)| {
            let mut b = bits;
            std::iter::from_fn(move || {
                if b == 0 {
                    None
                } else {
                    let t = b.trailing_zeros() as usize;
                    b &= b - 1;
                    Some(w * 64 + t)
                }
            })
        })
    }

    fn fill(&mut self) {
        for i in 0..self.rows {
            for j in 0..self.cols {
                self.set(i, j);
            }
        }
    }

    fn count(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// A binary relation `R ⊆ X × Y` between two finite sets.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    source: FiniteSet,
    target: FiniteSet,
    bits: BitMatrix,
}

impl Relation {
    pub fn empty(source: FiniteSet, target: FiniteSet) -> Self {
        let bits = BitMatrix::new(source.len(), target.len());
        Relation { source, target, bits }
    }

    pub fn full(source: FiniteSet, target: FiniteSet) -> Self {
        let mut r = Relation::empty(source, target);
        r.bits.fill();
        r
    }

    pub fn from_pairs<I>(source: FiniteSet, target: FiniteSet, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Value, Value)>,
    {
        let mut r = Relation::empty(source, target);
        for (x, y) in pairs {
            let i = r.source.index_of(&x).ok_or_else(|| {
                Error::contract(format!("{x} is not in the source set {}", r.source))
            })?;
            let j = r.target.index_of(&y).ok_or_else(|| {
                Error::contract(format!("{y} is not in the target set {}", r.target))
            })?;
            r.bits.set(i, j);
        }
        Ok(r)
    }

    /// Builds a relation by testing every pair of indices.
    pub fn from_index_fn(
        source: FiniteSet,
        target: FiniteSet,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Self {
        let mut r = Relation::empty(source, target);
        for i in 0..r.source.len() {
            for j in 0..r.target.len() {
                if f(i, j) {
                    r.bits.set(i, j);
                }
            }
        }
        r
    }

    /// Relation whose pair `(x_i, y_j)` is present iff bit `i * |Y| + j` of
    /// `mask` is set. Requires `|X| * |Y| <= 64`.
    pub fn from_mask(source: FiniteSet, target: FiniteSet, mask: u64) -> Self {
        let cols = target.len();
        assert!(source.len() * cols <= 64, "relation too large for a u64 mask");
        Relation::from_index_fn(source, target, |i, j| mask >> (i * cols + j) & 1 == 1)
    }

    /// Inverse of [`Relation::from_mask`]; `None` if the relation has more
    /// than 64 cells.
    pub fn mask(&self) -> Option<u64> {
        let cols = self.target.len();
        if self.source.len() * cols > 64 {
            return None;
        }
        let mut m = 0u64;
        for i in 0..self.source.len() {
            for j in self.bits.row_ones(i) {
                m |= 1 << (i * cols + j);
            }
        }
        Some(m)
    }

    pub fn source(&self) -> &FiniteSet {
        &self.source
    }

    pub fn target(&self) -> &FiniteSet {
        &self.target
    }

    pub fn contains(&self, x: &Value, y: &Value) -> bool {
        match (self.source.index_of(x), self.target.index_of(y)) {
            (Some(i), Some(j)) => self.bits.get(i, j),
            _ => false,
        }
    }

    #[inline]
    pub fn contains_idx(&self, i: usize, j: usize) -> bool {
        self.bits.get(i, j)
    }

    #[inline]
    pub fn insert_idx(&mut self, i: usize, j: usize) {
        self.bits.set(i, j);
    }

    pub fn insert(&mut self, x: &Value, y: &Value) -> Result<()> {
        let i = self
            .source
            .index_of(x)
            .ok_or_else(|| Error::contract(format!("{x} is not in the source set {}", self.source)))?;
        let j = self
            .target
            .index_of(y)
            .ok_or_else(|| Error::contract(format!("{y} is not in the target set {}", self.target)))?;
        self.bits.set(i, j);
        Ok(())
    }

    /// Target indices related to source index `i`.
    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.bits.row_ones(i)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Value, &Value)> + '_ {
        (0..self.source.len())
            .flat_map(move |i| self.bits.row_ones(i).map(move |j| (self.source.get(i), self.target.get(j))))
    }

    pub fn index_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.source.len()).flat_map(move |i| self.bits.row_ones(i).map(move |j| (i, j)))
    }

    pub fn len(&self) -> usize {
        self.bits.count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.data.iter().all(|&w| w == 0)
    }

    fn same_typing(&self, other: &Relation) -> bool {
        self.source == other.source && self.target == other.target
    }

    /// Inclusion as sets of pairs.
    pub fn is_subset_of(&self, other: &Relation) -> bool {
        if self.same_typing(other) {
            self.bits.data.iter().zip(&other.bits.data).all(|(a, b)| a & !b == 0)
        } else {
            self.pairs().all(|(x, y)| other.contains(x, y))
        }
    }

    /// First pair (in index order) of `self` missing from `other`.
    pub fn first_excess(&self, other: &Relation) -> Option<(Value, Value)> {
        self.pairs()
            .find(|(x, y)| !other.contains(x, y))
            .map(|(x, y)| (x.clone(), y.clone()))
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation> {
        self.check_typing(other, "intersection")?;
        let mut r = self.clone();
        for (a, b) in r.bits.data.iter_mut().zip(&other.bits.data) {
            *a &= b;
        }
        Ok(r)
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        self.check_typing(other, "union")?;
        let mut r = self.clone();
        for (a, b) in r.bits.data.iter_mut().zip(&other.bits.data) {
            *a |= b;
        }
        Ok(r)
    }

    fn check_typing(&self, other: &Relation, op: &str) -> Result<()> {
        if self.same_typing(other) {
            Ok(())
        } else {
            Err(Error::contract(format!("{op} of relations with different source/target sets")))
        }
    }

    /// Every source element has a successor.
    pub fn is_total(&self) -> bool {
        (0..self.source.len()).all(|i| self.bits.row(i).iter().any(|&w| w != 0))
    }

    /// Every target element has a predecessor.
    pub fn is_surjective(&self) -> bool {
        let mut acc = vec![0u64; self.bits.words];
        for i in 0..self.source.len() {
            for (a, b) in acc.iter_mut().zip(self.bits.row(i)) {
                *a |= b;
            }
        }
        (0..self.target.len()).all(|j| acc[j / 64] >> (j % 64) & 1 == 1)
    }

    /// The relation viewed as a finite set of pair values.
    pub fn as_set(&self) -> FiniteSet {
        FiniteSet::new(self.pairs().map(|(x, y)| Value::pair(x.clone(), y.clone())))
    }

    /// Preimage of `self` under `f × g`: `{(a, b) | (f a, g b) ∈ self}`.
    pub fn pullback(&self, f: &Function, g: &Function) -> Result<Relation> {
        if f.target() != &self.source || g.target() != &self.target {
            return Err(Error::contract("pullback along functions with mismatched targets"));
        }
        Ok(Relation::from_index_fn(f.source().clone(), g.source().clone(), |i, j| {
            self.bits.get(f.image_index(i), g.image_index(j))
        }))
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (x, y)) in self.pairs().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "({x},{y})")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {} -> {}", self, self.source, self.target)
    }
}

/// A total function between finite sets, stored as target indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Function {
    source: FiniteSet,
    target: FiniteSet,
    images: Vec<u32>,
}

impl Function {
    pub fn new(source: FiniteSet, target: FiniteSet, mut f: impl FnMut(&Value) -> Value) -> Result<Self> {
        let mut images = Vec::with_capacity(source.len());
        for x in &source {
            let y = f(x);
            let j = target.index_of(&y).ok_or_else(|| {
                Error::contract(format!("image {y} of {x} lies outside the target set"))
            })?;
            images.push(j as u32);
        }
        Ok(Function { source, target, images })
    }

    pub fn try_new(
        source: FiniteSet,
        target: FiniteSet,
        mut f: impl FnMut(&Value) -> Result<Value>,
    ) -> Result<Self> {
        let mut images = Vec::with_capacity(source.len());
        for x in &source {
            let y = f(x)?;
            let j = target.index_of(&y).ok_or_else(|| {
                Error::contract(format!("image {y} of {x} lies outside the target set"))
            })?;
            images.push(j as u32);
        }
        Ok(Function { source, target, images })
    }

    pub fn from_indices(source: FiniteSet, target: FiniteSet, images: Vec<usize>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::contract("function is not defined on every source element"));
        }
        if images.iter().any(|&j| j >= target.len()) {
            return Err(Error::contract("function image index out of range"));
        }
        let images = images.into_iter().map(|j| j as u32).collect();
        Ok(Function { source, target, images })
    }

    pub fn identity(x: FiniteSet) -> Self {
        let images = (0..x.len() as u32).collect();
        Function { source: x.clone(), target: x, images }
    }

    pub fn source(&self) -> &FiniteSet {
        &self.source
    }

    pub fn target(&self) -> &FiniteSet {
        &self.target
    }

    pub fn apply(&self, x: &Value) -> Option<&Value> {
        self.source.index_of(x).map(|i| self.image(i))
    }

    #[inline]
    pub fn image(&self, i: usize) -> &Value {
        self.target.get(self.images[i] as usize)
    }

    #[inline]
    pub fn image_index(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &Function) -> Result<Function> {
        if self.target != g.source {
            return Err(Error::contract("composing functions whose target and source differ"));
        }
        let images = self.images.iter().map(|&j| g.images[j as usize]).collect();
        Ok(Function { source: self.source.clone(), target: g.target.clone(), images })
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        self.images.iter().all(|&j| !std::mem::replace(&mut seen[j as usize], true))
    }
}

impl fmt::Display for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for i in 0..self.source.len() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}->{}", self.source.get(i), self.image(i))?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {} -> {}", self, self.source, self.target)
    }
}

/// `R;S = {(x, z) | ∃y. x R y ∧ y S z}`.
pub fn compose(r: &Relation, s: &Relation) -> Result<Relation> {
    if r.target != s.source {
        return Err(Error::contract(format!(
            "cannot compose: target {} of the first relation differs from source {} of the second",
            r.target, s.source
        )));
    }
    let mut out = Relation::empty(r.source.clone(), s.target.clone());
    let w = out.bits.words;
    for i in 0..r.source.len() {
        for j in r.bits.row_ones(i) {
            let (dst, src) = (i * w, s.bits.row(j));
            for (k, word) in src.iter().enumerate() {
                out.bits.data[dst + k] |= word;
            }
        }
    }
    Ok(out)
}

pub fn converse(r: &Relation) -> Relation {
    let mut out = Relation::empty(r.target.clone(), r.source.clone());
    for (i, j) in r.index_pairs() {
        out.bits.set(j, i);
    }
    out
}

pub fn graph(f: &Function) -> Relation {
    let mut r = Relation::empty(f.source.clone(), f.target.clone());
    for (i, &j) in f.images.iter().enumerate() {
        r.bits.set(i, j as usize);
    }
    r
}

pub fn diagonal(x: &FiniteSet) -> Relation {
    graph(&Function::identity(x.clone()))
}

type MembershipCache = RwLock<HashMap<FiniteSet, Arc<Relation>>>;
static MEMBERSHIP: Lazy<MembershipCache> = Lazy::new(Default::default);

/// The membership relation `∋_X : PX ⇸ X`.
pub fn membership(x: &FiniteSet) -> Result<Relation> {
    membership_shared(x).map(|r| (*r).clone())
}

pub(crate) fn membership_shared(x: &FiniteSet) -> Result<Arc<Relation>> {
    if let Some(r) = MEMBERSHIP.read().unwrap().get(x) {
        return Ok(r.clone());
    }
    let px = powerset(x)?;
    let mut r = Relation::empty(px.clone(), x.clone());
    for (i, a) in px.iter().enumerate() {
        for e in a.as_set().expect("powerset elements are sets") {
            r.bits.set(i, x.index_of(e).expect("subset of x"));
        }
    }
    let r = Arc::new(r);
    MEMBERSHIP.write().unwrap().insert(x.clone(), r.clone());
    Ok(r)
}

/// The Kleisli morphism `χ_R : X → PY`.
pub fn to_kleisli(r: &Relation) -> Result<Function> {
    let py = powerset(&r.target)?;
    Function::new(r.source.clone(), py, |x| {
        let i = r.source.index_of(x).expect("source element");
        r.target.subset_value(r.successors(i))
    })
}

/// The relation `⌊f⌋ : X ⇸ Y` of a Kleisli morphism `f : X → PY`.
pub fn from_kleisli(f: &Function, codomain: &FiniteSet) -> Result<Relation> {
    let mut r = Relation::empty(f.source.clone(), codomain.clone());
    for i in 0..f.source.len() {
        let image = f.image(i);
        let elems = image
            .as_set()
            .ok_or_else(|| Error::contract(format!("image {image} is not a set")))?;
        for y in elems {
            let j = codomain.index_of(y).ok_or_else(|| {
                Error::contract(format!("image {image} is not a subset of {codomain}"))
            })?;
            r.bits.set(i, j);
        }
    }
    Ok(r)
}

/// The converse Kleisli morphism `f♭ : Y → PX, y ↦ {x | y ∈ f(x)}`.
pub fn flat(f: &Function, codomain: &FiniteSet) -> Result<Function> {
    to_kleisli(&converse(&from_kleisli(f, codomain)?))
}

/// Output of [`totalize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Totalization {
    pub source: FiniteSet,
    pub target: FiniteSet,
    pub relation: Relation,
    pub inject_source: Function,
    pub inject_target: Function,
}

/// Completes `R : X ⇸ Y` to a total and surjective `R* : X* ⇸ Y*` by adding
/// a fresh point on both sides.
pub fn totalize(r: &Relation) -> Totalization {
    let star = Value::fresh();
    let xs = FiniteSet::new(r.source.iter().cloned().chain([star.clone()]));
    let ys = FiniteSet::new(r.target.iter().cloned().chain([star.clone()]));
    let mut pairs: Vec<(Value, Value)> = r.pairs().map(|(x, y)| (x.clone(), y.clone())).collect();
    for (i, x) in r.source.iter().enumerate() {
        if r.successors(i).next().is_none() {
            pairs.push((x.clone(), star.clone()));
        }
    }
    let inverse = converse(r);
    for (j, y) in r.target.iter().enumerate() {
        if inverse.successors(j).next().is_none() {
            pairs.push((star.clone(), y.clone()));
        }
    }
    pairs.push((star.clone(), star));
    let relation = Relation::from_pairs(xs.clone(), ys.clone(), pairs).expect("pairs lie in X* × Y*");
    let inject_source = Function::new(r.source.clone(), xs.clone(), Value::clone).expect("X ⊆ X*");
    let inject_target = Function::new(r.target.clone(), ys.clone(), Value::clone).expect("Y ⊆ Y*");
    Totalization { source: xs, target: ys, relation, inject_source, inject_target }
}
