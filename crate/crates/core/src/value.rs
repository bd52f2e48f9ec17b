//! Canonical finite values and finite sets.
//!
//! Everything the toolkit manipulates (states, subsets, neighbourhood
//! systems, pairs of a relation viewed as a set) is a [`Value`]. Values have a
//! single canonical form, so structural equality is semantic equality and
//! sets of values deduplicate for free.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A hereditarily finite value built from numbered atoms.
///
/// The derived order is the canonical total order: atoms by index, then
/// pairs lexicographically, then sets lexicographically by their element
/// lists, with `Atom < Pair < Set`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Atom(u32),
    Pair(Arc<(Value, Value)>),
    /// Strictly increasing, duplicate-free element list.
    Set(Arc<[Value]>),
}

/// Atom index reserved for fresh points; never part of a user universe.
pub const FRESH_ATOM: u32 = u32::MAX;

impl Value {
    pub fn atom(index: u32) -> Self {
        Value::Atom(index)
    }

    pub fn fresh() -> Self {
        Value::Atom(FRESH_ATOM)
    }

    pub fn pair(first: Value, second: Value) -> Self {
        Value::Pair(Arc::new((first, second)))
    }

    /// Builds a set, sorting and deduplicating the elements.
    pub fn set<I: IntoIterator<Item = Value>>(elements: I) -> Self {
        let mut v: Vec<Value> = elements.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Value::Set(v.into())
    }

    /// Builds a set from elements already in canonical order.
    pub(crate) fn set_from_sorted(elements: Vec<Value>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        Value::Set(elements.into())
    }

    pub fn empty_set() -> Self {
        Value::Set(Arc::from(Vec::new()))
    }

    pub fn as_atom(&self) -> Option<u32> {
        match self {
            Value::Atom(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&Value, &Value)> {
        match self {
            Value::Pair(p) => Some((&p.0, &p.1)),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&[Value]> {
        match self {
            Value::Set(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_set(&self) -> bool {
        matches!(self, Value::Set(_))
    }

    /// Membership test; `false` for non-set values.
    pub fn has_element(&self, v: &Value) -> bool {
        self.as_set().is_some_and(|s| s.binary_search(v).is_ok())
    }

    /// Subset test between two set values; `false` if either is not a set.
    pub fn is_subset_of(&self, other: &Value) -> bool {
        match (self.as_set(), other.as_set()) {
            (Some(a), Some(b)) => sorted_subset(a, b),
            _ => false,
        }
    }
}

pub(crate) fn sorted_subset(a: &[Value], b: &[Value]) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let mut it = b.iter();
    'outer: for x in a {
        for y in it.by_ref() {
            match y.cmp(x) {
                std::cmp::Ordering::Less => continue,
                std::cmp::Ordering::Equal => continue 'outer,
                std::cmp::Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Atom(i) => write!(f, "a{i}"),
            Value::Pair(p) => write!(f, "({},{})", p.0, p.1),
            Value::Set(s) => write_set(f, s),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn write_set(f: &mut fmt::Formatter<'_>, s: &[Value]) -> fmt::Result {
    f.write_str("{")?;
    for (i, v) in s.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{v}")?;
    }
    f.write_str("}")
}

impl FromStr for Value {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let v = p.value()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::Parse(format!("trailing input at offset {}", p.pos)));
        }
        Ok(v)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!("expected '{}' at offset {}", c as char, self.pos)))
        }
    }

    fn value(&mut self) -> Result<Value> {
        self.skip_ws();
        match self.src.get(self.pos) {
            Some(b'a') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                digits
                    .parse::<u32>()
                    .map(Value::Atom)
                    .map_err(|_| Error::Parse(format!("bad atom index at offset {start}")))
            }
            Some(b'(') => {
                self.pos += 1;
                let a = self.value()?;
                self.expect(b',')?;
                let b = self.value()?;
                self.expect(b')')?;
                Ok(Value::pair(a, b))
            }
            Some(b'{') => {
                self.pos += 1;
                let mut elems = Vec::new();
                self.skip_ws();
                if self.src.get(self.pos) == Some(&b'}') {
                    self.pos += 1;
                    return Ok(Value::empty_set());
                }
                loop {
                    elems.push(self.value()?);
                    self.skip_ws();
                    match self.src.get(self.pos) {
                        Some(b',') => self.pos += 1,
                        Some(b'}') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(Error::Parse(format!("expected ',' or '}}' at offset {}", self.pos))),
                    }
                }
                Ok(Value::set(elems))
            }
            _ => Err(Error::Parse(format!("unexpected input at offset {}", self.pos))),
        }
    }
}

/// A finite set of values in canonical order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteSet(Arc<[Value]>);

impl FiniteSet {
    pub fn new<I: IntoIterator<Item = Value>>(elements: I) -> Self {
        let mut v: Vec<Value> = elements.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        FiniteSet(v.into())
    }

    pub(crate) fn from_sorted(elements: Vec<Value>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        FiniteSet(elements.into())
    }

    pub fn empty() -> Self {
        FiniteSet(Arc::from(Vec::new()))
    }

    /// The set `{a0, ..., a(n-1)}`.
    pub fn atoms(n: u32) -> Self {
        FiniteSet((0..n).map(Value::Atom).collect::<Vec<_>>().into())
    }

    /// Interprets a set value as a finite set.
    pub fn from_value(v: &Value) -> Option<Self> {
        match v {
            Value::Set(s) => Some(FiniteSet(s.clone())),
            _ => None,
        }
    }

    /// The set itself as a value (an element of some powerset).
    pub fn to_value(&self) -> Value {
        Value::Set(self.0.clone())
    }

    pub fn elements(&self) -> &[Value] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Value> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, index: usize) -> &Value {
        &self.0[index]
    }

    pub fn index_of(&self, v: &Value) -> Option<usize> {
        self.0.binary_search(v).ok()
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.index_of(v).is_some()
    }

    pub fn is_subset_of(&self, other: &FiniteSet) -> bool {
        sorted_subset(&self.0, &other.0)
    }

    pub fn union(&self, other: &FiniteSet) -> FiniteSet {
        FiniteSet::new(self.iter().chain(other.iter()).cloned())
    }

    /// The subset value consisting of the elements at `indices` (ascending).
    pub(crate) fn subset_value(&self, indices: impl IntoIterator<Item = usize>) -> Value {
        Value::set_from_sorted(indices.into_iter().map(|i| self.0[i].clone()).collect())
    }

    /// Bitmask of a subset value, for sets of at most 64 elements.
    pub(crate) fn mask_of(&self, subset: &Value) -> Result<u64> {
        if self.len() > 64 {
            return Err(Error::contract(format!(
                "set of {} elements is too large for a bitmask view",
                self.len()
            )));
        }
        let elems = subset
            .as_set()
            .ok_or_else(|| Error::contract(format!("{subset} is not a set")))?;
        let mut m = 0u64;
        for e in elems {
            let i = self
                .index_of(e)
                .ok_or_else(|| Error::contract(format!("{e} is not an element of {self}")))?;
            m |= 1 << i;
        }
        Ok(m)
    }

    /// Subset value for a bitmask (inverse of [`FiniteSet::mask_of`]).
    pub(crate) fn value_of_mask(&self, mask: u64) -> Value {
        self.subset_value((0..self.len()).filter(|i| mask >> i & 1 == 1))
    }
}

impl fmt::Display for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_set(f, &self.0)
    }
}

impl fmt::Debug for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<'a> IntoIterator for &'a FiniteSet {
    type Item = &'a Value;
    type IntoIter = std::slice::Iter<'a, Value>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl FromIterator<Value> for FiniteSet {
    fn from_iter<T: IntoIterator<Item = Value>>(iter: T) -> Self {
        FiniteSet::new(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_value() -> impl Strategy<Value = Value> {
        let leaf = (0u32..5).prop_map(Value::Atom);
        leaf.prop_recursive(3, 24, 4, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Value::pair(a, b)),
                prop::collection::vec(inner, 0..4).prop_map(Value::set),
            ]
        })
    }

    #[test]
    fn kinds_are_ordered_atom_pair_set() {
        let a = Value::atom(7);
        let p = Value::pair(Value::atom(0), Value::atom(0));
        let s = Value::empty_set();
        assert!(a < p && p < s);
    }

    #[test]
    fn sets_deduplicate_and_sort() {
        let s = Value::set([Value::atom(2), Value::atom(0), Value::atom(2)]);
        assert_eq!(s.to_string(), "{a0,a2}");
    }

    #[test]
    fn text_encoding() {
        let v = Value::set([
            Value::pair(Value::atom(0), Value::atom(1)),
            Value::empty_set(),
            Value::atom(3),
        ]);
        assert_eq!(v.to_string(), "{a3,(a0,a1),{}}");
        assert_eq!("{ a3 , (a0,a1), {} }".parse::<Value>().unwrap(), v);
        assert!("{a1".parse::<Value>().is_err());
        assert!("b1".parse::<Value>().is_err());
    }

    #[test]
    fn subset_checks() {
        let x = FiniteSet::atoms(3);
        let s = Value::set([Value::atom(0), Value::atom(2)]);
        assert!(s.is_subset_of(&x.to_value()));
        assert!(!x.to_value().is_subset_of(&s));
        assert_eq!(x.mask_of(&s).unwrap(), 0b101);
        assert_eq!(x.value_of_mask(0b101), s);
    }

    proptest! {
        #[test]
        fn text_round_trip(v in arb_value()) {
            let text = v.to_string();
            prop_assert_eq!(text.parse::<Value>().unwrap(), v);
        }

        #[test]
        fn set_elements_strictly_increase(v in arb_value()) {
            fn check(v: &Value) -> bool {
                match v {
                    Value::Atom(_) => true,
                    Value::Pair(p) => check(&p.0) && check(&p.1),
                    Value::Set(s) => s.windows(2).all(|w| w[0] < w[1]) && s.iter().all(check),
                }
            }
            prop_assert!(check(&v));
        }
    }
}
