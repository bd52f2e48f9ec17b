//! Bounded universes of finite sets, relations and functions used by the
//! exhaustive checkers.

use crate::relation::{Function, Relation};
use crate::value::{FiniteSet, Value};

/// All subsets of size at most `bound` of the pool `{a0, ..., a(p-1)}`,
/// where `p = max(3, bound)`, ordered by size and then lexicographically.
#[derive(Clone, Debug)]
pub struct Universe {
    bound: usize,
    objects: Vec<FiniteSet>,
}

impl Universe {
    pub fn new(bound: usize) -> Self {
        let pool = bound.max(3);
        assert!(pool < 32, "universe pool too large");
        let mut objects: Vec<Vec<u32>> = (0u32..1 << pool)
            .filter(|m| m.count_ones() as usize <= bound)
            .map(|m| (0..pool as u32).filter(|i| m >> i & 1 == 1).collect())
            .collect();
        objects.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let objects = objects
            .into_iter()
            .map(|v| FiniteSet::new(v.into_iter().map(Value::atom)))
            .collect();
        Universe { bound, objects }
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn objects(&self) -> &[FiniteSet] {
        &self.objects
    }

    /// One representative set per size `0..=bound`.
    pub fn representatives(&self) -> Vec<FiniteSet> {
        (0..=self.bound as u32).map(FiniteSet::atoms).collect()
    }
}

/// Number of relations `X → Y`, if it fits in a `u64`.
pub fn relation_count(x: &FiniteSet, y: &FiniteSet) -> Option<u64> {
    let cells = x.len() * y.len();
    (cells < 64).then(|| 1u64 << cells)
}

/// All relations `X → Y` in ascending mask order. Requires `|X|·|Y| < 64`.
pub fn all_relations(x: &FiniteSet, y: &FiniteSet) -> impl Iterator<Item = Relation> {
    let count = relation_count(x, y).expect("too many relations to enumerate");
    let (x, y) = (x.clone(), y.clone());
    (0..count).map(move |m| Relation::from_mask(x.clone(), y.clone(), m))
}

/// All functions `X → Y` in mixed-radix order (first element varies slowest).
pub fn all_functions(x: &FiniteSet, y: &FiniteSet) -> impl Iterator<Item = Function> {
    let (x, y) = (x.clone(), y.clone());
    let (n, k) = (x.len(), y.len());
    let total: u64 = if k == 0 {
        u64::from(n == 0)
    } else {
        (k as u64).checked_pow(n as u32).expect("too many functions to enumerate")
    };
    (0..total).map(move |mut code| {
        let mut images = vec![0; n];
        for slot in images.iter_mut().rev() {
            *slot = (code % k as u64) as usize;
            code /= k as u64;
        }
        Function::from_indices(x.clone(), y.clone(), images).expect("indices in range")
    })
}
