//! Finite restrictions of set endofunctors, the powerset monad, and natural
//! transformations between the registered functors.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::RwLock;

use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::relation::Function;
use crate::value::{FiniteSet, Value};

/// Default upper bound on the size of any enumerated carrier.
pub const DEFAULT_CARRIER_LIMIT: usize = 65_536;

/// Environment variable overriding [`DEFAULT_CARRIER_LIMIT`].
pub const CARRIER_LIMIT_ENV: &str = "RELIFT_CARRIER_LIMIT";

static CARRIER_LIMIT: Lazy<AtomicUsize> = Lazy::new(|| {
    let limit = std::env::var(CARRIER_LIMIT_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_CARRIER_LIMIT);
    AtomicUsize::new(limit)
});

pub fn carrier_limit() -> usize {
    CARRIER_LIMIT.load(Ordering::Relaxed)
}

/// Overrides the carrier limit for the whole process.
pub fn set_carrier_limit(limit: usize) {
    CARRIER_LIMIT.store(limit, Ordering::Relaxed);
}

fn pow2(n: usize) -> Option<usize> {
    (n < usize::BITS as usize - 1).then(|| 1usize << n)
}

fn describe_pow2(n: usize) -> String {
    pow2(n).map_or_else(|| format!("2^{n}"), |s| s.to_string())
}

pub(crate) fn ensure_within_limit(what: impl FnOnce() -> String, size: Option<usize>, size_text: impl FnOnce() -> String) -> Result<()> {
    let limit = carrier_limit();
    match size {
        Some(s) if s <= limit => Ok(()),
        _ => Err(Error::CarrierLimit { what: what(), size: size_text(), limit }),
    }
}

/// A registered set endofunctor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Functor {
    Identity,
    /// Constant functor onto `{a0, ..., a(k-1)}`.
    Constant(u32),
    /// Covariant powerset `P`.
    Powerset,
    /// Neighbourhood functor `N`, acting on maps by inverse images.
    Neighbourhood,
    /// Monotone neighbourhood functor `M`: up-closed neighbourhood systems.
    MonotoneNeighbourhood,
}

impl fmt::Display for Functor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Functor::Identity => f.write_str("Id"),
            Functor::Constant(k) => write!(f, "Const({k})"),
            Functor::Powerset => f.write_str("P"),
            Functor::Neighbourhood => f.write_str("N"),
            Functor::MonotoneNeighbourhood => f.write_str("M"),
        }
    }
}

impl FromStr for Functor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "Id" => Ok(Functor::Identity),
            "P" => Ok(Functor::Powerset),
            "N" => Ok(Functor::Neighbourhood),
            "M" => Ok(Functor::MonotoneNeighbourhood),
            _ => s
                .strip_prefix("Const(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|k| k.trim().parse().ok())
                .map(Functor::Constant)
                .ok_or_else(|| Error::Parse(format!("unknown functor '{s}' (expected P, N, M, Id or Const(k))"))),
        }
    }
}

/// Larger carriers are recomputed on demand rather than kept.
const CACHED_CARRIER_MAX: usize = 4096;

type CarrierCache = RwLock<HashMap<(Functor, FiniteSet), FiniteSet>>;
static CARRIERS: Lazy<CarrierCache> = Lazy::new(Default::default);

/// `PX`, enumerated in canonical order.
pub fn powerset(x: &FiniteSet) -> Result<FiniteSet> {
    Functor::Powerset.carrier(x)
}

impl Functor {
    /// Number of elements of `F X` for `|X| = n`, or `None` if it does not
    /// fit in a `usize`. For `M` this is the size of the `N` carrier it is
    /// filtered from.
    pub fn enumeration_size(&self, n: usize) -> Option<usize> {
        match self {
            Functor::Identity => Some(n),
            Functor::Constant(k) => Some(*k as usize),
            Functor::Powerset => pow2(n),
            Functor::Neighbourhood | Functor::MonotoneNeighbourhood => pow2(n).and_then(pow2),
        }
    }

    fn enumeration_size_text(&self, n: usize) -> String {
        match self {
            Functor::Powerset => describe_pow2(n),
            Functor::Neighbourhood | Functor::MonotoneNeighbourhood => match pow2(n) {
                Some(m) => describe_pow2(m),
                None => format!("2^(2^{n})"),
            },
            _ => self.enumeration_size(n).unwrap_or(0).to_string(),
        }
    }

    /// Fails with a resource error if `F X` for `|X| = n` is too large.
    pub fn ensure_carrier_fits(&self, n: usize) -> Result<()> {
        ensure_within_limit(
            || format!("{self} over a {n}-element set"),
            self.enumeration_size(n),
            || self.enumeration_size_text(n),
        )
    }

    /// Canonical enumeration of `F X`.
    pub fn carrier(&self, x: &FiniteSet) -> Result<FiniteSet> {
        self.ensure_carrier_fits(x.len())?;
        let key = (*self, x.clone());
        if let Some(c) = CARRIERS.read().unwrap().get(&key) {
            return Ok(c.clone());
        }
        let c = match self {
            Functor::Identity => x.clone(),
            Functor::Constant(k) => FiniteSet::atoms(*k),
            Functor::Powerset => {
                let mut subsets: Vec<Value> = (0..1u64 << x.len()).map(|m| x.value_of_mask(m)).collect();
                subsets.sort_unstable();
                FiniteSet::from_sorted(subsets)
            }
            Functor::Neighbourhood => neighbourhood_carrier(x, false)?,
            Functor::MonotoneNeighbourhood => neighbourhood_carrier(x, true)?,
        };
        if c.len() <= CACHED_CARRIER_MAX {
            CARRIERS.write().unwrap().insert(key, c.clone());
        }
        Ok(c)
    }

    /// Membership of `v` in `F X`, decided without enumerating the carrier.
    pub fn is_element(&self, x: &FiniteSet, v: &Value) -> bool {
        match self {
            Functor::Identity => x.contains(v),
            Functor::Constant(k) => v.as_atom().is_some_and(|i| i < *k),
            Functor::Powerset => is_subset_value(x, v),
            Functor::Neighbourhood => v.as_set().is_some_and(|fam| fam.iter().all(|u| is_subset_value(x, u))),
            Functor::MonotoneNeighbourhood => {
                Functor::Neighbourhood.is_element(x, v) && first_up_closure_gap(x, v).is_none()
            }
        }
    }

    /// `(F f)(a)` for a single element `a ∈ F X`.
    pub fn apply(&self, f: &Function, a: &Value) -> Result<Value> {
        match self {
            Functor::Identity => f
                .apply(a)
                .cloned()
                .ok_or_else(|| Error::contract(format!("{a} is not in the domain {}", f.source()))),
            Functor::Constant(k) => {
                if self.is_element(f.source(), a) {
                    Ok(a.clone())
                } else {
                    Err(Error::contract(format!("{a} is not in Const({k})")))
                }
            }
            Functor::Powerset => {
                let idx = subset_indices(f.source(), a)?;
                let mut img: Vec<usize> = idx.into_iter().map(|i| f.image_index(i)).collect();
                img.sort_unstable();
                img.dedup();
                Ok(f.target().subset_value(img))
            }
            Functor::Neighbourhood => inverse_image_action(f, a),
            Functor::MonotoneNeighbourhood => {
                let out = inverse_image_action(f, a)?;
                if let Some((u, v)) = first_up_closure_gap(f.target(), &out) {
                    return Err(Error::Invariant(format!(
                        "M action produced {out}, which is not up-closed ({u} ⊊ {v})"
                    )));
                }
                Ok(out)
            }
        }
    }

    /// `F f : F X → F Y`.
    pub fn fmap(&self, f: &Function) -> Result<Function> {
        let fx = self.carrier(f.source())?;
        let fy = self.carrier(f.target())?;
        Function::try_new(fx, fy, |a| self.apply(f, a))
    }
}

fn is_subset_value(x: &FiniteSet, v: &Value) -> bool {
    v.as_set().is_some_and(|s| s.iter().all(|e| x.contains(e)))
}

fn subset_indices(x: &FiniteSet, v: &Value) -> Result<Vec<usize>> {
    let elems = v
        .as_set()
        .ok_or_else(|| Error::contract(format!("{v} is not a set")))?;
    elems
        .iter()
        .map(|e| {
            x.index_of(e)
                .ok_or_else(|| Error::contract(format!("{v} is not a subset of {x}")))
        })
        .collect()
}

/// First pair `u ⊊ u ∪ {y}` witnessing that `family` is not up-closed in `PX`.
pub fn first_up_closure_gap(x: &FiniteSet, family: &Value) -> Option<(Value, Value)> {
    let fam = family.as_set()?;
    for u in fam {
        for y in x {
            if !u.has_element(y) {
                let bigger = Value::set(u.as_set()?.iter().cloned().chain([y.clone()]));
                if fam.binary_search(&bigger).is_err() {
                    return Some((u.clone(), bigger));
                }
            }
        }
    }
    None
}

fn neighbourhood_carrier(x: &FiniteSet, up_closed_only: bool) -> Result<FiniteSet> {
    let px = powerset(x)?;
    let m = px.len();
    // supersets[i]: mask over indices of PX of the supersets of px[i]
    let masks: Vec<u64> = px.iter().map(|u| x.mask_of(u)).collect::<Result<_>>()?;
    let supersets: Vec<u64> = masks
        .iter()
        .map(|&a| {
            masks
                .iter()
                .enumerate()
                .filter(|&(_, &b)| a & b == a)
                .fold(0u64, |acc, (j, _)| acc | 1 << j)
        })
        .collect();
    let mut out = Vec::new();
    for fam in 0..1u64 << m {
        if up_closed_only && (0..m).any(|i| fam >> i & 1 == 1 && supersets[i] & !fam != 0) {
            continue;
        }
        out.push(px.value_of_mask(fam));
    }
    out.sort_unstable();
    Ok(FiniteSet::from_sorted(out))
}

/// `(N f) U = {v ⊆ Y | f⁻¹(v) ∈ U}`.
///
/// For each `u ∈ U`, the `v` with `f⁻¹(v) = u` are exactly `f[u] ∪ s` with
/// `s ⊆ Y \ f[X]`, provided `f[u]` and `f[X \ u]` are disjoint.
fn inverse_image_action(f: &Function, a: &Value) -> Result<Value> {
    let (x, y) = (f.source(), f.target());
    let fam = a
        .as_set()
        .ok_or_else(|| Error::contract(format!("{a} is not a neighbourhood system")))?;
    let mut hit = vec![false; y.len()];
    for i in 0..x.len() {
        hit[f.image_index(i)] = true;
    }
    let free: Vec<usize> = (0..y.len()).filter(|&j| !hit[j]).collect();
    if !fam.is_empty() {
        ensure_within_limit(
            || format!("inverse-image action into a {}-element set", y.len()),
            pow2(free.len()),
            || describe_pow2(free.len()),
        )?;
    }
    let mut out = Vec::new();
    for u in fam {
        let inside = subset_indices(x, u)?;
        let mut in_u = vec![false; x.len()];
        for &i in &inside {
            in_u[i] = true;
        }
        let mut image = vec![0u8; y.len()]; // bit 0: hit from u, bit 1: hit from X \ u
        for i in 0..x.len() {
            image[f.image_index(i)] |= if in_u[i] { 1 } else { 2 };
        }
        if image.contains(&3) {
            continue;
        }
        for s in 0..1u64 << free.len() {
            let mut chosen: Vec<usize> = (0..y.len()).filter(|&j| image[j] == 1).collect();
            chosen.extend(free.iter().enumerate().filter(|&(k, _)| s >> k & 1 == 1).map(|(_, &j)| j));
            chosen.sort_unstable();
            out.push(y.subset_value(chosen));
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(Value::set_from_sorted(out))
}

/// Unit of the powerset monad, `x ↦ {x}`.
pub fn pow_unit(x: &FiniteSet) -> Result<Function> {
    let px = powerset(x)?;
    Function::new(x.clone(), px, |v| Value::set_from_sorted(vec![v.clone()]))
}

/// Multiplication of the powerset monad, `𝒜 ↦ ⋃𝒜`.
pub fn pow_mult(x: &FiniteSet) -> Result<Function> {
    let px = powerset(x)?;
    let ppx = powerset(&px)?;
    Function::new(ppx, px, |fam| {
        Value::set(fam.as_set().into_iter().flatten().flat_map(|u| u.as_set().unwrap_or(&[]).to_vec()))
    })
}

/// A natural transformation between registered functors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NatTrans {
    Identity(Functor),
    /// The subfunctor inclusion `ι : M ⇒ N`.
    Inclusion,
}

impl NatTrans {
    pub fn source_functor(&self) -> Functor {
        match self {
            NatTrans::Identity(f) => *f,
            NatTrans::Inclusion => Functor::MonotoneNeighbourhood,
        }
    }

    pub fn target_functor(&self) -> Functor {
        match self {
            NatTrans::Identity(f) => *f,
            NatTrans::Inclusion => Functor::Neighbourhood,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NatTrans::Identity(_) => "id",
            NatTrans::Inclusion => "iota",
        }
    }

    pub fn is_injective(&self) -> bool {
        true
    }

    /// `η_X(a)`.
    pub fn apply(&self, x: &FiniteSet, a: &Value) -> Result<Value> {
        if !self.source_functor().is_element(x, a) {
            return Err(Error::contract(format!("{a} is not in {}({x})", self.source_functor())));
        }
        let out = a.clone();
        if !self.target_functor().is_element(x, &out) {
            return Err(Error::contract(format!(
                "component image {out} lies outside {}({x})",
                self.target_functor()
            )));
        }
        Ok(out)
    }

    /// The component `η_X : F X → G X`.
    pub fn component(&self, x: &FiniteSet) -> Result<Function> {
        let fx = self.source_functor().carrier(x)?;
        let gx = self.target_functor().carrier(x)?;
        Function::try_new(fx, gx, |a| self.apply(x, a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::{compose, graph, membership};
    use crate::universe::all_functions;

    const ALL: [Functor; 6] = [
        Functor::Identity,
        Functor::Constant(2),
        Functor::Constant(0),
        Functor::Powerset,
        Functor::Neighbourhood,
        Functor::MonotoneNeighbourhood,
    ];

    fn sets(max: u32) -> Vec<FiniteSet> {
        (0..=max).map(FiniteSet::atoms).collect()
    }

    /// Up-closed families of PX by brute force over all families.
    fn up_closed_count(n: u32) -> usize {
        let subsets: Vec<u64> = (0..1u64 << n).collect();
        (0..1u64 << subsets.len())
            .filter(|fam| {
                subsets.iter().all(|&u| {
                    fam >> u & 1 == 0 || subsets.iter().all(|&w| w & u != u || fam >> w & 1 == 1)
                })
            })
            .count()
    }

    #[test]
    fn names_round_trip() {
        for f in ALL {
            assert_eq!(f.to_string().parse::<Functor>().unwrap(), f);
        }
        assert!("Q".parse::<Functor>().is_err());
    }

    #[test]
    fn carrier_sizes() {
        let x2 = FiniteSet::atoms(2);
        let p = Functor::Powerset.carrier(&x2).unwrap();
        assert_eq!(p.to_string(), "{{},{a0},{a0,a1},{a1}}");
        assert_eq!(p.len(), 4);
        assert_eq!(Functor::Neighbourhood.carrier(&x2).unwrap().len(), 16);
        assert_eq!(up_closed_count(2), 6);
        assert_eq!(Functor::MonotoneNeighbourhood.carrier(&x2).unwrap().len(), 6);
        assert_eq!(up_closed_count(1), 3);
        assert_eq!(Functor::MonotoneNeighbourhood.carrier(&FiniteSet::atoms(1)).unwrap().len(), 3);
        assert_eq!(Functor::MonotoneNeighbourhood.carrier(&FiniteSet::atoms(3)).unwrap().len(), up_closed_count(3));
    }

    #[test]
    fn carrier_limit_is_enforced() {
        let err = Functor::Neighbourhood.carrier(&FiniteSet::atoms(5)).unwrap_err();
        assert!(err.is_resource());
        assert!(err.to_string().contains("65536"));
    }

    #[test]
    fn carrier_is_deterministic_and_matches_is_element() {
        for f in ALL {
            for x in sets(2) {
                let c = f.carrier(&x).unwrap();
                assert_eq!(c, f.carrier(&x).unwrap());
                assert!(c.iter().all(|v| f.is_element(&x, v)));
            }
        }
    }

    #[test]
    fn powerset_image_of_empty_set() {
        for x in sets(2) {
            for y in sets(2) {
                for f in all_functions(&x, &y) {
                    assert_eq!(Functor::Powerset.apply(&f, &Value::empty_set()).unwrap(), Value::empty_set());
                }
            }
        }
    }

    #[test]
    fn neighbourhood_action_on_constant_map() {
        // X = {a0,a1}, 2 = {a, b} encoded as {a10, a11}; the constant map to a.
        let x = FiniteSet::atoms(2);
        let two = FiniteSet::new([Value::atom(10), Value::atom(11)]);
        let (a, b) = (Value::atom(10), Value::atom(11));
        let c = Function::new(x.clone(), two, |_| a.clone()).unwrap();
        let u = Value::set([x.to_value(), Value::set([Value::atom(0)])]);
        let expected = Value::set([Value::set([a.clone()]), Value::set([a.clone(), b.clone()])]);
        assert_eq!(Functor::Neighbourhood.apply(&c, &u).unwrap(), expected);
        let u = Value::set([Value::empty_set()]);
        let expected = Value::set([Value::empty_set(), Value::set([b])]);
        assert_eq!(Functor::Neighbourhood.apply(&c, &u).unwrap(), expected);
    }

    #[test]
    fn neighbourhood_action_matches_definition() {
        // brute force: {v ⊆ Y | f⁻¹(v) ∈ U}
        for x in sets(2) {
            for y in sets(2) {
                let py = powerset(&y).unwrap();
                for f in all_functions(&x, &y) {
                    for u in Functor::Neighbourhood.carrier(&x).unwrap().iter() {
                        let expected = Value::set(py.iter().filter(|v| {
                            let pre = Value::set(x.iter().filter(|e| v.has_element(f.apply(e).unwrap())).cloned());
                            u.has_element(&pre)
                        }).cloned());
                        assert_eq!(Functor::Neighbourhood.apply(&f, u).unwrap(), expected);
                    }
                }
            }
        }
    }

    #[test]
    fn constant_maps_only_see_empty_and_full() {
        for x in sets(2).into_iter().skip(1) {
            let two = FiniteSet::atoms(2);
            for target in two.iter() {
                let c = Function::new(x.clone(), two.clone(), |_| target.clone()).unwrap();
                let mut by_signature: HashMap<(bool, bool), Value> = HashMap::new();
                for u in Functor::Neighbourhood.carrier(&x).unwrap().iter() {
                    let sig = (u.has_element(&Value::empty_set()), u.has_element(&x.to_value()));
                    let img = Functor::Neighbourhood.apply(&c, u).unwrap();
                    let prev = by_signature.entry(sig).or_insert_with(|| img.clone());
                    assert_eq!(prev, &img);
                }
            }
        }
    }

    #[test]
    fn functor_laws() {
        for f in ALL {
            let max = if f == Functor::Powerset || f == Functor::Identity { 3 } else { 2 };
            for x in sets(max) {
                assert_eq!(f.fmap(&Function::identity(x.clone())).unwrap(), Function::identity(f.carrier(&x).unwrap()));
                for y in sets(max) {
                    for z in sets(max) {
                        for g in all_functions(&x, &y) {
                            let fg = f.fmap(&g).unwrap();
                            for h in all_functions(&y, &z) {
                                let lhs = f.fmap(&g.then(&h).unwrap()).unwrap();
                                let rhs = fg.then(&f.fmap(&h).unwrap()).unwrap();
                                assert_eq!(lhs, rhs, "{f} fails composition");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn monad_laws() {
        for x in sets(2) {
            let unit = pow_unit(&x).unwrap();
            let px = powerset(&x).unwrap();
            let mult = pow_mult(&x).unwrap();
            let id = Function::identity(px.clone());
            // μ ∘ Pη = id = μ ∘ ηP
            assert_eq!(Functor::Powerset.fmap(&unit).unwrap().then(&mult).unwrap(), id);
            assert_eq!(pow_unit(&px).unwrap().then(&mult).unwrap(), id);
            // μ ∘ Pμ = μ ∘ μP
            let lhs = Functor::Powerset.fmap(&mult).unwrap().then(&mult).unwrap();
            let rhs = pow_mult(&px).unwrap().then(&mult).unwrap();
            assert_eq!(lhs, rhs);
            // ⌊η⌋ = Δ and gr(μ);∋ = ∋;∋
            assert_eq!(crate::relation::from_kleisli(&unit, &x).unwrap(), crate::relation::diagonal(&x));
            let left = compose(&graph(&mult), &membership(&x).unwrap()).unwrap();
            let right = compose(&membership(&px).unwrap(), &membership(&x).unwrap()).unwrap();
            assert_eq!(left, right);
        }
        let x = FiniteSet::atoms(2);
        let fam = Value::set([Value::set([Value::atom(0)]), Value::set([Value::atom(1)])]);
        assert_eq!(pow_mult(&x).unwrap().apply(&fam).unwrap(), &x.to_value());
        assert_eq!(pow_mult(&x).unwrap().apply(&Value::empty_set()).unwrap(), &Value::empty_set());
    }

    #[test]
    fn inclusion_is_natural_and_injective() {
        let iota = NatTrans::Inclusion;
        let c = iota.component(&FiniteSet::atoms(2)).unwrap();
        assert_eq!(c.source().len(), 6);
        assert_eq!(c.target().len(), 16);
        assert!(c.is_injective());
        for x in sets(2) {
            for y in sets(2) {
                let (ix, iy) = (iota.component(&x).unwrap(), iota.component(&y).unwrap());
                for f in all_functions(&x, &y) {
                    let lhs = ix.then(&Functor::Neighbourhood.fmap(&f).unwrap()).unwrap();
                    let rhs = Functor::MonotoneNeighbourhood.fmap(&f).unwrap().then(&iy).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
        let id = NatTrans::Identity(Functor::Powerset);
        let x = FiniteSet::atoms(2);
        assert_eq!(id.component(&x).unwrap(), Function::identity(powerset(&x).unwrap()));
    }

    #[test]
    fn inclusion_rejects_non_monotone_input() {
        let x = FiniteSet::atoms(2);
        let not_up = Value::set([Value::set([Value::atom(0)])]);
        assert!(NatTrans::Inclusion.apply(&x, &not_up).is_err());
    }
}
