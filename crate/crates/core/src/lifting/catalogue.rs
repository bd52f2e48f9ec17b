use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::rho::RhoFormula;
use super::{Lifting, LiftingRef};
use crate::error::{Error, Result};
use crate::functor::Functor;
use crate::relation::{Function, Relation};
use crate::value::{FiniteSet, Value};

/// `F_⊤(R) = FX × FY`.
pub fn top_lift(functor: Functor) -> LiftingRef {
    Arc::new(Top { functor })
}

/// The Barr lifting, computed from the span of projections of `R`.
pub fn barr_lift(functor: Functor) -> LiftingRef {
    Arc::new(Barr { functor, cache: RwLock::default() })
}

/// The forth-only (simulation) lifting of `P`: `∀x∈u ∃y∈v. xRy`.
pub fn sim_lift() -> LiftingRef {
    Arc::new(Sim)
}

/// `M̃`, the forth-and-back lifting of the monotone neighbourhood functor.
pub fn mtilde_lift() -> LiftingRef {
    Arc::new(MTilde)
}

/// `L_J` for the set `J` of ρ-formulas given as a 4-bit mask.
pub fn lj_lift(mask: u8) -> Result<LiftingRef> {
    if mask > 15 {
        return Err(Error::contract(format!("LJ mask {mask} is not a 4-bit mask")));
    }
    Ok(Arc::new(Lj { mask }))
}

#[derive(Debug)]
struct Top {
    functor: Functor,
}

impl Lifting for Top {
    fn functor(&self) -> Functor {
        self.functor
    }

    fn name(&self) -> String {
        "top".into()
    }

    fn relates(&self, _: &Relation, _: &Value, _: &Value) -> Result<bool> {
        Ok(true)
    }

    fn lift(&self, r: &Relation) -> Result<Relation> {
        Ok(Relation::full(self.functor.carrier(r.source())?, self.functor.carrier(r.target())?))
    }
}

#[derive(Debug)]
struct Barr {
    functor: Functor,
    cache: RwLock<HashMap<Relation, Arc<Relation>>>,
}

/// Largest relation for which the `P` Barr lifting is computed by span
/// enumeration rather than pointwise.
const SPAN_PAIRS_LIMIT: usize = 16;

fn span_lift(functor: Functor, r: &Relation) -> Result<Relation> {
    let pairs = r.as_set();
    let first = Function::new(pairs.clone(), r.source().clone(), |p| p.as_pair().expect("pair").0.clone())?;
    let second = Function::new(pairs.clone(), r.target().clone(), |p| p.as_pair().expect("pair").1.clone())?;
    let spans = functor.carrier(&pairs)?;
    let fx = functor.carrier(r.source())?;
    let fy = functor.carrier(r.target())?;
    let mut out = Relation::empty(fx.clone(), fy.clone());
    for w in spans.iter() {
        let a = functor.apply(&first, w)?;
        let b = functor.apply(&second, w)?;
        let i = fx.index_of(&a).ok_or_else(|| Error::Invariant(format!("{a} outside {functor}{}", r.source())))?;
        let j = fy.index_of(&b).ok_or_else(|| Error::Invariant(format!("{b} outside {functor}{}", r.target())))?;
        out.insert_idx(i, j);
    }
    Ok(out)
}

fn element_indices(x: &FiniteSet, v: &Value) -> Result<Vec<usize>> {
    v.as_set()
        .ok_or_else(|| Error::contract(format!("{v} is not a set")))?
        .iter()
        .map(|e| x.index_of(e).ok_or_else(|| Error::contract(format!("{e} is not in {x}"))))
        .collect()
}

/// Egli–Milner relatedness of subsets, via the largest span `R ∩ (u × v)`.
fn powerset_barr(r: &Relation, u: &Value, v: &Value) -> Result<bool> {
    let us = element_indices(r.source(), u)?;
    let vs = element_indices(r.target(), v)?;
    let mut hit = vec![false; r.target().len()];
    for &i in &us {
        let mut any = false;
        for &j in &vs {
            if r.contains_idx(i, j) {
                any = true;
                hit[j] = true;
            }
        }
        if !any {
            return Ok(false);
        }
    }
    Ok(vs.iter().all(|&j| hit[j]))
}

impl Barr {
    fn cached_lift(&self, r: &Relation) -> Result<Arc<Relation>> {
        if let Some(l) = self.cache.read().unwrap().get(r) {
            return Ok(l.clone());
        }
        let l = Arc::new(span_lift(self.functor, r)?);
        self.cache.write().unwrap().insert(r.clone(), l.clone());
        Ok(l)
    }
}

impl Lifting for Barr {
    fn functor(&self) -> Functor {
        self.functor
    }

    fn name(&self) -> String {
        "barr".into()
    }

    fn relates(&self, r: &Relation, a: &Value, b: &Value) -> Result<bool> {
        match self.functor {
            Functor::Powerset => powerset_barr(r, a, b),
            Functor::Identity => Ok(r.contains(a, b)),
            _ => Ok(self.cached_lift(r)?.contains(a, b)),
        }
    }

    fn lift(&self, r: &Relation) -> Result<Relation> {
        if self.functor == Functor::Powerset && r.len() > SPAN_PAIRS_LIMIT {
            let fx = powerset_of(r.source())?;
            let fy = powerset_of(r.target())?;
            let mut out = Relation::empty(fx.clone(), fy.clone());
            for (i, a) in fx.iter().enumerate() {
                for (j, b) in fy.iter().enumerate() {
                    if powerset_barr(r, a, b)? {
                        out.insert_idx(i, j);
                    }
                }
            }
            return Ok(out);
        }
        span_lift(self.functor, r)
    }
}

fn powerset_of(x: &FiniteSet) -> Result<FiniteSet> {
    Functor::Powerset.carrier(x)
}

#[derive(Debug)]
struct Sim;

impl Lifting for Sim {
    fn functor(&self) -> Functor {
        Functor::Powerset
    }

    fn name(&self) -> String {
        "sim".into()
    }

    fn relates(&self, r: &Relation, u: &Value, v: &Value) -> Result<bool> {
        let us = element_indices(r.source(), u)?;
        let vs = element_indices(r.target(), v)?;
        Ok(us.iter().all(|&i| vs.iter().any(|&j| r.contains_idx(i, j))))
    }
}

#[derive(Debug)]
struct MTilde;

/// Successor and predecessor masks of a relation between sets of at most
/// 64 elements.
struct MaskView {
    succ: Vec<u64>,
    pred: Vec<u64>,
}

impl MaskView {
    fn new(r: &Relation) -> Result<Self> {
        if r.source().len() > 64 || r.target().len() > 64 {
            return Err(Error::contract("M̃ is only evaluated on sets of at most 64 elements"));
        }
        let mut succ = vec![0u64; r.source().len()];
        let mut pred = vec![0u64; r.target().len()];
        for (i, j) in r.index_pairs() {
            succ[i] |= 1 << j;
            pred[j] |= 1 << i;
        }
        Ok(MaskView { succ, pred })
    }

    fn image(table: &[u64], mut m: u64) -> u64 {
        let mut out = 0;
        while m != 0 {
            out |= table[m.trailing_zeros() as usize];
            m &= m - 1;
        }
        out
    }

    /// forth: `∀u∈U ∃v∈V. v ⊆ R[u]`; back: `∀v∈V ∃u∈U. u ⊆ R⁻¹[v]`.
    fn relates(&self, us: &[u64], vs: &[u64]) -> bool {
        let forth = us.iter().all(|&u| {
            let img = Self::image(&self.succ, u);
            vs.iter().any(|&v| v & !img == 0)
        });
        forth
            && vs.iter().all(|&v| {
                let pre = Self::image(&self.pred, v);
                us.iter().any(|&u| u & !pre == 0)
            })
    }
}

fn family_masks(x: &FiniteSet, fam: &Value) -> Result<Vec<u64>> {
    fam.as_set()
        .ok_or_else(|| Error::contract(format!("{fam} is not a neighbourhood system")))?
        .iter()
        .map(|u| x.mask_of(u))
        .collect()
}

impl Lifting for MTilde {
    fn functor(&self) -> Functor {
        Functor::MonotoneNeighbourhood
    }

    fn name(&self) -> String {
        "mtilde".into()
    }

    fn relates(&self, r: &Relation, u: &Value, v: &Value) -> Result<bool> {
        let view = MaskView::new(r)?;
        Ok(view.relates(&family_masks(r.source(), u)?, &family_masks(r.target(), v)?))
    }

    fn lift(&self, r: &Relation) -> Result<Relation> {
        let view = MaskView::new(r)?;
        let fx = self.functor().carrier(r.source())?;
        let fy = self.functor().carrier(r.target())?;
        let us: Vec<Vec<u64>> = fx.iter().map(|u| family_masks(r.source(), u)).collect::<Result<_>>()?;
        let vs: Vec<Vec<u64>> = fy.iter().map(|v| family_masks(r.target(), v)).collect::<Result<_>>()?;
        Ok(Relation::from_index_fn(fx, fy, |i, j| view.relates(&us[i], &vs[j])))
    }
}

#[derive(Debug)]
struct Lj {
    mask: u8,
}

impl Lifting for Lj {
    fn functor(&self) -> Functor {
        Functor::Neighbourhood
    }

    fn name(&self) -> String {
        format!("LJ:{}", self.mask)
    }

    fn relates(&self, r: &Relation, u: &Value, v: &Value) -> Result<bool> {
        if !u.is_set() || !v.is_set() {
            return Err(Error::contract(format!("({u}, {v}) is not a pair of neighbourhood systems")));
        }
        let (x, y) = (r.source().to_value(), r.target().to_value());
        Ok(RhoFormula::from_mask(self.mask).iter().all(|rho| rho.holds(&x, &y, u, v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::{compose, converse, diagonal, graph};
    use crate::universe::all_relations;

    fn egli_milner(r: &Relation, u: &Value, v: &Value) -> bool {
        let (us, vs) = (u.as_set().unwrap(), v.as_set().unwrap());
        us.iter().all(|x| vs.iter().any(|y| r.contains(x, y)))
            && vs.iter().all(|y| us.iter().any(|x| r.contains(x, y)))
    }

    #[test]
    fn barr_single_pair_example() {
        let x = FiniteSet::atoms(2);
        let y = FiniteSet::new([Value::atom(9)]);
        let r = Relation::from_pairs(x, y, [(Value::atom(0), Value::atom(9))]).unwrap();
        let l = barr_lift(Functor::Powerset).lift(&r).unwrap();
        assert_eq!(l.to_string(), "{({},{}),({a0},{a9})}");
    }

    #[test]
    fn barr_pointwise_matches_span() {
        let b = barr_lift(Functor::Powerset);
        for n in 0..=2 {
            for m in 0..=2 {
                let (x, y) = (FiniteSet::atoms(n), FiniteSet::atoms(m));
                for r in all_relations(&x, &y) {
                    let span = b.lift(&r).unwrap();
                    for (a, c) in span.source().iter().flat_map(|a| span.target().iter().map(move |c| (a, c))) {
                        assert_eq!(span.contains(a, c), b.relates(&r, a, c).unwrap());
                        assert_eq!(span.contains(a, c), egli_milner(&r, a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn barr_preserves_diagonals() {
        for n in 0..=3 {
            let x = FiniteSet::atoms(n);
            let px = Functor::Powerset.carrier(&x).unwrap();
            assert_eq!(barr_lift(Functor::Powerset).lift(&diagonal(&x)).unwrap(), diagonal(&px));
        }
    }

    #[test]
    fn barr_for_identity_and_constant() {
        let x = FiniteSet::atoms(2);
        for r in all_relations(&x, &x) {
            assert_eq!(barr_lift(Functor::Identity).lift(&r).unwrap(), r);
            let c = barr_lift(Functor::Constant(2)).lift(&r).unwrap();
            assert_eq!(c, diagonal(&FiniteSet::atoms(2)));
        }
    }

    #[test]
    fn top_is_full() {
        let x = FiniteSet::atoms(1);
        let l = top_lift(Functor::Powerset).lift(&Relation::empty(x.clone(), x)).unwrap();
        assert_eq!(l.len(), 4);
    }

    #[test]
    fn mtilde_examples() {
        let x = FiniteSet::atoms(1);
        let mx = Functor::MonotoneNeighbourhood.carrier(&x).unwrap();
        assert_eq!(mtilde_lift().lift(&diagonal(&x)).unwrap(), diagonal(&mx));
        let y = FiniteSet::atoms(2);
        let my = Functor::MonotoneNeighbourhood.carrier(&y).unwrap();
        for r in all_relations(&y, &y) {
            let l = mtilde_lift().lift(&r).unwrap();
            for v in my.iter() {
                assert_eq!(l.contains(&Value::empty_set(), v), v == &Value::empty_set());
                for u in my.iter() {
                    assert_eq!(l.contains(u, v), mtilde_lift().relates(&r, u, v).unwrap());
                }
            }
        }
    }

    #[test]
    fn mtilde_on_total_surjective_is_projection_span() {
        let m = Functor::MonotoneNeighbourhood;
        for n in 1..=2 {
            for k in 1..=2 {
                let (x, y) = (FiniteSet::atoms(n), FiniteSet::atoms(k));
                for r in all_relations(&x, &y).filter(|r| r.is_total() && r.is_surjective()) {
                    let pairs = r.as_set();
                    let p1 = Function::new(pairs.clone(), x.clone(), |p| p.as_pair().unwrap().0.clone()).unwrap();
                    let p2 = Function::new(pairs.clone(), y.clone(), |p| p.as_pair().unwrap().1.clone()).unwrap();
                    let span = compose(&converse(&graph(&m.fmap(&p1).unwrap())), &graph(&m.fmap(&p2).unwrap())).unwrap();
                    assert_eq!(mtilde_lift().lift(&r).unwrap(), span);
                }
            }
        }
    }

    #[test]
    fn lj_examples() {
        let x = FiniteSet::atoms(1);
        let r = diagonal(&x);
        let nx = Functor::Neighbourhood.carrier(&x).unwrap();
        assert_eq!(lj_lift(0).unwrap().lift(&r).unwrap(), Relation::full(nx.clone(), nx));
        let u = Value::set([Value::empty_set()]);
        assert!(!lj_lift(1).unwrap().relates(&r, &u, &Value::empty_set()).unwrap());
        assert!(lj_lift(16).is_err());
    }

    #[test]
    fn lj_ignores_pairs_of_relation() {
        let x = FiniteSet::atoms(2);
        for mask in 0..16 {
            let l = lj_lift(mask).unwrap();
            let full = l.lift(&Relation::full(x.clone(), x.clone())).unwrap();
            for r in all_relations(&x, &x) {
                assert_eq!(l.lift(&r).unwrap(), full);
            }
        }
    }
}
