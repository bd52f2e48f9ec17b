use std::sync::Arc;

use super::{pairwise_lift, Lifting, LiftingRef};
use crate::error::{Error, Result};
use crate::functor::{Functor, NatTrans};
use crate::relation::{converse, Relation};
use crate::value::{FiniteSet, Value};

/// Pointwise intersection of liftings of the same functor.
pub fn meet_lift(parts: &[LiftingRef]) -> Result<LiftingRef> {
    let first = parts
        .first()
        .ok_or_else(|| Error::contract("meet of an empty list of liftings"))?;
    if let Some(other) = parts.iter().find(|l| l.functor() != first.functor()) {
        return Err(Error::contract(format!(
            "cannot meet {} over {} with {} over {}",
            first.name(),
            first.functor(),
            other.name(),
            other.functor()
        )));
    }
    Ok(Arc::new(Meet { parts: parts.to_vec() }))
}

/// `⁀L(R) = (L(R∪))∪`.
pub fn twiddle_lift(inner: LiftingRef) -> LiftingRef {
    Arc::new(Twiddle { inner })
}

/// `η*L(R) = {(a, b) | (η_X a, η_Y b) ∈ L(R)}`.
pub fn transport_lift(eta: NatTrans, inner: LiftingRef) -> Result<LiftingRef> {
    if inner.functor() != eta.target_functor() {
        return Err(Error::contract(format!(
            "cannot transport {} over {} along {} into {}",
            inner.name(),
            inner.functor(),
            eta.name(),
            eta.target_functor()
        )));
    }
    Ok(Arc::new(Transport { eta, inner }))
}

#[derive(Debug)]
struct Meet {
    parts: Vec<LiftingRef>,
}

impl Lifting for Meet {
    fn functor(&self) -> Functor {
        self.parts[0].functor()
    }

    fn name(&self) -> String {
        let names: Vec<String> = self.parts.iter().map(|l| l.name()).collect();
        format!("meet({})", names.join(","))
    }

    fn relates(&self, r: &Relation, a: &Value, b: &Value) -> Result<bool> {
        for l in &self.parts {
            if !l.relates(r, a, b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn lift(&self, r: &Relation) -> Result<Relation> {
        let mut out = self.parts[0].lift(r)?;
        for l in &self.parts[1..] {
            out = out.intersection(&l.lift(r)?)?;
        }
        Ok(out)
    }
}

#[derive(Debug)]
struct Twiddle {
    inner: LiftingRef,
}

impl Lifting for Twiddle {
    fn functor(&self) -> Functor {
        self.inner.functor()
    }

    fn name(&self) -> String {
        format!("twiddle({})", self.inner.name())
    }

    fn relates(&self, r: &Relation, a: &Value, b: &Value) -> Result<bool> {
        self.inner.relates(&converse(r), b, a)
    }

    fn lift(&self, r: &Relation) -> Result<Relation> {
        Ok(converse(&self.inner.lift(&converse(r))?))
    }
}

#[derive(Debug)]
struct Transport {
    eta: NatTrans,
    inner: LiftingRef,
}

impl Lifting for Transport {
    fn functor(&self) -> Functor {
        self.eta.source_functor()
    }

    fn name(&self) -> String {
        format!("transport({},{})", self.eta.name(), self.inner.name())
    }

    fn relates(&self, r: &Relation, a: &Value, b: &Value) -> Result<bool> {
        let a = self.eta.apply(r.source(), a)?;
        let b = self.eta.apply(r.target(), b)?;
        self.inner.relates(r, &a, &b)
    }

    fn lift(&self, r: &Relation) -> Result<Relation> {
        let outer_size = self.functor().carrier(r.source())?.len() * self.functor().carrier(r.target())?.len();
        let inner = self.inner.functor();
        let inner_size = |x: &FiniteSet| inner.enumeration_size(x.len()).unwrap_or(usize::MAX);
        if inner_size(r.source()).saturating_mul(inner_size(r.target())) > outer_size.saturating_mul(16) {
            return pairwise_lift(self, r);
        }
        let outer = self.inner.lift(r)?;
        let ex = self.eta.component(r.source())?;
        let ey = self.eta.component(r.target())?;
        Ok(Relation::from_index_fn(ex.source().clone(), ey.source().clone(), |i, j| {
            outer.contains_idx(ex.image_index(i), ey.image_index(j))
        }))
    }
}
