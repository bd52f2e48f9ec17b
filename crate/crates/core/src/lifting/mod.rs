//! Relation liftings: the catalogue, lattice and transport operations, and
//! the axiom checker.

mod axioms;
mod catalogue;
mod combinators;
mod registry;
mod rho;
mod witness;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functor::Functor;
use crate::relation::Relation;
use crate::value::Value;

pub use axioms::{
    check_cospan, check_lifting_axioms, AxiomReport, Condition, Counterexample, LiftTable, Verdict,
};
pub use catalogue::{barr_lift, lj_lift, mtilde_lift, sim_lift, top_lift};
pub use combinators::{meet_lift, transport_lift, twiddle_lift};
pub(crate) use registry::call_args;
pub use registry::{parse_lifting, registered_liftings, Registered};
pub use rho::{Rho0, Rho1, RhoFormula};
pub use witness::mtilde_witness;

/// A lax relation lifting `L` of a functor `F`: it sends `R : X ⇸ Y` to
/// `LR : FX ⇸ FY`.
pub trait Lifting: Send + Sync + fmt::Debug {
    fn functor(&self) -> Functor;

    /// Canonical name, accepted back by [`parse_lifting`].
    fn name(&self) -> String;

    /// Whether `(a, b) ∈ L(R)`, for `a ∈ F X` and `b ∈ F Y`.
    fn relates(&self, r: &Relation, a: &Value, b: &Value) -> Result<bool>;

    /// The whole relation `L(R)` between the carriers `FX` and `FY`.
    fn lift(&self, r: &Relation) -> Result<Relation> {
        pairwise_lift(self, r)
    }
}

/// `L(R)` by testing `relates` on every pair of the carriers.
pub(crate) fn pairwise_lift<L: Lifting + ?Sized>(l: &L, r: &Relation) -> Result<Relation> {
    let f = l.functor();
    let fx = f.carrier(r.source())?;
    let fy = f.carrier(r.target())?;
    let mut out = Relation::empty(fx.clone(), fy.clone());
    for (i, a) in fx.iter().enumerate() {
        for (j, b) in fy.iter().enumerate() {
            if l.relates(r, a, b)? {
                out.insert_idx(i, j);
            }
        }
    }
    Ok(out)
}

pub type LiftingRef = Arc<dyn Lifting>;

/// `relates` with both arguments checked against the carriers.
pub fn lift_pair(l: &dyn Lifting, r: &Relation, a: &Value, b: &Value) -> Result<bool> {
    let f = l.functor();
    if !f.is_element(r.source(), a) {
        return Err(Error::contract(format!("{a} is not in {f}({})", r.source())));
    }
    if !f.is_element(r.target(), b) {
        return Err(Error::contract(format!("{b} is not in {f}({})", r.target())));
    }
    l.relates(r, a, b)
}

type RelatesFn = dyn Fn(&Relation, &Value, &Value) -> bool + Send + Sync;

/// A lifting given by an arbitrary membership predicate. No axioms are
/// assumed; use [`check_lifting_axioms`] to audit it.
#[derive(Clone)]
pub struct FnLifting {
    functor: Functor,
    name: String,
    predicate: Arc<RelatesFn>,
}

impl FnLifting {
    pub fn new(
        functor: Functor,
        name: impl Into<String>,
        predicate: impl Fn(&Relation, &Value, &Value) -> bool + Send + Sync + 'static,
    ) -> LiftingRef {
        Arc::new(FnLifting { functor, name: name.into(), predicate: Arc::new(predicate) })
    }
}

impl fmt::Debug for FnLifting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnLifting({}, {})", self.functor, self.name)
    }
}

impl Lifting for FnLifting {
    fn functor(&self) -> Functor {
        self.functor
    }

    fn name(&self) -> String {
        self.name.clone()
    }

    fn relates(&self, r: &Relation, a: &Value, b: &Value) -> Result<bool> {
        Ok((self.predicate)(r, a, b))
    }
}

/// Whether `L(R) ⊆ L'(R)` for every relation between objects of the universe
/// of the given bound; returns the first offending relation and pair.
pub fn first_order_violation(
    lower: &dyn Lifting,
    upper: &dyn Lifting,
    bound: usize,
) -> Result<Option<Counterexample>> {
    let lo = LiftTable::build(lower, bound)?;
    let hi = LiftTable::build(upper, bound)?;
    Ok(lo.first_excess_over(&hi))
}

/// Pointwise equality of two liftings on the universe of the given bound.
pub fn first_difference(a: &dyn Lifting, b: &dyn Lifting, bound: usize) -> Result<Option<Counterexample>> {
    let ta = LiftTable::build(a, bound)?;
    let tb = LiftTable::build(b, bound)?;
    Ok(ta.first_excess_over(&tb).or_else(|| tb.first_excess_over(&ta)))
}
