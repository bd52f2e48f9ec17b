//! Lax distributive laws `λ : FP ⇒ PF` over the powerset monad, their
//! correspondence with liftings, and an axiom checker.

use std::fmt;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functor::{pow_mult, pow_unit, powerset, Functor};
use crate::lifting::{parse_lifting, Counterexample, Lifting, LiftingRef, Verdict};
use crate::relation::{compose, converse, graph, membership_shared, to_kleisli, Function, Relation};
use crate::universe::{all_functions, all_relations};
use crate::value::{FiniteSet, Value};

/// A lax distributive law, given by its components `λ_Z : F(PZ) → P(FZ)`.
pub trait DistLaw: Send + Sync + fmt::Debug {
    fn functor(&self) -> Functor;

    fn name(&self) -> String;

    /// Whether `b ∈ λ_Z(φ)`, for `φ ∈ F(PZ)` and `b ∈ FZ`.
    fn contains(&self, z: &FiniteSet, phi: &Value, b: &Value) -> Result<bool>;

    /// `λ_Z(φ)`.
    fn apply(&self, z: &FiniteSet, phi: &Value) -> Result<Value> {
        let fz = self.functor().carrier(z)?;
        let mut out = Vec::new();
        for b in fz.iter() {
            if self.contains(z, phi, b)? {
                out.push(b.clone());
            }
        }
        Ok(Value::set_from_sorted(out))
    }

    /// `⌊λ_Z⌋ : F(PZ) ⇸ FZ`.
    fn component_relation(&self, z: &FiniteSet) -> Result<Relation> {
        let f = self.functor();
        let fpz = f.carrier(&powerset(z)?)?;
        let fz = f.carrier(z)?;
        let mut out = Relation::empty(fpz.clone(), fz.clone());
        for (i, phi) in fpz.iter().enumerate() {
            for (j, b) in fz.iter().enumerate() {
                if self.contains(z, phi, b)? {
                    out.insert_idx(i, j);
                }
            }
        }
        Ok(out)
    }

    /// The component `λ_Z : F(PZ) → P(FZ)` as a function.
    fn component(&self, z: &FiniteSet) -> Result<Function> {
        to_kleisli(&self.component_relation(z)?)
    }
}

pub type LawRef = Arc<dyn DistLaw>;

/// `λ^L := χ_{L∋}`.
pub fn law_from_lifting(lifting: LiftingRef) -> LawRef {
    Arc::new(LawFromLifting { lifting })
}

/// `L^λ R := ⌊λ_Y ∘ Fχ_R⌋`.
pub fn lifting_from_law(law: LawRef) -> LiftingRef {
    Arc::new(LiftingFromLaw { law, components: Mutex::new(HashMap::new()) })
}

/// Parses `law(<lifting expression>)`.
pub fn parse_law(functor: Functor, text: &str) -> Result<LawRef> {
    let s = text.trim();
    match crate::lifting::call_args(s, "law")? {
        Some(args) if args.len() == 1 => Ok(law_from_lifting(parse_lifting(functor, args[0])?)),
        _ => Err(Error::Parse(format!("expected law(<lifting>), found '{s}'"))),
    }
}

#[derive(Debug)]
struct LawFromLifting {
    lifting: LiftingRef,
}

impl DistLaw for LawFromLifting {
    fn functor(&self) -> Functor {
        self.lifting.functor()
    }

    fn name(&self) -> String {
        format!("law({})", self.lifting.name())
    }

    fn contains(&self, z: &FiniteSet, phi: &Value, b: &Value) -> Result<bool> {
        self.lifting.relates(&*membership_shared(z)?, phi, b)
    }

    fn component_relation(&self, z: &FiniteSet) -> Result<Relation> {
        self.lifting.lift(&*membership_shared(z)?)
    }
}

#[derive(Debug)]
struct LiftingFromLaw {
    law: LawRef,
    components: Mutex<HashMap<FiniteSet, Arc<Relation>>>,
}

impl LiftingFromLaw {
    fn component(&self, y: &FiniteSet) -> Result<Arc<Relation>> {
        if let Some(c) = self.components.lock().expect("cache lock").get(y) {
            return Ok(c.clone());
        }
        let c = Arc::new(self.law.component_relation(y)?);
        self.components.lock().expect("cache lock").insert(y.clone(), c.clone());
        Ok(c)
    }
}

impl Lifting for LiftingFromLaw {
    fn functor(&self) -> Functor {
        self.law.functor()
    }

    fn name(&self) -> String {
        format!("lifting({})", self.law.name())
    }

    fn relates(&self, r: &Relation, a: &Value, b: &Value) -> Result<bool> {
        let chi = to_kleisli(r)?;
        let phi = self.functor().apply(&chi, a)?;
        let comp = self.component(r.target())?;
        match (comp.source().index_of(&phi), comp.target().index_of(b)) {
            (Some(i), Some(j)) => Ok(comp.contains_idx(i, j)),
            _ => self.law.contains(r.target(), &phi, b),
        }
    }

    fn lift(&self, r: &Relation) -> Result<Relation> {
        let f = self.functor();
        let chi = f.fmap(&to_kleisli(r)?)?;
        let comp = self.component(r.target())?;
        compose(&graph(&chi), &comp)
    }
}

/// The axioms audited by [`check_distlaw_axioms`]; the last two are
/// optional.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LawAxiom {
    Monotonicity,
    LaxNaturality,
    EmMultiplication,
    EmUnit,
    Extensionality,
    Symmetry,
}

impl LawAxiom {
    pub const ALL: [LawAxiom; 6] = [
        LawAxiom::Monotonicity,
        LawAxiom::LaxNaturality,
        LawAxiom::EmMultiplication,
        LawAxiom::EmUnit,
        LawAxiom::Extensionality,
        LawAxiom::Symmetry,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            LawAxiom::Monotonicity => "monotonicity",
            LawAxiom::LaxNaturality => "lax-naturality",
            LawAxiom::EmMultiplication => "em-multiplication",
            LawAxiom::EmUnit => "em-unit",
            LawAxiom::Extensionality => "extensionality",
            LawAxiom::Symmetry => "symmetry",
        }
    }

    pub fn is_required(&self) -> bool {
        !matches!(self, LawAxiom::Extensionality | LawAxiom::Symmetry)
    }
}

impl fmt::Display for LawAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct LawReport {
    pub law: String,
    pub functor: Functor,
    pub bound: usize,
    pub verdicts: Vec<(LawAxiom, Verdict)>,
}

impl LawReport {
    pub fn verdict(&self, a: LawAxiom) -> &Verdict {
        &self.verdicts.iter().find(|(k, _)| *k == a).expect("axiom was checked").1
    }

    pub fn passes(&self, a: LawAxiom) -> bool {
        self.verdict(a).is_pass()
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|(_, v)| v.is_pass())
    }

    pub fn failed(&self) -> Vec<LawAxiom> {
        self.verdicts.iter().filter(|(_, v)| v.is_fail()).map(|(a, _)| *a).collect()
    }
}

/// Components of a law on a fixed list of sets, computed once.
struct Components<'a> {
    law: &'a dyn DistLaw,
    rels: Vec<Result<Relation>>,
}

impl<'a> Components<'a> {
    fn new(law: &'a dyn DistLaw, sets: &[FiniteSet]) -> Self {
        let rels = sets.par_iter().map(|z| law.component_relation(z)).collect();
        Components { law, rels }
    }

    fn get(&self, i: usize) -> Result<&Relation> {
        self.rels[i].as_ref().map_err(Clone::clone)
    }

    /// `⌊λ_Y ∘ Fχ_R⌋` for `R : X ⇸ Y`.
    fn kleisli(&self, yi: usize, r: &Relation) -> Result<Relation> {
        let chi = self.law.functor().fmap(&to_kleisli(r)?)?;
        compose(&graph(&chi), self.get(yi)?)
    }
}

/// Outcome of an axiom over groups of instances: the first counterexample,
/// or the groups that exceeded the resource bound.
fn grouped<G>(groups: Vec<G>, describe: impl Fn(&G) -> String, mut run: impl FnMut(&G) -> Result<Option<Counterexample>>) -> Result<Verdict> {
    let mut skipped = Vec::new();
    let mut checked = Vec::new();
    for g in &groups {
        match run(g) {
            Ok(Some(ce)) => return Ok(Verdict::fail(ce)),
            Ok(None) => checked.push(describe(g)),
            Err(e) if e.is_resource() => skipped.push(format!("{}: {e}", describe(g))),
            Err(e) => return Err(e),
        }
    }
    if skipped.is_empty() {
        Ok(Verdict::Pass)
    } else {
        let coverage = if checked.is_empty() { "nothing checked".to_string() } else { format!("no violation on {}", checked.join(", ")) };
        Ok(Verdict::Skipped(format!("{coverage}; skipped {}", skipped.join("; "))))
    }
}

/// Audits the law on one set of each size up to `bound` (the axioms are
/// invariant under renaming) and all relations and functions between them.
pub fn check_distlaw_axioms(law: &dyn DistLaw, bound: usize) -> Result<LawReport> {
    check_selected_law_axioms(law, bound, &LawAxiom::ALL)
}

/// [`check_distlaw_axioms`] restricted to the listed axioms.
pub fn check_selected_law_axioms(law: &dyn DistLaw, bound: usize, axioms: &[LawAxiom]) -> Result<LawReport> {
    let f = law.functor();
    let sets: Vec<FiniteSet> = (0..=bound as u32).map(FiniteSet::atoms).collect();
    let comps = Components::new(law, &sets);
    let n = sets.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect();
    let size = |i: &usize| format!("|Z|={}", sets[*i].len());
    let pair_size = |&(x, y): &(usize, usize)| format!("|X|={},|Y|={}", sets[x].len(), sets[y].len());

    let mut verdicts = Vec::new();
    for &axiom in axioms {
        let v = match axiom {
            LawAxiom::Monotonicity => grouped(pairs.clone(), pair_size, |&(xi, yi)| {
                let (x, y) = (&sets[xi], &sets[yi]);
                let rels: Vec<Relation> = all_relations(x, y).collect();
                let lifted = rels.iter().map(|r| comps.kleisli(yi, r)).collect::<Result<Vec<_>>>()?;
                for (s, ls) in lifted.iter().enumerate() {
                    for r in (0..=s).filter(|r| r & !s == 0) {
                        if let Some((phi, b)) = lifted[r].first_excess(ls) {
                            return Ok(Some(
                                Counterexample::new("f ≤ g but b ∈ λ_Y(Ff(Φ)) \\ λ_Y(Fg(Φ))")
                                    .set("X", x)
                                    .set("Y", y)
                                    .function("f", &to_kleisli(&rels[r])?)
                                    .function("g", &to_kleisli(&rels[s])?)
                                    .value("Φ", &phi)
                                    .value("b", &b),
                            ));
                        }
                    }
                }
                Ok(None)
            })?,
            LawAxiom::LaxNaturality => grouped(pairs.clone(), pair_size, |&(xi, yi)| {
                let (x, y) = (&sets[xi], &sets[yi]);
                let (cx, cy) = (comps.get(xi)?, comps.get(yi)?);
                for g in all_functions(x, y) {
                    let fpg = f.fmap(&Functor::Powerset.fmap(&g)?)?;
                    let fg = f.fmap(&g)?;
                    for (i, phi) in cx.source().iter().enumerate() {
                        for j in cx.successors(i) {
                            if !cy.contains_idx(fpg.image_index(i), fg.image_index(j)) {
                                return Ok(Some(
                                    Counterexample::new("a ∈ λ_X(Φ) but Ff(a) ∉ λ_Y(FPf(Φ))")
                                        .set("X", x)
                                        .set("Y", y)
                                        .function("f", &g)
                                        .value("Φ", phi)
                                        .value("a", cx.target().get(j)),
                                ));
                            }
                        }
                    }
                }
                Ok(None)
            })?,
            LawAxiom::EmMultiplication => grouped((0..n).collect(), size, |&zi| {
                let z = &sets[zi];
                let pz = powerset(z)?;
                f.ensure_carrier_fits(powerset(&pz)?.len())?;
                let outer = law.component_relation(&pz)?;
                let inner = comps.get(zi)?;
                let lhs = compose(&outer, inner)?;
                let rhs = compose(&graph(&f.fmap(&pow_mult(z)?)?), inner)?;
                Ok(lhs.first_excess(&rhs).map(|(psi, b)| {
                    Counterexample::new("b ∈ μ(Pλ_Z(λ_PZ(Ψ))) but b ∉ λ_Z(Fμ(Ψ))")
                        .set("Z", z)
                        .value("Ψ", &psi)
                        .value("b", &b)
                }))
            })?,
            LawAxiom::EmUnit | LawAxiom::Extensionality => grouped((0..n).collect(), size, |&zi| {
                let z = &sets[zi];
                let c = comps.get(zi)?;
                let fu = f.fmap(&pow_unit(z)?)?;
                for (i, a) in fu.source().iter().enumerate() {
                    let row = fu.image_index(i);
                    let ce = if axiom == LawAxiom::EmUnit {
                        (!c.contains_idx(row, i)).then(|| Counterexample::new("a ∉ λ_Z(Fη(a))").set("Z", z).value("a", a))
                    } else {
                        c.successors(row).find(|&j| j != i).map(|j| {
                            Counterexample::new("b ∈ λ_Z(Fη(a)) with b ≠ a").set("Z", z).value("a", a).value("b", c.target().get(j))
                        })
                    };
                    if ce.is_some() {
                        return Ok(ce);
                    }
                }
                Ok(None)
            })?,
            LawAxiom::Symmetry => grouped(pairs.clone(), pair_size, |&(xi, yi)| {
                let (x, y) = (&sets[xi], &sets[yi]);
                for r in all_relations(x, y) {
                    let lhs = converse(&comps.kleisli(yi, &r)?);
                    let rhs = comps.kleisli(xi, &converse(&r))?;
                    let diff = lhs.first_excess(&rhs).or_else(|| rhs.first_excess(&lhs));
                    if let Some((b, a)) = diff {
                        return Ok(Some(
                            Counterexample::new("(λ_Y ∘ Ff)♭ and λ_X ∘ F(f♭) differ at (b, a)")
                                .set("X", x)
                                .set("Y", y)
                                .function("f", &to_kleisli(&r)?)
                                .value("b", &b)
                                .value("a", &a),
                        ));
                    }
                }
                Ok(None)
            })?,
        };
        verdicts.push((axiom, v));
    }
    Ok(LawReport { law: law.name(), functor: f, bound, verdicts })
}

/// First set `Z` (one per size up to `bound`) on which two laws differ.
pub fn first_law_difference(a: &dyn DistLaw, b: &dyn DistLaw, bound: usize) -> Result<Option<Counterexample>> {
    for n in 0..=bound as u32 {
        let z = FiniteSet::atoms(n);
        let (ra, rb) = (a.component_relation(&z)?, b.component_relation(&z)?);
        if let Some((phi, x)) = ra.first_excess(&rb).or_else(|| rb.first_excess(&ra)) {
            return Ok(Some(
                Counterexample::new(format!("{} and {} differ at (Φ, b)", a.name(), b.name()))
                    .set("Z", &z)
                    .value("Φ", &phi)
                    .value("b", &x),
            ));
        }
    }
    Ok(None)
}

/// `λ^{L^λ} = λ` on one set per size up to `bound`.
pub fn law_round_trip(law: &LawRef, bound: usize) -> Result<Option<Counterexample>> {
    let back = law_from_lifting(lifting_from_law(law.clone()));
    first_law_difference(&*back, &**law, bound)
}

/// `L^{λ^L} = L` on the universe of the given bound.
pub fn lifting_round_trip(l: &LiftingRef, bound: usize) -> Result<Option<Counterexample>> {
    let back = lifting_from_law(law_from_lifting(l.clone()));
    crate::lifting::first_difference(&*back, &**l, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::{barr_lift, check_lifting_axioms, lj_lift, top_lift, Condition};
    use crate::relation::diagonal;

    fn s(text: &str) -> Value {
        text.parse().unwrap()
    }

    #[test]
    fn barr_law_on_singleton() {
        let law = law_from_lifting(barr_lift(Functor::Powerset));
        let z = FiniteSet::atoms(1);
        assert_eq!(law.apply(&z, &s("{}")).unwrap(), s("{{}}"));
        assert_eq!(law.apply(&z, &s("{{a0}}")).unwrap(), s("{{a0}}"));
        assert_eq!(law.apply(&z, &s("{{}}")).unwrap(), s("{}"));
        assert_eq!(law.apply(&z, &s("{{},{a0}}")).unwrap(), s("{}"));
        let c = law.component(&z).unwrap();
        assert_eq!(c.source().len(), 4);
        assert_eq!(c.apply(&s("{}")).unwrap(), &s("{{}}"));
    }

    #[test]
    fn top_law_is_full() {
        let law = law_from_lifting(top_lift(Functor::Powerset));
        let z = FiniteSet::atoms(1);
        let fz = Functor::Powerset.carrier(&z).unwrap().to_value();
        for phi in Functor::Powerset.carrier(&powerset(&z).unwrap()).unwrap().iter() {
            assert_eq!(law.apply(&z, phi).unwrap(), fz);
        }
    }

    #[test]
    fn lifting_from_barr_law_preserves_diagonal() {
        let l = lifting_from_law(law_from_lifting(barr_lift(Functor::Powerset)));
        let x = FiniteSet::atoms(1);
        assert_eq!(l.lift(&diagonal(&x)).unwrap(), diagonal(&powerset(&x).unwrap()));
        let r = diagonal(&x);
        let a = s("{a0}");
        assert!(l.relates(&r, &a, &a).unwrap());
    }

    #[test]
    fn round_trips() {
        for l in [barr_lift(Functor::Powerset), top_lift(Functor::Powerset)] {
            assert!(lifting_round_trip(&l, 2).unwrap().is_none());
            assert!(law_round_trip(&law_from_lifting(l), 2).unwrap().is_none());
        }
    }

    #[test]
    fn barr_law_passes_everything() {
        let law = law_from_lifting(barr_lift(Functor::Powerset));
        let rep = check_distlaw_axioms(&*law, 2).unwrap();
        assert!(rep.all_pass(), "{rep:?}");
    }

    #[test]
    fn top_law_fails_extensionality_only() {
        let law = law_from_lifting(top_lift(Functor::Powerset));
        let rep = check_distlaw_axioms(&*law, 2).unwrap();
        assert_eq!(rep.failed(), vec![LawAxiom::Extensionality]);
    }

    #[test]
    fn lj_law_symmetry_fails_at_one() {
        let law = law_from_lifting(lj_lift(1).unwrap());
        let rep = check_distlaw_axioms(&*law, 1).unwrap();
        assert!(rep.verdict(LawAxiom::Symmetry).is_fail());
        assert!(rep.passes(LawAxiom::Monotonicity) && rep.passes(LawAxiom::LaxNaturality));
        assert!(rep.passes(LawAxiom::EmUnit));
    }

    #[test]
    fn lifting_of_law_is_a_lifting() {
        let l = lifting_from_law(law_from_lifting(barr_lift(Functor::Powerset)));
        let rep = check_lifting_axioms(&*l, 2).unwrap();
        assert!(rep.is_lifting() && rep.passes(Condition::Diagonal));
    }

    #[test]
    fn parse_law_names() {
        let law = parse_law(Functor::Neighbourhood, "law(LJ:15)").unwrap();
        assert_eq!(law.name(), "law(LJ:15)");
        assert!(parse_law(Functor::Powerset, "barr").is_err());
    }
}
