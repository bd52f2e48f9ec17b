//! Bounded verification suites over the registered liftings and laws.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bisim::{greatest_bisim, is_bisimulation, kripke_bisim_oracle, Coalgebra};
use crate::distlaw::{
    check_distlaw_axioms, check_selected_law_axioms, law_from_lifting, law_round_trip, lifting_from_law,
    lifting_round_trip, LawAxiom,
};
use crate::error::{Error, Result};
use crate::functor::{Functor, NatTrans};
use crate::lifting::{
    barr_lift, check_cospan, check_lifting_axioms, lj_lift, meet_lift, mtilde_lift, mtilde_witness,
    registered_liftings, transport_lift, twiddle_lift, AxiomReport, Condition, Counterexample, LiftTable,
    Lifting, LiftingRef, Registered, RhoFormula, Verdict,
};
use crate::relation::{compose, converse, diagonal, from_kleisli, graph, totalize, Function, Relation};
use crate::universe::{all_relations, Universe};
use crate::value::{FiniteSet, Value};

/// Default seed for randomized checks.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Lattice,
    Cospan,
    BarrMinimal,
    MtildeMinimal,
    LjClassification,
    DistlawBijection,
    Transport,
    Bisim,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Lattice,
        Suite::Cospan,
        Suite::BarrMinimal,
        Suite::MtildeMinimal,
        Suite::LjClassification,
        Suite::DistlawBijection,
        Suite::Transport,
        Suite::Bisim,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Lattice => "lattice",
            Suite::Cospan => "cospan",
            Suite::BarrMinimal => "barr-minimal",
            Suite::MtildeMinimal => "mtilde-minimal",
            Suite::LjClassification => "lj-classification",
            Suite::DistlawBijection => "distlaw-bijection",
            Suite::Transport => "transport",
            Suite::Bisim => "bisim",
        }
    }

    /// Parses a comma-separated list of suite names; `all` expands to every
    /// suite.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        if s.trim() == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        s.split(',').map(|p| p.trim().parse()).collect()
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown suite '{s}'")))
    }
}

/// Universe bounds and seed for a verification run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Bound for `P` liftings.
    pub powerset: usize,
    /// Bound for `N` and `M` liftings, and for `P`/`M` law checks.
    pub neighbourhood: usize,
    /// Bound for `N` law checks.
    pub neighbourhood_law: usize,
    pub seed: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { powerset: 3, neighbourhood: 2, neighbourhood_law: 1, seed: DEFAULT_SEED }
    }
}

impl Bounds {
    /// All bounds set to `b`, with the `N` law bound capped at 1.
    pub fn uniform(b: usize, seed: u64) -> Self {
        Bounds { powerset: b, neighbourhood: b, neighbourhood_law: b.min(1), seed }
    }

    pub fn lifting_bound(&self, f: Functor) -> usize {
        match f {
            Functor::Neighbourhood | Functor::MonotoneNeighbourhood => self.neighbourhood,
            _ => self.powerset,
        }
    }

    pub fn law_bound(&self, f: Functor) -> usize {
        match f {
            Functor::Neighbourhood => self.neighbourhood_law,
            _ => self.neighbourhood,
        }
    }
}

/// One verified property.
#[derive(Clone, Debug)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub verdict: Verdict,
    /// Reported, but not counted towards the overall outcome.
    pub informational: bool,
}

impl Check {
    fn new(suite: Suite, name: impl Into<String>, verdict: Verdict) -> Self {
        Check { suite, name: name.into(), verdict, informational: false }
    }

    fn info(mut self, informational: bool) -> Self {
        self.informational = informational;
        self
    }

    pub fn is_failure(&self) -> bool {
        !self.informational && self.verdict.is_fail()
    }
}

fn verdict(r: Result<Option<Counterexample>>) -> Result<Verdict> {
    match r {
        Ok(c) => Ok(Verdict::from_option(c)),
        Err(e) if e.is_resource() => Ok(Verdict::Skipped(e.to_string())),
        Err(e) => Err(e),
    }
}

fn report_or_skip(r: Result<AxiomReport>) -> Result<std::result::Result<AxiomReport, String>> {
    match r {
        Ok(rep) => Ok(Ok(rep)),
        Err(e) if e.is_resource() => Ok(Err(e.to_string())),
        Err(e) => Err(e),
    }
}

/// Verdict for conditions 1–3 of an axiom report.
fn required_verdict(rep: &AxiomReport) -> Verdict {
    Condition::ALL
        .iter()
        .filter(|c| c.is_required())
        .find_map(|&c| {
            rep.verdict(c).counterexample().map(|ce| {
                let mut ce = ce.clone();
                ce.note = format!("{c}: {}", ce.note);
                Verdict::fail(ce)
            })
        })
        .unwrap_or(Verdict::Pass)
}

fn expect(cond: bool, note: impl FnOnce() -> String) -> Verdict {
    if cond {
        Verdict::Pass
    } else {
        Verdict::fail(Counterexample::new(note()))
    }
}

/// Caches axiom reports by (functor, lifting name, bound).
#[derive(Default)]
struct Reports {
    map: BTreeMap<(Functor, String, usize), std::result::Result<AxiomReport, String>>,
}

impl Reports {
    fn get(&mut self, l: &dyn Lifting, bound: usize) -> Result<std::result::Result<AxiomReport, String>> {
        let key = (l.functor(), l.name(), bound);
        if !self.map.contains_key(&key) {
            let rep = report_or_skip(check_lifting_axioms(l, bound))?;
            self.map.insert(key.clone(), rep);
        }
        Ok(self.map[&key].clone())
    }
}

/// Runs the listed suites in order.
pub fn run_suites(suites: &[Suite], bounds: &Bounds) -> Result<Vec<Check>> {
    let mut reports = Reports::default();
    let mut out = Vec::new();
    for &s in suites {
        out.extend(run_suite(s, bounds, &mut reports)?);
    }
    Ok(out)
}

fn run_suite(suite: Suite, b: &Bounds, reports: &mut Reports) -> Result<Vec<Check>> {
    match suite {
        Suite::Lattice => lattice(b, reports),
        Suite::Cospan => cospan(b, reports),
        Suite::BarrMinimal => barr_minimal(b),
        Suite::MtildeMinimal => mtilde_minimal(b, reports),
        Suite::LjClassification => lj_classification(b, reports),
        Suite::DistlawBijection => distlaw_bijection(b, reports),
        Suite::Transport => transport(b, reports),
        Suite::Bisim => bisim(b),
    }
}

const FUNCTORS: [Functor; 3] = [Functor::Powerset, Functor::Neighbourhood, Functor::MonotoneNeighbourhood];

fn lattice(b: &Bounds, reports: &mut Reports) -> Result<Vec<Check>> {
    let s = Suite::Lattice;
    let mut out = Vec::new();
    for f in FUNCTORS {
        let bound = b.lifting_bound(f);
        for reg in registered_liftings(f) {
            let l = &reg.lifting;
            let label = format!("{f} {} at bound {bound}", l.name());
            match reports.get(&**l, bound)? {
                Err(reason) => out.push(Check::new(s, format!("{label}: conditions 1-3"), Verdict::Skipped(reason)).info(reg.informational)),
                Ok(rep) => {
                    out.push(Check::new(s, format!("{label}: conditions 1-3"), required_verdict(&rep)).info(reg.informational));
                    for c in [Condition::Diagonal, Condition::Symmetry] {
                        out.push(Check::new(s, format!("{label}: {c}"), rep.verdict(c).clone()).info(true));
                    }
                }
            }
        }
    }

    let expectations: [(Functor, LiftingRef, &[Condition], &str); 3] = [
        (Functor::Powerset, barr_lift(Functor::Powerset), &[], "passes every condition"),
        (Functor::Powerset, crate::lifting::top_lift(Functor::Powerset), &[Condition::Diagonal], "fails exactly diagonal"),
        (Functor::Neighbourhood, lj_lift(15)?, &[Condition::Diagonal], "fails exactly diagonal"),
    ];
    for (f, l, failing, text) in expectations {
        let bound = b.lifting_bound(f);
        let v = match reports.get(&*l, bound)? {
            Err(reason) => Verdict::Skipped(reason),
            Ok(rep) => {
                let failed = rep.failed();
                expect(failed == failing, || format!("failed conditions: {failed:?}"))
            }
        };
        out.push(Check::new(s, format!("{f} {} {text} at bound {bound}", l.name()), v));
    }

    // meets of every subfamily of the registered P-liftings
    let bound = b.neighbourhood;
    let family: Vec<LiftingRef> = registered_liftings(Functor::Powerset)
        .into_iter()
        .filter(|r| !r.informational)
        .map(|r| r.lifting)
        .collect();
    let tables = family.iter().map(|l| LiftTable::build(&**l, bound)).collect::<Result<Vec<_>>>()?;
    let mut lifting_fail = None;
    let mut glb_fail = None;
    for subset in 1u32..1 << family.len() {
        let members: Vec<usize> = (0..family.len()).filter(|i| subset >> i & 1 == 1).collect();
        let parts: Vec<LiftingRef> = members.iter().map(|&i| family[i].clone()).collect();
        let m = meet_lift(&parts)?;
        if lifting_fail.is_none() {
            let rep = check_lifting_axioms(&*m, bound)?;
            if let Verdict::Fail(ce) = required_verdict(&rep) {
                lifting_fail = Some(Counterexample { note: format!("{}: {}", m.name(), ce.note), ..*ce });
            }
        }
        if glb_fail.is_none() {
            let mt = LiftTable::build(&*m, bound)?;
            glb_fail = glb_violation(&mt, &members.iter().map(|&i| &tables[i]).collect::<Vec<_>>())
                .map(|ce| Counterexample { note: format!("{}: {}", m.name(), ce.note), ..ce });
        }
    }
    out.push(Check::new(s, format!("P meets of all {} subfamilies satisfy conditions 1-3 at bound {bound}", (1u32 << family.len()) - 1), Verdict::from_option(lifting_fail)));
    out.push(Check::new(s, format!("P meets are pointwise greatest lower bounds at bound {bound}"), Verdict::from_option(glb_fail)));
    Ok(out)
}

/// The meet table must be the pointwise intersection of the member tables.
fn glb_violation(meet: &LiftTable, members: &[&LiftTable]) -> Option<Counterexample> {
    let n = meet.objects().len();
    for xi in 0..n {
        for yi in 0..n {
            for (m, r) in meet.relations(xi, yi).iter().enumerate() {
                let mut inter = members[0].lift(xi, yi, m as u64).clone();
                for t in &members[1..] {
                    inter = inter.intersection(t.lift(xi, yi, m as u64)).expect("same carriers");
                }
                let got = meet.lift(xi, yi, m as u64);
                if let Some((a, c)) = got.first_excess(&inter).or_else(|| inter.first_excess(got)) {
                    return Some(
                        Counterexample::new("meet differs from the intersection of its members at (a,b)")
                            .relation("R", r)
                            .value("a", &a)
                            .value("b", &c),
                    );
                }
            }
        }
    }
    None
}

fn cospan(b: &Bounds, reports: &mut Reports) -> Result<Vec<Check>> {
    let s = Suite::Cospan;
    let mut out = Vec::new();
    for f in FUNCTORS {
        let bound = b.lifting_bound(f);
        for reg in registered_liftings(f) {
            let l = &reg.lifting;
            let name = format!("{f} {}: cospan equality at bound {bound}", l.name());
            let v = match reports.get(&**l, bound)? {
                Err(reason) => Verdict::Skipped(reason),
                Ok(rep) if !rep.is_lifting() => Verdict::Skipped("fails conditions 1-3".into()),
                Ok(_) => match check_cospan(&**l, bound) {
                    Ok(v) => v,
                    Err(e) if e.is_resource() => Verdict::Skipped(e.to_string()),
                    Err(e) => return Err(e),
                },
            };
            out.push(Check::new(s, name, v).info(reg.informational));
        }
    }
    Ok(out)
}

/// `lower ≤ L` for each non-informational member of the family.
fn minimality(s: Suite, lower: &dyn Lifting, family: &[Registered], bound: usize) -> Result<Vec<Check>> {
    let lo = LiftTable::build(lower, bound)?;
    let mut out = Vec::new();
    for reg in family.iter().filter(|r| !r.informational) {
        let hi = LiftTable::build(&*reg.lifting, bound)?;
        out.push(Check::new(
            s,
            format!("{} ≤ {} at bound {bound}", lower.name(), reg.lifting.name()),
            Verdict::from_option(lo.first_excess_over(&hi)),
        ));
    }
    Ok(out)
}

fn barr_minimal(b: &Bounds) -> Result<Vec<Check>> {
    minimality(Suite::BarrMinimal, &*barr_lift(Functor::Powerset), &registered_liftings(Functor::Powerset), b.powerset)
}

fn mtilde_minimal(b: &Bounds, reports: &mut Reports) -> Result<Vec<Check>> {
    let s = Suite::MtildeMinimal;
    let bound = b.neighbourhood;
    let mt = mtilde_lift();
    let mut out = Vec::new();
    let v = match reports.get(&*mt, bound)? {
        Err(reason) => Verdict::Skipped(reason),
        Ok(rep) => match required_verdict(&rep) {
            Verdict::Pass => rep.verdict(Condition::Symmetry).clone(),
            v => v,
        },
    };
    out.push(Check::new(s, format!("mtilde satisfies conditions 1-3 and symmetry at bound {bound}"), v));
    out.push(Check::new(s, format!("witness reconstructs (U,V) for total surjective R at bound {bound}"), verdict(witness_violation(bound))?));
    let family = registered_liftings(Functor::MonotoneNeighbourhood);
    out.extend(minimality(s, &*mt, &family, bound)?);
    for reg in family.iter().filter(|r| !r.informational) {
        out.push(Check::new(
            s,
            format!("{}: totalization factorization at bound {bound}", reg.lifting.name()),
            verdict(totalization_violation(&*reg.lifting, bound))?,
        ));
    }
    Ok(out)
}

fn witness_violation(bound: usize) -> Result<Option<Counterexample>> {
    let m = Functor::MonotoneNeighbourhood;
    for x in Universe::new(bound).objects() {
        for y in Universe::new(bound).objects() {
            for r in all_relations(x, y).filter(|r| r.is_total() && r.is_surjective()) {
                let pairs = r.as_set();
                let p1 = Function::new(pairs.clone(), x.clone(), |p| p.as_pair().expect("pair").0.clone())?;
                let p2 = Function::new(pairs.clone(), y.clone(), |p| p.as_pair().expect("pair").1.clone())?;
                for (u, v) in mtilde_lift().lift(&r)?.pairs() {
                    let w = mtilde_witness(&r, u, v)?;
                    if !m.is_element(&pairs, &w) || &m.apply(&p1, &w)? != u || &m.apply(&p2, &w)? != v {
                        return Ok(Some(
                            Counterexample::new("projections of W do not give back (U,V)")
                                .relation("R", &r)
                                .value("U", u)
                                .value("V", v)
                                .value("W", &w),
                        ));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// `L(R) = gr(Fι_X);L(R*);gr∪(Fι_Y)` where `R*` adds a fresh point.
pub fn totalization_violation(l: &dyn Lifting, bound: usize) -> Result<Option<Counterexample>> {
    let f = l.functor();
    let objects = Universe::new(bound).objects().to_vec();
    for x in &objects {
        for y in &objects {
            for r in all_relations(x, y) {
                let t = totalize(&r);
                let lhs = l.lift(&r)?;
                let ix = graph(&f.fmap(&t.inject_source)?);
                let iy = converse(&graph(&f.fmap(&t.inject_target)?));
                let rhs = compose(&compose(&ix, &l.lift(&t.relation)?)?, &iy)?;
                if let Some((a, c)) = lhs.first_excess(&rhs).or_else(|| rhs.first_excess(&lhs)) {
                    return Ok(Some(
                        Counterexample::new("L(R) and gr(Fι_X);L(R*);gr∪(Fι_Y) differ at (a,b)")
                            .relation("R", &r)
                            .relation("R*", &t.relation)
                            .value("a", &a)
                            .value("b", &c),
                    ));
                }
            }
        }
    }
    Ok(None)
}

/// Groups of `LJ` masks whose liftings coincide on `N{a0} × N{a0}`.
pub fn lj_coincidences() -> Result<Vec<Vec<u8>>> {
    let x = FiniteSet::atoms(1);
    let r = diagonal(&x);
    let mut groups: Vec<(Relation, Vec<u8>)> = Vec::new();
    for m in 0..16u8 {
        let t = lj_lift(m)?.lift(&r)?;
        match groups.iter_mut().find(|(g, _)| *g == t) {
            Some((_, ms)) => ms.push(m),
            None => groups.push((t, vec![m])),
        }
    }
    Ok(groups.into_iter().map(|(_, ms)| ms).collect())
}

/// First pair of masks violating `J ⊇ J' ⟺ L_J ≤ L_J'` at the bound, split
/// by direction (`⟹` first).
pub fn lj_reindexing_violations(bound: usize) -> Result<(Option<Counterexample>, Option<Counterexample>)> {
    let tables = (0..16u8).map(|m| LiftTable::build(&*lj_lift(m)?, bound)).collect::<Result<Vec<_>>>()?;
    let mut forth = None;
    let mut back = None;
    for j in 0..16u8 {
        for jp in 0..16u8 {
            let superset = j & jp == jp;
            let below = tables[j as usize].first_excess_over(&tables[jp as usize]);
            let describe = |what: &str| {
                Counterexample::new(format!("J = {:?}, J' = {:?}: {what}", RhoFormula::from_mask(j).iter().map(|r| r.to_string()).collect::<Vec<_>>(), RhoFormula::from_mask(jp).iter().map(|r| r.to_string()).collect::<Vec<_>>()))
                    .value("J", &Value::atom(j as u32))
                    .value("J'", &Value::atom(jp as u32))
            };
            if superset && forth.is_none() {
                if let Some(ce) = below {
                    let mut d = describe("J ⊇ J' but L_J ≰ L_J'");
                    d.relations = ce.relations;
                    d.values.extend(ce.values);
                    forth = Some(d);
                }
            } else if !superset && below.is_none() && back.is_none() {
                back = Some(describe("L_J ≤ L_J' but J ⊉ J'"));
            }
        }
    }
    Ok((forth, back))
}

/// If `(U,V)` and `(U',V')` both fail the same `ρ`, then
/// `(U,U')` and `(V,V')` satisfy every `ρ'`. Checked on one set per size.
pub fn failing_pair_violation(bound: usize) -> Result<Option<Counterexample>> {
    let n = Functor::Neighbourhood;
    let sets: Vec<FiniteSet> = (0..=bound as u32).map(FiniteSet::atoms).collect();
    let carriers = sets.iter().map(|x| n.carrier(x)).collect::<Result<Vec<_>>>()?;
    // every (X, Y, U, V) with U ∈ NX, V ∈ NY
    let mut cells: Vec<(usize, usize, &Value, &Value)> = Vec::new();
    for (xi, cx) in carriers.iter().enumerate() {
        for (yi, cy) in carriers.iter().enumerate() {
            for u in cx.iter() {
                for v in cy.iter() {
                    cells.push((xi, yi, u, v));
                }
            }
        }
    }
    let sv: Vec<Value> = sets.iter().map(FiniteSet::to_value).collect();
    for rho in RhoFormula::ALL {
        let failing: Vec<_> = cells.iter().filter(|(xi, yi, u, v)| !rho.holds(&sv[*xi], &sv[*yi], u, v)).collect();
        for &&(xi, yi, u, v) in &failing {
            for &&(xpi, ypi, up, vp) in &failing {
                for rp in RhoFormula::ALL {
                    let left = rp.holds(&sv[xi], &sv[xpi], u, up);
                    let right = rp.holds(&sv[yi], &sv[ypi], v, vp);
                    if !(left && right) {
                        return Ok(Some(
                            Counterexample::new(format!(
                                "(U,V) and (U',V') both fail {rho} but ({}) fails {rp}",
                                if left { "V,V'" } else { "U,U'" }
                            ))
                            .set("X", &sets[xi])
                            .set("Y", &sets[yi])
                            .set("X'", &sets[xpi])
                            .set("Y'", &sets[ypi])
                            .value("U", u)
                            .value("V", v)
                            .value("U'", up)
                            .value("V'", vp),
                        ));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Images of neighbourhood systems on `{a0,a1}` under the constant map onto
/// `a` in `2 = {a, b}`, grouped by whether they contain `∅` and `X`.
pub fn constant_map_images() -> Result<Vec<((bool, bool), Value)>> {
    let x = FiniteSet::atoms(2);
    let two = FiniteSet::new([Value::atom(10), Value::atom(11)]);
    let c = Function::new(x.clone(), two, |_| Value::atom(10))?;
    let mut out: Vec<((bool, bool), Value)> = Vec::new();
    for u in Functor::Neighbourhood.carrier(&x)?.iter() {
        let key = (u.has_element(&Value::empty_set()), u.has_element(&x.to_value()));
        let img = Functor::Neighbourhood.apply(&c, u)?;
        match out.iter().find(|(k, _)| *k == key) {
            Some((_, prev)) if *prev != img => {
                return Err(Error::Invariant(format!("constant-map image depends on more than {key:?}")));
            }
            Some(_) => {}
            None => out.push((key, img)),
        }
    }
    out.sort();
    Ok(out)
}

fn lj_classification(b: &Bounds, reports: &mut Reports) -> Result<Vec<Check>> {
    let s = Suite::LjClassification;
    let bound = b.neighbourhood;
    let mut out = Vec::new();

    let groups = lj_coincidences()?;
    let v = expect(groups.len() == 16, || {
        let merged: Vec<String> = groups.iter().filter(|g| g.len() > 1).map(|g| format!("{g:?}")).collect();
        format!("{} distinct liftings; coinciding masks: {}", groups.len(), merged.join(" "))
    });
    out.push(Check::new(s, "the 16 LJ are pairwise distinct at |X|=|Y|=1", v));

    let (forth, back) = lj_reindexing_violations(bound)?;
    out.push(Check::new(s, format!("J ⊇ J' ⟹ L_J ≤ L_J' at bound {bound}"), Verdict::from_option(forth)));
    out.push(Check::new(s, format!("L_J ≤ L_J' ⟹ J ⊇ J' at bound {bound}"), Verdict::from_option(back)));

    let l_i = lj_lift(15)?;
    let family = registered_liftings(Functor::Neighbourhood);
    let lo = LiftTable::build(&*l_i, bound)?;
    let mut unrestricted = None;
    let mut symmetric = None;
    for reg in family.iter().filter(|r| !r.informational) {
        let hi = LiftTable::build(&*reg.lifting, bound)?;
        let excess = lo.first_excess_over(&hi).map(|mut ce| {
            ce.note = format!("{}: {}", reg.lifting.name(), ce.note);
            ce
        });
        let is_symmetric = matches!(reports.get(&*reg.lifting, bound)?, Ok(rep) if rep.passes(Condition::Symmetry));
        if unrestricted.is_none() {
            unrestricted = excess.clone();
        }
        if is_symmetric && symmetric.is_none() {
            symmetric = excess;
        }
    }
    out.push(Check::new(s, format!("L_I ≤ every registered N-lifting at bound {bound}"), Verdict::from_option(unrestricted)));
    out.push(Check::new(s, format!("L_I ≤ every registered symmetric N-lifting at bound {bound}"), Verdict::from_option(symmetric)));

    out.push(Check::new(s, format!("pairs failing a common ρ satisfy every ρ' componentwise at bound {bound}"), verdict(failing_pair_violation(bound))?));

    let images = constant_map_images()?;
    let find = |k: (bool, bool)| images.iter().find(|(key, _)| *key == k).map(|(_, v)| v.to_string());
    out.push(Check::new(
        s,
        "∅ ∈ U, X ∉ U gives {∅,{b}} under the constant map",
        expect(find((true, false)).as_deref() == Some("{{},{a11}}"), || format!("got {:?}", find((true, false)))),
    ));
    out.push(Check::new(
        s,
        "∅ ∉ U, X ∈ U gives {{a},{a,b}} under the constant map",
        expect(find((false, true)).as_deref() == Some("{{a10},{a10,a11}}"), || format!("got {:?}", find((false, true)))),
    ));
    Ok(out)
}

fn distlaw_bijection(b: &Bounds, reports: &mut Reports) -> Result<Vec<Check>> {
    let s = Suite::DistlawBijection;
    let mut out = Vec::new();
    for f in FUNCTORS {
        let bound = b.law_bound(f);
        let mut family = registered_liftings(f);
        if f == Functor::Neighbourhood {
            family.retain(|r| !r.informational);
        }
        for reg in family {
            let l = &reg.lifting;
            out.push(Check::new(s, format!("{f} {}: lifting round trip at bound {bound}", l.name()), verdict(lifting_round_trip(l, bound))?).info(reg.informational));
            let law = law_from_lifting(l.clone());
            out.push(Check::new(s, format!("{f} {}: law round trip at bound {bound}", law.name()), verdict(law_round_trip(&law, bound))?).info(reg.informational));

            let rep = match reports.get(&**l, bound)? {
                Ok(rep) => rep,
                Err(reason) => {
                    out.push(Check::new(s, format!("{f} {}: axiom correspondence", l.name()), Verdict::Skipped(reason)).info(reg.informational));
                    continue;
                }
            };
            let law_rep = check_selected_law_axioms(&*law, bound, &[LawAxiom::Extensionality, LawAxiom::Symmetry])?;
            let back = lifting_from_law(law.clone());
            let back_rep = check_lifting_axioms(&*back, bound)?;
            for (c, a) in [(Condition::Diagonal, LawAxiom::Extensionality), (Condition::Symmetry, LawAxiom::Symmetry)] {
                let (lv, av, bv) = (rep.passes(c), law_rep.passes(a), back_rep.passes(c));
                out.push(
                    Check::new(
                        s,
                        format!("{f} {}: {c} ⟺ law {a} at bound {bound}", l.name()),
                        expect(lv == av && av == bv, || format!("lifting {c}: {lv}, law {a}: {av}, lifting of law {c}: {bv}")),
                    )
                    .info(reg.informational),
                );
            }
        }
    }

    // full law audits for the P family and the liftings they induce
    let bound = b.law_bound(Functor::Powerset);
    for reg in registered_liftings(Functor::Powerset) {
        let law = law_from_lifting(reg.lifting.clone());
        let rep = check_distlaw_axioms(&*law, bound)?;
        let required = LawAxiom::ALL.iter().filter(|a| a.is_required()).find_map(|&a| rep.verdict(a).counterexample().cloned());
        out.push(Check::new(s, format!("P {}: lax distributive law at bound {bound}", law.name()), Verdict::from_option(required)));
        if LawAxiom::ALL.iter().filter(|a| a.is_required()).all(|&a| rep.passes(a)) {
            let lrep = check_lifting_axioms(&*lifting_from_law(law.clone()), bound)?;
            out.push(Check::new(s, format!("P lifting({}): conditions 1-3 at bound {bound}", law.name()), required_verdict(&lrep)));
        }
    }
    out.push(Check::new(
        s,
        format!("P barr: Kleisli composite equals L^λR;L^λS at bound {bound}"),
        verdict(kleisli_composite_violation(&barr_lift(Functor::Powerset), bound))?,
    ));
    Ok(out)
}

/// `μ ∘ P(λ_Z ∘ Fχ_S) ∘ λ_Y ∘ Fχ_R`, read as a relation, against
/// `L^λR;L^λS`.
pub fn kleisli_composite_violation(l: &LiftingRef, bound: usize) -> Result<Option<Counterexample>> {
    let f = l.functor();
    let law = law_from_lifting(l.clone());
    let lam = lifting_from_law(law.clone());
    let sets: Vec<FiniteSet> = (0..=bound as u32).map(FiniteSet::atoms).collect();
    for x in &sets {
        for y in &sets {
            for z in &sets {
                let (ly, lz) = (law.component(y)?, law.component(z)?);
                for r in all_relations(x, y) {
                    let k1 = f.fmap(&crate::relation::to_kleisli(&r)?)?.then(&ly)?;
                    for s in all_relations(y, z) {
                        let k2 = f.fmap(&crate::relation::to_kleisli(&s)?)?.then(&lz)?;
                        let fz = f.carrier(z)?;
                        let composite = Function::new(k1.source().clone(), crate::functor::powerset(&fz)?, |a| {
                            let mid = k1.apply(a).expect("in domain");
                            Value::set(mid.as_set().expect("set").iter().flat_map(|b| k2.apply(b).expect("in domain").as_set().expect("set").to_vec()))
                        })?;
                        let lhs = from_kleisli(&composite, &fz)?;
                        let rhs = compose(&lam.lift(&r)?, &lam.lift(&s)?)?;
                        if let Some((a, c)) = lhs.first_excess(&rhs).or_else(|| rhs.first_excess(&lhs)) {
                            return Ok(Some(
                                Counterexample::new("Kleisli composite and relational composite differ at (a,c)")
                                    .relation("R", &r)
                                    .relation("S", &s)
                                    .value("a", &a)
                                    .value("c", &c),
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Whether `L(Δ_X) ⊆ Δ_FX` for every universe object.
pub fn diagonal_violation(l: &dyn Lifting, bound: usize) -> Result<Option<Counterexample>> {
    for x in Universe::new(bound).objects() {
        let lifted = l.lift(&diagonal(x))?;
        if let Some((a, c)) = lifted.first_excess(&diagonal(lifted.source())) {
            return Ok(Some(Counterexample::new("(a,b) ∈ L(Δ_X) with a ≠ b").set("X", x).value("a", &a).value("b", &c)));
        }
    }
    Ok(None)
}

fn transport(b: &Bounds, reports: &mut Reports) -> Result<Vec<Check>> {
    let s = Suite::Transport;
    let bound = b.neighbourhood;
    let iota = |l: LiftingRef| transport_lift(NatTrans::Inclusion, l);
    let mut out = Vec::new();

    let mut invalid = None;
    for m in 0..16u8 {
        let t = iota(lj_lift(m)?)?;
        if let Ok(rep) = reports.get(&*t, bound)? {
            if let (None, Verdict::Fail(ce)) = (&invalid, required_verdict(&rep)) {
                invalid = Some(Counterexample { note: format!("{}: {}", t.name(), ce.note), ..*ce });
            }
        }
    }
    out.push(Check::new(s, format!("ι* of each LJ satisfies conditions 1-3 at bound {bound}"), Verdict::from_option(invalid)));

    let mut meet_fail = None;
    for m1 in 0..16u8 {
        for m2 in m1..16u8 {
            let lhs = LiftTable::build(&*iota(meet_lift(&[lj_lift(m1)?, lj_lift(m2)?])?)?, bound)?;
            let rhs = LiftTable::build(&*meet_lift(&[iota(lj_lift(m1)?)?, iota(lj_lift(m2)?)?])?, bound)?;
            if meet_fail.is_none() {
                meet_fail = lhs.first_excess_over(&rhs).or_else(|| rhs.first_excess_over(&lhs));
            }
        }
    }
    out.push(Check::new(s, format!("ι* preserves binary meets of LJ at bound {bound}"), Verdict::from_option(meet_fail)));

    let mut twiddle_fail = None;
    let mut symmetry_fail = None;
    for m in 0..16u8 {
        let l = lj_lift(m)?;
        if twiddle_fail.is_none() {
            let a = LiftTable::build(&*iota(twiddle_lift(l.clone()))?, bound)?;
            let c = LiftTable::build(&*twiddle_lift(iota(l.clone())?), bound)?;
            twiddle_fail = a.first_excess_over(&c).or_else(|| c.first_excess_over(&a));
        }
        if symmetry_fail.is_none() {
            if let (Ok(rep), Ok(trep)) = (reports.get(&*l, bound)?, reports.get(&*iota(l.clone())?, bound)?) {
                if rep.passes(Condition::Symmetry) && !trep.passes(Condition::Symmetry) {
                    symmetry_fail = Some(Counterexample::new(format!("{} is symmetric but its transport is not", l.name())));
                }
            }
        }
    }
    out.push(Check::new(s, format!("ι* commutes with twiddle on LJ at bound {bound}"), Verdict::from_option(twiddle_fail)));
    out.push(Check::new(s, format!("ι* preserves symmetry of LJ at bound {bound}"), Verdict::from_option(symmetry_fail)));

    let mut diag_fail = None;
    let mut diag_preserving = Vec::new();
    for reg in registered_liftings(Functor::Neighbourhood) {
        let l = reg.lifting;
        if verdict(diagonal_violation(&*l, bound))?.is_pass() {
            diag_preserving.push(l.name());
            if diag_fail.is_none() {
                diag_fail = diagonal_violation(&*iota(l.clone())?, bound)?
                    .map(|ce| Counterexample { note: format!("{} preserves diagonals, its transport does not: {}", l.name(), ce.note), ..ce });
            }
        }
    }
    let v = if diag_preserving.is_empty() {
        Verdict::Skipped("no registered diagonal-preserving N-lifting".into())
    } else {
        Verdict::from_option(diag_fail)
    };
    out.push(Check::new(s, format!("ι* preserves diagonal preservation ({}) at bound {bound}", diag_preserving.join(", ")), v));
    Ok(out)
}

fn bisim(b: &Bounds) -> Result<Vec<Check>> {
    let s = Suite::Bisim;
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(b.seed);
    let barr = barr_lift(Functor::Powerset);

    let mut oracle_fail = None;
    for k in 0..50 {
        let (n, m) = (rand::Rng::gen_range(&mut rng, 1..=4), rand::Rng::gen_range(&mut rng, 1..=4));
        let c = Coalgebra::random(Functor::Powerset, n, &mut rng)?;
        let d = Coalgebra::random(Functor::Powerset, m, &mut rng)?;
        let got = greatest_bisim(&*barr, &c, &d)?;
        let want = kripke_bisim_oracle(&c, &d)?;
        if got != want && oracle_fail.is_none() {
            oracle_fail = Some(
                Counterexample::new(format!("instance {k}: barr bisimilarity differs from the oracle"))
                    .relation("engine", &got)
                    .relation("oracle", &want),
            );
        }
    }
    out.push(Check::new(s, "barr bisimilarity agrees with the Kripke oracle on 50 random P-coalgebras", Verdict::from_option(oracle_fail)));

    let tables = (0..16u8).map(|m| LiftTable::build(&*lj_lift(m)?, 2)).collect::<Result<Vec<_>>>()?;
    let mut order_fail = None;
    for k in 0..20 {
        let (n, m) = (rand::Rng::gen_range(&mut rng, 1..=2), rand::Rng::gen_range(&mut rng, 1..=2));
        let c = Coalgebra::random(Functor::Neighbourhood, n, &mut rng)?;
        let d = Coalgebra::random(Functor::Neighbourhood, m, &mut rng)?;
        let bisims = (0..16u8).map(|j| greatest_bisim(&*lj_lift(j)?, &c, &d)).collect::<Result<Vec<_>>>()?;
        for j in 0..16 {
            for jp in 0..16 {
                if tables[j].is_below(&tables[jp]) && !bisims[j].is_subset_of(&bisims[jp]) && order_fail.is_none() {
                    order_fail = Some(Counterexample::new(format!("instance {k}: L_{j} ≤ L_{jp} but bisimilarity is not included")));
                }
            }
        }
    }
    out.push(Check::new(s, "L ≤ L' gives bisimilarity inclusion on 20 random N-coalgebras", Verdict::from_option(order_fail)));

    let mut sound_fail = None;
    let mut max_fail = None;
    for f in FUNCTORS {
        for reg in registered_liftings(f) {
            let l = &reg.lifting;
            for _ in 0..3 {
                let sizes: u32 = if f == Functor::Powerset { 3 } else { 2 };
                let (n, m) = (rand::Rng::gen_range(&mut rng, 1..=sizes), rand::Rng::gen_range(&mut rng, 1..=sizes));
                let c = Coalgebra::random(f, n, &mut rng)?;
                let d = Coalgebra::random(f, m, &mut rng)?;
                let g = greatest_bisim(&**l, &c, &d)?;
                if sound_fail.is_none() && !is_bisimulation(&**l, &c, &d, &g)? {
                    sound_fail = Some(Counterexample::new(format!("{f} {}: greatest bisimulation is not a bisimulation", l.name())).relation("R", &g));
                }
                if max_fail.is_none() && n <= 2 && m <= 2 {
                    for r in all_relations(c.states(), d.states()) {
                        if is_bisimulation(&**l, &c, &d, &r)? && !r.is_subset_of(&g) {
                            max_fail = Some(Counterexample::new(format!("{f} {}: a bisimulation outside the greatest one", l.name())).relation("R", &r));
                            break;
                        }
                    }
                }
            }
        }
    }
    out.push(Check::new(s, "greatest bisimulations are bisimulations for every registered lifting", Verdict::from_option(sound_fail)));
    out.push(Check::new(s, "greatest bisimulations contain every bisimulation at ≤ 2 states", Verdict::from_option(max_fail)));

    let mt = mtilde_lift();
    let mut mt_fail = None;
    for k in 0..10 {
        let (n, m) = (rand::Rng::gen_range(&mut rng, 1..=2), rand::Rng::gen_range(&mut rng, 1..=2));
        let c = Coalgebra::random(Functor::MonotoneNeighbourhood, n, &mut rng)?;
        let d = Coalgebra::random(Functor::MonotoneNeighbourhood, m, &mut rng)?;
        let base = greatest_bisim(&*mt, &c, &d)?;
        for reg in registered_liftings(Functor::MonotoneNeighbourhood).iter().filter(|r| !r.informational) {
            let other = greatest_bisim(&*reg.lifting, &c, &d)?;
            if mt_fail.is_none() && !base.is_subset_of(&other) {
                mt_fail = Some(Counterexample::new(format!("instance {k}: mtilde bisimilarity not inside {}", reg.lifting.name())));
            }
        }
    }
    out.push(Check::new(s, "mtilde bisimilarity is contained in that of every registered M-lifting", Verdict::from_option(mt_fail)));
    Ok(out)
}
