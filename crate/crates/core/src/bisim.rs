//! Coalgebras and lifting-parameterized bisimilarity.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functor::{first_up_closure_gap, powerset, Functor};
use crate::lifting::Lifting;
use crate::relation::{Function, Relation};
use crate::value::{FiniteSet, Value};

/// A coalgebra `c : X → FX` on a finite state set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coalgebra {
    functor: Functor,
    states: FiniteSet,
    structure: Vec<Value>,
}

impl Coalgebra {
    /// `structure[i]` is the image of the `i`-th state.
    pub fn new(functor: Functor, states: FiniteSet, structure: Vec<Value>) -> Result<Self> {
        if structure.len() != states.len() {
            return Err(Error::contract(format!(
                "structure has {} entries for {} states",
                structure.len(),
                states.len()
            )));
        }
        for (x, v) in states.iter().zip(&structure) {
            if functor == Functor::MonotoneNeighbourhood && Functor::Neighbourhood.is_element(&states, v) {
                if let Some((u, w)) = first_up_closure_gap(&states, v) {
                    return Err(Error::contract(format!(
                        "image {v} of {x} is not up-closed: contains {u} but not {w}"
                    )));
                }
            }
            if !functor.is_element(&states, v) {
                return Err(Error::contract(format!("image {v} of {x} is not in {functor}{states}")));
            }
        }
        Ok(Coalgebra { functor, states, structure })
    }

    pub fn from_function(functor: Functor, f: &Function) -> Result<Self> {
        let images = (0..f.source().len()).map(|i| f.image(i).clone()).collect();
        Coalgebra::new(functor, f.source().clone(), images)
    }

    pub fn functor(&self) -> Functor {
        self.functor
    }

    pub fn states(&self) -> &FiniteSet {
        &self.states
    }

    pub fn structure(&self) -> &[Value] {
        &self.structure
    }

    pub fn image(&self, i: usize) -> &Value {
        &self.structure[i]
    }

    /// A random coalgebra on `{a0, ..., a(n-1)}`. `P` and `N` images are
    /// uniform; `M` images are up-closures of a random family.
    pub fn random(functor: Functor, n: u32, rng: &mut impl Rng) -> Result<Self> {
        let states = FiniteSet::atoms(n);
        let subsets = powerset(&states)?;
        let structure = (0..n)
            .map(|_| match functor {
                Functor::Powerset => Ok(Value::set(states.iter().filter(|_| rng.gen_bool(0.5)).cloned())),
                Functor::Neighbourhood => Ok(Value::set(subsets.iter().filter(|_| rng.gen_bool(0.5)).cloned())),
                Functor::MonotoneNeighbourhood => {
                    let gens: Vec<&Value> = subsets.iter().filter(|_| rng.gen_bool(0.3)).collect();
                    Ok(Value::set(subsets.iter().filter(|u| gens.iter().any(|g| g.is_subset_of(u))).cloned()))
                }
                Functor::Identity => Ok(states.get(rng.gen_range(0..n as usize)).clone()),
                Functor::Constant(0) => Err(Error::contract("Const(0) has no coalgebra on a nonempty set")),
                Functor::Constant(k) => Ok(Value::atom(rng.gen_range(0..k))),
            })
            .collect::<Result<Vec<_>>>()?;
        Coalgebra::new(functor, states, structure)
    }
}

fn check_compatible(l: &dyn Lifting, c: &Coalgebra, d: &Coalgebra) -> Result<()> {
    if c.functor != l.functor() || d.functor != l.functor() {
        return Err(Error::contract(format!(
            "lifting {} of {} used with coalgebras of {} and {}",
            l.name(),
            l.functor(),
            c.functor,
            d.functor
        )));
    }
    Ok(())
}

/// `{(x, y) | (c(x), d(y)) ∈ L(R)}`.
pub fn refine_step(l: &dyn Lifting, c: &Coalgebra, d: &Coalgebra, r: &Relation) -> Result<Relation> {
    check_compatible(l, c, d)?;
    if r.source() != &c.states || r.target() != &d.states {
        return Err(Error::contract("relation does not run between the two state sets"));
    }
    let rows = (0..c.states.len())
        .into_par_iter()
        .map(|i| {
            (0..d.states.len())
                .map(|j| l.relates(r, c.image(i), d.image(j)))
                .collect::<Result<Vec<bool>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Relation::from_index_fn(c.states.clone(), d.states.clone(), |i, j| rows[i][j]))
}

/// The greatest `R` with `R ⊆ refine_step(R)`, by descending iteration
/// from the full relation.
pub fn greatest_bisim(l: &dyn Lifting, c: &Coalgebra, d: &Coalgebra) -> Result<Relation> {
    let mut r = Relation::full(c.states.clone(), d.states.clone());
    loop {
        let next = r.intersection(&refine_step(l, c, d, &r)?)?;
        if next == r {
            return Ok(r);
        }
        r = next;
    }
}

/// Whether `R ⊆ refine_step(R)`.
pub fn is_bisimulation(l: &dyn Lifting, c: &Coalgebra, d: &Coalgebra, r: &Relation) -> Result<bool> {
    Ok(r.is_subset_of(&refine_step(l, c, d, r)?))
}

/// Strong bisimilarity of two Kripke (`P`) coalgebras, by naive iterated
/// forth/back refinement on successor sets.
pub fn kripke_bisim_oracle(c: &Coalgebra, d: &Coalgebra) -> Result<Relation> {
    if c.functor != Functor::Powerset || d.functor != Functor::Powerset {
        return Err(Error::contract("the Kripke oracle needs two P-coalgebras"));
    }
    let succ = |k: &Coalgebra| -> Vec<Vec<usize>> {
        k.structure
            .iter()
            .map(|v| v.as_set().unwrap_or(&[]).iter().filter_map(|s| k.states.index_of(s)).collect())
            .collect()
    };
    let (cs, ds) = (succ(c), succ(d));
    let (n, m) = (cs.len(), ds.len());
    let mut rel = vec![vec![true; m]; n];
    loop {
        let mut changed = false;
        for x in 0..n {
            for y in 0..m {
                if !rel[x][y] {
                    continue;
                }
                let forth = cs[x].iter().all(|&x2| ds[y].iter().any(|&y2| rel[x2][y2]));
                let back = ds[y].iter().all(|&y2| cs[x].iter().any(|&x2| rel[x2][y2]));
                if !(forth && back) {
                    rel[x][y] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(Relation::from_index_fn(c.states.clone(), d.states.clone(), |i, j| rel[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::{barr_lift, top_lift};
    use crate::universe::all_relations;

    fn two_state() -> Coalgebra {
        let s = |t: &str| t.parse::<Value>().unwrap();
        Coalgebra::new(Functor::Powerset, FiniteSet::atoms(2), vec![s("{a1}"), s("{}")]).unwrap()
    }

    #[test]
    fn two_state_example() {
        let c = two_state();
        let b = barr_lift(Functor::Powerset);
        let full = Relation::full(c.states().clone(), c.states().clone());
        let diag = crate::relation::diagonal(c.states());
        assert_eq!(refine_step(&*b, &c, &c, &full).unwrap(), diag);
        assert_eq!(greatest_bisim(&*b, &c, &c).unwrap(), diag);
        assert_eq!(kripke_bisim_oracle(&c, &c).unwrap(), diag);
        assert!(!is_bisimulation(&*b, &c, &c, &full).unwrap());
        assert!(is_bisimulation(&*b, &c, &c, &Relation::empty(c.states().clone(), c.states().clone())).unwrap());
        let t = top_lift(Functor::Powerset);
        assert_eq!(refine_step(&*t, &c, &c, &Relation::empty(c.states().clone(), c.states().clone())).unwrap(), full);
    }

    #[test]
    fn single_dead_state() {
        let c = Coalgebra::new(Functor::Powerset, FiniteSet::atoms(1), vec![Value::empty_set()]).unwrap();
        assert_eq!(kripke_bisim_oracle(&c, &c).unwrap().len(), 1);
    }

    #[test]
    fn maximality_at_two_states() {
        let b = barr_lift(Functor::Powerset);
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(7);
        for _ in 0..10 {
            let c = Coalgebra::random(Functor::Powerset, 2, &mut rng).unwrap();
            let d = Coalgebra::random(Functor::Powerset, 2, &mut rng).unwrap();
            let g = greatest_bisim(&*b, &c, &d).unwrap();
            assert!(is_bisimulation(&*b, &c, &d, &g).unwrap());
            for r in all_relations(c.states(), d.states()) {
                if is_bisimulation(&*b, &c, &d, &r).unwrap() {
                    assert!(r.is_subset_of(&g));
                }
            }
        }
    }

    #[test]
    fn rejects_bad_structures() {
        let s = |t: &str| t.parse::<Value>().unwrap();
        assert!(Coalgebra::new(Functor::Powerset, FiniteSet::atoms(1), vec![s("{a3}")]).is_err());
        assert!(Coalgebra::new(Functor::Powerset, FiniteSet::atoms(2), vec![s("{}")]).is_err());
        let err = Coalgebra::new(Functor::MonotoneNeighbourhood, FiniteSet::atoms(2), vec![s("{{a0}}"), s("{}")]).unwrap_err();
        assert!(err.to_string().contains("{a0,a1}"), "{err}");
        assert!(Coalgebra::new(Functor::MonotoneNeighbourhood, FiniteSet::atoms(1), vec![s("{{a0}}")]).is_ok());
        let m = two_state();
        assert!(greatest_bisim(&*crate::lifting::mtilde_lift(), &m, &m).is_err());
    }

    #[test]
    fn random_coalgebras_are_valid() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1);
        for f in [Functor::Powerset, Functor::Neighbourhood, Functor::MonotoneNeighbourhood, Functor::Identity] {
            for n in 1..=3 {
                Coalgebra::random(f, n, &mut rng).unwrap();
            }
        }
    }
}
