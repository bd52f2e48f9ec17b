use proptest::prelude::*;
use relift::bisim::{greatest_bisim, is_bisimulation, refine_step};
use relift::distlaw::{law_from_lifting, lifting_from_law};
use relift::functor::{pow_mult, pow_unit};
use relift::lifting::{
    barr_lift, lj_lift, meet_lift, mtilde_lift, sim_lift, transport_lift, twiddle_lift, LiftingRef,
};
use relift::relation::{compose, converse, from_kleisli, graph, to_kleisli, totalize};
use relift::{Coalgebra, FiniteSet, Function, Functor, NatTrans, Relation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_relation(max: u32) -> impl Strategy<Value = Relation> {
    (0..=max, 0..=max).prop_flat_map(|(n, m)| {
        let bits = (n * m) as usize;
        proptest::collection::vec(any::<bool>(), bits).prop_map(move |v| {
            let mask = v.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | (b as u64) << i);
            Relation::from_mask(FiniteSet::atoms(n), FiniteSet::atoms(m), mask)
        })
    })
}

fn arb_chain(max: u32) -> impl Strategy<Value = (Relation, Relation)> {
    (0..=max, 0..=max, 0..=max).prop_flat_map(|(n, m, k)| {
        let r = proptest::collection::vec(any::<bool>(), (n * m) as usize);
        let s = proptest::collection::vec(any::<bool>(), (m * k) as usize);
        (r, s).prop_map(move |(r, s)| {
            let mask = |v: &[bool]| v.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | (b as u64) << i);
            (
                Relation::from_mask(FiniteSet::atoms(n), FiniteSet::atoms(m), mask(&r)),
                Relation::from_mask(FiniteSet::atoms(m), FiniteSet::atoms(k), mask(&s)),
            )
        })
    })
}

fn arb_function(max: u32) -> impl Strategy<Value = Function> {
    (0..=max, 1..=max).prop_flat_map(|(n, m)| {
        proptest::collection::vec(0..m as usize, n as usize).prop_map(move |images| {
            Function::from_indices(FiniteSet::atoms(n), FiniteSet::atoms(m), images).unwrap()
        })
    })
}

fn p_liftings() -> Vec<LiftingRef> {
    vec![barr_lift(Functor::Powerset), sim_lift(), twiddle_lift(sim_lift())]
}

fn n_liftings() -> Vec<LiftingRef> {
    vec![lj_lift(1).unwrap(), lj_lift(6).unwrap(), lj_lift(15).unwrap(), twiddle_lift(lj_lift(3).unwrap())]
}

fn m_liftings() -> Vec<LiftingRef> {
    vec![mtilde_lift(), transport_lift(NatTrans::Inclusion, lj_lift(9).unwrap()).unwrap()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn converse_is_involutive_and_reverses_composition((r, s) in arb_chain(4)) {
        prop_assert_eq!(converse(&converse(&r)), r.clone());
        prop_assert_eq!(converse(&compose(&r, &s).unwrap()), compose(&converse(&s), &converse(&r)).unwrap());
    }

    #[test]
    fn kleisli_round_trip(r in arb_relation(4)) {
        let k = to_kleisli(&r).unwrap();
        prop_assert_eq!(from_kleisli(&k, r.target()).unwrap(), r);
    }

    #[test]
    fn totalization_restricts_back(r in arb_relation(3)) {
        let t = totalize(&r);
        prop_assert!(t.relation.is_total() && t.relation.is_surjective());
        let back = compose(&compose(&graph(&t.inject_source), &t.relation).unwrap(), &converse(&graph(&t.inject_target))).unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn functor_preserves_composition(f in arb_function(3), g_images in proptest::collection::vec(0usize..3, 4)) {
        let g = Function::from_indices(f.target().clone(), FiniteSet::atoms(3), g_images[..f.target().len()].to_vec()).unwrap();
        for func in [Functor::Powerset, Functor::Neighbourhood, Functor::MonotoneNeighbourhood] {
            let lhs = func.fmap(&f.then(&g).unwrap()).unwrap();
            let rhs = func.fmap(&f).unwrap().then(&func.fmap(&g).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn powerset_monad_unit_laws(n in 0u32..4) {
        let x = FiniteSet::atoms(n);
        let id = Function::identity(Functor::Powerset.carrier(&x).unwrap());
        let eta_p = pow_unit(&Functor::Powerset.carrier(&x).unwrap()).unwrap();
        let mu = pow_mult(&x).unwrap();
        prop_assert_eq!(eta_p.then(&mu).unwrap(), id.clone());
        let p_eta = Functor::Powerset.fmap(&pow_unit(&x).unwrap()).unwrap();
        prop_assert_eq!(p_eta.then(&mu).unwrap(), id);
    }

    #[test]
    fn p_liftings_are_laxly_functorial_and_monotone((r, s) in arb_chain(3)) {
        for l in p_liftings() {
            let lhs = compose(&l.lift(&r).unwrap(), &l.lift(&s).unwrap()).unwrap();
            prop_assert!(lhs.is_subset_of(&l.lift(&compose(&r, &s).unwrap()).unwrap()), "{}", l.name());
            let bigger = Relation::full(r.source().clone(), r.target().clone());
            prop_assert!(l.lift(&r).unwrap().is_subset_of(&l.lift(&bigger).unwrap()));
        }
    }

    #[test]
    fn n_and_m_liftings_are_laxly_functorial((r, s) in arb_chain(2)) {
        for l in n_liftings().into_iter().chain(m_liftings()) {
            let lhs = compose(&l.lift(&r).unwrap(), &l.lift(&s).unwrap()).unwrap();
            prop_assert!(lhs.is_subset_of(&l.lift(&compose(&r, &s).unwrap()).unwrap()), "{}", l.name());
        }
    }

    #[test]
    fn liftings_contain_graphs_of_images(f in arb_function(2)) {
        for l in p_liftings().into_iter().chain(n_liftings()).chain(m_liftings()) {
            let func = l.functor();
            let lifted = l.lift(&graph(&f)).unwrap();
            prop_assert!(graph(&func.fmap(&f).unwrap()).is_subset_of(&lifted), "{}", l.name());
        }
    }

    #[test]
    fn twiddle_and_meet_are_pointwise(r in arb_relation(2)) {
        for l in n_liftings() {
            let t = twiddle_lift(l.clone());
            prop_assert_eq!(t.lift(&r).unwrap(), converse(&l.lift(&converse(&r)).unwrap()));
            let m = meet_lift(&[l.clone(), t.clone()]).unwrap();
            prop_assert_eq!(m.lift(&r).unwrap(), l.lift(&r).unwrap().intersection(&t.lift(&r).unwrap()).unwrap());
        }
    }

    #[test]
    fn lifting_law_lifting_is_identity(r in arb_relation(2)) {
        for l in p_liftings().into_iter().chain(m_liftings()) {
            let back = lifting_from_law(law_from_lifting(l.clone()));
            prop_assert_eq!(back.lift(&r).unwrap(), l.lift(&r).unwrap(), "{}", l.name());
        }
    }

    #[test]
    fn greatest_bisim_is_a_bisimulation(seed in any::<u64>(), n in 1u32..4, m in 1u32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = Coalgebra::random(Functor::Powerset, n, &mut rng).unwrap();
        let d = Coalgebra::random(Functor::Powerset, m, &mut rng).unwrap();
        for l in p_liftings() {
            let g = greatest_bisim(&*l, &c, &d).unwrap();
            prop_assert!(is_bisimulation(&*l, &c, &d, &g).unwrap());
            prop_assert_eq!(g.intersection(&refine_step(&*l, &c, &d, &g).unwrap()).unwrap(), g.clone());
        }
        let barr = barr_lift(Functor::Powerset);
        let g = greatest_bisim(&*barr, &c, &d).unwrap();
        prop_assert_eq!(converse(&g), greatest_bisim(&*barr, &d, &c).unwrap());
    }

    #[test]
    fn simulation_contains_bisimilarity(seed in any::<u64>(), n in 1u32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = Coalgebra::random(Functor::Powerset, n, &mut rng).unwrap();
        let bis = greatest_bisim(&*barr_lift(Functor::Powerset), &c, &c).unwrap();
        let sim = greatest_bisim(&*sim_lift(), &c, &c).unwrap();
        prop_assert!(bis.is_subset_of(&sim));
        prop_assert!(relift::relation::diagonal(c.states()).is_subset_of(&sim));
    }
}
