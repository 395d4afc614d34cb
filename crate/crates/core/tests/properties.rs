mod common;

use bnc_engine::freeprod::build_bimodule_from_space;
use bnc_engine::freeprod::lrdecomp::{check_projection_laws, random_side_operator};
use bnc_engine::freeprod::FreeProduct;
use bnc_engine::moments::MomentEngine;
use bnc_engine::{fixtures, lr_replacement, BncContext, ChiMap, EpsilonMap, SetPartition, Side};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn chi_strategy(max: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vec!['l', 'r']), 1..=max).prop_map(|v| v.into_iter().collect())
}

fn space_strategy() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["scalar", "diag2", "m2-scalar"])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn meet_and_join_are_lattice_bounds(chi in chi_strategy(6), i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let ctx = BncContext::new(chi.parse().unwrap()).unwrap();
        let all = ctx.enumerate().unwrap();
        let (a, b) = (i.get(&all), j.get(&all));
        let m = ctx.meet(a, b).unwrap();
        let u = ctx.join(a, b).unwrap();
        prop_assert!(ctx.is_bnc(&m).unwrap() && ctx.is_bnc(&u).unwrap());
        prop_assert!(m.refines(a) && m.refines(b) && a.refines(&u) && b.refines(&u));
        for t in &all {
            if t.refines(a) && t.refines(b) {
                prop_assert!(t.refines(&m));
            }
            if a.refines(t) && b.refines(t) {
                prop_assert!(u.refines(t));
            }
        }
        prop_assert_eq!(&ctx.from_nc(&ctx.to_nc(a)), a);
    }

    #[test]
    fn mobius_sums_restrict_to_ffb(chi_hat in prop::collection::vec(prop::sample::select(vec!['l', 'r', 'b']), 1..=4), i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let chi_hat: String = chi_hat.into_iter().collect();
        let fctx = lr_replacement(&chi_hat.parse().unwrap()).unwrap();
        let ffb = fctx.enumerate().unwrap();
        let ctx = fctx.bnc();
        let (p, s) = (i.get(&ffb), j.get(&ffb));
        let between: Vec<&SetPartition> = ffb.iter().filter(|t| p.refines(t) && t.refines(s)).collect();
        let lower: i64 = between.iter().map(|t| ctx.mobius(p, t).unwrap()).sum();
        let upper: i64 = between.iter().map(|t| ctx.mobius(t, s).unwrap()).sum();
        let delta = i64::from(p == s);
        if p.refines(s) {
            prop_assert_eq!(lower, delta);
            prop_assert_eq!(upper, delta);
        }
        prop_assert!(fctx.bottom().refines(p));
    }

    #[test]
    fn e_pi_is_order_independent(chi in chi_strategy(5), name in space_strategy(), k in any::<prop::sample::Index>(), seed in 0u64..1000) {
        let space = fixtures::by_name(name).unwrap();
        let chi: ChiMap = chi.parse().unwrap();
        let ctx = BncContext::new(chi.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z: Vec<_> = chi.sides().iter().map(|s| space.random_side_element(*s, &mut rng).unwrap()).collect();
        let engine = MomentEngine::new(&space);
        let all = ctx.enumerate().unwrap();
        let pi = k.get(&all);
        let fixed = engine.e_pi(&ctx, pi, &z).unwrap();
        for _ in 0..3 {
            prop_assert_eq!(&engine.e_pi_random_order(&ctx, pi, &z, &mut rng).unwrap(), &fixed);
        }
    }

    #[test]
    fn cumulants_invert_moments(chi in chi_strategy(4), name in space_strategy(), seed in 0u64..1000) {
        let space = fixtures::by_name(name).unwrap();
        let chi: ChiMap = chi.parse().unwrap();
        let ctx = BncContext::new(chi.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z: Vec<_> = chi.sides().iter().map(|s| space.random_side_element(*s, &mut rng).unwrap()).collect();
        let engine = MomentEngine::new(&space);
        let kt = engine.cumulant_table(&ctx, &z).unwrap();
        for (pi, e) in &engine.moment_table(&ctx, &z).unwrap().entries {
            let mut acc = space.base().zero();
            for (s, k) in &kt.entries {
                if s.refines(pi) {
                    acc = acc.add(k).unwrap();
                }
            }
            prop_assert_eq!(&acc, e);
        }
        // the full partition carries the plain moment
        let full = SetPartition::full(chi.len());
        let direct = space.expect(&space.algebra().product(&z).unwrap()).unwrap();
        prop_assert_eq!(engine.e_pi(&ctx, &full, &z).unwrap(), direct);
    }

    #[test]
    fn theta_is_multiplicative(name in space_strategy(), seed in 0u64..1000) {
        let space = fixtures::by_name(name).unwrap();
        let module = build_bimodule_from_space(&space).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = space.random_side_element(Side::Left, &mut rng).unwrap();
        let y = space.random_side_element(Side::Right, &mut rng).unwrap();
        let xy = space.algebra().mul(&x, &y).unwrap();
        let lhs = module.theta(&xy).unwrap();
        let rhs = module.theta(&x).unwrap().mul(&module.theta(&y).unwrap());
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(module.theta(&space.algebra().one()).unwrap(), bnc_engine::linalg::Matrix::identity(module.module.dim()));
    }

    #[test]
    fn projections_commute_with_left_faces(name in space_strategy(), seed in 0u64..1000, colour in 1u32..=2) {
        let space = fixtures::by_name(name).unwrap();
        let x = build_bimodule_from_space(&space).unwrap().module;
        let fp = FreeProduct::new(vec![(1, x.clone()), (2, x.clone())], 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_side_operator(&x, Side::Left, &mut rng).unwrap();
        let rep = check_projection_laws(&fp, colour, &t).unwrap();
        prop_assert!(rep.all_pass(), "{}", rep.to_text());
    }

    #[test]
    fn colour_and_partition_strings_round_trip(chi in chi_strategy(8), cols in prop::collection::vec(1u32..5, 1..8), labels in prop::collection::vec(0usize..4, 0..8)) {
        let c: ChiMap = chi.parse().unwrap();
        prop_assert_eq!(c.to_string().parse::<ChiMap>().unwrap(), c);
        let e = EpsilonMap::new(cols);
        prop_assert_eq!(e.to_string().parse::<EpsilonMap>().unwrap(), e);
        let p = SetPartition::from_labels(&labels);
        let norm = common::normalize(&labels);
        prop_assert_eq!(p.rgs(), norm.as_slice());
        prop_assert_eq!(SetPartition::parse(&p.to_rgs_string()).unwrap(), p.clone());
        if p.n() > 0 {
            prop_assert_eq!(SetPartition::parse(&p.to_block_string()).unwrap(), p);
        }
    }
}
