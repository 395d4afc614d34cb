use bnc_engine::ffb::*;
use bnc_engine::fixtures::{diag2, m2_scalar, m2_scalar_family, scalar};
use bnc_engine::freeprod::OpRef;
use bnc_engine::moments::MomentEngine;
use bnc_engine::{faces::Faces, BBProbSpace, ChiMap, EpsilonMap, FaceAssignment, MomentSpace, Side};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn embedded(cap: usize) -> FfbEmbedding {
    let space = m2_scalar();
    let fam = m2_scalar_family(&space);
    let (emb, rep) = embed_ffb_family(&space, &fam, cap).unwrap();
    assert!(rep.all_pass(), "{}", rep.to_text());
    emb
}

#[test]
fn embedded_system_holds_and_corruption_is_caught() {
    let emb = embedded(3);
    let r = check_ffb_system(emb.model(), emb.system(), 3).unwrap();
    assert!(r.all_pass(), "{}", r.to_text());
    let r = check_ffb_system(emb.model(), &emb.corrupted_system(), 3).unwrap();
    assert!(!r.passed("annihilation-d"));
    assert!(!r.passed("boolean-moment-d"));
    assert!(r.passed("annihilation-c"));
}

#[test]
fn embedded_family_is_independent() {
    let emb = embedded(3);
    let r = check_ffb_independence(emb.model(), emb.family(), &emb, 3).unwrap();
    assert!(r.all_pass(), "{}", r.to_text());
}

#[test]
fn dependent_and_perturbed_families_fail() {
    let space = m2_scalar();
    let fam = m2_scalar_family(&space);
    let theta = ThetaRepresentation::new(&space, &fam.colours).unwrap();
    assert!(!check_ffb_independence(&space, &fam, &theta, 3).unwrap().all_pass());

    let emb = embedded(3);
    let p = Perturbed::new(emb.model(), emb.family(), emb.model().base().one());
    assert!(!check_ffb_independence(&p, emb.family(), &emb, 3).unwrap().all_pass());
}

#[test]
fn single_colour_is_trivially_independent() {
    let space = m2_scalar();
    let fam = m2_scalar_family(&space);
    let one = FaceAssignment::new(vec![(fam.colours[0], fam.faces[0].clone())]).unwrap();
    let theta = ThetaRepresentation::new(&space, &one.colours).unwrap();
    let r = check_ffb_independence(&space, &one, &theta, 4).unwrap();
    assert!(r.all_pass(), "{}", r.to_text());
}

#[test]
fn pipeline_and_cumulants_on_embedding() {
    let emb = embedded(3);
    let r = verify_system_gives_ffb(&emb, 3, 3).unwrap();
    assert!(r.all_pass(), "{}", r.to_text());
    let r = ffb_cumulant_checks(&emb, 3).unwrap();
    assert!(r.all_pass(), "{}", r.to_text());
}

/// Without Boolean letters the independence check reduces to the bi-free
/// moment check on the same words.
#[test]
fn bfree_words_agree_with_bifree_check() {
    let emb = embedded(3);
    let engine = MomentEngine::new(emb.model());
    for n in 1..=3 {
        for w in family_words(emb.family(), n, &[Side::Left, Side::Right]) {
            let r = engine.bifree_moment_check(&w.chi_hat, &w.eps_hat, &w.elems).unwrap();
            assert!(r.all_pass(), "{} {}: {}", w.chi_hat, w.eps_hat, r.to_text());
        }
    }
}

fn theta_ops(space: &BBProbSpace, chi: &ChiMap, eps: &EpsilonMap, seed: u64) -> (ThetaModel, Vec<OpRef>) {
    let mut colours = eps.colours().to_vec();
    colours.sort_unstable();
    colours.dedup();
    if colours.len() == 1 {
        colours.push(colours[0] + 1);
    }
    let tm = ThetaModel::new(space, &colours, chi.len() + 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ops = chi
        .sides()
        .iter()
        .zip(eps.colours())
        .enumerate()
        .map(|(i, (s, c))| {
            let side = if *s == Side::Bool { Side::Left } else { *s };
            let z = space.random_side_element(side, &mut rng).unwrap();
            tm.operator(*c, *s, &z, &format!("Z{i}")).unwrap()
        })
        .collect();
    (tm, ops)
}

#[test]
fn theta_model_mixed_cumulants_vanish() {
    for (space, seed) in [(scalar(), 1), (diag2(), 2), (m2_scalar(), 3)] {
        for (chi, eps) in [("lr", "1,2"), ("lrl", "1,2,1"), ("llrr", "1,2,2,1"), ("rlrlr", "2,1,1,2,1")] {
            let (chi, eps): (ChiMap, EpsilonMap) = (chi.parse().unwrap(), eps.parse().unwrap());
            let (tm, ops) = theta_ops(&space, &chi, &eps, seed);
            let r = MomentEngine::new(tm.model()).bifree_moment_check(&chi, &eps, &ops).unwrap();
            assert!(r.all_pass(), "{chi} {eps}: {}", r.to_text());
        }
    }
}

#[test]
fn theta_model_product_operator_breaks_vanishing() {
    let space = m2_scalar();
    let (chi, eps): (ChiMap, EpsilonMap) = ("lrl".parse().unwrap(), "1,2,1".parse().unwrap());
    let (tm, mut ops) = theta_ops(&space, &chi, &eps, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let z = space.random_side_element(Side::Left, &mut rng).unwrap();
    let w = tm.operator(2, Side::Left, &z, "W").unwrap();
    ops[2] = OpRef::product("Z2W", &[ops[2].clone(), w]);
    let r = MomentEngine::new(tm.model()).bifree_moment_check(&chi, &eps, &ops).unwrap();
    assert!(!r.all_pass());
}

#[test]
fn faces_builder_rejects_repeated_colour() {
    let space = m2_scalar();
    let x = space.algebra().one();
    let f = Faces { left: vec![x.clone()], right: vec![x.clone()], boolean: vec![] };
    assert!(FaceAssignment::new(vec![(1, f.clone()), (1, f)]).is_err());
}
