mod common;

use bnc_engine::fixtures;
use bnc_engine::lr::{enumerate_lr, filter_boolean, lateral_closure, lr_k};
use bnc_engine::{lr_replacement, BncContext, ChiMap, EpsilonMap, SetPartition};
use common::*;
use std::collections::BTreeSet;

fn rgs_set(ps: &[SetPartition]) -> BTreeSet<Vec<usize>> {
    ps.iter().map(|p| p.rgs().to_vec()).collect()
}

#[test]
fn bnc_matches_filter_up_to_seven() {
    for n in 0..=7 {
        for chi in words("lr", n) {
            let ctx = BncContext::new(chi.parse().unwrap()).unwrap();
            let got = rgs_set(&ctx.enumerate().unwrap());
            let want: BTreeSet<Vec<usize>> = bnc_filter(&chi).into_iter().collect();
            assert_eq!(got, want, "{chi}");
            assert_eq!(got.len(), catalan(n));
        }
    }
}

#[test]
fn mobius_matches_recursion_up_to_five() {
    for n in 1..=5 {
        for chi in words("lr", n) {
            let ctx = BncContext::new(chi.parse().unwrap()).unwrap();
            let elems = bnc_filter(&chi);
            let mu = mobius_table(&elems);
            let parts: Vec<SetPartition> = elems.iter().map(|p| SetPartition::from_rgs(p.clone()).unwrap()).collect();
            for (x, a) in parts.iter().enumerate() {
                for (y, b) in parts.iter().enumerate() {
                    let want = mu.get(&(x, y)).copied().unwrap_or(0);
                    assert_eq!(ctx.mobius(a, b).unwrap(), want, "{chi} {a} {b}");
                }
            }
        }
    }
}

#[test]
fn mobius_column_lists_the_lower_interval() {
    let ctx = BncContext::new("lrrl".parse().unwrap()).unwrap();
    let top = SetPartition::full(4);
    let col = ctx.mobius_column(&top).unwrap();
    assert_eq!(col.len(), catalan(4));
    assert_eq!(col.iter().map(|(_, m)| m).sum::<i64>(), 0);
    // μ(0, 1) in NC(4) is the signed Catalan number -C_3
    let bottom = SetPartition::singletons(4);
    assert_eq!(ctx.mobius(&bottom, &top).unwrap(), -5);
}

#[test]
fn ffb_lattice_is_upper_interval() {
    for m in 1..=5 {
        for chi_hat in words("lrb", m) {
            let (chi, bottom) = expand(&chi_hat);
            if chi.len() > 7 {
                continue;
            }
            let fctx = lr_replacement(&chi_hat.parse().unwrap()).unwrap();
            assert_eq!(fctx.chi().to_string(), chi);
            assert_eq!(fctx.bottom().rgs(), normalize(&bottom).as_slice());
            let got = rgs_set(&fctx.enumerate().unwrap());
            let want: BTreeSet<Vec<usize>> = bnc_filter(&chi).into_iter().filter(|p| refines(&bottom, p)).collect();
            assert_eq!(got, want, "{chi_hat}");
        }
    }
}

#[test]
fn lr_family_matches_string_simulation() {
    for n in 1..=4 {
        for chi in words("lr", n) {
            for eps in words("12", n) {
                let eps_s: Vec<String> = eps.chars().map(|c| c.to_string()).collect();
                let e: EpsilonMap = eps_s.join(",").parse().unwrap();
                let fam = enumerate_lr(&chi.parse().unwrap(), &e).unwrap();
                let zero: BTreeSet<Vec<usize>> =
                    lr_k(&fam, 0).diagrams.iter().map(|d| d.to_partition().unwrap().rgs().to_vec()).collect();
                let col: Vec<u32> = eps.chars().map(|c| c.to_digit(10).unwrap()).collect();
                let (total, want) = lr_oracle(&chi, &col);
                let want: BTreeSet<Vec<usize>> = want.into_iter().collect();
                assert_eq!(zero, want, "{chi} {eps}");
                assert_eq!(fam.len(), total, "{chi} {eps}");
                assert!(want.iter().all(|p| bnc_filter(&chi).contains(p)));
                let lat = lateral_closure(&fam);
                assert!(fam.diagrams.iter().all(|d| lat.contains(d)));
                let (kept, removed) = filter_boolean(&fam, 1);
                assert_eq!(kept.len() + removed.len(), fam.len());
            }
        }
    }
}

#[test]
fn fixtures_and_axioms() {
    for name in ["scalar", "diag2", "m2-scalar"] {
        let rep = fixtures::by_name(name).unwrap().check_bb_axioms();
        assert!(rep.all_pass(), "{name}: {}", rep.to_text());
    }
    let rep = fixtures::diag2_bad().check_bb_axioms();
    assert!(!rep.all_pass());
    assert!(!rep.failures().is_empty());
}

#[test]
fn chi_parse_errors() {
    assert!("lrq".parse::<ChiMap>().is_err());
    assert!(BncContext::new("lbr".parse().unwrap()).is_err());
}
