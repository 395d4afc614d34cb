use bnc_engine::freeprod::lrdecomp::{random_side_operator, verify_lr_decomposition, LrOperand};
use bnc_engine::freeprod::{Bimodule, FreeProduct};
use bnc_engine::linalg::Matrix;
use bnc_engine::rational::q;
use bnc_engine::{Side, StructuredAlgebra};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// X° = Q with d_a acting on the left and d_b on the right.
fn corner(a: usize, b: usize) -> Bimodule {
    let base = StructuredAlgebra::diagonal_algebra(2);
    let act = |k: usize| (0..2).map(|i| Matrix::scalar(1, &q((i == k) as i64))).collect::<Vec<_>>();
    Bimodule::new(base, vec![format!("x{a}{b}")], act(a), act(b)).unwrap()
}

fn scalar_module(kdim: usize) -> Bimodule {
    let base = StructuredAlgebra::rationals();
    let labels = (0..kdim).map(|i| format!("x{i}")).collect();
    Bimodule::new(base, labels, vec![Matrix::identity(kdim)], vec![Matrix::identity(kdim)]).unwrap()
}

fn words(n: usize) -> Vec<(Vec<Side>, Vec<u32>)> {
    let mut out = Vec::new();
    for s in 0..1u32 << n {
        for c in 0..1u32 << n {
            let sides = (0..n).map(|i| if s >> i & 1 == 1 { Side::Right } else { Side::Left }).collect();
            let cols = (0..n).map(|i| (c >> i & 1) + 1).collect();
            out.push((sides, cols));
        }
    }
    out
}

fn run(fp: &FreeProduct, max_n: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 1..=max_n {
        for (sides, cols) in words(n) {
            let ops: Vec<LrOperand> = sides
                .iter()
                .zip(&cols)
                .map(|(s, c)| {
                    let comp = fp.component(fp.index_of(*c).unwrap());
                    let t = random_side_operator(comp, *s, &mut rng).unwrap();
                    LrOperand::new(fp, *s, *c, t).unwrap()
                })
                .collect();
            for mask in 0..1u32 << n {
                let projected: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                let rep = verify_lr_decomposition(fp, &ops, &projected).unwrap();
                assert!(rep.all_pass(), "{}", rep.to_text());
            }
        }
    }
}

#[test]
fn scalar_base_words_up_to_three() {
    let fp = FreeProduct::new(vec![(1, scalar_module(1)), (2, scalar_module(2))], 4).unwrap();
    run(&fp, 3, 7);
}

#[test]
fn diagonal_base_with_nontrivial_junctions() {
    let fp = FreeProduct::new(vec![(1, corner(0, 1)), (2, corner(1, 0))], 4).unwrap();
    run(&fp, 3, 11);
}

/// X° = Q² with d_1 acting on the left as diag(1,0) and on the right as diag(0,1).
fn mixed() -> Bimodule {
    let base = StructuredAlgebra::diagonal_algebra(2);
    let diag = |a: i64, b: i64| {
        let mut m = Matrix::zeros(2, 2);
        m.set(0, 0, q(a));
        m.set(1, 1, q(b));
        m
    };
    Bimodule::new(base, vec!["u".into(), "v".into()], vec![diag(1, 0), diag(0, 1)], vec![diag(0, 1), diag(1, 0)]).unwrap()
}

#[test]
fn words_of_length_four() {
    let fp = FreeProduct::new(vec![(1, scalar_module(2)), (2, scalar_module(1))], 4).unwrap();
    run_n(&fp, 4, 5);
    let fp = FreeProduct::new(vec![(1, mixed()), (2, corner(1, 0))], 4).unwrap();
    run_n(&fp, 4, 9);
}

fn run_n(fp: &FreeProduct, n: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (sides, cols) in words(n) {
        let ops: Vec<LrOperand> = sides
            .iter()
            .zip(&cols)
            .map(|(s, c)| {
                let comp = fp.component(fp.index_of(*c).unwrap());
                LrOperand::new(fp, *s, *c, random_side_operator(comp, *s, &mut rng).unwrap()).unwrap()
            })
            .collect();
        for mask in 0..1u32 << n {
            let projected: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let rep = verify_lr_decomposition(fp, &ops, &projected).unwrap();
            assert!(rep.all_pass(), "{}", rep.to_text());
        }
    }
}
