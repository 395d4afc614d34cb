mod common;

use bnc_engine::ffb::*;
use bnc_engine::fixtures::{m2_scalar, m2_scalar_family};
use bnc_engine::freeprod::lrdecomp::{check_projection_laws, random_side_operator, verify_lr_decomposition, LrOperand};
use bnc_engine::freeprod::{build_bimodule_from_space, Bimodule, FreeProduct};
use bnc_engine::linalg::Matrix;
use bnc_engine::lr::{enumerate_lr, lr_k};
use bnc_engine::rational::q;
use bnc_engine::{fixtures, lr_replacement, BncContext, MomentSpace, Report, SetPartition, Side, StructuredAlgebra};
use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashMap};
use std::io::Write;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn report_ok(r: &Report, what: &str) -> Result<(), String> {
    ensure(r.all_pass(), || format!("{what}: {}", r.to_text()))
}

fn in_time(t: Instant, limit: Duration) -> Result<Duration, String> {
    let e = t.elapsed();
    ensure(e < limit, || format!("took {e:?}, limit {limit:?}"))?;
    Ok(e)
}

struct Oracle {
    bnc: HashMap<String, BTreeSet<Vec<usize>>>,
}

impl Oracle {
    fn bnc(&mut self, chi: &str) -> &BTreeSet<Vec<usize>> {
        self.bnc.entry(chi.to_string()).or_insert_with(|| bnc_filter(chi).into_iter().collect())
    }
}

fn rgs_set(ps: &[SetPartition]) -> BTreeSet<Vec<usize>> {
    ps.iter().map(|p| p.rgs().to_vec()).collect()
}

fn lattice_counts(oracle: &mut Oracle) -> Outcome {
    let t = Instant::now();
    let mut checked = 0;
    for n in 0..=8 {
        for chi in words("lr", n) {
            let got = rgs_set(&BncContext::new(chi.parse().unwrap()).map_err(|e| e.to_string())?.enumerate().unwrap());
            let want = oracle.bnc(&chi);
            ensure(&got == want, || format!("{chi}: engine and filter disagree"))?;
            ensure(got.len() == catalan(n), || format!("{chi}: {} != Catalan({n})", got.len()))?;
            checked += 1;
        }
    }
    let e = in_time(t, Duration::from_secs(10))?;
    Ok(format!("{checked} words, |BNC| = 1 1 2 5 14 42 132 429 1430, {e:.2?}"))
}

fn figure_facts() -> Outcome {
    let chi = "lrlllr";
    let ctx = BncContext::new(chi.parse().unwrap()).unwrap();
    let pi = SetPartition::parse("{1,2,5,6},{3,4}").unwrap();
    let sigma = SetPartition::parse("{1,4,5,6},{2,3}").unwrap();
    ensure(ctx.is_bnc(&pi).unwrap(), || "pi rejected".into())?;
    ensure(!ctx.is_bnc(&sigma).unwrap(), || "sigma accepted".into())?;
    let order = two_sided_order(chi);
    ensure(!crosses_in_order(pi.rgs(), &order) && crosses_in_order(sigma.rgs(), &order), || "oracle disagrees".into())?;
    Ok(format!("pi in BNC({chi}), sigma not"))
}

fn mobius_identities() -> Outcome {
    let mut intervals = 0usize;
    for n in 1..=6 {
        for chi in words("lr", n) {
            let ctx = BncContext::new(chi.parse().unwrap()).unwrap();
            let all = ctx.enumerate().unwrap();
            let m = all.len();
            let leq: Vec<Vec<bool>> = all.iter().map(|a| all.iter().map(|b| a.refines(b)).collect()).collect();
            let mut mu = vec![vec![0i64; m]; m];
            for x in 0..m {
                for y in 0..m {
                    if leq[x][y] {
                        mu[x][y] = ctx.mobius(&all[x], &all[y]).unwrap();
                    }
                }
            }
            for x in 0..m {
                for y in 0..m {
                    if !leq[x][y] {
                        continue;
                    }
                    let mid = (0..m).filter(|&z| leq[x][z] && leq[z][y]);
                    let lower: i64 = mid.clone().map(|z| mu[x][z]).sum();
                    let upper: i64 = mid.map(|z| mu[z][y]).sum();
                    let delta = i64::from(x == y);
                    ensure(lower == delta && upper == delta, || format!("{chi}: interval [{}, {}]", all[x], all[y]))?;
                    intervals += 1;
                }
            }
        }
    }
    Ok(format!("{intervals} intervals over all words with n <= 6"))
}

fn lr_example() -> Outcome {
    let fam = enumerate_lr(&"lrl".parse().unwrap(), &"1,1,2".parse().unwrap()).unwrap();
    ensure(fam.len() == 8, || format!("|LR| = {}", fam.len()))?;
    let zero: BTreeSet<String> =
        lr_k(&fam, 0).diagrams.iter().map(|d| d.to_partition().unwrap().to_block_string()).collect();
    let want: BTreeSet<String> = ["{1},{2},{3}", "{1,2},{3}"].iter().map(|s| s.to_string()).collect();
    ensure(zero == want, || format!("LR_0 = {zero:?}"))?;
    let (total, oracle_zero) = lr_oracle("lrl", &[1, 1, 2]);
    ensure(total == 8 && oracle_zero.len() == 2, || "string simulation disagrees".into())?;
    Ok("|LR| = 8, LR_0 = {{1},{2},{3}}, {{1,2},{3}}".into())
}

fn scalar_module(kdim: usize) -> Bimodule {
    let base = StructuredAlgebra::rationals();
    let labels = (0..kdim).map(|i| format!("x{i}")).collect();
    Bimodule::new(base, labels, vec![Matrix::identity(kdim)], vec![Matrix::identity(kdim)]).unwrap()
}

fn corner(a: usize, b: usize) -> Bimodule {
    let base = StructuredAlgebra::diagonal_algebra(2);
    let act = |k: usize| (0..2).map(|i| Matrix::scalar(1, &q((i == k) as i64))).collect::<Vec<_>>();
    Bimodule::new(base, vec![format!("x{a}{b}")], act(a), act(b)).unwrap()
}

fn lr_decomposition() -> Outcome {
    let t = Instant::now();
    let products = [
        FreeProduct::new(vec![(1, scalar_module(2)), (2, scalar_module(1))], 4).unwrap(),
        FreeProduct::new(vec![(1, corner(0, 1)), (2, corner(1, 0))], 4).unwrap(),
    ];
    let mut words_checked = 0;
    for (seed, fp) in products.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed as u64 + 17);
        for n in 1..=4 {
            for sides in 0..1u32 << n {
                for cols in 0..1u32 << n {
                    let mut ops = Vec::new();
                    for i in 0..n {
                        let s = if sides >> i & 1 == 1 { Side::Right } else { Side::Left };
                        let c = (cols >> i & 1) + 1;
                        let comp = fp.component(fp.index_of(c).unwrap());
                        let t = random_side_operator(comp, s, &mut rng).map_err(|e| e.to_string())?;
                        ops.push(LrOperand::new(fp, s, c, t).map_err(|e| e.to_string())?);
                    }
                    for mask in 0..1u32 << n {
                        let projected: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                        let rep = verify_lr_decomposition(fp, &ops, &projected).map_err(|e| e.to_string())?;
                        report_ok(&rep, &format!("n={n} sides={sides:b} cols={cols:b} proj={projected:?}"))?;
                        words_checked += 1;
                    }
                }
            }
        }
    }
    let e = in_time(t, Duration::from_secs(60))?;
    Ok(format!("{words_checked} projected words, {e:.2?}"))
}

fn projection_laws() -> Outcome {
    let mut checks = 0;
    for (name, seed) in [("scalar", 1u64), ("diag2", 2), ("m2-scalar", 3)] {
        let x = build_bimodule_from_space(&fixtures::by_name(name).unwrap()).unwrap().module;
        let fp = FreeProduct::new(vec![(1, x.clone()), (2, x.clone())], 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for side in [Side::Left, Side::Right] {
            for colour in [1, 2] {
                let t = random_side_operator(&x, side, &mut rng).unwrap();
                let rep = check_projection_laws(&fp, colour, &t).unwrap();
                report_ok(&rep, name)?;
                checks += rep.claims.iter().map(|c| c.checked).sum::<usize>();
            }
        }
    }
    Ok(format!("{checks} basis-word checks"))
}

fn ffb_lattice(oracle: &mut Oracle) -> Outcome {
    let fctx = lr_replacement(&"rbl".parse().unwrap()).unwrap();
    let got: BTreeSet<String> = fctx.enumerate().unwrap().iter().map(|p| p.to_block_string()).collect();
    let want: BTreeSet<String> =
        ["{1},{2,3},{4}", "{1,2,3},{4}", "{1},{2,3,4}", "{1,2,3,4}"].iter().map(|s| s.to_string()).collect();
    ensure(got == want, || format!("BNC_ffb(rbl) = {got:?}"))?;
    let mut shapes = 0;
    for m in 1..=8 {
        for chi_hat in words("lrb", m) {
            let (chi, bottom) = expand(&chi_hat);
            if chi.len() > 8 {
                continue;
            }
            let fctx = lr_replacement(&chi_hat.parse().unwrap()).unwrap();
            let got = rgs_set(&fctx.enumerate().unwrap());
            let bnc = oracle.bnc(&chi);
            let want: BTreeSet<Vec<usize>> = bnc.iter().filter(|p| refines(&bottom, p)).cloned().collect();
            ensure(got == want, || format!("{chi_hat}: not the interval above the pairing"))?;
            ensure(bnc.contains(&normalize(&bottom)), || format!("{chi_hat}: bottom not in BNC"))?;
            shapes += 1;
        }
    }
    Ok(format!("4 partitions for rbl; interval property on {shapes} shapes"))
}

fn system_construction() -> Outcome {
    let space = m2_scalar();
    let fam = m2_scalar_family(&space);
    let mut checks = 0;
    for cap in 1..=4 {
        let (emb, rep) = embed_ffb_family(&space, &fam, cap).map_err(|e| e.to_string())?;
        report_ok(&rep, &format!("embedding at cap {cap}"))?;
        let sys = check_ffb_system(emb.model(), emb.system(), cap).map_err(|e| e.to_string())?;
        report_ok(&sys, &format!("system at cap {cap}"))?;
        ensure(rep.passed("moment-preservation"), || "moment preservation missing".into())?;
        checks += sys.claims.iter().map(|c| c.checked).sum::<usize>();
    }
    Ok(format!("properties (1)-(3) at caps 1..=4 ({checks} checks), moment preservation n <= 4"))
}

struct CumulantRun {
    report: Report,
    elapsed: Duration,
}

fn cumulant_run() -> Result<CumulantRun, String> {
    let t = Instant::now();
    let space = m2_scalar();
    let (emb, _) = embed_ffb_family(&space, &m2_scalar_family(&space), 4).map_err(|e| e.to_string())?;
    let report = ffb_cumulant_checks(&emb, 4).map_err(|e| e.to_string())?;
    Ok(CumulantRun { report, elapsed: t.elapsed() })
}

fn claim_ok(r: &Report, id: &str) -> Result<usize, String> {
    let c = r.claim(id).ok_or_else(|| format!("{id} not recorded"))?;
    ensure(r.passed(id) && c.checked > 0, || format!("{id}: {}", r.to_text()))?;
    Ok(c.checked)
}

fn vanishing(run: &CumulantRun) -> Outcome {
    let n = claim_ok(&run.report, "vanishing-outside-ffb")?;
    Ok(format!("{n} partitions outside BNC_ffb vanish, n' <= 4"))
}

fn main_formula(run: &CumulantRun) -> Outcome {
    let a = claim_ok(&run.report, "ffb-moment-cumulant")?;
    let b = claim_ok(&run.report, "kappa-full-vanishes")?;
    claim_ok(&run.report, "ffb-kappa-formula")?;
    ensure(run.elapsed < Duration::from_secs(120), || format!("took {:?}", run.elapsed))?;
    Ok(format!("{a} words expand over BNC_ffb, {b} mixed full cumulants vanish, {:.2?}", run.elapsed))
}

fn independence() -> Outcome {
    let space = m2_scalar();
    let fam = m2_scalar_family(&space);
    let (emb, _) = embed_ffb_family(&space, &fam, 4).map_err(|e| e.to_string())?;
    let r = check_ffb_independence(emb.model(), emb.family(), &emb, 4).map_err(|e| e.to_string())?;
    report_ok(&r, "embedded family")?;
    let checks = r.claims.iter().map(|c| c.checked).sum::<usize>();
    let pipe = verify_system_gives_ffb(&emb, 4, 3).map_err(|e| e.to_string())?;
    report_ok(&pipe, "system pipeline")?;

    let flagged = |r: &Report, what: &str| -> Result<(), String> {
        ensure(!r.all_pass(), || format!("{what} not flagged"))?;
        ensure(r.failures().iter().all(|c| !c.witness.is_null()), || format!("{what}: failure without witness"))
    };
    let shift = emb.model().base().one();
    let p = Perturbed::new(emb.model(), emb.family(), shift);
    flagged(&check_ffb_independence(&p, emb.family(), &emb, 4).map_err(|e| e.to_string())?, "perturbed moments")?;
    let theta = ThetaRepresentation::new(&space, &fam.colours).map_err(|e| e.to_string())?;
    flagged(&check_ffb_independence(&space, &fam, &theta, 4).map_err(|e| e.to_string())?, "dependent family")?;
    flagged(&check_ffb_system(emb.model(), &emb.corrupted_system(), 4).map_err(|e| e.to_string())?, "corrupted system")?;
    Ok(format!("{checks} words at cap 4; 3 negative controls flagged with witnesses"))
}

fn line(out: &mut impl Write, k: usize, name: &str, r: &Outcome) {
    let _ = match r {
        Ok(m) => writeln!(out, "criterion {k:>2} PASS  {name}: {m}"),
        Err(m) => writeln!(out, "criterion {k:>2} FAIL  {name}: {m}"),
    };
}

#[test]
fn acceptance() {
    let mut oracle = Oracle { bnc: HashMap::new() };
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    results.push(("lattice counts", lattice_counts(&mut oracle)));
    results.push(("figure facts", figure_facts()));
    results.push(("mobius inversion", mobius_identities()));
    results.push(("LR example", lr_example()));
    results.push(("LR decomposition", lr_decomposition()));
    results.push(("Boolean projection laws", projection_laws()));
    results.push(("BNC_ffb", ffb_lattice(&mut oracle)));
    results.push(("ffb system construction", system_construction()));
    match cumulant_run() {
        Ok(run) => {
            results.push(("vanishing outside BNC_ffb", vanishing(&run)));
            results.push(("main formula", main_formula(&run)));
        }
        Err(e) => {
            results.push(("vanishing outside BNC_ffb", Err(e.clone())));
            results.push(("main formula", Err(e)));
        }
    }
    results.push(("independence closure", independence()));

    let mut err = std::io::stderr().lock();
    for (k, (name, r)) in results.iter().enumerate() {
        line(&mut err, k + 1, name, r);
    }
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, (_, r))| r.is_err()).map(|(k, _)| k + 1).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
