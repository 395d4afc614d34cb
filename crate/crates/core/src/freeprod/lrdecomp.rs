//! Diagram vectors E_D, the diagram expansion of operator words applied to
//! 1_B, and its refinement when some factors are followed by Boolean projections.

use super::bimodule::{Bimodule, SparseCols};
use super::product::{FpVector, FreeProduct};
use crate::algebra::AlgebraElement;
use crate::bnc::{ChiMap, EpsilonMap, Side};
use crate::error::{Error, Result};
use crate::linalg::{nullspace, Matrix};
use crate::lr::{chi_extensions, enumerate_lr, filter_boolean, lateral_closure, survives_projection, LrDiagram};
use crate::rational::{fmt_q, q, Q};
use crate::reduce::{Collapse, Collapsed, RBlock};
use crate::report::Report;
use num_traits::Zero;
use rand::Rng;
use serde_json::json;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

/// Operator T_i on X_{ε(i)} acting through λ (side l) or ρ (side r).
#[derive(Clone, Debug)]
pub struct LrOperand {
    pub side: Side,
    pub colour: u32,
    pub op: Arc<SparseCols>,
    matrix: Matrix,
}

impl LrOperand {
    /// Checks that `t` commutes with the right actions (side l) or left actions (side r).
    pub fn new(fp: &FreeProduct, side: Side, colour: u32, t: Matrix) -> Result<Self> {
        let k = fp.index_of(colour)?;
        let comp = fp.component(k);
        if t.rows() != comp.dim() || t.cols() != comp.dim() {
            return Err(Error::SizeMismatch { expected: comp.dim(), found: t.rows() });
        }
        let ok = match side {
            Side::Left => comp.is_left_operator(&t),
            Side::Right => comp.is_right_operator(&t),
            Side::Bool => return Err(Error::Alphabet("operands are left or right".into())),
        };
        if !ok {
            return Err(Error::SideMismatch { index: 0, side: side.name().into() });
        }
        Ok(LrOperand { side, colour, op: Arc::new(SparseCols::from_matrix(&t)), matrix: t })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

fn maps_of(ops: &[LrOperand]) -> (ChiMap, EpsilonMap) {
    (ChiMap::new(ops.iter().map(|o| o.side).collect()), EpsilonMap::new(ops.iter().map(|o| o.colour).collect()))
}

/// μ'_1(T_1) ⋯ μ'_n(T_n) 1_B, where μ' is followed by P_{ε(i)} at the projected positions.
pub fn direct_word(fp: &FreeProduct, ops: &[LrOperand], projected: &[usize]) -> Result<FpVector> {
    let mut v = fp.unit();
    for (i, o) in ops.iter().enumerate().rev() {
        let k = fp.index_of(o.colour)?;
        v = match o.side {
            Side::Left => fp.lambda(k, &o.op, &v)?,
            _ => fp.rho(k, &o.op, &v)?,
        };
        if projected.contains(&i) {
            v = fp.proj(k, &v);
        }
    }
    Ok(v)
}

#[derive(Clone, Debug)]
enum DLetter {
    Op(usize),
    L(AlgebraElement),
    R(AlgebraElement),
}

fn apply_in_component(comp: &Bimodule, ops: &[LrOperand], word: &[DLetter]) -> Result<Vec<Q>> {
    let mut v = comp.unit_vector();
    for l in word.iter().rev() {
        v = match l {
            DLetter::Op(i) => ops[*i].op.apply(&v),
            DLetter::L(b) => comp.left_action(b)?.apply(&v),
            DLetter::R(b) => comp.right_action(b)?.apply(&v),
        };
    }
    Ok(v)
}

/// The vector E_D(μ_1(T_1), ..., μ_n(T_n)).
pub fn e_d(fp: &FreeProduct, d: &LrDiagram, ops: &[LrOperand]) -> Result<FpVector> {
    let (chi, eps) = maps_of(ops);
    if d.chi() != &chi || d.eps() != &eps {
        return Err(Error::Colouring("diagram colouring differs from the operands".into()));
    }
    if ops.is_empty() {
        return Ok(fp.unit());
    }
    let blocks: Vec<RBlock> = d.strands().iter().map(|s| RBlock { nodes: s.nodes.clone(), top: s.top }).collect();
    let comp_of = |b: usize| fp.index_of(eps.colours()[blocks[b].nodes[0]]);
    let c = Collapse { sides: chi.sides(), blocks: &blocks, spine_order: d.spine_order() };
    let slots: Vec<Vec<DLetter>> = (0..ops.len()).map(|i| vec![DLetter::Op(i)]).collect();
    let wrap = |s: Side, b: AlgebraElement| if s == Side::Right { DLetter::R(b) } else { DLetter::L(b) };
    let bd = fp.base().dim();
    let mut eval = |b: usize, w: &[DLetter]| -> Result<AlgebraElement> {
        let comp = fp.component(comp_of(b)?);
        let v = apply_in_component(comp, ops, w)?;
        fp.base().element(v[..bd].to_vec())
    };
    match c.run(slots, &wrap, &mut eval, &mut |cands| cands.len() - 1)? {
        Collapsed::Value(v) => Ok(fp.from_base(&v)),
        Collapsed::Tops(tops) => {
            let mut pieces = Vec::with_capacity(tops.len());
            for (b, w) in tops {
                let k = comp_of(b)?;
                let v = apply_in_component(fp.component(k), ops, &w)?;
                pieces.push((k, v[bd..].to_vec()));
            }
            fp.tensor(&pieces)
        }
    }
}

#[derive(Clone, Debug)]
pub struct LrTerm {
    pub diagram: LrDiagram,
    pub coeff: Q,
}

/// Diagram expansions of a word and of its projected variant.
#[derive(Clone, Debug)]
pub struct LrDecomposition {
    pub projected_positions: Vec<usize>,
    /// Coefficients c_D of the unprojected word.
    pub terms: Vec<LrTerm>,
    /// Diagrams surviving every projection; they sum to the projected word.
    pub kept: Vec<LrTerm>,
    /// Diagrams removed by some projection, with their coefficients c_{D,S}.
    pub residual: Vec<LrTerm>,
}

type Combo = BTreeMap<LrDiagram, Q>;

fn step(m: &Combo, side: Side, colour: u32) -> Combo {
    let mut out = Combo::new();
    for (d, c) in m {
        for (d2, s) in d.prepend_terms(side, colour) {
            let e = out.entry(d2).or_insert_with(Q::zero);
            *e += c * q(s);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn terms(m: Combo) -> Vec<LrTerm> {
    m.into_iter().map(|(diagram, coeff)| LrTerm { diagram, coeff }).collect()
}

/// Replays the action of the operators node by node to obtain c_D, splitting
/// off the diagrams annihilated at each projected position.
pub fn lr_decompose(chi: &ChiMap, eps: &EpsilonMap, projected: &[usize]) -> Result<LrDecomposition> {
    chi.require_two_sided()?;
    if chi.len() != eps.len() {
        return Err(Error::SizeMismatch { expected: chi.len(), found: eps.len() });
    }
    if let Some(&p) = projected.iter().find(|&&p| p >= chi.len()) {
        return Err(Error::Invalid(format!("projected position {} out of range", p + 1)));
    }
    crate::bnc::check_cap(chi.len(), crate::bnc::DEFAULT_LR_CAP)?;
    let mut all: Combo = [(LrDiagram::empty(), q(1))].into_iter().collect();
    let mut kept = all.clone();
    let mut removed = Combo::new();
    for i in (0..chi.len()).rev() {
        let (side, colour) = (chi.sides()[i], eps.colours()[i]);
        all = step(&all, side, colour);
        kept = step(&kept, side, colour);
        removed = step(&removed, side, colour);
        if projected.contains(&i) {
            let (stay, gone): (Combo, Combo) = kept.into_iter().partition(|(d, _)| survives_projection(d, colour));
            kept = stay;
            for (d, c) in gone {
                let e = removed.entry(d).or_insert_with(Q::zero);
                *e += c;
            }
            removed.retain(|_, c| !c.is_zero());
        }
    }
    let mut pos = projected.to_vec();
    pos.sort_unstable();
    pos.dedup();
    Ok(LrDecomposition { projected_positions: pos, terms: terms(all), kept: terms(kept), residual: terms(removed) })
}

pub fn sum_terms(fp: &FreeProduct, ts: &[LrTerm], ops: &[LrOperand]) -> Result<FpVector> {
    let mut acc = FpVector::new();
    for t in ts {
        acc.add_scaled(&e_d(fp, &t.diagram, ops)?, &t.coeff);
    }
    Ok(acc)
}

/// ∪_j S_{i_j}^χ: extensions of the suffix diagrams annihilated by P_{ε(i_j)}.
pub fn residual_envelope(chi: &ChiMap, eps: &EpsilonMap, projected: &[usize]) -> Result<Arc<BTreeSet<LrDiagram>>> {
    type Key = (ChiMap, EpsilonMap, Vec<usize>);
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<BTreeSet<LrDiagram>>>>> = OnceLock::new();
    let key = (chi.clone(), eps.clone(), projected.to_vec());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let mut out = BTreeSet::new();
    for &i in projected {
        let (sc, se) = (chi.suffix(i), eps.suffix(i));
        let fam = lateral_closure(&enumerate_lr(&sc, &se)?);
        let (_, removed) = filter_boolean(&fam, eps.colours()[i]);
        out.extend(chi_extensions(&removed, chi, eps)?.diagrams);
    }
    let arc = Arc::new(out);
    cache.lock().unwrap().insert(key, arc.clone());
    Ok(arc)
}

fn vec_json(fp: &FreeProduct, v: &FpVector) -> serde_json::Value {
    fp.vector_json(v)
}

/// Checks the diagram expansion of a word and its projected refinement.
pub fn verify_lr_decomposition(fp: &FreeProduct, ops: &[LrOperand], projected: &[usize]) -> Result<Report> {
    verify_lr_split(fp, ops, projected).map(|(r, _)| r)
}

/// As [`verify_lr_decomposition`], also returning Σ_{D∈S} c_{D,S} E_D.
pub fn verify_lr_split(fp: &FreeProduct, ops: &[LrOperand], projected: &[usize]) -> Result<(Report, FpVector)> {
    let (chi, eps) = maps_of(ops);
    let dec = lr_decompose(&chi, &eps, projected)?;
    let full = direct_word(fp, ops, &[])?;
    let proj = direct_word(fp, ops, projected)?;
    let mut rep = Report::new();
    let expansion = sum_terms(fp, &dec.terms, ops)?;
    rep.record("lr-expansion", expansion == full, || {
        json!({ "chi": chi.to_string(), "eps": eps.to_string(), "direct": vec_json(fp, &full), "expansion": vec_json(fp, &expansion) })
    });
    let kept = sum_terms(fp, &dec.kept, ops)?;
    rep.record("projected-expansion", kept == proj, || {
        json!({ "chi": chi.to_string(), "projected": projected, "direct": vec_json(fp, &proj), "kept": vec_json(fp, &kept) })
    });
    let residual = sum_terms(fp, &dec.residual, ops)?;
    let mut recon = proj.clone();
    recon.add_scaled(&residual, &q(1));
    rep.record("residual-reconstruction", recon == full, || {
        json!({ "chi": chi.to_string(), "projected": projected, "direct": vec_json(fp, &full), "reconstructed": vec_json(fp, &recon) })
    });
    let env = residual_envelope(&chi, &eps, &dec.projected_positions)?;
    rep.touch("residual-in-extensions");
    for t in &dec.residual {
        rep.record("residual-in-extensions", env.contains(&t.diagram), || {
            json!({ "diagram": t.diagram.to_json(), "coeff": fmt_q(&t.coeff) })
        });
    }
    Ok((rep, residual))
}

/// P_k² = P_k and λ_k(T)P_k = P_kλ_k(T) = ρ_k(T)P_k on every basis word of
/// depth below the truncation.
pub fn check_projection_laws(fp: &FreeProduct, colour: u32, t: &Matrix) -> Result<Report> {
    let k = fp.index_of(colour)?;
    let op = SparseCols::from_matrix(t);
    let mut rep = Report::new();
    let depth = fp.depth().saturating_sub(1);
    for w in fp.basis_words(depth) {
        let v = fp.word_vector(&w);
        let label = fp.word_label(&w);
        let p = fp.proj(k, &v);
        rep.record("projection-idempotent", fp.proj(k, &p) == p, || json!({ "word": label }));
        let lp = fp.lambda(k, &op, &p)?;
        let pl = fp.proj(k, &fp.lambda(k, &op, &v)?);
        let rp = fp.rho(k, &op, &p)?;
        rep.record("lambda-commutes-with-projection", lp == pl, || {
            json!({ "word": label, "lambda P": vec_json(fp, &lp), "P lambda": vec_json(fp, &pl) })
        });
        rep.record("lambda-rho-agree-on-range", lp == rp, || {
            json!({ "word": label, "lambda P": vec_json(fp, &lp), "rho P": vec_json(fp, &rp) })
        });
    }
    Ok(rep)
}

/// Basis of the operators on X commuting with every right action (side l)
/// or every left action (side r).
pub fn commutant_basis(x: &Bimodule, side: Side) -> Result<Vec<Matrix>> {
    let d = x.dim();
    let base = x.base();
    let actions: Vec<Matrix> = (0..base.dim())
        .map(|i| match side {
            Side::Right => x.left_action(&base.basis(i)),
            _ => x.right_action(&base.basis(i)),
        })
        .collect::<Result<_>>()?;
    // unknown T (row-major, d*d entries); equations (T A - A T)_{ij} = 0
    let mut rows = Vec::new();
    for a in &actions {
        for i in 0..d {
            for j in 0..d {
                let mut row = vec![Q::zero(); d * d];
                for m in 0..d {
                    row[i * d + m] += a.get(m, j);
                    row[m * d + j] -= a.get(i, m);
                }
                rows.push(row);
            }
        }
    }
    let basis = if rows.is_empty() {
        (0..d * d).map(|x| { let mut v = vec![Q::zero(); d * d]; v[x] = q(1); v }).collect()
    } else {
        nullspace(&Matrix::from_rows(rows, d * d).expect("rectangular"))
    };
    Ok(basis
        .into_iter()
        .map(|v| Matrix::from_rows(v.chunks(d).map(|c| c.to_vec()).collect(), d).expect("square"))
        .collect())
}

/// A random rational operator in the commutant of the given side.
pub fn random_side_operator<R: Rng>(x: &Bimodule, side: Side, rng: &mut R) -> Result<Matrix> {
    let basis = commutant_basis(x, side)?;
    let d = x.dim();
    let mut acc = Matrix::zeros(d, d);
    for b in &basis {
        let c = crate::rational::qr(rng.gen_range(-3..=3), rng.gen_range(1..=2));
        acc = acc.add(&b.scale(&c));
    }
    Ok(acc)
}
