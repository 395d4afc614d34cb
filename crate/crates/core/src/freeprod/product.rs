//! Reduced free product of bimodules with amalgamation over B, truncated at a
//! tensor depth, with the left/right regular representations and the Boolean
//! projections.

use super::bimodule::{Bimodule, SparseCols};
use crate::algebra::{AlgebraElement, StructuredAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, SparseRref};
use crate::rational::{fmt_q, Q};
use num_traits::Zero;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

/// A basis word: an element of B or a tensor of kernel basis vectors,
/// each factor given as (component, kernel index).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Word {
    Base(usize),
    Tensor(Vec<(usize, usize)>),
}

impl Word {
    pub fn depth(&self) -> usize {
        match self {
            Word::Base(_) => 0,
            Word::Tensor(t) => t.len(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FpVector {
    entries: BTreeMap<Word, Q>,
}

impl FpVector {
    pub fn new() -> Self {
        FpVector::default()
    }

    pub fn entries(&self) -> &BTreeMap<Word, Q> {
        &self.entries
    }

    pub fn add_term(&mut self, w: Word, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.entries.entry(w) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add_scaled(&mut self, o: &FpVector, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (w, x) in &o.entries {
            let e = self.entries.entry(w.clone()).or_insert_with(Q::zero);
            *e += x * c;
        }
        self.entries.retain(|_, v| !v.is_zero());
    }

    pub fn scaled(&self, c: &Q) -> FpVector {
        let mut out = FpVector::new();
        out.add_scaled(self, c);
        out
    }

    pub fn sub(&self, o: &FpVector) -> FpVector {
        let mut out = self.clone();
        out.add_scaled(o, &Q::from_integer((-1).into()));
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.entries.keys().map(Word::depth).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

type Reducer = Arc<Option<SparseRref<Vec<usize>>>>;

pub struct FreeProduct {
    base: StructuredAlgebra,
    labels: Vec<u32>,
    comps: Vec<Bimodule>,
    depth: usize,
    /// `trivial[a][b]`: the junction X°_a ⊗ X°_b needs no relations.
    trivial: Vec<Vec<bool>>,
    unit_cols: Vec<Vec<(usize, Q)>>,
    reducers: RwLock<HashMap<Vec<usize>, Reducer>>,
}

impl std::fmt::Debug for FreeProduct {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FreeProduct").field("labels", &self.labels).field("depth", &self.depth).finish()
    }
}

impl FreeProduct {
    /// Components are labelled by colours; all must share the base algebra.
    pub fn new(comps: Vec<(u32, Bimodule)>, depth: usize) -> Result<Self> {
        let Some((_, first)) = comps.first() else {
            return Err(Error::Invalid("free product needs at least one component".into()));
        };
        let base = first.base().clone();
        for (_, c) in &comps {
            if c.base() != &base {
                return Err(Error::MismatchedAlgebra);
            }
        }
        let mut labels: Vec<u32> = comps.iter().map(|(k, _)| *k).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != comps.len() {
            return Err(Error::Colouring("repeated component label".into()));
        }
        let (labels, comps): (Vec<u32>, Vec<Bimodule>) = comps.into_iter().unzip();
        let nb = base.dim();
        let scalar = |m: &Matrix| m.as_scalar();
        let mut trivial = vec![vec![false; comps.len()]; comps.len()];
        for a in 0..comps.len() {
            for b in 0..comps.len() {
                trivial[a][b] = (0..nb).all(|i| {
                    let r = scalar(comps[a].kernel_right_matrix(i));
                    let l = scalar(comps[b].kernel_left_matrix(i));
                    let empty = comps[a].kdim() == 0 || comps[b].kdim() == 0;
                    empty || (r.is_some() && r == l)
                });
            }
        }
        let unit_cols = comps
            .iter()
            .map(|c| c.unit_vector().into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect())
            .collect();
        Ok(FreeProduct { base, labels, comps, depth, trivial, unit_cols, reducers: RwLock::new(HashMap::new()) })
    }

    pub fn base(&self) -> &StructuredAlgebra {
        &self.base
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn component(&self, k: usize) -> &Bimodule {
        &self.comps[k]
    }

    pub fn num_components(&self) -> usize {
        self.comps.len()
    }

    pub fn index_of(&self, label: u32) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or_else(|| Error::Colouring(format!("no component with colour {label}")))
    }

    pub fn unit(&self) -> FpVector {
        self.from_base(&self.base.one())
    }

    pub fn from_base(&self, b: &AlgebraElement) -> FpVector {
        let mut v = FpVector::new();
        for (i, c) in b.coeffs().iter().enumerate() {
            v.add_term(Word::Base(i), c.clone());
        }
        v
    }

    /// Component of a vector in B.
    pub fn p(&self, v: &FpVector) -> AlgebraElement {
        let mut c = vec![Q::zero(); self.base.dim()];
        for (w, x) in &v.entries {
            if let Word::Base(i) = w {
                c[*i] += x;
            }
        }
        self.base.element(c).expect("base dimension")
    }

    fn left_basis_word(&self, i: usize, w: &Word, c: &Q, out: &mut FpVector) {
        match w {
            Word::Base(j) => {
                for (k, s) in self.base.basis_product(i, *j) {
                    out.add_term(Word::Base(*k), c * s);
                }
            }
            Word::Tensor(t) => {
                let (col, x) = t[0];
                for (y, s) in &self.comps[col].kernel_left(i).cols[x] {
                    let mut t2 = t.clone();
                    t2[0].1 = *y;
                    out.add_term(Word::Tensor(t2), c * s);
                }
            }
        }
    }

    fn right_basis_word(&self, i: usize, w: &Word, c: &Q, out: &mut FpVector) {
        match w {
            Word::Base(j) => {
                for (k, s) in self.base.basis_product(*j, i) {
                    out.add_term(Word::Base(*k), c * s);
                }
            }
            Word::Tensor(t) => {
                let last = t.len() - 1;
                let (col, x) = t[last];
                for (y, s) in &self.comps[col].kernel_right(i).cols[x] {
                    let mut t2 = t.clone();
                    t2[last].1 = *y;
                    out.add_term(Word::Tensor(t2), c * s);
                }
            }
        }
    }

    /// b · v.
    pub fn left_b(&self, b: &AlgebraElement, v: &FpVector) -> Result<FpVector> {
        if !self.base.owns(b) {
            return Err(Error::MismatchedAlgebra);
        }
        let mut out = FpVector::new();
        for (i, bi) in b.coeffs().iter().enumerate() {
            if bi.is_zero() {
                continue;
            }
            for (w, c) in &v.entries {
                self.left_basis_word(i, w, &(bi * c), &mut out);
            }
        }
        self.normalize(out)
    }

    /// v · b.
    pub fn right_b(&self, b: &AlgebraElement, v: &FpVector) -> Result<FpVector> {
        if !self.base.owns(b) {
            return Err(Error::MismatchedAlgebra);
        }
        let mut out = FpVector::new();
        for (i, bi) in b.coeffs().iter().enumerate() {
            if bi.is_zero() {
                continue;
            }
            for (w, c) in &v.entries {
                self.right_basis_word(i, w, &(bi * c), &mut out);
            }
        }
        self.normalize(out)
    }

    fn check_op(&self, k: usize, op: &SparseCols) -> Result<()> {
        let d = self.comps[k].dim();
        if op.rows != d || op.cols.len() != d {
            return Err(Error::SizeMismatch { expected: d, found: op.rows });
        }
        Ok(())
    }

    /// T(1_B) as a sparse column.
    fn unit_image(&self, k: usize, op: &SparseCols) -> Vec<(usize, Q)> {
        let mut img: BTreeMap<usize, Q> = BTreeMap::new();
        for (u, uc) in &self.unit_cols[k] {
            for (r, s) in &op.cols[*u] {
                *img.entry(*r).or_insert_with(Q::zero) += uc * s;
            }
        }
        img.into_iter().filter(|(_, x)| !x.is_zero()).collect()
    }

    /// Left regular representation of an operator on component `k`.
    pub fn lambda(&self, k: usize, op: &SparseCols, v: &FpVector) -> Result<FpVector> {
        self.check_op(k, op)?;
        let bd = self.base.dim();
        let mut out = FpVector::new();
        for (w, c) in &v.entries {
            match w {
                Word::Base(j) => {
                    for (r, s) in &op.cols[*j] {
                        let word = if *r < bd { Word::Base(*r) } else { Word::Tensor(vec![(k, r - bd)]) };
                        out.add_term(word, c * s);
                    }
                }
                Word::Tensor(t) => {
                    let (rest, entries): (&[(usize, usize)], Vec<(usize, Q)>) = if t[0].0 == k {
                        (&t[1..], op.cols[bd + t[0].1].clone())
                    } else {
                        (&t[..], self.unit_image(k, op))
                    };
                    for (r, s) in &entries {
                        let cs = c * s;
                        if *r < bd {
                            if rest.is_empty() {
                                out.add_term(Word::Base(*r), cs);
                            } else {
                                self.left_basis_word(*r, &Word::Tensor(rest.to_vec()), &cs, &mut out);
                            }
                        } else {
                            let mut t2 = Vec::with_capacity(rest.len() + 1);
                            t2.push((k, r - bd));
                            t2.extend_from_slice(rest);
                            out.add_term(Word::Tensor(t2), cs);
                        }
                    }
                }
            }
        }
        self.normalize(out)
    }

    /// Right regular representation of an operator on component `k`.
    pub fn rho(&self, k: usize, op: &SparseCols, v: &FpVector) -> Result<FpVector> {
        self.check_op(k, op)?;
        let bd = self.base.dim();
        let mut out = FpVector::new();
        for (w, c) in &v.entries {
            match w {
                Word::Base(j) => {
                    for (r, s) in &op.cols[*j] {
                        let word = if *r < bd { Word::Base(*r) } else { Word::Tensor(vec![(k, r - bd)]) };
                        out.add_term(word, c * s);
                    }
                }
                Word::Tensor(t) => {
                    let last = t.len() - 1;
                    let (init, entries): (&[(usize, usize)], Vec<(usize, Q)>) = if t[last].0 == k {
                        (&t[..last], op.cols[bd + t[last].1].clone())
                    } else {
                        (&t[..], self.unit_image(k, op))
                    };
                    for (r, s) in &entries {
                        let cs = c * s;
                        if *r < bd {
                            if init.is_empty() {
                                out.add_term(Word::Base(*r), cs);
                            } else {
                                self.right_basis_word(*r, &Word::Tensor(init.to_vec()), &cs, &mut out);
                            }
                        } else {
                            let mut t2 = init.to_vec();
                            t2.push((k, r - bd));
                            out.add_term(Word::Tensor(t2), cs);
                        }
                    }
                }
            }
        }
        self.normalize(out)
    }

    /// Boolean projection onto B ⊕ X°_k.
    pub fn proj(&self, k: usize, v: &FpVector) -> FpVector {
        let entries = v
            .entries
            .iter()
            .filter(|(w, _)| match w {
                Word::Base(_) => true,
                Word::Tensor(t) => t.len() == 1 && t[0].0 == k,
            })
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        FpVector { entries }
    }

    /// Tensor of kernel vectors `(component, coords in X°)`; adjacent components must differ.
    pub fn tensor(&self, pieces: &[(usize, Vec<Q>)]) -> Result<FpVector> {
        for w in pieces.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Colouring("adjacent tensor factors share a component".into()));
            }
        }
        for (k, v) in pieces {
            if v.len() != self.comps[*k].kdim() {
                return Err(Error::SizeMismatch { expected: self.comps[*k].kdim(), found: v.len() });
            }
        }
        if pieces.is_empty() {
            return Ok(self.unit());
        }
        let mut acc: Vec<(Vec<(usize, usize)>, Q)> = vec![(vec![], Q::from_integer(1.into()))];
        for (k, v) in pieces {
            let mut next = Vec::new();
            for (t, c) in &acc {
                for (x, y) in v.iter().enumerate() {
                    if !y.is_zero() {
                        let mut t2 = t.clone();
                        t2.push((*k, x));
                        next.push((t2, c * y));
                    }
                }
            }
            acc = next;
        }
        let mut out = FpVector::new();
        for (t, c) in acc {
            out.add_term(Word::Tensor(t), c);
        }
        self.normalize(out)
    }

    fn reducer(&self, sig: &[usize]) -> Reducer {
        if let Some(r) = self.reducers.read().unwrap().get(sig) {
            return r.clone();
        }
        let junctions: Vec<usize> = (0..sig.len() - 1).filter(|&j| !self.trivial[sig[j]][sig[j + 1]]).collect();
        let built = if junctions.is_empty() { None } else { Some(self.build_reducer(sig, &junctions)) };
        let arc = Arc::new(built);
        self.reducers.write().unwrap().insert(sig.to_vec(), arc.clone());
        arc
    }

    /// Relations (ξ·b) ⊗ η - ξ ⊗ (b·η) at every nontrivial junction.
    fn build_reducer(&self, sig: &[usize], junctions: &[usize]) -> SparseRref<Vec<usize>> {
        let dims: Vec<usize> = sig.iter().map(|&k| self.comps[k].kdim()).collect();
        let mut tuples: Vec<Vec<usize>> = vec![vec![]];
        for &d in &dims {
            tuples = tuples.into_iter().flat_map(|t| (0..d).map(move |x| [t.clone(), vec![x]].concat())).collect();
        }
        let mut rref = SparseRref::new();
        for &j in junctions {
            let (a, b) = (sig[j], sig[j + 1]);
            for i in 0..self.base.dim() {
                let r = self.comps[a].kernel_right(i);
                let l = self.comps[b].kernel_left(i);
                for t in &tuples {
                    let mut row: BTreeMap<Vec<usize>, Q> = BTreeMap::new();
                    for (y, s) in &r.cols[t[j]] {
                        let mut t2 = t.clone();
                        t2[j] = *y;
                        *row.entry(t2).or_insert_with(Q::zero) += s;
                    }
                    for (y, s) in &l.cols[t[j + 1]] {
                        let mut t2 = t.clone();
                        t2[j + 1] = *y;
                        *row.entry(t2).or_insert_with(Q::zero) -= s;
                    }
                    rref.insert(row);
                }
            }
        }
        rref
    }

    /// Reduces every tensor word to normal form and enforces the depth bound.
    pub fn normalize(&self, v: FpVector) -> Result<FpVector> {
        let mut groups: BTreeMap<Vec<usize>, BTreeMap<Vec<usize>, Q>> = BTreeMap::new();
        let mut out = FpVector::new();
        for (w, c) in v.entries {
            match &w {
                Word::Tensor(t) if t.len() >= 2 => {
                    let sig: Vec<usize> = t.iter().map(|x| x.0).collect();
                    let idx: Vec<usize> = t.iter().map(|x| x.1).collect();
                    groups.entry(sig).or_default().insert(idx, c);
                }
                _ => {
                    out.entries.insert(w, c);
                }
            }
        }
        for (sig, mut vec) in groups {
            if let Some(r) = self.reducer(&sig).as_ref() {
                r.reduce(&mut vec);
            }
            for (idx, c) in vec {
                if !c.is_zero() {
                    let t = sig.iter().copied().zip(idx).collect();
                    out.entries.insert(Word::Tensor(t), c);
                }
            }
        }
        let d = out.depth();
        if d > self.depth {
            return Err(Error::DepthExceeded { depth: self.depth, needed: d });
        }
        Ok(out)
    }

    /// Normal-form basis words of depth at most `max_depth`.
    pub fn basis_words(&self, max_depth: usize) -> Vec<Word> {
        let mut out: Vec<Word> = (0..self.base.dim()).map(Word::Base).collect();
        let mut layer: Vec<Vec<usize>> = (0..self.comps.len()).map(|k| vec![k]).collect();
        for m in 1..=max_depth.min(self.depth) {
            for sig in &layer {
                let r = if m >= 2 { self.reducer(sig) } else { Arc::new(None) };
                let mut tuples: Vec<Vec<usize>> = vec![vec![]];
                for &k in sig {
                    let d = self.comps[k].kdim();
                    tuples = tuples.into_iter().flat_map(|t| (0..d).map(move |x| [t.clone(), vec![x]].concat())).collect();
                }
                for t in tuples {
                    if r.as_ref().as_ref().is_some_and(|r| r.is_pivot(&t)) {
                        continue;
                    }
                    out.push(Word::Tensor(sig.iter().copied().zip(t).collect()));
                }
            }
            layer = layer
                .iter()
                .flat_map(|s| {
                    let last = *s.last().unwrap();
                    (0..self.comps.len()).filter(move |&k| k != last).map(move |k| [s.clone(), vec![k]].concat())
                })
                .collect();
        }
        out
    }

    pub fn word_vector(&self, w: &Word) -> FpVector {
        let mut v = FpVector::new();
        v.add_term(w.clone(), Q::from_integer(1.into()));
        v
    }

    pub fn word_label(&self, w: &Word) -> String {
        match w {
            Word::Base(i) => self.base.labels()[*i].clone(),
            Word::Tensor(t) => t
                .iter()
                .map(|(k, x)| format!("{}:{}", self.labels[*k], self.comps[*k].kernel_labels()[*x]))
                .collect::<Vec<_>>()
                .join("⊗"),
        }
    }

    pub fn vector_json(&self, v: &FpVector) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> =
            v.entries.iter().map(|(w, c)| (self.word_label(w), serde_json::Value::String(fmt_q(c)))).collect();
        serde_json::Value::Object(map)
    }
}
