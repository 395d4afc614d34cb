//! Operators on a truncated free product as a moment space.

use super::bimodule::SparseCols;
use super::product::{FpVector, FreeProduct};
use crate::algebra::{AlgebraElement, StructuredAlgebra};
use crate::bnc::Side;
use crate::error::{Error, Result};
use crate::space::{Letter, MomentSpace};
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

#[derive(Clone, Debug)]
pub enum Prim {
    /// λ_k(T) for an operator T on component k.
    Lambda(usize, Arc<SparseCols>),
    /// ρ_k(T).
    Rho(usize, Arc<SparseCols>),
    /// P_k.
    Proj(usize),
    LeftB(AlgebraElement),
    RightB(AlgebraElement),
}

impl Prim {
    fn raises(&self) -> bool {
        matches!(self, Prim::Lambda(..) | Prim::Rho(..))
    }
}

#[derive(Debug)]
pub struct FpOp {
    id: u64,
    label: String,
    /// Factors of the product, leftmost first.
    prims: Vec<Prim>,
}

/// Shared handle to an operator; identity is by construction.
#[derive(Clone)]
pub struct OpRef(Arc<FpOp>);

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

impl OpRef {
    pub fn new(label: impl Into<String>, prims: Vec<Prim>) -> Self {
        OpRef(Arc::new(FpOp { id: NEXT_ID.fetch_add(1, Ordering::Relaxed), label: label.into(), prims }))
    }

    pub fn lambda(label: impl Into<String>, k: usize, t: Arc<SparseCols>) -> Self {
        Self::new(label, vec![Prim::Lambda(k, t)])
    }

    pub fn rho(label: impl Into<String>, k: usize, t: Arc<SparseCols>) -> Self {
        Self::new(label, vec![Prim::Rho(k, t)])
    }

    /// The product x_1 x_2 ... x_m.
    pub fn product(label: impl Into<String>, xs: &[OpRef]) -> Self {
        Self::new(label, xs.iter().flat_map(|x| x.0.prims.iter().cloned()).collect())
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn label(&self) -> &str {
        &self.0.label
    }

    pub fn prims(&self) -> &[Prim] {
        &self.0.prims
    }

    /// Number of factors that can raise tensor depth.
    pub fn raising(&self) -> usize {
        self.0.prims.iter().filter(|p| p.raises()).count()
    }
}

impl PartialEq for OpRef {
    fn eq(&self, o: &Self) -> bool {
        self.0.id == o.0.id
    }
}

impl Eq for OpRef {}

impl Hash for OpRef {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.0.id.hash(h)
    }
}

impl fmt::Debug for OpRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.0.label, self.0.id)
    }
}

/// The operator algebra of a truncated free product with expectation
/// `x ↦ p(x 1_B)`. Side and zero checks run on all basis words up to depth 2.
pub struct OperatorModel {
    fp: Arc<FreeProduct>,
    side_cache: Mutex<HashMap<(u64, Side), bool>>,
}

impl OperatorModel {
    pub fn new(fp: Arc<FreeProduct>) -> Self {
        OperatorModel { fp, side_cache: Mutex::new(HashMap::new()) }
    }

    pub fn free_product(&self) -> &Arc<FreeProduct> {
        &self.fp
    }

    pub fn apply_prim(&self, p: &Prim, v: &FpVector) -> Result<FpVector> {
        match p {
            Prim::Lambda(k, t) => self.fp.lambda(*k, t, v),
            Prim::Rho(k, t) => self.fp.rho(*k, t, v),
            Prim::Proj(k) => Ok(self.fp.proj(*k, v)),
            Prim::LeftB(b) => self.fp.left_b(b, v),
            Prim::RightB(b) => self.fp.right_b(b, v),
        }
    }

    pub fn apply(&self, x: &OpRef, v: &FpVector) -> Result<FpVector> {
        let mut cur = v.clone();
        for p in x.prims().iter().rev() {
            if cur.is_zero() {
                break;
            }
            cur = self.apply_prim(p, &cur)?;
        }
        Ok(cur)
    }

    pub fn apply_word(&self, word: &[Letter<OpRef>], v: &FpVector) -> Result<FpVector> {
        let mut cur = v.clone();
        for l in word.iter().rev() {
            if cur.is_zero() {
                break;
            }
            cur = match l {
                Letter::Elem(x) => self.apply(x, &cur)?,
                Letter::Left(b) => self.fp.left_b(b, &cur)?,
                Letter::Right(b) => self.fp.right_b(b, &cur)?,
            };
        }
        Ok(cur)
    }

    fn probe_depth(&self, raising: usize) -> Result<usize> {
        let d = self.fp.depth();
        if raising > d {
            return Err(Error::DepthExceeded { depth: d, needed: raising });
        }
        Ok((d - raising).min(2))
    }

    fn word_raising(word: &[Letter<OpRef>]) -> usize {
        word.iter().map(|l| if let Letter::Elem(x) = l { x.raising() } else { 0 }).sum()
    }
}

impl MomentSpace for OperatorModel {
    type Elem = OpRef;

    fn base(&self) -> &StructuredAlgebra {
        self.fp.base()
    }

    fn expect(&self, word: &[Letter<OpRef>]) -> Result<AlgebraElement> {
        Ok(self.fp.p(&self.apply_word(word, &self.fp.unit())?))
    }

    fn in_side(&self, x: &OpRef, side: Side) -> Result<bool> {
        let side = if side == Side::Bool { Side::Left } else { side };
        if let Some(v) = self.side_cache.lock().unwrap().get(&(x.id(), side)) {
            return Ok(*v);
        }
        let depth = self.probe_depth(x.raising())?;
        let base = self.fp.base();
        let mut ok = true;
        'outer: for w in self.fp.basis_words(depth) {
            let v = self.fp.word_vector(&w);
            let xv = self.apply(x, &v)?;
            for i in 0..base.dim() {
                let e = base.basis(i);
                let (lhs, rhs) = match side {
                    Side::Right => (self.apply(x, &self.fp.left_b(&e, &v)?)?, self.fp.left_b(&e, &xv)?),
                    _ => (self.apply(x, &self.fp.right_b(&e, &v)?)?, self.fp.right_b(&e, &xv)?),
                };
                if lhs != rhs {
                    ok = false;
                    break 'outer;
                }
            }
        }
        self.side_cache.lock().unwrap().insert((x.id(), side), ok);
        Ok(ok)
    }

    fn is_zero_product(&self, word: &[Letter<OpRef>]) -> Result<bool> {
        let depth = self.probe_depth(Self::word_raising(word))?;
        for w in self.fp.basis_words(depth) {
            if !self.apply_word(word, &self.fp.word_vector(&w))?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn describe(&self, x: &OpRef) -> String {
        x.label().to_string()
    }
}

