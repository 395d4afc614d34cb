//! The bi-multiplicative moment function E_π, bi-free cumulants, and the
//! moment-cumulant identities for two-faced and Boolean families.

use crate::algebra::AlgebraElement;
use crate::bnc::{BncContext, ChiMap, EpsilonMap, FfbContext, SetPartition, Side};
use crate::error::{Error, Result};
use crate::reduce::{Collapse, Collapsed, RBlock};
use crate::report::Report;
use crate::space::{Letter, MomentSpace};
use rand::Rng;
use serde_json::json;
use std::cell::RefCell;
use std::collections::HashMap;

type EpiKey<E> = (ChiMap, Vec<usize>, Vec<E>);

/// Memoizing evaluator of E_π and κ_π over a moment space.
pub struct MomentEngine<'a, S: MomentSpace> {
    space: &'a S,
    words: RefCell<HashMap<Vec<Letter<S::Elem>>, AlgebraElement>>,
    partitions: RefCell<HashMap<EpiKey<S::Elem>, AlgebraElement>>,
    sides_ok: RefCell<HashMap<(S::Elem, Side), bool>>,
}

/// A slot of a word with Boolean positions: a single operator, or the two
/// factors of a Boolean operator that occupy an (l, r) pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FfbSlot<E> {
    Single(E),
    Pair(E, E),
}

#[derive(Clone, Debug)]
pub struct Table {
    pub chi: ChiMap,
    pub eps: Option<EpsilonMap>,
    pub entries: Vec<(SetPartition, AlgebraElement)>,
}

impl Table {
    pub fn get(&self, p: &SetPartition) -> Option<&AlgebraElement> {
        self.entries.iter().find(|(q, _)| q == p).map(|(_, v)| v)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "chi": self.chi.to_string(),
            "eps": self.eps.as_ref().map(|e| e.colours().to_vec()),
            "entries": self.entries.iter().map(|(p, v)| json!({
                "pi": p.to_rgs_string(),
                "blocks": p.to_block_string(),
                "value": v.to_strings(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Result of the moment-cumulant formula over BNC_ffb.
#[derive(Clone, Debug)]
pub struct FfbFormula {
    pub lhs: AlgebraElement,
    pub rhs: AlgebraElement,
    pub residual: AlgebraElement,
    pub kappa_full: AlgebraElement,
    /// Σ_{π ∈ BNC_ffb} E_π μ(π, 1_χ).
    pub kappa_full_ffb: AlgebraElement,
}

/// Each block of `p` carries a single colour.
pub fn refines_colouring(p: &SetPartition, eps: &EpsilonMap) -> bool {
    p.blocks().iter().all(|b| b.iter().all(|&x| eps.colours()[x] == eps.colours()[b[0]]))
}

fn show(x: &AlgebraElement) -> serde_json::Value {
    json!(x.to_strings())
}

impl<'a, S: MomentSpace> MomentEngine<'a, S> {
    pub fn new(space: &'a S) -> Self {
        MomentEngine {
            space,
            words: RefCell::new(HashMap::new()),
            partitions: RefCell::new(HashMap::new()),
            sides_ok: RefCell::new(HashMap::new()),
        }
    }

    pub fn space(&self) -> &S {
        self.space
    }

    /// Memoized E of a word.
    pub fn expect(&self, word: &[Letter<S::Elem>]) -> Result<AlgebraElement> {
        if let Some(v) = self.words.borrow().get(word) {
            return Ok(v.clone());
        }
        let v = self.space.expect(word)?;
        self.words.borrow_mut().insert(word.to_vec(), v.clone());
        Ok(v)
    }

    /// Verifies Z_i lies in the left or right algebra according to χ(i).
    pub fn check_sides(&self, chi: &ChiMap, z: &[S::Elem]) -> Result<()> {
        if chi.len() != z.len() {
            return Err(Error::SizeMismatch { expected: chi.len(), found: z.len() });
        }
        for (i, (s, x)) in chi.sides().iter().zip(z).enumerate() {
            let key = (x.clone(), *s);
            let cached = self.sides_ok.borrow().get(&key).copied();
            let ok = match cached {
                Some(v) => v,
                None => {
                    let v = self.space.in_side(x, *s)?;
                    self.sides_ok.borrow_mut().insert(key, v);
                    v
                }
            };
            if !ok {
                return Err(Error::SideMismatch { index: i + 1, side: s.name().into() });
            }
        }
        Ok(())
    }

    fn collapse(
        &self,
        ctx: &BncContext,
        pi: &SetPartition,
        z: &[S::Elem],
        pick: &mut dyn FnMut(&[usize]) -> usize,
    ) -> Result<AlgebraElement> {
        if z.is_empty() {
            return self.expect(&[]);
        }
        let blocks: Vec<RBlock> = pi.blocks().into_iter().map(|nodes| RBlock { nodes, top: false }).collect();
        let c = Collapse { sides: ctx.chi().sides(), blocks: &blocks, spine_order: &[] };
        let slots: Vec<Vec<Letter<S::Elem>>> = z.iter().map(|x| vec![Letter::Elem(x.clone())]).collect();
        let wrap = |s: Side, b: AlgebraElement| if s == Side::Right { Letter::Right(b) } else { Letter::Left(b) };
        let mut eval = |_: usize, w: &[Letter<S::Elem>]| self.expect(w);
        match c.run(slots, &wrap, &mut eval, pick)? {
            Collapsed::Value(v) => Ok(v),
            Collapsed::Tops(_) => Err(Error::Invalid("partition left uncollapsed blocks".into())),
        }
    }

    fn prepare(&self, ctx: &BncContext, pi: &SetPartition, z: &[S::Elem]) -> Result<()> {
        ctx.require_bnc(pi)?;
        self.check_sides(ctx.chi(), z)
    }

    /// E_π(Z_1, ..., Z_n).
    pub fn e_pi(&self, ctx: &BncContext, pi: &SetPartition, z: &[S::Elem]) -> Result<AlgebraElement> {
        self.prepare(ctx, pi, z)?;
        let key = (ctx.chi().clone(), pi.rgs().to_vec(), z.to_vec());
        if let Some(v) = self.partitions.borrow().get(&key) {
            return Ok(v.clone());
        }
        let v = self.collapse(ctx, pi, z, &mut |c| c.len() - 1)?;
        self.partitions.borrow_mut().insert(key, v.clone());
        Ok(v)
    }

    /// E_π with a random legal reduction order.
    pub fn e_pi_random_order<R: Rng>(
        &self,
        ctx: &BncContext,
        pi: &SetPartition,
        z: &[S::Elem],
        rng: &mut R,
    ) -> Result<AlgebraElement> {
        self.prepare(ctx, pi, z)?;
        self.collapse(ctx, pi, z, &mut |c| rng.gen_range(0..c.len()))
    }

    /// κ_π = Σ_{σ ≤ π} E_σ μ(σ, π).
    pub fn kappa(&self, ctx: &BncContext, pi: &SetPartition, z: &[S::Elem]) -> Result<AlgebraElement> {
        self.prepare(ctx, pi, z)?;
        let mut acc = self.space.base().zero();
        for (sigma, mu) in ctx.mobius_column(pi)? {
            if mu != 0 {
                acc = acc.add(&self.e_pi(ctx, &sigma, z)?.scale(&crate::rational::q(mu)))?;
            }
        }
        Ok(acc)
    }

    pub fn moment_table(&self, ctx: &BncContext, z: &[S::Elem]) -> Result<Table> {
        let entries =
            ctx.enumerate()?.into_iter().map(|p| self.e_pi(ctx, &p, z).map(|v| (p, v))).collect::<Result<Vec<_>>>()?;
        Ok(Table { chi: ctx.chi().clone(), eps: None, entries })
    }

    pub fn cumulant_table(&self, ctx: &BncContext, z: &[S::Elem]) -> Result<Table> {
        let entries =
            ctx.enumerate()?.into_iter().map(|p| self.kappa(ctx, &p, z).map(|v| (p, v))).collect::<Result<Vec<_>>>()?;
        Ok(Table { chi: ctx.chi().clone(), eps: None, entries })
    }

    /// Both bi-freeness criteria on one word: E(Z) against Σ_{π ≤ ε} κ_π,
    /// and κ_{1_χ} = 0 when ε is not constant.
    pub fn bifree_moment_check(&self, chi: &ChiMap, eps: &EpsilonMap, z: &[S::Elem]) -> Result<Report> {
        if eps.len() != chi.len() {
            return Err(Error::SizeMismatch { expected: chi.len(), found: eps.len() });
        }
        let ctx = BncContext::new(chi.clone())?;
        self.check_sides(chi, z)?;
        let mut rep = Report::new();
        let word: Vec<Letter<S::Elem>> = z.iter().cloned().map(Letter::Elem).collect();
        let lhs = self.expect(&word)?;
        let mut rhs = self.space.base().zero();
        for p in ctx.enumerate()? {
            if refines_colouring(&p, eps) {
                rhs = rhs.add(&self.kappa(&ctx, &p, z)?)?;
            }
        }
        let residual = lhs.sub(&rhs)?;
        rep.record("moment-cumulant-sum", residual.is_zero(), || {
            json!({ "chi": chi.to_string(), "eps": eps.to_string(), "lhs": show(&lhs), "rhs": show(&rhs), "residual": show(&residual) })
        });
        let constant = eps.colours().windows(2).all(|w| w[0] == w[1]);
        let full = SetPartition::full(chi.len());
        let k = self.kappa(&ctx, &full, z)?;
        if constant {
            rep.touch("mixed-cumulant-vanishes");
            rep.set_witness("mixed-cumulant-vanishes", json!({ "vacuous": true, "kappa": show(&k) }));
        } else {
            rep.record("mixed-cumulant-vanishes", k.is_zero(), || {
                json!({ "chi": chi.to_string(), "eps": eps.to_string(), "kappa": show(&k) })
            });
        }
        Ok(rep)
    }

    fn expand(&self, fctx: &FfbContext, eps_hat: &EpsilonMap, z_hat: &[FfbSlot<S::Elem>]) -> Result<(EpsilonMap, Vec<S::Elem>)> {
        let chi_hat = fctx.chi_hat();
        if z_hat.len() != chi_hat.len() {
            return Err(Error::SizeMismatch { expected: chi_hat.len(), found: z_hat.len() });
        }
        let eps = fctx.expand_eps(eps_hat)?;
        let mut z = Vec::with_capacity(fctx.chi().len());
        for (i, (s, slot)) in chi_hat.sides().iter().zip(z_hat).enumerate() {
            match (s, slot) {
                (Side::Bool, FfbSlot::Pair(c, d)) => {
                    z.push(c.clone());
                    z.push(d.clone());
                }
                (Side::Bool, FfbSlot::Single(_)) => {
                    return Err(Error::Colouring(format!("Boolean slot {} needs a factored pair", i + 1)))
                }
                (_, FfbSlot::Single(x)) => z.push(x.clone()),
                (_, FfbSlot::Pair(..)) => {
                    return Err(Error::Colouring(format!("slot {} is not Boolean but got a pair", i + 1)))
                }
            }
        }
        Ok((eps, z))
    }

    /// E(Z_1 ⋯ Z_n) against Σ_{π ∈ BNC_ffb} κ_π on the expanded word.
    pub fn ffb_moment_formula(
        &self,
        fctx: &FfbContext,
        eps_hat: &EpsilonMap,
        z_hat: &[FfbSlot<S::Elem>],
    ) -> Result<FfbFormula> {
        let (_, z) = self.expand(fctx, eps_hat, z_hat)?;
        let ctx = fctx.bnc();
        self.check_sides(ctx.chi(), &z)?;
        let word: Vec<Letter<S::Elem>> = z.iter().cloned().map(Letter::Elem).collect();
        let lhs = self.expect(&word)?;
        let zero = self.space.base().zero();
        let mut rhs = zero.clone();
        let full = SetPartition::full(z.len());
        let mut kappa_full_ffb = zero;
        for p in fctx.enumerate()? {
            rhs = rhs.add(&self.kappa(ctx, &p, &z)?)?;
            let mu = ctx.mobius(&p, &full)?;
            if mu != 0 {
                kappa_full_ffb = kappa_full_ffb.add(&self.e_pi(ctx, &p, &z)?.scale(&crate::rational::q(mu)))?;
            }
        }
        let residual = lhs.sub(&rhs)?;
        let kappa_full = self.kappa(ctx, &full, &z)?;
        Ok(FfbFormula { lhs, rhs, residual, kappa_full, kappa_full_ffb })
    }

    /// κ_{1_χ} on the expanded word; a claim only when ε is not constant.
    pub fn kappa_constancy_check(&self, fctx: &FfbContext, eps_hat: &EpsilonMap, z_hat: &[FfbSlot<S::Elem>]) -> Result<Report> {
        let (eps, z) = self.expand(fctx, eps_hat, z_hat)?;
        let ctx = fctx.bnc();
        let k = self.kappa(ctx, &SetPartition::full(z.len()), &z)?;
        let mut rep = Report::new();
        let constant = eps.colours().windows(2).all(|w| w[0] == w[1]);
        if constant {
            rep.touch("kappa-full-vanishes");
            rep.set_witness("kappa-full-vanishes", json!({ "vacuous": true, "kappa": show(&k) }));
        } else {
            rep.record("kappa-full-vanishes", k.is_zero(), || {
                json!({ "chi_hat": fctx.chi_hat().to_string(), "eps_hat": eps_hat.to_string(), "kappa": show(&k) })
            });
        }
        Ok(rep)
    }

    /// E_π = 0 for every π ≤ ε outside BNC_ffb.
    pub fn ffb_vanishing_check(&self, fctx: &FfbContext, eps_hat: &EpsilonMap, z_hat: &[FfbSlot<S::Elem>]) -> Result<Report> {
        let (eps, z) = self.expand(fctx, eps_hat, z_hat)?;
        let ctx = fctx.bnc();
        self.check_sides(ctx.chi(), &z)?;
        let mut rep = Report::new();
        rep.touch("vanishing-outside-ffb");
        for p in ctx.enumerate()? {
            if !refines_colouring(&p, &eps) || fctx.contains(&p)? {
                continue;
            }
            let v = self.e_pi(ctx, &p, &z)?;
            rep.record("vanishing-outside-ffb", v.is_zero(), || {
                json!({ "chi_hat": fctx.chi_hat().to_string(), "eps_hat": eps_hat.to_string(), "pi": p.to_block_string(), "value": show(&v) })
            });
        }
        Ok(rep)
    }
}
