//! Block-collapsing recursion shared by the moment functional E_π and the
//! diagram vectors E_D: evaluate a closed block, then insert its value as
//! L_b or R_b next to the remaining operators.

use crate::algebra::AlgebraElement;
use crate::bnc::Side;
use crate::error::{Error, Result};
use std::cmp::Ordering;

#[derive(Clone, Debug)]
pub(crate) struct RBlock {
    pub nodes: Vec<usize>,
    pub top: bool,
}

impl RBlock {
    fn min(&self) -> usize {
        self.nodes[0]
    }

    fn max(&self) -> usize {
        *self.nodes.last().unwrap()
    }

    /// Open vertical span of the spine; top strings reach the top gap.
    fn spans(&self, x: usize) -> bool {
        (self.top || self.min() < x) && x < self.max()
    }
}

pub(crate) enum Collapsed<L> {
    Value(AlgebraElement),
    /// Remaining top blocks in spine order, each with its accumulated word.
    Tops(Vec<(usize, Vec<L>)>),
}

pub(crate) struct Collapse<'a> {
    pub sides: &'a [Side],
    pub blocks: &'a [RBlock],
    pub spine_order: &'a [usize],
}

impl Collapse<'_> {
    fn spine_rank(&self, b: usize) -> usize {
        self.spine_order.iter().position(|&x| x == b).unwrap_or(usize::MAX)
    }

    /// `a`'s spine must lie left of `b`'s: otherwise a rib would cross a spine.
    fn must_left(&self, a: usize, b: usize) -> bool {
        let (ba, bb) = (&self.blocks[a], &self.blocks[b]);
        bb.nodes.iter().any(|&x| self.sides[x] == Side::Right && ba.spans(x))
            || ba.nodes.iter().any(|&x| self.sides[x] == Side::Left && bb.spans(x))
    }

    fn spine_cmp(&self, a: usize, b: usize) -> Ordering {
        let (ba, bb) = (&self.blocks[a], &self.blocks[b]);
        if ba.top && bb.top {
            return self.spine_rank(a).cmp(&self.spine_rank(b));
        }
        if self.must_left(a, b) {
            Ordering::Less
        } else if self.must_left(b, a) {
            Ordering::Greater
        } else {
            ba.min().cmp(&bb.min())
        }
    }

    /// Where the value of closed block `v` goes: (slot, prepend side) or
    /// (slot, None) to append L on the right.
    fn destination(&self, v: usize, alive: &[bool]) -> Option<(usize, Option<Side>)> {
        let m = self.blocks[v].min();
        let others = || (0..self.blocks.len()).filter(move |&w| w != v && alive[w]);
        let later = others().any(|w| self.blocks[w].max() > m);
        if !later {
            let pred = others().flat_map(|w| self.blocks[w].nodes.iter().copied()).filter(|&x| x < m).max()?;
            return Some((pred, None));
        }
        let mut crossing: Vec<usize> = others().filter(|&w| self.blocks[w].spans(m)).collect();
        if crossing.is_empty() {
            return None;
        }
        crossing.sort_by(|&a, &b| self.spine_cmp(a, b));
        let side = self.sides[m];
        let w = if side == Side::Left { crossing[0] } else { *crossing.last().unwrap() };
        let k = *self.blocks[w].nodes.iter().find(|&&x| x > m)?;
        Some((k, Some(side)))
    }

    /// Closed blocks that may be collapsed next, ordered by minimum.
    fn candidates(&self, alive: &[bool]) -> Vec<usize> {
        let alive_count = alive.iter().filter(|a| **a).count();
        let mut out: Vec<usize> = (0..self.blocks.len())
            .filter(|&v| alive[v] && !self.blocks[v].top)
            .filter(|&v| {
                let (lo, hi) = (self.blocks[v].min(), self.blocks[v].max());
                let nested = (0..self.blocks.len()).any(|w| {
                    w != v && alive[w] && !self.blocks[w].top && lo < self.blocks[w].min() && self.blocks[w].min() < hi
                });
                !nested && (alive_count == 1 || self.destination(v, alive).is_some())
            })
            .collect();
        out.sort_by_key(|&v| self.blocks[v].min());
        out
    }

    /// Runs the recursion. `pick` chooses among legal candidates; choosing the
    /// last one always follows the largest-minimum rule.
    pub fn run<L: Clone>(
        &self,
        mut slots: Vec<Vec<L>>,
        wrap: &dyn Fn(Side, AlgebraElement) -> L,
        eval: &mut dyn FnMut(usize, &[L]) -> Result<AlgebraElement>,
        pick: &mut dyn FnMut(&[usize]) -> usize,
    ) -> Result<Collapsed<L>> {
        let mut alive = vec![true; self.blocks.len()];
        loop {
            let cands = self.candidates(&alive);
            if cands.is_empty() {
                if self.blocks.iter().zip(&alive).any(|(b, a)| *a && !b.top) {
                    return Err(Error::Invalid("no legal block to collapse".into()));
                }
                let tops = self
                    .spine_order
                    .iter()
                    .map(|&b| (b, self.blocks[b].nodes.iter().flat_map(|&x| slots[x].clone()).collect()))
                    .collect();
                return Ok(Collapsed::Tops(tops));
            }
            let v = cands[pick(&cands).min(cands.len() - 1)];
            let word: Vec<L> = self.blocks[v].nodes.iter().flat_map(|&x| slots[x].clone()).collect();
            let val = eval(v, &word)?;
            let dest = self.destination(v, &alive);
            alive[v] = false;
            if !alive.iter().any(|a| *a) {
                return Ok(Collapsed::Value(val));
            }
            match dest {
                Some((k, None)) => slots[k].push(wrap(Side::Left, val)),
                Some((k, Some(side))) => slots[k].insert(0, wrap(side, val)),
                None => return Err(Error::Invalid("collapsed block has no destination".into())),
            }
        }
    }
}
