//! Shaded LR diagrams: recursive enumeration, lateral refinement,
//! Boolean filtering and extensions of suffix families.

use crate::bnc::{check_cap, ChiMap, EpsilonMap, SetPartition, Side, DEFAULT_LR_CAP};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

const MAX_JSON_NODES: usize = 64;

/// One string of a diagram. `nodes` are 0-based and ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Strand {
    pub nodes: Vec<usize>,
    pub top: bool,
}

/// Canonical form: strands sorted by first node, isolated nodes included;
/// `spine_order` lists the top strands from left to right.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LrDiagram {
    chi: ChiMap,
    eps: EpsilonMap,
    strands: Vec<Strand>,
    spine_order: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct StrandJson {
    nodes: Vec<usize>,
    top: bool,
}

#[derive(Serialize, Deserialize)]
struct DiagramJson {
    chi: String,
    eps: Vec<u32>,
    strings: Vec<StrandJson>,
    spine_order: Vec<usize>,
}

impl LrDiagram {
    pub fn empty() -> Self {
        LrDiagram { chi: ChiMap::new(vec![]), eps: EpsilonMap::new(vec![]), strands: vec![], spine_order: vec![] }
    }

    /// Builds a diagram from loose parts, then canonicalises.
    fn assemble(chi: ChiMap, eps: EpsilonMap, strands: Vec<Strand>, spine: Vec<usize>) -> Self {
        let mut idx: Vec<usize> = (0..strands.len()).collect();
        idx.sort_by_key(|&i| strands[i].nodes[0]);
        let mut pos = vec![0; strands.len()];
        for (new, &old) in idx.iter().enumerate() {
            pos[old] = new;
        }
        let sorted = idx.iter().map(|&i| strands[i].clone()).collect();
        let spine_order = spine.iter().map(|&s| pos[s]).collect();
        LrDiagram { chi, eps, strands: sorted, spine_order }
    }

    pub fn chi(&self) -> &ChiMap {
        &self.chi
    }

    pub fn eps(&self) -> &EpsilonMap {
        &self.eps
    }

    pub fn n(&self) -> usize {
        self.chi.len()
    }

    pub fn strands(&self) -> &[Strand] {
        &self.strands
    }

    pub fn spine_order(&self) -> &[usize] {
        &self.spine_order
    }

    pub fn top_count(&self) -> usize {
        self.spine_order.len()
    }

    pub fn colour_of(&self, strand: usize) -> u32 {
        self.eps.colours()[self.strands[strand].nodes[0]]
    }

    /// Colours of the top strands, left to right.
    pub fn top_colours(&self) -> Vec<u32> {
        self.spine_order.iter().map(|&s| self.colour_of(s)).collect()
    }

    /// Partition by connectivity, ignoring whether strings reach the top.
    pub fn connectivity(&self) -> SetPartition {
        let mut labels = vec![0; self.n()];
        for (b, s) in self.strands.iter().enumerate() {
            for &x in &s.nodes {
                labels[x] = b;
            }
        }
        SetPartition::from_labels(&labels)
    }

    /// The bi-non-crossing partition of a diagram with no top strings.
    pub fn to_partition(&self) -> Result<SetPartition> {
        if self.top_count() > 0 {
            return Err(Error::HasTopSpine);
        }
        Ok(self.connectivity())
    }

    fn shifted_strands(&self) -> Vec<Strand> {
        self.strands
            .iter()
            .map(|s| Strand { nodes: s.nodes.iter().map(|x| x + 1).collect(), top: s.top })
            .collect()
    }

    fn prefixed_maps(&self, side: Side, colour: u32) -> (ChiMap, EpsilonMap) {
        let mut c = vec![side];
        c.extend_from_slice(self.chi.sides());
        let mut e = vec![colour];
        e.extend_from_slice(self.eps.colours());
        (ChiMap::new(c), EpsilonMap::new(e))
    }

    /// The top strand a new node on `side` of shade `colour` attaches to, if any.
    fn target(&self, side: Side, colour: u32) -> Option<usize> {
        let s = match side {
            Side::Left => *self.spine_order.first()?,
            _ => *self.spine_order.last()?,
        };
        (self.colour_of(s) == colour).then_some(s)
    }

    /// The two diagrams obtained by adding a node above `self`:
    /// first without a new top string, then with one.
    pub fn prepend(&self, side: Side, colour: u32) -> [LrDiagram; 2] {
        let (chi, eps) = self.prefixed_maps(side, colour);
        let base = self.shifted_strands();
        let spine = self.spine_order.clone();
        match self.target(side, colour) {
            Some(t) => {
                let mut closed = base.clone();
                closed[t].nodes.insert(0, 0);
                closed[t].top = false;
                let sp_closed: Vec<usize> = spine.iter().copied().filter(|&s| s != t).collect();
                let mut open = base;
                open[t].nodes.insert(0, 0);
                [
                    Self::assemble(chi.clone(), eps.clone(), closed, sp_closed),
                    Self::assemble(chi, eps, open, spine),
                ]
            }
            None => {
                let mut closed = base.clone();
                closed.push(Strand { nodes: vec![0], top: false });
                let mut open = base;
                open.push(Strand { nodes: vec![0], top: true });
                let id = open.len() - 1;
                let mut sp_open = spine.clone();
                match side {
                    Side::Left => sp_open.insert(0, id),
                    _ => sp_open.push(id),
                }
                [
                    Self::assemble(chi.clone(), eps.clone(), closed, spine),
                    Self::assemble(chi, eps, open, sp_open),
                ]
            }
        }
    }

    /// Signed diagrams produced when the operator of a new node acts on the
    /// vector of `self`; coefficients are +1 or -1.
    pub fn prepend_terms(&self, side: Side, colour: u32) -> Vec<(LrDiagram, i64)> {
        let [closed, open] = self.prepend(side, colour);
        let Some(t) = self.target(side, colour) else {
            return vec![(closed, 1), (open, 1)];
        };
        let (chi, eps) = self.prefixed_maps(side, colour);
        let base = self.shifted_strands();
        let spine = self.spine_order.clone();
        // new node cut off and closed; the target closes below it
        let mut both_closed = base.clone();
        both_closed[t].top = false;
        both_closed.push(Strand { nodes: vec![0], top: false });
        let sp: Vec<usize> = spine.iter().copied().filter(|&s| s != t).collect();
        let both_closed = Self::assemble(chi.clone(), eps.clone(), both_closed, sp);
        // new node keeps the target's spine; the target closes below it
        let mut upper_top = base;
        upper_top[t].top = false;
        upper_top.push(Strand { nodes: vec![0], top: true });
        let id = upper_top.len() - 1;
        let sp: Vec<usize> = spine.iter().map(|&s| if s == t { id } else { s }).collect();
        let upper_top = Self::assemble(chi, eps, upper_top, sp);
        vec![(closed, 1), (both_closed, -1), (open, 1), (upper_top, -1)]
    }

    /// Spine positions between consecutive ribs: (strand, j) cuts below the j-th node.
    pub fn cut_positions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (s, st) in self.strands.iter().enumerate() {
            for j in 1..st.nodes.len() {
                out.push((s, j));
            }
        }
        out
    }

    /// Cuts strand `s` between its nodes `j-1` and `j`. The upper piece keeps
    /// the top flag and spine position; the lower piece is closed.
    pub fn cut(&self, s: usize, j: usize) -> LrDiagram {
        let mut strands = self.strands.clone();
        let lower = Strand { nodes: strands[s].nodes.split_off(j), top: false };
        strands.push(lower);
        Self::assemble(self.chi.clone(), self.eps.clone(), strands, self.spine_order.clone())
    }

    /// Structural checks: node cover, monochromatic strings, spine order of the top strings.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.eps.len() != n {
            return Err(Error::SizeMismatch { expected: n, found: self.eps.len() });
        }
        self.chi.require_two_sided()?;
        let mut seen = vec![false; n];
        for s in &self.strands {
            if s.nodes.is_empty() {
                return Err(Error::Invalid("empty string".into()));
            }
            if s.nodes.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Invalid("string nodes must ascend".into()));
            }
            let c = self.eps.colours()[s.nodes[0]];
            for &x in &s.nodes {
                if x >= n || seen[x] {
                    return Err(Error::Invalid(format!("node {} out of range or repeated", x + 1)));
                }
                seen[x] = true;
                if self.eps.colours()[x] != c {
                    return Err(Error::Colouring("string joins nodes of different shades".into()));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Invalid("node not covered".into()));
        }
        let tops: BTreeSet<usize> = (0..self.strands.len()).filter(|&i| self.strands[i].top).collect();
        let order: BTreeSet<usize> = self.spine_order.iter().copied().collect();
        if tops != order || order.len() != self.spine_order.len() {
            return Err(Error::Invalid("spine order must list each top string once".into()));
        }
        Ok(())
    }

    /// True when the diagram is in the lateral closure of LR(chi, eps).
    pub fn is_realizable(&self) -> Result<bool> {
        self.validate()?;
        let fam = lateral_closure(&enumerate_lr(&self.chi, &self.eps)?);
        Ok(fam.diagrams.binary_search(self).is_ok())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let strings = self
            .strands
            .iter()
            .map(|s| StrandJson { nodes: s.nodes.iter().map(|x| x + 1).collect(), top: s.top })
            .collect();
        serde_json::to_value(DiagramJson {
            chi: self.chi.to_string(),
            eps: self.eps.colours().to_vec(),
            strings,
            spine_order: self.spine_order.clone(),
        })
        .expect("diagram serializes")
    }

    /// Parses JSON with 1-based nodes. Nodes not mentioned become isolated closed strings.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: DiagramJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let chi: ChiMap = raw.chi.parse()?;
        let n = chi.len();
        if n > MAX_JSON_NODES {
            return Err(Error::Parse("too many nodes".into()));
        }
        let eps = EpsilonMap::new(raw.eps);
        let mut strands = Vec::new();
        let mut seen = vec![false; n];
        for s in raw.strings {
            let mut nodes = Vec::with_capacity(s.nodes.len());
            for x in s.nodes {
                if x == 0 || x > n {
                    return Err(Error::Parse(format!("node {x} out of range")));
                }
                if seen[x - 1] {
                    return Err(Error::Parse(format!("node {x} repeated")));
                }
                seen[x - 1] = true;
                nodes.push(x - 1);
            }
            if nodes.is_empty() {
                return Err(Error::Parse("empty string".into()));
            }
            nodes.sort_unstable();
            strands.push(Strand { nodes, top: s.top });
        }
        if raw.spine_order.iter().any(|&i| i >= strands.len()) {
            return Err(Error::Parse("spine order index out of range".into()));
        }
        for (x, s) in seen.iter().enumerate() {
            if !s {
                strands.push(Strand { nodes: vec![x], top: false });
            }
        }
        let d = Self::assemble(chi, eps, strands, raw.spine_order);
        d.validate()?;
        Ok(d)
    }
}

/// A sorted, duplicate-free set of diagrams over one colouring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramFamily {
    pub chi: ChiMap,
    pub eps: EpsilonMap,
    pub diagrams: Vec<LrDiagram>,
}

impl DiagramFamily {
    fn from_set(chi: ChiMap, eps: EpsilonMap, set: BTreeSet<LrDiagram>) -> Self {
        DiagramFamily { chi, eps, diagrams: set.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.diagrams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagrams.is_empty()
    }

    pub fn contains(&self, d: &LrDiagram) -> bool {
        self.diagrams.binary_search(d).is_ok()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.diagrams.iter().map(|d| d.to_json()).collect())
    }
}

fn check_maps(chi: &ChiMap, eps: &EpsilonMap) -> Result<()> {
    chi.require_two_sided()?;
    if chi.len() != eps.len() {
        return Err(Error::SizeMismatch { expected: chi.len(), found: eps.len() });
    }
    Ok(())
}

/// LR(chi, eps) by the node-prepending recursion.
pub fn enumerate_lr(chi: &ChiMap, eps: &EpsilonMap) -> Result<DiagramFamily> {
    check_maps(chi, eps)?;
    check_cap(chi.len(), DEFAULT_LR_CAP)?;
    let mut cur = vec![LrDiagram::empty()];
    for i in (0..chi.len()).rev() {
        let (side, colour) = (chi.sides()[i], eps.colours()[i]);
        cur = cur.iter().flat_map(|d| d.prepend(side, colour)).collect();
    }
    Ok(DiagramFamily::from_set(chi.clone(), eps.clone(), cur.into_iter().collect()))
}

/// Diagrams with exactly `k` top strings.
pub fn lr_k(fam: &DiagramFamily, k: usize) -> DiagramFamily {
    DiagramFamily {
        chi: fam.chi.clone(),
        eps: fam.eps.clone(),
        diagrams: fam.diagrams.iter().filter(|d| d.top_count() == k).cloned().collect(),
    }
}

/// Closure under spine cuts between ribs.
pub fn lateral_closure(fam: &DiagramFamily) -> DiagramFamily {
    let mut set: BTreeSet<LrDiagram> = fam.diagrams.iter().cloned().collect();
    let mut frontier: Vec<LrDiagram> = fam.diagrams.clone();
    while let Some(d) = frontier.pop() {
        for (s, j) in d.cut_positions() {
            let c = d.cut(s, j);
            if set.insert(c.clone()) {
                frontier.push(c);
            }
        }
    }
    DiagramFamily::from_set(fam.chi.clone(), fam.eps.clone(), set)
}

/// True when `P_k` does not annihilate the diagram's vector: no top strings,
/// or exactly one of colour `k`.
pub fn survives_projection(d: &LrDiagram, k: u32) -> bool {
    match d.top_colours().as_slice() {
        [] => true,
        [c] => *c == k,
        _ => false,
    }
}

/// Splits a family into the part kept by `P_k` and its complement.
pub fn filter_boolean(fam: &DiagramFamily, k: u32) -> (DiagramFamily, DiagramFamily) {
    let (kept, removed): (Vec<LrDiagram>, Vec<LrDiagram>) =
        fam.diagrams.iter().cloned().partition(|d| survives_projection(d, k));
    let mk = |diagrams| DiagramFamily { chi: fam.chi.clone(), eps: fam.eps.clone(), diagrams };
    (mk(kept), mk(removed))
}

/// All chi-extensions of a suffix family: prepend the missing nodes in every
/// way, then cut any spine segment whose upper rib sits above the suffix start.
pub fn chi_extensions(suffix: &DiagramFamily, chi: &ChiMap, eps: &EpsilonMap) -> Result<DiagramFamily> {
    check_maps(chi, eps)?;
    let n = chi.len();
    let m = suffix.chi.len();
    if m > n || chi.suffix(n - m) != suffix.chi || eps.suffix(n - m) != suffix.eps {
        return Err(Error::SuffixMismatch);
    }
    check_cap(n, DEFAULT_LR_CAP)?;
    let start = n - m;
    let mut cur: Vec<LrDiagram> = suffix.diagrams.clone();
    for i in (0..start).rev() {
        let (side, colour) = (chi.sides()[i], eps.colours()[i]);
        cur = cur.iter().flat_map(|d| d.prepend(side, colour)).collect();
    }
    let mut set = BTreeSet::new();
    for d in cur {
        let mut stack = vec![d];
        while let Some(x) = stack.pop() {
            if !set.insert(x.clone()) {
                continue;
            }
            for (s, j) in x.cut_positions() {
                if x.strands[s].nodes[j - 1] < start {
                    stack.push(x.cut(s, j));
                }
            }
        }
    }
    Ok(DiagramFamily::from_set(chi.clone(), eps.clone(), set))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts_double() {
        let chi: ChiMap = "lrl".parse().unwrap();
        let eps: EpsilonMap = "1,1,2".parse().unwrap();
        let fam = enumerate_lr(&chi, &eps).unwrap();
        assert_eq!(fam.len(), 8);
        assert_eq!(lr_k(&fam, 0).len(), 2);
        assert_eq!(lr_k(&fam, 1).len(), 3);
    }

    #[test]
    fn json_roundtrip_and_implicit_singletons() {
        let chi: ChiMap = "lrl".parse().unwrap();
        let eps: EpsilonMap = "1,1,2".parse().unwrap();
        for d in enumerate_lr(&chi, &eps).unwrap().diagrams {
            let back = LrDiagram::from_json_str(&d.to_json().to_string()).unwrap();
            assert_eq!(back, d);
        }
        let d = LrDiagram::from_json_str(r#"{"chi":"lr","eps":[1,2],"strings":[{"nodes":[2],"top":true}],"spine_order":[0]}"#)
            .unwrap();
        assert_eq!(d.strands().len(), 2);
        assert!(d.is_realizable().unwrap());
        let same_shade = LrDiagram::from_json_str(r#"{"chi":"lr","eps":[1,1],"strings":[{"nodes":[2],"top":true}],"spine_order":[0]}"#)
            .unwrap();
        assert!(!same_shade.is_realizable().unwrap());
    }

    #[test]
    fn top_spine_blocks_partition() {
        let chi: ChiMap = "l".parse().unwrap();
        let eps: EpsilonMap = "1".parse().unwrap();
        let fam = enumerate_lr(&chi, &eps).unwrap();
        let with_top = fam.diagrams.iter().find(|d| d.top_count() == 1).unwrap();
        assert_eq!(with_top.to_partition(), Err(Error::HasTopSpine));
    }
}
