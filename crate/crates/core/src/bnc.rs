//! Bi-non-crossing partitions: colourings, the order s_chi, lattice operations,
//! Moebius values and the Boolean replacement used for ffb moments.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

pub const DEFAULT_BNC_CAP: usize = 10;
pub const DEFAULT_LR_CAP: usize = 8;
const MAX_PARSE_LEN: usize = 64;

/// Reads the `BNC_ENGINE_CAP` override, falling back to `default`.
pub fn enumeration_cap(default: usize) -> usize {
    std::env::var("BNC_ENGINE_CAP").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(default)
}

pub(crate) fn check_cap(n: usize, default: usize) -> Result<()> {
    let cap = enumeration_cap(default);
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "l")]
    Left,
    #[serde(rename = "r")]
    Right,
    #[serde(rename = "b")]
    Bool,
}

impl Side {
    pub fn letter(self) -> char {
        match self {
            Side::Left => 'l',
            Side::Right => 'r',
            Side::Bool => 'b',
        }
    }

    pub fn from_letter(c: char) -> Option<Side> {
        match c {
            'l' | 'L' | 'ℓ' => Some(Side::Left),
            'r' | 'R' => Some(Side::Right),
            'b' | 'B' => Some(Side::Bool),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bool => "boolean",
        }
    }
}

/// A word over {l, r} (two-sided) or {l, r, b} (with Boolean slots).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChiMap(Vec<Side>);

impl ChiMap {
    pub fn new(sides: Vec<Side>) -> Self {
        ChiMap(sides)
    }

    pub fn sides(&self) -> &[Side] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_two_sided(&self) -> bool {
        !self.0.contains(&Side::Bool)
    }

    pub fn suffix(&self, start: usize) -> ChiMap {
        ChiMap(self.0[start..].to_vec())
    }

    pub fn require_two_sided(&self) -> Result<()> {
        if self.is_two_sided() {
            Ok(())
        } else {
            Err(Error::Alphabet("expected a colouring over {l, r}".into()))
        }
    }
}

impl FromStr for ChiMap {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        for c in s.chars() {
            if c == ',' || c.is_whitespace() {
                continue;
            }
            match Side::from_letter(c) {
                Some(x) => out.push(x),
                None => return Err(Error::Alphabet(format!("unexpected letter {c:?}"))),
            }
            if out.len() > MAX_PARSE_LEN {
                return Err(Error::Parse("colouring too long".into()));
            }
        }
        Ok(ChiMap(out))
    }
}

impl fmt::Display for ChiMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.letter())?;
        }
        Ok(())
    }
}

/// Colour labels of the positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EpsilonMap(Vec<u32>);

impl EpsilonMap {
    pub fn new(c: Vec<u32>) -> Self {
        EpsilonMap(c)
    }

    pub fn colours(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn constant(n: usize, k: u32) -> Self {
        EpsilonMap(vec![k; n])
    }

    pub fn suffix(&self, start: usize) -> EpsilonMap {
        EpsilonMap(self.0[start..].to_vec())
    }
}

impl FromStr for EpsilonMap {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(EpsilonMap(vec![]));
        }
        let parts: Vec<&str> = if s.contains(',') { s.split(',').collect() } else { s.split_whitespace().collect() };
        if parts.len() > MAX_PARSE_LEN {
            return Err(Error::Parse("colour map too long".into()));
        }
        parts
            .iter()
            .map(|p| p.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad colour {p:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(EpsilonMap)
    }
}

impl fmt::Display for EpsilonMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

/// A set partition of {0..n} stored as its restricted growth string.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    rgs: Vec<usize>,
}

impl SetPartition {
    /// Accepts any labelling and canonicalises it to a restricted growth string.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map: HashMap<usize, usize> = HashMap::new();
        let rgs = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        SetPartition { rgs }
    }

    /// Validates that `rgs` is a restricted growth string.
    pub fn from_rgs(rgs: Vec<usize>) -> Result<Self> {
        let mut max: Option<usize> = None;
        for &x in &rgs {
            let bound = max.map_or(0, |m| m + 1);
            if x > bound {
                return Err(Error::Parse(format!("not a restricted growth string: {rgs:?}")));
            }
            max = Some(max.map_or(x, |m| m.max(x)));
        }
        Ok(SetPartition { rgs })
    }

    /// Blocks use 0-based elements; they must cover {0..n} exactly once.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Parse("empty block".into()));
            }
            for &x in block {
                if x >= n {
                    return Err(Error::Parse(format!("element {} out of range", x + 1)));
                }
                if labels[x] != usize::MAX {
                    return Err(Error::Parse(format!("element {} repeated", x + 1)));
                }
                labels[x] = b;
            }
        }
        if let Some(i) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::Parse(format!("element {} missing", i + 1)));
        }
        Ok(Self::from_labels(&labels))
    }

    pub fn singletons(n: usize) -> Self {
        SetPartition { rgs: (0..n).collect() }
    }

    pub fn full(n: usize) -> Self {
        SetPartition { rgs: vec![0; n] }
    }

    pub fn n(&self) -> usize {
        self.rgs.len()
    }

    pub fn rgs(&self) -> &[usize] {
        &self.rgs
    }

    pub fn num_blocks(&self) -> usize {
        self.rgs.iter().max().map_or(0, |m| m + 1)
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.rgs[i]
    }

    /// Blocks in order of their minima, elements ascending (0-based).
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (i, &b) in self.rgs.iter().enumerate() {
            out[b].push(i);
        }
        out
    }

    pub fn same_block(&self, i: usize, j: usize) -> bool {
        self.rgs[i] == self.rgs[j]
    }

    /// `self <= other` in refinement order.
    pub fn refines(&self, other: &SetPartition) -> bool {
        if self.n() != other.n() {
            return false;
        }
        let mut img = vec![usize::MAX; self.num_blocks()];
        for (i, &b) in self.rgs.iter().enumerate() {
            if img[b] == usize::MAX {
                img[b] = other.rgs[i];
            } else if img[b] != other.rgs[i] {
                return false;
            }
        }
        true
    }

    /// Block-wise intersection.
    pub fn meet(&self, other: &SetPartition) -> SetPartition {
        let pairs: Vec<usize> = self.rgs.iter().zip(&other.rgs).map(|(a, b)| a * (other.n() + 1) + b).collect();
        Self::from_labels(&pairs)
    }

    /// Join in the full partition lattice.
    pub fn join_all(&self, other: &SetPartition) -> SetPartition {
        let n = self.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        let mut first_a: HashMap<usize, usize> = HashMap::new();
        let mut first_b: HashMap<usize, usize> = HashMap::new();
        for i in 0..n {
            for (map, lab) in [(&mut first_a, self.rgs[i]), (&mut first_b, other.rgs[i])] {
                let f = *map.entry(lab).or_insert(i);
                let (x, y) = (find(&mut parent, f), find(&mut parent, i));
                parent[x] = y;
            }
        }
        let labels: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
        Self::from_labels(&labels)
    }

    /// Classical non-crossing test in the natural order.
    pub fn is_non_crossing(&self) -> bool {
        let blocks = self.blocks();
        let (mins, maxs): (Vec<usize>, Vec<usize>) =
            blocks.iter().map(|b| (b[0], *b.last().unwrap())).unzip();
        for block in &blocks {
            for w in block.windows(2) {
                let (i, j) = (w[0], w[1]);
                for k in i + 1..j {
                    let c = self.rgs[k];
                    if c != self.rgs[i] && (mins[c] < i || maxs[c] > j) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Smallest non-crossing partition above `self` in the natural order.
    pub fn non_crossing_closure(&self) -> SetPartition {
        let mut p = self.clone();
        loop {
            let blocks = p.blocks();
            let mut merged = None;
            'search: for (x, bx) in blocks.iter().enumerate() {
                for (y, by) in blocks.iter().enumerate().skip(x + 1) {
                    if crosses(bx, by) {
                        merged = Some((x, y));
                        break 'search;
                    }
                }
            }
            match merged {
                None => return p,
                Some((x, y)) => {
                    let labels: Vec<usize> = p.rgs.iter().map(|&b| if b == y { x } else { b }).collect();
                    p = Self::from_labels(&labels);
                }
            }
        }
    }

    /// Partition with position j holding the block of `order[j]`.
    pub fn relabel(&self, order: &[usize]) -> SetPartition {
        let labels: Vec<usize> = order.iter().map(|&i| self.rgs[i]).collect();
        Self::from_labels(&labels)
    }

    /// Restriction to the listed elements, renumbered in the given order.
    pub fn restrict(&self, elems: &[usize]) -> SetPartition {
        self.relabel(elems)
    }

    /// 1-based block list such as `{1,2},{3}`.
    pub fn to_block_string(&self) -> String {
        let parts: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| format!("{{{}}}", b.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        parts.join(",")
    }

    pub fn to_rgs_string(&self) -> String {
        self.rgs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    }

    /// Parses a restricted growth string `0,1,0` or a 1-based block list `{1,3},{2}`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() > 4 * MAX_PARSE_LEN {
            return Err(Error::Parse("partition string too long".into()));
        }
        if s.is_empty() {
            return Ok(SetPartition { rgs: vec![] });
        }
        if s.contains('{') {
            let mut blocks = Vec::new();
            let mut rest = s;
            loop {
                rest = rest.trim_start_matches(|c: char| c == ',' || c.is_whitespace());
                if rest.is_empty() {
                    break;
                }
                let Some(body) = rest.strip_prefix('{') else {
                    return Err(Error::Parse(format!("expected '{{' at {rest:?}")));
                };
                let Some(end) = body.find('}') else {
                    return Err(Error::Parse("unterminated block".into()));
                };
                let inner = &body[..end];
                let mut block = Vec::new();
                for t in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                    let x: usize = t.parse().map_err(|_| Error::Parse(format!("bad element {t:?}")))?;
                    if x == 0 || x > MAX_PARSE_LEN {
                        return Err(Error::Parse(format!("element {x} out of range")));
                    }
                    block.push(x - 1);
                }
                block.sort_unstable();
                blocks.push(block);
                rest = &body[end + 1..];
            }
            let n = blocks.iter().flatten().max().map_or(0, |m| m + 1);
            Self::from_blocks(n, &blocks)
        } else {
            let parts: Vec<&str> = if s.contains(',') { s.split(',').collect() } else { s.split_whitespace().collect() };
            if parts.len() > MAX_PARSE_LEN {
                return Err(Error::Parse("partition too long".into()));
            }
            let rgs = parts
                .iter()
                .map(|p| p.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad label {p:?}"))))
                .collect::<Result<Vec<_>>>()?;
            Self::from_rgs(rgs)
        }
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_block_string())
    }
}

fn crosses(a: &[usize], b: &[usize]) -> bool {
    // a1 < b1 < a2 < b2 or the mirror
    for &a1 in a {
        for &b1 in b.iter().filter(|&&x| x > a1) {
            for &a2 in a.iter().filter(|&&x| x > b1) {
                if b.iter().any(|&x| x > a2) {
                    return true;
                }
            }
        }
    }
    for &b1 in b {
        for &a1 in a.iter().filter(|&&x| x > b1) {
            for &b2 in b.iter().filter(|&&x| x > a1) {
                if a.iter().any(|&x| x > b2) {
                    return true;
                }
            }
        }
    }
    false
}

/// Non-crossing partitions of {0..n} in lexicographic order, built with a stack of open blocks.
pub fn enumerate_nc(n: usize) -> Arc<Vec<SetPartition>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<SetPartition>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&n) {
        return v.clone();
    }
    let mut out = Vec::new();
    let mut rgs = Vec::with_capacity(n);
    let mut stack = Vec::new();
    nc_rec(n, &mut rgs, &mut stack, 0, &mut out);
    let v = Arc::new(out);
    cache.lock().unwrap().insert(n, v.clone());
    v
}

fn nc_rec(n: usize, rgs: &mut Vec<usize>, stack: &mut Vec<usize>, next: usize, out: &mut Vec<SetPartition>) {
    if rgs.len() == n {
        out.push(SetPartition { rgs: rgs.clone() });
        return;
    }
    // Open blocks in increasing label order keep the output lexicographic.
    let mut open: Vec<(usize, usize)> = stack.iter().enumerate().map(|(pos, &b)| (b, pos)).collect();
    open.sort_unstable();
    for (b, pos) in open {
        let saved = stack.clone();
        stack.truncate(pos + 1);
        rgs.push(b);
        nc_rec(n, rgs, stack, next, out);
        rgs.pop();
        *stack = saved;
    }
    stack.push(next);
    rgs.push(next);
    nc_rec(n, rgs, stack, next + 1, out);
    rgs.pop();
    stack.pop();
}

/// Lattice data attached to a two-sided colouring.
#[derive(Clone, Debug)]
pub struct BncContext {
    chi: ChiMap,
    /// `order[j]` is the element at position j of s_chi.
    order: Vec<usize>,
    /// `rank[i]` is the position of element i in s_chi.
    rank: Vec<usize>,
}

impl BncContext {
    pub fn new(chi: ChiMap) -> Result<Self> {
        chi.require_two_sided()?;
        let n = chi.len();
        let mut order: Vec<usize> = (0..n).filter(|&i| chi.0[i] == Side::Left).collect();
        order.extend((0..n).rev().filter(|&i| chi.0[i] == Side::Right));
        let mut rank = vec![0; n];
        for (j, &i) in order.iter().enumerate() {
            rank[i] = j;
        }
        Ok(BncContext { chi, order, rank })
    }

    pub fn chi(&self) -> &ChiMap {
        &self.chi
    }

    pub fn n(&self) -> usize {
        self.chi.len()
    }

    /// The permutation s_chi as a list of 0-based elements.
    pub fn s_chi(&self) -> &[usize] {
        &self.order
    }

    pub fn rank(&self) -> &[usize] {
        &self.rank
    }

    fn check_len(&self, p: &SetPartition) -> Result<()> {
        if p.n() != self.n() {
            return Err(Error::SizeMismatch { expected: self.n(), found: p.n() });
        }
        Ok(())
    }

    /// Relabel to positions of s_chi.
    pub fn to_nc(&self, p: &SetPartition) -> SetPartition {
        p.relabel(&self.order)
    }

    /// Inverse of [`BncContext::to_nc`].
    pub fn from_nc(&self, p: &SetPartition) -> SetPartition {
        p.relabel(&self.rank)
    }

    pub fn is_bnc(&self, p: &SetPartition) -> Result<bool> {
        self.check_len(p)?;
        Ok(self.to_nc(p).is_non_crossing())
    }

    pub fn require_bnc(&self, p: &SetPartition) -> Result<()> {
        if self.is_bnc(p)? {
            Ok(())
        } else {
            Err(Error::NotBnc)
        }
    }

    /// All bi-non-crossing partitions, lexicographic in RGS.
    pub fn enumerate(&self) -> Result<Vec<SetPartition>> {
        check_cap(self.n(), DEFAULT_BNC_CAP)?;
        let mut out: Vec<SetPartition> = enumerate_nc(self.n()).iter().map(|p| self.from_nc(p)).collect();
        out.sort();
        Ok(out)
    }

    pub fn meet(&self, a: &SetPartition, b: &SetPartition) -> Result<SetPartition> {
        self.require_bnc(a)?;
        self.require_bnc(b)?;
        Ok(a.meet(b))
    }

    pub fn join(&self, a: &SetPartition, b: &SetPartition) -> Result<SetPartition> {
        self.require_bnc(a)?;
        self.require_bnc(b)?;
        let j = self.to_nc(&a.join_all(b)).non_crossing_closure();
        Ok(self.from_nc(&j))
    }

    /// mu_BNC(a, b); zero unless a <= b.
    pub fn mobius(&self, a: &SetPartition, b: &SetPartition) -> Result<i64> {
        self.require_bnc(a)?;
        self.require_bnc(b)?;
        if !a.refines(b) {
            return Ok(0);
        }
        Ok(mobius_nc(&self.to_nc(a), &self.to_nc(b)))
    }

    /// All pairs (tau, mu(tau, sigma)) with tau <= sigma, tau bi-non-crossing.
    pub fn mobius_column(&self, sigma: &SetPartition) -> Result<Vec<(SetPartition, i64)>> {
        self.require_bnc(sigma)?;
        check_cap(self.n(), DEFAULT_BNC_CAP)?;
        let s = self.to_nc(sigma);
        let col = mobius_below(&s);
        let mut out: Vec<(SetPartition, i64)> = col.iter().map(|(t, m)| (self.from_nc(t), *m)).collect();
        out.sort();
        Ok(out)
    }
}

/// mu(s, 1_k) for every s in NC(k), computed by the downward recursion
/// mu(s, 1) = -sum_{s < u <= 1} mu(u, 1) and cached per k.
fn top_column(k: usize) -> Arc<HashMap<Vec<usize>, i64>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<HashMap<Vec<usize>, i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap().get(&k) {
        return c.clone();
    }
    let mut parts: Vec<SetPartition> = enumerate_nc(k).as_ref().clone();
    parts.sort_by_key(|p| p.num_blocks());
    // block masks for a fast refinement test
    let masks: Vec<Vec<u64>> = parts
        .iter()
        .map(|p| {
            let mut m = vec![0u64; p.num_blocks()];
            for (i, &b) in p.rgs.iter().enumerate() {
                m[b] |= 1 << i;
            }
            m
        })
        .collect();
    let refines = |s: usize, u: usize| -> bool {
        masks[s].iter().all(|&m| {
            let e = m.trailing_zeros() as usize;
            m & !masks[u][parts[u].rgs[e]] == 0
        })
    };
    let mut vals = vec![0i64; parts.len()];
    for s in 0..parts.len() {
        if parts[s].num_blocks() <= 1 {
            vals[s] = 1;
            continue;
        }
        let nb = parts[s].num_blocks();
        let mut acc = 0i64;
        for u in 0..s {
            if parts[u].num_blocks() < nb && refines(s, u) {
                acc += vals[u];
            }
        }
        vals[s] = -acc;
    }
    let map: HashMap<Vec<usize>, i64> = parts.into_iter().map(|p| p.rgs).zip(vals).collect();
    let arc = Arc::new(map);
    cache.lock().unwrap().insert(k, arc.clone());
    arc
}

/// Moebius function of NC(n); zero unless a <= b. The interval [a, b] splits
/// over the blocks of b, each factor an upper interval of a smaller NC lattice.
pub fn mobius_nc(a: &SetPartition, b: &SetPartition) -> i64 {
    if !a.refines(b) {
        return 0;
    }
    let mut prod = 1i64;
    for block in b.blocks() {
        let sub = a.restrict(&block);
        prod *= top_column(block.len())[&sub.rgs];
        if prod == 0 {
            break;
        }
    }
    prod
}

/// mu(t, b) for every non-crossing t <= b.
fn mobius_below(b: &SetPartition) -> Vec<(SetPartition, i64)> {
    enumerate_nc(b.n()).iter().filter(|t| t.refines(b)).map(|t| (t.clone(), mobius_nc(t, b))).collect()
}

/// Colouring data for moments of a two-faced family with Boolean slots.
#[derive(Clone, Debug)]
pub struct FfbContext {
    chi_hat: ChiMap,
    chi: ChiMap,
    /// `f[i]` is the expanded position of slot i (0-based).
    f: Vec<usize>,
    bottom: SetPartition,
    ctx: BncContext,
}

impl FfbContext {
    pub fn chi_hat(&self) -> &ChiMap {
        &self.chi_hat
    }

    pub fn chi(&self) -> &ChiMap {
        &self.chi
    }

    pub fn f(&self) -> &[usize] {
        &self.f
    }

    /// The partition pairing every Boolean slot's two expanded positions.
    pub fn bottom(&self) -> &SetPartition {
        &self.bottom
    }

    pub fn bnc(&self) -> &BncContext {
        &self.ctx
    }

    /// Expanded positions holding the left half of a Boolean slot.
    pub fn bool_positions(&self) -> Vec<usize> {
        self.chi_hat.0.iter().enumerate().filter(|(_, s)| **s == Side::Bool).map(|(i, _)| self.f[i]).collect()
    }

    /// Expands a per-slot colour map to the expanded positions.
    pub fn expand_eps(&self, eps_hat: &EpsilonMap) -> Result<EpsilonMap> {
        if eps_hat.len() != self.chi_hat.len() {
            return Err(Error::SizeMismatch { expected: self.chi_hat.len(), found: eps_hat.len() });
        }
        let mut out = Vec::with_capacity(self.chi.len());
        for (s, c) in self.chi_hat.0.iter().zip(&eps_hat.0) {
            out.push(*c);
            if *s == Side::Bool {
                out.push(*c);
            }
        }
        Ok(EpsilonMap(out))
    }

    pub fn contains(&self, p: &SetPartition) -> Result<bool> {
        if !self.ctx.is_bnc(p)? {
            return Ok(false);
        }
        Ok(self.bool_positions().iter().all(|&j| p.same_block(j, j + 1)))
    }

    /// BNC(chi) restricted to partitions joining each Boolean pair.
    pub fn enumerate(&self) -> Result<Vec<SetPartition>> {
        let pos = self.bool_positions();
        Ok(self.ctx.enumerate()?.into_iter().filter(|p| pos.iter().all(|&j| p.same_block(j, j + 1))).collect())
    }
}

/// Replaces each `b` by the pair `l r` and records the expansion map.
pub fn lr_replacement(chi_hat: &ChiMap) -> Result<FfbContext> {
    let mut chi = Vec::new();
    let mut f = Vec::new();
    let mut labels = Vec::new();
    for (i, s) in chi_hat.0.iter().enumerate() {
        f.push(chi.len());
        match s {
            Side::Bool => {
                chi.push(Side::Left);
                chi.push(Side::Right);
                labels.push(i);
                labels.push(i);
            }
            other => {
                chi.push(*other);
                labels.push(i);
            }
        }
    }
    let chi = ChiMap(chi);
    let ctx = BncContext::new(chi.clone())?;
    Ok(FfbContext { chi_hat: chi_hat.clone(), chi, f, bottom: SetPartition::from_labels(&labels), ctx })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi(s: &str) -> ChiMap {
        s.parse().unwrap()
    }

    #[test]
    fn s_chi_order() {
        let c = BncContext::new(chi("lrlr")).unwrap();
        assert_eq!(c.s_chi(), &[0, 2, 3, 1]);
    }

    #[test]
    fn parse_forms_agree() {
        let a = SetPartition::parse("{1,2,5,6},{3,4}").unwrap();
        let b = SetPartition::parse("0,0,1,1,0,0").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_block_string(), "{1,2,5,6},{3,4}");
        assert!(SetPartition::parse("{1,3}").is_err());
        assert!(SetPartition::parse("0,2").is_err());
        assert!(SetPartition::parse("{1},{1}").is_err());
    }

    #[test]
    fn nc_counts_are_catalan() {
        let cat = [1usize, 1, 2, 5, 14, 42, 132, 429];
        for (n, c) in cat.iter().enumerate() {
            assert_eq!(enumerate_nc(n).len(), *c);
        }
    }

    #[test]
    fn crossing_pair_is_bnc_only_when_sides_allow() {
        let p = SetPartition::parse("{1,3},{2,4}").unwrap();
        assert!(!BncContext::new(chi("llll")).unwrap().is_bnc(&p).unwrap());
        assert!(BncContext::new(chi("llrr")).unwrap().is_bnc(&p).unwrap());
    }

    #[test]
    fn replacement_map() {
        let f = lr_replacement(&chi("lbr")).unwrap();
        assert_eq!(f.chi().to_string(), "llrr");
        assert_eq!(f.f(), &[0, 1, 3]);
        assert_eq!(f.bottom().to_block_string(), "{1},{2,3},{4}");
    }

    #[test]
    fn b_in_two_sided_context_is_alphabet_error() {
        assert!(matches!(BncContext::new(chi("lb")), Err(Error::Alphabet(_))));
        assert!(matches!("lx".parse::<ChiMap>(), Err(Error::Alphabet(_))));
    }
}
