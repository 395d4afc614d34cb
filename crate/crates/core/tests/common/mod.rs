//! Brute-force oracles. Nothing here calls into the engine's enumeration,
//! lattice or Möbius code.
#![allow(dead_code)]

use std::collections::HashMap;

/// Every set partition of n points as a restricted growth string.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let top = if prefix.is_empty() { 0 } else { max + 1 };
        for b in 0..=top {
            prefix.push(b);
            go(prefix, max.max(b), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), 0, n, &mut out);
    out
}

/// Left positions top to bottom, then right positions bottom to top.
pub fn two_sided_order(chi: &str) -> Vec<usize> {
    let c: Vec<char> = chi.chars().collect();
    let mut order: Vec<usize> = (0..c.len()).filter(|&i| c[i] == 'l').collect();
    order.extend((0..c.len()).rev().filter(|&i| c[i] == 'r'));
    order
}

pub fn crosses_in_order(labels: &[usize], order: &[usize]) -> bool {
    let l: Vec<usize> = order.iter().map(|&i| labels[i]).collect();
    let n = l.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    if l[a] == l[c] && l[b] == l[d] && l[a] != l[b] {
                        return true;
                    }
                }
            }
        }
    }
    false
}

pub fn bnc_filter(chi: &str) -> Vec<Vec<usize>> {
    let order = two_sided_order(chi);
    set_partitions(chi.len()).into_iter().filter(|p| !crosses_in_order(p, &order)).collect()
}

pub fn catalan(n: usize) -> usize {
    let mut c = 1usize;
    for k in 0..n {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    c
}

pub fn refines(a: &[usize], b: &[usize]) -> bool {
    (0..a.len()).all(|i| (0..a.len()).all(|j| a[i] != a[j] || b[i] == b[j]))
}

pub fn leq_matrix(elems: &[Vec<usize>]) -> Vec<Vec<bool>> {
    elems.iter().map(|a| elems.iter().map(|b| refines(a, b)).collect()).collect()
}

/// μ by the recursion μ(x,x) = 1, μ(x,y) = -Σ_{x ≤ z < y} μ(x,z).
pub fn mobius_table(elems: &[Vec<usize>]) -> HashMap<(usize, usize), i64> {
    let leq = leq_matrix(elems);
    // finer partitions have more blocks, so they come first
    let blocks = |p: &Vec<usize>| p.iter().max().map_or(0, |m| m + 1);
    let mut order: Vec<usize> = (0..elems.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(blocks(&elems[i])));
    let mut mu = HashMap::new();
    for &x in &order {
        for &y in &order {
            if !leq[x][y] {
                continue;
            }
            let v = if x == y {
                1
            } else {
                -order.iter().filter(|&&z| z != y && leq[x][z] && leq[z][y]).map(|&z| mu[&(x, z)]).sum::<i64>()
            };
            mu.insert((x, y), v);
        }
    }
    mu
}

/// Expanded word and the partition pairing each b with its successor.
pub fn expand(chi_hat: &str) -> (String, Vec<usize>) {
    let mut chi = String::new();
    let mut labels = Vec::new();
    let mut next = 0;
    for c in chi_hat.chars() {
        if c == 'b' {
            chi.push_str("lr");
            labels.extend([next, next]);
        } else {
            chi.push(c);
            labels.push(next);
        }
        next += 1;
    }
    (chi, labels)
}

pub fn words(alphabet: &str, n: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for _ in 0..n {
        out = out.iter().flat_map(|w| alphabet.chars().map(move |c| format!("{w}{c}"))).collect();
    }
    out
}

pub fn normalize(labels: &[usize]) -> Vec<usize> {
    let mut map = HashMap::new();
    labels
        .iter()
        .map(|l| {
            let k = map.len();
            *map.entry(*l).or_insert(k)
        })
        .collect()
}

/// Simulates open strings of a reduced free product word: node i (bottom
/// to top) touches the left end of the tensor word if it is a left node and
/// the right end otherwise. A string of the same colour at that end must be
/// joined; otherwise the node closes at once or opens a new string there.
/// `open` marks blocks whose string is still open at the top.
pub fn lr_admissible(chi: &str, eps: &[u32], labels: &[usize], open: &[bool]) -> bool {
    use std::collections::VecDeque;
    let c: Vec<char> = chi.chars().collect();
    let n = c.len();
    let nb = labels.iter().max().map_or(0, |m| m + 1);
    let mut first = vec![usize::MAX; nb];
    let mut last = vec![0; nb];
    for i in 0..n {
        let b = labels[i];
        if first[b] == usize::MAX {
            first[b] = i;
        } else if eps[first[b]] != eps[i] {
            return false;
        }
        last[b] = i;
    }
    let mut dq: VecDeque<usize> = VecDeque::new();
    for i in (0..n).rev() {
        let b = labels[i];
        let left = c[i] == 'l';
        let end = if left { dq.front() } else { dq.back() }.copied();
        if last[b] == i {
            if let Some(e) = end {
                if eps[last[e]] == eps[i] {
                    return false;
                }
            }
            if first[b] == i && !open[b] {
                continue;
            }
            if left {
                dq.push_front(b)
            } else {
                dq.push_back(b)
            }
        } else {
            if end != Some(b) {
                return false;
            }
            if first[b] == i && !open[b] {
                if left {
                    dq.pop_front();
                } else {
                    dq.pop_back();
                }
            }
        }
    }
    true
}

/// (|LR|, partitions of LR_0) by brute force over partitions and open sets.
pub fn lr_oracle(chi: &str, eps: &[u32]) -> (usize, Vec<Vec<usize>>) {
    let mut total = 0;
    let mut zero = Vec::new();
    for p in set_partitions(chi.len()) {
        let nb = p.iter().max().map_or(0, |m| m + 1);
        for mask in 0..1u32 << nb {
            let open: Vec<bool> = (0..nb).map(|b| mask >> b & 1 == 1).collect();
            if lr_admissible(chi, eps, &p, &open) {
                total += 1;
                if mask == 0 {
                    zero.push(p.clone());
                }
            }
        }
    }
    (total, zero)
}
