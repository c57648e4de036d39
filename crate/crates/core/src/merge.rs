//! Merged distributions: `merge`, `⊥(Δ)`, `M(Δ)` and the `[P]` filter.

use std::collections::BTreeSet;

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::symbols::SymSet;

/// Default bound on `|Δ|` for enumerating every merge (Bell(9) = 21147).
pub const DEFAULT_MERGE_CAP: usize = 9;

/// A partition of the part positions `0..n` of a distribution.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexPartition {
    blocks: Vec<Vec<usize>>,
}

impl IndexPartition {
    /// Validates `blocks` as a proper partition of `0..n`: blocks are
    /// non-empty and disjoint, cover every index, and at least one block
    /// has two or more elements while not all indices share one block.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut blocks: Vec<Vec<usize>> = blocks;
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::ImproperPartition("empty block".into()));
            }
            b.sort_unstable();
            for &i in b.iter() {
                if i >= n {
                    return Err(Error::ImproperPartition(format!("index {i} out of range")));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::ImproperPartition(format!("index {i} repeated")));
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::ImproperPartition(format!("index {i} missing")));
        }
        if blocks.len() == n {
            return Err(Error::ImproperPartition("discrete partition".into()));
        }
        if blocks.len() < 2 {
            return Err(Error::ImproperPartition("single block".into()));
        }
        blocks.sort();
        Ok(IndexPartition { blocks })
    }

    /// Builds from a restricted growth string without re-validating.
    fn from_rgs(rgs: &[usize], k: usize) -> Self {
        let mut blocks = vec![Vec::new(); k];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        IndexPartition { blocks }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }
}

/// Unions the parts of `d` block by block and keeps the maximal results.
pub fn merge(d: &Distribution, p: &IndexPartition) -> Result<Distribution> {
    let n = d.size();
    let flat: usize = p.blocks.iter().map(Vec::len).sum();
    if flat != n || p.blocks.iter().flatten().any(|&i| i >= n) {
        return Err(Error::ImproperPartition(format!(
            "partition does not match a distribution of size {n}"
        )));
    }
    if p.blocks.len() < 2 || p.blocks.len() == n {
        return Err(Error::ImproperPartition("partition is not proper".into()));
    }
    let merged = merge_unchecked(d, p.blocks.iter().map(|b| b.as_slice()));
    if merged.is_trivial() {
        return Err(Error::TrivialResult);
    }
    Ok(merged)
}

fn merge_unchecked<'a, I>(d: &Distribution, blocks: I) -> Distribution
where
    I: IntoIterator<Item = &'a [usize]>,
{
    let unions = blocks
        .into_iter()
        .map(|b| b.iter().fold(SymSet::EMPTY, |acc, &i| acc.union(d.part(i))));
    Distribution::from_maximal(d.alphabet().clone(), unions)
}

/// `⊥(Δ)`: every non-trivial result of merging exactly two parts, sorted.
pub fn minimal_merges(d: &Distribution) -> Vec<Distribution> {
    let n = d.size();
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            let pair = d.part(i).union(d.part(j));
            let rest = (0..n).filter(|&k| k != i && k != j).map(|k| d.part(k));
            let m = Distribution::from_maximal(d.alphabet().clone(), rest.chain([pair]));
            if !m.is_trivial() {
                out.insert(m);
            }
        }
    }
    out.into_iter().collect()
}

/// Minimal merges together with the pair of positions producing each one.
/// A merge reachable from several pairs is listed once, with its first pair.
pub fn minimal_merges_labelled(d: &Distribution) -> Vec<((usize, usize), Distribution)> {
    let n = d.size();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let pair = d.part(i).union(d.part(j));
            let rest = (0..n).filter(|&k| k != i && k != j).map(|k| d.part(k));
            let m = Distribution::from_maximal(d.alphabet().clone(), rest.chain([pair]));
            if !m.is_trivial() && seen.insert(m.clone()) {
                out.push(((i, j), m));
            }
        }
    }
    out
}

/// `M(Δ)`: every non-trivial merge over all proper partitions, sorted.
pub fn all_merges(d: &Distribution, cap: usize) -> Result<Vec<Distribution>> {
    let n = d.size();
    if n > cap {
        return Err(Error::SizeCapExceeded { size: n, cap });
    }
    let mut out = BTreeSet::new();
    for_each_set_partition(n, |rgs, k| {
        if k >= 2 && k < n {
            let p = IndexPartition::from_rgs(rgs, k);
            let m = merge_unchecked(d, p.blocks.iter().map(|b| b.as_slice()));
            if !m.is_trivial() {
                out.insert(m);
            }
        }
    });
    Ok(out.into_iter().collect())
}

/// Calls `f(rgs, blocks)` for every set partition of `0..n`, given as a
/// restricted growth string, in lexicographic order of the string.
pub fn for_each_set_partition<F: FnMut(&[usize], usize)>(n: usize, mut f: F) {
    if n == 0 {
        f(&[], 0);
        return;
    }
    let mut rgs = vec![0usize; n];
    fn rec<F: FnMut(&[usize], usize)>(rgs: &mut Vec<usize>, i: usize, k: usize, f: &mut F) {
        if i == rgs.len() {
            f(rgs, k);
            return;
        }
        for b in 0..=k {
            rgs[i] = b;
            rec(rgs, i + 1, k.max(b + 1), f);
        }
    }
    rec(&mut rgs, 1, 1, &mut f);
}

/// `[P]`: the `≤`-minimal elements, sorted and deduplicated.
pub fn keep_minimal<I: IntoIterator<Item = Distribution>>(ps: I) -> Vec<Distribution> {
    let all: BTreeSet<Distribution> = ps.into_iter().collect();
    let all: Vec<Distribution> = all.into_iter().collect();
    all.iter()
        .filter(|d| !all.iter().any(|e| e != *d && e.leq(d)))
        .cloned()
        .collect()
}

/// A proper partition of `d`'s positions whose merge is `target`, if any.
/// This decides `target ∈ M(d)` without enumerating `M(d)`.
pub fn merge_partition(d: &Distribution, target: &Distribution) -> Option<IndexPartition> {
    if !d.same_alphabet(target) || target.is_trivial() || target == d || !d.leq(target) {
        return None;
    }
    let n = d.size();
    // Each target part must be the exact union of a disjoint group of
    // source parts; leftover source parts stay as singleton blocks.
    let inside: Vec<Vec<usize>> = target
        .parts()
        .iter()
        .map(|&y| (0..n).filter(|&i| d.part(i).is_subset(y)).collect())
        .collect();
    let mut used = vec![false; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    if !assign(d, target, &inside, 0, &mut used, &mut groups) {
        return None;
    }
    let mut blocks = groups;
    for (i, u) in used.iter().enumerate() {
        if !u {
            blocks.push(vec![i]);
        }
    }
    IndexPartition::new(n, blocks).ok()
}

fn assign(
    d: &Distribution,
    target: &Distribution,
    inside: &[Vec<usize>],
    y: usize,
    used: &mut Vec<bool>,
    groups: &mut Vec<Vec<usize>>,
) -> bool {
    if y == target.size() {
        return true;
    }
    let goal = target.part(y);
    let avail: Vec<usize> = inside[y].iter().copied().filter(|&i| !used[i]).collect();
    let mut chosen = Vec::new();
    pick(d, goal, &avail, 0, SymSet::EMPTY, &mut chosen, &mut |chosen| {
        for &i in chosen {
            used[i] = true;
        }
        groups.push(chosen.to_vec());
        if assign(d, target, inside, y + 1, used, groups) {
            return true;
        }
        groups.pop();
        for &i in chosen {
            used[i] = false;
        }
        false
    })
}

/// Enumerates subsets of `avail` whose union is `goal`; stops at the first
/// subset accepted by `k`.
fn pick(
    d: &Distribution,
    goal: SymSet,
    avail: &[usize],
    at: usize,
    acc: SymSet,
    chosen: &mut Vec<usize>,
    k: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if acc == goal {
        return k(chosen);
    }
    let remaining = avail[at..]
        .iter()
        .fold(acc, |a, &i| a.union(d.part(i)));
    if remaining != goal {
        return false;
    }
    for idx in at..avail.len() {
        let i = avail[idx];
        if d.part(i).is_subset(acc) {
            continue;
        }
        chosen.push(i);
        if pick(d, goal, avail, idx + 1, acc.union(d.part(i)), chosen, k) {
            return true;
        }
        chosen.pop();
    }
    false
}

pub fn is_merge_of(d: &Distribution, target: &Distribution) -> bool {
    merge_partition(d, target).is_some()
}
