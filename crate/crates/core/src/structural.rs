//! Dependence-graph rules that certify decomposability of the candidate
//! counter-example without building any language.
//!
//! For a source `Δ = (Σ_1, …, Σ_n)` every symbol `σ` gets the index set
//! `N(σ)` of parts not containing it. A class `j` of the counter-example
//! gives every symbol outside `Σ_j` a distinctive exponent, so a path of
//! such symbols in a dependence graph propagates the choice of `j`. The
//! rules below collect which `j` reach each symbol.

use std::collections::HashMap;
use std::fmt;

use crate::distribution::Distribution;
use crate::symbols::{Alphabet, SymSet, Symbol};

/// A set of part positions `0..n` of the source distribution.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Default)]
pub struct IndexSet(u64);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn full(n: usize) -> Self {
        IndexSet(SymSet::prefix(n).bits())
    }

    pub fn from_positions<I: IntoIterator<Item = usize>>(it: I) -> Self {
        IndexSet(it.into_iter().fold(0, |m, i| m | 1 << i))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn union(self, o: IndexSet) -> IndexSet {
        IndexSet(self.0 | o.0)
    }

    pub fn intersection(self, o: IndexSet) -> IndexSet {
        IndexSet(self.0 & o.0)
    }

    pub fn is_subset(self, o: IndexSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn positions(self) -> Vec<usize> {
        SymSet::from_bits(self.0).iter().map(usize::from).collect()
    }

    /// Positions counted from 1, as in rendered output.
    pub fn labels(self) -> Vec<usize> {
        self.positions().into_iter().map(|i| i + 1).collect()
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.labels()).finish()
    }
}

/// `N(σ)`: for each symbol, the positions of source parts missing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistinctiveIndexMap {
    n: usize,
    sets: Vec<IndexSet>,
}

impl DistinctiveIndexMap {
    pub fn new(d: &Distribution) -> Self {
        let n = d.size();
        let full = IndexSet::full(n);
        let sets = d
            .alphabet()
            .symbols()
            .map(|s| IndexSet(full.0 & !d.parts_containing(s)))
            .collect();
        DistinctiveIndexMap { n, sets }
    }

    pub fn get(&self, s: Symbol) -> IndexSet {
        self.sets[s as usize]
    }

    pub fn source_size(&self) -> usize {
        self.n
    }

    pub fn full(&self) -> IndexSet {
        IndexSet::full(self.n)
    }

    /// Union of `N` over `set`.
    pub fn union_over(&self, set: SymSet) -> IndexSet {
        set.iter().fold(IndexSet::EMPTY, |a, s| a.union(self.get(s)))
    }
}

/// The graph `(Σ, D)` of a distribution, self-loops dropped.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DependenceGraph {
    adj: Vec<SymSet>,
}

impl DependenceGraph {
    pub fn new(d: &Distribution) -> Self {
        let dep = d.dependence();
        DependenceGraph {
            adj: d.alphabet().symbols().map(|s| dep.neighbors(s)).collect(),
        }
    }

    /// Independence graph of `d`, for display.
    pub fn independence(d: &Distribution) -> Self {
        let ind = d.independence();
        DependenceGraph {
            adj: d.alphabet().symbols().map(|s| ind.neighbors(s)).collect(),
        }
    }

    pub fn neighbors(&self, s: Symbol) -> SymSet {
        self.adj[s as usize]
    }

    /// `B(Σ')`: members of `s` adjacent to a symbol outside `s`.
    pub fn boundary_symbols(&self, s: SymSet) -> SymSet {
        s.iter()
            .filter(|&x| !self.neighbors(x).difference(s).is_empty())
            .collect()
    }

    /// `Cr^R(start, target)`: union, over simple paths from `start` to
    /// `target` that avoid `s` after the first vertex, of the intersection
    /// of `N` along every vertex but the last.
    pub fn cr_from(&self, nmap: &DistinctiveIndexMap, s: SymSet, start: Symbol, target: Symbol) -> IndexSet {
        let mut acc = IndexSet::EMPTY;
        let full = nmap.full();
        let first = nmap.get(start);
        if first.is_empty() {
            return acc;
        }
        let mut visited = s;
        visited.insert(start);
        self.cr_dfs(nmap, start, target, first, visited, &mut acc, full);
        acc
    }

    #[allow(clippy::too_many_arguments)]
    fn cr_dfs(
        &self,
        nmap: &DistinctiveIndexMap,
        v: Symbol,
        target: Symbol,
        running: IndexSet,
        visited: SymSet,
        acc: &mut IndexSet,
        full: IndexSet,
    ) {
        for u in self.neighbors(v).difference(visited) {
            if u == target {
                *acc = acc.union(running);
            } else {
                let next = running.intersection(nmap.get(u));
                // Longer paths only shrink the intersection.
                if next.is_empty() || next.is_subset(*acc) {
                    continue;
                }
                let mut vis = visited;
                vis.insert(u);
                self.cr_dfs(nmap, u, target, next, vis, acc, full);
            }
            if *acc == full {
                return;
            }
        }
    }

    /// `Cr(Σ', σ')` computed through the boundary symbols of `s`.
    pub fn cr_value(&self, nmap: &DistinctiveIndexMap, s: SymSet, target: Symbol) -> IndexSet {
        debug_assert!(!s.contains(target));
        let full = nmap.full();
        let mut acc = IndexSet::EMPTY;
        for b in self.boundary_symbols(s) {
            acc = acc.union(self.cr_from(nmap, s, b, target));
            if acc == full {
                break;
            }
        }
        acc
    }

    /// Graphviz rendering, optionally labelling vertices with `N(σ)`.
    pub fn to_dot(&self, alphabet: &Alphabet, name: &str, nmap: Option<&DistinctiveIndexMap>) -> String {
        let mut out = format!("graph {name} {{\n");
        for s in alphabet.symbols() {
            let label = match nmap {
                Some(m) => format!("{} {:?}", alphabet.name(s), m.get(s)),
                None => alphabet.name(s).to_string(),
            };
            out.push_str(&format!("  \"{}\" [label=\"{}\"];\n", alphabet.name(s), label));
        }
        for s in alphabet.symbols() {
            for t in self.neighbors(s) {
                if t > s {
                    out.push_str(&format!("  \"{}\" -- \"{}\";\n", alphabet.name(s), alphabet.name(t)));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Which rule certified decomposability of the counter-example.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CertRule {
    /// Every outside symbol reached from one new part, paths in the
    /// merged distribution's graph.
    PathCover,
    /// Same, with paths restricted to the source's graph.
    SourcePathCover,
    /// The determined-extent fixpoint of one new part reaches `Σ`.
    Extent,
    /// Decided by the exact exponent-vector oracle.
    Oracle,
}

impl CertRule {
    pub fn label(self) -> &'static str {
        match self {
            CertRule::PathCover => "path-cover",
            CertRule::SourcePathCover => "source-path-cover",
            CertRule::Extent => "extent",
            CertRule::Oracle => "oracle",
        }
    }
}

/// Structural reasoning about one source distribution, with `Cr` memoised
/// per graph. Not meant to be shared between threads; make one per worker.
pub struct Analyzer {
    source: Distribution,
    nmap: DistinctiveIndexMap,
    source_graph: DependenceGraph,
    memo: HashMap<DependenceGraph, HashMap<(SymSet, Symbol), IndexSet>>,
}

impl Analyzer {
    pub fn new(source: &Distribution) -> Self {
        Analyzer {
            nmap: DistinctiveIndexMap::new(source),
            source_graph: DependenceGraph::new(source),
            source: source.clone(),
            memo: HashMap::new(),
        }
    }

    pub fn source(&self) -> &Distribution {
        &self.source
    }

    pub fn nmap(&self) -> &DistinctiveIndexMap {
        &self.nmap
    }

    pub fn source_graph(&self) -> &DependenceGraph {
        &self.source_graph
    }

    pub fn cr(&mut self, graph: &DependenceGraph, s: SymSet, target: Symbol) -> IndexSet {
        if let Some(v) = self.memo.get(graph).and_then(|m| m.get(&(s, target))) {
            return *v;
        }
        let v = graph.cr_value(&self.nmap, s, target);
        self.memo
            .entry(graph.clone())
            .or_default()
            .insert((s, target), v);
        v
    }

    fn covers_all(&mut self, graph: &DependenceGraph, s: SymSet) -> bool {
        let full = self.nmap.full();
        let outside = self.source.alphabet().full().difference(s);
        outside.iter().all(|t| self.cr(graph, s, t) == full)
    }

    fn new_parts<'a>(&self, dprime: &'a Distribution) -> impl Iterator<Item = SymSet> + 'a {
        let source = self.source.clone();
        dprime
            .parts()
            .iter()
            .copied()
            .filter(move |&p| !source.contains_part(p))
    }

    /// A part of `dprime` not in the source whose `Cr`, computed in the
    /// graph of `dprime`, is every source position for each outside symbol.
    pub fn path_cover(&mut self, dprime: &Distribution) -> Option<SymSet> {
        let graph = DependenceGraph::new(dprime);
        let parts: Vec<SymSet> = self.new_parts(dprime).collect();
        parts.into_iter().find(|&p| self.covers_all(&graph, p))
    }

    /// As [`Analyzer::path_cover`] with paths in the source's graph.
    pub fn source_path_cover(&mut self, dprime: &Distribution) -> Option<SymSet> {
        let graph = self.source_graph.clone();
        let parts: Vec<SymSet> = self.new_parts(dprime).collect();
        parts.into_iter().find(|&p| self.covers_all(&graph, p))
    }

    /// `E(Σ')` with paths in `graph` and co-occurrence in `cover`.
    ///
    /// Alternates two steps until neither adds a symbol: symbols whose `Cr`
    /// from the determined set is full, and symbols sharing a part of
    /// `cover` with two or more determined symbols that occur together in
    /// exactly one source part.
    fn extent_in(&mut self, graph: &DependenceGraph, cover: &Distribution, seed: SymSet) -> SymSet {
        let all = self.source.alphabet().full();
        let full = self.nmap.full();
        let mut det = seed;
        loop {
            let mut grew = false;
            let added: SymSet = all
                .difference(det)
                .iter()
                .filter(|&t| self.cr(graph, det, t) == full)
                .collect();
            if !added.is_empty() {
                det = det.union(added);
                grew = true;
            }
            if det == all {
                return all;
            }
            let matched = self.matched_symbols(cover, det);
            if !matched.is_empty() {
                det = det.union(matched);
                grew = true;
            }
            if !grew || det == all {
                return det;
            }
        }
    }

    /// Symbols outside `det` fixed by matching a jointly unique group of
    /// determined symbols through a part of `cover`.
    ///
    /// A group works exactly when it lies in one source part only. For a
    /// cover part `y` and source part `Σ_i`, the largest candidate group is
    /// `T = Σ_i ∩ det ∩ y`; any working group inside them is contained in
    /// `T`, and `T` works whenever such a group does.
    fn matched_symbols(&self, cover: &Distribution, det: SymSet) -> SymSet {
        let mut out = SymSet::EMPTY;
        for &y in cover.parts() {
            let fresh = y.difference(det);
            if fresh.is_empty() || fresh.is_subset(out) {
                continue;
            }
            for &si in self.source.parts() {
                let t = si.intersection(det).intersection(y);
                if t.len() >= 2 && self.source.parts().iter().filter(|p| t.is_subset(**p)).count() == 1 {
                    out = out.union(fresh);
                    break;
                }
            }
        }
        out
    }

    /// `E_{Δ'}(seed)`.
    pub fn extent(&mut self, dprime: &Distribution, seed: SymSet) -> SymSet {
        let graph = DependenceGraph::new(dprime);
        self.extent_in(&graph, dprime, seed)
    }

    /// `E_Δ(seed)`, the variant using only the source.
    pub fn source_extent(&mut self, seed: SymSet) -> SymSet {
        let graph = self.source_graph.clone();
        let cover = self.source.clone();
        self.extent_in(&graph, &cover, seed)
    }

    /// A part of `dprime` not in the source whose extent is all of `Σ`.
    pub fn extent_cover(&mut self, dprime: &Distribution) -> Option<SymSet> {
        let all = self.source.alphabet().full();
        let graph = DependenceGraph::new(dprime);
        let parts: Vec<SymSet> = self.new_parts(dprime).collect();
        parts
            .into_iter()
            .find(|&p| self.extent_in(&graph, dprime, p) == all)
    }

    /// As [`Analyzer::extent_cover`] with the source-only extent.
    pub fn source_extent_cover(&mut self, dprime: &Distribution) -> Option<SymSet> {
        let all = self.source.alphabet().full();
        let parts: Vec<SymSet> = self.new_parts(dprime).collect();
        parts.into_iter().find(|&p| self.source_extent(p) == all)
    }

    /// Strongest structural certificate for `dprime`, trying the cheap
    /// path rule before the extent fixpoint.
    pub fn certify(&mut self, dprime: &Distribution) -> Option<(CertRule, SymSet)> {
        if let Some(p) = self.path_cover(dprime) {
            return Some((CertRule::PathCover, p));
        }
        self.extent_cover(dprime).map(|p| (CertRule::Extent, p))
    }

    /// True when the source has no reduction by the structural criterion:
    /// every union of two parts that is not all of `Σ` has full source
    /// extent. Vacuously true when every such union is `Σ`.
    pub fn no_reduction_check(&mut self) -> bool {
        let all = self.source.alphabet().full();
        let parts = self.source.parts().to_vec();
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                let u = parts[i].union(parts[j]);
                if u != all && self.source_extent(u) != all {
                    return false;
                }
            }
        }
        true
    }
}

pub fn boundary_symbols(g: &DependenceGraph, s: SymSet) -> SymSet {
    g.boundary_symbols(s)
}

/// Path-cover certificate with paths in `dprime`'s own graph.
pub fn path_cover_certifies(dprime: &Distribution, d: &Distribution) -> bool {
    Analyzer::new(d).path_cover(dprime).is_some()
}

/// Path-cover certificate with paths in `d`'s graph.
pub fn source_path_cover_certifies(dprime: &Distribution, d: &Distribution) -> bool {
    Analyzer::new(d).source_path_cover(dprime).is_some()
}

pub fn determined_extent(dprime: &Distribution, d: &Distribution, seed: SymSet) -> SymSet {
    Analyzer::new(d).extent(dprime, seed)
}

/// Extent certificate with `dprime`'s graph and parts.
pub fn extent_certifies(dprime: &Distribution, d: &Distribution) -> bool {
    Analyzer::new(d).extent_cover(dprime).is_some()
}

pub fn no_reduction_check(d: &Distribution) -> bool {
    Analyzer::new(d).no_reduction_check()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn d(sigma: &Arc<Alphabet>, s: &str) -> Distribution {
        Distribution::parse(sigma.clone(), s).unwrap()
    }

    #[test]
    fn boundary_of_merged_ring() {
        let sigma = Alphabet::from_chars("abcde").unwrap();
        let d1 = d(&sigma, "abc|cd|de|ea");
        let g = DependenceGraph::new(&d1);
        let abc = sigma.parse_set("abc").unwrap();
        assert_eq!(g.boundary_symbols(abc), sigma.parse_set("ac").unwrap());
        assert!(g.boundary_symbols(sigma.full()).is_empty());
    }

    #[test]
    fn path_cover_fails_where_extent_succeeds() {
        let sigma = Alphabet::from_chars("abcdefg").unwrap();
        let src = d(&sigma, "abcg|cde|def|efg");
        let merged = d(&sigma, "abcg|cdef|efg");
        assert!(!path_cover_certifies(&merged, &src));
        assert!(extent_certifies(&merged, &src));
        assert_eq!(
            determined_extent(&merged, &src, sigma.parse_set("cdef").unwrap()),
            sigma.full()
        );
    }

    #[test]
    fn triangle_passes_vacuously() {
        let sigma = Alphabet::from_chars("abc").unwrap();
        assert!(no_reduction_check(&d(&sigma, "ab|bc|ca")));
    }
}
