//! Search for reductions.
//!
//! The incremental search collects merges until every independent pair of
//! the source is independent in some member, breaks up sub-alphabets that
//! keep the meet above the source, and validates each meet-consistent
//! candidate with the verifier. Widths are explored in increasing order.
//! The recursive search starts from two-part merges only and then replaces
//! members by reductions of their own.

use std::collections::HashSet;

use serde::Serialize;

use crate::candidate::{CandidateReduction, Dimension};
use crate::distribution::{meet_all, Distribution, Relation};
use crate::error::Result;
use crate::merge::{all_merges, keep_minimal, minimal_merges, IndexPartition};
use crate::structural::IndexSet;
use crate::symbols::{SymSet, Symbol};
use crate::verifier::{exists_reduction, refute_reduction, verify_reduction, Outcome, Verdict, VerifyOptions};

pub const DEFAULT_MAX_NODES: usize = 200_000;
/// Saturation limit for candidates met during the search. Most of them are
/// not reductions, and a failing saturation runs to its limit.
pub const DEFAULT_VALIDATION_BUDGET: usize = 1_000;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct GenerateOptions {
    pub verify: VerifyOptions,
    /// Largest member size to consider. Defaults to one less than the
    /// source size.
    pub max_width: Option<usize>,
    /// Search nodes visited before giving up.
    pub max_nodes: usize,
    /// Keep searching after the first validated candidate.
    pub collect_all: bool,
    /// Stop once this many candidates validated (with `collect_all`).
    pub max_results: usize,
    /// Derived-distribution limit when validating search candidates, capped
    /// by the verifier's own budget.
    pub validation_budget: usize,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions {
            verify: VerifyOptions::default(),
            max_width: None,
            max_nodes: DEFAULT_MAX_NODES,
            collect_all: false,
            max_results: 64,
            validation_budget: DEFAULT_VALIDATION_BUDGET,
        }
    }
}

/// Progress record, emitted as one JSON object per line by the CLI.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Event {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub members: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Event {
    fn new(kind: &'static str) -> Self {
        Event {
            kind,
            width: None,
            members: Vec::new(),
            detail: None,
        }
    }

    fn with_members(mut self, ms: &[Distribution]) -> Self {
        self.members = ms.iter().map(Distribution::render).collect();
        self
    }
}

pub type EventSink<'a> = &'a mut dyn FnMut(&Event);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub candidate: CandidateReduction,
    pub dimension: Dimension,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenerateOutcome {
    /// Validated reductions in discovery order, widths non-decreasing.
    Found(Vec<Generated>),
    /// No reduction exists.
    NoReduction(Verdict),
    /// Nothing validated within the search space or node budget.
    Exhausted { candidates_tested: usize, nodes: usize, budget_hit: bool },
}

impl GenerateOutcome {
    pub fn first(&self) -> Option<&Generated> {
        match self {
            GenerateOutcome::Found(v) => v.first(),
            _ => None,
        }
    }
}

/// Merges in `pool` in which `a` and `b` are independent.
pub fn separating_merges<'a>(pool: &'a [Distribution], a: Symbol, b: Symbol) -> impl Iterator<Item = &'a Distribution> {
    pool.iter().filter(move |m| m.parts_containing(a) & m.parts_containing(b) == 0)
}

/// Merges in `pool` in which `sub` lies inside no part.
pub fn breaking_merges<'a>(pool: &'a [Distribution], sub: SymSet) -> impl Iterator<Item = &'a Distribution> {
    pool.iter().filter(move |m| !m.covers(sub))
}

/// The minimal sets of source positions whose parts jointly contain a
/// sub-alphabet. A merge keeps the sub-alphabet inside one part exactly
/// when some block of its partition includes one of these sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverConstraint {
    pub sub: SymSet,
    pub covers: Vec<IndexSet>,
}

impl CoverConstraint {
    pub fn new(source: &Distribution, sub: SymSet) -> Self {
        let mut found = Vec::new();
        cover_sets(source, sub, IndexSet::EMPTY, &mut found);
        let mut covers: Vec<IndexSet> = Vec::new();
        found.sort_by_key(|s: &IndexSet| s.len());
        for s in found {
            if !covers.iter().any(|c| c.is_subset(s)) {
                covers.push(s);
            }
        }
        covers.sort_by_key(|s| s.positions());
        CoverConstraint { sub, covers }
    }

    /// True when no block of `p` includes a cover, so the merge by `p`
    /// breaks the sub-alphabet.
    pub fn broken_by(&self, p: &IndexPartition) -> bool {
        p.blocks().iter().all(|b| {
            let block = IndexSet::from_positions(b.iter().copied());
            !self.covers.iter().any(|c| c.is_subset(block))
        })
    }
}

fn cover_sets(source: &Distribution, remaining: SymSet, chosen: IndexSet, out: &mut Vec<IndexSet>) {
    let Some(s) = remaining.iter().next() else {
        out.push(chosen);
        return;
    };
    for (i, &p) in source.parts().iter().enumerate() {
        if p.contains(s) {
            cover_sets(source, remaining.difference(p), chosen.union(IndexSet::from_positions([i])), out);
        }
    }
}

struct Bits(Vec<u64>);

impl Bits {
    fn zeros(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
}

struct Search<'a> {
    source: Distribution,
    opts: GenerateOptions,
    pool: Vec<Distribution>,
    edges: Vec<(Symbol, Symbol)>,
    /// For each pool member, which source edges it separates.
    separates: Vec<Bits>,
    seen_collected: HashSet<Vec<Distribution>>,
    seen_validated: HashSet<Vec<Distribution>>,
    nodes: usize,
    tested: usize,
    budget_hit: bool,
    height: usize,
    found: Vec<Generated>,
    sink: Option<EventSink<'a>>,
}

impl<'a> Search<'a> {
    fn new(source: &Distribution, mut pool: Vec<Distribution>, opts: GenerateOptions, sink: Option<EventSink<'a>>) -> Self {
        let indep = source.independence();
        // Smaller first; merges that keep the source's independence exactly
        // separate nothing new, so they go last within a size.
        pool.sort_by_cached_key(|m| (m.size(), m.independence() == indep, m.clone()));
        let mut edges = indep.edges();
        edges.sort_by_key(|&(x, y)| (std::cmp::Reverse(indep.degree(x) + indep.degree(y)), x, y));
        let separates = pool
            .iter()
            .map(|m| {
                let mut b = Bits::zeros(edges.len());
                for (i, &(x, y)) in edges.iter().enumerate() {
                    if m.parts_containing(x) & m.parts_containing(y) == 0 {
                        b.set(i);
                    }
                }
                b
            })
            .collect();
        Search {
            source: source.clone(),
            opts,
            pool,
            edges,
            separates,
            seen_collected: HashSet::new(),
            seen_validated: HashSet::new(),
            nodes: 0,
            tested: 0,
            budget_hit: false,
            height: usize::MAX,
            found: Vec::new(),
            sink,
        }
    }

    fn emit(&mut self, e: Event) {
        if let Some(s) = self.sink.as_mut() {
            s(&e);
        }
    }

    fn done(&self) -> bool {
        self.budget_hit || (!self.found.is_empty() && (!self.opts.collect_all || self.found.len() >= self.opts.max_results))
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.opts.max_nodes {
            self.budget_hit = true;
        }
        !self.done()
    }

    fn run(&mut self) -> Result<()> {
        let n = self.source.size();
        let top = self.opts.max_width.unwrap_or(n - 1).min(n - 1);
        let low = self.pool.iter().map(Distribution::size).min().unwrap_or(top);
        for w in low..=top {
            if self.done() {
                break;
            }
            let mut e = Event::new("width");
            e.width = Some(w);
            self.emit(e);
            // Member-count bounds deepen before the last, unbounded pass.
            for h in [2, 3, 4, usize::MAX] {
                if self.done() {
                    break;
                }
                self.height = h;
                self.seen_collected.clear();
                self.collect(w, &mut Vec::new())?;
            }
        }
        Ok(())
    }

    fn first_uncovered(&self, chosen: &[usize]) -> Option<usize> {
        (0..self.edges.len()).find(|&e| !chosen.iter().any(|&m| self.separates[m].get(e)))
    }

    /// Picks merges until every source independence pair is covered.
    fn collect(&mut self, w: usize, chosen: &mut Vec<usize>) -> Result<()> {
        if !self.tick() {
            return Ok(());
        }
        let Some(edge) = self.first_uncovered(chosen) else {
            let members = keep_minimal(chosen.iter().map(|&i| self.pool[i].clone()));
            if self.seen_collected.insert(members.clone()) {
                let mut e = Event::new("collected").with_members(&members);
                e.width = Some(w);
                self.emit(e);
                self.refine(w, members)?;
            }
            return Ok(());
        };
        if chosen.len() >= self.height {
            return Ok(());
        }
        for i in 0..self.pool.len() {
            if self.pool[i].size() > w || !self.separates[i].get(edge) || chosen.contains(&i) {
                continue;
            }
            chosen.push(i);
            self.collect(w, chosen)?;
            chosen.pop();
            if self.done() {
                break;
            }
        }
        Ok(())
    }

    /// Adds merges breaking troublesome sub-alphabets until the meet is the
    /// source, then validates.
    fn refine(&mut self, w: usize, members: Vec<Distribution>) -> Result<()> {
        if !self.tick() {
            return Ok(());
        }
        let meet = meet_all(&members).expect("non-empty");
        let trouble = meet.parts().iter().copied().find(|&p| !self.source.covers(p));
        let Some(sub) = trouble else {
            return self.validate(minimalise(&self.source, members));
        };
        if members.len() >= self.height {
            return Ok(());
        }
        let options: Vec<usize> = (0..self.pool.len())
            .filter(|&i| self.pool[i].size() <= w && !self.pool[i].covers(sub) && !members.contains(&self.pool[i]))
            .collect();
        for i in options {
            let next = keep_minimal(members.iter().cloned().chain([self.pool[i].clone()]));
            if !self.seen_collected.insert(next.clone()) {
                continue;
            }
            let mut e = Event::new("refined").with_members(&next);
            e.detail = Some(self.source.alphabet().render_set(sub));
            self.emit(e);
            self.refine(w, next)?;
            if self.done() {
                break;
            }
        }
        Ok(())
    }

    fn validate(&mut self, members: Vec<Distribution>) -> Result<()> {
        if members.len() < 2 || !self.seen_validated.insert(members.clone()) {
            return Ok(());
        }
        debug_assert!(meet_all(&members).as_ref() == Some(&self.source));
        self.tested += 1;
        let mut vo = self.opts.verify;
        vo.budget.max_derived = vo.budget.max_derived.min(self.opts.validation_budget);
        let v = verify_reduction(&self.source, &members, &vo)?;
        let mut e = Event::new("validated").with_members(&members);
        e.detail = Some(match v.mechanism {
            Some(m) => format!("{} ({})", v.outcome, m.label()),
            None => v.outcome.to_string(),
        });
        self.emit(e);
        if v.outcome == Outcome::ValidReduction {
            let candidate = CandidateReduction::from_sorted_unchecked(self.source.clone(), members);
            let dimension = candidate.dimension()?;
            self.found.push(Generated {
                candidate,
                dimension,
                verdict: v,
            });
        }
        Ok(())
    }
}

/// Drops members, in canonical order, whose removal keeps the meet equal to
/// the source.
fn minimalise(source: &Distribution, mut members: Vec<Distribution>) -> Vec<Distribution> {
    let mut i = 0;
    while i < members.len() {
        if members.len() > 2 {
            let rest: Vec<&Distribution> = members.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, m)| m).collect();
            if meet_all(rest).as_ref() == Some(source) {
                members.remove(i);
                continue;
            }
        }
        i += 1;
    }
    members
}

/// Shared opening: decides the sources with no or one minimal merge and
/// refutes `[⊥(Δ)]` when possible.
fn preflight(source: &Distribution, opts: &GenerateOptions, sink: &mut Option<EventSink<'_>>) -> Result<Option<Verdict>> {
    let bottom = keep_minimal(minimal_merges(source));
    let verdict = if bottom.len() < 2 {
        Some(exists_reduction(source, &opts.verify)?)
    } else {
        refute_reduction(source, &bottom)?
    };
    if let (Some(v), Some(s)) = (&verdict, sink.as_mut()) {
        let mut e = Event::new("refuted");
        e.detail = v.mechanism.map(|m| m.label().to_string());
        s(&e);
    }
    Ok(verdict)
}

fn bottom_fallback(source: &Distribution, opts: &GenerateOptions) -> Result<Option<Generated>> {
    let bottom = keep_minimal(minimal_merges(source));
    let v = verify_reduction(source, &bottom, &opts.verify)?;
    if v.outcome != Outcome::ValidReduction {
        return Ok(None);
    }
    let candidate = CandidateReduction::from_sorted_unchecked(source.clone(), bottom);
    Ok(Some(Generated {
        dimension: candidate.dimension()?,
        candidate,
        verdict: v,
    }))
}

/// Incremental search over all merges of `source`.
pub fn incremental_generate(source: &Distribution, opts: &GenerateOptions, mut sink: Option<EventSink<'_>>) -> Result<GenerateOutcome> {
    if let Some(v) = preflight(source, opts, &mut sink)? {
        return Ok(GenerateOutcome::NoReduction(v));
    }
    let pool = all_merges(source, opts.verify.merge_cap)?;
    search_pool(source, pool, opts, sink)
}

fn search_pool(source: &Distribution, pool: Vec<Distribution>, opts: &GenerateOptions, sink: Option<EventSink<'_>>) -> Result<GenerateOutcome> {
    let mut search = Search::new(source, pool, *opts, sink);
    search.run()?;
    if !search.found.is_empty() {
        return Ok(GenerateOutcome::Found(search.found));
    }
    if let Some(g) = bottom_fallback(source, opts)? {
        search.emit(Event::new("bottom").with_members(g.candidate.members()));
        return Ok(GenerateOutcome::Found(vec![g]));
    }
    Ok(GenerateOutcome::Exhausted {
        candidates_tested: search.tested,
        nodes: search.nodes,
        budget_hit: search.budget_hit,
    })
}

/// Reduction of `source` made of two-part merges only, if the search finds
/// one.
fn bottom_reduction(source: &Distribution, opts: &GenerateOptions, sink: &mut Option<EventSink<'_>>) -> Result<Option<Generated>> {
    let bottom = keep_minimal(minimal_merges(source));
    if bottom.len() < 2 {
        return Ok(None);
    }
    let local = GenerateOptions {
        collect_all: false,
        max_width: None,
        ..*opts
    };
    let mut search = Search::new(source, bottom, local, sink.as_mut().map(|s| &mut **s as EventSink<'_>));
    search.run()?;
    Ok(search.found.into_iter().next())
}

/// Starts from a reduction inside `[⊥(Δ)]` and repeatedly replaces a member
/// by a reduction of that member, keeping each replacement only if the
/// verifier accepts the result.
pub fn recursive_generate(source: &Distribution, opts: &GenerateOptions, mut sink: Option<EventSink<'_>>) -> Result<GenerateOutcome> {
    if let Some(v) = preflight(source, opts, &mut sink)? {
        return Ok(GenerateOutcome::NoReduction(v));
    }
    let Some(mut current) = bottom_reduction(source, opts, &mut sink)? else {
        return Ok(match bottom_fallback(source, opts)? {
            Some(g) => GenerateOutcome::Found(vec![g]),
            None => GenerateOutcome::Exhausted {
                candidates_tested: 0,
                nodes: 0,
                budget_hit: false,
            },
        });
    };
    let mut tried: HashSet<Distribution> = HashSet::new();
    'outer: loop {
        let mut order: Vec<Distribution> = current.candidate.members().to_vec();
        order.sort_by_key(|m| std::cmp::Reverse(m.size()));
        for member in order {
            if member.size() < 3 || !tried.insert(member.clone()) {
                continue;
            }
            let Some(inner) = bottom_reduction(&member, opts, &mut sink)? else {
                continue;
            };
            let replaced = keep_minimal(
                current
                    .candidate
                    .members()
                    .iter()
                    .filter(|m| **m != member)
                    .cloned()
                    .chain(inner.candidate.members().iter().cloned()),
            );
            if replaced.len() < 2 {
                continue;
            }
            let v = verify_reduction(source, &replaced, &opts.verify)?;
            if let Some(s) = sink.as_mut() {
                let mut e = Event::new("replaced").with_members(&replaced);
                e.detail = Some(format!("{} -> {}", member, v.outcome));
                s(&e);
            }
            if v.outcome == Outcome::ValidReduction {
                let candidate = CandidateReduction::from_sorted_unchecked(source.clone(), replaced);
                current = Generated {
                    dimension: candidate.dimension()?,
                    candidate,
                    verdict: v,
                };
                continue 'outer;
            }
        }
        break;
    }
    Ok(GenerateOutcome::Found(vec![current]))
}

/// Every validated candidate the incremental search meets, up to the
/// options' limits.
pub fn collect_all_validated(source: &Distribution, opts: &GenerateOptions, sink: Option<EventSink<'_>>) -> Result<GenerateOutcome> {
    let opts = GenerateOptions {
        collect_all: true,
        ..*opts
    };
    incremental_generate(source, &opts, sink)
}

/// Independence pairs of `source` in the order the search covers them.
pub fn independence_edges(source: &Distribution) -> Vec<(Symbol, Symbol)> {
    source.independence().edges()
}

/// Whether `members` jointly separate every independence pair of `source`.
pub fn covers_independence(source: &Distribution, members: &[Distribution]) -> bool {
    let target = source.independence();
    let mut acc: Option<Relation> = None;
    for m in members {
        let r = m.independence();
        acc = Some(match acc {
            Some(a) => a.union(&r),
            None => r,
        });
    }
    acc.is_some_and(|a| target.is_subset(&a))
}
