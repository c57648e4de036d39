//! Substitution of one distribution into a part of another, and the
//! saturation search that derives a goal distribution from premises.
//!
//! If a language is decomposable for `Δ'` and `Δ''`, it is decomposable for
//! every substitution result of them. Deriving the source from a candidate's
//! members therefore proves the candidate is a reduction.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::distribution::{check_alphabets, Distribution};
use crate::error::{Error, Result};
use crate::symbols::{Alphabet, SymSet};

/// Default bound on distinct distributions held by one saturation.
pub const DEFAULT_MAX_DERIVED: usize = 50_000;

/// `A(Δ')`: symbols occurring in two or more parts.
pub fn shared_symbols(d: &Distribution) -> SymSet {
    let mut seen = SymSet::EMPTY;
    let mut shared = SymSet::EMPTY;
    for &p in d.parts() {
        shared = shared.union(seen.intersection(p));
        seen = seen.union(p);
    }
    shared
}

/// `left` can be substituted into part `i` of `right`.
pub fn substitutable(left: &Distribution, right: &Distribution, i: usize) -> bool {
    i < right.size() && shared_symbols(left).is_subset(right.part(i))
}

/// Replaces part `i` of `right` by its intersections with the parts of
/// `left`, keeping maximal parts.
pub fn substitute(left: &Distribution, right: &Distribution, i: usize) -> Result<Distribution> {
    check_alphabets(left, right)?;
    if !substitutable(left, right, i) {
        return Err(Error::NotSubstitutable(i));
    }
    Ok(substitute_unchecked(left, right, i))
}

fn substitute_unchecked(left: &Distribution, right: &Distribution, i: usize) -> Distribution {
    let target = right.part(i);
    let others = right
        .parts()
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != i)
        .map(|(_, &p)| p);
    let pieces = left.parts().iter().map(|&p| p.intersection(target));
    Distribution::from_maximal(right.alphabet().clone(), others.chain(pieces))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionStep {
    pub left: Distribution,
    pub right: Distribution,
    /// 0-based part position in `right`.
    pub position: usize,
    pub result: Distribution,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTrace {
    pub premises: Vec<Distribution>,
    pub steps: Vec<SubstitutionStep>,
    pub conclusion: Distribution,
}

impl ProofTrace {
    /// Re-executes every step, checking operands are available and results
    /// match, and that the conclusion is reached.
    pub fn replay(&self) -> Result<()> {
        let mut avail: Vec<Distribution> = self.premises.clone();
        for (n, s) in self.steps.iter().enumerate() {
            if !avail.contains(&s.left) || !avail.contains(&s.right) {
                return Err(Error::BadTrace(format!("step {} uses an unavailable operand", n + 1)));
            }
            let got = substitute(&s.left, &s.right, s.position)
                .map_err(|e| Error::BadTrace(format!("step {}: {e}", n + 1)))?;
            if got != s.result {
                return Err(Error::BadTrace(format!("step {} result differs", n + 1)));
            }
            avail.push(got);
        }
        if avail.iter().any(|d| d == &self.conclusion) {
            Ok(())
        } else {
            Err(Error::BadTrace("conclusion not derived".into()))
        }
    }

    pub fn to_view(&self) -> TraceView {
        let alphabet = self.conclusion.alphabet();
        TraceView {
            alphabet: alphabet.names().to_vec(),
            premises: self.premises.iter().map(Distribution::render).collect(),
            steps: self
                .steps
                .iter()
                .map(|s| StepView {
                    left: s.left.render(),
                    right: s.right.render(),
                    position: s.position + 1,
                    result: s.result.render(),
                })
                .collect(),
            conclusion: self.conclusion.render(),
        }
    }

    pub fn from_view(view: &TraceView) -> Result<Self> {
        let alphabet = Alphabet::new(view.alphabet.iter().cloned())?;
        let parse = |s: &str| parse_rendered(&alphabet, s);
        Ok(ProofTrace {
            premises: view.premises.iter().map(|s| parse(s)).collect::<Result<_>>()?,
            steps: view
                .steps
                .iter()
                .map(|s| {
                    Ok(SubstitutionStep {
                        left: parse(&s.left)?,
                        right: parse(&s.right)?,
                        position: s
                            .position
                            .checked_sub(1)
                            .ok_or_else(|| Error::BadTrace("positions start at 1".into()))?,
                        result: parse(&s.result)?,
                    })
                })
                .collect::<Result<_>>()?,
            conclusion: parse(&view.conclusion)?,
        })
    }
}

/// Parses the output of [`Distribution::render`].
pub(crate) fn parse_rendered(alphabet: &Arc<Alphabet>, s: &str) -> Result<Distribution> {
    Distribution::parse(alphabet.clone(), s)
}

/// Self-contained JSON form of a [`ProofTrace`]; positions count from 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceView {
    pub alphabet: Vec<String>,
    pub premises: Vec<String>,
    pub steps: Vec<StepView>,
    pub conclusion: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepView {
    pub left: String,
    pub right: String,
    pub position: usize,
    pub result: String,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_derived: usize,
    pub time_limit: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_derived: DEFAULT_MAX_DERIVED,
            time_limit: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SaturationOutcome {
    Derived(ProofTrace),
    /// Closed under substitution without reaching the goal.
    Fixpoint { derived: usize },
    BudgetExceeded { derived: usize },
}

impl SaturationOutcome {
    pub fn trace(&self) -> Option<&ProofTrace> {
        match self {
            SaturationOutcome::Derived(t) => Some(t),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SaturationOutcome::Derived(_) => "derived",
            SaturationOutcome::Fixpoint { .. } => "fixpoint",
            SaturationOutcome::BudgetExceeded { .. } => "budget-exceeded",
        }
    }
}

struct Entry {
    dist: Distribution,
    shared: SymSet,
    origin: Option<(usize, usize, usize)>,
}

/// Breadth-first closure of `premises` under substitution until a
/// distribution at or below `goal` appears.
///
/// Each distribution is processed once, in insertion order, against every
/// processed one (itself included) in both roles. Positions are tried in
/// ascending order, so the search and its trace are deterministic.
pub fn saturate(premises: &[Distribution], goal: &Distribution, budget: Budget) -> SaturationOutcome {
    let start = Instant::now();
    let mut entries: Vec<Entry> = Vec::new();
    let mut index: HashMap<Distribution, usize> = HashMap::new();
    let mut premise_list: Vec<Distribution> = premises.to_vec();
    premise_list.sort();
    premise_list.dedup();
    for p in &premise_list {
        index.insert(p.clone(), entries.len());
        entries.push(Entry {
            shared: shared_symbols(p),
            dist: p.clone(),
            origin: None,
        });
        if p.leq(goal) {
            return SaturationOutcome::Derived(extract(&entries, &premise_list, entries.len() - 1));
        }
    }

    let mut next = 0;
    while next < entries.len() {
        for other in 0..=next {
            let pairs: &[(usize, usize)] = if other == next {
                &[(next, next)]
            } else {
                &[(next, other), (other, next)]
            };
            for &(l, r) in pairs {
                let shared = entries[l].shared;
                let rsize = entries[r].dist.size();
                for pos in 0..rsize {
                    if !shared.is_subset(entries[r].dist.part(pos)) {
                        continue;
                    }
                    let res = substitute_unchecked(&entries[l].dist, &entries[r].dist, pos);
                    if index.contains_key(&res) {
                        continue;
                    }
                    if entries.len() >= budget.max_derived {
                        return SaturationOutcome::BudgetExceeded { derived: entries.len() };
                    }
                    let reached = res.leq(goal);
                    index.insert(res.clone(), entries.len());
                    entries.push(Entry {
                        shared: shared_symbols(&res),
                        dist: res,
                        origin: Some((l, r, pos)),
                    });
                    if reached {
                        return SaturationOutcome::Derived(extract(&entries, &premise_list, entries.len() - 1));
                    }
                }
            }
            if let Some(limit) = budget.time_limit {
                if start.elapsed() > limit {
                    return SaturationOutcome::BudgetExceeded { derived: entries.len() };
                }
            }
        }
        next += 1;
    }
    SaturationOutcome::Fixpoint { derived: entries.len() }
}

/// Keeps only the steps the conclusion depends on, in derivation order.
fn extract(entries: &[Entry], premises: &[Distribution], goal: usize) -> ProofTrace {
    let mut needed = vec![false; entries.len()];
    let mut stack = vec![goal];
    while let Some(i) = stack.pop() {
        if std::mem::replace(&mut needed[i], true) {
            continue;
        }
        if let Some((l, r, _)) = entries[i].origin {
            stack.push(l);
            stack.push(r);
        }
    }
    let steps = (0..entries.len())
        .filter(|&i| needed[i])
        .filter_map(|i| {
            entries[i].origin.map(|(l, r, pos)| SubstitutionStep {
                left: entries[l].dist.clone(),
                right: entries[r].dist.clone(),
                position: pos,
                result: entries[i].dist.clone(),
            })
        })
        .collect();
    ProofTrace {
        premises: premises.to_vec(),
        steps,
        conclusion: entries[goal].dist.clone(),
    }
}
