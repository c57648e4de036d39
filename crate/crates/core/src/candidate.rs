//! Candidate reductions and the order `≤_Δ` between them.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::distribution::{check_alphabets, meet_all, Distribution};
use crate::error::{Error, Result};
use crate::merge::{all_merges, is_merge_of, keep_minimal};

/// A set of pairwise incomparable merged distributions of `source`.
///
/// Members are normalised with [`keep_minimal`] on construction, so they
/// are sorted canonically. The empty candidate is the top of `≤_Δ`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CandidateReduction {
    source: Distribution,
    members: Vec<Distribution>,
}

impl CandidateReduction {
    /// Requires every member to be a merge of `source`.
    pub fn new<I>(source: Distribution, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = Distribution>,
    {
        let c = Self::lenient(source, members)?;
        if let Some(bad) = c.members.iter().find(|m| !is_merge_of(&c.source, m)) {
            return Err(Error::NotAMerge(bad.render()));
        }
        Ok(c)
    }

    /// Only checks that every member shares the source's alphabet. Used for
    /// user-supplied candidates, whose members need not be merges.
    pub fn lenient<I>(source: Distribution, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = Distribution>,
    {
        let members: Vec<Distribution> = members.into_iter().collect();
        for m in &members {
            check_alphabets(&source, m)?;
        }
        Ok(CandidateReduction {
            members: keep_minimal(members),
            source,
        })
    }

    pub(crate) fn from_sorted_unchecked(source: Distribution, members: Vec<Distribution>) -> Self {
        debug_assert_eq!(members, keep_minimal(members.clone()));
        CandidateReduction { source, members }
    }

    pub fn source(&self) -> &Distribution {
        &self.source
    }

    pub fn members(&self) -> &[Distribution] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn all_members_are_merges(&self) -> bool {
        self.members.iter().all(|m| is_merge_of(&self.source, m))
    }

    /// Meet of the members; `None` when empty.
    pub fn meet(&self) -> Option<Distribution> {
        meet_all(&self.members)
    }

    pub fn is_meet_consistent(&self) -> bool {
        self.meet().as_ref() == Some(&self.source)
    }

    /// Meet-consistent, and no proper subset is. Since adding members only
    /// lowers the meet, checking the subsets missing one member suffices.
    pub fn is_minimal_meet_consistent(&self) -> bool {
        if !self.is_meet_consistent() {
            return false;
        }
        (0..self.members.len()).all(|skip| {
            let rest = self
                .members
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, m)| m);
            meet_all(rest).as_ref() != Some(&self.source)
        })
    }

    pub fn dimension(&self) -> Result<Dimension> {
        let width = self
            .members
            .iter()
            .map(Distribution::size)
            .max()
            .ok_or(Error::EmptyCandidate)?;
        Ok(Dimension {
            height: self.members.len(),
            width,
        })
    }

    pub fn render(&self) -> String {
        let ms: Vec<String> = self.members.iter().map(Distribution::render).collect();
        format!("{{{}}}", ms.join(", "))
    }
}

impl fmt::Debug for CandidateReduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} for {}", self.render(), self.source)
    }
}

/// `(height, width)`: member count and largest member size.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Dimension {
    pub height: usize,
    pub width: usize,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.height, self.width)
    }
}

/// `Less` when `p` is preferable: smaller width first, then smaller height.
pub fn compare_optimality(p: &CandidateReduction, q: &CandidateReduction) -> Result<Ordering> {
    let (a, b) = (p.dimension()?, q.dimension()?);
    Ok((a.width, a.height).cmp(&(b.width, b.height)))
}

fn check_sources(p: &CandidateReduction, q: &CandidateReduction) -> Result<()> {
    if p.source == q.source {
        Ok(())
    } else {
        Err(Error::SourceMismatch)
    }
}

/// `p ≤_Δ q`: every member of `q` lies above some member of `p`.
pub fn leq_delta(p: &CandidateReduction, q: &CandidateReduction) -> Result<bool> {
    check_sources(p, q)?;
    Ok(q.members.iter().all(|b| p.members.iter().any(|a| a.leq(b))))
}

/// Greatest lower bound: `[p ∪ q]`.
pub fn cr_meet(p: &CandidateReduction, q: &CandidateReduction) -> Result<CandidateReduction> {
    check_sources(p, q)?;
    let members = keep_minimal(p.members.iter().chain(&q.members).cloned());
    Ok(CandidateReduction::from_sorted_unchecked(p.source.clone(), members))
}

/// Least upper bound: the minimal merges lying above `a ∨ b` for some
/// `a ∈ p`, `b ∈ q`.
pub fn cr_join(p: &CandidateReduction, q: &CandidateReduction, cap: usize) -> Result<CandidateReduction> {
    check_sources(p, q)?;
    let joins: Vec<Distribution> = p
        .members
        .iter()
        .flat_map(|a| q.members.iter().map(move |b| a.join(b)))
        .collect();
    let above = all_merges(&p.source, cap)?
        .into_iter()
        .filter(|m| joins.iter().any(|j| j.leq(m)));
    Ok(CandidateReduction::from_sorted_unchecked(
        p.source.clone(),
        keep_minimal(above),
    ))
}

/// `U(P)`: every merge of the source lying above some member.
pub fn upward_set(p: &CandidateReduction, cap: usize) -> Result<Vec<Distribution>> {
    Ok(all_merges(&p.source, cap)?
        .into_iter()
        .filter(|m| p.members.iter().any(|a| a.leq(m)))
        .collect())
}
