//! The candidate counter-example `L_cand` and an exact decomposability
//! oracle for it.
//!
//! Each class `L(Σ_j)` is the set of all words with one fixed Parikh
//! vector, so `L_cand` is a finite union of commutation classes. Projection
//! and synchronous product preserve that shape: a word lies in `L_cand^Δ'`
//! iff its Parikh vector agrees, on every part of `Δ'`, with some class.
//! Decomposability is therefore decided on exponent vectors alone.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::language::{FiniteLanguage, Word};
use crate::structural::{Analyzer, CertRule};
use crate::symbols::{Alphabet, SymSet, Symbol};

/// Occurrence count per symbol, indexed by symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    pub fn count(&self, s: Symbol) -> u32 {
        self.0[s as usize]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }

    /// `a¹b¹c²` style, one factor per symbol.
    pub fn render(&self, alphabet: &Alphabet) -> String {
        self.0
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{}^{}", alphabet.name(i as Symbol), c))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Number of distinct words with these counts, saturating.
    pub fn class_size(&self) -> u128 {
        let mut total: u128 = 0;
        let mut size: u128 = 1;
        for &c in &self.0 {
            for k in 1..=c as u128 {
                total += 1;
                size = size.saturating_mul(total) / k;
            }
        }
        size
    }
}

/// A union of commutation classes over one alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParikhUnion {
    alphabet: Arc<Alphabet>,
    classes: Vec<ExponentVector>,
}

impl ParikhUnion {
    pub fn new(alphabet: Arc<Alphabet>, classes: Vec<ExponentVector>) -> Result<Self> {
        if classes.iter().any(|c| c.0.len() != alphabet.len()) {
            return Err(Error::InvalidInput("exponent vector length differs from alphabet".into()));
        }
        let mut seen = BTreeSet::new();
        let classes = classes.into_iter().filter(|c| seen.insert(c.clone())).collect();
        Ok(ParikhUnion { alphabet, classes })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn classes(&self) -> &[ExponentVector] {
        &self.classes
    }

    pub fn contains_vector(&self, v: &ExponentVector) -> bool {
        self.classes.contains(v)
    }

    pub fn word_count(&self) -> u128 {
        self.classes
            .iter()
            .fold(0u128, |a, c| a.saturating_add(c.class_size()))
    }

    /// Every word of every class.
    pub fn materialize(&self, max_words: usize) -> Result<FiniteLanguage> {
        if self.word_count() > max_words as u128 {
            return Err(Error::CapacityExceeded { limit: max_words });
        }
        let mut words = Vec::new();
        for c in &self.classes {
            multiset_permutations(&c.0, &mut words);
        }
        FiniteLanguage::new(self.alphabet.clone(), words)
    }
}

fn multiset_permutations(counts: &[u32], out: &mut Vec<Word>) {
    let len: u32 = counts.iter().sum();
    let mut left = counts.to_vec();
    let mut buf = Vec::with_capacity(len as usize);
    fn rec(left: &mut [u32], buf: &mut Word, len: usize, out: &mut Vec<Word>) {
        if buf.len() == len {
            out.push(buf.clone());
            return;
        }
        for s in 0..left.len() {
            if left[s] > 0 {
                left[s] -= 1;
                buf.push(s as Symbol);
                rec(left, buf, len, out);
                buf.pop();
                left[s] += 1;
            }
        }
    }
    rec(&mut left, &mut buf, len as usize, out);
}

/// `L_cand` for the parts of `d` in canonical order.
pub fn build_lcand(d: &Distribution) -> ParikhUnion {
    build_lcand_ordered(d.alphabet(), d.parts())
}

/// `L_cand` with class `j` (counted from 1) built from `parts[j-1]`.
/// Symbols in the part occur once, the others `j + 1` times.
pub fn build_lcand_ordered(alphabet: &Arc<Alphabet>, parts: &[SymSet]) -> ParikhUnion {
    let classes = parts
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            ExponentVector(
                alphabet
                    .symbols()
                    .map(|s| if p.contains(s) { 1 } else { j as u32 + 2 })
                    .collect(),
            )
        })
        .collect();
    ParikhUnion {
        alphabet: alphabet.clone(),
        classes,
    }
}

/// The first glued vector of `L^{Δ'}` missing from `L`, in lexicographic
/// order of the class tuple; `None` when `L` is decomposable.
pub fn parikh_witness(l: &ParikhUnion, dprime: &Distribution) -> Option<ExponentVector> {
    let parts = dprime.parts();
    // Distinct restrictions per part, in first-occurrence order.
    let options: Vec<Vec<usize>> = parts
        .iter()
        .map(|&p| {
            let mut seen: Vec<Vec<u32>> = Vec::new();
            let mut keep = Vec::new();
            for (j, c) in l.classes.iter().enumerate() {
                let r: Vec<u32> = p.iter().map(|s| c.count(s)).collect();
                if !seen.contains(&r) {
                    seen.push(r);
                    keep.push(j);
                }
            }
            keep
        })
        .collect();
    let n_sym = l.alphabet.len();
    let mut glued = vec![None; n_sym];
    let mut witness = None;
    glue(l, parts, &options, 0, &mut glued, &mut witness);
    witness
}

fn glue(
    l: &ParikhUnion,
    parts: &[SymSet],
    options: &[Vec<usize>],
    k: usize,
    glued: &mut Vec<Option<u32>>,
    witness: &mut Option<ExponentVector>,
) -> bool {
    if k == parts.len() {
        let v = ExponentVector(glued.iter().map(|c| c.expect("parts cover the alphabet")).collect());
        if l.contains_vector(&v) {
            return false;
        }
        *witness = Some(v);
        return true;
    }
    for &j in &options[k] {
        let c = &l.classes[j];
        if parts[k].iter().any(|s| matches!(glued[s as usize], Some(x) if x != c.count(s))) {
            continue;
        }
        let fresh: Vec<Symbol> = parts[k].iter().filter(|&s| glued[s as usize].is_none()).collect();
        for &s in &fresh {
            glued[s as usize] = Some(c.count(s));
        }
        let found = glue(l, parts, options, k + 1, glued, witness);
        for &s in &fresh {
            glued[s as usize] = None;
        }
        if found {
            return true;
        }
    }
    false
}

/// Exact decomposability of a union of commutation classes.
pub fn parikh_decomposable(l: &ParikhUnion, dprime: &Distribution) -> bool {
    parikh_witness(l, dprime).is_none()
}

/// Outcome of checking `L_cand` against one member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberCheck {
    pub member: Distribution,
    /// Rule that certified decomposability, if it holds.
    pub rule: Option<CertRule>,
    /// New part the structural rule started from.
    pub certifying_part: Option<SymSet>,
    /// Vector of the closure outside `L_cand`, when not decomposable.
    pub witness: Option<ExponentVector>,
}

impl MemberCheck {
    pub fn decomposable(&self) -> bool {
        self.rule.is_some()
    }
}

/// Certificate that `L_cand` refutes a candidate: it is decomposable with
/// respect to every member but, by construction, not the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefutationEvidence {
    pub lcand: ParikhUnion,
    pub members: Vec<MemberCheck>,
    /// The source's own non-decomposability witness, `σ_1 σ_2 … σ_m`.
    pub source_witness: ExponentVector,
}

impl RefutationEvidence {
    /// Strongest rule needed across all members.
    pub fn weakest_rule(&self) -> CertRule {
        self.members
            .iter()
            .filter_map(|m| m.rule)
            .max()
            .unwrap_or(CertRule::PathCover)
    }
}

/// Checks one member: structural rules first when `member` is a merge of
/// the source, then the oracle.
pub fn check_member(analyzer: &mut Analyzer, lcand: &ParikhUnion, member: &Distribution, is_merge: bool) -> MemberCheck {
    if is_merge {
        if let Some((rule, part)) = analyzer.certify(member) {
            debug_assert!(parikh_decomposable(lcand, member));
            return MemberCheck {
                member: member.clone(),
                rule: Some(rule),
                certifying_part: Some(part),
                witness: None,
            };
        }
    }
    let witness = parikh_witness(lcand, member);
    MemberCheck {
        member: member.clone(),
        rule: witness.is_none().then_some(CertRule::Oracle),
        certifying_part: None,
        witness,
    }
}

/// Checks every member against `L_cand` of `source`.
pub fn check_members(source: &Distribution, members: &[Distribution]) -> (ParikhUnion, Vec<MemberCheck>) {
    let lcand = build_lcand(source);
    let mut analyzer = Analyzer::new(source);
    let checks = members
        .iter()
        .map(|m| {
            let is_merge = crate::merge::is_merge_of(source, m);
            check_member(&mut analyzer, &lcand, m, is_merge)
        })
        .collect();
    (lcand, checks)
}

/// `Some` when `L_cand` is decomposable with respect to every member.
pub fn refute_candidate(source: &Distribution, members: &[Distribution]) -> Option<RefutationEvidence> {
    let (lcand, checks) = check_members(source, members);
    if members.is_empty() || !checks.iter().all(MemberCheck::decomposable) {
        return None;
    }
    Some(RefutationEvidence {
        lcand,
        members: checks,
        source_witness: ExponentVector(vec![1; source.alphabet().len()]),
    })
}

/// JSON-ready view of an exponent vector.
#[derive(Serialize)]
pub struct VectorView {
    pub rendered: String,
    pub counts: Vec<u32>,
}

impl VectorView {
    pub fn new(v: &ExponentVector, alphabet: &Alphabet) -> Self {
        VectorView {
            rendered: v.render(alphabet),
            counts: v.0.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::is_decomposable;

    fn d(sigma: &Arc<Alphabet>, s: &str) -> Distribution {
        Distribution::parse(sigma.clone(), s).unwrap()
    }

    fn vectors(l: &ParikhUnion) -> Vec<Vec<u32>> {
        l.classes().iter().map(|c| c.0.clone()).collect()
    }

    #[test]
    fn ring4_in_written_order() {
        let sigma = Alphabet::from_chars("abcd").unwrap();
        let parts: Vec<SymSet> = ["ab", "bc", "cd", "da"]
            .iter()
            .map(|p| sigma.parse_set(p).unwrap())
            .collect();
        let l = build_lcand_ordered(&sigma, &parts);
        assert_eq!(
            vectors(&l),
            vec![vec![1, 1, 2, 2], vec![3, 1, 1, 3], vec![4, 4, 1, 1], vec![1, 5, 5, 1]]
        );
    }

    #[test]
    fn ring4_is_not_decomposable_for_itself() {
        let sigma = Alphabet::from_chars("abcd").unwrap();
        let ring = d(&sigma, "ab|bc|cd|da");
        let l = build_lcand(&ring);
        assert_eq!(parikh_witness(&l, &ring), Some(ExponentVector(vec![1, 1, 1, 1])));
        let words = l.materialize(100_000).unwrap();
        assert!(!is_decomposable(&words, &ring).unwrap());
    }

    #[test]
    fn class_sizes() {
        assert_eq!(ExponentVector(vec![1, 1, 2, 2]).class_size(), 180);
        assert_eq!(ExponentVector(vec![0, 0]).class_size(), 1);
    }

    #[test]
    fn materialize_respects_capacity() {
        let sigma = Alphabet::from_chars("abcd").unwrap();
        let l = build_lcand(&d(&sigma, "ab|bc|cd|da"));
        assert!(matches!(l.materialize(10), Err(Error::CapacityExceeded { limit: 10 })));
    }
}
