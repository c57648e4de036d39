//! Distributions of an alphabet and the lattice order between them.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::symbols::{same_alphabet, Alphabet, SymSet, Symbol};

/// A cover of an alphabet by pairwise incomparable, non-empty parts.
///
/// Parts are kept sorted in the canonical [`SymSet`] order, so two
/// distributions with the same parts compare equal regardless of the order
/// they were written in. Part positions used throughout the crate are
/// 0-based indices into this sorted sequence.
#[derive(Clone)]
pub struct Distribution {
    alphabet: Arc<Alphabet>,
    parts: Vec<SymSet>,
}

impl Distribution {
    /// Validates `parts` as a distribution of `alphabet`.
    pub fn new<I>(alphabet: Arc<Alphabet>, parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = SymSet>,
    {
        let mut parts: Vec<SymSet> = parts.into_iter().collect();
        let full = alphabet.full();
        let mut covered = SymSet::EMPTY;
        for &p in &parts {
            if p.is_empty() {
                return Err(Error::EmptyPart);
            }
            if !p.is_subset(full) {
                return Err(Error::InvalidInput("part outside the alphabet".into()));
            }
            covered = covered.union(p);
        }
        if covered != full {
            return Err(Error::NotCovering(alphabet.render_set(full.difference(covered))));
        }
        parts.sort();
        for w in parts.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicatePart(alphabet.render_set(w[0])));
            }
        }
        for (i, &a) in parts.iter().enumerate() {
            for &b in &parts[i + 1..] {
                if a.is_subset(b) || b.is_subset(a) {
                    return Err(Error::ComparableParts(
                        alphabet.render_set(a),
                        alphabet.render_set(b),
                    ));
                }
            }
        }
        Ok(Distribution { alphabet, parts })
    }

    /// Builds a distribution from any covering family by keeping its maximal
    /// non-empty members.
    pub fn from_maximal<I>(alphabet: Arc<Alphabet>, sets: I) -> Self
    where
        I: IntoIterator<Item = SymSet>,
    {
        let parts = maximal_sets(sets);
        debug_assert_eq!(
            parts.iter().fold(SymSet::EMPTY, |a, &b| a.union(b)),
            alphabet.full()
        );
        Distribution { alphabet, parts }
    }

    /// The size-1 distribution `(Σ)`.
    pub fn trivial(alphabet: Arc<Alphabet>) -> Self {
        let full = alphabet.full();
        Distribution {
            alphabet,
            parts: vec![full],
        }
    }

    /// Parses `ab|bc|de` (or `(ab|bc|de)`); parts use the notation of
    /// [`Alphabet::parse_set`].
    pub fn parse(alphabet: Arc<Alphabet>, text: &str) -> Result<Self> {
        let text = text.trim();
        let text = text
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .unwrap_or(text);
        let parts = text
            .split('|')
            .map(|p| alphabet.parse_set(p))
            .collect::<Result<Vec<_>>>()?;
        Distribution::new(alphabet, parts)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn parts(&self) -> &[SymSet] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> SymSet {
        self.parts[i]
    }

    pub fn size(&self) -> usize {
        self.parts.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.parts.len() == 1
    }

    pub fn same_alphabet(&self, other: &Distribution) -> bool {
        same_alphabet(&self.alphabet, &other.alphabet)
    }

    /// `self ≤ other`: every part of `self` lies inside a part of `other`.
    pub fn leq(&self, other: &Distribution) -> bool {
        self.parts.iter().all(|&p| other.covers(p))
    }

    pub fn lt(&self, other: &Distribution) -> bool {
        self != other && self.leq(other)
    }

    pub fn comparable(&self, other: &Distribution) -> bool {
        self.leq(other) || other.leq(self)
    }

    /// Greatest lower bound: maximal non-empty pairwise intersections.
    pub fn meet(&self, other: &Distribution) -> Distribution {
        let sets = self
            .parts
            .iter()
            .flat_map(|&a| other.parts.iter().map(move |&b| a.intersection(b)));
        Distribution::from_maximal(self.alphabet.clone(), sets)
    }

    /// Least upper bound: maximal parts of the union.
    ///
    /// Parts of the union may still overlap; the join need not be a
    /// partition.
    pub fn join(&self, other: &Distribution) -> Distribution {
        let sets = self.parts.iter().chain(other.parts.iter()).copied();
        Distribution::from_maximal(self.alphabet.clone(), sets)
    }

    /// `s ⊑ self`: `s` lies inside some part.
    pub fn covers(&self, s: SymSet) -> bool {
        self.parts.iter().any(|&p| s.is_subset(p))
    }

    /// Pairs of symbols that share a part, including the diagonal.
    pub fn dependence(&self) -> Relation {
        let n = self.alphabet.len();
        let mut rows = vec![SymSet::EMPTY; n];
        for &p in &self.parts {
            for s in p {
                rows[s as usize] = rows[s as usize].union(p);
            }
        }
        Relation { rows }
    }

    /// Complement of [`Distribution::dependence`].
    pub fn independence(&self) -> Relation {
        let full = self.alphabet.full();
        let dep = self.dependence();
        Relation {
            rows: dep.rows.iter().map(|&r| full.difference(r)).collect(),
        }
    }

    /// Parts containing `s`, as a mask over part positions.
    pub fn parts_containing(&self, s: Symbol) -> u64 {
        self.parts
            .iter()
            .enumerate()
            .filter(|(_, p)| p.contains(s))
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    pub fn position(&self, part: SymSet) -> Option<usize> {
        self.parts.binary_search(&part).ok()
    }

    pub fn contains_part(&self, part: SymSet) -> bool {
        self.position(part).is_some()
    }

    /// Compact text form such as `(ab|bc|de)`.
    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|&p| self.alphabet.render_compact(p))
            .collect();
        format!("({})", parts.join("|"))
    }
}

/// Checked `d1 ≤ d2`.
pub fn leq_sigma(d1: &Distribution, d2: &Distribution) -> Result<bool> {
    check_alphabets(d1, d2)?;
    Ok(d1.leq(d2))
}

/// Checked meet.
pub fn meet(d1: &Distribution, d2: &Distribution) -> Result<Distribution> {
    check_alphabets(d1, d2)?;
    Ok(d1.meet(d2))
}

/// Checked join.
pub fn join(d1: &Distribution, d2: &Distribution) -> Result<Distribution> {
    check_alphabets(d1, d2)?;
    Ok(d1.join(d2))
}

/// Meet of a non-empty family.
pub fn meet_all<'a, I>(ds: I) -> Option<Distribution>
where
    I: IntoIterator<Item = &'a Distribution>,
{
    let mut it = ds.into_iter();
    let first = it.next()?.clone();
    Some(it.fold(first, |acc, d| acc.meet(d)))
}

pub(crate) fn check_alphabets(d1: &Distribution, d2: &Distribution) -> Result<()> {
    if d1.same_alphabet(d2) {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch)
    }
}

/// Maximal non-empty members of `sets`, sorted and deduplicated.
pub(crate) fn maximal_sets<I: IntoIterator<Item = SymSet>>(sets: I) -> Vec<SymSet> {
    let mut v: Vec<SymSet> = sets.into_iter().filter(|s| !s.is_empty()).collect();
    // Larger sets first so each candidate only needs checking against kept ones.
    v.sort_by_key(|s| std::cmp::Reverse(s.len()));
    let mut kept: Vec<SymSet> = Vec::with_capacity(v.len());
    for s in v {
        if !kept.iter().any(|&k| s.is_subset(k)) {
            kept.push(s);
        }
    }
    kept.sort();
    kept
}

impl PartialEq for Distribution {
    fn eq(&self, other: &Self) -> bool {
        self.parts == other.parts && self.same_alphabet(other)
    }
}

impl Eq for Distribution {}

impl Hash for Distribution {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.parts.hash(state);
    }
}

/// Canonical total order: lexicographic over the sorted parts.
impl Ord for Distribution {
    fn cmp(&self, other: &Self) -> Ordering {
        self.parts.cmp(&other.parts)
    }
}

impl PartialOrd for Distribution {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// A symmetric relation on the symbols of an alphabet, one row per symbol.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Relation {
    rows: Vec<SymSet>,
}

impl Relation {
    pub fn contains(&self, a: Symbol, b: Symbol) -> bool {
        self.rows[a as usize].contains(b)
    }

    pub fn row(&self, a: Symbol) -> SymSet {
        self.rows[a as usize]
    }

    /// Neighbours of `a` other than `a` itself.
    pub fn neighbors(&self, a: Symbol) -> SymSet {
        let mut r = self.rows[a as usize];
        r.remove(a);
        r
    }

    pub fn degree(&self, a: Symbol) -> usize {
        self.neighbors(a).len()
    }

    /// Unordered off-diagonal pairs `(a, b)` with `a < b`, in canonical order.
    pub fn edges(&self) -> Vec<(Symbol, Symbol)> {
        let mut out = Vec::new();
        for (a, &row) in self.rows.iter().enumerate() {
            let a = a as Symbol;
            for b in row {
                if b > a {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn union(&self, other: &Relation) -> Relation {
        Relation {
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(&a, &b)| a.union(b))
                .collect(),
        }
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows.iter().zip(&other.rows).all(|(&a, &b)| a.is_subset(b))
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }
}
