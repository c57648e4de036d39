//! Alphabets and dense symbol sets.
//!
//! Symbols are interned to small integers when an [`Alphabet`] is created.
//! Every set of symbols is a [`SymSet`], a 64-bit mask over those indices,
//! so an alphabet holds at most [`MAX_SYMBOLS`] symbols.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Interned symbol: its position in the owning [`Alphabet`].
pub type Symbol = u8;

/// Largest alphabet a [`SymSet`] can address.
pub const MAX_SYMBOLS: usize = 64;

/// A set of symbols of one alphabet, stored as a bit mask.
///
/// The [`Ord`] impl compares the sorted element lists lexicographically,
/// which is the canonical order used for the parts of a distribution.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Default)]
pub struct SymSet(u64);

impl SymSet {
    pub const EMPTY: SymSet = SymSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        SymSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(s: Symbol) -> Self {
        SymSet(1u64 << s)
    }

    /// The first `n` symbols.
    pub fn prefix(n: usize) -> Self {
        if n >= 64 {
            SymSet(u64::MAX)
        } else {
            SymSet((1u64 << n) - 1)
        }
    }

    pub fn contains(self, s: Symbol) -> bool {
        self.0 >> s & 1 == 1
    }

    pub fn insert(&mut self, s: Symbol) {
        self.0 |= 1u64 << s;
    }

    pub fn remove(&mut self, s: Symbol) {
        self.0 &= !(1u64 << s);
    }

    pub fn union(self, other: SymSet) -> SymSet {
        SymSet(self.0 | other.0)
    }

    pub fn intersection(self, other: SymSet) -> SymSet {
        SymSet(self.0 & other.0)
    }

    pub fn difference(self, other: SymSet) -> SymSet {
        SymSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: SymSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset(self, other: SymSet) -> bool {
        self != other && self.is_subset(other)
    }

    pub fn intersects(self, other: SymSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> SymIter {
        SymIter(self.0)
    }
}

impl FromIterator<Symbol> for SymSet {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        let mut s = SymSet::EMPTY;
        for x in iter {
            s.insert(x);
        }
        s
    }
}

impl IntoIterator for SymSet {
    type Item = Symbol;
    type IntoIter = SymIter;
    fn into_iter(self) -> SymIter {
        self.iter()
    }
}

impl Ord for SymSet {
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        // Elements below the first differing bit are shared. The set holding
        // that bit is smaller unless the other set has nothing left above it.
        let p = diff.trailing_zeros();
        let (holder, other_bits) = if self.0 >> p & 1 == 1 {
            (Ordering::Less, other.0)
        } else {
            (Ordering::Greater, self.0)
        };
        if other_bits >> p != 0 {
            holder
        } else {
            holder.reverse()
        }
    }
}

impl PartialOrd for SymSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SymSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct SymIter(u64);

impl Iterator for SymIter {
    type Item = Symbol;
    fn next(&mut self) -> Option<Symbol> {
        if self.0 == 0 {
            None
        } else {
            let s = self.0.trailing_zeros() as Symbol;
            self.0 &= self.0 - 1;
            Some(s)
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for SymIter {}

/// A finite, ordered alphabet. The order is fixed at creation.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Arc<Alphabet>>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if names.len() > MAX_SYMBOLS {
            return Err(Error::AlphabetTooLarge(names.len()));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || !is_symbol_name(name) {
                return Err(Error::InvalidSymbol(name.clone()));
            }
            if index.insert(name.clone(), i as Symbol).is_some() {
                return Err(Error::DuplicateSymbol(name.clone()));
            }
        }
        Ok(Arc::new(Alphabet { names, index }))
    }

    /// One symbol per character, e.g. `"abcdef"`.
    pub fn from_chars(chars: &str) -> Result<Arc<Alphabet>> {
        Alphabet::new(chars.chars().map(String::from))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn full(&self) -> SymSet {
        SymSet::prefix(self.names.len())
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.names[s as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.index.get(name).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        0..self.names.len() as Symbol
    }

    /// True when every symbol name is a single character, so sets and words
    /// can be written without separators.
    pub fn is_compact(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }

    /// Parses a set written either as concatenated single-character symbols
    /// (`"abc"`) or as separated names (`"a0 a1"`, `"a0,a1"`).
    pub fn parse_set(&self, text: &str) -> Result<SymSet> {
        let mut set = SymSet::EMPTY;
        for name in self.split_names(text) {
            let s = self
                .symbol(&name)
                .ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
            set.insert(s);
        }
        Ok(set)
    }

    /// Parses a word in the same notation as [`Alphabet::parse_set`].
    pub fn parse_word(&self, text: &str) -> Result<Vec<Symbol>> {
        self.split_names(text)
            .into_iter()
            .map(|name| {
                self.symbol(&name)
                    .ok_or_else(|| Error::UnknownSymbol(name.clone()))
            })
            .collect()
    }

    fn split_names(&self, text: &str) -> Vec<String> {
        let text = text.trim();
        if text.contains(|c: char| c == ',' || c.is_whitespace()) {
            text.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(String::from)
                .collect()
        } else if self.is_compact() {
            text.chars().map(String::from).collect()
        } else {
            vec![text.to_string()]
        }
    }

    /// `{a,b,c}` style rendering.
    pub fn render_set(&self, set: SymSet) -> String {
        let names: Vec<&str> = set.iter().map(|s| self.name(s)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// `abc` for compact alphabets, `a0 a1` otherwise.
    pub fn render_compact(&self, set: SymSet) -> String {
        let names: Vec<&str> = set.iter().map(|s| self.name(s)).collect();
        if self.is_compact() {
            names.concat()
        } else {
            names.join(" ")
        }
    }

    pub fn render_word(&self, word: &[Symbol]) -> String {
        if word.is_empty() {
            return "epsilon".to_string();
        }
        let names: Vec<&str> = word.iter().map(|&s| self.name(s)).collect();
        if self.is_compact() {
            names.concat()
        } else {
            names.join(" ")
        }
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names.iter()).finish()
    }
}

fn is_symbol_name(name: &str) -> bool {
    name.chars()
        .all(|c| c.is_alphanumeric() || c == '_' || c == '\'' || c == '.')
        && name != "epsilon"
}

pub(crate) fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}
