//! Finite languages: shuffle, projection, synchronous product,
//! decomposability and trace closure.

use std::collections::{BTreeSet, VecDeque};
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::distribution::{Distribution, Relation};
use crate::error::{Error, Result};
use crate::symbols::{Alphabet, SymSet, Symbol};

pub type Word = Vec<Symbol>;

/// Default bound on the number of words any operation may produce.
pub const DEFAULT_MAX_WORDS: usize = 1_000_000;

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteLanguage {
    alphabet: Arc<Alphabet>,
    words: BTreeSet<Word>,
}

impl FiniteLanguage {
    pub fn new<I>(alphabet: Arc<Alphabet>, words: I) -> Result<Self>
    where
        I: IntoIterator<Item = Word>,
    {
        let n = alphabet.len();
        let words: BTreeSet<Word> = words.into_iter().collect();
        if words.iter().flatten().any(|&s| s as usize >= n) {
            return Err(Error::InvalidInput("word uses a symbol outside the alphabet".into()));
        }
        Ok(FiniteLanguage { alphabet, words })
    }

    pub fn empty(alphabet: Arc<Alphabet>) -> Self {
        FiniteLanguage {
            alphabet,
            words: BTreeSet::new(),
        }
    }

    /// Parses whitespace-free words in compact notation, `epsilon` for ε.
    pub fn parse_words<'a, I>(alphabet: Arc<Alphabet>, words: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let ws = words
            .into_iter()
            .map(|w| {
                if w.trim() == "epsilon" {
                    Ok(Vec::new())
                } else {
                    alphabet.parse_word(w)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteLanguage::new(alphabet, ws)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn words(&self) -> &BTreeSet<Word> {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &[Symbol]) -> bool {
        self.words.contains(w)
    }

    pub fn is_subset(&self, other: &FiniteLanguage) -> bool {
        self.words.is_subset(&other.words)
    }

    pub fn project(&self, target: SymSet) -> FiniteLanguage {
        FiniteLanguage {
            alphabet: self.alphabet.clone(),
            words: self.words.iter().map(|w| project(w, target)).collect(),
        }
    }

    pub fn render(&self) -> Vec<String> {
        self.words.iter().map(|w| self.alphabet.render_word(w)).collect()
    }
}

impl std::fmt::Debug for FiniteLanguage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.render()).finish()
    }
}

/// Erases the symbols outside `target`.
pub fn project(w: &[Symbol], target: SymSet) -> Word {
    w.iter().copied().filter(|&s| target.contains(s)).collect()
}

/// All interleavings of `s1` and `s2`.
pub fn shuffle(s1: &[Symbol], s2: &[Symbol]) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    let mut buf = Vec::with_capacity(s1.len() + s2.len());
    fn rec(a: &[Symbol], b: &[Symbol], buf: &mut Word, out: &mut BTreeSet<Word>) {
        if a.is_empty() && b.is_empty() {
            out.insert(buf.clone());
            return;
        }
        if let Some((&x, rest)) = a.split_first() {
            buf.push(x);
            rec(rest, b, buf, out);
            buf.pop();
        }
        if let Some((&y, rest)) = b.split_first() {
            buf.push(y);
            rec(a, rest, buf, out);
            buf.pop();
        }
    }
    rec(s1, s2, &mut buf, &mut out);
    out
}

/// A deterministic trie over one component language.
struct Trie {
    children: Vec<Vec<(Symbol, usize)>>,
    terminal: Vec<bool>,
}

impl Trie {
    fn build<'a, I: IntoIterator<Item = &'a Word>>(words: I) -> Trie {
        let mut t = Trie {
            children: vec![Vec::new()],
            terminal: vec![false],
        };
        for w in words {
            let mut node = 0;
            for &s in w {
                node = match t.children[node].iter().find(|(c, _)| *c == s) {
                    Some(&(_, next)) => next,
                    None => {
                        t.children.push(Vec::new());
                        t.terminal.push(false);
                        let next = t.children.len() - 1;
                        t.children[node].push((s, next));
                        next
                    }
                };
            }
            t.terminal[node] = true;
        }
        t
    }

    fn step(&self, node: usize, s: Symbol) -> Option<usize> {
        self.children[node].iter().find(|(c, _)| *c == s).map(|&(_, n)| n)
    }
}

/// Visits every word of the synchronous product of `components`, each a
/// language over its own sub-alphabet, in lexicographic order.
///
/// Words are built symbol by symbol while a cursor per component tracks the
/// projection read so far, so inverse projections are never materialised.
pub fn visit_sync_product<F>(n_symbols: usize, components: &[(SymSet, &BTreeSet<Word>)], mut visit: F) -> Result<()>
where
    F: FnMut(&[Symbol]) -> ControlFlow<()>,
{
    let covered = components.iter().fold(SymSet::EMPTY, |a, (s, _)| a.union(*s));
    if covered != SymSet::prefix(n_symbols) {
        return Err(Error::InvalidInput(
            "component alphabets do not cover the alphabet".into(),
        ));
    }
    let tries: Vec<Trie> = components.iter().map(|(_, l)| Trie::build(l.iter())).collect();
    if components.iter().any(|(_, l)| l.is_empty()) {
        return Ok(());
    }
    let alphs: Vec<SymSet> = components.iter().map(|(s, _)| *s).collect();
    let mut cursor = vec![0usize; tries.len()];
    let mut word = Vec::new();
    let _ = product_rec(&tries, &alphs, n_symbols, &mut cursor, &mut word, &mut visit);
    Ok(())
}

fn product_rec<F>(
    tries: &[Trie],
    alphs: &[SymSet],
    n_symbols: usize,
    cursor: &mut Vec<usize>,
    word: &mut Word,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[Symbol]) -> ControlFlow<()>,
{
    if tries.iter().zip(cursor.iter()).all(|(t, &c)| t.terminal[c]) {
        visit(word)?;
    }
    for s in 0..n_symbols as Symbol {
        let saved = cursor.clone();
        let mut ok = true;
        for (k, t) in tries.iter().enumerate() {
            if alphs[k].contains(s) {
                match t.step(cursor[k], s) {
                    Some(next) => cursor[k] = next,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if ok {
            word.push(s);
            let r = product_rec(tries, alphs, n_symbols, cursor, word, visit);
            word.pop();
            r?;
        }
        cursor.copy_from_slice(&saved);
    }
    ControlFlow::Continue(())
}

/// Synchronous product of component languages over `alphabet`.
pub fn sync_product(
    alphabet: &Arc<Alphabet>,
    components: &[(SymSet, &BTreeSet<Word>)],
    max_words: usize,
) -> Result<FiniteLanguage> {
    let mut words = BTreeSet::new();
    let mut over = false;
    visit_sync_product(alphabet.len(), components, |w| {
        if words.len() >= max_words {
            over = true;
            return ControlFlow::Break(());
        }
        words.insert(w.to_vec());
        ControlFlow::Continue(())
    })?;
    if over {
        return Err(Error::CapacityExceeded { limit: max_words });
    }
    Ok(FiniteLanguage {
        alphabet: alphabet.clone(),
        words,
    })
}

fn projections(l: &FiniteLanguage, d: &Distribution) -> Vec<(SymSet, BTreeSet<Word>)> {
    d.parts()
        .iter()
        .map(|&p| (p, l.project(p).words))
        .collect()
}

/// `L^Δ`: the synchronous product of the projections of `L` onto the parts.
pub fn decomposition_closure(l: &FiniteLanguage, d: &Distribution, max_words: usize) -> Result<FiniteLanguage> {
    let projs = projections(l, d);
    let comps: Vec<(SymSet, &BTreeSet<Word>)> = projs.iter().map(|(s, w)| (*s, w)).collect();
    sync_product(&l.alphabet, &comps, max_words)
}

/// A word of `L^Δ` outside `L`, if any. The search stops at the first one.
pub fn decomposability_witness(l: &FiniteLanguage, d: &Distribution) -> Result<Option<Word>> {
    let projs = projections(l, d);
    let comps: Vec<(SymSet, &BTreeSet<Word>)> = projs.iter().map(|(s, w)| (*s, w)).collect();
    let mut witness = None;
    visit_sync_product(l.alphabet.len(), &comps, |w| {
        if l.words.contains(w) {
            ControlFlow::Continue(())
        } else {
            witness = Some(w.to_vec());
            ControlFlow::Break(())
        }
    })?;
    Ok(witness)
}

/// `L = L^Δ`. Since `L ⊆ L^Δ` always holds, this looks for a word of the
/// product outside `L`, with no intermediate materialisation.
pub fn is_decomposable(l: &FiniteLanguage, d: &Distribution) -> Result<bool> {
    Ok(decomposability_witness(l, d)?.is_none())
}

/// Closure of `L` under swapping adjacent independent symbols.
pub fn trace_closure(l: &FiniteLanguage, indep: &Relation, max_words: usize) -> Result<FiniteLanguage> {
    let mut words = l.words.clone();
    let mut queue: VecDeque<Word> = words.iter().cloned().collect();
    while let Some(w) = queue.pop_front() {
        for i in 0..w.len().saturating_sub(1) {
            if w[i] != w[i + 1] && indep.contains(w[i], w[i + 1]) {
                let mut v = w.clone();
                v.swap(i, i + 1);
                if !words.contains(&v) {
                    if words.len() >= max_words {
                        return Err(Error::CapacityExceeded { limit: max_words });
                    }
                    words.insert(v.clone());
                    queue.push_back(v);
                }
            }
        }
    }
    Ok(FiniteLanguage {
        alphabet: l.alphabet.clone(),
        words,
    })
}

/// Every single independent swap stays inside `L`.
pub fn is_trace_closed(l: &FiniteLanguage, indep: &Relation) -> bool {
    l.words.iter().all(|w| {
        (0..w.len().saturating_sub(1)).all(|i| {
            if w[i] != w[i + 1] && indep.contains(w[i], w[i + 1]) {
                let mut v = w.clone();
                v.swap(i, i + 1);
                l.words.contains(&v)
            } else {
                true
            }
        })
    })
}

/// Trace equivalence: equal projections onto every pair of dependent
/// symbols (including each symbol with itself).
pub fn trace_equivalent(w1: &[Symbol], w2: &[Symbol], indep: &Relation, n_symbols: usize) -> bool {
    for a in 0..n_symbols as Symbol {
        for b in a..n_symbols as Symbol {
            if a == b || !indep.contains(a, b) {
                let pair = SymSet::from_iter([a, b]);
                if project(w1, pair) != project(w2, pair) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lang(sigma: &Arc<Alphabet>, ws: &[&str]) -> FiniteLanguage {
        FiniteLanguage::parse_words(sigma.clone(), ws.iter().copied()).unwrap()
    }

    #[test]
    fn shuffle_examples() {
        let sigma = Alphabet::from_chars("abcd").unwrap();
        let w = |s: &str| sigma.parse_word(s).unwrap();
        let got = shuffle(&w("abb"), &w("a"));
        let want: BTreeSet<Word> = ["aabb", "abab", "abba"].iter().map(|s| w(s)).collect();
        assert_eq!(got, want);
        assert_eq!(shuffle(&w("abc"), &[]), BTreeSet::from([w("abc")]));
        assert_eq!(shuffle(&w("ab"), &w("cd")).len(), 6);
    }

    #[test]
    fn projection_examples() {
        let sigma = Alphabet::from_chars("abc").unwrap();
        let w = |s: &str| sigma.parse_word(s).unwrap();
        let ab = sigma.parse_set("ab").unwrap();
        assert_eq!(project(&w("bac"), ab), w("ba"));
        assert_eq!(project(&w("bac"), sigma.full()), w("bac"));
        assert!(project(&w("ccc"), ab).is_empty());
    }

    #[test]
    fn product_examples() {
        let sigma = Alphabet::from_chars("abc").unwrap();
        let ab = sigma.parse_set("ab").unwrap();
        let c = sigma.parse_set("c").unwrap();
        let l1 = lang(&sigma, &["ab"]).words;
        let l2 = lang(&sigma, &["c"]).words;
        let p = sync_product(&sigma, &[(ab, &l1), (c, &l2)], DEFAULT_MAX_WORDS).unwrap();
        assert_eq!(p, lang(&sigma, &["abc", "acb", "cab"]));
        let full = sigma.full();
        let x = lang(&sigma, &["ab"]).words;
        let y = lang(&sigma, &["ba"]).words;
        assert!(sync_product(&sigma, &[(full, &x), (full, &y)], DEFAULT_MAX_WORDS)
            .unwrap()
            .is_empty());
        let too_many = sync_product(&sigma, &[(ab, &l1), (c, &l2)], 2);
        assert_eq!(too_many, Err(Error::CapacityExceeded { limit: 2 }));
    }

    #[test]
    fn closure_and_decomposability() {
        let sigma = Alphabet::from_chars("abc").unwrap();
        let d = Distribution::parse(sigma.clone(), "ab|bc").unwrap();
        let l = lang(&sigma, &["abc"]);
        assert_eq!(decomposition_closure(&l, &d, DEFAULT_MAX_WORDS).unwrap(), l);
        let l2 = lang(&sigma, &["ab", "cb"]);
        // Projections {ab, b} and {b, cb} also admit "b".
        assert!(!is_decomposable(&l2, &d).unwrap());
        let triv = Distribution::trivial(sigma.clone());
        assert!(is_decomposable(&l2, &triv).unwrap());
        let empty = FiniteLanguage::empty(sigma.clone());
        assert!(decomposition_closure(&empty, &d, 10).unwrap().is_empty());
        let eps = lang(&sigma, &["epsilon"]);
        assert_eq!(decomposition_closure(&eps, &d, 10).unwrap(), eps);
    }

    #[test]
    fn trace_examples() {
        let sigma = Alphabet::from_chars("abc").unwrap();
        let d = Distribution::parse(sigma.clone(), "ab|c").unwrap();
        let indep = d.independence();
        let l = lang(&sigma, &["bac", "cba", "bca"]);
        assert!(is_trace_closed(&l, &indep));
        assert_eq!(trace_closure(&l, &indep, 100).unwrap(), l);
        let w = |s: &str| sigma.parse_word(s).unwrap();
        assert!(trace_equivalent(&w("bac"), &w("cba"), &indep, 3));
        assert!(!trace_equivalent(&w("bac"), &w("abc"), &indep, 3));
        let none = Distribution::trivial(sigma.clone()).independence();
        assert_eq!(trace_closure(&l, &none, 100).unwrap(), l);
    }
}
