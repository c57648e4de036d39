//! Seeded property suites. Each returns a one-line summary or the first
//! violation found.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use distred::candidate::{cr_join, cr_meet, CandidateReduction};
use distred::counterexample::{build_lcand, parikh_decomposable};
use distred::language::{decomposition_closure, is_decomposable, is_trace_closed, FiniteLanguage};
use distred::merge::{all_merges, DEFAULT_MERGE_CAP};
use distred::sample::{random_distribution, random_language, standard_alphabet};
use distred::structural::Analyzer;
use distred::substitution::{substitutable, substitute};
use distred::{Distribution, SymSet};

use super::{
    all_antichains, all_distributions, brute_glb, brute_independence, brute_lub, cover_mask, leq, leq_family,
    pair_subsets,
};

pub type Outcome = Result<String, String>;

fn fail<T>(msg: String) -> Result<T, String> {
    Err(msg)
}

/// Lattice laws and glb/lub on `Δ(Σ)` for `|Σ| ≤ 4`, then `≤_Δ`, meet and
/// join on the candidates of small sources.
pub fn lattice_laws(seed: u64) -> Outcome {
    let mut pairs = 0usize;
    for n in 1..=4 {
        let sigma = standard_alphabet(n);
        let all = all_distributions(&sigma);
        for a in &all {
            if a.leq(a) != leq(a, a) || !a.leq(a) {
                return fail(format!("reflexivity fails on {a}"));
            }
            for b in &all {
                pairs += 1;
                if a.leq(b) != leq(a, b) {
                    return fail(format!("order disagrees on {a}, {b}"));
                }
                let (m, j) = (a.meet(b), a.join(b));
                if Some(&m) != brute_glb(&all, a, b) {
                    return fail(format!("meet of {a} and {b} is {m}"));
                }
                if Some(&j) != brute_lub(&all, a, b) {
                    return fail(format!("join of {a} and {b} is {j}"));
                }
                if m != b.meet(a) || j != b.join(a) || a.meet(&j) != *a || a.join(&m) != *a {
                    return fail(format!("commutativity or absorption fails on {a}, {b}"));
                }
            }
        }
        if n <= 3 {
            for a in &all {
                for b in &all {
                    for c in &all {
                        if a.meet(b).meet(c) != a.meet(&b.meet(c)) || a.join(b).join(c) != a.join(&b.join(c)) {
                            return fail(format!("associativity fails on {a}, {b}, {c}"));
                        }
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = standard_alphabet(4);
    let all = all_distributions(&sigma);
    for _ in 0..5_000 {
        let (a, b, c) = (all.choose(&mut rng).unwrap(), all.choose(&mut rng).unwrap(), all.choose(&mut rng).unwrap());
        if a.meet(b).meet(c) != a.meet(&b.meet(c)) || a.join(b).join(c) != a.join(&b.join(c)) {
            return fail(format!("associativity fails on {a}, {b}, {c}"));
        }
    }

    let mut fam_pairs = 0usize;
    for text in ["ab|bc|cd|de", "ab|bc|ca", "ab|bc|cd|da", "abc|cd|de", "ab|bc|cd|ac"] {
        let letters: String = {
            let mut v: Vec<char> = text.chars().filter(|c| c.is_alphabetic()).collect();
            v.sort();
            v.dedup();
            v.into_iter().collect()
        };
        let sigma = distred::Alphabet::from_chars(&letters).unwrap();
        let src = Distribution::parse(sigma, text).unwrap();
        let merges = all_merges(&src, DEFAULT_MERGE_CAP).unwrap();
        let families = all_antichains(&merges);
        let cands: Vec<CandidateReduction> = families
            .iter()
            .map(|f| CandidateReduction::new(src.clone(), f.clone()).unwrap())
            .collect();
        let tries = if families.len() <= 60 { families.len() * families.len() } else { 400 };
        for t in 0..tries {
            let (i, k) = if families.len() <= 60 {
                (t / families.len(), t % families.len())
            } else {
                (rng.gen_range(0..families.len()), rng.gen_range(0..families.len()))
            };
            fam_pairs += 1;
            let (p, q) = (&cands[i], &cands[k]);
            let lib_leq = distred::candidate::leq_delta(p, q).unwrap();
            if lib_leq != leq_family(&families[i], &families[k]) {
                return fail(format!("candidate order disagrees on {p:?}, {q:?}"));
            }
            let lower: Vec<&Vec<Distribution>> = families
                .iter()
                .filter(|f| leq_family(f, &families[i]) && leq_family(f, &families[k]))
                .collect();
            let glb = lower.iter().find(|g| lower.iter().all(|x| leq_family(x, g)));
            let upper: Vec<&Vec<Distribution>> = families
                .iter()
                .filter(|f| leq_family(&families[i], f) && leq_family(&families[k], f))
                .collect();
            let lub = upper.iter().find(|g| upper.iter().all(|x| leq_family(g, x)));
            let m = cr_meet(p, q).unwrap();
            let j = cr_join(p, q, DEFAULT_MERGE_CAP).unwrap();
            if glb.map(|g| g.as_slice()) != Some(m.members()) {
                return fail(format!("candidate meet of {p:?} and {q:?} is {m:?}"));
            }
            if lub.map(|g| g.as_slice()) != Some(j.members()) {
                return fail(format!("candidate join of {p:?} and {q:?} is {j:?}"));
            }
        }
    }
    Ok(format!("{pairs} distribution pairs, {fam_pairs} candidate pairs"))
}

/// Independence of a meet is the union of the independences, on random pairs.
pub fn independence_of_meet(seed: u64, count: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let n = rng.gen_range(2..=8);
        let sigma = standard_alphabet(n);
        let a = {
            let k = rng.gen_range(1..=5);
            random_distribution(&mut rng, &sigma, k)
        };
        let b = {
            let k = rng.gen_range(1..=5);
            random_distribution(&mut rng, &sigma, k)
        };
        let mut want: Vec<(u8, u8)> = brute_independence(&a);
        want.extend(brute_independence(&b));
        want.sort();
        want.dedup();
        let got = a.meet(&b).independence().edges();
        if got != want {
            return fail(format!("independence of {a} meet {b}"));
        }
    }
    Ok(format!("{count} random pairs"))
}

/// A family's meet is `Δ` exactly when the sub-alphabets of size two or
/// more covered by every member are those covered by `Δ`. Checked through
/// the covered-set masks: the mask determines the distribution and the
/// mask of a meet is the intersection of the masks, which together give
/// the equivalence for families of any length.
pub fn meet_characterisation(max_n: usize) -> Outcome {
    let mut total = 0usize;
    for n in 1..=max_n {
        let sigma = standard_alphabet(n);
        let all = all_distributions(&sigma);
        let order = pair_subsets(n);
        let cmask: Vec<u64> = all.iter().map(|x| cover_mask(x, &order)).collect();
        let distinct: HashSet<u64> = cmask.iter().copied().collect();
        if distinct.len() != all.len() {
            return fail(format!("covered-set masks collide for |Σ| = {n}"));
        }
        let index: std::collections::HashMap<&Distribution, usize> = all.iter().enumerate().map(|(i, x)| (x, i)).collect();
        for i in 0..all.len() {
            for k in i..all.len() {
                let m = all[i].meet(&all[k]);
                let Some(&mi) = index.get(&m) else {
                    return fail(format!("meet {m} not a distribution"));
                };
                if cmask[mi] != cmask[i] & cmask[k] {
                    return fail(format!("covered sets of {} meet {} differ", all[i], all[k]));
                }
                total += 1;
            }
        }
    }
    Ok(format!("{total} unordered pairs for |Σ| ≤ {max_n}"))
}

/// Materialised `L_cand` is trace-closed and not decomposable.
pub fn lcand_template(seed: u64, count: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < count {
        attempts += 1;
        if attempts > 50 * count {
            return fail(format!("only {checked} small enough distributions drawn"));
        }
        let n = rng.gen_range(2..=4);
        let sigma = standard_alphabet(n);
        let d = {
            let k = rng.gen_range(2..=4);
            random_distribution(&mut rng, &sigma, k)
        };
        if d.size() < 2 {
            continue;
        }
        let l = build_lcand(&d);
        if l.word_count() > 20_000 {
            continue;
        }
        let words = l.materialize(20_000).map_err(|e| e.to_string())?;
        if !is_trace_closed(&words, &d.independence()) {
            return fail(format!("L_cand of {d} not trace-closed"));
        }
        if is_decomposable(&words, &d).map_err(|e| e.to_string())? {
            return fail(format!("L_cand of {d} decomposable"));
        }
        if parikh_decomposable(&l, &d) {
            return fail(format!("exponent oracle calls L_cand of {d} decomposable"));
        }
        checked += 1;
    }
    Ok(format!("{checked} distributions"))
}

/// Parts of two or three symbols, so that sizes reach five or six.
fn sparse_distribution(rng: &mut ChaCha8Rng, sigma: &std::sync::Arc<distred::Alphabet>) -> Distribution {
    let n = sigma.len();
    let k = rng.gen_range(3..=6);
    let mut sets: Vec<SymSet> = Vec::new();
    for _ in 0..k {
        let size = rng.gen_range(2..=3.min(n - 1));
        let mut s = SymSet::EMPTY;
        while s.len() < size {
            s.insert(rng.gen_range(0..n) as u8);
        }
        sets.push(s);
    }
    for s in sigma.symbols() {
        if !sets.iter().any(|p| p.contains(s)) {
            let i = rng.gen_range(0..sets.len());
            sets[i].insert(s);
        }
    }
    Distribution::from_maximal(sigma.clone(), sets)
}

/// A structural certificate is never issued where the exact oracle says
/// `L_cand` is not decomposable.
pub fn rule_soundness(seed: u64, count: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sources, mut merges, mut positive) = (0usize, 0usize, 0usize);
    while sources < count {
        let n = rng.gen_range(4..=7);
        let sigma = standard_alphabet(n);
        let d = sparse_distribution(&mut rng, &sigma);
        if d.size() < 3 {
            continue;
        }
        sources += 1;
        let l = build_lcand(&d);
        let mut an = Analyzer::new(&d);
        for m in all_merges(&d, DEFAULT_MERGE_CAP).map_err(|e| e.to_string())? {
            merges += 1;
            if let Some((rule, part)) = an.certify(&m) {
                positive += 1;
                if !parikh_decomposable(&l, &m) {
                    return fail(format!("{} certified {m} for {d} via {}", rule.label(), sigma.render_set(part)));
                }
            }
        }
    }
    Ok(format!("{sources} sources, {merges} merges, {positive} certified"))
}

/// Smallest superset decomposable with respect to both, if small.
fn close_under(l: FiniteLanguage, a: &Distribution, b: &Distribution) -> Option<FiniteLanguage> {
    let mut cur = l;
    for _ in 0..8 {
        let next = decomposition_closure(&cur, a, 5_000).ok()?;
        let next = decomposition_closure(&next, b, 5_000).ok()?;
        if next == cur {
            return Some(cur);
        }
        cur = next;
    }
    None
}

/// A language decomposable with respect to both operands of a
/// substitution is decomposable with respect to its result.
pub fn substitution_soundness(seed: u64, count: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < count {
        attempts += 1;
        if attempts > 100 * count {
            return fail(format!("only {checked} languages checked"));
        }
        let n = rng.gen_range(2..=4);
        let sigma = standard_alphabet(n);
        let left = {
            let k = rng.gen_range(2..=4);
            random_distribution(&mut rng, &sigma, k)
        };
        let right = {
            let k = rng.gen_range(2..=4);
            random_distribution(&mut rng, &sigma, k)
        };
        let Some(i) = (0..right.size()).find(|&i| substitutable(&left, &right, i)) else {
            continue;
        };
        let result = substitute(&left, &right, i).map_err(|e| e.to_string())?;
        let seed_lang = {
            let k = rng.gen_range(1..=4);
            random_language(&mut rng, &sigma, k, 3)
        };
        let Some(l) = close_under(seed_lang, &left, &right) else {
            continue;
        };
        if !is_decomposable(&l, &result).map_err(|e| e.to_string())? {
            return fail(format!("substituting {left} into part {i} of {right} gives {result}, not sound"));
        }
        checked += 1;
    }
    Ok(format!("{checked} languages"))
}
