//! File formats: distribution files (text or JSON), language files, DOT
//! output, and the JSON result document.
//!
//! Distribution file grammar:
//!
//! ```text
//! file         = { line } ;
//! line         = [ directive ] [ "#" comment ] newline ;
//! directive    = alphabet | distribution ;
//! alphabet     = "alphabet:" name { ( "," | ws ) name } ;
//! distribution = "distribution:" part { part } ;
//! part         = "{" name { "," name } "}" ;
//! ```
//!
//! The alphabet line comes first. Parts keep their written order in
//! [`Entry::written`]; the distribution itself is canonical.

mod document;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use document::*;

use crate::distribution::{Distribution, Relation};
use crate::error::{Error, Result};
use crate::language::FiniteLanguage;
use crate::symbols::{Alphabet, SymSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    /// 1-based source line, 0 for JSON input.
    pub line: usize,
    pub written: Vec<SymSet>,
    pub distribution: Distribution,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributionFile {
    pub alphabet: Arc<Alphabet>,
    pub entries: Vec<Entry>,
}

impl DistributionFile {
    pub fn distributions(&self) -> Vec<Distribution> {
        self.entries.iter().map(|e| e.distribution.clone()).collect()
    }

    /// The single distribution of a source file.
    pub fn single(&self) -> Result<&Entry> {
        match self.entries.as_slice() {
            [e] => Ok(e),
            es => Err(Error::InvalidInput(format!(
                "expected exactly one distribution, found {}",
                es.len()
            ))),
        }
    }
}

/// Strips a trailing comment; `#` cannot occur in symbol names.
fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(a, _)| a)
}

fn column_of(line: &str, byte: usize) -> usize {
    line[..byte].chars().count() + 1
}

pub fn parse_distribution_file(text: &str) -> Result<DistributionFile> {
    let mut alphabet: Option<Arc<Alphabet>> = None;
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let body = strip_comment(raw);
        let trimmed = body.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let offset = body.len() - trimmed.len();
        if let Some(rest) = trimmed.strip_prefix("alphabet:") {
            if alphabet.is_some() {
                return Err(Error::parse(lineno, column_of(raw, offset), "second alphabet line"));
            }
            let names: Vec<&str> = rest
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .collect();
            let a = Alphabet::new(names.iter().copied())
                .map_err(|e| Error::parse(lineno, column_of(raw, offset), e.to_string()))?;
            alphabet = Some(a);
        } else if let Some(rest) = trimmed.strip_prefix("distribution:") {
            let Some(a) = &alphabet else {
                return Err(Error::parse(lineno, column_of(raw, offset), "distribution before alphabet line"));
            };
            let start = offset + "distribution:".len();
            let written = parse_parts(a, raw, rest, start, lineno)?;
            let distribution = Distribution::new(a.clone(), written.iter().copied())
                .map_err(|e| Error::parse(lineno, column_of(raw, offset), e.to_string()))?;
            entries.push(Entry {
                line: lineno,
                written,
                distribution,
            });
        } else {
            return Err(Error::parse(
                lineno,
                column_of(raw, offset),
                "expected `alphabet:` or `distribution:`",
            ));
        }
    }
    let alphabet = alphabet.ok_or_else(|| Error::parse(1, 1, "missing alphabet line"))?;
    if entries.is_empty() {
        return Err(Error::parse(text.lines().count().max(1), 1, "no distribution lines"));
    }
    Ok(DistributionFile { alphabet, entries })
}

/// Parses `{a,b} {b,c}`. `start` is the byte offset of `rest` in `raw`.
fn parse_parts(alphabet: &Alphabet, raw: &str, rest: &str, start: usize, lineno: usize) -> Result<Vec<SymSet>> {
    let mut parts = Vec::new();
    let mut pos = 0;
    let bytes = rest.as_bytes();
    let err = |at: usize, msg: String| Error::parse(lineno, column_of(raw, start + at), msg);
    loop {
        while pos < bytes.len() && (bytes[pos] as char).is_ascii_whitespace() {
            pos += 1;
        }
        if pos >= bytes.len() {
            break;
        }
        if bytes[pos] != b'{' {
            return Err(err(pos, "expected `{`".into()));
        }
        let open = pos;
        let close = rest[open..]
            .find('}')
            .map(|c| open + c)
            .ok_or_else(|| err(open, "unclosed `{`".into()))?;
        let inner = &rest[open + 1..close];
        if inner.contains('{') {
            return Err(err(open, "unclosed `{`".into()));
        }
        let mut set = SymSet::EMPTY;
        let mut tok_start = open + 1;
        for tok in inner.split(',') {
            let name = tok.trim();
            let lead = tok.len() - tok.trim_start().len();
            if name.is_empty() {
                if inner.trim().is_empty() {
                    return Err(err(open, "empty part `{}`".into()));
                }
                return Err(err(tok_start + lead, "missing symbol name".into()));
            }
            let s = alphabet
                .symbol(name)
                .ok_or_else(|| err(tok_start + lead, format!("unknown symbol `{name}`")))?;
            if set.contains(s) {
                return Err(err(tok_start + lead, format!("symbol `{name}` repeated in part")));
            }
            set.insert(s);
            tok_start += tok.len() + 1;
        }
        parts.push(set);
        pos = close + 1;
    }
    if parts.is_empty() {
        return Err(err(0, "distribution has no parts".into()));
    }
    Ok(parts)
}

/// JSON input: `{"alphabet": ["a", "b"], "distributions": [[["a"], ["b"]]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonDistributionFile {
    pub alphabet: Vec<String>,
    pub distributions: Vec<Vec<Vec<String>>>,
}

pub fn parse_json_distribution_file(text: &str) -> Result<DistributionFile> {
    let doc: JsonDistributionFile = serde_json::from_str(text)
        .map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))?;
    let alphabet = Alphabet::new(doc.alphabet.iter().cloned())?;
    let mut entries = Vec::new();
    for parts in &doc.distributions {
        let written = parts
            .iter()
            .map(|p| {
                if p.is_empty() {
                    return Err(Error::EmptyPart);
                }
                p.iter()
                    .map(|n| alphabet.symbol(n).ok_or_else(|| Error::UnknownSymbol(n.clone())))
                    .collect::<Result<SymSet>>()
            })
            .collect::<Result<Vec<_>>>()?;
        entries.push(Entry {
            line: 0,
            distribution: Distribution::new(alphabet.clone(), written.iter().copied())?,
            written,
        });
    }
    if entries.is_empty() {
        return Err(Error::InvalidInput("no distributions".into()));
    }
    Ok(DistributionFile { alphabet, entries })
}

pub fn to_json_file(alphabet: &Alphabet, ds: &[Distribution]) -> JsonDistributionFile {
    JsonDistributionFile {
        alphabet: alphabet.names().to_vec(),
        distributions: ds
            .iter()
            .map(|d| {
                d.parts()
                    .iter()
                    .map(|p| p.iter().map(|s| alphabet.name(s).to_string()).collect())
                    .collect()
            })
            .collect(),
    }
}

/// Canonical text form.
pub fn render_distribution_file(alphabet: &Alphabet, ds: &[Distribution]) -> String {
    let mut out = format!("alphabet: {}\n", alphabet.names().join(" "));
    for d in ds {
        let parts: Vec<String> = d.parts().iter().map(|&p| alphabet.render_set(p)).collect();
        out.push_str(&format!("distribution: {}\n", parts.join(" ")));
    }
    out
}

/// One word per line; `epsilon` is the empty word; `#` starts a comment.
pub fn parse_language_file(alphabet: Arc<Alphabet>, text: &str) -> Result<FiniteLanguage> {
    let mut words = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        let w = if body == "epsilon" {
            Vec::new()
        } else {
            alphabet
                .parse_word(body)
                .map_err(|e| Error::parse(idx + 1, column_of(raw, raw.len() - raw.trim_start().len()), e.to_string()))?
        };
        words.push(w);
    }
    FiniteLanguage::new(alphabet, words)
}

pub fn render_language(l: &FiniteLanguage) -> String {
    l.render().into_iter().map(|w| w + "\n").collect()
}

/// Undirected DOT graph of a symmetric relation, self-pairs omitted.
pub fn relation_dot(alphabet: &Alphabet, r: &Relation, name: &str) -> String {
    let mut out = format!("graph {name} {{\n");
    for s in alphabet.symbols() {
        out.push_str(&format!("  \"{}\";\n", alphabet.name(s)));
    }
    for (a, b) in r.edges() {
        out.push_str(&format!("  \"{}\" -- \"{}\";\n", alphabet.name(a), alphabet.name(b)));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX: &str = "# chain\nalphabet: a b c d e f\ndistribution: {a,b} {b,c} {d,e} {e,f}  # source\n";

    #[test]
    fn parses_and_round_trips() {
        let f = parse_distribution_file(EX).unwrap();
        assert_eq!(f.entries.len(), 1);
        assert_eq!(f.entries[0].line, 3);
        let text = render_distribution_file(&f.alphabet, &f.distributions());
        assert_eq!(text, "alphabet: a b c d e f\ndistribution: {a,b} {b,c} {d,e} {e,f}\n");
        assert_eq!(parse_distribution_file(&text).unwrap().distributions(), f.distributions());
    }

    #[test]
    fn keeps_written_order() {
        let f = parse_distribution_file("alphabet: a b c\ndistribution: {b,c} {a,b}\n").unwrap();
        let a = &f.alphabet;
        assert_eq!(f.entries[0].written, vec![a.parse_set("bc").unwrap(), a.parse_set("ab").unwrap()]);
        assert_eq!(f.entries[0].distribution.part(0), a.parse_set("ab").unwrap());
    }

    #[test]
    fn errors_have_positions() {
        let e = parse_distribution_file("alphabet: a b\ndistribution: {a} {}\n").unwrap_err();
        assert_eq!(e, Error::parse(2, 19, "empty part `{}`"));
        let e = parse_distribution_file("alphabet: a b\ndistribution: {a,x}\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, column: 18, .. }), "{e:?}");
        let e = parse_distribution_file("alphabet: a b\ndistribution: {a}\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_distribution_file("distribution: {a}\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, column: 1, .. }));
    }

    #[test]
    fn json_matches_text() {
        let f = parse_distribution_file(EX).unwrap();
        let j = serde_json::to_string(&to_json_file(&f.alphabet, &f.distributions())).unwrap();
        assert_eq!(parse_json_distribution_file(&j).unwrap().distributions(), f.distributions());
    }

    #[test]
    fn language_file() {
        let a = Alphabet::from_chars("ab").unwrap();
        let l = parse_language_file(a, "ab\n# c\nepsilon\nba\n").unwrap();
        assert_eq!(l.len(), 3);
        assert!(l.contains(&[]));
    }

    #[test]
    fn independence_dot() {
        let a = Alphabet::from_chars("abc").unwrap();
        let d = Distribution::parse(a.clone(), "ab|c").unwrap();
        let dot = relation_dot(&a, &d.independence(), "indep");
        assert!(dot.contains("\"a\" -- \"c\""));
        assert!(dot.contains("\"b\" -- \"c\""));
        assert_eq!(dot.matches("--").count(), 2);
    }
}
