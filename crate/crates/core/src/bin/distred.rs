use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use distred::counterexample::build_lcand_ordered;
use distred::generator::{incremental_generate, recursive_generate, Event, GenerateOptions, GenerateOutcome, DEFAULT_MAX_NODES, DEFAULT_VALIDATION_BUDGET};
use distred::io::{
    generate_document, lcand_json, parse_distribution_file, parse_json_distribution_file, parse_language_file,
    relation_dot, render_distribution_file, DistributionFile, ResultDocument,
};
use distred::language::{decomposability_witness, DEFAULT_MAX_WORDS};
use distred::merge::DEFAULT_MERGE_CAP;
use distred::sample::{random_distribution, standard_alphabet};
use distred::substitution::{Budget, ProofTrace, TraceView, DEFAULT_MAX_DERIVED};
use distred::verifier::{exists_reduction, verify_reduction, Outcome, VerifyOptions};
use distred::{Alphabet, Distribution, Error};

const EXIT_NOT: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 3;
const EXIT_INPUT: u8 = 4;
const EXIT_CAPACITY: u8 = 5;

/// Verify, refute and generate reductions of alphabet distributions.
///
/// Exit status: 0 valid / decomposable / success, 1 not a reduction / not
/// decomposable / no reduction, 2 unknown, 3 usage error, 4 parse or input
/// error, 5 capacity exceeded.
#[derive(Parser)]
#[command(name = "distred", version)]
struct Cli {
    /// Read distribution files as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Run verification steps concurrently. Results are unchanged.
    #[arg(long, global = true)]
    parallel: bool,
    /// Write the result document here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Largest source size for which all merges are enumerated.
    #[arg(long, global = true, env = "DISTRED_MERGE_CAP", default_value_t = DEFAULT_MERGE_CAP)]
    merge_cap: usize,
    /// Distributions derived before a substitution search gives up.
    #[arg(long, global = true, env = "DISTRED_SAT_BUDGET", default_value_t = DEFAULT_MAX_DERIVED)]
    sat_budget: usize,
    /// Word limit for materialised languages.
    #[arg(long, global = true, env = "DISTRED_MAX_WORDS", default_value_t = DEFAULT_MAX_WORDS)]
    max_words: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum Strategy {
    Incremental,
    Recursive,
}

#[derive(Copy, Clone, ValueEnum)]
enum GraphKind {
    Dep,
    Indep,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the distributions in CANDIDATE as a reduction of SOURCE.
    Verify { source: PathBuf, candidate: PathBuf },
    /// Decide whether SOURCE has any reduction.
    Exists { source: PathBuf },
    /// Search for a reduction of SOURCE.
    Reduce {
        source: PathBuf,
        #[arg(long, value_enum, default_value = "incremental")]
        strategy: Strategy,
        #[arg(long)]
        max_width: Option<usize>,
        /// Report every validated candidate found and mark the optimal one.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
        max_nodes: usize,
        /// Saturation limit for each candidate validated during the search.
        #[arg(long, default_value_t = DEFAULT_VALIDATION_BUDGET)]
        validation_budget: usize,
        /// Write search progress as JSON lines to this file (`-` for stderr).
        #[arg(long)]
        events: Option<PathBuf>,
    },
    /// Print the candidate counter-example of SOURCE, parts in written order.
    Lcand {
        source: PathBuf,
        /// Also list its words.
        #[arg(long)]
        materialize: bool,
    },
    /// Check whether the language in LANGUAGE is decomposable w.r.t. SOURCE.
    Decomposable { language: PathBuf, source: PathBuf },
    /// Print the dependence or independence graph of SOURCE.
    Graph {
        source: PathBuf,
        #[arg(long, value_enum, default_value = "indep")]
        kind: GraphKind,
        /// Print DOT instead of a result document.
        #[arg(long)]
        dot: bool,
    },
    /// Print random distributions as a distribution file.
    Sample {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        symbols: usize,
        #[arg(long, default_value_t = 4)]
        parts: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Replay a proof trace, given alone or inside a result document.
    Replay { trace: PathBuf },
}

enum Failure {
    Input(String),
    Capacity(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapacityExceeded { .. } | Error::SizeCapExceeded { .. } => Failure::Capacity(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path, json: bool) -> Result<DistributionFile, Failure> {
    let text = read(path)?;
    let parsed = if json {
        parse_json_distribution_file(&text)
    } else {
        parse_distribution_file(&text)
    };
    parsed.map_err(|e| Failure::Input(format!("{}:{e}", path.display())))
}

/// Re-reads `file`'s distributions over `alphabet`, which must have the
/// same symbol names.
fn rebase(file: &DistributionFile, alphabet: &Arc<Alphabet>) -> Result<Vec<Distribution>, Failure> {
    if file.alphabet.names() != alphabet.names() {
        return Err(Failure::Input("candidate and source alphabets differ".into()));
    }
    file.entries
        .iter()
        .map(|e| Distribution::new(alphabet.clone(), e.written.iter().copied()).map_err(Failure::from))
        .collect()
}

fn exit_for(outcome: Outcome) -> u8 {
    match outcome {
        Outcome::ValidReduction => 0,
        Outcome::NotReduction => EXIT_NOT,
        Outcome::Unknown => EXIT_UNKNOWN,
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Input(e.to_string()))
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let started = Instant::now();
    let verify = VerifyOptions {
        merge_cap: cli.merge_cap,
        budget: Budget {
            max_derived: cli.sat_budget,
            time_limit: None,
        },
        parallel: cli.parallel,
    };
    let (mut doc, code) = match &cli.command {
        Command::Verify { source, candidate } => {
            let src = load(source, cli.json)?;
            let src = src.single()?.distribution.clone();
            let members = rebase(&load(candidate, cli.json)?, src.alphabet())?;
            let v = verify_reduction(&src, &members, &verify)?;
            (ResultDocument::from_verdict("verify", &v), exit_for(v.outcome))
        }
        Command::Exists { source } => {
            let src = load(source, cli.json)?.single()?.distribution.clone();
            let v = exists_reduction(&src, &verify)?;
            (ResultDocument::from_verdict("exists", &v), exit_for(v.outcome))
        }
        Command::Reduce {
            source,
            strategy,
            max_width,
            all,
            max_nodes,
            validation_budget,
            events,
        } => {
            let src = load(source, cli.json)?.single()?.distribution.clone();
            let opts = GenerateOptions {
                verify,
                max_width: *max_width,
                max_nodes: *max_nodes,
                validation_budget: *validation_budget,
                collect_all: *all,
                ..GenerateOptions::default()
            };
            let mut writer: Option<Box<dyn Write>> = match events {
                None => None,
                Some(p) if p.as_os_str() == "-" => Some(Box::new(std::io::stderr())),
                Some(p) => Some(Box::new(
                    fs::File::create(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
                )),
            };
            let mut write_event = |e: &Event| {
                if let Some(w) = writer.as_mut() {
                    let _ = writeln!(w, "{}", serde_json::to_string(e).expect("serialisable"));
                }
            };
            let sink: Option<&mut dyn FnMut(&Event)> = if events.is_some() { Some(&mut write_event) } else { None };
            let out = match strategy {
                Strategy::Incremental => incremental_generate(&src, &opts, sink)?,
                Strategy::Recursive => recursive_generate(&src, &opts, sink)?,
            };
            let code = match &out {
                GenerateOutcome::Found(_) => 0,
                GenerateOutcome::NoReduction(_) => EXIT_NOT,
                GenerateOutcome::Exhausted { .. } => EXIT_UNKNOWN,
            };
            (generate_document("reduce", &src, &out), code)
        }
        Command::Lcand { source, materialize } => {
            let file = load(source, cli.json)?;
            let entry = file.single()?;
            let l = build_lcand_ordered(&file.alphabet, &entry.written);
            let mut doc = ResultDocument::new("lcand");
            doc.source = Some(entry.distribution.render());
            let mut result = json!({
                "classes": lcand_json(&l),
                "word_count": l.word_count().to_string(),
            });
            if *materialize {
                let words = l.materialize(cli.max_words)?;
                result["words"] = json!(words.render());
            }
            doc.result = Some(result);
            (doc, 0)
        }
        Command::Decomposable { language, source } => {
            let file = load(source, cli.json)?;
            let d = file.single()?.distribution.clone();
            let l = parse_language_file(file.alphabet.clone(), &read(language)?)
                .map_err(|e| Failure::Input(format!("{}:{e}", language.display())))?;
            let witness = decomposability_witness(&l, &d)?;
            let mut doc = ResultDocument::new("decomposable");
            doc.source = Some(d.render());
            doc.verdict = Some(if witness.is_none() { "decomposable" } else { "not-decomposable" }.into());
            doc.result = Some(json!({
                "words": l.len(),
                "witness": witness.as_ref().map(|w| file.alphabet.render_word(w)),
            }));
            (doc, if witness.is_none() { 0 } else { EXIT_NOT })
        }
        Command::Graph { source, kind, dot } => {
            let file = load(source, cli.json)?;
            let d = file.single()?.distribution.clone();
            let (name, rel) = match kind {
                GraphKind::Dep => ("dependence", d.dependence()),
                GraphKind::Indep => ("independence", d.independence()),
            };
            if *dot {
                emit(cli, &relation_dot(&file.alphabet, &rel, name))?;
                return Ok(0);
            }
            let edges: Vec<[&str; 2]> = rel
                .edges()
                .into_iter()
                .map(|(a, b)| [file.alphabet.name(a), file.alphabet.name(b)])
                .collect();
            let mut doc = ResultDocument::new("graph");
            doc.source = Some(d.render());
            doc.result = Some(json!({ "kind": name, "edges": edges }));
            (doc, 0)
        }
        Command::Sample {
            seed,
            symbols,
            parts,
            count,
        } => {
            if *symbols == 0 || *symbols > distred::symbols::MAX_SYMBOLS {
                return Err(Failure::Input(format!("symbol count must be in 1..={}", distred::symbols::MAX_SYMBOLS)));
            }
            let a = standard_alphabet(*symbols);
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let ds: Vec<Distribution> = (0..*count).map(|_| random_distribution(&mut rng, &a, *parts)).collect();
            emit(cli, &render_distribution_file(&a, &ds))?;
            return Ok(0);
        }
        Command::Replay { trace } => {
            let v: serde_json::Value =
                serde_json::from_str(&read(trace)?).map_err(|e| Failure::Input(format!("{}: {e}", trace.display())))?;
            let inner = v.pointer("/evidence/trace").cloned().unwrap_or(v);
            let view: TraceView = serde_json::from_value(inner).map_err(|e| Failure::Input(e.to_string()))?;
            let t = ProofTrace::from_view(&view)?;
            let mut doc = ResultDocument::new("replay");
            doc.source = Some(t.conclusion.render());
            let res = t.replay();
            doc.verdict = Some(if res.is_ok() { "replayed" } else { "rejected" }.into());
            doc.result = Some(json!({ "steps": t.steps.len(), "error": res.as_ref().err().map(|e| e.to_string()) }));
            (doc, if res.is_ok() { 0 } else { EXIT_NOT })
        }
    };
    doc.timings.total_ms = started.elapsed().as_secs_f64() * 1000.0;
    emit(cli, &(doc.to_json() + "\n"))?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Capacity(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CAPACITY)
        }
    }
}
