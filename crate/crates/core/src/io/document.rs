use serde::Serialize;
use serde_json::{json, Value};

use crate::counterexample::{MemberCheck, ParikhUnion, RefutationEvidence, VectorView};
use crate::distribution::Distribution;
use crate::generator::{GenerateOutcome, Generated};
use crate::verifier::{Diagnostics, Evidence, SaturationReport, Verdict};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Wall-clock data. Excluded from any comparison between runs.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub total_ms: f64,
}

/// Top-level JSON output of every command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultDocument {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mechanism: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub candidate: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    pub timings: Timings,
}

impl ResultDocument {
    pub fn new(command: &str) -> Self {
        ResultDocument {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION,
            command: command.to_string(),
            source: None,
            verdict: None,
            mechanism: None,
            candidate: Vec::new(),
            evidence: None,
            diagnostics: None,
            result: None,
            timings: Timings::default(),
        }
    }

    pub fn from_verdict(command: &str, v: &Verdict) -> Self {
        let mut doc = ResultDocument::new(command);
        doc.source = Some(v.source.render());
        doc.verdict = Some(v.outcome.label().to_string());
        doc.mechanism = v.mechanism.map(|m| m.label().to_string());
        doc.candidate = v.candidate.iter().map(Distribution::render).collect();
        doc.evidence = v.evidence.as_ref().map(evidence_json);
        doc.diagnostics = Some(diagnostics_json(&v.diagnostics));
        doc
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialisable")
    }
}

/// JSON value with the `timings` field removed, for run-to-run comparison.
pub fn without_timings(doc: &str) -> Option<Value> {
    let mut v: Value = serde_json::from_str(doc).ok()?;
    v.as_object_mut()?.remove("timings");
    Some(v)
}

pub fn evidence_json(e: &Evidence) -> Value {
    match e {
        Evidence::MeetMismatch { meet } => json!({ "kind": "meet-mismatch", "meet": meet.render() }),
        Evidence::Refutation(r) => refutation_json(r),
        Evidence::Proof { trace, upward } => json!({
            "kind": if *upward { "strengthened-proof" } else { "proof" },
            "trace": trace.to_view(),
        }),
        Evidence::NoMerges => json!({ "kind": "no-merges" }),
        Evidence::StructuralNoReduction => json!({ "kind": "structural-no-reduction" }),
    }
}

pub fn lcand_json(l: &ParikhUnion) -> Value {
    let a = l.alphabet();
    Value::Array(
        l.classes()
            .iter()
            .map(|v| serde_json::to_value(VectorView::new(v, a)).expect("serialisable"))
            .collect(),
    )
}

fn member_json(m: &MemberCheck) -> Value {
    let a = m.member.alphabet();
    json!({
        "member": m.member.render(),
        "decomposable": m.decomposable(),
        "rule": m.rule.map(|r| r.label()),
        "certifying_part": m.certifying_part.map(|p| a.render_set(p)),
        "witness": m.witness.as_ref().map(|w| VectorView::new(w, a)),
    })
}

fn refutation_json(r: &RefutationEvidence) -> Value {
    let a = r.lcand.alphabet();
    json!({
        "kind": "lcand",
        "lcand": lcand_json(&r.lcand),
        "certificates": r.members.iter().map(member_json).collect::<Vec<_>>(),
        "source_witness": VectorView::new(&r.source_witness, a),
    })
}

fn saturation_json(s: &SaturationReport) -> Value {
    json!({ "premises": s.premises, "outcome": s.outcome, "derived": s.derived })
}

pub fn diagnostics_json(d: &Diagnostics) -> Value {
    json!({
        "meet": d.meet.as_ref().map(Distribution::render),
        "lcand": d.lcand.iter().map(member_json).collect::<Vec<_>>(),
        "saturation": d.saturation.as_ref().map(saturation_json),
        "strengthened": d.strengthened.as_ref().map(saturation_json),
        "no_reduction_check": d.no_reduction_check,
        "notes": d.notes,
    })
}

fn generated_json(g: &Generated, winner: bool) -> Value {
    json!({
        "members": g.candidate.members().iter().map(Distribution::render).collect::<Vec<_>>(),
        "dimension": { "height": g.dimension.height, "width": g.dimension.width },
        "mechanism": g.verdict.mechanism.map(|m| m.label()),
        "trace": g.verdict.trace().map(|t| t.to_view()),
        "optimal": winner,
    })
}

/// Index of the best entry by (width, height); first wins ties.
pub fn optimality_winner(found: &[Generated]) -> Option<usize> {
    (0..found.len()).min_by_key(|&i| (found[i].dimension.width, found[i].dimension.height, i))
}

pub fn generate_document(command: &str, source: &Distribution, out: &GenerateOutcome) -> ResultDocument {
    match out {
        GenerateOutcome::NoReduction(v) => {
            let mut doc = ResultDocument::from_verdict(command, v);
            doc.candidate.clear();
            doc
        }
        GenerateOutcome::Found(found) => {
            let mut doc = ResultDocument::new(command);
            doc.source = Some(source.render());
            doc.verdict = Some("valid-reduction".into());
            let win = optimality_winner(found);
            if let Some(w) = win {
                doc.mechanism = found[w].verdict.mechanism.map(|m| m.label().to_string());
                doc.candidate = found[w].candidate.members().iter().map(Distribution::render).collect();
            }
            let list: Vec<Value> = found.iter().enumerate().map(|(i, g)| generated_json(g, Some(i) == win)).collect();
            doc.result = Some(json!({ "reductions": list }));
            doc
        }
        GenerateOutcome::Exhausted {
            candidates_tested,
            nodes,
            budget_hit,
        } => {
            let mut doc = ResultDocument::new(command);
            doc.source = Some(source.render());
            doc.verdict = Some("unknown".into());
            doc.result = Some(json!({
                "candidates_tested": candidates_tested,
                "nodes": nodes,
                "budget_hit": budget_hit,
            }));
            doc
        }
    }
}
