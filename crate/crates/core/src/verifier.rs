//! Three-valued verification of candidate reductions.
//!
//! Steps, in order: the meet of the members must be the source; the
//! candidate counter-example must not be decomposable for every member;
//! substitution must derive the source from the members; failing that,
//! from every merge above some member. The first conclusive step decides.

use std::fmt;

use crate::candidate::CandidateReduction;
use crate::counterexample::{check_members, MemberCheck, RefutationEvidence};
use crate::distribution::{check_alphabets, meet_all, Distribution};
use crate::error::{Error, Result};
use crate::merge::{all_merges, is_merge_of, keep_minimal, minimal_merges, DEFAULT_MERGE_CAP};
use crate::structural::{Analyzer, CertRule};
use crate::substitution::{saturate, Budget, ProofTrace, SaturationOutcome};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    ValidReduction,
    NotReduction,
    Unknown,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::ValidReduction => "valid-reduction",
            Outcome::NotReduction => "not-reduction",
            Outcome::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// What decided the verdict.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Mechanism {
    /// The members' meet differs from the source.
    Meet,
    /// Counter-example, every member certified by the path-cover rule.
    LcandPathCover,
    /// Counter-example, some member needed the extent fixpoint.
    LcandExtent,
    /// Counter-example, some member needed the exact oracle.
    LcandOracle,
    Substitution,
    StrengthenedSubstitution,
    /// The source has no merges at all.
    NoMerges,
    /// Two-part unions of the source all have full extent.
    StructuralNoReduction,
}

impl Mechanism {
    pub fn label(self) -> &'static str {
        match self {
            Mechanism::Meet => "meet",
            Mechanism::LcandPathCover => "lcand-path-cover",
            Mechanism::LcandExtent => "lcand-extent",
            Mechanism::LcandOracle => "lcand-oracle",
            Mechanism::Substitution => "substitution",
            Mechanism::StrengthenedSubstitution => "strengthened-substitution",
            Mechanism::NoMerges => "no-merges",
            Mechanism::StructuralNoReduction => "structural-no-reduction",
        }
    }

    fn from_rule(rule: CertRule) -> Self {
        match rule {
            CertRule::PathCover | CertRule::SourcePathCover => Mechanism::LcandPathCover,
            CertRule::Extent => Mechanism::LcandExtent,
            CertRule::Oracle => Mechanism::LcandOracle,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    MeetMismatch { meet: Distribution },
    Refutation(RefutationEvidence),
    Proof { trace: ProofTrace, upward: bool },
    NoMerges,
    StructuralNoReduction,
}

/// Saturation run summary for diagnostics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationReport {
    pub premises: usize,
    pub outcome: &'static str,
    pub derived: Option<usize>,
}

impl SaturationReport {
    fn new(premises: usize, out: &SaturationOutcome) -> Self {
        SaturationReport {
            premises,
            outcome: out.label(),
            derived: match out {
                SaturationOutcome::Fixpoint { derived } | SaturationOutcome::BudgetExceeded { derived } => Some(*derived),
                SaturationOutcome::Derived(_) => None,
            },
        }
    }
}

/// Per-step information, filled for every step that ran.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub meet: Option<Distribution>,
    pub lcand: Vec<MemberCheck>,
    pub saturation: Option<SaturationReport>,
    pub strengthened: Option<SaturationReport>,
    pub no_reduction_check: Option<bool>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub source: Distribution,
    pub candidate: Vec<Distribution>,
    pub outcome: Outcome,
    pub mechanism: Option<Mechanism>,
    pub evidence: Option<Evidence>,
    pub diagnostics: Diagnostics,
}

impl Verdict {
    pub fn trace(&self) -> Option<&ProofTrace> {
        match &self.evidence {
            Some(Evidence::Proof { trace, .. }) => Some(trace),
            _ => None,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub merge_cap: usize,
    pub budget: Budget,
    /// Run the four steps on separate threads. The verdict is identical to
    /// the sequential one.
    pub parallel: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            merge_cap: DEFAULT_MERGE_CAP,
            budget: Budget::default(),
            parallel: false,
        }
    }
}

enum StepResult {
    Meet(Distribution),
    Lcand(Vec<MemberCheck>, Option<RefutationEvidence>),
    Saturation(usize, SaturationOutcome),
    Strengthened(std::result::Result<(usize, SaturationOutcome), String>),
}

fn step_meet(members: &[Distribution]) -> StepResult {
    StepResult::Meet(meet_all(members).expect("at least two members"))
}

fn step_lcand(source: &Distribution, members: &[Distribution]) -> StepResult {
    let (lcand, checks) = check_members(source, members);
    let refuted = checks.iter().all(MemberCheck::decomposable).then(|| RefutationEvidence {
        lcand,
        members: checks.clone(),
        source_witness: crate::counterexample::ExponentVector(vec![1; source.alphabet().len()]),
    });
    StepResult::Lcand(checks, refuted)
}

fn step_saturate(source: &Distribution, members: &[Distribution], budget: Budget) -> StepResult {
    StepResult::Saturation(members.len(), saturate(members, source, budget))
}

fn step_strengthened(source: &Distribution, members: &[Distribution], opts: &VerifyOptions) -> StepResult {
    let merges = match all_merges(source, opts.merge_cap) {
        Ok(m) => m,
        Err(e) => return StepResult::Strengthened(Err(e.to_string())),
    };
    let mut premises: Vec<Distribution> = merges
        .into_iter()
        .filter(|m| members.iter().any(|a| a.leq(m)))
        .collect();
    for m in members {
        if !premises.contains(m) {
            premises.push(m.clone());
        }
    }
    premises.sort();
    let n = premises.len();
    StepResult::Strengthened(Ok((n, saturate(&premises, source, opts.budget))))
}

/// Checks the shape constraints on a candidate and normalises it.
fn normalise(source: &Distribution, members: &[Distribution]) -> Result<Vec<Distribution>> {
    for m in members {
        check_alphabets(source, m)?;
    }
    let members = keep_minimal(members.iter().cloned());
    if members.len() < 2 {
        return Err(Error::MalformedCandidate(format!(
            "{} incomparable member(s) after normalisation; at least 2 required",
            members.len()
        )));
    }
    if let Some(m) = members.iter().find(|m| m.size() >= source.size()) {
        return Err(Error::MalformedCandidate(format!(
            "member {} has {} parts; the source has {}",
            m,
            m.size(),
            source.size()
        )));
    }
    Ok(members)
}

/// Runs the verification procedure on `members` as a candidate reduction
/// of `source`.
pub fn verify_reduction(source: &Distribution, members: &[Distribution], opts: &VerifyOptions) -> Result<Verdict> {
    let members = normalise(source, members)?;
    let results: Vec<StepResult> = if opts.parallel {
        std::thread::scope(|s| {
            let h1 = s.spawn(|| step_meet(&members));
            let h2 = s.spawn(|| step_lcand(source, &members));
            let h3 = s.spawn(|| step_saturate(source, &members, opts.budget));
            let h4 = s.spawn(|| step_strengthened(source, &members, opts));
            [h1, h2, h3, h4]
                .into_iter()
                .map(|h| h.join().expect("verification step panicked"))
                .collect()
        })
    } else {
        Vec::new()
    };
    Ok(assemble(source, members, opts, results))
}

/// Walks the steps in order, computing any step not supplied, and stops at
/// the first conclusive one.
fn assemble(source: &Distribution, members: Vec<Distribution>, opts: &VerifyOptions, precomputed: Vec<StepResult>) -> Verdict {
    let mut pre = precomputed.into_iter();
    let mut diag = Diagnostics::default();
    let verdict = |outcome, mechanism, evidence, diag: Diagnostics| Verdict {
        source: source.clone(),
        candidate: members.clone(),
        outcome,
        mechanism,
        evidence,
        diagnostics: diag,
    };

    let StepResult::Meet(meet) = pre.next().unwrap_or_else(|| step_meet(&members)) else {
        unreachable!()
    };
    diag.meet = Some(meet.clone());
    if &meet != source {
        return verdict(
            Outcome::NotReduction,
            Some(Mechanism::Meet),
            Some(Evidence::MeetMismatch { meet }),
            diag,
        );
    }

    let StepResult::Lcand(checks, refuted) = pre.next().unwrap_or_else(|| step_lcand(source, &members)) else {
        unreachable!()
    };
    diag.lcand = checks;
    if let Some(ev) = refuted {
        let mech = Mechanism::from_rule(ev.weakest_rule());
        return verdict(Outcome::NotReduction, Some(mech), Some(Evidence::Refutation(ev)), diag);
    }

    let StepResult::Saturation(n, out) = pre
        .next()
        .unwrap_or_else(|| step_saturate(source, &members, opts.budget))
    else {
        unreachable!()
    };
    diag.saturation = Some(SaturationReport::new(n, &out));
    if let SaturationOutcome::Derived(trace) = out {
        return verdict(
            Outcome::ValidReduction,
            Some(Mechanism::Substitution),
            Some(Evidence::Proof { trace, upward: false }),
            diag,
        );
    }

    let StepResult::Strengthened(res) = pre
        .next()
        .unwrap_or_else(|| step_strengthened(source, &members, opts))
    else {
        unreachable!()
    };
    match res {
        Ok((n, out)) => {
            diag.strengthened = Some(SaturationReport::new(n, &out));
            if let SaturationOutcome::Derived(trace) = out {
                return verdict(
                    Outcome::ValidReduction,
                    Some(Mechanism::StrengthenedSubstitution),
                    Some(Evidence::Proof { trace, upward: true }),
                    diag,
                );
            }
        }
        Err(msg) => diag.notes.push(format!("strengthened substitution skipped: {msg}")),
    }
    verdict(Outcome::Unknown, None, None, diag)
}

/// Runs only the two refutation steps. `Some` when the meet or the
/// counter-example already rules the candidate out.
pub fn refute_reduction(source: &Distribution, members: &[Distribution]) -> Result<Option<Verdict>> {
    let members = normalise(source, members)?;
    let mut diag = Diagnostics::default();
    let StepResult::Meet(meet) = step_meet(&members) else { unreachable!() };
    diag.meet = Some(meet.clone());
    let (mechanism, evidence) = if &meet != source {
        (Mechanism::Meet, Evidence::MeetMismatch { meet })
    } else {
        let StepResult::Lcand(checks, refuted) = step_lcand(source, &members) else { unreachable!() };
        diag.lcand = checks;
        match refuted {
            Some(ev) => (Mechanism::from_rule(ev.weakest_rule()), Evidence::Refutation(ev)),
            None => return Ok(None),
        }
    };
    Ok(Some(Verdict {
        source: source.clone(),
        candidate: members,
        outcome: Outcome::NotReduction,
        mechanism: Some(mechanism),
        evidence: Some(evidence),
        diagnostics: diag,
    }))
}

/// Verifies a candidate already in normal form.
pub fn verify_candidate(c: &CandidateReduction, opts: &VerifyOptions) -> Result<Verdict> {
    verify_reduction(c.source(), c.members(), opts)
}

/// Decides whether `source` has any reduction by verifying `[⊥(Δ)]`.
pub fn exists_reduction(source: &Distribution, opts: &VerifyOptions) -> Result<Verdict> {
    let bottom = keep_minimal(minimal_merges(source));
    let structural = Analyzer::new(source).no_reduction_check();
    let base = |outcome, mechanism, evidence, meet: Option<Distribution>| {
        let diagnostics = Diagnostics {
            meet,
            no_reduction_check: Some(structural),
            ..Diagnostics::default()
        };
        Verdict {
            source: source.clone(),
            candidate: bottom.clone(),
            outcome,
            mechanism,
            evidence,
            diagnostics,
        }
    };
    if bottom.is_empty() {
        return Ok(base(Outcome::NotReduction, Some(Mechanism::NoMerges), Some(Evidence::NoMerges), None));
    }
    if bottom.len() == 1 {
        let meet = bottom[0].clone();
        return Ok(base(
            Outcome::NotReduction,
            Some(Mechanism::Meet),
            Some(Evidence::MeetMismatch { meet: meet.clone() }),
            Some(meet),
        ));
    }
    let mut v = verify_reduction(source, &bottom, opts)?;
    v.diagnostics.no_reduction_check = Some(structural);
    if v.outcome == Outcome::Unknown && structural {
        v.outcome = Outcome::NotReduction;
        v.mechanism = Some(Mechanism::StructuralNoReduction);
        v.evidence = Some(Evidence::StructuralNoReduction);
    }
    Ok(v)
}

/// Treats `members` as a candidate reduction of their own meet.
pub fn is_reduction_of_some(members: &[Distribution], opts: &VerifyOptions) -> Result<Verdict> {
    let first = members
        .first()
        .ok_or_else(|| Error::MalformedCandidate("no members".into()))?;
    for m in members {
        check_alphabets(first, m)?;
    }
    let source = meet_all(members).expect("non-empty");
    verify_reduction(&source, members, opts)
}

/// Whether every member is a merge of the source.
pub fn all_merges_of(source: &Distribution, members: &[Distribution]) -> bool {
    members.iter().all(|m| is_merge_of(source, m))
}

/// `Some(true)` when no proper subset of at least two members verifies as
/// a reduction, `Some(false)` when one does, `None` when some subset is
/// undecided. Exponential; limited to six members.
pub fn is_compact(source: &Distribution, members: &[Distribution], opts: &VerifyOptions) -> Result<Option<bool>> {
    let members = normalise(source, members)?;
    let k = members.len();
    if k > 6 {
        return Err(Error::MalformedCandidate("compactness check limited to 6 members".into()));
    }
    let mut undecided = false;
    for mask in 1u32..(1 << k) - 1 {
        if mask.count_ones() < 2 {
            continue;
        }
        let subset: Vec<Distribution> = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| members[i].clone())
            .collect();
        match verify_reduction(source, &subset, opts)?.outcome {
            Outcome::ValidReduction => return Ok(Some(false)),
            Outcome::Unknown => undecided = true,
            Outcome::NotReduction => {}
        }
    }
    Ok(if undecided { None } else { Some(true) })
}
