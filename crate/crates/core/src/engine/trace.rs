//! JSON form of reduction traces, and replay against a program.
//!
//! Document shape (version 1):
//!
//! ```text
//! { "version": 1,
//!   "runs": [ { "input": "<entailment>",
//!               "steps": [ { "strategy": "S0",
//!                            "substitution": { "p": "<term>", ... },
//!                            "side_conditions": [ { "goal": "<pure>", "status": "proven",
//!                                                   "hypotheses": ["<pure>", ...],
//!                                                   "used_hypotheses": ["<pure>", ...] } ],
//!                            "entailment_after": "<entailment>" } ],
//!               "verdict": "Purified" | "FrameInferred" | "Stuck" | "StepLimit",
//!               "frame": "<heap>" | null } ] }
//! ```
//!
//! All formulas are in the surface syntax and parse back under the
//! signature the run used.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{apply_action, run_checks, ReductionTrace, SideCondition, TraceStep, Verdict};
use crate::frontend::{parse_entailment, parse_heap, parse_pure, parse_term, ParseError, Program};
use crate::logic::{Entailment, Signature, Subst};
use crate::matcher::match_strategy;
use crate::smt::Status;

pub const TRACE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Document {
    version: u32,
    runs: Vec<Run>,
}

#[derive(Serialize, Deserialize)]
struct Run {
    input: String,
    steps: Vec<Step>,
    verdict: Verdict,
    frame: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct Step {
    strategy: String,
    substitution: BTreeMap<String, String>,
    side_conditions: Vec<Condition>,
    entailment_after: String,
}

#[derive(Serialize, Deserialize)]
struct Condition {
    goal: String,
    status: Status,
    hypotheses: Vec<String>,
    #[serde(default)]
    used_hypotheses: Vec<String>,
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("malformed trace document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported trace version {0}")]
    Version(u32),
    #[error("bad formula in trace: {0}")]
    Formula(#[from] ParseError),
}

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

impl ReductionTrace {
    fn to_run(&self) -> Run {
        Run {
            input: self.input.to_string(),
            steps: self
                .steps
                .iter()
                .map(|s| Step {
                    strategy: s.strategy.clone(),
                    substitution: s.substitution.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
                    side_conditions: s
                        .side_conditions
                        .iter()
                        .map(|c| Condition {
                            goal: c.goal.to_string(),
                            status: c.status,
                            hypotheses: strings(&c.hypothesis_pures),
                            used_hypotheses: strings(&c.used_hypotheses),
                        })
                        .collect(),
                    entailment_after: s.entailment_after.to_string(),
                })
                .collect(),
            verdict: self.verdict,
            frame: self.frame.as_ref().map(ToString::to_string),
        }
    }

    fn from_run(run: Run, sig: &Signature) -> Result<Self, TraceError> {
        let mut steps = Vec::new();
        for (index, s) in run.steps.into_iter().enumerate() {
            let mut substitution = Subst::new();
            for (k, v) in s.substitution {
                substitution.insert(k, parse_term(&v, sig)?);
            }
            let pures = |xs: Vec<String>| xs.iter().map(|h| parse_pure(h, sig)).collect::<Result<Vec<_>, _>>();
            let mut side_conditions = Vec::new();
            for c in s.side_conditions {
                side_conditions.push(SideCondition {
                    hypothesis_pures: pures(c.hypotheses)?,
                    goal: parse_pure(&c.goal, sig)?,
                    status: c.status,
                    strategy: s.strategy.clone(),
                    step_index: index,
                    used_hypotheses: pures(c.used_hypotheses)?,
                });
            }
            steps.push(TraceStep {
                strategy: s.strategy,
                substitution,
                side_conditions,
                entailment_after: parse_entailment(&s.entailment_after, sig)?,
            });
        }
        Ok(ReductionTrace {
            input: parse_entailment(&run.input, sig)?,
            steps,
            verdict: run.verdict,
            frame: run.frame.map(|f| parse_heap(&f, sig)).transpose()?,
        })
    }

    /// A version-1 document holding this single run.
    pub fn to_json(&self) -> String {
        ReductionTrace::to_json_all(std::slice::from_ref(self))
    }

    pub fn to_json_all(traces: &[ReductionTrace]) -> String {
        let doc = Document {
            version: TRACE_VERSION,
            runs: traces.iter().map(ReductionTrace::to_run).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("trace document serializes")
    }

    pub fn from_json(text: &str, sig: &Signature) -> Result<Vec<ReductionTrace>, TraceError> {
        let doc: Document = serde_json::from_str(text)?;
        if doc.version != TRACE_VERSION {
            return Err(TraceError::Version(doc.version));
        }
        doc.runs.into_iter().map(|r| ReductionTrace::from_run(r, sig)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step}: {reason}")]
pub struct ReplayError {
    pub step: usize,
    pub reason: String,
}

/// Re-derives every step of `trace` under `prog`: the recorded pattern
/// bindings must be a match, the checks must pass again, and the action
/// must reproduce the recorded entailment and fresh names.
pub fn replay(prog: &Program, trace: &ReductionTrace) -> Result<(), ReplayError> {
    let mut cur: &Entailment = &trace.input;
    for (i, st) in trace.steps.iter().enumerate() {
        let fail = |reason: String| ReplayError { step: i, reason };
        let s = prog
            .get(&st.strategy)
            .ok_or_else(|| fail(format!("unknown strategy `{}`", st.strategy)))?;
        let pattern_vars = s.pattern_vars();
        let m = match_strategy(s, cur)
            .find(|m| pattern_vars.iter().all(|v| m.bindings.get(v) == st.substitution.get(v)))
            .ok_or_else(|| fail("recorded substitution is not a match".into()))?;
        let conds = run_checks(s, &m.bindings, cur, i).ok_or_else(|| fail("checks no longer pass".into()))?;
        if conds.len() != st.side_conditions.len()
            || conds.iter().zip(&st.side_conditions).any(|(a, b)| a.goal != b.goal)
        {
            return Err(fail("side conditions differ".into()));
        }
        let (after, sigma) = apply_action(s, &m.bindings, cur).ok_or_else(|| fail("action fails".into()))?;
        if sigma != st.substitution {
            return Err(fail("fresh names differ".into()));
        }
        if after != st.entailment_after {
            return Err(fail(format!("expected {}, got {after}", st.entailment_after)));
        }
        cur = &st.entailment_after;
    }
    let consistent = match trace.verdict {
        Verdict::Purified => cur.is_purified(),
        Verdict::FrameInferred => cur.rhs.is_pure() && trace.frame.as_ref() == Some(&cur.lhs),
        Verdict::Stuck => !cur.rhs.is_pure(),
        Verdict::StepLimit => true,
    };
    let limit_ok = trace.verdict == Verdict::StepLimit || super::step(prog, cur).is_none();
    if !consistent || !limit_ok {
        return Err(ReplayError {
            step: trace.steps.len(),
            reason: format!("verdict {} does not fit the final entailment", trace.verdict.name()),
        });
    }
    Ok(())
}
