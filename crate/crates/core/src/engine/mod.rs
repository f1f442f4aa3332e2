//! Strategy application and the priority-driven rewriting loop.
//!
//! One step picks the first strategy (by priority, then declaration order)
//! with a pattern substitution whose checks pass and whose action yields a
//! well-formed entailment. Applied steps are never undone.

mod batch;
mod trace;

use std::collections::BTreeSet;

use log::debug;
use serde::{Deserialize, Serialize};

use crate::frontend::{Action, Check, Operation, Program, Strategy};
use crate::logic::*;
use crate::matcher::match_strategy;
use crate::smt::{self, Status};

pub use batch::{run_batch, Exec};
pub use trace::{replay, ReplayError, TraceError, TRACE_VERSION};

pub const DEFAULT_MAX_STEPS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideCondition {
    pub hypothesis_pures: Vec<PureFormula>,
    pub goal: PureFormula,
    pub status: Status,
    pub strategy: Ident,
    pub step_index: usize,
    /// The subset of `hypothesis_pures` the proof needed.
    pub used_hypotheses: Vec<PureFormula>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub strategy: Ident,
    /// Pattern bindings plus the fresh names picked by the action.
    pub substitution: Subst,
    pub side_conditions: Vec<SideCondition>,
    pub entailment_after: Entailment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Purified,
    FrameInferred,
    Stuck,
    StepLimit,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Purified => "Purified",
            Verdict::FrameInferred => "FrameInferred",
            Verdict::Stuck => "Stuck",
            Verdict::StepLimit => "StepLimit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    pub input: Entailment,
    pub steps: Vec<TraceStep>,
    pub verdict: Verdict,
    pub frame: Option<SymbolicHeap>,
}

impl ReductionTrace {
    pub fn final_entailment(&self) -> &Entailment {
        self.steps.last().map_or(&self.input, |s| &s.entailment_after)
    }

    pub fn strategy_names(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.strategy.as_str()).collect()
    }
}

/// Runs the checks of `s` under `sigma`. `None` if any check fails.
pub fn run_checks(s: &Strategy, sigma: &Subst, e: &Entailment, step_index: usize) -> Option<Vec<SideCondition>> {
    let mut out = Vec::new();
    for check in &s.checks {
        let p = check.formula().substitute(sigma);
        match check {
            Check::LeftAbsent(_) if e.lhs.contains_pure(&p) => return None,
            Check::RightAbsent(_) if e.rhs.contains_pure(&p) => return None,
            Check::LeftAbsent(_) | Check::RightAbsent(_) => {}
            Check::Infer(_) => {
                let hyps = e.lhs.pures().to_vec();
                let result = smt::infer(&hyps, &p);
                if !result.is_proven() {
                    debug!("{}: infer({p}) not proven", s.name);
                    return None;
                }
                out.push(SideCondition {
                    hypothesis_pures: hyps,
                    goal: p,
                    status: result.status,
                    strategy: s.name.clone(),
                    step_index,
                    used_hypotheses: result.used_hypotheses,
                });
            }
        }
    }
    Some(out)
}

fn names_of(e: &Entailment, into: &mut BTreeSet<Ident>) {
    into.extend(e.universals.iter().cloned());
    into.extend(e.existentials.iter().cloned());
    into.extend(e.lhs.free_vars());
    into.extend(e.rhs.free_vars());
}

/// Performs the action of `s` under `sigma`. Returns the new entailment and
/// `sigma` extended with the fresh names, or `None` if the action fails or
/// the result is ill-formed.
pub fn apply_action(s: &Strategy, sigma: &Subst, e: &Entailment) -> Option<(Entailment, Subst)> {
    let mut sigma = sigma.clone();
    let next = match &s.action {
        Action::Ops(ops) => {
            let mut cur = e.clone();
            for op in ops {
                match op {
                    Operation::Erase(side, f) => {
                        let f = f.substitute(&sigma);
                        if !cur.heap_mut(*side).remove(&f) {
                            debug!("{}: {} found no {f}", s.name, op.keyword());
                            return None;
                        }
                    }
                    Operation::Add(side, f) => cur.heap_mut(*side).insert(f.substitute(&sigma)),
                    Operation::ForallAdd(x) | Operation::ExistAdd(x) => {
                        let mut avoid = BTreeSet::new();
                        names_of(e, &mut avoid);
                        names_of(&cur, &mut avoid);
                        for t in sigma.values() {
                            avoid.extend(t.free_vars());
                        }
                        let fresh = fresh_name(x, &avoid);
                        if matches!(op, Operation::ForallAdd(_)) {
                            cur.universals.push(fresh.clone());
                        } else {
                            cur.existentials.push(fresh.clone());
                        }
                        sigma.insert(x.clone(), Term::Var(fresh));
                    }
                }
            }
            cur
        }
        Action::Instantiate(x, t) => {
            let v = sigma.get(x)?.as_var()?.to_string();
            let Some(pos) = e.existentials.iter().position(|y| *y == v) else {
                debug!("{}: `{v}` is not existential", s.name);
                return None;
            };
            let t = t.substitute(&sigma);
            let fv = t.free_vars();
            if fv.contains(&v) {
                debug!("{}: `{v}` occurs in {t}", s.name);
                return None;
            }
            let mut cur = e.clone();
            cur.existentials.remove(pos);
            if let Some(bad) = fv
                .iter()
                .find(|y| !cur.universals.contains(y) && !cur.existentials.contains(y))
            {
                debug!("{}: `{bad}` is not bound", s.name);
                return None;
            }
            let map = Subst::from([(v, t)]);
            cur.rhs = cur.rhs.substitute(&map);
            cur
        }
    };
    if !well_formed(&next) {
        debug!("{}: result is ill-formed: {next}", s.name);
        return None;
    }
    Some((next, sigma))
}

fn step_ordered(ordered: &[&Strategy], e: &Entailment, step_index: usize) -> Option<TraceStep> {
    for s in ordered {
        for m in match_strategy(s, e) {
            let Some(side_conditions) = run_checks(s, &m.bindings, e, step_index) else {
                continue;
            };
            if let Some((after, sigma)) = apply_action(s, &m.bindings, e) {
                return Some(TraceStep {
                    strategy: s.name.clone(),
                    substitution: sigma,
                    side_conditions,
                    entailment_after: after,
                });
            }
        }
    }
    None
}

/// The next step on `e`, if any strategy applies.
pub fn step(prog: &Program, e: &Entailment) -> Option<TraceStep> {
    step_ordered(&prog.ordered(), e, 0)
}

pub fn run(prog: &Program, e: &Entailment, max_steps: usize) -> ReductionTrace {
    let ordered = prog.ordered();
    let mut steps: Vec<TraceStep> = Vec::new();
    let mut limited = false;
    loop {
        let cur = steps.last().map_or(e, |s| &s.entailment_after);
        let Some(next) = step_ordered(&ordered, cur, steps.len()) else {
            break;
        };
        if steps.len() == max_steps {
            limited = true;
            break;
        }
        steps.push(next);
    }
    let last = steps.last().map_or(e, |s| &s.entailment_after);
    let (verdict, frame) = if limited {
        (Verdict::StepLimit, None)
    } else if last.is_purified() {
        (Verdict::Purified, None)
    } else if last.rhs.is_pure() {
        (Verdict::FrameInferred, Some(last.lhs.clone()))
    } else {
        (Verdict::Stuck, None)
    };
    ReductionTrace {
        input: e.clone(),
        steps,
        verdict,
        frame,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse_entailment, parse_signature, parse_strategies};

    fn sll() -> Signature {
        parse_signature("spatial lseg/3; spatial listrep/2; func app/2;").unwrap()
    }

    const LIST_LIB: &str = "strategy S0
priority : 1
left : lseg(?p, ?q, ?l1)
right : listrep(p, ?l2)
action :
  left_erase(lseg(p, q, l1));
  right_erase(listrep(p, l2));
  exist_add(l3);
  right_add(l2 == app(l1, l3));
  right_add(listrep(q, l3));

strategy S1
priority : 0
left : lseg(?p, ?q, ?l1)
right : lseg(p, q, ?l2)
right : listrep(q, ?l3)
action :
  left_erase(lseg(p, q, l1));
  right_erase(lseg(p, q, l2));
  right_add(l2 == l1);

strategy S2
priority : 1
left : listrep(?p, ?l1)
right : listrep(p, ?l2)
action :
  left_erase(listrep(p, l1));
  right_erase(listrep(p, l2));
  right_add(l2 == l1);
";

    fn prog() -> Program {
        parse_strategies(LIST_LIB, &sll()).unwrap()
    }

    fn ent(text: &str) -> Entailment {
        parse_entailment(text, &sll()).unwrap()
    }

    #[test]
    fn list_example_purifies() {
        let e = ent(
            "forall p q r l1 l2 l3, lseg(p, q, l1) * lseg(q, r, l2) * listrep(r, l3) \
                     |-- exists l4 l5, lseg(p, q, l4) * listrep(q, l5)",
        );
        let t = run(&prog(), &e, DEFAULT_MAX_STEPS);
        assert_eq!(t.strategy_names(), ["S1", "S0", "S2"]);
        assert_eq!(t.verdict, Verdict::Purified);
        let expect = ent("forall p q r l1 l2 l3, emp \
                          |-- exists l4 l5 l3'1, l4 == l1 && l5 == app(l2, l3'1) && l3'1 == l3");
        assert!(
            entailment_equiv(t.final_entailment(), &expect),
            "{}",
            t.final_entailment()
        );
    }

    #[test]
    fn s0_step_introduces_fresh_existential() {
        let e = ent("forall q r l1 l2 l3, lseg(q, r, l2) * listrep(r, l3) \
                     |-- exists l4 l5, listrep(q, l5) && l4 == l1");
        let s = step(&prog(), &e).unwrap();
        assert_eq!(s.strategy, "S0");
        assert_eq!(s.substitution["l3"], Term::var("l3'1"));
        let expect = ent("forall q r l1 l2 l3, listrep(r, l3) \
                          |-- exists l4 l5 l6, listrep(r, l6) && l4 == l1 && l5 == app(l2, l6)");
        assert!(entailment_equiv(&s.entailment_after, &expect));
    }

    #[test]
    fn cyclic_segment_is_stuck() {
        let e = ent("forall p q l1 l2, lseg(p, q, l1) * lseg(q, q, l2) |-- exists l3, lseg(p, q, l3)");
        let t = run(&prog(), &e, DEFAULT_MAX_STEPS);
        assert!(t.steps.is_empty());
        assert_eq!(t.verdict, Verdict::Stuck);
    }

    #[test]
    fn no_step_on_pure_or_empty() {
        let e = ent("forall l1 l2 l3, True |-- exists l4 l5 l6, l4 == l1 && l5 == app(l2, l6) && l6 == l3");
        assert!(step(&prog(), &e).is_none());
        let e = ent("forall p l, listrep(p, l) |-- listrep(p, l)");
        assert!(step(&Program::default(), &e).is_none());
    }

    #[test]
    fn instantiate_drops_binder() {
        let s = parse_strategies(
            "strategy S5\nright : exists x, ?x == ?y\naction : instantiate(x -> y);\n",
            &sll(),
        )
        .unwrap();
        let e = ent("forall v0, emp |-- exists v1, v1 == v0");
        let (after, _) = apply_action(
            &s.strategies[0],
            &Subst::from([("x".into(), Term::var("v1")), ("y".into(), Term::var("v0"))]),
            &e,
        )
        .unwrap();
        assert_eq!(after, ent("forall v0, emp |-- v0 == v0"));
        // target not existential
        let e = ent("forall v0 v1, emp |-- v1 == v0");
        assert_eq!(run(&s, &e, 10).steps.len(), 0);
        // occurs check
        let s = parse_strategies(
            "strategy I\nright : exists x, ?x == ?y\naction : instantiate(x -> y);\n",
            &sll(),
        )
        .unwrap();
        let e = ent("forall l, emp |-- exists a, a == app(a, l)");
        assert!(step(&s, &e).is_none());
    }

    #[test]
    fn erase_of_absent_formula_fails() {
        let s = parse_strategies(
            "strategy E\nleft : lseg(?p, ?q, ?l)\naction : left_erase(listrep(p, l));\n",
            &sll(),
        )
        .unwrap();
        let e = ent("forall p q l, lseg(p, q, l) |-- emp");
        let m = match_strategy(&s.strategies[0], &e).next().unwrap();
        assert!(apply_action(&s.strategies[0], &m.bindings, &e).is_none());
    }

    #[test]
    fn absence_check_blocks_reapplication() {
        let s = parse_strategies(
            "strategy N\npriority : 0\nleft : data_at(?p, ?v0)\nleft : data_at(?q, ?v1)\n\
             check : left_absent(p != q);\naction : left_add(p != q);\n",
            &sll(),
        )
        .unwrap();
        let e = ent("forall a b c x y z, data_at(a, x) * data_at(b, y) * data_at(c, z) |-- emp");
        let t = run(&s, &e, 100);
        assert_eq!(t.steps.len(), 6);
        assert_eq!(t.verdict, Verdict::FrameInferred);
    }

    #[test]
    fn step_limit() {
        let s = parse_strategies(
            "strategy Loop\nleft : data_at(?p, ?v)\naction : left_add(p == p);\n",
            &sll(),
        )
        .unwrap();
        let e = ent("forall a x, data_at(a, x) |-- emp");
        let t = run(&s, &e, 5);
        assert_eq!(t.steps.len(), 5);
        assert_eq!(t.verdict, Verdict::StepLimit);
        assert!(t.frame.is_none());
        // exactly at the bound with nothing further to do
        let t = run(
            &prog(),
            &ent("forall p l1, listrep(p, l1) |-- exists l2, listrep(p, l2)"),
            1,
        );
        assert_eq!(t.verdict, Verdict::Purified);
    }

    #[test]
    fn infer_records_side_conditions() {
        let sig = parse_signature("spatial store_array/4; spatial store_array_hole/5; func nth/2;").unwrap();
        let s = parse_strategies(
            "strategy S3
left : store_array(?p, ?x, ?y, ?l)
right : data_at(p + 4 * ?i, ?v)
check : infer(x <= i); infer(i < y);
action :
  left_erase(store_array(p, x, y, l));
  right_erase(data_at(p + 4 * i, v));
  left_add(store_array_hole(p, x, y, i, l));
  right_add(v == nth(i - x, l));
",
            &sig,
        )
        .unwrap();
        let e = parse_entailment(
            "forall i n p l, 0 <= i && i < n && store_array(p, 0, n, l) |-- exists v, data_at(p + 4 * i, v)",
            &sig,
        )
        .unwrap();
        let st = step(&s, &e).unwrap();
        assert_eq!(st.side_conditions.len(), 2);
        assert!(st.side_conditions.iter().all(|c| c.status == Status::Proven));
        assert_eq!(st.side_conditions[0].goal.to_string(), "0 <= i");
        let e = parse_entailment(
            "forall i n p l, i < n && store_array(p, 0, n, l) |-- exists v, data_at(p + 4 * i, v)",
            &sig,
        )
        .unwrap();
        assert!(step(&s, &e).is_none());
    }
}
