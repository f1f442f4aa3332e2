//! Soundness conditions for strategies.
//!
//! The pattern atoms and `infer` checks are turned into virtual operations
//! in front of the action, the operation list is summarised into what each
//! side loses and gains, and the summary is read as a separation-logic
//! entailment whose validity implies the strategy is sound.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::frontend::{Action, Check, Operation, Program, Strategy};
use crate::logic::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SoundnessOp {
    Assume(PureFormula),
    Op(Operation),
}

/// `Assume(p)` for every `infer(p)`, then an erase/add pair per pattern,
/// then the action. `None` for instantiation strategies.
pub fn inject_virtual_ops(s: &Strategy) -> Option<Vec<SoundnessOp>> {
    let Action::Ops(ops) = &s.action else {
        return None;
    };
    let mut out: Vec<SoundnessOp> = s
        .checks
        .iter()
        .filter_map(|c| match c {
            Check::Infer(p) => Some(SoundnessOp::Assume(p.clone())),
            _ => None,
        })
        .collect();
    for pattern in &s.patterns {
        out.push(SoundnessOp::Op(Operation::Erase(pattern.side, pattern.atom.clone())));
        out.push(SoundnessOp::Op(Operation::Add(pattern.side, pattern.atom.clone())));
    }
    out.extend(ops.iter().cloned().map(SoundnessOp::Op));
    Some(out)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SoundnessAnalysis {
    pub vl_forall: Vec<Ident>,
    pub sc: Vec<PureFormula>,
    pub l_minus: Vec<Formula>,
    pub l_plus: Vec<Formula>,
    pub r_minus: Vec<Formula>,
    pub r_plus: Vec<Formula>,
    /// Variables occurring only in `r_plus` and `r_minus`.
    pub v: Vec<Ident>,
}

/// Summarises `ops`.
///
/// `variables` are the candidates for `v`; pass `None` to use every
/// variable that occurs in the operations.
pub fn analyze(ops: &[SoundnessOp], variables: Option<&[Ident]>) -> SoundnessAnalysis {
    let mut a = SoundnessAnalysis::default();
    for op in ops {
        match op {
            SoundnessOp::Assume(p) => a.sc.push(p.clone()),
            SoundnessOp::Op(Operation::ForallAdd(x)) => a.vl_forall.push(x.clone()),
            SoundnessOp::Op(Operation::ExistAdd(_)) => {}
            SoundnessOp::Op(Operation::Add(side, f)) => match side {
                Side::Left => a.l_plus.push(f.clone()),
                Side::Right => a.r_plus.push(f.clone()),
            },
            SoundnessOp::Op(Operation::Erase(side, f)) => {
                let (plus, minus) = match side {
                    Side::Left => (&mut a.l_plus, &mut a.l_minus),
                    Side::Right => (&mut a.r_plus, &mut a.r_minus),
                };
                match plus.iter().rposition(|g| g == f) {
                    Some(i) => {
                        plus.remove(i);
                    }
                    None => minus.push(f.clone()),
                }
            }
        }
    }
    let mut outside: BTreeSet<Ident> = a.vl_forall.iter().cloned().collect();
    outside.extend(a.sc.free_vars());
    outside.extend(a.l_minus.free_vars());
    outside.extend(a.l_plus.free_vars());
    let candidates: Option<BTreeSet<&Ident>> = variables.map(|vs| vs.iter().collect());
    for x in a.r_plus.vars_in_order().into_iter().chain(a.r_minus.vars_in_order()) {
        let allowed = candidates.as_ref().is_none_or(|c| c.contains(&x));
        if allowed && !outside.contains(&x) && !a.v.contains(&x) {
            a.v.push(x);
        }
    }
    a
}

/// Spatial members under `*`, pure ones under `&&`, the two joined by `&&`.
/// Nothing at all is `emp`.
fn group(fs: &[Formula]) -> Assertion {
    let mut spatial = Vec::new();
    let mut pure = Vec::new();
    for f in fs {
        match f {
            Formula::Spatial(s) => spatial.push(Assertion::spatial(s.clone())),
            Formula::Pure(p) => pure.push(Assertion::pure(p.clone())),
        }
    }
    match (spatial.is_empty(), pure.is_empty()) {
        (_, true) => Assertion::SepConj(spatial),
        (true, false) => Assertion::And(pure),
        (false, false) => {
            pure.insert(0, Assertion::SepConj(spatial));
            Assertion::And(pure)
        }
    }
}

impl SoundnessAnalysis {
    /// The unnormalised condition `sc && l- |-- exists vl, l+ * (forall v, r+ -* r-)`.
    pub fn raw_condition(&self) -> (Assertion, Assertion) {
        let mut hyp: Vec<Assertion> = self.sc.iter().cloned().map(Assertion::pure).collect();
        hyp.push(group(&self.l_minus));
        let wand = Assertion::forall(
            self.v.clone(),
            Assertion::wand(group(&self.r_plus), group(&self.r_minus)),
        );
        let concl = Assertion::exists(
            self.vl_forall.clone(),
            Assertion::SepConj(vec![group(&self.l_plus), wand]),
        );
        (Assertion::And(hyp), concl)
    }
}

/// `None` for instantiation strategies, which are sound by construction.
pub fn soundness_of(s: &Strategy) -> Option<SoundnessCondition> {
    let ops = inject_virtual_ops(s)?;
    let vars = s.variables();
    let a = analyze(&ops, Some(&vars));
    let (hyp, concl) = a.raw_condition();
    let bound: BTreeSet<&Ident> = a.vl_forall.iter().chain(&a.v).collect();
    Some(SoundnessCondition {
        hypothesis: normalize(&hyp),
        conclusion: normalize(&concl),
        free_vars: vars.iter().filter(|x| !bound.contains(x)).cloned().collect(),
    })
}

/// Conditions for every strategy in declaration order.
pub fn soundness_all(prog: &Program) -> Vec<(&Strategy, Option<SoundnessCondition>)> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        prog.strategies.par_iter().map(|s| (s, soundness_of(s))).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        prog.strategies.iter().map(|s| (s, soundness_of(s))).collect()
    }
}

/// One block per strategy:
///
/// ```text
/// soundness S0 :
///   lseg(p, q, l1) |-- forall l2 l3, ...
///   free_vars: p q l1
/// ```
pub fn format_conditions(prog: &Program) -> String {
    let mut out = String::new();
    for (i, (s, cond)) in soundness_all(prog).into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match cond {
            None => {
                let _ = writeln!(out, "soundness {} : instantiate — always sound", s.name);
            }
            Some(c) => {
                let _ = writeln!(out, "soundness {} :", s.name);
                let _ = writeln!(out, "  {c}");
                let _ = write!(out, "  free_vars:");
                for x in &c.free_vars {
                    let _ = write!(out, " {x}");
                }
                out.push('\n');
            }
        }
    }
    out
}
