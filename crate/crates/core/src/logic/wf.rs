//! Closedness and binder hygiene for entailments.

use std::collections::BTreeSet;
use std::fmt;

use super::ast::{Entailment, Ident};
use super::subst::Vars;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WfViolation {
    /// A variable of the antecedent is not universally bound.
    FreeInLhs(Ident),
    /// A variable of the consequent is bound by neither prefix.
    FreeInRhs(Ident),
    /// A name is both universal and existential.
    BinderOverlap(Ident),
    DuplicateUniversal(Ident),
    DuplicateExistential(Ident),
}

impl fmt::Display for WfViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WfViolation::FreeInLhs(v) => write!(f, "antecedent variable `{v}` is not universally quantified"),
            WfViolation::FreeInRhs(v) => write!(f, "consequent variable `{v}` is not quantified"),
            WfViolation::BinderOverlap(v) => write!(f, "`{v}` is both universal and existential"),
            WfViolation::DuplicateUniversal(v) => write!(f, "universal `{v}` is bound twice"),
            WfViolation::DuplicateExistential(v) => write!(f, "existential `{v}` is bound twice"),
        }
    }
}

/// All violated invariants, in a fixed order.
pub fn check_well_formed(e: &Entailment) -> Vec<WfViolation> {
    let mut out = Vec::new();
    let mut universals = BTreeSet::new();
    for v in &e.universals {
        if !universals.insert(v.as_str()) {
            out.push(WfViolation::DuplicateUniversal(v.clone()));
        }
    }
    let mut existentials = BTreeSet::new();
    for v in &e.existentials {
        if !existentials.insert(v.as_str()) {
            out.push(WfViolation::DuplicateExistential(v.clone()));
        }
    }
    for v in &e.existentials {
        if universals.contains(v.as_str()) {
            out.push(WfViolation::BinderOverlap(v.clone()));
        }
    }
    for v in e.lhs.vars_in_order() {
        if !universals.contains(v.as_str()) {
            out.push(WfViolation::FreeInLhs(v));
        }
    }
    for v in e.rhs.vars_in_order() {
        if !universals.contains(v.as_str()) && !existentials.contains(v.as_str()) {
            out.push(WfViolation::FreeInRhs(v));
        }
    }
    out
}

pub fn well_formed(e: &Entailment) -> bool {
    check_well_formed(e).is_empty()
}
