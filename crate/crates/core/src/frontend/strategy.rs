//! Strategy programs.
//!
//! Pattern atoms are ordinary formulas. Every variable in a pattern is a
//! pattern variable, and its first textual occurrence across the pattern
//! list is the binding one (written `?x` in source).

use std::collections::BTreeSet;

use crate::logic::{Formula, Ident, PureFormula, Side, Term, Vars};

pub const DEFAULT_PRIORITY: i64 = 50;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub side: Side,
    /// Variables that must match existentials of the entailment.
    pub exists_binders: Vec<Ident>,
    pub atom: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Check {
    LeftAbsent(PureFormula),
    RightAbsent(PureFormula),
    Infer(PureFormula),
}

impl Check {
    pub fn formula(&self) -> &PureFormula {
        match self {
            Check::LeftAbsent(p) | Check::RightAbsent(p) | Check::Infer(p) => p,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Check::LeftAbsent(_) => "left_absent",
            Check::RightAbsent(_) => "right_absent",
            Check::Infer(_) => "infer",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operation {
    Add(Side, Formula),
    Erase(Side, Formula),
    ForallAdd(Ident),
    ExistAdd(Ident),
}

impl Operation {
    pub fn left_add(f: impl Into<Formula>) -> Self {
        Operation::Add(Side::Left, f.into())
    }

    pub fn right_add(f: impl Into<Formula>) -> Self {
        Operation::Add(Side::Right, f.into())
    }

    pub fn left_erase(f: impl Into<Formula>) -> Self {
        Operation::Erase(Side::Left, f.into())
    }

    pub fn right_erase(f: impl Into<Formula>) -> Self {
        Operation::Erase(Side::Right, f.into())
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Operation::Add(Side::Left, _) => "left_add",
            Operation::Add(Side::Right, _) => "right_add",
            Operation::Erase(Side::Left, _) => "left_erase",
            Operation::Erase(Side::Right, _) => "right_erase",
            Operation::ForallAdd(_) => "forall_add",
            Operation::ExistAdd(_) => "exist_add",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    Ops(Vec<Operation>),
    Instantiate(Ident, Term),
}

impl Default for Action {
    fn default() -> Self {
        Action::Ops(Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    pub name: Ident,
    pub priority: i64,
    pub patterns: Vec<Pattern>,
    pub checks: Vec<Check>,
    pub action: Action,
}

impl Strategy {
    /// Pattern variables in binding order.
    pub fn pattern_vars(&self) -> Vec<Ident> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for pattern in &self.patterns {
            pattern.atom.visit_vars(&mut |v| {
                if seen.insert(v.to_string()) {
                    out.push(v.to_string());
                }
            });
        }
        out
    }

    /// Pattern variables followed by names introduced by the action.
    pub fn variables(&self) -> Vec<Ident> {
        let mut out = self.pattern_vars();
        if let Action::Ops(ops) = &self.action {
            for op in ops {
                if let Operation::ForallAdd(x) | Operation::ExistAdd(x) = op {
                    if !out.contains(x) {
                        out.push(x.clone());
                    }
                }
            }
        }
        out
    }

    pub fn is_instantiate(&self) -> bool {
        matches!(self.action, Action::Instantiate(..))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub strategies: Vec<Strategy>,
}

impl Program {
    pub fn new(strategies: Vec<Strategy>) -> Self {
        Program { strategies }
    }

    /// Strategies by ascending priority, ties broken by declaration order.
    pub fn ordered(&self) -> Vec<&Strategy> {
        let mut out: Vec<&Strategy> = self.strategies.iter().collect();
        out.sort_by_key(|s| s.priority);
        out
    }

    pub fn get(&self, name: &str) -> Option<&Strategy> {
        self.strategies.iter().find(|s| s.name == name)
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    /// Appends `other`, failing on the first name already present.
    pub fn concat(mut self, other: Program) -> Result<Program, Ident> {
        for s in other.strategies {
            if self.get(&s.name).is_some() {
                return Err(s.name);
            }
            self.strategies.push(s);
        }
        Ok(self)
    }
}
