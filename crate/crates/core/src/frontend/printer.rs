//! Pretty-printers. Output re-parses to the same value.

use std::collections::BTreeSet;
use std::fmt::{self, Write};

use super::strategy::*;
use crate::logic::*;

#[derive(Default)]
struct Printer {
    out: String,
    /// When set, first occurrences of variables not yet in the set are
    /// written `?x`.
    marks: Option<BTreeSet<Ident>>,
}

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const ATOM: u8 = 3;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Top,
    WandLeft,
    WandRight,
    ConjPart,
    SepPart,
    QuantBody,
}

impl Printer {
    fn s(&mut self, text: &str) {
        self.out.push_str(text);
    }

    fn var(&mut self, name: &str) {
        if let Some(marks) = &mut self.marks {
            if marks.insert(name.to_string()) {
                self.out.push('?');
            }
        }
        self.out.push_str(name);
    }

    fn term(&mut self, t: &Term, min: u8) {
        let (prec, paren) = match t {
            Term::Arith(ArithOp::Add | ArithOp::Sub, ..) => (SUM, SUM < min),
            Term::Arith(ArithOp::Mul, ..) => (PRODUCT, PRODUCT < min),
            _ => (ATOM, false),
        };
        if paren {
            self.s("(");
        }
        match t {
            Term::Int(n) => {
                let _ = write!(self.out, "{n}");
            }
            Term::Var(v) => self.var(v),
            Term::FieldAddr(base, field) => {
                self.s("field_addr(");
                self.term(base, SUM);
                self.s(", ");
                self.s(field);
                self.s(")");
            }
            Term::Apply(f, args) => self.application(f, args),
            Term::Arith(op, l, r) => {
                self.term(l, prec);
                self.s(" ");
                self.s(op.symbol());
                self.s(" ");
                self.term(r, prec + 1);
            }
        }
        if paren {
            self.s(")");
        }
    }

    fn application(&mut self, name: &str, args: &[Term]) {
        self.s(name);
        if args.is_empty() {
            return;
        }
        self.s("(");
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                self.s(", ");
            }
            self.term(a, SUM);
        }
        self.s(")");
    }

    fn pure(&mut self, p: &PureFormula) {
        match p {
            PureFormula::True => self.s("True"),
            PureFormula::Eq(l, r) => self.relation(l, "==", r),
            PureFormula::Rel(op, l, r) => self.relation(l, op.symbol(), r),
            PureFormula::Not(inner) => {
                self.s("!");
                if matches!(**inner, PureFormula::Eq(..) | PureFormula::Rel(..)) {
                    self.s("(");
                    self.pure(inner);
                    self.s(")");
                } else {
                    self.pure(inner);
                }
            }
            PureFormula::Bin(op, l, r) => {
                self.s("(");
                self.pure(l);
                self.s(" ");
                self.s(op.symbol());
                self.s(" ");
                self.pure(r);
                self.s(")");
            }
            PureFormula::Pred(name, args) => self.application(name, args),
        }
    }

    fn relation(&mut self, l: &Term, op: &str, r: &Term) {
        self.term(l, SUM);
        self.s(" ");
        self.s(op);
        self.s(" ");
        self.term(r, SUM);
    }

    fn spatial(&mut self, s: &SpatialAtom) {
        match s {
            SpatialAtom::Emp => self.s("emp"),
            SpatialAtom::DataAt(a, v) => {
                self.s("data_at(");
                self.term(a, SUM);
                self.s(", ");
                self.term(v, SUM);
                self.s(")");
            }
            SpatialAtom::Pred(name, args) => self.application(name, args),
        }
    }

    fn formula(&mut self, f: &Formula) {
        match f {
            Formula::Pure(p) => self.pure(p),
            Formula::Spatial(s) => self.spatial(s),
        }
    }

    fn heap(&mut self, h: &SymbolicHeap) {
        if h.is_empty() {
            self.s("emp");
            return;
        }
        let mut first = true;
        for p in h.pures() {
            if !first {
                self.s(" && ");
            }
            first = false;
            self.pure(p);
        }
        for (i, s) in h.spatials().iter().enumerate() {
            if !first {
                self.s(if i == 0 { " && " } else { " * " });
            }
            first = false;
            self.spatial(s);
        }
    }

    fn binders(&mut self, keyword: &str, names: &[Ident]) {
        if names.is_empty() {
            return;
        }
        self.s(keyword);
        for n in names {
            self.s(" ");
            self.s(n);
        }
        self.s(", ");
    }

    fn entailment(&mut self, e: &Entailment) {
        self.binders("forall", &e.universals);
        self.heap(&e.lhs);
        self.s(" |-- ");
        self.binders("exists", &e.existentials);
        self.heap(&e.rhs);
    }

    fn assertion(&mut self, a: &Assertion, ctx: Ctx) {
        let paren = match a {
            Assertion::Pure(PureFormula::Eq(..) | PureFormula::Rel(..)) => ctx == Ctx::SepPart,
            Assertion::Pure(_) | Assertion::Spatial(_) => false,
            Assertion::SepConj(parts) => parts.len() > 1 && ctx == Ctx::SepPart,
            Assertion::And(parts) => parts.len() > 1 && matches!(ctx, Ctx::SepPart | Ctx::WandLeft | Ctx::ConjPart),
            Assertion::Wand(..) | Assertion::Forall(..) | Assertion::Exists(..) => {
                matches!(ctx, Ctx::SepPart | Ctx::WandLeft | Ctx::ConjPart)
            }
        };
        if paren {
            self.s("(");
        }
        match a {
            Assertion::Pure(p) => self.pure(p),
            Assertion::Spatial(s) => self.spatial(s),
            Assertion::SepConj(parts) => self.joined(parts, " * ", Ctx::SepPart, "emp", ctx),
            Assertion::And(parts) => self.joined(parts, " && ", Ctx::ConjPart, "True", ctx),
            Assertion::Wand(l, r) => {
                self.assertion(l, Ctx::WandLeft);
                self.s(" -* ");
                self.assertion(r, Ctx::WandRight);
            }
            Assertion::Forall(vars, body) | Assertion::Exists(vars, body) => {
                let kw = if matches!(a, Assertion::Forall(..)) {
                    "forall"
                } else {
                    "exists"
                };
                self.binders(kw, vars);
                self.assertion(body, Ctx::QuantBody);
            }
        }
        if paren {
            self.s(")");
        }
    }

    fn joined(&mut self, parts: &[Assertion], sep: &str, part_ctx: Ctx, unit: &str, outer: Ctx) {
        match parts {
            [] => self.s(unit),
            [only] => self.assertion(only, outer),
            _ => {
                for (i, part) in parts.iter().enumerate() {
                    if i > 0 {
                        self.s(sep);
                    }
                    self.assertion(part, part_ctx);
                }
            }
        }
    }

    fn strategy(&mut self, s: &Strategy) {
        self.marks = Some(BTreeSet::new());
        let _ = writeln!(self.out, "strategy {}", s.name);
        if s.priority != DEFAULT_PRIORITY {
            let _ = writeln!(self.out, "priority : {}", s.priority);
        }
        for pattern in &s.patterns {
            self.s(pattern.side.keyword());
            self.s(" : ");
            for x in &pattern.exists_binders {
                self.s("exists ");
                self.s(x);
                self.s(", ");
            }
            self.formula(&pattern.atom);
            self.s("\n");
        }
        // Everything after the patterns is written bare.
        self.marks = None;
        if !s.checks.is_empty() {
            self.s("check :");
            for c in &s.checks {
                self.s(" ");
                self.s(c.keyword());
                self.s("(");
                self.pure(c.formula());
                self.s(");");
            }
            self.s("\n");
        }
        match &s.action {
            Action::Ops(ops) if ops.is_empty() => {}
            Action::Ops(ops) => {
                self.s("action :");
                for op in ops {
                    self.s("\n  ");
                    self.s(op.keyword());
                    self.s("(");
                    match op {
                        Operation::Add(_, f) | Operation::Erase(_, f) => self.formula(f),
                        Operation::ForallAdd(x) | Operation::ExistAdd(x) => self.s(x),
                    }
                    self.s(");");
                }
                self.s("\n");
            }
            Action::Instantiate(x, t) => {
                self.s("action : instantiate(");
                self.s(x);
                self.s(" -> ");
                self.term(t, SUM);
                self.s(");\n");
            }
        }
    }
}

fn render(f: impl FnOnce(&mut Printer)) -> String {
    let mut p = Printer::default();
    f(&mut p);
    p.out
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(|p| p.term(self, SUM)))
    }
}

impl fmt::Display for PureFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(|p| p.pure(self)))
    }
}

impl fmt::Display for SpatialAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(|p| p.spatial(self)))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(|p| p.formula(self)))
    }
}

impl fmt::Display for SymbolicHeap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(|p| p.heap(self)))
    }
}

impl fmt::Display for Entailment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(|p| p.entailment(self)))
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(|p| p.assertion(self, Ctx::Top)))
    }
}

impl fmt::Display for SoundnessCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |-- {}", self.hypothesis, self.conclusion)
    }
}

pub fn print_entailment(e: &Entailment) -> String {
    e.to_string()
}

pub fn print_assertion(a: &Assertion) -> String {
    a.to_string()
}

pub fn print_strategy(s: &Strategy) -> String {
    render(|p| p.strategy(s))
}

/// Strategies separated by blank lines.
pub fn print_program(prog: &Program) -> String {
    prog.strategies
        .iter()
        .map(print_strategy)
        .collect::<Vec<_>>()
        .join("\n")
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_strategy(self))
    }
}
