//! Conservative EUF + LIA decision procedure for `infer` checks.
//!
//! A goal is proven by refuting `hyps && !goal`, one goal conjunct at a
//! time. Congruence closure and the arithmetic solver exchange equalities
//! until neither learns anything new; ground disequalities are then split
//! a bounded number of times.

mod cc;
mod lia;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::logic::{ArithOp, BinOp, PureFormula, RelOp, Term};

use cc::{BudgetExceeded, EGraph, Op};
use lia::Linear;

/// Maximum number of term nodes per query.
pub const NODE_BUDGET: usize = 512;
/// Maximum nesting of disequality case splits.
pub const MAX_SPLITS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Proven,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    pub status: Status,
    /// Hypotheses the refutation depends on, in input order. Empty unless proven.
    pub used_hypotheses: Vec<PureFormula>,
}

impl QueryResult {
    pub fn is_proven(&self) -> bool {
        self.status == Status::Proven
    }

    fn unknown() -> Self {
        QueryResult {
            status: Status::Unknown,
            used_hypotheses: Vec::new(),
        }
    }
}

/// Tries to prove `goal` from the conjunction of `hyps`.
pub fn infer(hyps: &[PureFormula], goal: &PureFormula) -> QueryResult {
    let mut conjuncts = Vec::new();
    if !goal_conjuncts(goal, &mut conjuncts) {
        return QueryResult::unknown();
    }
    let hyp_lits: Vec<Vec<Lit>> = hyps
        .iter()
        .map(|h| {
            let mut out = Vec::new();
            collect(h, true, &mut out);
            out.retain(|l| !l.nonlinear());
            out
        })
        .collect();

    let mut used = BTreeSet::new();
    for conj in conjuncts {
        let mut negated = Vec::new();
        if !collect(conj, false, &mut negated) || negated.iter().any(Lit::nonlinear) {
            return QueryResult::unknown();
        }
        let all: Vec<usize> = (0..hyps.len()).collect();
        if !refutes(&negated, &hyp_lits, &all) {
            return QueryResult::unknown();
        }
        // deletion-based minimisation
        let mut keep = all;
        let mut i = 0;
        while i < keep.len() {
            let mut trial = keep.clone();
            trial.remove(i);
            if refutes(&negated, &hyp_lits, &trial) {
                keep = trial;
            } else {
                i += 1;
            }
        }
        used.extend(keep);
    }
    QueryResult {
        status: Status::Proven,
        used_hypotheses: used.into_iter().map(|i| hyps[i].clone()).collect(),
    }
}

fn goal_conjuncts<'a>(goal: &'a PureFormula, out: &mut Vec<&'a PureFormula>) -> bool {
    match goal {
        PureFormula::Bin(BinOp::And, l, r) => goal_conjuncts(l, out) && goal_conjuncts(r, out),
        PureFormula::Not(inner) if !literal_shaped(inner) => false,
        PureFormula::Bin(..) => false,
        _ => {
            out.push(goal);
            true
        }
    }
}

fn literal_shaped(p: &PureFormula) -> bool {
    match p {
        PureFormula::Not(inner) => literal_shaped(inner),
        PureFormula::Bin(..) => false,
        _ => true,
    }
}

#[derive(Debug, Clone)]
enum Lit {
    Eq(Term, Term),
    Ne(Term, Term),
    /// `l <= r`, or `l < r` when strict.
    Le(Term, Term, bool),
    Holds(String, Vec<Term>, bool),
    False,
}

impl Lit {
    fn terms(&self) -> Vec<&Term> {
        match self {
            Lit::Eq(l, r) | Lit::Ne(l, r) | Lit::Le(l, r, _) => vec![l, r],
            Lit::Holds(_, args, _) => args.iter().collect(),
            Lit::False => Vec::new(),
        }
    }

    fn nonlinear(&self) -> bool {
        self.terms().into_iter().any(has_nonlinear)
    }
}

fn has_nonlinear(t: &Term) -> bool {
    match t {
        Term::Int(_) | Term::Var(_) => false,
        Term::FieldAddr(b, _) => has_nonlinear(b),
        Term::Apply(_, args) => args.iter().any(has_nonlinear),
        Term::Arith(op, l, r) => {
            let literal = |t: &Term| matches!(t, Term::Int(_));
            (*op == ArithOp::Mul && !literal(l) && !literal(r)) || has_nonlinear(l) || has_nonlinear(r)
        }
    }
}

/// Pushes the literals of `p` (or of `!p`). Returns false if some part has
/// no literal form; the parts that do are still pushed.
fn collect(p: &PureFormula, positive: bool, out: &mut Vec<Lit>) -> bool {
    use PureFormula as P;
    let pair = |l: &Term, r: &Term| (l.clone(), r.clone());
    match p {
        P::True => {
            if !positive {
                out.push(Lit::False);
            }
            true
        }
        P::Eq(l, r) => {
            let (l, r) = pair(l, r);
            out.push(if positive { Lit::Eq(l, r) } else { Lit::Ne(l, r) });
            true
        }
        P::Rel(op, l, r) => {
            let (l, r) = pair(l, r);
            out.push(match (op, positive) {
                (RelOp::Ne, true) => Lit::Ne(l, r),
                (RelOp::Ne, false) => Lit::Eq(l, r),
                (RelOp::Lt, true) | (RelOp::Ge, false) => Lit::Le(l, r, true),
                (RelOp::Le, true) | (RelOp::Gt, false) => Lit::Le(l, r, false),
                (RelOp::Gt, true) | (RelOp::Le, false) => Lit::Le(r, l, true),
                (RelOp::Ge, true) | (RelOp::Lt, false) => Lit::Le(r, l, false),
            });
            true
        }
        P::Pred(name, args) => {
            out.push(Lit::Holds(name.clone(), args.clone(), positive));
            true
        }
        P::Not(inner) => collect(inner, !positive, out),
        P::Bin(op, l, r) => match (op, positive) {
            (BinOp::And, true) | (BinOp::Or, false) => {
                let a = collect(l, positive, out);
                let b = collect(r, positive, out);
                a && b
            }
            (BinOp::Implies, false) => {
                let a = collect(l, true, out);
                let b = collect(r, false, out);
                a && b
            }
            _ => false,
        },
    }
}

#[derive(Debug, Clone)]
struct State {
    g: EGraph,
    eqs: Vec<(usize, usize)>,
    diseqs: Vec<(usize, usize)>,
    /// `(a, b, strict)`: a <= b, or a < b.
    ineqs: Vec<(usize, usize, bool)>,
    falsum: bool,
    settled: BTreeSet<usize>,
}

impl State {
    fn new() -> Self {
        State {
            g: EGraph::new(NODE_BUDGET),
            eqs: Vec::new(),
            diseqs: Vec::new(),
            ineqs: Vec::new(),
            falsum: false,
            settled: BTreeSet::new(),
        }
    }

    fn assert(&mut self, lit: &Lit) -> Result<(), BudgetExceeded> {
        match lit {
            Lit::Eq(l, r) => {
                let (a, b) = (self.g.intern(l)?, self.g.intern(r)?);
                self.eqs.push((a, b));
            }
            Lit::Ne(l, r) => {
                let (a, b) = (self.g.intern(l)?, self.g.intern(r)?);
                self.diseqs.push((a, b));
            }
            Lit::Le(l, r, strict) => {
                let (a, b) = (self.g.intern(l)?, self.g.intern(r)?);
                self.ineqs.push((a, b, *strict));
            }
            Lit::Holds(name, args, positive) => {
                let p = self.g.intern_pred(name, args)?;
                let top = self.g.top()?;
                if *positive {
                    self.eqs.push((p, top));
                } else {
                    self.diseqs.push((p, top));
                }
            }
            Lit::False => self.falsum = true,
        }
        Ok(())
    }

    fn ground(&self, id: usize) -> bool {
        let node = self.g.node(id);
        !matches!(node.op, Op::Var(_) | Op::Top | Op::Pred(_)) && node.children.iter().all(|&c| self.ground(c))
    }
}

/// Goal literals are interned first so that hypotheses, not the goal, are
/// what gets dropped when the node budget runs out.
fn refutes(negated: &[Lit], hyps: &[Vec<Lit>], subset: &[usize]) -> bool {
    let mut st = State::new();
    for lit in negated {
        if st.assert(lit).is_err() {
            return false;
        }
    }
    for &i in subset {
        for lit in &hyps[i] {
            let _ = st.assert(lit);
        }
    }
    if st.falsum {
        return true;
    }
    refute(st, MAX_SPLITS)
}

struct Arith {
    var_of: BTreeMap<usize, usize>,
    eqs: Vec<Linear>,
    ineqs: Vec<Linear>,
}

impl Arith {
    fn x(&self, g: &EGraph, id: usize) -> Linear {
        Linear::var(self.var_of[&g.find(id)])
    }

    /// Adds `a < b`.
    fn with_lt(&self, g: &EGraph, a: usize, b: usize) -> Vec<Linear> {
        let mut ineqs = self.ineqs.clone();
        if let Some(c) = self.x(g, a).add_scaled(&self.x(g, b), -1).map(|mut c| {
            c.constant += 1;
            c
        }) {
            ineqs.push(c);
        }
        ineqs
    }

    fn mentioned(&self) -> BTreeSet<usize> {
        self.eqs
            .iter()
            .chain(&self.ineqs)
            .flat_map(|c| c.coeffs.keys().copied())
            .collect()
    }
}

fn arith(st: &State) -> Arith {
    let g = &st.g;
    let var_of: BTreeMap<usize, usize> = g.roots().into_iter().enumerate().map(|(i, r)| (r, i)).collect();
    let x = |id: usize| Linear::var(var_of[&g.find(id)]);
    let mut eqs = Vec::new();
    for id in 0..g.len() {
        let node = g.node(id);
        let def = match &node.op {
            Op::Int(k) => Some(Linear::constant(*k as i128)),
            Op::Arith(op) => {
                let (l, r) = (node.children[0], node.children[1]);
                match op {
                    ArithOp::Add => x(l).add_scaled(&x(r), 1),
                    ArithOp::Sub => x(l).add_scaled(&x(r), -1),
                    ArithOp::Mul => match (g.literal_of(l), g.literal_of(r)) {
                        (Some(k), _) => x(r).scale(k as i128),
                        (_, Some(k)) => x(l).scale(k as i128),
                        _ => None,
                    },
                }
            }
            _ => None,
        };
        // x(id) - def == 0
        if let Some(c) = def.and_then(|d| x(id).add_scaled(&d, -1)) {
            eqs.push(c);
        }
    }
    let ineqs = st
        .ineqs
        .iter()
        .filter_map(|&(a, b, strict)| {
            let mut c = x(a).add_scaled(&x(b), -1)?;
            if strict {
                c.constant += 1;
            }
            Some(c)
        })
        .collect();
    Arith { var_of, eqs, ineqs }
}

fn refute(mut st: State, splits: usize) -> bool {
    loop {
        for &(a, b) in &st.eqs {
            st.g.union(a, b);
        }
        st.g.close();
        if st.g.literal_clash() || st.diseqs.iter().any(|&(a, b)| st.g.same(a, b)) {
            return true;
        }
        let ar = arith(&st);
        if lia::infeasible(&ar.eqs, &ar.ineqs) {
            return true;
        }
        let shared = shared_classes(&st, &ar);
        let mut learned = Vec::new();
        for (i, &c1) in shared.iter().enumerate() {
            for &c2 in &shared[i + 1..] {
                if lia::infeasible(&ar.eqs, &ar.with_lt(&st.g, c1, c2))
                    && lia::infeasible(&ar.eqs, &ar.with_lt(&st.g, c2, c1))
                {
                    learned.push((c1, c2));
                }
            }
        }
        if learned.is_empty() {
            break;
        }
        st.eqs.extend(learned);
    }
    if splits == 0 {
        return false;
    }
    let candidate = st
        .diseqs
        .iter()
        .enumerate()
        .find(|&(i, &(a, b))| !st.settled.contains(&i) && (st.ground(a) || st.ground(b)));
    let Some((i, &(a, b))) = candidate else {
        return false;
    };
    let mut lo = st.clone();
    lo.settled.insert(i);
    lo.ineqs.push((a, b, true));
    let mut hi = lo.clone();
    hi.ineqs.pop();
    hi.ineqs.push((b, a, true));
    refute(lo, splits - 1) && refute(hi, splits - 1)
}

/// Classes whose equality matters outside arithmetic and which arithmetic
/// constrains at all.
fn shared_classes(st: &State, ar: &Arith) -> Vec<usize> {
    let g = &st.g;
    let mut out = BTreeSet::new();
    for id in 0..g.len() {
        if matches!(g.node(id).op, Op::Fun(_) | Op::Field(_) | Op::Pred(_)) {
            out.extend(g.node(id).children.iter().map(|&c| g.find(c)));
        }
    }
    for &(a, b) in &st.diseqs {
        out.insert(g.find(a));
        out.insert(g.find(b));
    }
    let mentioned = ar.mentioned();
    out.into_iter().filter(|r| mentioned.contains(&ar.var_of[r])).collect()
}
