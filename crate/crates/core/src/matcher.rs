//! Syntactic matching of strategy patterns against entailment conjuncts.

use crate::frontend::{Pattern, Strategy};
use crate::logic::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConjunctKind {
    Pure,
    Spatial,
}

/// One conjunct occurrence: its side, kind and position in the heap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConjunctRef {
    pub side: Side,
    pub kind: ConjunctKind,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSubstitution {
    pub bindings: Subst,
    /// `used[i]` is the occurrence consumed by pattern `i`.
    pub used: Vec<ConjunctRef>,
}

pub fn match_term(pat: &Term, target: &Term, sigma: &mut Subst) -> bool {
    match (pat, target) {
        (Term::Var(x), _) => match sigma.get(x) {
            Some(bound) => bound == target,
            None => {
                sigma.insert(x.clone(), target.clone());
                true
            }
        },
        (Term::Int(a), Term::Int(b)) => a == b,
        (Term::FieldAddr(pb, pf), Term::FieldAddr(tb, tf)) => pf == tf && match_term(pb, tb, sigma),
        (Term::Apply(pf, pargs), Term::Apply(tf, targs)) => pf == tf && match_terms(pargs, targs, sigma),
        (Term::Arith(pop, pl, pr), Term::Arith(top, tl, tr)) => {
            pop == top && match_term(pl, tl, sigma) && match_term(pr, tr, sigma)
        }
        _ => false,
    }
}

fn match_terms(pats: &[Term], targets: &[Term], sigma: &mut Subst) -> bool {
    pats.len() == targets.len() && pats.iter().zip(targets).all(|(p, t)| match_term(p, t, sigma))
}

fn match_pure(pat: &PureFormula, target: &PureFormula, sigma: &mut Subst) -> bool {
    match (pat, target) {
        (PureFormula::True, PureFormula::True) => true,
        (PureFormula::Eq(pl, pr), PureFormula::Eq(tl, tr)) => match_term(pl, tl, sigma) && match_term(pr, tr, sigma),
        (PureFormula::Rel(po, pl, pr), PureFormula::Rel(to, tl, tr)) => {
            po == to && match_term(pl, tl, sigma) && match_term(pr, tr, sigma)
        }
        (PureFormula::Not(p), PureFormula::Not(t)) => match_pure(p, t, sigma),
        (PureFormula::Bin(po, pl, pr), PureFormula::Bin(to, tl, tr)) => {
            po == to && match_pure(pl, tl, sigma) && match_pure(pr, tr, sigma)
        }
        (PureFormula::Pred(pn, pargs), PureFormula::Pred(tn, targs)) => pn == tn && match_terms(pargs, targs, sigma),
        _ => false,
    }
}

fn match_spatial(pat: &SpatialAtom, target: &SpatialAtom, sigma: &mut Subst) -> bool {
    match (pat, target) {
        (SpatialAtom::Emp, SpatialAtom::Emp) => true,
        (SpatialAtom::DataAt(pa, pv), SpatialAtom::DataAt(ta, tv)) => {
            match_term(pa, ta, sigma) && match_term(pv, tv, sigma)
        }
        (SpatialAtom::Pred(pn, pargs), SpatialAtom::Pred(tn, targs)) => pn == tn && match_terms(pargs, targs, sigma),
        _ => false,
    }
}

/// Extends `partial` so that the pattern instantiates to `target`.
pub fn match_atom(pat: &Formula, target: &Formula, partial: &Subst) -> Option<Subst> {
    let mut sigma = partial.clone();
    let ok = match (pat, target) {
        (Formula::Pure(p), Formula::Pure(t)) => match_pure(p, t, &mut sigma),
        (Formula::Spatial(p), Formula::Spatial(t)) => match_spatial(p, t, &mut sigma),
        _ => false,
    };
    ok.then_some(sigma)
}

fn kind_of(f: &Formula) -> ConjunctKind {
    match f {
        Formula::Pure(_) => ConjunctKind::Pure,
        Formula::Spatial(_) => ConjunctKind::Spatial,
    }
}

fn candidate_count(e: &Entailment, side: Side, kind: ConjunctKind) -> usize {
    let heap = e.heap(side);
    match kind {
        ConjunctKind::Pure => heap.pures().len(),
        ConjunctKind::Spatial => heap.spatials().len(),
    }
}

/// The conjunct behind a reference, as a formula.
pub fn conjunct(e: &Entailment, r: ConjunctRef) -> Formula {
    let heap = e.heap(r.side);
    match r.kind {
        ConjunctKind::Pure => Formula::Pure(heap.pures()[r.index].clone()),
        ConjunctKind::Spatial => Formula::Spatial(heap.spatials()[r.index].clone()),
    }
}

fn binders_are_existential(pattern: &Pattern, sigma: &Subst, e: &Entailment) -> bool {
    pattern
        .exists_binders
        .iter()
        .all(|x| matches!(sigma.get(x), Some(Term::Var(v)) if e.existentials.contains(v)))
}

struct Frame {
    next: usize,
    chosen: Option<ConjunctRef>,
    sigma_before: Subst,
}

/// Lazy depth-first enumeration of pattern substitutions, patterns in
/// declaration order and candidates in heap order.
pub struct Matches<'a> {
    patterns: &'a [Pattern],
    e: &'a Entailment,
    stack: Vec<Frame>,
    /// Only used when there are no patterns at all.
    yielded_empty: bool,
}

impl<'a> Matches<'a> {
    pub fn new(patterns: &'a [Pattern], e: &'a Entailment) -> Self {
        let stack = if patterns.is_empty() {
            Vec::new()
        } else {
            vec![Frame {
                next: 0,
                chosen: None,
                sigma_before: Subst::new(),
            }]
        };
        Matches {
            patterns,
            e,
            stack,
            yielded_empty: false,
        }
    }
}

impl Iterator for Matches<'_> {
    type Item = PatternSubstitution;

    fn next(&mut self) -> Option<PatternSubstitution> {
        if self.patterns.is_empty() {
            if self.yielded_empty {
                return None;
            }
            self.yielded_empty = true;
            return Some(PatternSubstitution {
                bindings: Subst::new(),
                used: Vec::new(),
            });
        }
        while let Some(depth) = self.stack.len().checked_sub(1) {
            let pattern = &self.patterns[depth];
            let kind = kind_of(&pattern.atom);
            let count = candidate_count(self.e, pattern.side, kind);
            let mut found = None;
            let frame = &self.stack[depth];
            for index in frame.next..count {
                let r = ConjunctRef {
                    side: pattern.side,
                    kind,
                    index,
                };
                if self.stack[..depth].iter().any(|f| f.chosen == Some(r)) {
                    continue;
                }
                let mut sigma = frame.sigma_before.clone();
                let heap = self.e.heap(pattern.side);
                let ok = match &pattern.atom {
                    Formula::Pure(p) => match_pure(p, &heap.pures()[index], &mut sigma),
                    Formula::Spatial(p) => match_spatial(p, &heap.spatials()[index], &mut sigma),
                };
                if ok && binders_are_existential(pattern, &sigma, self.e) {
                    found = Some((r, sigma));
                    break;
                }
            }
            match found {
                Some((r, sigma)) => {
                    let frame = &mut self.stack[depth];
                    frame.next = r.index + 1;
                    frame.chosen = Some(r);
                    if depth + 1 == self.patterns.len() {
                        let used = self.stack.iter().map(|f| f.chosen.unwrap()).collect();
                        return Some(PatternSubstitution { bindings: sigma, used });
                    }
                    self.stack.push(Frame {
                        next: 0,
                        chosen: None,
                        sigma_before: sigma,
                    });
                }
                None => {
                    self.stack.pop();
                }
            }
        }
        None
    }
}

pub fn match_strategy<'a>(s: &'a Strategy, e: &'a Entailment) -> Matches<'a> {
    Matches::new(&s.patterns, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse_entailment, parse_formula, parse_signature, parse_strategies};

    fn sig() -> Signature {
        parse_signature("spatial lseg/3; spatial listrep/2; func app/2; spatial store_array/4; func nth/2;").unwrap()
    }

    fn f(text: &str) -> Formula {
        parse_formula(text, &sig()).unwrap()
    }

    fn subst(pairs: &[(&str, &str)]) -> Subst {
        let s = sig();
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), crate::frontend::parse_term(v, &s).unwrap()))
            .collect()
    }

    #[test]
    fn atom_matching() {
        assert_eq!(
            match_atom(&f("lseg(p, q, l1)"), &f("lseg(x, y, l1)"), &Subst::new()),
            Some(subst(&[("p", "x"), ("q", "y"), ("l1", "l1")]))
        );
        let partial = subst(&[("p", "x")]);
        assert_eq!(
            match_atom(&f("listrep(p, l2)"), &f("listrep(x, l2)"), &partial),
            Some(subst(&[("p", "x"), ("l2", "l2")]))
        );
        assert_eq!(match_atom(&f("listrep(p, l2)"), &f("listrep(y, l2)"), &partial), None);
        assert_eq!(
            match_atom(
                &f("data_at(p + 4 * i, v)"),
                &f("data_at(p + 4 * i, nth(i - 0, l))"),
                &subst(&[("p", "p")])
            ),
            Some(subst(&[("p", "p"), ("i", "i"), ("v", "nth(i - 0, l)")]))
        );
    }

    #[test]
    fn matching_is_syntactic() {
        assert_eq!(
            match_atom(&f("data_at(p + 4 * i, v)"), &f("data_at(4 * i + p, w)"), &Subst::new()),
            None
        );
        assert_eq!(match_atom(&f("x == y"), &f("listrep(a, b)"), &Subst::new()), None);
    }

    const S1: &str = "strategy S1\npriority: 0\nleft: lseg(?p, ?q, ?l1)\nright: lseg(p, q, ?l2)\n listrep(q, ?l3)\naction: left_erase(lseg(p, q, l1)); right_erase(lseg(p, q, l2)); right_add(l2 == l1);";

    #[test]
    fn overview_match_is_unique() {
        let s = sig();
        let prog = parse_strategies(S1, &s).unwrap();
        let e = parse_entailment(
            "forall p q r l1 l2 l3, lseg(p,q,l1) * lseg(q,r,l2) * listrep(r,l3) |-- exists l4 l5, lseg(p,q,l4) * listrep(q,l5)",
            &s,
        )
        .unwrap();
        let all: Vec<_> = match_strategy(&prog.strategies[0], &e).collect();
        assert_eq!(all.len(), 1);
        assert_eq!(
            all[0].bindings,
            subst(&[("p", "p"), ("q", "q"), ("l1", "l1"), ("l2", "l4"), ("l3", "l5")])
        );
        let cycle = parse_entailment(
            "forall p q l1 l2, lseg(p,q,l1) * lseg(q,q,l2) |-- exists l3, lseg(p,q,l3)",
            &s,
        )
        .unwrap();
        assert_eq!(match_strategy(&prog.strategies[0], &cycle).count(), 0);
    }

    #[test]
    fn exists_binder_requires_existential() {
        let s = sig();
        let prog = parse_strategies(
            "strategy S5\nright : exists x, ?x == ?y\naction : instantiate(x -> y);",
            &s,
        )
        .unwrap();
        let e = parse_entailment("forall v0, emp |-- exists v1, v1 == v0", &s).unwrap();
        let all: Vec<_> = match_strategy(&prog.strategies[0], &e).collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].bindings, subst(&[("x", "v1"), ("y", "v0")]));
        let left = parse_entailment("forall v0 v1, v1 == v0 |-- emp", &s).unwrap();
        assert_eq!(match_strategy(&prog.strategies[0], &left).count(), 0);
        let universal = parse_entailment("forall v0 v1, emp |-- v1 == v0", &s).unwrap();
        assert_eq!(match_strategy(&prog.strategies[0], &universal).count(), 0);
    }

    #[test]
    fn injective_on_occurrences() {
        let s = sig();
        let prog = parse_strategies("strategy P\nleft: data_at(?p, ?v0) data_at(?q, ?v1)", &s).unwrap();
        let e = parse_entailment(
            "forall a b c, data_at(a, c) * data_at(b, c) * data_at(a, c) |-- emp",
            &s,
        )
        .unwrap();
        let all: Vec<_> = match_strategy(&prog.strategies[0], &e).collect();
        assert_eq!(all.len(), 6);
        assert!(all.iter().all(|m| m.used[0] != m.used[1]));
        assert_eq!(all[0].used[0].index, 0);
        assert_eq!(all[0].used[1].index, 1);
    }
}
