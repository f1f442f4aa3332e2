//! Helpers and independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use purify_core::corpus::{ARRAY_SIG, ARRAY_STG, COMMON_STG, SLL_SIG, SLL_STG};
use purify_core::frontend::{parse_signature, parse_strategies, Program, Strategy};
use purify_core::logic::*;
use purify_core::matcher::{ConjunctKind, ConjunctRef};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Every shipped declaration.
pub fn full_sig() -> Signature {
    parse_signature(SLL_SIG)
        .unwrap()
        .merge(&parse_signature(ARRAY_SIG).unwrap())
        .unwrap()
}

/// Every shipped strategy, in file order.
pub fn full_program(sig: &Signature) -> Program {
    [SLL_STG, ARRAY_STG, COMMON_STG]
        .iter()
        .map(|text| parse_strategies(text, sig).unwrap())
        .try_fold(Program::default(), Program::concat)
        .unwrap()
}

// ---- brute-force matcher ----

/// Uniform tree view of formulas; variables have heads starting with `$`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    head: String,
    kids: Vec<Tree>,
}

fn node(head: impl Into<String>, kids: Vec<Tree>) -> Tree {
    Tree {
        head: head.into(),
        kids,
    }
}

pub fn term_tree(t: &Term) -> Tree {
    match t {
        Term::Int(k) => node(format!("#{k}"), vec![]),
        Term::Var(x) => node(format!("${x}"), vec![]),
        Term::FieldAddr(b, f) => node(format!("&{f}"), vec![term_tree(b)]),
        Term::Apply(f, args) => node(format!("f:{f}"), args.iter().map(term_tree).collect()),
        Term::Arith(op, l, r) => node(format!("op:{op:?}"), vec![term_tree(l), term_tree(r)]),
    }
}

fn pure_tree(p: &PureFormula) -> Tree {
    match p {
        PureFormula::True => node("True", vec![]),
        PureFormula::Eq(l, r) => node("==", vec![term_tree(l), term_tree(r)]),
        PureFormula::Rel(op, l, r) => node(format!("rel:{op:?}"), vec![term_tree(l), term_tree(r)]),
        PureFormula::Not(q) => node("!", vec![pure_tree(q)]),
        PureFormula::Bin(op, l, r) => node(format!("bin:{op:?}"), vec![pure_tree(l), pure_tree(r)]),
        PureFormula::Pred(n, args) => node(format!("p:{n}"), args.iter().map(term_tree).collect()),
    }
}

pub fn formula_tree(f: &Formula) -> Tree {
    match f {
        Formula::Pure(p) => pure_tree(p),
        Formula::Spatial(SpatialAtom::Emp) => node("emp", vec![]),
        Formula::Spatial(SpatialAtom::DataAt(a, v)) => node("data_at", vec![term_tree(a), term_tree(v)]),
        Formula::Spatial(SpatialAtom::Pred(n, args)) => node(format!("s:{n}"), args.iter().map(term_tree).collect()),
    }
}

fn tree_match(pat: &Tree, target: &Tree, sigma: &mut BTreeMap<String, Tree>) -> bool {
    if let Some(x) = pat.head.strip_prefix('$') {
        return match sigma.get(x) {
            Some(bound) => bound == target,
            None => {
                sigma.insert(x.to_string(), target.clone());
                true
            }
        };
    }
    pat.head == target.head
        && pat.kids.len() == target.kids.len()
        && pat.kids.iter().zip(&target.kids).all(|(p, t)| tree_match(p, t, sigma))
}

/// Every conjunct occurrence of `e`, with its reference.
pub fn occurrences(e: &Entailment, side: Side, kind: ConjunctKind) -> Vec<(ConjunctRef, Formula)> {
    let heap = e.heap(side);
    let fs: Vec<Formula> = match kind {
        ConjunctKind::Pure => heap.pures().iter().cloned().map(Formula::Pure).collect(),
        ConjunctKind::Spatial => heap.spatials().iter().cloned().map(Formula::Spatial).collect(),
    };
    fs.into_iter()
        .enumerate()
        .map(|(index, f)| (ConjunctRef { side, kind, index }, f))
        .collect()
}

pub type OracleMatch = (BTreeMap<String, Tree>, Vec<ConjunctRef>);

/// All injective assignments of patterns to occurrences, in lexicographic
/// order of occurrence indices, that match and respect `exists` binders.
pub fn brute_matches(s: &Strategy, e: &Entailment) -> Vec<OracleMatch> {
    let candidates: Vec<Vec<(ConjunctRef, Formula)>> = s
        .patterns
        .iter()
        .map(|p| {
            let kind = match p.atom {
                Formula::Pure(_) => ConjunctKind::Pure,
                Formula::Spatial(_) => ConjunctKind::Spatial,
            };
            occurrences(e, p.side, kind)
        })
        .collect();
    let mut out = Vec::new();
    let mut choice = Vec::new();
    assign(s, e, &candidates, &mut choice, &mut out);
    out
}

fn assign(
    s: &Strategy,
    e: &Entailment,
    candidates: &[Vec<(ConjunctRef, Formula)>],
    choice: &mut Vec<usize>,
    out: &mut Vec<OracleMatch>,
) {
    let depth = choice.len();
    if depth == candidates.len() {
        let mut sigma = BTreeMap::new();
        for (k, &c) in choice.iter().enumerate() {
            if !tree_match(
                &formula_tree(&s.patterns[k].atom),
                &formula_tree(&candidates[k][c].1),
                &mut sigma,
            ) {
                return;
            }
        }
        let binders_ok = s.patterns.iter().flat_map(|p| &p.exists_binders).all(|x| {
            sigma.get(x).is_some_and(|t| {
                t.kids.is_empty()
                    && t.head
                        .strip_prefix('$')
                        .is_some_and(|v| e.existentials.iter().any(|y| y == v))
            })
        });
        if binders_ok {
            let used = choice.iter().enumerate().map(|(k, &c)| candidates[k][c].0).collect();
            out.push((sigma, used));
        }
        return;
    }
    for c in 0..candidates[depth].len() {
        let r = candidates[depth][c].0;
        if choice.iter().enumerate().any(|(k, &prev)| candidates[k][prev].0 == r) {
            continue;
        }
        choice.push(c);
        assign(s, e, candidates, choice, out);
        choice.pop();
    }
}

// ---- random entailments ----

const UNIV: &[&str] = &["a", "b", "i", "n", "l"];
const EXIST: &[&str] = &["u", "v", "w"];

fn pick<'a>(rng: &mut ChaCha8Rng, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).unwrap()
}

fn var(rng: &mut ChaCha8Rng, right: bool) -> Term {
    if right && rng.gen_bool(0.4) {
        Term::var(pick(rng, EXIST))
    } else {
        Term::var(pick(rng, UNIV))
    }
}

fn small_term(rng: &mut ChaCha8Rng, right: bool) -> Term {
    match rng.gen_range(0..6) {
        0 => Term::int(rng.gen_range(0..2)),
        1 => Term::apply("app", vec![var(rng, right), var(rng, right)]),
        _ => var(rng, right),
    }
}

fn address(rng: &mut ChaCha8Rng, right: bool) -> Term {
    if rng.gen_bool(0.5) {
        Term::add(var(rng, right), Term::mul(Term::int(4), Term::var("i")))
    } else {
        var(rng, right)
    }
}

fn spatial(rng: &mut ChaCha8Rng, right: bool) -> SpatialAtom {
    let mut v = || var(rng, right);
    let a = v();
    let b = v();
    let c = v();
    match rng.gen_range(0..5) {
        0 => SpatialAtom::pred("lseg", vec![a, b, c]),
        1 => SpatialAtom::pred("listrep", vec![a, b]),
        2 => SpatialAtom::pred("store_array", vec![a, Term::int(0), Term::var("n"), b]),
        3 => SpatialAtom::pred(
            "store_array_hole",
            vec![a, Term::int(0), Term::var("n"), Term::var("i"), b],
        ),
        _ => SpatialAtom::data_at(address(rng, right), small_term(rng, right)),
    }
}

fn pure(rng: &mut ChaCha8Rng, right: bool) -> PureFormula {
    let l = small_term(rng, right);
    let r = if rng.gen_bool(0.3) {
        l.clone()
    } else {
        small_term(rng, right)
    };
    match rng.gen_range(0..4) {
        0 | 1 => PureFormula::eq(l, r),
        2 => PureFormula::rel(RelOp::Ne, l, r),
        _ => PureFormula::rel(RelOp::Le, l, r),
    }
}

fn heap(rng: &mut ChaCha8Rng, right: bool) -> SymbolicHeap {
    let mut h = SymbolicHeap::new();
    for _ in 0..rng.gen_range(0..=6) {
        if rng.gen_bool(0.6) {
            h.push_spatial(spatial(rng, right));
        } else {
            h.push_pure(pure(rng, right));
        }
    }
    h
}

/// A well-formed entailment with at most six conjuncts per side over the
/// shipped predicate symbols.
pub fn random_entailment(rng: &mut ChaCha8Rng) -> Entailment {
    Entailment {
        universals: UNIV.iter().map(|s| s.to_string()).collect(),
        lhs: heap(rng, false),
        existentials: EXIST.iter().map(|s| s.to_string()).collect(),
        rhs: heap(rng, true),
    }
}

// ---- finite-model oracle for pure queries ----

pub const BOUND: i64 = 3;
pub const CARRIER: [i64; 3] = [-1, 0, 1];
pub const QUERY_VARS: [&str; 3] = ["x", "y", "z"];

type Table = BTreeMap<(String, i64), i64>;

enum Eval<T> {
    Value(T),
    /// The interpretation of `f` at this argument is not chosen yet.
    Need(String, i64),
}

fn eval_term(t: &Term, env: &BTreeMap<&str, i64>, table: &Table) -> Eval<i64> {
    use Eval::*;
    macro_rules! get {
        ($e:expr) => {
            match $e {
                Value(v) => v,
                Need(f, a) => return Need(f, a),
            }
        };
    }
    match t {
        Term::Int(k) => Value(*k),
        Term::Var(x) => Value(env[x.as_str()]),
        Term::Apply(f, args) => {
            assert_eq!(args.len(), 1, "unary functions only");
            let a = get!(eval_term(&args[0], env, table));
            match table.get(&(f.clone(), a)) {
                Some(&v) => Value(v),
                None => Need(f.clone(), a),
            }
        }
        Term::Arith(op, l, r) => {
            let l = get!(eval_term(l, env, table));
            let r = get!(eval_term(r, env, table));
            Value(match op {
                ArithOp::Add => l + r,
                ArithOp::Sub => l - r,
                ArithOp::Mul => l * r,
            })
        }
        Term::FieldAddr(..) => panic!("no field addresses in pure queries"),
    }
}

fn eval_pure(p: &PureFormula, env: &BTreeMap<&str, i64>, table: &Table) -> Eval<bool> {
    use Eval::*;
    macro_rules! get {
        ($e:expr) => {
            match $e {
                Value(v) => v,
                Need(f, a) => return Need(f, a),
            }
        };
    }
    match p {
        PureFormula::True => Value(true),
        PureFormula::Eq(l, r) => Value(get!(eval_term(l, env, table)) == get!(eval_term(r, env, table))),
        PureFormula::Rel(op, l, r) => {
            let (l, r) = (get!(eval_term(l, env, table)), get!(eval_term(r, env, table)));
            Value(match op {
                RelOp::Ne => l != r,
                RelOp::Lt => l < r,
                RelOp::Le => l <= r,
                RelOp::Gt => l > r,
                RelOp::Ge => l >= r,
            })
        }
        PureFormula::Not(q) => Value(!get!(eval_pure(q, env, table))),
        PureFormula::Bin(BinOp::And, l, r) => {
            if !get!(eval_pure(l, env, table)) {
                return Value(false);
            }
            eval_pure(r, env, table)
        }
        PureFormula::Bin(op, l, r) => {
            let (l, r) = (get!(eval_pure(l, env, table)), get!(eval_pure(r, env, table)));
            Value(match op {
                BinOp::And => l && r,
                BinOp::Or => l || r,
                BinOp::Implies => !l || r,
                BinOp::Iff => l == r,
            })
        }
        PureFormula::Pred(..) => panic!("no predicates in pure queries"),
    }
}

/// Whether some interpretation extending `table` satisfies every hypothesis and falsifies the goal.
fn countermodel_from(hyps: &[PureFormula], goal: &PureFormula, env: &BTreeMap<&str, i64>, table: &mut Table) -> bool {
    let mut all = hyps.to_vec();
    all.push(PureFormula::not(goal.clone()));
    let conj = all
        .into_iter()
        .reduce(|a, b| PureFormula::bin(BinOp::And, a, b))
        .unwrap();
    match eval_pure(&conj, env, table) {
        Eval::Value(v) => v,
        Eval::Need(f, a) => CARRIER.iter().any(|&c| {
            table.insert((f.clone(), a), c);
            let found = countermodel_from(hyps, goal, env, table);
            table.remove(&(f.clone(), a));
            found
        }),
    }
}

/// A falsifying assignment of `x y z` over `[-BOUND, BOUND]`, with
/// uninterpreted functions ranging over `CARRIER`.
pub fn find_countermodel(hyps: &[PureFormula], goal: &PureFormula) -> Option<[i64; 3]> {
    for x in -BOUND..=BOUND {
        for y in -BOUND..=BOUND {
            for z in -BOUND..=BOUND {
                let env = BTreeMap::from([("x", x), ("y", y), ("z", z)]);
                if countermodel_from(hyps, goal, &env, &mut Table::new()) {
                    return Some([x, y, z]);
                }
            }
        }
    }
    None
}

fn query_term(rng: &mut ChaCha8Rng, depth: u32) -> Term {
    let leaf = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.75) {
            Term::var(QUERY_VARS[rng.gen_range(0..3)])
        } else {
            Term::int(rng.gen_range(-2..=2))
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..8) {
        0 => Term::apply("f", vec![query_term(rng, depth - 1)]),
        1 => Term::apply("g", vec![query_term(rng, depth - 1)]),
        2 => Term::add(query_term(rng, depth - 1), query_term(rng, depth - 1)),
        3 => Term::sub(query_term(rng, depth - 1), leaf(rng)),
        4 => Term::mul(Term::int(rng.gen_range(-2..=3)), query_term(rng, depth - 1)),
        _ => leaf(rng),
    }
}

pub fn query_atom(rng: &mut ChaCha8Rng) -> PureFormula {
    let l = query_term(rng, 2);
    let r = query_term(rng, 1);
    match rng.gen_range(0..7) {
        0 | 1 => PureFormula::eq(l, r),
        2 => PureFormula::rel(RelOp::Ne, l, r),
        3 => PureFormula::rel(RelOp::Lt, l, r),
        4 => PureFormula::rel(RelOp::Le, l, r),
        5 => PureFormula::rel(RelOp::Gt, l, r),
        _ => PureFormula::rel(RelOp::Ge, l, r),
    }
}

/// Hypotheses plus a goal that often follows from them: either a random
/// atom, or a hypothesis with its sides rewritten by another equation.
pub fn random_query(rng: &mut ChaCha8Rng) -> (Vec<PureFormula>, PureFormula) {
    let hyps: Vec<PureFormula> = (0..rng.gen_range(1..=4)).map(|_| query_atom(rng)).collect();
    let goal = match rng.gen_range(0..3) {
        0 => query_atom(rng),
        1 => {
            // combine two hypotheses' terms
            let h = &hyps[rng.gen_range(0..hyps.len())];
            match h {
                PureFormula::Eq(l, r) => {
                    PureFormula::eq(Term::apply("f", vec![r.clone()]), Term::apply("f", vec![l.clone()]))
                }
                PureFormula::Rel(RelOp::Lt, l, r) => {
                    PureFormula::rel(RelOp::Le, Term::add(l.clone(), Term::int(1)), r.clone())
                }
                PureFormula::Rel(RelOp::Le, l, r) => {
                    PureFormula::rel(RelOp::Lt, l.clone(), Term::add(r.clone(), Term::int(1)))
                }
                PureFormula::Rel(op, l, r) => PureFormula::rel(*op, Term::add(l.clone(), Term::int(0)), r.clone()),
                other => other.clone(),
            }
        }
        _ => {
            let a = query_atom(rng);
            let b = query_atom(rng);
            PureFormula::bin(BinOp::And, a, b)
        }
    };
    (hyps, goal)
}

/// Signature for pure queries: the two unary functions.
pub fn query_sig() -> Signature {
    parse_signature("func f/1; func g/1;").unwrap()
}
