//! Object language: terms, pure and spatial formulas, symbolic heaps,
//! entailments, and the richer assertion language used for soundness
//! conditions.

use std::collections::BTreeMap;

pub type Ident = String;

/// Simultaneous substitution from variable names to terms.
pub type Subst = BTreeMap<Ident, Term>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Int(i64),
    Var(Ident),
    /// `&(base->field)`, written `field_addr(base, field)`.
    FieldAddr(Box<Term>, Ident),
    Apply(Ident, Vec<Term>),
    Arith(ArithOp, Box<Term>, Box<Term>),
}

#[allow(clippy::should_implement_trait)]
impl Term {
    pub fn var(name: impl Into<Ident>) -> Term {
        Term::Var(name.into())
    }

    pub fn int(value: i64) -> Term {
        Term::Int(value)
    }

    pub fn apply(name: impl Into<Ident>, args: Vec<Term>) -> Term {
        Term::Apply(name.into(), args)
    }

    pub fn field_addr(base: Term, field: impl Into<Ident>) -> Term {
        Term::FieldAddr(Box::new(base), field.into())
    }

    pub fn arith(op: ArithOp, l: Term, r: Term) -> Term {
        Term::Arith(op, Box::new(l), Box::new(r))
    }

    pub fn add(l: Term, r: Term) -> Term {
        Term::arith(ArithOp::Add, l, r)
    }

    pub fn sub(l: Term, r: Term) -> Term {
        Term::arith(ArithOp::Sub, l, r)
    }

    pub fn mul(l: Term, r: Term) -> Term {
        Term::arith(ArithOp::Mul, l, r)
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(name) => Some(name),
            _ => None,
        }
    }

    /// Number of nodes in the term tree.
    pub fn size(&self) -> usize {
        match self {
            Term::Int(_) | Term::Var(_) => 1,
            Term::FieldAddr(base, _) => 1 + base.size(),
            Term::Apply(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Term::Arith(_, l, r) => 1 + l.size() + r.size(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelOp {
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Ne => "!=",
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    And,
    Or,
    Implies,
    Iff,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Implies => "->",
            BinOp::Iff => "<->",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PureFormula {
    True,
    Eq(Term, Term),
    Rel(RelOp, Term, Term),
    Not(Box<PureFormula>),
    Bin(BinOp, Box<PureFormula>, Box<PureFormula>),
    Pred(Ident, Vec<Term>),
}

#[allow(clippy::should_implement_trait)]
impl PureFormula {
    pub fn eq(l: Term, r: Term) -> PureFormula {
        PureFormula::Eq(l, r)
    }

    pub fn rel(op: RelOp, l: Term, r: Term) -> PureFormula {
        PureFormula::Rel(op, l, r)
    }

    pub fn not(inner: PureFormula) -> PureFormula {
        PureFormula::Not(Box::new(inner))
    }

    pub fn bin(op: BinOp, l: PureFormula, r: PureFormula) -> PureFormula {
        PureFormula::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn pred(name: impl Into<Ident>, args: Vec<Term>) -> PureFormula {
        PureFormula::Pred(name.into(), args)
    }

    pub fn is_atom(&self) -> bool {
        matches!(
            self,
            PureFormula::True | PureFormula::Eq(..) | PureFormula::Rel(..) | PureFormula::Pred(..)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpatialAtom {
    Emp,
    /// Points-to: the cell at `addr` holds `value`.
    DataAt(Term, Term),
    Pred(Ident, Vec<Term>),
}

impl SpatialAtom {
    pub fn data_at(addr: Term, value: Term) -> SpatialAtom {
        SpatialAtom::DataAt(addr, value)
    }

    pub fn pred(name: impl Into<Ident>, args: Vec<Term>) -> SpatialAtom {
        SpatialAtom::Pred(name.into(), args)
    }
}

/// Either kind of conjunct.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Pure(PureFormula),
    Spatial(SpatialAtom),
}

impl From<PureFormula> for Formula {
    fn from(p: PureFormula) -> Self {
        Formula::Pure(p)
    }
}

impl From<SpatialAtom> for Formula {
    fn from(s: SpatialAtom) -> Self {
        Formula::Spatial(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn keyword(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// Conjunction of pure formulas and separating conjunction of spatial
/// atoms. Both parts are multisets kept in insertion order; `emp` is never
/// stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SymbolicHeap {
    pures: Vec<PureFormula>,
    spatials: Vec<SpatialAtom>,
}

impl SymbolicHeap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_parts(pures: Vec<PureFormula>, spatials: Vec<SpatialAtom>) -> Self {
        let mut heap = SymbolicHeap {
            pures,
            spatials: Vec::with_capacity(spatials.len()),
        };
        for s in spatials {
            heap.push_spatial(s);
        }
        heap
    }

    pub fn pures(&self) -> &[PureFormula] {
        &self.pures
    }

    pub fn spatials(&self) -> &[SpatialAtom] {
        &self.spatials
    }

    pub fn is_empty(&self) -> bool {
        self.pures.is_empty() && self.spatials.is_empty()
    }

    pub fn is_pure(&self) -> bool {
        self.spatials.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pures.len() + self.spatials.len()
    }

    pub fn push_pure(&mut self, p: PureFormula) {
        self.pures.push(p);
    }

    pub fn push_spatial(&mut self, s: SpatialAtom) {
        if s != SpatialAtom::Emp {
            self.spatials.push(s);
        }
    }

    pub fn insert(&mut self, f: Formula) {
        match f {
            Formula::Pure(p) => self.push_pure(p),
            Formula::Spatial(s) => self.push_spatial(s),
        }
    }

    /// Removes the first occurrence structurally equal to `f`. Erasing
    /// `emp` always succeeds.
    pub fn remove(&mut self, f: &Formula) -> bool {
        match f {
            Formula::Pure(p) => remove_first(&mut self.pures, p),
            Formula::Spatial(SpatialAtom::Emp) => true,
            Formula::Spatial(s) => remove_first(&mut self.spatials, s),
        }
    }

    pub fn contains_pure(&self, p: &PureFormula) -> bool {
        self.pures.contains(p)
    }

    pub fn map_terms(&self, mut f: impl FnMut(&Formula) -> Formula) -> SymbolicHeap {
        let mut out = SymbolicHeap::new();
        for p in &self.pures {
            out.insert(f(&Formula::Pure(p.clone())));
        }
        for s in &self.spatials {
            out.insert(f(&Formula::Spatial(s.clone())));
        }
        out
    }
}

fn remove_first<T: PartialEq>(items: &mut Vec<T>, target: &T) -> bool {
    match items.iter().position(|x| x == target) {
        Some(i) => {
            items.remove(i);
            true
        }
        None => false,
    }
}

/// `forall universals, lhs |-- exists existentials, rhs`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Entailment {
    pub universals: Vec<Ident>,
    pub lhs: SymbolicHeap,
    pub existentials: Vec<Ident>,
    pub rhs: SymbolicHeap,
}

impl Entailment {
    pub fn heap(&self, side: Side) -> &SymbolicHeap {
        match side {
            Side::Left => &self.lhs,
            Side::Right => &self.rhs,
        }
    }

    pub fn heap_mut(&mut self, side: Side) -> &mut SymbolicHeap {
        match side {
            Side::Left => &mut self.lhs,
            Side::Right => &mut self.rhs,
        }
    }

    pub fn is_purified(&self) -> bool {
        self.lhs.is_pure() && self.rhs.is_pure()
    }
}

/// Separation-logic assertions with magic wand and quantifiers. Only
/// soundness conditions use this language.
///
/// Conjunctions are always `And`; `Pure` never wraps a `BinOp::And`
/// formula once built through [`Assertion::pure`] or the parser.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Assertion {
    Pure(PureFormula),
    Spatial(SpatialAtom),
    SepConj(Vec<Assertion>),
    And(Vec<Assertion>),
    Wand(Box<Assertion>, Box<Assertion>),
    Forall(Vec<Ident>, Box<Assertion>),
    Exists(Vec<Ident>, Box<Assertion>),
}

impl Assertion {
    /// Lifts a pure formula, splitting top-level conjunctions into `And`.
    pub fn pure(p: PureFormula) -> Assertion {
        match p {
            PureFormula::Bin(BinOp::And, l, r) => Assertion::And(vec![Assertion::pure(*l), Assertion::pure(*r)]),
            other => Assertion::Pure(other),
        }
    }

    pub fn spatial(s: SpatialAtom) -> Assertion {
        Assertion::Spatial(s)
    }

    pub fn formula(f: Formula) -> Assertion {
        match f {
            Formula::Pure(p) => Assertion::pure(p),
            Formula::Spatial(s) => Assertion::Spatial(s),
        }
    }

    pub fn wand(l: Assertion, r: Assertion) -> Assertion {
        Assertion::Wand(Box::new(l), Box::new(r))
    }

    pub fn forall(vars: Vec<Ident>, body: Assertion) -> Assertion {
        Assertion::Forall(vars, Box::new(body))
    }

    pub fn exists(vars: Vec<Ident>, body: Assertion) -> Assertion {
        Assertion::Exists(vars, Box::new(body))
    }

    pub fn emp() -> Assertion {
        Assertion::Spatial(SpatialAtom::Emp)
    }

    pub fn truth() -> Assertion {
        Assertion::Pure(PureFormula::True)
    }
}

/// `hypothesis |-- conclusion`, implicitly closed over `free_vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoundnessCondition {
    pub hypothesis: Assertion,
    pub conclusion: Assertion,
    pub free_vars: Vec<Ident>,
}
