//! Free variables, capture-avoiding substitution and fresh names.

use std::collections::BTreeSet;

use thiserror::Error;

use super::ast::*;

/// Visits every variable occurrence in textual (left-to-right) order.
pub trait Vars {
    fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a str));

    fn free_vars(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut |v| {
            out.insert(v.to_string());
        });
        out
    }

    /// Distinct variables in order of first occurrence.
    fn vars_in_order(&self) -> Vec<Ident> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.visit_vars(&mut |v| {
            if seen.insert(v) {
                out.push(v.to_string());
            }
        });
        out
    }
}

impl Vars for Term {
    fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a str)) {
        match self {
            Term::Int(_) => {}
            Term::Var(v) => f(v),
            Term::FieldAddr(base, _) => base.visit_vars(f),
            Term::Apply(_, args) => args.iter().for_each(|a| a.visit_vars(f)),
            Term::Arith(_, l, r) => {
                l.visit_vars(f);
                r.visit_vars(f);
            }
        }
    }
}

impl Vars for PureFormula {
    fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a str)) {
        match self {
            PureFormula::True => {}
            PureFormula::Eq(l, r) | PureFormula::Rel(_, l, r) => {
                l.visit_vars(f);
                r.visit_vars(f);
            }
            PureFormula::Not(inner) => inner.visit_vars(f),
            PureFormula::Bin(_, l, r) => {
                l.visit_vars(f);
                r.visit_vars(f);
            }
            PureFormula::Pred(_, args) => args.iter().for_each(|a| a.visit_vars(f)),
        }
    }
}

impl Vars for SpatialAtom {
    fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a str)) {
        match self {
            SpatialAtom::Emp => {}
            SpatialAtom::DataAt(a, v) => {
                a.visit_vars(f);
                v.visit_vars(f);
            }
            SpatialAtom::Pred(_, args) => args.iter().for_each(|a| a.visit_vars(f)),
        }
    }
}

impl Vars for Formula {
    fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a str)) {
        match self {
            Formula::Pure(p) => p.visit_vars(f),
            Formula::Spatial(s) => s.visit_vars(f),
        }
    }
}

impl Vars for SymbolicHeap {
    fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a str)) {
        self.pures().iter().for_each(|p| p.visit_vars(f));
        self.spatials().iter().for_each(|s| s.visit_vars(f));
    }
}

impl<T: Vars> Vars for [T] {
    fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a str)) {
        self.iter().for_each(|x| x.visit_vars(f));
    }
}

impl Assertion {
    /// Free variables in order of first occurrence; binders shadow.
    pub fn free_vars_in_order(&self) -> Vec<Ident> {
        fn go(a: &Assertion, bound: &mut Vec<Ident>, seen: &mut BTreeSet<Ident>, out: &mut Vec<Ident>) {
            let mut record = |v: &str, bound: &Vec<Ident>| {
                if !bound.iter().any(|b| b == v) && seen.insert(v.to_string()) {
                    out.push(v.to_string());
                }
            };
            match a {
                Assertion::Pure(p) => p.visit_vars(&mut |v| record(v, bound)),
                Assertion::Spatial(s) => s.visit_vars(&mut |v| record(v, bound)),
                Assertion::SepConj(parts) | Assertion::And(parts) => {
                    for part in parts {
                        go(part, bound, seen, out);
                    }
                }
                Assertion::Wand(l, r) => {
                    go(l, bound, seen, out);
                    go(r, bound, seen, out);
                }
                Assertion::Forall(vars, body) | Assertion::Exists(vars, body) => {
                    let depth = bound.len();
                    bound.extend(vars.iter().cloned());
                    go(body, bound, seen, out);
                    bound.truncate(depth);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut BTreeSet::new(), &mut out);
        out
    }

    pub fn free_vars(&self) -> BTreeSet<Ident> {
        self.free_vars_in_order().into_iter().collect()
    }

    /// Every name appearing anywhere, bound or free.
    pub fn all_names(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<Ident>) {
        match self {
            Assertion::Pure(p) => out.extend(p.free_vars()),
            Assertion::Spatial(s) => out.extend(s.free_vars()),
            Assertion::SepConj(parts) | Assertion::And(parts) => parts.iter().for_each(|p| p.collect_names(out)),
            Assertion::Wand(l, r) => {
                l.collect_names(out);
                r.collect_names(out);
            }
            Assertion::Forall(vars, body) | Assertion::Exists(vars, body) => {
                out.extend(vars.iter().cloned());
                body.collect_names(out);
            }
        }
    }
}

/// Simultaneous substitution on binder-free syntax.
pub trait Substitute: Sized {
    fn substitute(&self, map: &Subst) -> Self;
}

impl Substitute for Term {
    fn substitute(&self, map: &Subst) -> Self {
        match self {
            Term::Int(_) => self.clone(),
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::FieldAddr(base, field) => Term::FieldAddr(Box::new(base.substitute(map)), field.clone()),
            Term::Apply(name, args) => Term::Apply(name.clone(), args.iter().map(|a| a.substitute(map)).collect()),
            Term::Arith(op, l, r) => Term::arith(*op, l.substitute(map), r.substitute(map)),
        }
    }
}

impl Substitute for PureFormula {
    fn substitute(&self, map: &Subst) -> Self {
        match self {
            PureFormula::True => PureFormula::True,
            PureFormula::Eq(l, r) => PureFormula::Eq(l.substitute(map), r.substitute(map)),
            PureFormula::Rel(op, l, r) => PureFormula::Rel(*op, l.substitute(map), r.substitute(map)),
            PureFormula::Not(inner) => PureFormula::not(inner.substitute(map)),
            PureFormula::Bin(op, l, r) => PureFormula::bin(*op, l.substitute(map), r.substitute(map)),
            PureFormula::Pred(name, args) => {
                PureFormula::Pred(name.clone(), args.iter().map(|a| a.substitute(map)).collect())
            }
        }
    }
}

impl Substitute for SpatialAtom {
    fn substitute(&self, map: &Subst) -> Self {
        match self {
            SpatialAtom::Emp => SpatialAtom::Emp,
            SpatialAtom::DataAt(a, v) => SpatialAtom::DataAt(a.substitute(map), v.substitute(map)),
            SpatialAtom::Pred(name, args) => {
                SpatialAtom::Pred(name.clone(), args.iter().map(|a| a.substitute(map)).collect())
            }
        }
    }
}

impl Substitute for Formula {
    fn substitute(&self, map: &Subst) -> Self {
        match self {
            Formula::Pure(p) => Formula::Pure(p.substitute(map)),
            Formula::Spatial(s) => Formula::Spatial(s.substitute(map)),
        }
    }
}

impl Substitute for SymbolicHeap {
    fn substitute(&self, map: &Subst) -> Self {
        self.map_terms(|f| f.substitute(map))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("binder `{binder}` would capture a free variable of the substituted term for `{var}`")]
pub struct CaptureError {
    pub binder: Ident,
    pub var: Ident,
}

impl Assertion {
    /// Capture-avoiding simultaneous substitution. Binders shadow mapped
    /// variables. A binder that would capture a free variable of an
    /// inserted term is renamed when `rename` is set, otherwise the call
    /// fails.
    pub fn substitute(&self, map: &Subst, rename: bool) -> Result<Assertion, CaptureError> {
        Ok(match self {
            Assertion::Pure(p) => Assertion::Pure(p.substitute(map)),
            Assertion::Spatial(s) => Assertion::Spatial(s.substitute(map)),
            Assertion::SepConj(parts) => Assertion::SepConj(
                parts
                    .iter()
                    .map(|p| p.substitute(map, rename))
                    .collect::<Result<_, _>>()?,
            ),
            Assertion::And(parts) => Assertion::And(
                parts
                    .iter()
                    .map(|p| p.substitute(map, rename))
                    .collect::<Result<_, _>>()?,
            ),
            Assertion::Wand(l, r) => Assertion::wand(l.substitute(map, rename)?, r.substitute(map, rename)?),
            Assertion::Forall(vars, body) => {
                let (vars, body) = substitute_under_binder(vars, body, map, rename)?;
                Assertion::forall(vars, body)
            }
            Assertion::Exists(vars, body) => {
                let (vars, body) = substitute_under_binder(vars, body, map, rename)?;
                Assertion::exists(vars, body)
            }
        })
    }
}

fn substitute_under_binder(
    vars: &[Ident],
    body: &Assertion,
    map: &Subst,
    rename: bool,
) -> Result<(Vec<Ident>, Assertion), CaptureError> {
    let body_free = body.free_vars();
    let mut inner: Subst = map
        .iter()
        .filter(|(k, _)| !vars.contains(k) && body_free.contains(*k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    let mut incoming = BTreeSet::new();
    for term in inner.values() {
        incoming.extend(term.free_vars());
    }
    let mut new_vars = Vec::with_capacity(vars.len());
    let mut renaming = Subst::new();
    for v in vars {
        if incoming.contains(v) {
            if !rename {
                let var = inner
                    .iter()
                    .find(|(_, t)| t.free_vars().contains(v))
                    .map(|(k, _)| k.clone())
                    .unwrap_or_default();
                return Err(CaptureError { binder: v.clone(), var });
            }
            let mut avoid = incoming.clone();
            avoid.extend(body.all_names());
            avoid.extend(vars.iter().cloned());
            avoid.extend(new_vars.iter().cloned());
            avoid.extend(inner.keys().cloned());
            let fresh = fresh_name(v, &avoid);
            renaming.insert(v.clone(), Term::Var(fresh.clone()));
            new_vars.push(fresh);
        } else {
            new_vars.push(v.clone());
        }
    }
    let body = if renaming.is_empty() {
        body.clone()
    } else {
        body.substitute(&renaming, rename)?
    };
    inner.retain(|k, _| !new_vars.contains(k));
    Ok((new_vars, body.substitute(&inner, rename)?))
}

/// `base` itself when unused, else `base'k` for the smallest `k >= 1`
/// not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<Ident>) -> Ident {
    if !avoid.contains(base) {
        return base.to_string();
    }
    (1u64..)
        .map(|k| format!("{base}'{k}"))
        .find(|candidate| !avoid.contains(candidate))
        .expect("unbounded suffix search")
}
