//! Unit and flattening laws for assertions. Nothing deeper than that.

use super::ast::{Assertion, BinOp, PureFormula, SpatialAtom};

pub fn normalize(a: &Assertion) -> Assertion {
    match a {
        Assertion::Pure(p @ PureFormula::Bin(BinOp::And, ..)) => normalize(&Assertion::pure(p.clone())),
        Assertion::Pure(_) | Assertion::Spatial(_) => a.clone(),
        Assertion::SepConj(parts) => {
            let mut flat = Vec::new();
            for part in parts {
                match normalize(part) {
                    Assertion::SepConj(inner) => flat.extend(inner),
                    Assertion::Spatial(SpatialAtom::Emp) => {}
                    other => flat.push(other),
                }
            }
            collapse(flat, Assertion::emp(), Assertion::SepConj)
        }
        Assertion::And(parts) => {
            let mut flat = Vec::new();
            for part in parts {
                match normalize(part) {
                    Assertion::And(inner) => flat.extend(inner),
                    Assertion::Pure(PureFormula::True) => {}
                    other => flat.push(other),
                }
            }
            collapse(flat, Assertion::truth(), Assertion::And)
        }
        Assertion::Wand(l, r) => Assertion::wand(normalize(l), normalize(r)),
        Assertion::Forall(vars, body) if vars.is_empty() => normalize(body),
        Assertion::Exists(vars, body) if vars.is_empty() => normalize(body),
        Assertion::Forall(vars, body) => Assertion::forall(vars.clone(), normalize(body)),
        Assertion::Exists(vars, body) => Assertion::exists(vars.clone(), normalize(body)),
    }
}

fn collapse(mut parts: Vec<Assertion>, unit: Assertion, build: fn(Vec<Assertion>) -> Assertion) -> Assertion {
    match parts.len() {
        0 => unit,
        1 => parts.pop().unwrap(),
        _ => build(parts),
    }
}
