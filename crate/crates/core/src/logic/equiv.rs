//! Structural equivalence modulo conjunct order, binder order and
//! alpha-renaming of bound names.

use std::collections::BTreeSet;

use super::ast::*;
use super::subst::Substitute;

/// Equal up to conjunct order on each side, order of both binder lists,
/// and a consistent renaming of existentials.
pub fn entailment_equiv(a: &Entailment, b: &Entailment) -> bool {
    let ua: BTreeSet<_> = a.universals.iter().collect();
    let ub: BTreeSet<_> = b.universals.iter().collect();
    if ua != ub
        || a.universals.len() != b.universals.len()
        || a.existentials.len() != b.existentials.len()
        || !heap_multiset_eq(&a.lhs, &b.lhs)
    {
        return false;
    }
    let n = a.existentials.len();
    let canon: Vec<Term> = (0..n).map(|i| Term::var(format!("#{i}"))).collect();
    let ren_a: Subst = a.existentials.iter().cloned().zip(canon.iter().cloned()).collect();
    let rhs_a = a.rhs.substitute(&ren_a);
    let mut found = false;
    permutations(n, &mut |perm| {
        let ren_b: Subst = perm
            .iter()
            .map(|&j| b.existentials[j].clone())
            .zip(canon.iter().cloned())
            .collect();
        if heap_multiset_eq(&rhs_a, &b.rhs.substitute(&ren_b)) {
            found = true;
        }
        found
    });
    found
}

pub fn heap_multiset_eq(a: &SymbolicHeap, b: &SymbolicHeap) -> bool {
    sorted(a.pures()) == sorted(b.pures()) && sorted(a.spatials()) == sorted(b.spatials())
}

fn sorted<T: Ord + Clone>(xs: &[T]) -> Vec<T> {
    let mut v = xs.to_vec();
    v.sort();
    v
}

/// Calls `visit` on each permutation of `0..n` until it returns true.
fn permutations(n: usize, visit: &mut dyn FnMut(&[usize]) -> bool) {
    fn go(current: &mut Vec<usize>, used: &mut Vec<bool>, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if current.len() == used.len() {
            return visit(current);
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                current.push(i);
                let stop = go(current, used, visit);
                current.pop();
                used[i] = false;
                if stop {
                    return true;
                }
            }
        }
        false
    }
    go(&mut Vec::with_capacity(n), &mut vec![false; n], visit);
}

/// Equal up to operand order of `*` and `&&`, binder order within one
/// quantifier, and alpha-renaming.
pub fn assertion_equiv(a: &Assertion, b: &Assertion) -> bool {
    equiv(a, b, &Subst::new(), &Subst::new(), 0)
}

fn equiv(a: &Assertion, b: &Assertion, ren_a: &Subst, ren_b: &Subst, depth: usize) -> bool {
    match (a, b) {
        (Assertion::Pure(p), Assertion::Pure(q)) => p.substitute(ren_a) == q.substitute(ren_b),
        (Assertion::Spatial(p), Assertion::Spatial(q)) => p.substitute(ren_a) == q.substitute(ren_b),
        (Assertion::SepConj(xs), Assertion::SepConj(ys)) | (Assertion::And(xs), Assertion::And(ys)) => {
            if xs.len() != ys.len() {
                return false;
            }
            // Equivalence is an equivalence relation, so greedy pairing suffices.
            let mut used = vec![false; ys.len()];
            xs.iter().all(
                |x| match (0..ys.len()).find(|&j| !used[j] && equiv(x, &ys[j], ren_a, ren_b, depth)) {
                    Some(j) => {
                        used[j] = true;
                        true
                    }
                    None => false,
                },
            )
        }
        (Assertion::Wand(l1, r1), Assertion::Wand(l2, r2)) => {
            equiv(l1, l2, ren_a, ren_b, depth) && equiv(r1, r2, ren_a, ren_b, depth)
        }
        (Assertion::Forall(v1, b1), Assertion::Forall(v2, b2))
        | (Assertion::Exists(v1, b1), Assertion::Exists(v2, b2)) => {
            if v1.len() != v2.len() {
                return false;
            }
            let canon: Vec<Term> = (0..v1.len()).map(|i| Term::var(format!("#{depth}.{i}"))).collect();
            let mut inner_a = ren_a.clone();
            for (v, c) in v1.iter().zip(&canon) {
                inner_a.insert(v.clone(), c.clone());
            }
            let mut found = false;
            permutations(v1.len(), &mut |perm| {
                let mut inner_b = ren_b.clone();
                for (&j, c) in perm.iter().zip(&canon) {
                    inner_b.insert(v2[j].clone(), c.clone());
                }
                found = equiv(b1, b2, &inner_a, &inner_b, depth + 1);
                found
            });
            found
        }
        _ => false,
    }
}
