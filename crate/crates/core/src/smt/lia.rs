//! Integer infeasibility by equality elimination and Fourier–Motzkin.
//!
//! Constraints are `sum(a_i * x_i) + c <= 0` or `== 0`. The procedure only
//! ever answers "infeasible" when a closed refutation was derived; overflow
//! and blow-up give up and report "maybe feasible".

use std::collections::{BTreeMap, BTreeSet};

const MAX_CONSTRAINTS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Linear {
    pub coeffs: BTreeMap<usize, i128>,
    pub constant: i128,
}

impl Linear {
    pub fn constant(c: i128) -> Self {
        Linear {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(x: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(x, 1);
        Linear { coeffs, constant: 0 }
    }

    pub fn scale(&self, k: i128) -> Option<Linear> {
        let mut out = Linear::constant(self.constant.checked_mul(k)?);
        if k != 0 {
            for (&x, &a) in &self.coeffs {
                out.coeffs.insert(x, a.checked_mul(k)?);
            }
        }
        Some(out)
    }

    /// `self + k * other`
    pub fn add_scaled(&self, other: &Linear, k: i128) -> Option<Linear> {
        let mut out = self.clone();
        out.constant = out.constant.checked_add(other.constant.checked_mul(k)?)?;
        for (&x, &a) in &other.coeffs {
            let entry = out.coeffs.entry(x).or_insert(0);
            *entry = entry.checked_add(a.checked_mul(k)?)?;
            if *entry == 0 {
                out.coeffs.remove(&x);
            }
        }
        Some(out)
    }

    pub fn coeff(&self, x: usize) -> i128 {
        self.coeffs.get(&x).copied().unwrap_or(0)
    }

    fn gcd(&self) -> i128 {
        self.coeffs.values().fold(0, |g, &a| gcd(g, a.abs()))
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

enum Outcome {
    Infeasible,
    Open,
}

/// True if no integer point satisfies all `eqs` (`== 0`) and `ineqs` (`<= 0`).
pub fn infeasible(eqs: &[Linear], ineqs: &[Linear]) -> bool {
    matches!(solve(eqs.to_vec(), ineqs.to_vec()), Some(Outcome::Infeasible))
}

fn solve(mut eqs: Vec<Linear>, mut ineqs: Vec<Linear>) -> Option<Outcome> {
    while let Some(eq) = eqs.pop() {
        if eq.coeffs.is_empty() {
            if eq.constant != 0 {
                return Some(Outcome::Infeasible);
            }
            continue;
        }
        let g = eq.gcd();
        if eq.constant % g != 0 {
            return Some(Outcome::Infeasible);
        }
        let (&x, &a) = eq.coeffs.iter().min_by_key(|(_, a)| a.abs())?;
        // Eliminate x: other := |a| * other - sign(a) * b * eq
        let eliminate = |c: &Linear| -> Option<Linear> {
            let b = c.coeff(x);
            if b == 0 {
                return Some(c.clone());
            }
            c.scale(a.abs())?.add_scaled(&eq, -a.signum() * b)
        };
        eqs = eqs.iter().map(eliminate).collect::<Option<_>>()?;
        ineqs = ineqs.iter().map(eliminate).collect::<Option<_>>()?;
    }
    fourier_motzkin(ineqs)
}

fn tighten(c: Linear) -> Linear {
    let g = c.gcd();
    if g <= 1 {
        return c;
    }
    // sum(a/g x) <= -c/g  ==>  sum(a/g x) <= floor(-c/g)
    let mut out = Linear::constant(-(-c.constant).div_euclid(g));
    for (x, a) in c.coeffs {
        out.coeffs.insert(x, a / g);
    }
    out
}

fn fourier_motzkin(ineqs: Vec<Linear>) -> Option<Outcome> {
    let mut set: BTreeSet<Linear> = BTreeSet::new();
    for c in ineqs {
        let c = tighten(c);
        if c.coeffs.is_empty() {
            if c.constant > 0 {
                return Some(Outcome::Infeasible);
            }
        } else {
            set.insert(c);
        }
    }
    loop {
        let vars: BTreeSet<usize> = set.iter().flat_map(|c| c.coeffs.keys().copied()).collect();
        // least product of lower and upper bounds first
        let Some(x) = vars.into_iter().min_by_key(|&x| {
            let pos = set.iter().filter(|c| c.coeff(x) > 0).count();
            let neg = set.iter().filter(|c| c.coeff(x) < 0).count();
            pos * neg
        }) else {
            return Some(Outcome::Open);
        };
        let (with, rest): (Vec<Linear>, Vec<Linear>) = set.into_iter().partition(|c| c.coeff(x) != 0);
        let mut next: BTreeSet<Linear> = rest.into_iter().collect();
        let (ups, lows): (Vec<&Linear>, Vec<&Linear>) = with.iter().partition(|c| c.coeff(x) > 0);
        for u in &ups {
            for l in &lows {
                let (p, n) = (u.coeff(x), -l.coeff(x));
                let combined = tighten(u.scale(n)?.add_scaled(l, p)?);
                if combined.coeffs.is_empty() {
                    if combined.constant > 0 {
                        return Some(Outcome::Infeasible);
                    }
                } else {
                    next.insert(combined);
                }
                if next.len() > MAX_CONSTRAINTS {
                    return None;
                }
            }
        }
        set = next;
    }
}
