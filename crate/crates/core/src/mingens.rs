//! Minimal generators of graded modules and quasihomogeneity detection.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::groebner::Submodule;
use crate::linalg::{nullspace, Echelon, TermIndex};
use crate::module::{FreeElement, Grading};
use crate::order::{MonomialOrder, TermOrder};
use crate::poly::{Poly, Rational};

/// Picks generators whose residues form a basis of `M / mM`, degree by degree.
pub fn minimal_generators(gens: &[FreeElement], grading: &Grading) -> Result<Vec<FreeElement>> {
    if !grading.is_positive() {
        return Err(Error::precondition("minimal generators need positive weights"));
    }
    let nvars = grading.weights.len();
    let rank = grading.rank();
    let mut by_degree: BTreeMap<i64, Vec<&FreeElement>> = BTreeMap::new();
    for g in gens {
        if g.rank() != rank || g.nvars() != nvars {
            return Err(Error::precondition("generator does not match the grading"));
        }
        if g.is_zero() {
            continue;
        }
        let d = g
            .homogeneous_degree(grading)
            .ok_or_else(|| Error::precondition("non-homogeneous generator"))?;
        by_degree.entry(d).or_default().push(g);
    }
    let order = TermOrder::graded(MonomialOrder::wdegrevlex(grading.weights.clone())?, grading.clone());
    let mut kept: Vec<FreeElement> = Vec::new();
    for (_, group) in by_degree {
        let lower = Submodule::new(&kept, rank, nvars, &order)?;
        let mut index = TermIndex::new();
        let mut ech = Echelon::new();
        let mut fresh = Vec::new();
        for g in group {
            let nf = lower.normal_form_terms(g)?;
            let row = index.row(nf.iter().map(|(t, c)| (t.clone(), c)));
            if ech.insert(row) {
                fresh.push(g.clone());
            }
        }
        kept.extend(fresh);
    }
    Ok(kept)
}

/// Positive integer weights making `h` weighted homogeneous, in lowest terms.
///
/// Among all positive solutions, the one found by Fourier-Motzkin back
/// substitution at lower bounds is returned, so `x*y*z` gets `(1,1,1)`.
pub fn is_quasihomogeneous(h: &Poly) -> Option<Vec<u32>> {
    let n = h.nvars();
    let exps: Vec<Vec<i64>> = h
        .terms()
        .map(|(m, _)| m.exponents().iter().map(|&e| e as i64).collect())
        .collect();
    let first = exps.first()?;
    let rows: Vec<Vec<Rational>> = exps[1..]
        .iter()
        .map(|e| {
            e.iter()
                .zip(first)
                .map(|(a, b)| Rational::from_integer((a - b).into()))
                .collect()
        })
        .collect();
    let basis = nullspace(&rows, n);
    let m = basis.len();
    // (basis * c)_i >= 1 for every variable i.
    let ineqs: Vec<(Vec<Rational>, Rational)> = (0..n)
        .map(|i| ((0..m).map(|j| basis[j][i].clone()).collect(), Rational::one()))
        .collect();
    let c = fourier_motzkin(ineqs, m)?;
    let w: Vec<Rational> = (0..n)
        .map(|i| (0..m).fold(Rational::zero(), |acc, j| acc + &basis[j][i] * &c[j]))
        .collect();
    let lcm = w.iter().fold(num_bigint::BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<num_bigint::BigInt> = w
        .iter()
        .map(|x| (x * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(num_bigint::BigInt::zero(), |acc, x| acc.gcd(x));
    ints.iter()
        .map(|x| {
            let v = x / &g;
            if v.is_positive() {
                u32::try_from(v).ok()
            } else {
                None
            }
        })
        .collect()
}

/// Finds `c` with `a . c >= b` for every inequality, or `None` if infeasible.
fn fourier_motzkin(ineqs: Vec<(Vec<Rational>, Rational)>, m: usize) -> Option<Vec<Rational>> {
    let mut stages = vec![ineqs];
    for v in (0..m).rev() {
        let cur = stages.last().unwrap();
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for q in cur {
            if q.0[v].is_positive() {
                pos.push(q.clone());
            } else if q.0[v].is_negative() {
                neg.push(q.clone());
            } else {
                rest.push(q.clone());
            }
        }
        for p in &pos {
            for q in &neg {
                let (a, b) = (p.0[v].clone(), -q.0[v].clone());
                let coeffs = p.0.iter().zip(&q.0).map(|(x, y)| x * &b + y * &a).collect();
                rest.push((coeffs, &p.1 * &b + &q.1 * &a));
            }
        }
        stages.push(rest);
    }
    if stages.last().unwrap().iter().any(|(_, b)| b.is_positive()) {
        return None;
    }
    let mut c = vec![Rational::zero(); m];
    for v in 0..m {
        let sys = &stages[m - 1 - v];
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        for (a, b) in sys {
            if a[v].is_zero() {
                continue;
            }
            let others: Rational = (0..v).fold(Rational::zero(), |acc, j| acc + &a[j] * &c[j]);
            let bound = (b - others) / &a[v];
            if a[v].is_positive() {
                lo = Some(lo.map_or(bound.clone(), |l| if bound > l { bound.clone() } else { l }));
            } else {
                hi = Some(hi.map_or(bound.clone(), |h| if bound < h { bound.clone() } else { h }));
            }
        }
        c[v] = match (lo, hi) {
            (Some(l), _) => l,
            (None, Some(h)) => h,
            (None, None) => Rational::one(),
        };
    }
    Some(c)
}
