//! Vector-space dimensions read off leading-term staircases.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::groebner::Submodule;
use crate::module::{Grading, ModulePresentation};
use crate::order::{MonomialOrder, Term, TermOrder};
use crate::poly::Monomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Dimension {
    Finite(u64),
    Infinite,
}

impl Dimension {
    pub fn finite(self) -> Option<u64> {
        match self {
            Dimension::Finite(d) => Some(d),
            Dimension::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Dimension::Finite(_))
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dimension::Finite(d) => write!(f, "{}", d),
            Dimension::Infinite => f.write_str("INFINITE"),
        }
    }
}

fn is_divisible(e: &[u32], monos: &[&[u32]]) -> bool {
    monos.iter().any(|m| m.iter().zip(e).all(|(a, b)| a <= b))
}

/// Number of monomials divisible by none of `monos`, or `None` if infinite.
pub fn count_standard_monomials(monos: &[Monomial], nvars: usize) -> Option<u64> {
    if monos.iter().any(|m| m.is_one()) {
        return Some(0);
    }
    let mut bound = vec![u32::MAX; nvars];
    for m in monos {
        if let Some((i, a)) = m.pure_power() {
            bound[i] = bound[i].min(a);
        }
    }
    if bound.contains(&u32::MAX) {
        return None;
    }
    let refs: Vec<&[u32]> = monos.iter().map(|m| m.exponents()).collect();
    let mut e = vec![0u32; nvars];
    Some(count_rec(0, &mut e, &bound, &refs))
}

fn count_rec(i: usize, e: &mut Vec<u32>, bound: &[u32], monos: &[&[u32]]) -> u64 {
    if i == e.len() {
        return 1;
    }
    let relevant: Vec<&[u32]> = monos
        .iter()
        .copied()
        .filter(|m| m[i + 1..].iter().all(|&x| x == 0))
        .collect();
    let mut total = 0;
    for a in 0..bound[i] {
        e[i] = a;
        if is_divisible(&e[..], &relevant) {
            break;
        }
        total += count_rec(i + 1, e, bound, monos);
    }
    e[i] = 0;
    total
}

fn leads_by_component(leads: &[Term], rank: usize) -> Vec<Vec<Monomial>> {
    let mut by = vec![Vec::new(); rank];
    for t in leads {
        by[t.comp].push(t.mono.clone());
    }
    by
}

/// Count of standard terms of a module with the given leading terms.
pub fn count_standard(leads: &[Term], rank: usize, nvars: usize) -> Dimension {
    let mut total = 0u64;
    for monos in leads_by_component(leads, rank) {
        match count_standard_monomials(&monos, nvars) {
            Some(c) => total += c,
            None => return Dimension::Infinite,
        }
    }
    Dimension::Finite(total)
}

/// Dimension of `O^rank / relations`, counted as standard terms.
pub fn quotient_dimension(p: &ModulePresentation, order: &MonomialOrder) -> Result<Dimension> {
    if order.nvars() != p.nvars {
        return Err(Error::precondition(
            "order and presentation have different variable counts",
        ));
    }
    let sm = Submodule::of_presentation(p, &TermOrder::pot(order.clone()))?;
    Ok(count_standard(&sm.leading_terms(), p.rank, p.nvars))
}

fn colon_monomial(g: &Monomial, m: &Monomial) -> Monomial {
    Monomial::from_exponents(
        g.exponents()
            .iter()
            .zip(m.exponents())
            .map(|(a, b)| a.saturating_sub(*b))
            .collect(),
    )
}

fn minimalize(monos: &[Monomial]) -> Vec<Monomial> {
    let mut out: Vec<Monomial> = Vec::new();
    for (i, m) in monos.iter().enumerate() {
        let dominated = monos
            .iter()
            .enumerate()
            .any(|(j, o)| j != i && o.divides(m) && (o != m || j < i));
        if !dominated {
            out.push(m.clone());
        }
    }
    out
}

/// Number of terms in the monomial module `big` that are not in `small`.
///
/// Requires `small` to be contained in `big` termwise.
pub fn count_difference(small: &[Term], big: &[Term], rank: usize, nvars: usize) -> Dimension {
    let small = leads_by_component(small, rank);
    let big = leads_by_component(big, rank);
    let mut total = 0u64;
    for c in 0..rank {
        let gens = minimalize(&big[c]);
        let mut acc: Vec<Monomial> = small[c].clone();
        for m in &gens {
            let col: Vec<Monomial> = acc.iter().map(|g| colon_monomial(g, m)).collect();
            match count_standard_monomials(&col, nvars) {
                Some(k) => total += k,
                None => return Dimension::Infinite,
            }
            acc.push(m.clone());
        }
    }
    Dimension::Finite(total)
}

/// Calls `f` on every monomial with primary degree `target`; when `aux` is
/// given, only monomials of auxiliary degree at most its bound are visited.
pub fn for_each_monomial(
    weights: &[u32],
    target: i64,
    aux: Option<(&[u32], i64)>,
    f: &mut dyn FnMut(&[u32]),
) -> Result<()> {
    for (i, &w) in weights.iter().enumerate() {
        let covered = w > 0 || aux.map(|(a, _)| a[i] > 0).unwrap_or(false);
        if !covered {
            return Err(Error::precondition(
                "a variable of weight zero makes degree slices infinite",
            ));
        }
    }
    if target < 0 || aux.map(|(_, b)| b < 0).unwrap_or(false) {
        return Ok(());
    }
    let mut e = vec![0u32; weights.len()];
    enum_rec(0, weights, target, aux, &mut e, f);
    Ok(())
}

fn enum_rec(i: usize, w: &[u32], left: i64, aux: Option<(&[u32], i64)>, e: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
    if i == w.len() {
        if left == 0 {
            f(e);
        }
        return;
    }
    let mut a = 0u32;
    loop {
        let used = a as i64 * w[i] as i64;
        if used > left {
            break;
        }
        let aux_left = aux.map(|(ws, b)| b - a as i64 * ws[i] as i64);
        if matches!(aux_left, Some(l) if l < 0) {
            break;
        }
        e[i] = a;
        enum_rec(i + 1, w, left - used, aux.map(|(ws, _)| (ws, aux_left.unwrap())), e, f);
        a += 1;
        if w[i] == 0 && aux.is_none() {
            break;
        }
    }
    e[i] = 0;
}

/// Standard terms of primary degree `degree` (and auxiliary degree at most the
/// given bound), in the order components-then-monomials.
pub fn standard_terms_in_degree(
    leads: &[Term],
    grading: &Grading,
    degree: i64,
    aux: Option<(&Grading, i64)>,
) -> Result<Vec<Term>> {
    let rank = grading.rank();
    let by = leads_by_component(leads, rank);
    let mut out = Vec::new();
    for c in 0..rank {
        let refs: Vec<&[u32]> = by[c].iter().map(|m| m.exponents()).collect();
        let target = degree - grading.shifts[c];
        let aux_c = aux.map(|(g, b)| (g.weights.as_slice(), b - g.shifts[c]));
        for_each_monomial(&grading.weights, target, aux_c, &mut |e| {
            if !is_divisible(e, &refs) {
                out.push(Term::new(c, Monomial::from_exponents(e.to_vec())));
            }
        })?;
    }
    Ok(out)
}

/// Per-degree dimensions of a graded quotient, with a stabilization flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedDimensionTable {
    pub dims: BTreeMap<i64, u64>,
    pub stabilized: bool,
}

/// Hilbert function of `O^rank / sm` for degrees `lo..=hi`.
///
/// The flag is set when the last `window` values repeat the `window` values
/// before them.
pub fn graded_table(
    sm: &Submodule,
    grading: &Grading,
    lo: i64,
    hi: i64,
    window: usize,
) -> Result<GradedDimensionTable> {
    if !grading.is_positive() {
        return Err(Error::precondition("graded tables need positive weights"));
    }
    let leads = sm.leading_terms();
    let mut dims = BTreeMap::new();
    for d in lo..=hi {
        dims.insert(d, standard_terms_in_degree(&leads, grading, d, None)?.len() as u64);
    }
    let vals: Vec<u64> = dims.values().copied().collect();
    let stabilized = window > 0
        && vals.len() >= 2 * window
        && vals[vals.len() - window..] == vals[vals.len() - 2 * window..vals.len() - window];
    Ok(GradedDimensionTable { dims, stabilized })
}
