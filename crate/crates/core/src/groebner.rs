//! Buchberger's algorithm for submodules of free modules, with syzygies,
//! intersections and colon modules built on top of it.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::module::{FreeElement, ModulePresentation};
use crate::order::{MonomialOrder, OrderKind, Term, TermOrder};
use crate::poly::{Monomial, Poly, Rational};

type Terms = Vec<(Term, Rational)>;

/// Module element as a list of terms sorted decreasingly.
#[derive(Clone, Debug)]
pub(crate) struct SVec {
    pub terms: Terms,
}

impl SVec {
    pub fn from_element(e: &FreeElement, ord: &TermOrder) -> SVec {
        let mut terms: Terms = e.terms().map(|(t, c)| (t, c.clone())).collect();
        terms.sort_by(|a, b| ord.cmp(&b.0, &a.0));
        SVec { terms }
    }

    pub fn to_element(&self, rank: usize, nvars: usize) -> FreeElement {
        let mut entries = vec![Poly::zero(nvars); rank];
        for (t, c) in &self.terms {
            entries[t.comp].add_term(t.mono.clone(), c.clone());
        }
        FreeElement::new(nvars, entries)
    }

    pub fn lt(&self) -> &Term {
        &self.terms[0].0
    }

    pub fn lc(&self) -> &Rational {
        &self.terms[0].1
    }

    fn make_monic(&mut self) {
        let inv = Rational::one() / self.lc();
        if !inv.is_one() {
            for (_, c) in &mut self.terms {
                *c = &*c * &inv;
            }
        }
    }

    fn single_component(&self) -> bool {
        let c = self.lt().comp;
        self.terms.iter().all(|(t, _)| t.comp == c)
    }
}

/// `a - c * m * b`, both inputs sorted decreasingly.
fn sub_mul(a: &[(Term, Rational)], c: &Rational, m: &Monomial, b: &[(Term, Rational)], ord: &TermOrder) -> Terms {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut i = 0;
    let mut j = 0;
    let mut bj: Option<(Term, Rational)> = None;
    loop {
        if bj.is_none() && j < b.len() {
            let (t, v) = &b[j];
            bj = Some((Term::new(t.comp, t.mono.mul(m)), -(v * c)));
            j += 1;
        }
        match (a.get(i), bj.as_ref()) {
            (None, None) => break,
            (Some(x), None) => {
                out.push(x.clone());
                i += 1;
            }
            (None, Some(_)) => out.push(bj.take().unwrap()),
            (Some(x), Some(y)) => match ord.cmp(&x.0, &y.0) {
                Ordering::Greater => {
                    out.push(x.clone());
                    i += 1;
                }
                Ordering::Less => out.push(bj.take().unwrap()),
                Ordering::Equal => {
                    let s = &x.1 + &y.1;
                    if !s.is_zero() {
                        out.push((x.0.clone(), s));
                    }
                    i += 1;
                    bj = None;
                }
            },
        }
    }
    out
}

fn find_reducer<'a>(t: &Term, basis: &'a [SVec]) -> Option<&'a SVec> {
    basis.iter().find(|g| g.lt().divides(t))
}

/// Full reduction: no term of the result is divisible by a leading term of `basis`.
fn reduce(f: Terms, basis: &[SVec], ord: &TermOrder) -> Terms {
    let mut rem = Vec::new();
    let mut cur = f;
    let mut start = 0;
    while start < cur.len() {
        let (t, c) = &cur[start];
        match find_reducer(t, basis) {
            Some(g) => {
                let m = t.mono.div(&g.lt().mono).expect("divisible");
                let q = c / g.lc();
                cur = sub_mul(&cur[start + 1..], &q, &m, &g.terms[1..], ord);
                start = 0;
            }
            None => {
                rem.push(cur[start].clone());
                start += 1;
            }
        }
    }
    rem
}

fn spoly(f: &SVec, g: &SVec, ord: &TermOrder) -> Terms {
    let lcm = f.lt().mono.lcm(&g.lt().mono);
    let mf = lcm.div(&f.lt().mono).unwrap();
    let mg = lcm.div(&g.lt().mono).unwrap();
    let af: Terms = f.terms[1..]
        .iter()
        .map(|(t, c)| (Term::new(t.comp, t.mono.mul(&mf)), c / f.lc()))
        .collect();
    sub_mul(&af, &(Rational::one() / g.lc()), &mg, &g.terms[1..], ord)
}

enum Item {
    Gen(usize),
    Pair(usize, usize),
}

/// Reduced, monic Gröbner basis sorted by decreasing leading term.
pub(crate) fn buchberger(gens: Vec<SVec>, ord: &TermOrder) -> Vec<SVec> {
    let gens: Vec<SVec> = gens.into_iter().filter(|g| !g.terms.is_empty()).collect();
    let mut basis: Vec<SVec> = Vec::new();
    let mut heap: BinaryHeap<Reverse<(Vec<i64>, usize, usize)>> = BinaryHeap::new();
    let mut items: Vec<Item> = Vec::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();
    for (i, g) in gens.iter().enumerate() {
        heap.push(Reverse((ord.key(g.lt()), items.len(), items.len())));
        items.push(Item::Gen(i));
    }
    while let Some(Reverse((_, _, idx))) = heap.pop() {
        let poly = match items[idx] {
            Item::Gen(i) => gens[i].terms.clone(),
            Item::Pair(i, j) => {
                pending.remove(&(i, j));
                let lcm = Term::new(basis[i].lt().comp, basis[i].lt().mono.lcm(&basis[j].lt().mono));
                let chain = (0..basis.len()).any(|k| {
                    k != i
                        && k != j
                        && basis[k].lt().divides(&lcm)
                        && !pending.contains(&(i.min(k), i.max(k)))
                        && !pending.contains(&(j.min(k), j.max(k)))
                });
                if chain {
                    continue;
                }
                spoly(&basis[i], &basis[j], ord)
            }
        };
        let r = reduce(poly, &basis, ord);
        if r.is_empty() {
            continue;
        }
        let mut h = SVec { terms: r };
        h.make_monic();
        let k = basis.len();
        for (i, b) in basis.iter().enumerate() {
            if b.lt().comp != h.lt().comp {
                continue;
            }
            if b.lt().mono.is_coprime(&h.lt().mono) && b.single_component() && h.single_component() {
                continue;
            }
            let lcm = Term::new(h.lt().comp, b.lt().mono.lcm(&h.lt().mono));
            heap.push(Reverse((ord.key(&lcm), items.len(), items.len())));
            items.push(Item::Pair(i, k));
            pending.insert((i, k));
        }
        basis.push(h);
    }
    interreduce(basis, ord)
}

fn interreduce(basis: Vec<SVec>, ord: &TermOrder) -> Vec<SVec> {
    let n = basis.len();
    let keep: Vec<bool> = (0..n)
        .map(|i| {
            !(0..n).any(|j| j != i && basis[j].lt().divides(basis[i].lt()) && (basis[j].lt() != basis[i].lt() || j < i))
        })
        .collect();
    let minimal: Vec<SVec> = basis
        .into_iter()
        .zip(keep)
        .filter_map(|(b, k)| k.then_some(b))
        .collect();
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<SVec> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let g = &minimal[i];
        let mut terms = vec![g.terms[0].clone()];
        terms.extend(reduce(g.terms[1..].to_vec(), &others, ord));
        let mut s = SVec { terms };
        s.make_monic();
        out.push(s);
    }
    out.sort_by(|a, b| ord.cmp(b.lt(), a.lt()));
    out
}

impl TermOrder {
    /// Sort key whose lexicographic comparison agrees with [`TermOrder::cmp`].
    pub(crate) fn key(&self, t: &Term) -> Vec<i64> {
        let e = t.mono.exponents();
        let mut k = Vec::with_capacity(e.len() + 3);
        if let Some(g) = &self.prefix {
            k.push(g.term_degree(t));
        }
        k.push(-(t.comp as i64));
        match self.mono.kind() {
            OrderKind::Lex => k.extend(e.iter().map(|&x| x as i64)),
            OrderKind::WDegRevLex => {
                k.push(t.mono.weighted_degree(self.mono.weights()));
                k.extend(e.iter().rev().map(|&x| -(x as i64)));
            }
        }
        k
    }
}

/// A submodule of `O^rank` held through its reduced Gröbner basis.
#[derive(Clone, Debug)]
pub struct Submodule {
    rank: usize,
    nvars: usize,
    order: TermOrder,
    basis: Vec<SVec>,
}

impl Submodule {
    pub fn new(gens: &[FreeElement], rank: usize, nvars: usize, order: &TermOrder) -> Result<Self> {
        for g in gens {
            if g.rank() != rank || g.nvars() != nvars {
                return Err(Error::precondition("generator rank or variable count mismatch"));
            }
        }
        let svecs = gens.iter().map(|g| SVec::from_element(g, order)).collect();
        Ok(Submodule {
            rank,
            nvars,
            order: order.clone(),
            basis: buchberger(svecs, order),
        })
    }

    pub fn of_presentation(p: &ModulePresentation, order: &TermOrder) -> Result<Self> {
        Self::new(&p.relations, p.rank, p.nvars, order)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> &TermOrder {
        &self.order
    }

    pub fn basis(&self) -> Vec<FreeElement> {
        self.basis.iter().map(|s| s.to_element(self.rank, self.nvars)).collect()
    }

    pub fn basis_len(&self) -> usize {
        self.basis.len()
    }

    pub fn leading_terms(&self) -> Vec<Term> {
        self.basis.iter().map(|s| s.lt().clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    fn check(&self, f: &FreeElement) -> Result<()> {
        if f.rank() != self.rank || f.nvars() != self.nvars {
            return Err(Error::precondition(format!(
                "element of rank {} reduced modulo a submodule of rank {}",
                f.rank(),
                self.rank
            )));
        }
        Ok(())
    }

    pub fn normal_form(&self, f: &FreeElement) -> Result<FreeElement> {
        self.check(f)?;
        let s = SVec::from_element(f, &self.order);
        let r = SVec {
            terms: reduce(s.terms, &self.basis, &self.order),
        };
        Ok(r.to_element(self.rank, self.nvars))
    }

    /// Normal form as a list of standard terms with coefficients.
    pub fn normal_form_terms(&self, f: &FreeElement) -> Result<Vec<(Term, Rational)>> {
        self.check(f)?;
        let s = SVec::from_element(f, &self.order);
        Ok(reduce(s.terms, &self.basis, &self.order))
    }

    pub fn contains(&self, f: &FreeElement) -> Result<bool> {
        self.check(f)?;
        let s = SVec::from_element(f, &self.order);
        Ok(reduce(s.terms, &self.basis, &self.order).is_empty())
    }

    pub fn contains_all(&self, fs: &[FreeElement]) -> Result<bool> {
        for f in fs {
            if !self.contains(f)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Submodule equality by two-sided membership.
    pub fn same_as(&self, other: &Submodule) -> Result<bool> {
        Ok(self.contains_all(&other.basis())? && other.contains_all(&self.basis())?)
    }
}

/// Reduced Gröbner basis of the submodule generated by `gens`.
pub fn groebner_basis(gens: &[FreeElement], order: &TermOrder) -> Vec<FreeElement> {
    let Some(first) = gens.first() else {
        return Vec::new();
    };
    let (rank, nvars) = (first.rank(), first.nvars());
    let svecs = gens.iter().map(|g| SVec::from_element(g, order)).collect();
    buchberger(svecs, order)
        .iter()
        .map(|s| s.to_element(rank, nvars))
        .collect()
}

/// Normal form of `f` modulo a Gröbner basis `basis` under `order`.
pub fn normal_form(f: &FreeElement, basis: &[FreeElement], order: &TermOrder) -> Result<FreeElement> {
    if let Some(b) = basis.iter().find(|b| b.rank() != f.rank()) {
        return Err(Error::precondition(format!(
            "rank mismatch: element {} against basis {}",
            f.rank(),
            b.rank()
        )));
    }
    let svecs: Vec<SVec> = basis
        .iter()
        .filter(|b| !b.is_zero())
        .map(|b| SVec::from_element(b, order))
        .collect();
    let r = reduce(SVec::from_element(f, order).terms, &svecs, order);
    Ok(SVec { terms: r }.to_element(f.rank(), f.nvars()))
}

/// Gröbner basis of an ideal, as polynomials.
pub fn ideal_basis(gens: &[Poly], mono: &MonomialOrder) -> Vec<Poly> {
    let elems: Vec<FreeElement> = gens
        .iter()
        .map(|g| FreeElement::new(g.nvars(), vec![g.clone()]))
        .collect();
    groebner_basis(&elems, &TermOrder::pot(mono.clone()))
        .into_iter()
        .map(|e| e.into_entries().pop().unwrap())
        .collect()
}

fn check_columns(columns: &[FreeElement]) -> Result<(usize, usize)> {
    let first = &columns[0];
    let (rank, nvars) = (first.rank(), first.nvars());
    if columns.iter().any(|c| c.rank() != rank || c.nvars() != nvars) {
        return Err(Error::precondition("columns do not share one rank and variable list"));
    }
    Ok((rank, nvars))
}

/// Generators of all relations `sum a_i * columns[i] = 0`, under degrevlex.
pub fn syzygy_module(columns: &[FreeElement]) -> Result<Vec<FreeElement>> {
    let Some(first) = columns.first() else {
        return Ok(Vec::new());
    };
    syzygy_module_with(columns, &MonomialOrder::degrevlex(first.nvars()))
}

/// As [`syzygy_module`], with a chosen coefficient order.
pub fn syzygy_module_with(columns: &[FreeElement], mono: &MonomialOrder) -> Result<Vec<FreeElement>> {
    if columns.is_empty() {
        return Ok(Vec::new());
    }
    let (rank, nvars) = check_columns(columns)?;
    let m = columns.len();
    let ord = TermOrder::pot(mono.clone());
    let aug: Vec<SVec> = columns
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut entries = c.entries().to_vec();
            entries.extend((0..m).map(|j| if i == j { Poly::one(nvars) } else { Poly::zero(nvars) }));
            SVec::from_element(&FreeElement::new(nvars, entries), &ord)
        })
        .collect();
    let gb = buchberger(aug, &ord);
    let mut out = Vec::new();
    for g in gb.iter().filter(|g| g.lt().comp >= rank) {
        let full = g.to_element(rank + m, nvars).into_entries();
        let syz = FreeElement::new(nvars, full[rank..].to_vec());
        let mut acc = FreeElement::zero(rank, nvars);
        for (a, c) in syz.entries().iter().zip(columns) {
            acc = &acc + &c.mul_poly(a);
        }
        if !acc.is_zero() {
            return Err(Error::invariant("computed syzygy does not annihilate its input"));
        }
        out.push(syz);
    }
    Ok(out)
}

/// Generators of the intersection of two submodules of `O^rank`.
pub fn intersect(
    a: &[FreeElement],
    b: &[FreeElement],
    rank: usize,
    nvars: usize,
    mono: &MonomialOrder,
) -> Result<Vec<FreeElement>> {
    if a.is_empty() || b.is_empty() {
        return Ok(Vec::new());
    }
    let ord = TermOrder::pot(mono.clone());
    let mut gens = Vec::new();
    for x in a {
        let mut e = x.entries().to_vec();
        e.extend(x.entries().iter().cloned());
        gens.push(SVec::from_element(&FreeElement::new(nvars, e), &ord));
    }
    for y in b {
        let mut e = y.entries().to_vec();
        e.extend(std::iter::repeat_n(Poly::zero(nvars), rank));
        gens.push(SVec::from_element(&FreeElement::new(nvars, e), &ord));
    }
    Ok(buchberger(gens, &ord)
        .iter()
        .filter(|g| g.lt().comp >= rank)
        .map(|g| FreeElement::new(nvars, g.to_element(2 * rank, nvars).into_entries()[rank..].to_vec()))
        .collect())
}

/// Generators of `(M : f) = { v : f v in M }`.
pub fn colon(m: &[FreeElement], f: &Poly, rank: usize, nvars: usize, mono: &MonomialOrder) -> Result<Vec<FreeElement>> {
    if f.is_zero() {
        return Ok((0..rank).map(|i| FreeElement::unit(rank, nvars, i)).collect());
    }
    let mut cols: Vec<FreeElement> = m.iter().filter(|v| !v.is_zero()).cloned().collect();
    let s = cols.len();
    cols.extend((0..rank).map(|i| FreeElement::basis_multiple(rank, i, f.clone())));
    let syz = syzygy_module_with(&cols, mono)?;
    Ok(syz
        .into_iter()
        .map(|z| FreeElement::new(nvars, z.into_entries()[s..].to_vec()))
        .filter(|v| !v.is_zero())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use proptest::prelude::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn p(s: &str) -> Poly {
        parse_poly(s, &names(&["x", "y", "z"])).unwrap()
    }

    fn e1(s: &str) -> FreeElement {
        FreeElement::new(3, vec![p(s)])
    }

    fn dr() -> TermOrder {
        TermOrder::pot(MonomialOrder::degrevlex(3))
    }

    #[test]
    fn single_generator() {
        let gb = groebner_basis(&[e1("x")], &dr());
        assert_eq!(gb, vec![e1("x")]);
        assert!(groebner_basis(&[], &dr()).is_empty());
    }

    #[test]
    fn hand_run_contains_y_cubed() {
        let gb = groebner_basis(&[e1("x^2"), e1("x*y+y^2")], &dr());
        assert!(gb.contains(&e1("y^3")));
        let sm = Submodule::new(&[e1("x^2"), e1("x*y+y^2")], 1, 3, &dr()).unwrap();
        assert!(sm.contains(&e1("x^2*z - y^3")).unwrap());
    }

    #[test]
    fn two_division_steps() {
        let gb = groebner_basis(&[e1("x^2-y"), e1("y^2")], &dr());
        let nf = normal_form(&e1("x^3"), &gb, &dr()).unwrap();
        assert_eq!(nf, e1("x*y"));
        let nf = normal_form(&e1("x^2+1"), &[e1("x")], &dr()).unwrap();
        assert_eq!(nf, e1("1"));
        let two = FreeElement::new(3, vec![p("x"), p("y")]);
        assert!(normal_form(&two, &gb, &dr()).is_err());
    }

    #[test]
    fn rank_two_element_is_its_own_basis() {
        let v = FreeElement::new(3, vec![p("y"), p("-x")]);
        assert_eq!(groebner_basis(std::slice::from_ref(&v), &dr()), vec![v]);
    }

    #[test]
    fn koszul_and_trivial_syzygies() {
        let s = syzygy_module(&[e1("x"), e1("y")]).unwrap();
        let sm = Submodule::new(&s, 2, 3, &dr()).unwrap();
        let k = FreeElement::new(3, vec![p("y"), p("-x")]);
        assert!(sm.contains(&k).unwrap());
        assert_eq!(s.len(), 1);
        assert!(syzygy_module(&[e1("1")]).unwrap().is_empty());
    }

    #[test]
    fn syzygies_of_xy_gradient() {
        let s = syzygy_module(&[e1("y"), e1("x"), e1("x*y")]).unwrap();
        let got = Submodule::new(&s, 3, 3, &dr()).unwrap();
        let want = [
            FreeElement::new(3, vec![p("x"), p("0"), p("-1")]),
            FreeElement::new(3, vec![p("0"), p("y"), p("-1")]),
        ];
        let want_sm = Submodule::new(&want, 3, 3, &dr()).unwrap();
        assert!(got.same_as(&want_sm).unwrap());
    }

    #[test]
    fn intersection_and_colon() {
        let o = MonomialOrder::degrevlex(3);
        let i = intersect(&[e1("x")], &[e1("y")], 1, 3, &o).unwrap();
        let sm = Submodule::new(&i, 1, 3, &dr()).unwrap();
        assert!(sm.same_as(&Submodule::new(&[e1("x*y")], 1, 3, &dr()).unwrap()).unwrap());
        let c = colon(&[e1("x^2*y"), e1("z^3")], &p("x"), 1, 3, &o).unwrap();
        let sm = Submodule::new(&c, 1, 3, &dr()).unwrap();
        let want = Submodule::new(&[e1("x*y"), e1("z^3")], 1, 3, &dr()).unwrap();
        assert!(sm.same_as(&want).unwrap());
    }

    #[test]
    fn lex_and_degrevlex_generate_the_same_ideal() {
        let gens = [e1("x^2 - y*z"), e1("y^2 - x*z"), e1("z^2 - x*y")];
        let a = Submodule::new(&gens, 1, 3, &dr()).unwrap();
        let b = Submodule::new(&gens, 1, 3, &TermOrder::pot(MonomialOrder::lex(3))).unwrap();
        assert!(a.same_as(&b).unwrap());
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec(((0u32..3, 0u32..3, 0u32..2), -3i64..4), 1..4).prop_map(|ts| {
            Poly::from_terms(
                3,
                ts.into_iter()
                    .map(|((a, b, c), k)| (Monomial::from_exponents(vec![a, b, c]), crate::poly::rat(k))),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn generators_reduce_to_zero(gens in prop::collection::vec(arb_poly(), 1..4)) {
            let elems: Vec<FreeElement> = gens.iter().map(|g| FreeElement::new(3, vec![g.clone()])).collect();
            let gb = groebner_basis(&elems, &dr());
            for g in &elems {
                prop_assert!(normal_form(g, &gb, &dr()).unwrap().is_zero());
            }
            for i in 0..gb.len() {
                for j in (i + 1)..gb.len() {
                    let a = SVec::from_element(&gb[i], &dr());
                    let b = SVec::from_element(&gb[j], &dr());
                    let s = spoly(&a, &b, &dr());
                    let basis: Vec<SVec> = gb.iter().map(|g| SVec::from_element(g, &dr())).collect();
                    prop_assert!(reduce(s, &basis, &dr()).is_empty());
                }
            }
        }

        #[test]
        fn syzygies_annihilate(cols in prop::collection::vec((arb_poly(), arb_poly()), 1..4)) {
            let columns: Vec<FreeElement> = cols.iter().map(|(a, b)| FreeElement::new(3, vec![a.clone(), b.clone()])).collect();
            for z in syzygy_module(&columns).unwrap() {
                let mut acc = FreeElement::zero(2, 3);
                for (a, c) in z.entries().iter().zip(&columns) {
                    acc = &acc + &c.mul_poly(a);
                }
                prop_assert!(acc.is_zero());
            }
        }
    }
}
