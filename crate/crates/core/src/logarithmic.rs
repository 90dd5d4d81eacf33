//! Logarithmic vector fields, Saito's criterion and the modules `h Omega^k(log D)`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{evaluate, mask_indices, FormSpace};
use crate::groebner::{ideal_basis, syzygy_module_with, Submodule};
use crate::linalg::{combinations, det, minor};
use crate::mingens::{is_quasihomogeneous, minimal_generators};
use crate::module::{FreeElement, Grading};
use crate::order::{MonomialOrder, TermOrder};
use crate::parse::parse_poly;
use crate::poly::{rat, Monomial, Poly, Rational};

/// A hypersurface `h = 0` with its ambient variables and optional weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divisor {
    names: Vec<String>,
    h: Poly,
    weights: Option<Vec<u32>>,
}

/// Whether `h` has no repeated factor: the ideal `(h, dh/dx_1, ..., dh/dx_n)`
/// must have height at least two, read off its leading monomials.
pub fn is_reduced(h: &Poly) -> bool {
    if h.is_constant() {
        return false;
    }
    let mut gens = vec![h.clone()];
    gens.extend(h.gradient());
    let gb = ideal_basis(&gens, &MonomialOrder::degrevlex(h.nvars()));
    let leads: Vec<Vec<u32>> = gb
        .iter()
        .map(|g| {
            let order = MonomialOrder::degrevlex(h.nvars());
            let mut best = g.terms().next().unwrap().0.clone();
            for (m, _) in g.terms() {
                if order.cmp(m, &best) == std::cmp::Ordering::Greater {
                    best = m.clone();
                }
            }
            best.exponents().to_vec()
        })
        .collect();
    !(0..h.nvars()).any(|i| leads.iter().all(|e| e[i] > 0))
}

/// Non-negative weights making `h` homogeneous, with as few zero weights as
/// possible; the zero-weight variables play the role of parameters.
pub fn nonnegative_grading(h: &Poly) -> Option<Vec<u32>> {
    let n = h.nvars();
    for size in 0..n {
        for zeros in combinations(n, size) {
            let projected = Poly::from_terms(
                n,
                h.terms().map(|(m, _)| {
                    let mut e = m.exponents().to_vec();
                    for &z in &zeros {
                        e[z] = 0;
                    }
                    (Monomial::from_exponents(e), Rational::one())
                }),
            );
            if let Some(mut w) = is_quasihomogeneous(&projected) {
                for &z in &zeros {
                    w[z] = 0;
                }
                let g = w.iter().fold(0u32, |a, &b| num_integer::gcd(a, b));
                return Some(w.into_iter().map(|x| x / g).collect());
            }
        }
    }
    None
}

impl Divisor {
    pub fn new(names: Vec<String>, h: Poly, weights: Option<Vec<u32>>) -> Result<Self> {
        if h.nvars() != names.len() {
            return Err(Error::precondition("equation and variable list disagree"));
        }
        if let Some(w) = &weights {
            if w.len() != names.len() || w.contains(&0) {
                return Err(Error::precondition("weights must be positive, one per variable"));
            }
            if h.homogeneous_degree(w).is_none() {
                return Err(Error::precondition(
                    "equation is not weighted homogeneous for the given weights",
                ));
            }
        }
        if !is_reduced(&h) {
            return Err(Error::precondition("equation is not reduced"));
        }
        Ok(Divisor { names, h, weights })
    }

    pub fn parse(names: &[&str], text: &str, weights: Option<Vec<u32>>) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let h = parse_poly(text, &names).map_err(|e| Error::Parse {
            line: 1,
            column: e.offset + 1,
            message: e.message,
        })?;
        Self::new(names, h, weights)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn h(&self) -> &Poly {
        &self.h
    }

    pub fn weights(&self) -> Option<&[u32]> {
        self.weights.as_deref()
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    /// Weighted degree of `h`, when weights are present.
    pub fn degree(&self) -> Option<i64> {
        self.weights.as_ref().and_then(|w| self.h.homogeneous_degree(w))
    }

    /// Grading of vector fields: `deg(x^a d/dx_i) = w.a - w_i`.
    pub fn field_grading(&self) -> Option<Grading> {
        self.weights.as_ref().map(|w| field_grading(w))
    }

    fn order(&self) -> MonomialOrder {
        match &self.weights {
            Some(w) => MonomialOrder::wdegrevlex(w.clone()).expect("positive"),
            None => MonomialOrder::degrevlex(self.nvars()),
        }
    }
}

pub fn field_grading(w: &[u32]) -> Grading {
    Grading::new(w.to_vec(), w.iter().map(|&x| -(x as i64)).collect())
}

/// `chi(f) = sum chi_i df/dx_i`.
pub fn apply_field(field: &FreeElement, f: &Poly) -> Poly {
    field
        .entries()
        .iter()
        .enumerate()
        .fold(Poly::zero(f.nvars()), |acc, (i, c)| &acc + &(c * &f.derivative(i)))
}

/// A logarithmic field with the witness `c` of `chi(h) = c h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogField {
    pub field: FreeElement,
    pub witness: Poly,
}

fn vector_fields_from_syzygies(d: &Divisor, with_h: bool) -> Result<Vec<(FreeElement, Poly)>> {
    let n = d.nvars();
    let mut cols: Vec<FreeElement> =
        d.h.gradient()
            .into_iter()
            .map(|p| FreeElement::new(n, vec![p]))
            .collect();
    if with_h {
        cols.push(FreeElement::new(n, vec![d.h.clone()]));
    }
    let syz = syzygy_module_with(&cols, &d.order())?;
    let mut out = Vec::new();
    for z in syz {
        let e = z.into_entries();
        let field = FreeElement::new(n, e[..n].to_vec());
        if field.is_zero() {
            continue;
        }
        let witness = if with_h { -&e[n] } else { Poly::zero(n) };
        out.push((field, witness));
    }
    Ok(out)
}

fn prune(d: &Divisor, fields: Vec<FreeElement>) -> Result<Vec<FreeElement>> {
    match d.field_grading() {
        Some(g) => minimal_generators(&fields, &g),
        None => irredundant(fields, d.nvars()),
    }
}

/// Drops generators that lie in the span of the others, last first.
pub fn irredundant(mut gens: Vec<FreeElement>, nvars: usize) -> Result<Vec<FreeElement>> {
    let Some(rank) = gens.first().map(|g| g.rank()) else {
        return Ok(gens);
    };
    let ord = TermOrder::pot(MonomialOrder::degrevlex(nvars));
    let mut i = gens.len();
    while i > 0 {
        i -= 1;
        let others: Vec<FreeElement> = gens
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        if Submodule::new(&others, rank, nvars, &ord)?.contains(&gens[i])? {
            gens.remove(i);
        }
    }
    Ok(gens)
}

/// Generators of `Der(log D) = { chi : chi(h) in (h) }` with tangency witnesses;
/// minimal when the divisor is graded.
pub fn derlog(d: &Divisor) -> Result<Vec<LogField>> {
    let raw = vector_fields_from_syzygies(d, true)?;
    let fields = prune(d, raw.into_iter().map(|(f, _)| f).collect())?;
    fields
        .into_iter()
        .map(|field| {
            let witness =
                tangency_witness(d.h(), &field).ok_or_else(|| Error::invariant("syzygy field is not logarithmic"))?;
            Ok(LogField { field, witness })
        })
        .collect()
}

/// Generators of `Der(log h) = { chi : chi(h) = 0 }`.
pub fn derlog_h(d: &Divisor) -> Result<Vec<FreeElement>> {
    let raw = vector_fields_from_syzygies(d, false)?;
    let fields = prune(d, raw.into_iter().map(|(f, _)| f).collect())?;
    if fields.iter().any(|f| !apply_field(f, d.h()).is_zero()) {
        return Err(Error::invariant("field does not annihilate h"));
    }
    Ok(fields)
}

/// `c` with `chi(h) = c h`, if `chi` is logarithmic.
pub fn tangency_witness(h: &Poly, chi: &FreeElement) -> Option<Poly> {
    apply_field(chi, h).div_exact(h)
}

/// `sum w_i x_i d/dx_i`.
pub fn euler_field(weights: &[u32]) -> Result<FreeElement> {
    if weights.contains(&0) {
        return Err(Error::precondition("Euler field weights must be positive"));
    }
    let n = weights.len();
    Ok(FreeElement::new(
        n,
        weights
            .iter()
            .enumerate()
            .map(|(i, &w)| Poly::var(n, i).scale(&rat(w as i64)))
            .collect(),
    ))
}

/// Saito certificate: `n` logarithmic fields with `det = unit * h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogBasis {
    pub h: Poly,
    pub fields: Vec<FreeElement>,
    pub witnesses: Vec<Poly>,
    pub unit: Rational,
}

impl LogBasis {
    pub fn n(&self) -> usize {
        self.fields.len()
    }

    /// `theta[i][j]` = component `i` of field `j`.
    pub fn theta(&self) -> Vec<Vec<Poly>> {
        let n = self.n();
        (0..n)
            .map(|i| (0..n).map(|j| self.fields[j].entry(i).clone()).collect())
            .collect()
    }

    /// Re-checks every identity of the certificate.
    pub fn verify(&self) -> bool {
        let nv = self.h.nvars();
        self.fields
            .iter()
            .zip(&self.witnesses)
            .all(|(f, c)| apply_field(f, &self.h) == c * &self.h)
            && det(&self.theta(), nv) == self.h.scale(&self.unit)
    }
}

/// Checks logarithmicity of each candidate and `det = unit * h`.
pub fn saito_check(d: &Divisor, candidate: &[FreeElement]) -> std::result::Result<LogBasis, String> {
    let n = d.nvars();
    if candidate.len() != n {
        return Err(format!("expected {} fields, got {}", n, candidate.len()));
    }
    let mut witnesses = Vec::new();
    for (j, f) in candidate.iter().enumerate() {
        if f.rank() != n {
            return Err(format!("field {} has {} components, expected {}", j + 1, f.rank(), n));
        }
        match tangency_witness(d.h(), f) {
            Some(c) => witnesses.push(c),
            None => return Err(format!("field {} is not logarithmic", j + 1)),
        }
    }
    let basis = LogBasis {
        h: d.h.clone(),
        fields: candidate.to_vec(),
        witnesses,
        unit: Rational::zero(),
    };
    let dt = det(&basis.theta(), n);
    match dt.div_exact(d.h()).and_then(|q| q.constant_value()) {
        Some(u) if !u.is_zero() => Ok(LogBasis { unit: u, ..basis }),
        _ => Err("determinant is not a nonzero constant multiple of h".into()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FreenessVerdict {
    Free(LogBasis),
    NotFree { minimal_generators: usize },
    Inconclusive { reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Certification {
    #[serde(rename = "CERTIFIED")]
    Certified,
    #[serde(rename = "UNCERTIFIED-LOCAL")]
    UncertifiedLocal,
}

/// Subset cap for the bounded Saito search.
pub const SUBSET_CAP: usize = 4096;

/// Freeness via minimal generators and Saito's criterion.
pub fn is_free(d: &Divisor) -> Result<FreenessVerdict> {
    let n = d.nvars();
    let gens: Vec<FreeElement> = derlog(d)?.into_iter().map(|l| l.field).collect();
    if d.weights().is_some() {
        if gens.len() < n {
            return Err(Error::invariant(format!(
                "only {} minimal generators in rank {}",
                gens.len(),
                n
            )));
        }
        if gens.len() > n {
            return Ok(FreenessVerdict::NotFree {
                minimal_generators: gens.len(),
            });
        }
    }
    if gens.len() == n {
        if let Ok(b) = saito_check(d, &gens) {
            return Ok(FreenessVerdict::Free(b));
        }
    }
    let subsets = combinations(gens.len(), n);
    for s in subsets.iter().take(SUBSET_CAP) {
        let cand: Vec<FreeElement> = s.iter().map(|&i| gens[i].clone()).collect();
        if let Ok(b) = saito_check(d, &cand) {
            return Ok(FreenessVerdict::Free(b));
        }
    }
    Ok(FreenessVerdict::Inconclusive {
        reason: format!(
            "no Saito basis among the {}-subsets of {} irredundant generators",
            n,
            gens.len()
        ),
    })
}

/// Generators of `h Omega^k(log D)`: the `dx_J` coefficient of `h omega_I` is
/// `(-1)^(|I|+|J|) det theta[J^c, I^c] / unit`, `omega` the dual basis.
pub fn h_log_forms(basis: &LogBasis, k: usize) -> Result<Vec<FreeElement>> {
    let n = basis.n();
    if k > n {
        return Err(Error::precondition(format!(
            "form degree {} exceeds dimension {}",
            k, n
        )));
    }
    let nv = basis.h.nvars();
    let theta = basis.theta();
    let sp = FormSpace::new(n, k);
    let full: u32 = ((1u64 << n) - 1) as u32;
    let inv_unit = Rational::one() / &basis.unit;
    let mut out = Vec::with_capacity(sp.rank());
    for i in 0..sp.rank() {
        let imask = sp.subset(i);
        let isum: usize = mask_indices(imask).iter().sum();
        let icomp = mask_indices(full & !imask);
        let mut coeffs = Vec::with_capacity(sp.rank());
        for j in 0..sp.rank() {
            let jmask = sp.subset(j);
            let jsum: usize = mask_indices(jmask).iter().sum();
            let jcomp = mask_indices(full & !jmask);
            let mut c = minor(&theta, &jcomp, &icomp, nv).scale(&inv_unit);
            if (isum + jsum) % 2 == 1 {
                c = -&c;
            }
            coeffs.push(c);
        }
        out.push(FreeElement::new(nv, coeffs));
    }
    Ok(out)
}

/// The gate on the recipe: `<h omega_I, xi_J> = h delta_IJ` for all `I, J`.
pub fn pairing_gate(basis: &LogBasis, k: usize) -> Result<bool> {
    let n = basis.n();
    let forms = h_log_forms(basis, k)?;
    let sp = FormSpace::new(n, k);
    for (i, f) in forms.iter().enumerate() {
        for j in 0..sp.rank() {
            let fields: Vec<FreeElement> = mask_indices(sp.subset(j))
                .iter()
                .map(|&c| basis.fields[c].clone())
                .collect();
            let v = evaluate(f, &fields, n);
            let want = if i == j {
                basis.h.clone()
            } else {
                Poly::zero(basis.h.nvars())
            };
            if v != want {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xyz() -> Divisor {
        Divisor::parse(&["x", "y", "z"], "x*y*z", Some(vec![1, 1, 1])).unwrap()
    }

    #[test]
    fn reducedness() {
        let n: Vec<String> = ["x", "y"].iter().map(|s| s.to_string()).collect();
        let p = |s: &str| parse_poly(s, &n).unwrap();
        assert!(is_reduced(&p("x*y")));
        assert!(is_reduced(&p("x^2 - y^3")));
        assert!(!is_reduced(&p("x^2*y")));
        assert!(!is_reduced(&p("(x - y)^2*(x + y)")));
        assert!(!is_reduced(&p("1")));
        assert!(Divisor::parse(&["x", "y"], "x^2*y", None).is_err());
    }

    #[test]
    fn normal_crossing_is_free_with_diagonal_basis() {
        let d = xyz();
        let fields: Vec<FreeElement> = derlog(&d).unwrap().into_iter().map(|l| l.field).collect();
        assert_eq!(fields.len(), 3);
        match is_free(&d).unwrap() {
            FreenessVerdict::Free(b) => {
                assert!(b.verify());
                assert_eq!(b.unit, Rational::one());
            }
            v => panic!("unexpected verdict {:?}", v),
        }
    }

    #[test]
    fn euler_identity() {
        let d = Divisor::parse(&["a", "b"], "4*a^3+27*b^2", Some(vec![2, 3])).unwrap();
        let e = euler_field(&[2, 3]).unwrap();
        assert_eq!(apply_field(&e, d.h()), d.h().scale(&rat(6)));
        assert!(euler_field(&[1, 1, 0]).is_err());
    }

    #[test]
    fn derlog_h_of_coordinate_and_product() {
        let d = Divisor::parse(&["x", "y"], "x", Some(vec![1, 1])).unwrap();
        let f = derlog_h(&d).unwrap();
        let sm = Submodule::new(&f, 2, 2, &TermOrder::pot(MonomialOrder::degrevlex(2))).unwrap();
        assert!(sm.contains(&FreeElement::unit(2, 2, 1)).unwrap());
        let d = Divisor::parse(&["x", "y"], "x*y", Some(vec![1, 1])).unwrap();
        let f = derlog_h(&d).unwrap();
        assert_eq!(f.len(), 1);
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let want = FreeElement::new(2, vec![x, -&y]);
        assert!(f[0] == want || f[0] == want.scale(&rat(-1)));
    }

    #[test]
    fn recipe_passes_pairing_gate_on_diagonal_basis() {
        if let FreenessVerdict::Free(b) = is_free(&xyz()).unwrap() {
            for k in 0..=3 {
                assert!(pairing_gate(&b, k).unwrap());
            }
            assert_eq!(h_log_forms(&b, 0).unwrap()[0].entry(0), &b.h);
            assert!(h_log_forms(&b, 4).is_err());
        } else {
            panic!("xyz must be free");
        }
    }

    #[test]
    fn zero_weights_for_parameters() {
        let d = Divisor::parse(&["x", "y", "l"], "x*y*(x-y)*(x+l*y)", None).unwrap();
        assert_eq!(nonnegative_grading(d.h()), Some(vec![1, 1, 0]));
        assert_eq!(nonnegative_grading(xyz().h()), Some(vec![1, 1, 1]));
    }

    #[test]
    fn calderon_is_free_without_grading() {
        let d = Divisor::parse(&["x", "y", "l"], "x*y*(x-y)*(x+l*y)", None).unwrap();
        match is_free(&d).unwrap() {
            FreenessVerdict::Free(b) => {
                assert!(b.verify());
                assert!(pairing_gate(&b, 1).unwrap());
                assert!(pairing_gate(&b, 2).unwrap());
                assert!(saito_check(&d, &b.fields).is_ok());
            }
            v => panic!("unexpected verdict {:?}", v),
        }
    }

    #[test]
    fn four_lines_cone_is_not_free() {
        let d = Divisor::parse(&["x", "y", "z"], "x*y*z*(x+y+z)", Some(vec![1, 1, 1])).unwrap();
        match is_free(&d).unwrap() {
            FreenessVerdict::NotFree { minimal_generators } => assert!(minimal_generators >= 4),
            v => panic!("unexpected verdict {:?}", v),
        }
        let gens: Vec<FreeElement> = derlog(&d).unwrap().into_iter().map(|l| l.field).collect();
        for s in combinations(gens.len(), 3) {
            let c: Vec<FreeElement> = s.iter().map(|&i| gens[i].clone()).collect();
            assert!(saito_check(&d, &c).is_err());
        }
    }
}
