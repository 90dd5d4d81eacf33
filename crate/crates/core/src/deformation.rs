//! Deformations of almost free divisors: K_{E,e} normal spaces, relative
//! logarithmic T^1, critical ideals, singular Milnor numbers by several routes,
//! and A_e-codimension of map germs.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::checked::{mu_e_derham, term_element, torsion_length, DeRhamMilnor, FormsComplex, Mode, SliceGrading};
use crate::dimension::{count_standard, for_each_monomial, quotient_dimension, standard_terms_in_degree, Dimension};
use crate::error::{Error, Result};
use crate::forms::{wedge, FormSpace};
use crate::groebner::{ideal_basis, intersect, syzygy_module_with, Submodule};
use crate::linalg::{combinations, det, minor, Echelon, TermIndex};
use crate::logarithmic::{
    apply_field, derlog, derlog_h, euler_field, is_free, Certification, Divisor, FreenessVerdict, LogBasis,
};
use crate::module::{FreeElement, Grading, ModulePresentation};
use crate::order::{MonomialOrder, TermOrder};
use crate::poly::{rat, Monomial, Poly, Rational};

/// Restriction of `p` to the variables `keep` (others set to zero), renumbered.
pub fn restrict(p: &Poly, keep: &[usize]) -> Poly {
    let others: Vec<usize> = (0..p.nvars()).filter(|i| !keep.contains(i)).collect();
    let mut map = vec![0usize; p.nvars()];
    for (new, &old) in keep.iter().enumerate() {
        map[old] = new;
    }
    p.set_zero(&others).remap(keep.len(), &map)
}

/// A polynomial map between named affine spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducingMap {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub components: Vec<Poly>,
}

impl InducingMap {
    pub fn new(source: Vec<String>, target: Vec<String>, components: Vec<Poly>) -> Result<Self> {
        if components.len() != target.len() {
            return Err(Error::precondition("one component per target variable is required"));
        }
        if components.iter().any(|c| c.nvars() != source.len()) {
            return Err(Error::precondition("map components must live on the source variables"));
        }
        Ok(InducingMap {
            source,
            target,
            components,
        })
    }

    pub fn restricted(&self, keep: &[usize]) -> Vec<Poly> {
        self.components.iter().map(|c| restrict(c, keep)).collect()
    }
}

/// A free divisor `E`, a map `V x S x T -> W` inducing `D_0` at parameter zero,
/// and optional weights on the source variables.
#[derive(Clone, Debug)]
pub struct DeformationSetup {
    pub e: Divisor,
    pub e_basis: LogBasis,
    pub map: InducingMap,
    pub nv: usize,
    pub ns: usize,
    pub nt: usize,
    pub source_weights: Option<Vec<u32>>,
}

fn require_free(d: &Divisor, what: &str) -> Result<LogBasis> {
    match is_free(d)? {
        FreenessVerdict::Free(b) => Ok(b),
        FreenessVerdict::NotFree { minimal_generators } => Err(Error::precondition(format!(
            "{} is not free ({} minimal logarithmic generators)",
            what, minimal_generators
        ))),
        FreenessVerdict::Inconclusive { reason } => Err(Error::precondition(format!(
            "freeness of {} not certified: {}",
            what, reason
        ))),
    }
}

impl DeformationSetup {
    pub fn new(
        e: Divisor,
        map: InducingMap,
        nv: usize,
        ns: usize,
        nt: usize,
        source_weights: Option<Vec<u32>>,
    ) -> Result<Self> {
        if map.source.len() != nv + ns + nt {
            return Err(Error::precondition("source variables must be V, then S, then T"));
        }
        if map.components.len() != e.nvars() {
            return Err(Error::precondition("map target does not match the free divisor"));
        }
        if let Some(w) = &source_weights {
            if w.len() != map.source.len() || w.contains(&0) {
                return Err(Error::precondition(
                    "source weights must be positive, one per source variable",
                ));
            }
            if let Some(ew) = e.weights() {
                for (j, c) in map.components.iter().enumerate() {
                    if !c.is_zero() && c.homogeneous_degree(w) != Some(ew[j] as i64) {
                        return Err(Error::precondition(format!(
                            "map component {} is not homogeneous of the weight of {}",
                            j + 1,
                            e.names()[j]
                        )));
                    }
                }
            }
        }
        let e_basis = require_free(&e, "E")?;
        let setup = DeformationSetup {
            e,
            e_basis,
            map,
            nv,
            ns,
            nt,
            source_weights,
        };
        setup.d0()?;
        Ok(setup)
    }

    pub fn v_vars(&self) -> Vec<usize> {
        (0..self.nv).collect()
    }

    /// `V` together with the first `i` deformation parameters.
    pub fn vs_vars(&self, i: usize) -> Vec<usize> {
        (0..self.nv + i).collect()
    }

    pub fn all_vars(&self) -> Vec<usize> {
        (0..self.nv + self.ns + self.nt).collect()
    }

    pub fn i0(&self) -> Vec<Poly> {
        self.map.restricted(&self.v_vars())
    }

    fn weights_on(&self, keep: &[usize]) -> Option<Vec<u32>> {
        self.source_weights
            .as_ref()
            .map(|w| keep.iter().map(|&i| w[i]).collect())
    }

    fn names_on(&self, keep: &[usize]) -> Vec<String> {
        keep.iter().map(|&i| self.map.source[i].clone()).collect()
    }

    fn divisor_on(&self, keep: &[usize]) -> Result<Divisor> {
        let h = self.e.h().compose(&self.map.restricted(keep));
        Divisor::new(self.names_on(keep), h, self.weights_on(keep))
    }

    /// `D_0 = i_0^{-1}(E)`.
    pub fn d0(&self) -> Result<Divisor> {
        self.divisor_on(&self.v_vars())
    }

    /// `D_i`: parameters after the `i`-th and all extension parameters set to zero.
    pub fn family_divisor(&self, i: usize) -> Result<Divisor> {
        self.divisor_on(&self.vs_vars(i))
    }

    /// The total space over `S x T`.
    pub fn total_divisor(&self) -> Result<Divisor> {
        self.divisor_on(&self.all_vars())
    }

    pub fn certification(&self) -> Certification {
        if self.source_weights.is_some() && self.e.weights().is_some() {
            Certification::Certified
        } else {
            Certification::UncertifiedLocal
        }
    }

    fn slices_on(&self, keep: &[usize]) -> Result<SliceGrading> {
        self.weights_on(keep)
            .map(SliceGrading::new)
            .ok_or_else(|| Error::precondition("source weights are required for checked forms"))
    }

    /// Checked forms of `D_0`, presented by pullbacks from `E`.
    pub fn d0_complex(&self) -> Result<FormsComplex> {
        FormsComplex::almost_free(
            self.e_basis.clone(),
            self.i0(),
            self.nv,
            self.slices_on(&self.v_vars())?,
        )
    }

    /// Checked forms of the total space `D` over `S` (extension parameters zero).
    pub fn family_complex(&self) -> Result<FormsComplex> {
        let keep = self.vs_vars(self.ns);
        FormsComplex::almost_free(
            self.e_basis.clone(),
            self.map.restricted(&keep),
            keep.len(),
            self.slices_on(&keep)?,
        )
    }

    pub fn s_indices(&self) -> Vec<usize> {
        (self.nv..self.nv + self.ns).collect()
    }
}

/// A presented module with its dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentedDimension {
    pub presentation: ModulePresentation,
    pub dimension: Dimension,
}

fn present(rank: usize, nvars: usize, rels: Vec<FreeElement>, grading: Option<Grading>) -> Result<PresentedDimension> {
    let order = match &grading {
        Some(g) if g.is_positive() => MonomialOrder::wdegrevlex(g.weights.clone())?,
        _ => MonomialOrder::degrevlex(nvars),
    };
    let presentation = ModulePresentation::new(rank, nvars, rels, grading)?;
    let dimension = quotient_dimension(&presentation, &order)?;
    Ok(PresentedDimension {
        presentation,
        dimension,
    })
}

/// `theta(i_0) / (t i_0(theta_V) + i_0^* Der(log E))`.
pub fn kev_normal_space(setup: &DeformationSetup) -> Result<PresentedDimension> {
    let i0 = setup.i0();
    let nv = setup.nv;
    let m = i0.len();
    let mut rels: Vec<FreeElement> = (0..nv)
        .map(|j| FreeElement::new(nv, i0.iter().map(|c| c.derivative(j)).collect()))
        .collect();
    for xi in &setup.e_basis.fields {
        rels.push(FreeElement::new(
            nv,
            xi.entries().iter().map(|c| c.compose(&i0)).collect(),
        ));
    }
    let grading = match (setup.weights_on(&setup.v_vars()), setup.e.weights()) {
        (Some(w), Some(ew)) => Some(Grading::new(w, ew.iter().map(|&x| -(x as i64)).collect())),
        _ => None,
    };
    present(m, nv, rels, grading)
}

fn theta_pi_grading(weights: &Option<Vec<u32>>, params: &[usize]) -> Option<Grading> {
    weights
        .as_ref()
        .map(|w| Grading::new(w.clone(), params.iter().map(|&p| -(w[p] as i64)).collect()))
}

/// Rows `params` of each field, as elements of `theta(pi)`.
fn rows_of(fields: &[FreeElement], params: &[usize], nvars: usize) -> Vec<FreeElement> {
    fields
        .iter()
        .map(|f| FreeElement::new(nvars, params.iter().map(|&p| f.entry(p).clone()).collect()))
        .filter(|v| !v.is_zero())
        .collect()
}

/// `vars * theta(pi)` for a module of the given rank.
fn ideal_times_free(vars: &[usize], rank: usize, nvars: usize) -> Vec<FreeElement> {
    let mut out = Vec::new();
    for &p in vars {
        for j in 0..rank {
            out.push(FreeElement::basis_multiple(rank, j, Poly::var(nvars, p)));
        }
    }
    out
}

fn slice_order(w: &Option<Vec<u32>>, nvars: usize) -> Result<MonomialOrder> {
    match w {
        Some(w) => MonomialOrder::wdegrevlex(w.clone()),
        None => Ok(MonomialOrder::degrevlex(nvars)),
    }
}

/// `theta(rho) / (t rho(Der(log D)) + (ext) theta(rho))` for `rho` the projection
/// onto `base ++ ext`, with `D` the total space over `S x T`, which must be free.
fn t1_extension(
    setup: &DeformationSetup,
    total: &LogBasis,
    base: &[usize],
    ext: &[usize],
) -> Result<PresentedDimension> {
    let nvars = setup.map.source.len();
    let rows: Vec<usize> = base.iter().chain(ext).copied().collect();
    let mut rels = rows_of(&total.fields, &rows, nvars);
    rels.extend(ideal_times_free(ext, rows.len(), nvars));
    let w = setup.weights_on(&setup.all_vars());
    present(rows.len(), nvars, rels, theta_pi_grading(&w, &rows))
}

fn total_basis(setup: &DeformationSetup) -> Result<LogBasis> {
    require_free(&setup.total_divisor()?, "the total space over S x T")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct T1Log {
    pub relative: PresentedDimension,
    /// `T^{1,log}_{D_0}`, the restriction to `s = 0`.
    pub restricted: Dimension,
    /// Whether a free extension over extra parameters `T` was needed.
    pub extended: bool,
}

/// `T^{1,log}_{D/S}`, computed through the free total space over `S x T`.
pub fn t1_log_relative(setup: &DeformationSetup) -> Result<T1Log> {
    if setup.ns == 0 {
        return Err(Error::precondition("no deformation parameters"));
    }
    let total = total_basis(setup)?;
    let base = setup.s_indices();
    let ext: Vec<usize> = (setup.nv + setup.ns..setup.nv + setup.ns + setup.nt).collect();
    let relative = t1_extension(setup, &total, &base, &ext)?;
    let p = &relative.presentation;
    let restricted_p = p.with_relations(ideal_times_free(&base, p.rank, p.nvars))?;
    let restricted = quotient_dimension(
        &restricted_p,
        &slice_order(&setup.weights_on(&setup.all_vars()), p.nvars)?,
    )?;
    Ok(T1Log {
        relative,
        restricted,
        extended: setup.nt > 0,
    })
}

/// Maximal minors of the parameter rows of a Saito basis of the total space,
/// restricted to `t = 0`.
pub fn log_critical_ideal(setup: &DeformationSetup) -> Result<Vec<Poly>> {
    let total = setup.total_divisor()?;
    let basis = require_free(&total, "the total space")?;
    let theta = basis.theta();
    let n = basis.n();
    let rows: Vec<usize> = (setup.nv..setup.nv + setup.ns + setup.nt).collect();
    let nvars = total.nvars();
    let keep = setup.vs_vars(setup.ns);
    let mut out: Vec<Poly> = Vec::new();
    for cols in combinations(n, rows.len()) {
        let m = restrict(&minor(&theta, &rows, &cols, nvars), &keep);
        if !m.is_zero() && !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

/// Least `k <= max_power` with `f^k` in the ideal.
pub fn radical_power(ideal: &[Poly], f: &Poly, max_power: u32) -> Option<u32> {
    let nv = f.nvars();
    let gb: Vec<FreeElement> = ideal.iter().map(|g| FreeElement::new(nv, vec![g.clone()])).collect();
    let sm = Submodule::new(&gb, 1, nv, &TermOrder::pot(MonomialOrder::degrevlex(nv))).ok()?;
    (1..=max_power).find(|&k| sm.contains(&FreeElement::new(nv, vec![f.pow(k)])).unwrap_or(false))
}

fn finite(d: Dimension, what: &str) -> Result<u64> {
    d.finite()
        .ok_or_else(|| Error::precondition(format!("{} is infinite dimensional", what)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlternatingSum {
    pub terms: Vec<u64>,
    pub value: i64,
}

/// `sum_i (-1)^(i+1) dim T^{1,log}_{D_i/S_i}` over the chain `D_1, ..., D_d`,
/// with `pi_i = s_i` and the later parameters as the free extension.
pub fn mu_e_alternating(setup: &DeformationSetup) -> Result<AlternatingSum> {
    if setup.ns == 0 {
        return Err(Error::precondition("no deformation parameters"));
    }
    require_free(&setup.family_divisor(setup.ns)?, "the deformation D")?;
    let total = total_basis(setup)?;
    let end = setup.nv + setup.ns + setup.nt;
    let mut terms = Vec::new();
    let mut value = 0i64;
    for i in 1..=setup.ns {
        let s_i = setup.nv + i - 1;
        let ext: Vec<usize> = (s_i + 1..end).collect();
        let t = t1_extension(setup, &total, &[s_i], &ext)?;
        let dim = finite(t.dimension, &format!("T^1,log of D_{}", i))?;
        value += if i % 2 == 1 { dim as i64 } else { -(dim as i64) };
        terms.push(dim);
    }
    if value < 0 {
        return Err(Error::invariant("alternating sum is negative"));
    }
    Ok(AlternatingSum { terms, value })
}

/// `dim theta(pi) / (t pi(Der(log h)) + m_S theta(pi))` for the total space.
pub fn mu_e_good_equation(setup: &DeformationSetup) -> Result<u64> {
    if setup.ns == 0 {
        return Err(Error::precondition("no deformation parameters"));
    }
    let keep = setup.vs_vars(setup.ns);
    let nvars = keep.len();
    let d = setup.family_divisor(setup.ns)?;
    require_free(&d, "the deformation D")?;
    good_equation_witness(&d)?;
    let params = setup.s_indices();
    let w = setup.weights_on(&keep);
    let mut rels = rows_of(&derlog_h(&d)?, &params, nvars);
    rels.extend(ideal_times_free(&params, params.len(), nvars));
    let t = present(params.len(), nvars, rels, theta_pi_grading(&w, &params))?;
    finite(t.dimension, "the good-equation quotient")
}

/// A field `chi` with `chi(h) = h`: the scaled Euler field when graded,
/// otherwise existence is certified by `h` lying in its Jacobian ideal.
pub fn good_equation_witness(d: &Divisor) -> Result<Option<FreeElement>> {
    if let (Some(w), Some(l)) = (d.weights(), d.degree()) {
        let chi = euler_field(w)?.scale(&(Rational::one() / rat(l)));
        if apply_field(&chi, d.h()) != *d.h() {
            return Err(Error::invariant("Euler field does not reproduce h"));
        }
        return Ok(Some(chi));
    }
    let nv = d.nvars();
    let gens: Vec<FreeElement> = d
        .h()
        .gradient()
        .into_iter()
        .map(|g| FreeElement::new(nv, vec![g]))
        .collect();
    let sm = Submodule::new(&gens, 1, nv, &TermOrder::pot(MonomialOrder::degrevlex(nv)))?;
    if sm.contains(&FreeElement::new(nv, vec![d.h().clone()]))? {
        Ok(None)
    } else {
        Err(Error::precondition(
            "no good defining equation: h is not in its Jacobian ideal",
        ))
    }
}

/// The three routes to the singular Milnor number of `D_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MilnorRoutes {
    pub derham: DeRhamMilnor,
    pub alternating: AlternatingSum,
    pub good_equation: u64,
    pub agree: bool,
}

pub fn mu_e_routes(setup: &DeformationSetup, window: i64) -> Result<MilnorRoutes> {
    let derham = mu_e_derham(&setup.d0_complex()?, window)?;
    let alternating = mu_e_alternating(setup)?;
    let good_equation = mu_e_good_equation(setup)?;
    let agree = derham.value as i64 == alternating.value
        && derham.value == good_equation
        && derham.value == derham.top_dimension;
    Ok(MilnorRoutes {
        derham,
        alternating,
        good_equation,
        agree,
    })
}

/// `mu_E` of the total space over `S`, viewed as an almost free divisor.
pub fn mu_e_total_space(setup: &DeformationSetup, window: i64) -> Result<DeRhamMilnor> {
    mu_e_derham(&setup.family_complex()?, window)
}

/// Zeroth Fitting ideal over the base of a one-parameter `T^{1,log}_{D/S}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FittingReport {
    /// Monic generator, a polynomial in the parameter.
    pub fitting: Poly,
    /// Monic generator of the annihilator over the base, by elimination.
    pub eliminated: Poly,
    pub reduced: bool,
}

pub fn ke_discriminant_reducedness(setup: &DeformationSetup) -> Result<FittingReport> {
    if setup.ns != 1 {
        return Err(Error::precondition(
            "the Fitting test needs exactly one deformation parameter",
        ));
    }
    let t1 = t1_log_relative(setup)?;
    let dim = finite(t1.relative.dimension, "T^1,log_{D/S}")?;
    if dim == 0 {
        return Err(Error::precondition("T^1,log_{D/S} vanishes: the family is trivial"));
    }
    let p = &t1.relative.presentation;
    let nvars = p.nvars;
    let s = setup.nv;
    let order = match &p.grading {
        Some(g) => TermOrder::pot(MonomialOrder::wdegrevlex(g.weights.clone())?),
        None => TermOrder::pot(MonomialOrder::degrevlex(nvars)),
    };
    let sm = Submodule::of_presentation(p, &order)?;
    let basis = standard_basis(&sm)?;
    let index: std::collections::HashMap<_, _> = basis.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    let size = basis.len();
    // Matrix of multiplication by s; column j = image of basis element j.
    let mut a = vec![vec![Rational::zero(); size]; size];
    for (j, t) in basis.iter().enumerate() {
        let e = term_element(t, p.rank, nvars).mul_poly(&Poly::var(nvars, s));
        for (term, c) in sm.normal_form_terms(&e)? {
            let i = *index
                .get(&term)
                .ok_or_else(|| Error::invariant("normal form left the standard basis"))?;
            a[i][j] = c;
        }
    }
    let x = Poly::var(1, 0);
    let m: Vec<Vec<Poly>> = (0..size)
        .map(|i| {
            (0..size)
                .map(|j| {
                    let c = Poly::constant(1, -a[i][j].clone());
                    if i == j {
                        &x + &c
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect();
    let fitting = det(&m, 1);
    let eliminated = eliminate_to_parameter(p, s)?;
    let reduced = fitting == x && eliminated == x;
    Ok(FittingReport {
        fitting,
        eliminated,
        reduced,
    })
}

/// Standard terms of a zero-dimensional quotient.
fn standard_basis(sm: &Submodule) -> Result<Vec<crate::order::Term>> {
    let leads = sm.leading_terms();
    let nv = sm.nvars();
    let rank = sm.rank();
    let Dimension::Finite(total) = count_standard(&leads, rank, nv) else {
        return Err(Error::precondition("quotient is infinite dimensional"));
    };
    let g = Grading::unshifted(vec![1; nv], rank);
    let mut out = Vec::new();
    let mut d = 0;
    while (out.len() as u64) < total {
        out.extend(standard_terms_in_degree(&leads, &g, d, None)?);
        d += 1;
    }
    Ok(out)
}

/// Generators of `ann(F / R)`, intersecting `(R : e_j)` over the components.
fn annihilator(p: &ModulePresentation) -> Result<Vec<Poly>> {
    let nv = p.nvars;
    let mono = MonomialOrder::degrevlex(nv);
    let mut acc: Option<Vec<FreeElement>> = None;
    for j in 0..p.rank {
        let mut cols = vec![FreeElement::unit(p.rank, nv, j)];
        cols.extend(p.relations.iter().cloned());
        let colon_j: Vec<FreeElement> = syzygy_module_with(&cols, &mono)?
            .into_iter()
            .map(|z| FreeElement::new(nv, vec![z.entry(0).clone()]))
            .filter(|z| !z.is_zero())
            .collect();
        acc = Some(match acc {
            None => colon_j,
            Some(prev) => intersect(&prev, &colon_j, 1, nv, &mono)?,
        });
    }
    Ok(acc
        .unwrap_or_default()
        .into_iter()
        .map(|e| e.entry(0).clone())
        .collect())
}

/// Monic generator of `ann(M) ∩ Q[s]`, by a lex basis with `s` last.
fn eliminate_to_parameter(p: &ModulePresentation, s: usize) -> Result<Poly> {
    let nv = p.nvars;
    let mut perm: Vec<usize> = (0..nv).filter(|&i| i != s).collect();
    perm.push(s);
    let mut to_new = vec![0usize; nv];
    for (new, &old) in perm.iter().enumerate() {
        to_new[old] = new;
    }
    let gens: Vec<Poly> = annihilator(p)?.iter().map(|g| g.remap(nv, &to_new)).collect();
    let gb = ideal_basis(&gens, &MonomialOrder::lex(nv));
    let g = gb
        .into_iter()
        .filter(|g| !g.is_zero() && g.terms().all(|(m, _)| m.exponents()[..nv - 1].iter().all(|&e| e == 0)))
        .min_by_key(|g| g.total_degree())
        .ok_or_else(|| Error::precondition("annihilator meets the base trivially"))?;
    let univariate = Poly::from_terms(
        1,
        g.terms()
            .map(|(m, c)| (Monomial::from_exponents(vec![m.exponents()[nv - 1]]), c.clone())),
    );
    Ok(monic(univariate))
}

fn monic(p: Poly) -> Poly {
    let lead = p
        .terms()
        .max_by_key(|(m, _)| m.degree())
        .map(|(_, c)| c.clone())
        .unwrap_or_else(Rational::one);
    p.scale(&(Rational::one() / lead))
}

/// Outcome of the Cohen-Macaulay proxy for `T^{1,log}_{D/S}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CmProxy {
    pub forms: Vec<Vec<i64>>,
    pub attempts: usize,
    pub finite_after: bool,
    pub infinite_before: bool,
    pub holds: bool,
}

/// Cuts `T^{1,log}_{D/S}` by `d - 1` pseudo-random linear forms in the parameters.
pub fn cm_proxy(setup: &DeformationSetup, seed: u64) -> Result<CmProxy> {
    let t1 = t1_log_relative(setup)?;
    let p = &t1.relative.presentation;
    let nvars = p.nvars;
    let d = setup.ns;
    let params = setup.s_indices();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = match &p.grading {
        Some(g) => MonomialOrder::wdegrevlex(g.weights.clone())?,
        None => MonomialOrder::degrevlex(nvars),
    };
    let mut last = None;
    for attempt in 1..=5 {
        let forms: Vec<Vec<i64>> = (0..d - 1)
            .map(|_| loop {
                let c: Vec<i64> = (0..d).map(|_| rng.random_range(-5..=5)).collect();
                if c.iter().any(|&x| x != 0) {
                    break c;
                }
            })
            .collect();
        let mut dims = Vec::new();
        let mut current = p.clone();
        dims.push(quotient_dimension(&current, &order)?);
        for c in &forms {
            let l = params.iter().zip(c).fold(Poly::zero(nvars), |acc, (&s, &k)| {
                &acc + &Poly::var(nvars, s).scale(&rat(k))
            });
            let extra = (0..p.rank)
                .map(|j| FreeElement::basis_multiple(p.rank, j, l.clone()))
                .collect();
            current = ModulePresentation::new(current.rank, nvars, [current.relations.clone(), extra].concat(), None)?;
            dims.push(quotient_dimension(&current, &order)?);
        }
        let finite_after = dims.last().unwrap().is_finite();
        let infinite_before = d == 1 || !dims[dims.len() - 2].is_finite();
        let result = CmProxy {
            forms,
            attempts: attempt,
            finite_after,
            infinite_before,
            holds: finite_after && infinite_before,
        };
        if result.holds {
            return Ok(result);
        }
        last = Some(result);
    }
    Ok(last.unwrap())
}

/// The kernel of `theta_V -> theta(i_0) / i_0^* Der(log E)` equals `Der(log D_0)`.
pub fn sequence_kernel_matches(setup: &DeformationSetup) -> Result<bool> {
    let i0 = setup.i0();
    let nv = setup.nv;
    let mut cols: Vec<FreeElement> = (0..nv)
        .map(|j| FreeElement::new(nv, i0.iter().map(|c| c.derivative(j)).collect()))
        .collect();
    for xi in &setup.e_basis.fields {
        cols.push(FreeElement::new(
            nv,
            xi.entries().iter().map(|c| c.compose(&i0)).collect(),
        ));
    }
    let kernel: Vec<FreeElement> = syzygy_module_with(&cols, &MonomialOrder::degrevlex(nv))?
        .into_iter()
        .map(|z| FreeElement::new(nv, z.into_entries()[..nv].to_vec()))
        .filter(|z| !z.is_zero())
        .collect();
    let d0 = setup.d0()?;
    let fields: Vec<FreeElement> = derlog(&d0)?.into_iter().map(|l| l.field).collect();
    let ord = TermOrder::pot(MonomialOrder::degrevlex(nv));
    Submodule::new(&kernel, nv, nv, &ord)?.same_as(&Submodule::new(&fields, nv, nv, &ord)?)
}

/// Kernel dimensions of `ds_1 ^ ... ^ ds_d` on slices of `Omega^k` of the fibre,
/// into `Omega^(k+d)` of the total space modulo `s`; also the colon route.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionRoutes {
    pub colon: u64,
    pub wedge_kernel: u64,
    pub per_degree: Vec<(i64, u64)>,
    pub agree: bool,
}

pub fn torsion_routes(setup: &DeformationSetup, k: usize, degree_bound: i64, window: i64) -> Result<TorsionRoutes> {
    if setup.ns == 0 {
        return Err(Error::precondition("the wedge route needs deformation parameters"));
    }
    let d0 = setup.d0_complex()?;
    let src = d0.module(k)?;
    let colon = torsion_length(&src, degree_bound.max(1) as usize)?;
    let fam = setup
        .family_complex()?
        .with_parameters(setup.s_indices(), Mode::Fibre)?;
    let dd = setup.ns;
    let tgt = fam.module(k + dd)?;
    let n_total = fam.n();
    let smask = setup.s_indices().iter().fold(0u32, |m, &p| m | (1 << p));
    let ds = FormSpace::new(n_total, dd).unit(smask, n_total);
    let embed: Vec<usize> = (0..setup.nv).collect();
    let mut per_degree = Vec::new();
    let mut total = 0u64;
    for degree in 0..=degree_bound {
        let basis = src.slice_basis(degree, 0)?;
        let mut index = TermIndex::new();
        let mut ech = Echelon::new();
        for t in &basis {
            let e = term_element(t, src.rank(), setup.nv);
            let lifted = lift_form(&e, setup.nv, k, n_total, &embed);
            let w = wedge(&lifted, k, &ds, dd, n_total);
            ech.insert(tgt.normal_form_row(&w, &mut index)?);
        }
        let kernel = (basis.len() - ech.rank()) as u64;
        if kernel > 0 {
            if degree > degree_bound - window {
                return Err(Error::NonStabilization(format!(
                    "wedge kernel nonzero in degree {} within the final window",
                    degree
                )));
            }
            per_degree.push((degree, kernel));
        }
        total += kernel;
    }
    Ok(TorsionRoutes {
        colon,
        wedge_kernel: total,
        per_degree,
        agree: colon == total,
    })
}

/// A `k`-form on the first `nv` variables viewed on `n` variables.
fn lift_form(form: &FreeElement, nv: usize, k: usize, n: usize, embed: &[usize]) -> FreeElement {
    let src = FormSpace::new(nv, k);
    let dst = FormSpace::new(n, k);
    let mut out = vec![Poly::zero(n); dst.rank()];
    for (i, p) in form.entries().iter().enumerate() {
        out[dst.index_of(src.subset(i))] = p.remap(n, embed);
    }
    FreeElement::new(n, out)
}

/// Kernel of `ds ^ : Omega^k_{D/S} -> Omega^(k+d)_D` on slices up to the bound.
pub fn block_kernel(setup: &DeformationSetup, k: usize, degree_bound: i64) -> Result<Vec<(i64, u64)>> {
    let fam = setup.family_complex()?;
    let rel = fam.with_parameters(setup.s_indices(), Mode::Relative)?;
    let src = rel.module(k)?;
    let tgt = fam.module(k + setup.ns)?;
    let n = fam.n();
    let smask = setup.s_indices().iter().fold(0u32, |m, &p| m | (1 << p));
    let ds = FormSpace::new(n, setup.ns).unit(smask, n);
    let mut out = Vec::new();
    for degree in 0..=degree_bound {
        let basis = src.slice_basis(degree, 0)?;
        let mut index = TermIndex::new();
        let mut ech = Echelon::new();
        for t in &basis {
            let e = term_element(t, src.rank(), n);
            ech.insert(tgt.normal_form_row(&wedge(&e, k, &ds, setup.ns, n), &mut index)?);
        }
        out.push((degree, (basis.len() - ech.rank()) as u64));
    }
    Ok(out)
}

/// Jet-by-jet codimension history of `T A_e f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AeDirect {
    pub value: Option<u64>,
    pub history: Vec<(u32, u64)>,
}

fn truncate(p: &Poly, n: u32) -> Poly {
    Poly::from_terms(
        p.nvars(),
        p.terms()
            .filter(|(m, _)| m.degree() <= n)
            .map(|(m, c)| (m.clone(), c.clone())),
    )
}

fn tangent_codim_at(f: &[Poly], order: u32) -> Result<u64> {
    let n = f[0].nvars();
    let p = f.len();
    let mut index = TermIndex::new();
    let mut ech = Echelon::new();
    let ones = vec![1u32; n];
    let mut monos: Vec<Monomial> = Vec::new();
    for d in 0..=order as i64 {
        for_each_monomial(&ones, d, None, &mut |e| {
            monos.push(Monomial::from_exponents(e.to_vec()))
        })?;
    }
    let jac: Vec<Vec<Poly>> = (0..n)
        .map(|j| f.iter().map(|c| truncate(&c.derivative(j), order)).collect())
        .collect();
    let add = |v: Vec<Poly>, index: &mut TermIndex, ech: &mut Echelon| {
        let e = FreeElement::new(n, v);
        let row = index.row(e.terms());
        ech.insert(row);
    };
    for m in &monos {
        for col in &jac {
            let v: Vec<Poly> = col.iter().map(|c| truncate(&c.mul_monomial(m), order)).collect();
            add(v, &mut index, &mut ech);
        }
    }
    let ones_t = vec![1u32; p];
    for d in 0..=order as i64 {
        let mut alphas = Vec::new();
        for_each_monomial(&ones_t, d, None, &mut |a| alphas.push(a.to_vec()))?;
        for a in alphas {
            let mut g = Poly::one(n);
            for (i, &k) in a.iter().enumerate() {
                for _ in 0..k {
                    g = truncate(&(&g * &f[i]), order);
                }
            }
            for i in 0..p {
                let mut v = vec![Poly::zero(n); p];
                v[i] = g.clone();
                add(v, &mut index, &mut ech);
            }
        }
    }
    Ok((p * monos.len()) as u64 - ech.rank() as u64)
}

/// `dim theta(f) / (tf(theta_n) + omega f(theta_p))` by jets of growing order,
/// stopping when two consecutive orders agree.
pub fn ae_codim_direct(f: &[Poly], cap: u32) -> Result<AeDirect> {
    let Some(first) = f.first() else {
        return Err(Error::precondition("empty map germ"));
    };
    if f.iter().any(|c| c.nvars() != first.nvars()) {
        return Err(Error::precondition("components on different variable lists"));
    }
    if f.iter().any(|c| {
        !c.constant_value().map(|v| v.is_zero()).unwrap_or(true)
            || c.coefficient(&Monomial::one(c.nvars())) != Rational::zero()
    }) {
        return Err(Error::precondition("map germ must send the origin to the origin"));
    }
    let start = f.iter().filter_map(|c| c.total_degree()).max().unwrap_or(1).max(1);
    let mut history = Vec::new();
    let mut prev: Option<u64> = None;
    for order in start..=cap.max(start) {
        let c = tangent_codim_at(f, order)?;
        history.push((order, c));
        if prev == Some(c) {
            return Ok(AeDirect {
                value: Some(c),
                history,
            });
        }
        prev = Some(c);
    }
    Ok(AeDirect { value: None, history })
}

/// Damon's route: the K_{E,e} codimension of `i_0` against the discriminant of a stable unfolding.
#[derive(Clone, Debug)]
pub struct DamonReport {
    pub value: Dimension,
    pub minors_contain_discriminant: bool,
    pub setup: DeformationSetup,
}

pub fn ae_codim_damon(
    unfolding: &[Poly],
    discriminant: Divisor,
    inclusion: InducingMap,
    weights: Option<Vec<u32>>,
) -> Result<DamonReport> {
    if unfolding.len() != discriminant.nvars() {
        return Err(Error::precondition(
            "unfolding target does not match the discriminant ring",
        ));
    }
    let nu = unfolding.first().map(|c| c.nvars()).unwrap_or(0);
    let hf = discriminant.h().compose(unfolding);
    let p = unfolding.len();
    let minors_contain_discriminant = if nu >= p {
        let jac: Vec<Vec<Poly>> = unfolding.iter().map(|c| c.gradient()).collect();
        let rows: Vec<usize> = (0..p).collect();
        let minors: Vec<Poly> = combinations(nu, p)
            .into_iter()
            .map(|cols| minor(&jac, &rows, &cols, nu))
            .filter(|m| !m.is_zero())
            .collect();
        radical_power(&minors, &hf, 1).is_some() || hf.is_zero()
    } else {
        hf.is_zero()
    };
    if !minors_contain_discriminant {
        return Err(Error::precondition(
            "the discriminant equation does not vanish on the critical values",
        ));
    }
    let nv = inclusion.source.len();
    let setup = DeformationSetup::new(discriminant, inclusion, nv, 0, 0, weights)?;
    let value = kev_normal_space(&setup)?.dimension;
    Ok(DamonReport {
        value,
        minors_contain_discriminant,
        setup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    pub fn nc(n: usize) -> Divisor {
        let ns: Vec<String> = (1..=n).map(|i| format!("z{}", i)).collect();
        let refs: Vec<&str> = ns.iter().map(|s| s.as_str()).collect();
        Divisor::parse(&refs, &ns.join("*"), Some(vec![1; n])).unwrap()
    }

    pub fn setup(
        e: Divisor,
        src: &[&str],
        comps: &[&str],
        nv: usize,
        ns: usize,
        nt: usize,
        w: Option<Vec<u32>>,
    ) -> DeformationSetup {
        let s = names(src);
        let comps = comps.iter().map(|c| parse_poly(c, &s).unwrap()).collect();
        let m = InducingMap::new(s, e.names().to_vec(), comps).unwrap();
        DeformationSetup::new(e, m, nv, ns, nt, w).unwrap()
    }

    fn five_planes() -> DeformationSetup {
        setup(
            nc(5),
            &["x", "y", "z", "s", "t"],
            &["x", "y", "z", "x+y+z-s", "x+2*y+3*z-4*s-t"],
            3,
            1,
            1,
            Some(vec![1; 5]),
        )
    }

    fn four_planes() -> DeformationSetup {
        setup(
            nc(4),
            &["x1", "x2", "x3", "s"],
            &["x1", "x2", "x3", "x1+x2+x3-s"],
            3,
            1,
            0,
            Some(vec![1; 4]),
        )
    }

    #[test]
    fn four_planes_family() {
        let st = four_planes();
        assert_eq!(kev_normal_space(&st).unwrap().dimension, Dimension::Finite(1));
        let t1 = t1_log_relative(&st).unwrap();
        assert!(!t1.extended);
        assert_eq!(t1.relative.dimension, Dimension::Finite(1));
        assert_eq!(t1.restricted, Dimension::Finite(1));
        let routes = mu_e_routes(&st, 2).unwrap();
        assert!(routes.agree, "{:?}", routes);
        assert_eq!(routes.derham.value, 1);
        let f = ke_discriminant_reducedness(&st).unwrap();
        assert!(f.reduced, "{:?}", f);
        assert!(sequence_kernel_matches(&st).unwrap());
        assert_eq!(mu_e_total_space(&st, 2).unwrap().value, 0);
    }

    #[test]
    fn four_planes_torsion_routes_and_block() {
        let st = four_planes();
        let r = torsion_routes(&st, 2, 8, 3).unwrap();
        assert_eq!(r.colon, 1);
        assert!(r.agree, "{:?}", r);
        for k in 0..=2 {
            assert!(block_kernel(&st, k, 6).unwrap().iter().all(|&(_, d)| d == 0));
        }
    }

    #[test]
    fn critical_ideal_of_four_planes() {
        let st = four_planes();
        let ideal = log_critical_ideal(&st).unwrap();
        for i in 0..4 {
            assert!(radical_power(&ideal, &Poly::var(4, i), 6).is_some());
        }
    }

    #[test]
    fn trivial_family() {
        let st = setup(nc(2), &["x", "y", "s"], &["x", "y"], 2, 1, 0, Some(vec![1, 1, 1]));
        assert_eq!(t1_log_relative(&st).unwrap().relative.dimension, Dimension::Finite(0));
        assert_eq!(mu_e_alternating(&st).unwrap().value, 0);
        assert_eq!(mu_e_good_equation(&st).unwrap(), 0);
        assert!(ke_discriminant_reducedness(&st).is_err());
    }

    #[test]
    fn jets_of_plane_germs() {
        let s = names(&["x", "y"]);
        let p = |t: &str| parse_poly(t, &s).unwrap();
        assert_eq!(ae_codim_direct(&[p("x"), p("y^2")], 20).unwrap().value, Some(0));
        assert_eq!(ae_codim_direct(&[p("x"), p("y^3+x^2*y")], 20).unwrap().value, Some(1));
        let bad = ae_codim_direct(&[p("x"), p("y^3")], 8).unwrap();
        assert_eq!(bad.value, None);
        assert!(bad.history.iter().all(|&(n, c)| c == n as u64));
    }

    #[test]
    fn lips_by_damon() {
        let e = Divisor::parse(&["a", "b", "c"], "4*(a^2+b)^3+27*c^2", Some(vec![1, 2, 3])).unwrap();
        let u = names(&["x", "u", "y"]);
        let f: Vec<Poly> = ["x", "u", "y^3+x^2*y+u*y"]
            .iter()
            .map(|c| parse_poly(c, &u).unwrap())
            .collect();
        let v = names(&["X", "Z"]);
        let i0 = InducingMap::new(
            v.clone(),
            e.names().to_vec(),
            ["X", "0", "Z"].iter().map(|c| parse_poly(c, &v).unwrap()).collect(),
        )
        .unwrap();
        let r = ae_codim_damon(&f, e, i0, Some(vec![1, 3])).unwrap();
        assert_eq!(r.value, Dimension::Finite(1));
        let m1 = r.setup.d0_complex().unwrap().module(1).unwrap();
        assert_eq!(torsion_length(&m1, 20).unwrap(), 1);
    }

    #[test]
    fn five_planes_count_and_chain() {
        let st = five_planes();
        let t1 = t1_log_relative(&st).unwrap();
        assert!(t1.extended);
        assert_eq!(t1.relative.dimension, Dimension::Finite(5));
        assert_eq!(mu_e_derham(&st.d0_complex().unwrap(), 2).unwrap().value, 4);
        assert_eq!(mu_e_total_space(&st, 2).unwrap().value, 1);
        assert!(mu_e_alternating(&st).is_err());
        let two = setup(
            nc(5),
            &["x", "y", "z", "s", "t"],
            &["x", "y", "z", "x+y+z-s", "x+2*y+3*z-4*s-t"],
            3,
            2,
            0,
            Some(vec![1; 5]),
        );
        let alt = mu_e_alternating(&two).unwrap();
        assert_eq!(alt.terms, vec![5, 1]);
        assert_eq!(alt.value, 4);
        assert_eq!(mu_e_good_equation(&two).unwrap(), 4);
    }
}
