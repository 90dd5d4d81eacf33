//! The modified Kähler complexes: `Omega^k / h Omega^k(log D)` for free divisors,
//! the pulled-back version for almost free divisors, and relative variants.

use serde::Serialize;

use crate::dimension::{
    count_difference, count_standard, graded_table, standard_terms_in_degree, Dimension, GradedDimensionTable,
};
use crate::error::{Error, Result};
use crate::forms::{contract, dh_wedge, exterior_derivative, mask_indices, pullback, wedge, FormSpace};
use crate::groebner::{colon, intersect, syzygy_module, Submodule};
use crate::linalg::{Echelon, TermIndex};
use crate::logarithmic::{h_log_forms, tangency_witness, LogBasis};
use crate::module::{FreeElement, Grading, ModulePresentation};
use crate::order::{MonomialOrder, Term, TermOrder};
use crate::poly::Poly;

/// Where the relations `h Omega^k(log)` come from.
#[derive(Clone, Debug)]
pub enum FormsSource {
    /// A Saito basis on the ambient space itself.
    Free(LogBasis),
    /// Pullbacks along `map` of the log forms of a free divisor `E`.
    Pullback { e: LogBasis, map: Vec<Poly> },
}

/// Absolute forms; forms relative to the parameters (`ds_i ^` killed);
/// relative forms on the zero fibre (`s_i` killed as well); absolute forms
/// on the zero fibre (`s_i` killed, `ds_i` kept).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    Absolute,
    Relative,
    Restricted,
    Fibre,
}

/// Weights for slicing. Variables of weight zero must carry positive `aux`
/// weight; slices are then truncated at an auxiliary degree bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceGrading {
    pub weights: Vec<u32>,
    pub aux: Option<Vec<u32>>,
}

impl SliceGrading {
    /// Zero weights get auxiliary weight one.
    pub fn new(weights: Vec<u32>) -> Self {
        let aux = if weights.contains(&0) {
            Some(weights.iter().map(|&w| (w == 0) as u32).collect())
        } else {
            None
        };
        SliceGrading { weights, aux }
    }

    pub fn is_positive(&self) -> bool {
        self.aux.is_none()
    }

    pub fn forms_grading(&self, sp: &FormSpace) -> Grading {
        sp.grading(&self.weights)
    }

    fn aux_grading(&self, sp: &FormSpace) -> Option<Grading> {
        self.aux.as_ref().map(|a| sp.grading(a))
    }

    fn term_order(&self, sp: &FormSpace) -> Result<TermOrder> {
        match &self.aux {
            None => Ok(TermOrder::graded(
                MonomialOrder::wdegrevlex(self.weights.clone())?,
                self.forms_grading(sp),
            )),
            Some(a) => {
                let total: Vec<u32> = self.weights.iter().zip(a).map(|(w, x)| w + x).collect();
                Ok(TermOrder::graded(MonomialOrder::wdegrevlex(total)?, sp.grading(a)))
            }
        }
    }
}

/// The complex `k -> Omega^k_V / relations_k`.
#[derive(Clone, Debug)]
pub struct FormsComplex {
    n: usize,
    h: Poly,
    source: FormsSource,
    params: Vec<usize>,
    mode: Mode,
    slices: SliceGrading,
}

impl FormsComplex {
    pub fn free(basis: LogBasis, slices: SliceGrading) -> Result<Self> {
        let n = basis.n();
        let h = basis.h.clone();
        Self::build(n, h, FormsSource::Free(basis), Vec::new(), Mode::Absolute, slices)
    }

    /// `map` has one component per variable of `E`, in the `n` variables here.
    pub fn almost_free(e: LogBasis, map: Vec<Poly>, n: usize, slices: SliceGrading) -> Result<Self> {
        if map.len() != e.n() || map.iter().any(|c| c.nvars() != n) {
            return Err(Error::precondition("inducing map does not match the free divisor"));
        }
        let h = e.h.compose(&map);
        Self::build(
            n,
            h,
            FormsSource::Pullback { e, map },
            Vec::new(),
            Mode::Absolute,
            slices,
        )
    }

    /// Same relations with parameters `params` treated relatively.
    pub fn with_parameters(&self, params: Vec<usize>, mode: Mode) -> Result<Self> {
        Self::build(
            self.n,
            self.h.clone(),
            self.source.clone(),
            params,
            mode,
            self.slices.clone(),
        )
    }

    fn build(
        n: usize,
        h: Poly,
        source: FormsSource,
        params: Vec<usize>,
        mode: Mode,
        slices: SliceGrading,
    ) -> Result<Self> {
        if slices.weights.len() != n {
            return Err(Error::precondition("slice weights do not match the ambient dimension"));
        }
        if params.iter().any(|&p| p >= n) {
            return Err(Error::precondition("parameter index out of range"));
        }
        if h.homogeneous_degree(&slices.weights).is_none() {
            return Err(Error::precondition("equation is not homogeneous for the slice weights"));
        }
        Ok(FormsComplex {
            n,
            h,
            source,
            params,
            mode,
            slices,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> &Poly {
        &self.h
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn slices(&self) -> &SliceGrading {
        &self.slices
    }

    /// Generators of the relation module in degree `k`.
    pub fn relations(&self, k: usize) -> Result<Vec<FreeElement>> {
        if k > self.n {
            return Err(Error::precondition(format!(
                "form degree {} exceeds dimension {}",
                k, self.n
            )));
        }
        let n = self.n;
        let sp = FormSpace::new(n, k);
        let mut out: Vec<FreeElement> = match &self.source {
            FormsSource::Free(b) => h_log_forms(b, k)?,
            FormsSource::Pullback { e, map } => {
                let mut rels = Vec::new();
                for j in 0..=k.min(e.n()) {
                    let rest = FormSpace::new(n, k - j);
                    for g in h_log_forms(e, j)? {
                        let pg = pullback(&g, j, map, n);
                        if pg.is_zero() {
                            continue;
                        }
                        for c in 0..rest.rank() {
                            let w = wedge(&pg, j, &rest.unit(rest.subset(c), n), k - j, n);
                            if !w.is_zero() && !rels.contains(&w) {
                                rels.push(w);
                            }
                        }
                    }
                }
                rels
            }
        };
        if matches!(self.mode, Mode::Relative | Mode::Restricted) {
            let pmask = self.params.iter().fold(0u32, |m, &p| m | (1 << p));
            for c in 0..sp.rank() {
                if sp.subset(c) & pmask != 0 {
                    out.push(FreeElement::unit(sp.rank(), n, c));
                }
            }
        }
        if matches!(self.mode, Mode::Restricted | Mode::Fibre) {
            let pmask = self.params.iter().fold(0u32, |m, &p| m | (1 << p));
            for &p in &self.params {
                for c in 0..sp.rank() {
                    if self.mode == Mode::Fibre || sp.subset(c) & pmask == 0 {
                        out.push(FreeElement::basis_multiple(sp.rank(), c, Poly::var(n, p)));
                    }
                }
            }
        }
        Ok(out)
    }

    /// The presented module in degree `k` together with its Gröbner basis.
    pub fn module(&self, k: usize) -> Result<CheckedFormsModule> {
        let sp = FormSpace::new(self.n, k);
        let grading = self.slices.forms_grading(&sp);
        let relations = self.relations(k)?;
        let presentation = ModulePresentation::new(sp.rank(), self.n, relations, Some(grading))?;
        let order = self.slices.term_order(&sp)?;
        let gb = Submodule::of_presentation(&presentation, &order)?;
        Ok(CheckedFormsModule {
            k,
            presentation,
            space: sp,
            gb,
            slices: self.slices.clone(),
        })
    }

    /// All degrees `0..=n`.
    pub fn modules(&self) -> Result<Vec<CheckedFormsModule>> {
        (0..=self.n).map(|k| self.module(k)).collect()
    }
}

/// `Omega^k / relations` with a Gröbner basis for the relations.
#[derive(Clone, Debug)]
pub struct CheckedFormsModule {
    pub k: usize,
    pub presentation: ModulePresentation,
    space: FormSpace,
    gb: Submodule,
    slices: SliceGrading,
}

impl CheckedFormsModule {
    pub fn space(&self) -> &FormSpace {
        &self.space
    }

    pub fn submodule(&self) -> &Submodule {
        &self.gb
    }

    pub fn rank(&self) -> usize {
        self.space.rank()
    }

    pub fn nvars(&self) -> usize {
        self.presentation.nvars
    }

    /// Whether `form` vanishes in the quotient.
    pub fn is_zero_class(&self, form: &FreeElement) -> Result<bool> {
        self.gb.contains(form)
    }

    pub fn dimension(&self) -> Dimension {
        count_standard(&self.gb.leading_terms(), self.rank(), self.nvars())
    }

    /// Standard terms in weighted degree `degree`, truncated at `aux_bound`
    /// in auxiliary degree when the grading has zero weights.
    pub fn slice_basis(&self, degree: i64, aux_bound: i64) -> Result<Vec<Term>> {
        let g = self.slices.forms_grading(&self.space);
        let aux = self.slices.aux_grading(&self.space);
        standard_terms_in_degree(
            &self.gb.leading_terms(),
            &g,
            degree,
            aux.as_ref().map(|a| (a, aux_bound)),
        )
    }

    pub fn graded_table(&self, lo: i64, hi: i64, window: usize) -> Result<GradedDimensionTable> {
        graded_table(&self.gb, &self.slices.forms_grading(&self.space), lo, hi, window)
    }

    pub fn normal_form_row(
        &self,
        form: &FreeElement,
        index: &mut TermIndex,
    ) -> Result<Vec<(usize, crate::poly::Rational)>> {
        let nf = self.gb.normal_form_terms(form)?;
        Ok(index.row(nf.iter().map(|(t, c)| (t.clone(), c))))
    }

    /// `h Omega^k(log D)` generators form a free basis of the relations.
    pub fn pd_check(&self) -> Result<bool> {
        Ok(syzygy_module(&self.presentation.relations)?.is_empty())
    }
}

pub fn term_element(t: &Term, rank: usize, _nvars: usize) -> FreeElement {
    FreeElement::basis_multiple(rank, t.comp, Poly::term(t.mono.clone(), crate::poly::rat(1)))
}

/// `i_chi(form)` after checking that `chi` is logarithmic for `h`.
pub fn contract_checked(cx: &FormsComplex, chi: &FreeElement, form: &FreeElement, k: usize) -> Result<FreeElement> {
    if k == 0 {
        return Err(Error::precondition("cannot contract a function"));
    }
    if tangency_witness(cx.h(), chi).is_none() {
        return Err(Error::precondition("vector field is not logarithmic"));
    }
    Ok(contract(chi, form, cx.n(), k))
}

/// Contracting every relation of degree `k` by `chi` lands in the relations of degree `k-1`.
pub fn contraction_preserves_relations(cx: &FormsComplex, chi: &FreeElement, k: usize) -> Result<bool> {
    let lower = cx.module(k - 1)?;
    for r in cx.relations(k)? {
        if !lower.is_zero_class(&contract_checked(cx, chi, &r, k)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether some generator of `h Omega^k(log D)` lies outside `h Omega^k + dh ^ Omega^(k-1)`.
pub fn kahler_strictly_smaller(basis: &LogBasis, k: usize, weights: &[u32]) -> Result<bool> {
    let n = basis.n();
    let nv = basis.h.nvars();
    let sp = FormSpace::new(n, k);
    let lower = FormSpace::new(n, k.saturating_sub(1));
    let mut kahler: Vec<FreeElement> = (0..sp.rank())
        .map(|c| FreeElement::basis_multiple(sp.rank(), c, basis.h.clone()))
        .collect();
    if k > 0 {
        for c in 0..lower.rank() {
            kahler.push(dh_wedge(&basis.h, &lower.unit(lower.subset(c), nv), n, k - 1));
        }
    }
    let order = SliceGrading::new(weights.to_vec()).term_order(&sp)?;
    let sm = Submodule::new(&kahler, sp.rank(), nv, &order)?;
    for g in h_log_forms(basis, k)? {
        if !sm.contains(&g)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The kernel of `Omega^1 -> (O/h)^n`, `omega -> (omega(xi_j))_j`, equals `h Omega^1(log D)`.
pub fn pairing_kernel_matches(basis: &LogBasis) -> Result<bool> {
    let n = basis.n();
    let nv = basis.h.nvars();
    let theta = basis.theta();
    // Column i: images of dx_i, then h e_j.
    let mut cols: Vec<FreeElement> = (0..n).map(|i| FreeElement::new(nv, theta[i].clone())).collect();
    cols.extend((0..n).map(|j| FreeElement::basis_multiple(n, j, basis.h.clone())));
    let kernel: Vec<FreeElement> = syzygy_module(&cols)?
        .into_iter()
        .map(|z| FreeElement::new(nv, z.into_entries()[..n].to_vec()))
        .filter(|z| !z.is_zero())
        .collect();
    let ord = TermOrder::pot(MonomialOrder::degrevlex(nv));
    let a = Submodule::new(&kernel, n, nv, &ord)?;
    let b = Submodule::new(&h_log_forms(basis, 1)?, n, nv, &ord)?;
    a.same_as(&b)
}

/// Per-slice ranks of the de Rham complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SliceReport {
    pub degree: i64,
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    pub cohomology: Vec<i64>,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeRhamReport {
    pub degree_bound: i64,
    pub aux_bound: Option<i64>,
    pub slices: Vec<SliceReport>,
    pub exact: bool,
}

/// Rank of `d` from the degree-`k` slice into `next`, with the slice basis.
fn d_rank(from: &CheckedFormsModule, next: Option<&CheckedFormsModule>, basis: &[Term], n: usize) -> Result<usize> {
    let Some(next) = next else { return Ok(0) };
    let mut index = TermIndex::new();
    let mut ech = Echelon::new();
    for t in basis {
        let e = term_element(t, from.rank(), from.nvars());
        let de = exterior_derivative(&e, n, from.k);
        ech.insert(next.normal_form_row(&de, &mut index)?);
    }
    Ok(ech.rank())
}

fn slice_report(mods: &[CheckedFormsModule], degree: i64, aux_bound: i64, n: usize) -> Result<SliceReport> {
    let bases: Vec<Vec<Term>> = mods
        .iter()
        .map(|m| m.slice_basis(degree, aux_bound))
        .collect::<Result<_>>()?;
    let dims: Vec<usize> = bases.iter().map(|b| b.len()).collect();
    let mut ranks = Vec::with_capacity(mods.len());
    for k in 0..mods.len() {
        ranks.push(d_rank(&mods[k], mods.get(k + 1), &bases[k], n)?);
    }
    let cohomology: Vec<i64> = (0..mods.len())
        .map(|k| dims[k] as i64 - ranks[k] as i64 - if k > 0 { ranks[k - 1] as i64 } else { 0 })
        .collect();
    let exact = cohomology
        .iter()
        .enumerate()
        .all(|(k, &c)| c == if degree == 0 && k == 0 { 1 } else { 0 });
    Ok(SliceReport {
        degree,
        dims,
        ranks,
        cohomology,
        exact,
    })
}

/// Exactness of `0 -> C -> Omega^0 -> ... -> Omega^n -> 0` slice by slice up to
/// `degree_bound`; `aux_bound` truncates slices when some weights vanish.
pub fn de_rham_check(cx: &FormsComplex, degree_bound: i64, aux_bound: i64) -> Result<DeRhamReport> {
    let mods = cx.modules()?;
    let mut slices = Vec::new();
    for degree in 0..=degree_bound {
        slices.push(slice_report(&mods, degree, aux_bound, cx.n())?);
    }
    let exact = slices.iter().all(|s| s.exact);
    Ok(DeRhamReport {
        degree_bound,
        aux_bound: cx.slices.aux.as_ref().map(|_| aux_bound),
        slices,
        exact,
    })
}

/// `dim Omega^(n-1) / d Omega^(n-2)` summed over slices, next to `dim Omega^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeRhamMilnor {
    pub value: u64,
    pub top_dimension: u64,
    pub per_degree: Vec<(i64, u64)>,
}

pub fn mu_e_derham(cx: &FormsComplex, window: i64) -> Result<DeRhamMilnor> {
    if !cx.slices.is_positive() {
        return Err(Error::precondition("singular Milnor number needs positive weights"));
    }
    let n = cx.n();
    if n < 1 {
        return Err(Error::precondition("empty ambient space"));
    }
    let top = cx.module(n)?;
    let Dimension::Finite(top_dim) = top.dimension() else {
        return Err(Error::precondition("top checked forms are not finite dimensional"));
    };
    let g = cx.slices.forms_grading(&top.space);
    let top_degree = if top_dim == 0 {
        0
    } else {
        let leads = top.gb.leading_terms();
        let mut d = 0;
        let mut seen = 0u64;
        while seen < top_dim {
            seen += standard_terms_in_degree(&leads, &g, d, None)?.len() as u64;
            d += 1;
        }
        d - 1
    };
    let p = n - 1;
    let below = if p > 0 { Some(cx.module(p - 1)?) } else { None };
    let mid = cx.module(p)?;
    let mut value = 0u64;
    let mut per_degree = Vec::new();
    let last = top_degree + window;
    for degree in 0..=last {
        let b = mid.slice_basis(degree, 0)?.len();
        let r = match &below {
            Some(m) => d_rank(m, Some(&mid), &m.slice_basis(degree, 0)?, n)?,
            None => 0,
        };
        let c = (b - r) as u64;
        if degree > top_degree && c != 0 {
            return Err(Error::NonStabilization(format!(
                "cokernel of d still nonzero in degree {} past the top degree {}",
                degree, top_degree
            )));
        }
        if c != 0 {
            per_degree.push((degree, c));
        }
        value += c;
    }
    Ok(DeRhamMilnor {
        value,
        top_dimension: top_dim,
        per_degree,
    })
}

/// `(T : m)` for a submodule `T` of `O^rank`.
fn colon_maximal(gens: &[FreeElement], rank: usize, nvars: usize) -> Result<Vec<FreeElement>> {
    let mono = MonomialOrder::degrevlex(nvars);
    let mut acc: Option<Vec<FreeElement>> = None;
    for i in 0..nvars {
        let c = colon(gens, &Poly::var(nvars, i), rank, nvars, &mono)?;
        acc = Some(match acc {
            None => c,
            Some(a) => intersect(&a, &c, rank, nvars, &mono)?,
        });
    }
    Ok(acc.unwrap_or_default())
}

/// Dimension of the submodule of `m` killed by a power of the maximal ideal.
pub fn torsion_length(m: &CheckedFormsModule, max_steps: usize) -> Result<u64> {
    let rank = m.rank();
    let nv = m.nvars();
    let order = m.gb.order().clone();
    let mut current = m.gb.clone();
    for _ in 0..max_steps {
        let next_gens = colon_maximal(&current.basis(), rank, nv)?;
        let next = Submodule::new(&next_gens, rank, nv, &order)?;
        if current.contains_all(&next.basis())? {
            return match count_difference(&m.gb.leading_terms(), &current.leading_terms(), rank, nv) {
                Dimension::Finite(d) => Ok(d),
                Dimension::Infinite => Err(Error::precondition("torsion is not supported at the origin alone")),
            };
        }
        current = next;
    }
    Err(Error::NonStabilization(format!(
        "saturation did not stabilize within {} steps",
        max_steps
    )))
}

/// Whether `form` is killed by every variable in the quotient.
pub fn is_socle_class(m: &CheckedFormsModule, form: &FreeElement) -> Result<bool> {
    let nv = m.nvars();
    for i in 0..nv {
        if !m.is_zero_class(&form.mul_poly(&Poly::var(nv, i)))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `i_chi(dx_1 ^ ... ^ dx_n)` as an `(n-1)`-form.
pub fn contracted_volume(chi: &FreeElement, n: usize) -> FreeElement {
    let sp = FormSpace::new(n, n);
    let vol = sp.unit(sp.subset(0), chi.nvars());
    contract(chi, &vol, n, n)
}

/// Index set of component `c` of degree-`k` forms on `n` variables.
pub fn component_indices(n: usize, k: usize, c: usize) -> Vec<usize> {
    mask_indices(FormSpace::new(n, k).subset(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logarithmic::{euler_field, is_free, Divisor, FreenessVerdict};

    fn free_basis(names: &[&str], h: &str, w: Option<Vec<u32>>) -> LogBasis {
        let d = Divisor::parse(names, h, w).unwrap();
        match is_free(&d).unwrap() {
            FreenessVerdict::Free(b) => b,
            v => panic!("{:?}", v),
        }
    }

    fn nc(n: usize) -> LogBasis {
        let names: Vec<String> = (1..=n).map(|i| format!("z{}", i)).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let h = names.join("*");
        free_basis(&refs, &h, Some(vec![1; n]))
    }

    fn four_planes() -> FormsComplex {
        let p = |s: &str| crate::parse::parse_poly(s, &["x1".into(), "x2".into(), "x3".into()]).unwrap();
        let map = vec![p("x1"), p("x2"), p("x3"), p("x1+x2+x3")];
        FormsComplex::almost_free(nc(4), map, 3, SliceGrading::new(vec![1, 1, 1])).unwrap()
    }

    #[test]
    fn extreme_degrees_of_free_complex() {
        let cx = FormsComplex::free(nc(3), SliceGrading::new(vec![1, 1, 1])).unwrap();
        assert_eq!(cx.module(3).unwrap().dimension(), Dimension::Finite(0));
        let m0 = cx.module(0).unwrap();
        assert!(m0.is_zero_class(&FreeElement::new(3, vec![cx.h().clone()])).unwrap());
        assert_eq!(m0.dimension(), Dimension::Infinite);
    }

    #[test]
    fn smooth_divisor_one_forms() {
        let b = free_basis(&["x", "y", "z"], "x", Some(vec![1, 1, 1]));
        let cx = FormsComplex::free(b, SliceGrading::new(vec![1, 1, 1])).unwrap();
        let m1 = cx.module(1).unwrap();
        // Free over O/(x) on dy, dz: the degree-d slice has dimension 2d.
        let t = m1.graded_table(1, 4, 1).unwrap();
        assert_eq!(t.dims.values().copied().collect::<Vec<_>>(), vec![2, 4, 6, 8]);
        assert!(m1.pd_check().unwrap());
        assert_eq!(torsion_length(&m1, 10).unwrap(), 0);
    }

    #[test]
    fn normal_crossing_complex_is_exact() {
        let cx = FormsComplex::free(nc(2), SliceGrading::new(vec![1, 1])).unwrap();
        let r = de_rham_check(&cx, 6, 0).unwrap();
        assert!(r.exact, "{:?}", r);
    }

    #[test]
    fn four_planes_torsion_and_milnor() {
        let cx = four_planes();
        let m2 = cx.module(2).unwrap();
        assert_eq!(torsion_length(&m2, 10).unwrap(), 1);
        let chi = euler_field(&[1, 1, 1]).unwrap();
        let t = contracted_volume(&chi, 3);
        assert!(!m2.is_zero_class(&t).unwrap());
        assert!(is_socle_class(&m2, &t).unwrap());
        let mu = mu_e_derham(&cx, 2).unwrap();
        assert_eq!(mu.value, 1);
        assert_eq!(mu.top_dimension, 1);
        assert!(contraction_preserves_relations(&cx, &chi, 2).unwrap());
    }

    #[test]
    fn pairing_and_kahler() {
        let b = nc(3);
        assert!(pairing_kernel_matches(&b).unwrap());
        for k in 1..=3 {
            assert!(kahler_strictly_smaller(&b, k, &[1, 1, 1]).unwrap());
        }
        let smooth = free_basis(&["x", "y"], "x", Some(vec![1, 1]));
        assert!(!kahler_strictly_smaller(&smooth, 1, &[1, 1]).unwrap());
    }

    #[test]
    fn calderon_complex_is_exact() {
        let b = free_basis(&["x", "y", "l"], "x*y*(x-y)*(x+l*y)", None);
        let cx = FormsComplex::free(b, SliceGrading::new(vec![1, 1, 0])).unwrap();
        let r = de_rham_check(&cx, 8, 3).unwrap();
        assert!(r.exact);
        assert_eq!(r.aux_bound, Some(3));
        assert!(r.slices[4].dims.iter().sum::<usize>() > 0);
    }
}
