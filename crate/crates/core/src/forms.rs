//! Polynomial differential forms: `k`-forms on `n` variables are elements of a
//! free module of rank `C(n,k)` on the basis `dx_I`, with `I` in lexicographic order.

use std::collections::HashMap;

use crate::linalg::{combinations, det};
use crate::module::{FreeElement, Grading};
use crate::poly::Poly;

/// Index bookkeeping for `k`-forms in `n` variables.
#[derive(Clone, Debug)]
pub struct FormSpace {
    n: usize,
    k: usize,
    subsets: Vec<u32>,
    index: HashMap<u32, usize>,
}

fn mask_of(idx: &[usize]) -> u32 {
    idx.iter().fold(0u32, |m, &i| m | (1 << i))
}

pub fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

impl FormSpace {
    pub fn new(n: usize, k: usize) -> Self {
        assert!(n < 32 && k <= n);
        let subsets: Vec<u32> = combinations(n, k).iter().map(|c| mask_of(c)).collect();
        let index = subsets.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        FormSpace { n, k, subsets, index }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rank(&self) -> usize {
        self.subsets.len()
    }

    pub fn subset(&self, i: usize) -> u32 {
        self.subsets[i]
    }

    pub fn index_of(&self, mask: u32) -> usize {
        self.index[&mask]
    }

    /// `deg dx_I = sum of the weights in I`.
    pub fn grading(&self, weights: &[u32]) -> Grading {
        let shifts = self
            .subsets
            .iter()
            .map(|&m| mask_indices(m).iter().map(|&i| weights[i] as i64).sum())
            .collect();
        Grading::new(weights.to_vec(), shifts)
    }

    pub fn unit(&self, mask: u32, nvars: usize) -> FreeElement {
        FreeElement::unit(self.rank(), nvars, self.index_of(mask))
    }

    pub fn label(&self, i: usize, names: &[String]) -> String {
        let idx = mask_indices(self.subsets[i]);
        if idx.is_empty() {
            "1".into()
        } else {
            idx.iter()
                .map(|&j| format!("d{}", names[j]))
                .collect::<Vec<_>>()
                .join("^")
        }
    }
}

/// Sign and index set of `dx_i ^ dx_I`, or `None` when `i` is in `I`.
pub fn wedge_dx(i: usize, mask: u32) -> Option<(bool, u32)> {
    if mask & (1 << i) != 0 {
        return None;
    }
    let below = (mask & ((1u32 << i) - 1)).count_ones();
    Some((below % 2 == 1, mask | (1 << i)))
}

/// Sign and index set of `dx_I ^ dx_J`, or `None` when they overlap.
pub fn wedge_masks(a: u32, b: u32) -> Option<(bool, u32)> {
    if a & b != 0 {
        return None;
    }
    let mut inv = 0u32;
    for j in mask_indices(b) {
        inv += (a >> (j + 1)).count_ones();
    }
    Some((inv % 2 == 1, a | b))
}

fn signed(p: Poly, neg: bool) -> Poly {
    if neg {
        -&p
    } else {
        p
    }
}

/// Exterior derivative of a `k`-form in `n` variables.
pub fn exterior_derivative(form: &FreeElement, n: usize, k: usize) -> FreeElement {
    let src = FormSpace::new(n, k);
    let dst = FormSpace::new(n, k + 1);
    let nv = form.nvars();
    let mut out = vec![Poly::zero(nv); dst.rank()];
    for (ci, f) in form.entries().iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        let mask = src.subset(ci);
        for i in 0..n {
            if let Some((neg, m2)) = wedge_dx(i, mask) {
                let df = f.derivative(i);
                if !df.is_zero() {
                    let j = dst.index_of(m2);
                    out[j] = &out[j] + &signed(df, neg);
                }
            }
        }
    }
    FreeElement::new(nv, out)
}

/// Wedge product of a `ka`-form and a `kb`-form.
pub fn wedge(a: &FreeElement, ka: usize, b: &FreeElement, kb: usize, n: usize) -> FreeElement {
    let sa = FormSpace::new(n, ka);
    let sb = FormSpace::new(n, kb);
    let dst = FormSpace::new(n, ka + kb);
    let nv = a.nvars();
    let mut out = vec![Poly::zero(nv); dst.rank()];
    for (i, f) in a.entries().iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        for (j, g) in b.entries().iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            if let Some((neg, m)) = wedge_masks(sa.subset(i), sb.subset(j)) {
                let t = dst.index_of(m);
                out[t] = &out[t] + &signed(f * g, neg);
            }
        }
    }
    FreeElement::new(nv, out)
}

/// `dh ^ form`.
pub fn dh_wedge(h: &Poly, form: &FreeElement, n: usize, k: usize) -> FreeElement {
    let dh = FreeElement::new(h.nvars(), h.gradient()[..n].to_vec());
    wedge(&dh, 1, form, k, n)
}

/// Contraction `i_field(form)` of a `k`-form, `k >= 1`.
pub fn contract(field: &FreeElement, form: &FreeElement, n: usize, k: usize) -> FreeElement {
    assert!(k >= 1);
    let src = FormSpace::new(n, k);
    let dst = FormSpace::new(n, k - 1);
    let nv = form.nvars();
    let mut out = vec![Poly::zero(nv); dst.rank()];
    for (ci, f) in form.entries().iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        let idx = mask_indices(src.subset(ci));
        for (pos, &i) in idx.iter().enumerate() {
            let xi = field.entry(i);
            if xi.is_zero() {
                continue;
            }
            let m2 = src.subset(ci) & !(1 << i);
            let t = dst.index_of(m2);
            out[t] = &out[t] + &signed(xi * f, pos % 2 == 1);
        }
    }
    FreeElement::new(nv, out)
}

/// Value of a `k`-form on `k` vector fields: `sum_J a_J det(fields[J rows])`.
pub fn evaluate(form: &FreeElement, fields: &[FreeElement], n: usize) -> Poly {
    let k = fields.len();
    let sp = FormSpace::new(n, k);
    let nv = form.nvars();
    let mut acc = Poly::zero(nv);
    for (ci, a) in form.entries().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let rows = mask_indices(sp.subset(ci));
        let m: Vec<Vec<Poly>> = rows
            .iter()
            .map(|&r| fields.iter().map(|f| f.entry(r).clone()).collect())
            .collect();
        acc = &acc + &(a * &det(&m, nv));
    }
    acc
}

/// Pullback of a `k`-form on the target (coordinates `z`) along `z = map(x)`.
pub fn pullback(form: &FreeElement, k: usize, map: &[Poly], n: usize) -> FreeElement {
    let m = map.len();
    let src = FormSpace::new(m, k);
    let dst = FormSpace::new(n, k);
    let nv = map.first().map(|p| p.nvars()).unwrap_or(n);
    let jac: Vec<Vec<Poly>> = map.iter().map(|c| (0..n).map(|j| c.derivative(j)).collect()).collect();
    let mut out = vec![Poly::zero(nv); dst.rank()];
    for (ci, f) in form.entries().iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        let fc = f.compose(map);
        if fc.is_zero() {
            continue;
        }
        let rows = mask_indices(src.subset(ci));
        for cj in 0..dst.rank() {
            let cols = mask_indices(dst.subset(cj));
            let sub: Vec<Vec<Poly>> = rows
                .iter()
                .map(|&r| cols.iter().map(|&c| jac[r][c].clone()).collect())
                .collect();
            let dt = det(&sub, nv);
            if !dt.is_zero() {
                out[cj] = &out[cj] + &(&fc * &dt);
            }
        }
    }
    FreeElement::new(nv, out)
}

/// `f dx_1 ^ ... ^ dx_n`; the top degree has a single basis element.
pub fn top_form(f: Poly) -> FreeElement {
    FreeElement::new(f.nvars(), vec![f])
}
