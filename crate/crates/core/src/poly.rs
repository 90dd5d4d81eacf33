//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Exponent vector, one entry per ambient variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub(crate) Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(e: Vec<u32>) -> Self {
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn weighted_degree(&self, weights: &[u32]) -> i64 {
        self.0.iter().zip(weights).map(|(&e, &w)| e as i64 * w as i64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self / other`, when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        Some(Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Index of the variable when the monomial is a pure power `x_i^a`, a > 0.
    pub fn pure_power(&self) -> Option<(usize, u32)> {
        let mut found = None;
        for (i, &e) in self.0.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some((i, e));
            }
        }
        found
    }

    pub fn format(&self, names: &[String]) -> String {
        let mut parts = Vec::new();
        for (i, &e) in self.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(names[i].clone()),
                _ => parts.push(format!("{}^{}", names[i], e)),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

/// Polynomial in a fixed number of variables; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, rat(c))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::term(Monomial::var(nvars, i), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(m.nvars());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(nvars: usize, it: I) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in it {
            debug_assert_eq!(m.nvars(), nvars);
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// The constant value, if the polynomial is constant (zero included).
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_constant() {
            Some(self.coefficient(&Monomial::one(self.nvars)))
        } else {
            None
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn weighted_degree(&self, weights: &[u32]) -> Option<i64> {
        self.terms.keys().map(|m| m.weighted_degree(weights)).max()
    }

    /// Weighted degree shared by every term, if the polynomial is nonzero and homogeneous.
    pub fn homogeneous_degree(&self, weights: &[u32]) -> Option<i64> {
        let mut it = self.terms.keys().map(|m| m.weighted_degree(weights));
        let first = it.next()?;
        if it.all(|d| d == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn is_homogeneous(&self, weights: &[u32]) -> bool {
        self.is_zero() || self.homogeneous_degree(weights).is_some()
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            out.add_term(m2, c * rat(e as i64));
        }
        out
    }

    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.nvars).map(|i| self.derivative(i)).collect()
    }

    /// Substitutes `images[i]` for variable `i`; all images share one variable count.
    pub fn compose(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars, "compose: image count mismatch");
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(p.nvars), p.clone()]).collect();
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
            }
            out = &out + &t;
        }
        out
    }

    /// Sets the listed variables to zero.
    pub fn set_zero(&self, vars: &[usize]) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| vars.iter().all(|&v| m.0[v] == 0))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Re-embeds into `nvars` variables, sending old variable `i` to `map[i]`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Poly {
        let mut out = Poly::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0; nvars];
            for (i, &x) in m.0.iter().enumerate() {
                e[map[i]] += x;
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Drops trailing variables, which must not occur.
    pub fn truncate_vars(&self, nvars: usize) -> Option<Poly> {
        let mut out = Poly::zero(nvars);
        for (m, c) in &self.terms {
            if m.0[nvars..].iter().any(|&e| e > 0) {
                return None;
            }
            out.terms.insert(Monomial(m.0[..nvars].to_vec()), c.clone());
        }
        Some(out)
    }

    /// Largest term in pure lexicographic order.
    fn lex_leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.lex_leading()?;
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((m, c)) = rem.lex_leading() {
            let q = m.div(dm)?;
            let qc = c / dc;
            let step = d.mul_monomial(&q).scale(&qc);
            quot.add_term(q, qc);
            rem = &rem - &step;
        }
        Some(quot)
    }

    pub fn format(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut keys: Vec<&Monomial> = self.terms.keys().collect();
        keys.sort_by(|a, b| b.degree().cmp(&a.degree()).then_with(|| b.cmp(a)));
        let mut out = String::new();
        for (idx, m) in keys.into_iter().enumerate() {
            let c = &self.terms[m];
            let neg = c.is_negative();
            let a = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                let _ = write!(out, "{}", a);
            } else if a.is_one() {
                out.push_str(&m.format(names));
            } else {
                let _ = write!(out, "{}*{}", a, m.format(names));
            }
        }
        out
    }
}

pub fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{}", i + 1)).collect()
}

impl std::fmt::Display for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.format(&default_names(self.nvars)))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (mut big, small) = if self.terms.len() >= rhs.terms.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(3, i)
    }

    #[test]
    fn arithmetic_is_exact() {
        let p = &(&x(0) + &x(1)) * &(&x(0) - &x(1));
        let q = &(&x(0) * &x(0)) - &(&x(1) * &x(1));
        assert_eq!(p, q);
        let half = Poly::constant(3, rat_frac(1, 2));
        let r = &(&half * &Poly::from_int(3, 2)) - &Poly::one(3);
        assert!(r.is_zero());
    }

    #[test]
    fn exact_division() {
        let a = &(&x(0) + &x(2)) * &(&x(1) - &Poly::one(3));
        let b = &x(0) + &x(2);
        assert_eq!(a.div_exact(&b).unwrap(), &x(1) - &Poly::one(3));
        assert!(a.div_exact(&x(0)).is_none());
    }

    #[test]
    fn derivative_and_compose() {
        let f = &(&x(0) * &x(0)) * &x(1);
        assert_eq!(f.derivative(0), &Poly::from_int(3, 2) * &(&x(0) * &x(1)));
        let g = f.compose(&[x(1), x(2), x(0)]);
        assert_eq!(g, &(&x(1) * &x(1)) * &x(2));
    }

    #[test]
    fn formatting() {
        let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let f = &(&(&x(0) * &x(0)) - &Poly::constant(3, rat_frac(1, 2))) + &x(1).scale(&rat(-3));
        assert_eq!(f.format(&names), "x^2 - 3*y - 1/2");
    }
}
