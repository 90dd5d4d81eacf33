//! Elements of free modules, gradings and finite presentations.

use std::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::order::Term;
use crate::poly::{Monomial, Poly, Rational};

/// Vector of polynomials in a free module of fixed rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeElement {
    nvars: usize,
    entries: Vec<Poly>,
}

impl FreeElement {
    pub fn new(nvars: usize, entries: Vec<Poly>) -> Self {
        debug_assert!(entries.iter().all(|p| p.nvars() == nvars));
        FreeElement { nvars, entries }
    }

    pub fn from_polys(entries: Vec<Poly>) -> Self {
        let nvars = entries.first().map(|p| p.nvars()).expect("nonempty entries");
        Self::new(nvars, entries)
    }

    pub fn zero(rank: usize, nvars: usize) -> Self {
        FreeElement {
            nvars,
            entries: vec![Poly::zero(nvars); rank],
        }
    }

    pub fn unit(rank: usize, nvars: usize, i: usize) -> Self {
        let mut e = Self::zero(rank, nvars);
        e.entries[i] = Poly::one(nvars);
        e
    }

    /// `p * e_i`.
    pub fn basis_multiple(rank: usize, i: usize, p: Poly) -> Self {
        let mut e = Self::zero(rank, p.nvars());
        e.entries[i] = p;
        e
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &Poly {
        &self.entries[i]
    }

    pub fn into_entries(self) -> Vec<Poly> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        FreeElement::new(self.nvars, self.entries.iter().map(|p| p.scale(c)).collect())
    }

    pub fn mul_poly(&self, f: &Poly) -> Self {
        FreeElement::new(self.nvars, self.entries.iter().map(|p| p * f).collect())
    }

    pub fn terms(&self) -> impl Iterator<Item = (Term, &Rational)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .flat_map(|(c, p)| p.terms().map(move |(m, v)| (Term::new(c, m.clone()), v)))
    }

    /// Degree shared by every term under `g`, if homogeneous and nonzero.
    pub fn homogeneous_degree(&self, g: &Grading) -> Option<i64> {
        let mut it = self.terms().map(|(t, _)| g.term_degree(&t));
        let first = it.next()?;
        if it.all(|d| d == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn is_homogeneous(&self, g: &Grading) -> bool {
        self.is_zero() || self.homogeneous_degree(g).is_some()
    }

    /// Applies `f` to every entry.
    pub fn map(&self, nvars: usize, f: impl Fn(&Poly) -> Poly) -> Self {
        FreeElement::new(nvars, self.entries.iter().map(f).collect())
    }

    pub fn format(&self, names: &[String]) -> Vec<String> {
        self.entries.iter().map(|p| p.format(names)).collect()
    }
}

impl Add for &FreeElement {
    type Output = FreeElement;
    fn add(self, rhs: &FreeElement) -> FreeElement {
        assert_eq!(self.rank(), rhs.rank());
        FreeElement::new(
            self.nvars,
            self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        )
    }
}

impl Sub for &FreeElement {
    type Output = FreeElement;
    fn sub(self, rhs: &FreeElement) -> FreeElement {
        assert_eq!(self.rank(), rhs.rank());
        FreeElement::new(
            self.nvars,
            self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        )
    }
}

/// Integer grading: weight per variable plus a shift per free generator.
///
/// Weights may be zero here; positivity is demanded only where a finite
/// count per degree is needed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grading {
    pub weights: Vec<u32>,
    pub shifts: Vec<i64>,
}

impl Grading {
    pub fn new(weights: Vec<u32>, shifts: Vec<i64>) -> Self {
        Grading { weights, shifts }
    }

    pub fn unshifted(weights: Vec<u32>, rank: usize) -> Self {
        Grading {
            weights,
            shifts: vec![0; rank],
        }
    }

    pub fn rank(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_positive(&self) -> bool {
        self.weights.iter().all(|&w| w > 0)
    }

    pub fn mono_degree(&self, m: &Monomial) -> i64 {
        m.weighted_degree(&self.weights)
    }

    pub fn term_degree(&self, t: &Term) -> i64 {
        self.mono_degree(&t.mono) + self.shifts[t.comp]
    }
}

/// Cokernel of a map into a free module: `O^rank / <relations>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulePresentation {
    pub rank: usize,
    pub nvars: usize,
    pub relations: Vec<FreeElement>,
    pub grading: Option<Grading>,
}

impl ModulePresentation {
    pub fn new(rank: usize, nvars: usize, relations: Vec<FreeElement>, grading: Option<Grading>) -> Result<Self> {
        for r in &relations {
            if r.rank() != rank || r.nvars() != nvars {
                return Err(Error::precondition(format!(
                    "relation of rank {} in a presentation of rank {}",
                    r.rank(),
                    rank
                )));
            }
        }
        if let Some(g) = &grading {
            if g.rank() != rank || g.weights.len() != nvars {
                return Err(Error::precondition("grading does not match the presentation"));
            }
            if let Some(pos) = relations.iter().position(|r| !r.is_homogeneous(g)) {
                return Err(Error::precondition(format!("relation {} is not homogeneous", pos)));
            }
        }
        let relations = relations.into_iter().filter(|r| !r.is_zero()).collect();
        Ok(ModulePresentation {
            rank,
            nvars,
            relations,
            grading,
        })
    }

    /// Same module with additional relations; homogeneity is re-checked.
    pub fn with_relations(&self, extra: Vec<FreeElement>) -> Result<Self> {
        let mut rels = self.relations.clone();
        rels.extend(extra);
        Self::new(self.rank, self.nvars, rels, self.grading.clone())
    }
}
