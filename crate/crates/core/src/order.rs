//! Monomial orders and position-over-term module orders.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::module::Grading;
use crate::poly::Monomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    /// Weighted degree, ties broken reverse-lexicographically.
    WDegRevLex,
    /// Pure lexicographic, first variable largest.
    Lex,
}

impl OrderKind {
    pub fn name(self) -> &'static str {
        match self {
            OrderKind::WDegRevLex => "wdegrevlex",
            OrderKind::Lex => "lex",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "wdegrevlex" | "degrevlex" => Some(OrderKind::WDegRevLex),
            "lex" => Some(OrderKind::Lex),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialOrder {
    kind: OrderKind,
    weights: Vec<u32>,
}

impl MonomialOrder {
    pub fn degrevlex(nvars: usize) -> Self {
        MonomialOrder {
            kind: OrderKind::WDegRevLex,
            weights: vec![1; nvars],
        }
    }

    pub fn wdegrevlex(weights: Vec<u32>) -> Result<Self> {
        if weights.contains(&0) {
            return Err(Error::precondition("monomial order weights must be positive"));
        }
        Ok(MonomialOrder {
            kind: OrderKind::WDegRevLex,
            weights,
        })
    }

    pub fn lex(nvars: usize) -> Self {
        MonomialOrder {
            kind: OrderKind::Lex,
            weights: vec![1; nvars],
        }
    }

    pub fn new(kind: OrderKind, weights: Vec<u32>) -> Result<Self> {
        match kind {
            OrderKind::WDegRevLex => Self::wdegrevlex(weights),
            OrderKind::Lex => Ok(Self::lex(weights.len())),
        }
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn nvars(&self) -> usize {
        self.weights.len()
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        let (ea, eb) = (a.exponents(), b.exponents());
        match self.kind {
            OrderKind::Lex => ea.cmp(eb),
            OrderKind::WDegRevLex => {
                let da = a.weighted_degree(&self.weights);
                let db = b.weighted_degree(&self.weights);
                da.cmp(&db).then_with(|| {
                    for i in (0..ea.len()).rev() {
                        if ea[i] != eb[i] {
                            return eb[i].cmp(&ea[i]);
                        }
                    }
                    Ordering::Equal
                })
            }
        }
    }
}

/// A basis element `mono * e_comp` of a free module.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub comp: usize,
    pub mono: Monomial,
}

impl Term {
    pub fn new(comp: usize, mono: Monomial) -> Self {
        Term { comp, mono }
    }

    pub fn divides(&self, other: &Term) -> bool {
        self.comp == other.comp && self.mono.divides(&other.mono)
    }
}

/// Module order: an optional grading compared first, then position over term
/// (lower component index is larger), then the monomial order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermOrder {
    pub mono: MonomialOrder,
    pub prefix: Option<Grading>,
}

impl TermOrder {
    pub fn pot(mono: MonomialOrder) -> Self {
        TermOrder { mono, prefix: None }
    }

    /// Degree-first order; `prefix` must have non-negative weights.
    pub fn graded(mono: MonomialOrder, prefix: Grading) -> Self {
        TermOrder {
            mono,
            prefix: Some(prefix),
        }
    }

    pub fn nvars(&self) -> usize {
        self.mono.nvars()
    }

    pub fn cmp(&self, a: &Term, b: &Term) -> Ordering {
        if let Some(g) = &self.prefix {
            let c = g.term_degree(a).cmp(&g.term_degree(b));
            if c != Ordering::Equal {
                return c;
            }
        }
        b.comp.cmp(&a.comp).then_with(|| self.mono.cmp(&a.mono, &b.mono))
    }
}
