//! Exact linear algebra: sparse row echelon over Q and polynomial determinants.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::order::Term;
use crate::poly::{Poly, Rational};

/// Incrementally built row echelon form over the rationals.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: BTreeMap<usize, Vec<(usize, Rational)>>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` against the stored pivots.
    pub fn reduce(&self, row: impl IntoIterator<Item = (usize, Rational)>) -> BTreeMap<usize, Rational> {
        let mut r: BTreeMap<usize, Rational> = BTreeMap::new();
        for (c, v) in row {
            if !v.is_zero() {
                let e = r.entry(c).or_insert_with(Rational::zero);
                *e += v;
                if e.is_zero() {
                    r.remove(&c);
                }
            }
        }
        let mut cursor = 0usize;
        loop {
            let next = r
                .range(cursor..)
                .find(|(c, _)| self.pivots.contains_key(c))
                .map(|(c, v)| (*c, v.clone()));
            let Some((c, f)) = next else { break };
            for (cc, v) in &self.pivots[&c] {
                let e = r.entry(*cc).or_insert_with(Rational::zero);
                *e -= &f * v;
                if e.is_zero() {
                    r.remove(cc);
                }
            }
            cursor = c + 1;
        }
        r
    }

    /// Adds a row; returns whether it was independent of the previous rows.
    pub fn insert(&mut self, row: impl IntoIterator<Item = (usize, Rational)>) -> bool {
        let r = self.reduce(row);
        let Some((&c, lead)) = r.iter().next() else {
            return false;
        };
        let inv = Rational::one() / lead;
        let normalized = r.iter().map(|(k, v)| (*k, v * &inv)).collect();
        self.pivots.insert(c, normalized);
        true
    }
}

/// Rank of a list of sparse rows.
pub fn rank_of<I, R>(rows: I) -> usize
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = (usize, Rational)>,
{
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Assigns column numbers to module terms on first sight.
#[derive(Clone, Debug, Default)]
pub struct TermIndex {
    map: HashMap<Term, usize>,
}

impl TermIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn index(&mut self, t: &Term) -> usize {
        let n = self.map.len();
        *self.map.entry(t.clone()).or_insert(n)
    }

    pub fn get(&self, t: &Term) -> Option<usize> {
        self.map.get(t).copied()
    }

    pub fn row<'a>(&mut self, terms: impl IntoIterator<Item = (Term, &'a Rational)>) -> Vec<(usize, Rational)> {
        terms.into_iter().map(|(t, c)| (self.index(&t), c.clone())).collect()
    }
}

/// Determinant of a square polynomial matrix, by expansion over column subsets.
pub fn det(m: &[Vec<Poly>], nvars: usize) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one(nvars);
    }
    assert!(n <= 20, "determinant size");
    let mut dp: HashMap<u32, Poly> = HashMap::new();
    dp.insert(0, Poly::one(nvars));
    for row in m.iter() {
        let mut next: HashMap<u32, Poly> = HashMap::new();
        for (mask, acc) in &dp {
            for (c, entry) in row.iter().enumerate() {
                if mask & (1 << c) != 0 || entry.is_zero() {
                    continue;
                }
                let inversions = (mask >> (c + 1)).count_ones();
                let mut t = acc * entry;
                if inversions % 2 == 1 {
                    t = -&t;
                }
                let slot = next.entry(mask | (1 << c)).or_insert_with(|| Poly::zero(nvars));
                *slot = &*slot + &t;
            }
        }
        next.retain(|_, v| !v.is_zero());
        dp = next;
    }
    dp.remove(&((1u32 << n) - 1)).unwrap_or_else(|| Poly::zero(nvars))
}

/// Minor on the given rows and columns.
pub fn minor(m: &[Vec<Poly>], rows: &[usize], cols: &[usize], nvars: usize) -> Poly {
    let sub: Vec<Vec<Poly>> = rows
        .iter()
        .map(|&r| cols.iter().map(|&c| m[r][c].clone()).collect())
        .collect();
    det(&sub, nvars)
}

/// Basis of the right null space of a dense rational matrix.
pub fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..ncols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (i, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -m[i][f].clone();
            }
            v
        })
        .collect()
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn echelon_rank() {
        let rows = vec![
            vec![(0, rat(1)), (1, rat(2))],
            vec![(0, rat(2)), (1, rat(4))],
            vec![(1, rat(1)), (2, rat(1))],
        ];
        assert_eq!(rank_of(rows), 2);
        let mut e = Echelon::new();
        assert!(e.insert(vec![(3, rat(5))]));
        assert!(!e.insert(vec![(3, rat(-1))]));
        assert!(e.reduce(vec![(3, rat(7))]).is_empty());
    }

    #[test]
    fn determinants() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let m = vec![vec![x.clone(), y.clone()], vec![y.clone(), x.clone()]];
        assert_eq!(det(&m, 2), &(&x * &x) - &(&y * &y));
        let i3: Vec<Vec<Poly>> = (0..3)
            .map(|r| {
                (0..3)
                    .map(|c| Poly::from_int(2, (r == c) as i64 * (r as i64 + 1)))
                    .collect()
            })
            .collect();
        assert_eq!(det(&i3, 2), Poly::from_int(2, 6));
        let perm = vec![
            vec![Poly::zero(2), Poly::one(2), Poly::zero(2)],
            vec![Poly::one(2), Poly::zero(2), Poly::zero(2)],
            vec![Poly::zero(2), Poly::zero(2), Poly::one(2)],
        ];
        assert_eq!(det(&perm, 2), Poly::from_int(2, -1));
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        let ns = nullspace(&[vec![rat(1), rat(1), rat(0)]], 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!((&v[0] + &v[1]).is_zero());
        }
    }
}
