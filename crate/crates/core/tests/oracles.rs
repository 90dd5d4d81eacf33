//! Computed invariants against independent closed-form or dense oracles.

use num_traits::{One, Zero};

use freediv::checked::mu_e_derham;
use freediv::deformation::{ae_codim_direct, mu_e_alternating, mu_e_good_equation, DeformationSetup, InducingMap};
use freediv::logarithmic::Divisor;
use freediv::parse::parse_poly;
use freediv::{Monomial, Poly, Rational};

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Generic linear forms in `n` variables: the coordinates, then forms whose
/// coefficients are powers of distinct integers (a Vandermonde pattern, so any
/// `n` of them are independent). The last form is shifted by `-s`.
fn generic_arrangement(n: usize, m: usize) -> DeformationSetup {
    let xs: Vec<String> = (1..=n).map(|i| format!("x{}", i)).collect();
    let mut src = xs.clone();
    src.push("s".into());
    let mut comps: Vec<String> = xs.clone();
    for j in 0..m - n {
        let base = j as i64 + 1;
        let terms: Vec<String> = xs
            .iter()
            .enumerate()
            .map(|(i, x)| format!("{}*{}", base.pow(i as u32), x))
            .collect();
        comps.push(terms.join("+"));
    }
    let last = comps.last_mut().unwrap();
    *last = format!("{}-s", last);
    let zs: Vec<String> = (1..=m).map(|i| format!("z{}", i)).collect();
    let zrefs: Vec<&str> = zs.iter().map(|s| s.as_str()).collect();
    let e = Divisor::parse(&zrefs, &zs.join("*"), Some(vec![1; m])).unwrap();
    let polys = comps.iter().map(|c| parse_poly(c, &src).unwrap()).collect();
    let map = InducingMap::new(src, zs, polys).unwrap();
    DeformationSetup::new(e, map, n, 1, 0, Some(vec![1; n + 1])).unwrap()
}

#[test]
fn arrangement_milnor_numbers_count_bounded_chambers() {
    for (n, m) in [(2, 3), (2, 4), (2, 5), (3, 4), (3, 5)] {
        let st = generic_arrangement(n, m);
        let mu = mu_e_derham(&st.d0_complex().unwrap(), 2).unwrap().value;
        assert_eq!(mu, binomial(m as u64 - 1, n as u64), "{} planes in dimension {}", m, n);
    }
}

fn lines_family(params: &[&str], comps: &[&str]) -> DeformationSetup {
    let mut src = names(&["x", "y"]);
    src.extend(names(params));
    let m = comps.len();
    let zs: Vec<String> = (1..=m).map(|i| format!("z{}", i)).collect();
    let zrefs: Vec<&str> = zs.iter().map(|s| s.as_str()).collect();
    let e = Divisor::parse(&zrefs, &zs.join("*"), Some(vec![1; m])).unwrap();
    let polys = comps.iter().map(|c| parse_poly(c, &src).unwrap()).collect();
    let n = src.len();
    DeformationSetup::new(
        e,
        InducingMap::new(src, zs, polys).unwrap(),
        2,
        params.len(),
        0,
        Some(vec![1; n]),
    )
    .unwrap()
}

#[test]
fn routes_agree_on_families_with_generic_fibres() {
    // Every fibre away from the origin of the base is a generic arrangement,
    // and so is every fibre over the first parameter axis.
    let families = [
        lines_family(&["s"], &["x", "y", "x+y-s"]),
        lines_family(&["s", "t"], &["x", "y", "x+y-s", "x+2*y-3*s-t"]),
    ];
    for st in &families {
        let m = st.map.components.len() as u64;
        let mu = mu_e_derham(&st.d0_complex().unwrap(), 2).unwrap().value;
        assert_eq!(mu, binomial(m - 1, 2), "{} lines", m);
        assert_eq!(mu_e_alternating(st).unwrap().value, mu as i64, "{} lines", m);
        assert_eq!(mu_e_good_equation(st).unwrap(), mu, "{} lines", m);
    }
}

/// Moving a single line of four leaves a triple point: the family only sees
/// the chambers that open up, fewer than the Milnor number of the fibre.
#[test]
fn non_generic_family_sees_fewer_chambers() {
    let st = lines_family(&["s"], &["x", "y", "x+y", "x+2*y-s"]);
    let mu = mu_e_derham(&st.d0_complex().unwrap(), 2).unwrap().value;
    assert_eq!(mu, 3);
    assert_eq!(mu_e_good_equation(&st).unwrap(), 2);
}

fn dense_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / rows[r][c].clone();
        let pivot: Vec<Rational> = rows[r].iter().map(|x| x * &inv).collect();
        for row in rows.iter_mut().skip(r + 1) {
            let f = row[c].clone();
            if !f.is_zero() {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

/// `dim J^N theta(f) / J^N(tf(theta_2) + wf(theta_2))` for plane-to-plane germs,
/// assembled densely from scratch.
fn ae_oracle(f: &[Poly], order: u32) -> u64 {
    let monos: Vec<[u32; 2]> = (0..=order).flat_map(|d| (0..=d).map(move |a| [a, d - a])).collect();
    let ncols = 2 * monos.len();
    let vector = |v: [&Poly; 2]| {
        let mut row = vec![Rational::zero(); ncols];
        for (comp, p) in v.iter().enumerate() {
            for (m, c) in p.terms() {
                let e = m.exponents();
                if e[0] + e[1] <= order {
                    let i = monos.iter().position(|x| x[..] == e[..]).unwrap();
                    row[comp * monos.len() + i] += c;
                }
            }
        }
        row
    };
    let zero = Poly::zero(2);
    let mut rows = Vec::new();
    for e in &monos {
        let m = Poly::term(Monomial::from_exponents(e.to_vec()), Rational::one());
        for j in 0..2 {
            let a = &f[0].derivative(j) * &m;
            let b = &f[1].derivative(j) * &m;
            rows.push(vector([&a, &b]));
        }
    }
    for a in 0..=order {
        for b in 0..=order - a {
            let g = &f[0].pow(a) * &f[1].pow(b);
            rows.push(vector([&g, &zero]));
            rows.push(vector([&zero, &g]));
        }
    }
    ncols as u64 - dense_rank(rows) as u64
}

#[test]
fn direct_ae_codimension_matches_dense_jets() {
    let xy = names(&["x", "y"]);
    for (second, expected) in [
        ("y^2", 0),
        ("y^3+x*y", 0),
        ("y^3+x^2*y", 1),
        ("y^3-x^2*y", 1),
        ("y^3+x^4*y", 3),
        ("y^4+x*y", 1),
    ] {
        let f = vec![parse_poly("x", &xy).unwrap(), parse_poly(second, &xy).unwrap()];
        let direct = ae_codim_direct(&f, 20).unwrap().value.expect("stabilizes");
        let oracle = ae_oracle(&f, 10);
        assert_eq!(oracle, ae_oracle(&f, 9), "{}: oracle still moving", second);
        assert_eq!(direct, oracle, "(x, {})", second);
        assert_eq!(direct, expected, "(x, {})", second);
    }
}
