//! Dimension and point counts of a variety from a Gröbner basis.

use std::collections::BTreeMap;

use serde::Serialize;

use super::groebner::{groebner_basis, is_unit_ideal, leading_monomials, normal_form};
use super::linalg::row_reduce;
use super::{squarefree_part, AlgebraError, Poly, Rational, Symbol, TermOrder};

/// Upper bound on the quotient-ring dimension enumerated when counting points.
const MAX_STANDARD_MONOMIALS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionReport {
    pub dimension: usize,
    /// Quotient-ring dimension (solutions counted with multiplicity); only for `dimension == 0`.
    pub count_with_multiplicity: Option<usize>,
    /// Number of distinct solutions; only for `dimension == 0`.
    pub distinct_count: Option<usize>,
    /// A maximal independent set of unknowns, for `dimension > 0`.
    pub free: Vec<Symbol>,
}

/// Dimension of the solution variety of `basis` (a reduced Gröbner basis
/// with respect to `order`, whose variables are the unknowns).
pub fn variety_dimension(basis: &[Poly], order: &TermOrder) -> Result<DimensionReport, AlgebraError> {
    if is_unit_ideal(basis, order) {
        return Err(AlgebraError::NoSolution);
    }
    let n = order.vars.len();
    let lms = leading_monomials(basis, order);
    let supports: Vec<Vec<usize>> = lms
        .iter()
        .map(|e| e.iter().enumerate().filter(|(_, &x)| x > 0).map(|(i, _)| i).collect())
        .collect();

    // Largest set U of unknowns such that no leading monomial lives in k[U].
    // Candidates are tried from the smallest variable upward, so the free
    // set prefers the tail of the order.
    let mut best: Vec<usize> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    search_independent(&supports, n, &mut current, &mut best);
    best.sort_unstable();
    let dimension = best.len();

    if dimension > 0 {
        return Ok(DimensionReport {
            dimension,
            count_with_multiplicity: None,
            distinct_count: None,
            free: best.into_iter().map(|i| order.vars[i].clone()).collect(),
        });
    }
    let standard = standard_monomials(&lms, n)?;
    let multiplicity_count = standard.len();
    let distinct = distinct_solution_count(basis, order, &standard)?;
    Ok(DimensionReport {
        dimension: 0,
        count_with_multiplicity: Some(multiplicity_count),
        distinct_count: Some(distinct),
        free: Vec::new(),
    })
}

fn independent(set: &[usize], supports: &[Vec<usize>]) -> bool {
    supports.iter().all(|s| !s.iter().all(|v| set.contains(v)))
}

fn search_independent(supports: &[Vec<usize>], upto: usize, current: &mut Vec<usize>, best: &mut Vec<usize>) {
    if current.len() > best.len() {
        *best = current.clone();
    }
    if current.len() + upto <= best.len() {
        return;
    }
    for v in (0..upto).rev() {
        current.push(v);
        if independent(current, supports) {
            search_independent(supports, v, current, best);
        }
        current.pop();
        if current.len() + v <= best.len() {
            return;
        }
    }
}

/// Monomials not divisible by any leading monomial (zero-dimensional case).
fn standard_monomials(lms: &[Vec<u32>], n: usize) -> Result<Vec<Vec<u32>>, AlgebraError> {
    let mut bounds = vec![u32::MAX; n];
    for e in lms {
        let nz: Vec<usize> = (0..n).filter(|&i| e[i] > 0).collect();
        if nz.len() == 1 {
            bounds[nz[0]] = bounds[nz[0]].min(e[nz[0]]);
        }
    }
    if bounds.contains(&u32::MAX) {
        return Err(AlgebraError::InvalidInput("basis is not zero-dimensional".into()));
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    enumerate(0, &bounds, lms, &mut cur, &mut out)?;
    Ok(out)
}

fn enumerate(i: usize, bounds: &[u32], lms: &[Vec<u32>], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) -> Result<(), AlgebraError> {
    if i == bounds.len() {
        out.push(cur.clone());
        if out.len() > MAX_STANDARD_MONOMIALS {
            return Err(AlgebraError::InvalidInput("quotient ring too large to enumerate".into()));
        }
        return Ok(());
    }
    for e in 0..bounds[i] {
        cur[i] = e;
        // Prune: a partial monomial already divisible stays divisible.
        let divisible = lms.iter().any(|l| (0..=i).all(|k| l[k] <= cur[k]) && l[i + 1..].iter().all(|&x| x == 0));
        if divisible {
            break;
        }
        enumerate(i + 1, bounds, lms, cur, out)?;
    }
    cur[i] = 0;
    Ok(())
}

/// Coordinates of a normal form in the standard-monomial basis.
fn coordinates(nf: &Poly, order: &TermOrder, index: &BTreeMap<Vec<u32>, usize>) -> Vec<Rational> {
    let mut v = vec![Rational::from_integer(0.into()); index.len()];
    let q = nf.reorder(&order.vars);
    for (mono, c) in q.sparse_terms() {
        let mut e = vec![0u32; order.vars.len()];
        for (s, x) in mono {
            let i = order.vars.iter().position(|w| *w == s).expect("unknown");
            e[i] = x;
        }
        let k = index[&e];
        v[k] = c.clone();
    }
    v
}

/// Number of distinct points via Seidenberg's lemma: adjoin the squarefree
/// part of each unknown's minimal polynomial and recount.
fn distinct_solution_count(basis: &[Poly], order: &TermOrder, standard: &[Vec<u32>]) -> Result<usize, AlgebraError> {
    let dim = standard.len();
    if dim <= 1 {
        return Ok(dim);
    }
    let index: BTreeMap<Vec<u32>, usize> = standard.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    let mut extra = Vec::new();
    for x in &order.vars {
        let xp = Poly::var(x);
        let mut powers: Vec<Vec<Rational>> = Vec::new();
        let mut cur = normal_form(&Poly::one(), basis, order)?;
        // Minimal polynomial: first linear dependency among 1, x, x^2, ...
        let min_poly = loop {
            let coords = coordinates(&cur, order, &index);
            powers.push(coords);
            if let Some(rel) = dependency(&powers) {
                break Poly::from_coefficients_in(x, &rel.into_iter().map(Poly::constant).collect::<Vec<_>>());
            }
            cur = normal_form(&(&cur * &xp), basis, order)?;
        };
        let sf = squarefree_part(&min_poly, x);
        if sf.degree_in(x) < min_poly.degree_in(x) {
            extra.push(sf);
        }
    }
    if extra.is_empty() {
        return Ok(dim);
    }
    let mut polys = basis.to_vec();
    polys.extend(extra);
    let radical = groebner_basis(&polys, order)?;
    let lms = leading_monomials(&radical, order);
    Ok(standard_monomials(&lms, order.vars.len())?.len())
}

/// If the last vector is a combination of the earlier ones, returns the
/// coefficients of the relation `sum c_i v_i = 0` with `c_last = 1`.
fn dependency(vectors: &[Vec<Rational>]) -> Option<Vec<Rational>> {
    let k = vectors.len();
    let rows = vectors[0].len();
    // Columns are the vectors; solve for a kernel vector with last entry 1.
    let mut m: Vec<Vec<Rational>> = (0..rows).map(|r| (0..k).map(|c| vectors[c][r].clone()).collect()).collect();
    let pivots = row_reduce(&mut m);
    if pivots.contains(&(k - 1)) {
        return None;
    }
    let mut rel = vec![Rational::from_integer(0.into()); k];
    rel[k - 1] = Rational::from_integer(1.into());
    for (r, &c) in pivots.iter().enumerate() {
        rel[c] = -m[r][k - 1].clone();
    }
    Some(rel)
}
