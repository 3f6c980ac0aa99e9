//! Back-substitution through a lexicographic Gröbner basis.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use super::{AlgebraError, Poly, RatFunc, Symbol};

#[derive(Clone, Debug)]
pub enum BranchValue {
    Expr(RatFunc),
    Free,
}

impl Serialize for BranchValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            BranchValue::Expr(r) => s.serialize_str(&r.to_string()),
            BranchValue::Free => s.serialize_str("free"),
        }
    }
}

/// One solution branch: every unknown, in order, with its value.
#[derive(Clone, Debug, Serialize)]
pub struct Branch {
    pub values: Vec<(Symbol, BranchValue)>,
}

impl Branch {
    pub fn get(&self, s: &Symbol) -> Option<&BranchValue> {
        self.values.iter().find(|(k, _)| k == s).map(|(_, v)| v)
    }

    pub fn free(&self) -> Vec<Symbol> {
        self.values
            .iter()
            .filter(|(_, v)| matches!(v, BranchValue::Free))
            .map(|(k, _)| k.clone())
            .collect()
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .values
            .iter()
            .map(|(k, v)| match v {
                BranchValue::Expr(r) => format!("{k} = {r}"),
                BranchValue::Free => format!("{k} = {k}"),
            })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn leading_unknown<'a>(p: &Poly, unknowns: &'a [Symbol]) -> Option<&'a Symbol> {
    unknowns.iter().find(|u| p.contains_symbol(u))
}

/// Solves a lex-reduced basis (unknowns ordered first = largest) by
/// back-substitution. Non-unknown symbols are treated as parameters.
///
/// Each unknown is resolved from the basis element of lowest degree in it
/// once lower unknowns are substituted; degree one and degree two (with a
/// perfect-square discriminant) are supported. Anything else yields
/// [`AlgebraError::NotExtractable`].
pub fn solve_triangular(basis: &[Poly], unknowns: &[Symbol]) -> Result<Vec<Branch>, AlgebraError> {
    let mut groups: BTreeMap<usize, Vec<&Poly>> = BTreeMap::new();
    for p in basis.iter().filter(|p| !p.is_zero()) {
        match leading_unknown(p, unknowns) {
            Some(u) => {
                let idx = unknowns.iter().position(|x| x == u).expect("present");
                groups.entry(idx).or_default().push(p);
            }
            None => return Err(AlgebraError::NoSolution),
        }
    }

    let mut branches: Vec<BTreeMap<Symbol, BranchValue>> = vec![BTreeMap::new()];
    for (idx, v) in unknowns.iter().enumerate().rev() {
        let Some(elems) = groups.get(&idx) else {
            for b in branches.iter_mut() {
                b.insert(v.clone(), BranchValue::Free);
            }
            continue;
        };
        let mut next = Vec::new();
        for b in branches {
            let assigned: BTreeMap<Symbol, RatFunc> = b
                .iter()
                .filter_map(|(k, val)| match val {
                    BranchValue::Expr(r) => Some((k.clone(), r.clone())),
                    BranchValue::Free => None,
                })
                .collect();
            let reduced: Vec<Poly> = elems
                .iter()
                .map(|p| RatFunc::substitute_into(p, &assigned).num().clone())
                .filter(|q| !q.is_zero())
                .collect();
            if reduced.is_empty() {
                let mut nb = b.clone();
                nb.insert(v.clone(), BranchValue::Free);
                next.push(nb);
                continue;
            }
            if reduced.iter().any(|q| q.degree_in(v) == 0) {
                // A nonzero relation among lower unknowns: not generic here.
                continue;
            }
            let pivot = reduced.iter().min_by_key(|q| q.degree_in(v)).expect("nonempty");
            let roots = roots_in(pivot, v)?;
            for root in roots {
                let at_root = BTreeMap::from([(v.clone(), root.clone())]);
                let consistent = reduced.iter().all(|q| RatFunc::substitute_into(q, &at_root).is_zero());
                if consistent {
                    let mut nb = b.clone();
                    nb.insert(v.clone(), BranchValue::Expr(root));
                    next.push(nb);
                }
            }
        }
        branches = next;
        if branches.is_empty() {
            return Err(AlgebraError::NoSolution);
        }
    }

    Ok(branches
        .into_iter()
        .map(|mut b| Branch {
            values: unknowns.iter().map(|u| (u.clone(), b.remove(u).expect("every unknown resolved"))).collect(),
        })
        .collect())
}

fn roots_in(p: &Poly, v: &Symbol) -> Result<Vec<RatFunc>, AlgebraError> {
    let cs = p.coefficients_in(v);
    match cs.len() - 1 {
        1 => Ok(vec![RatFunc::new(-&cs[0], cs[1].clone())?.reduce()]),
        2 => {
            let (c, b, a) = (&cs[0], &cs[1], &cs[2]);
            let disc = &(b * b) - &(&Poly::from_int(4) * &(a * c));
            let Some(r) = disc.sqrt_exact() else {
                return Err(AlgebraError::NotExtractable(format!(
                    "quadratic in {v} has a discriminant that is not a perfect square"
                )));
            };
            let two_a = a.scale(&super::rat(2));
            let first = RatFunc::new(&(-b) + &r, two_a.clone())?.reduce();
            if r.is_zero() {
                return Ok(vec![first]);
            }
            let second = RatFunc::new(&(-b) - &r, two_a)?.reduce();
            Ok(vec![first, second])
        }
        d => Err(AlgebraError::NotExtractable(format!("degree {d} in {v}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, sym};

    fn p(s: &str) -> Poly {
        parse_poly(s).unwrap()
    }

    fn expr(b: &Branch, s: &str) -> RatFunc {
        match b.get(&sym(s)) {
            Some(BranchValue::Expr(r)) => r.clone(),
            other => panic!("{s}: {other:?}"),
        }
    }

    #[test]
    fn linear() {
        let bs = solve_triangular(&[p("X - k")], &[sym("X")]).unwrap();
        assert_eq!(bs.len(), 1);
        assert!(expr(&bs[0], "X").equals(&RatFunc::from_poly(p("k"))));
    }

    #[test]
    fn quadratic_with_square_discriminant() {
        let bs = solve_triangular(&[p("X^2 - k^2")], &[sym("X")]).unwrap();
        assert_eq!(bs.len(), 2);
        let vals: Vec<RatFunc> = bs.iter().map(|b| expr(b, "X")).collect();
        assert!(vals.iter().any(|r| r.equals(&RatFunc::from_poly(p("k")))));
        assert!(vals.iter().any(|r| r.equals(&RatFunc::from_poly(p("-k")))));
        // Substituting each branch back gives zero.
        for b in &bs {
            let m = BTreeMap::from([(sym("X"), expr(b, "X"))]);
            assert!(RatFunc::substitute_into(&p("X^2 - k^2"), &m).is_zero());
        }
    }

    #[test]
    fn zero_ideal_leaves_unknown_free() {
        let bs = solve_triangular(&[], &[sym("X")]).unwrap();
        assert_eq!(bs.len(), 1);
        assert!(matches!(bs[0].get(&sym("X")), Some(BranchValue::Free)));
    }

    #[test]
    fn hyperbola_with_parameter() {
        let us = [sym("K"), sym("C"), sym("X")];
        let bs = solve_triangular(&[p("K - k"), p("C*X - c*x")], &us).unwrap();
        assert_eq!(bs.len(), 1);
        assert!(expr(&bs[0], "K").equals(&RatFunc::from_poly(p("k"))));
        assert!(expr(&bs[0], "C").equals(&RatFunc::new(p("c*x"), p("X")).unwrap()));
        assert_eq!(bs[0].free(), vec![sym("X")]);
        assert_eq!(bs[0].to_string(), "{K = k, C = c*x/X, X = X}");
    }

    #[test]
    fn obstructions() {
        assert!(matches!(
            solve_triangular(&[p("X^2 - k")], &[sym("X")]),
            Err(AlgebraError::NotExtractable(_))
        ));
        assert!(matches!(
            solve_triangular(&[p("X^3 - k")], &[sym("X")]),
            Err(AlgebraError::NotExtractable(_))
        ));
        assert_eq!(solve_triangular(&[p("k + 1")], &[sym("X")]).unwrap_err(), AlgebraError::NoSolution);
    }

    #[test]
    fn root_filtered_by_companion_element() {
        // Y^2 = 1 has two roots, but X = 1 and X*Y = 1 rule out Y = -1.
        let bs = solve_triangular(&[p("X - 1"), p("Y^2 - 1"), p("X*Y - 1")], &[sym("X"), sym("Y")]).unwrap();
        assert_eq!(bs.len(), 1);
        assert!(expr(&bs[0], "Y").equals(&RatFunc::from_poly(p("1"))));
    }
}
