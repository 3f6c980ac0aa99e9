//! Transfer matrix `H(s) = C (sI - A)^-1 x0` and its canonical processing.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{poly_gcd, AlgebraError, Poly, RatFunc, Symbol};
use crate::structures::{StructureSpec, LAPLACE_SYMBOL};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransferError {
    #[error("entry {entry}: leading coefficient of the denominator in s is {coefficient}, not a constant")]
    NonConstantLeadingCoefficient { entry: usize, coefficient: String },
    #[error("matrix has already been processed")]
    AlreadyProcessed,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A `k x 1` vector of rational functions in the parameters and `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub entries: Vec<RatFunc>,
    pub processed: bool,
    pub canonical: bool,
    pub s: Symbol,
}

impl TransferMatrix {
    pub fn laplace() -> Symbol {
        Symbol::new(LAPLACE_SYMBOL).expect("valid name")
    }

    /// Degree in `s` of each entry's numerator and denominator.
    pub fn degrees(&self) -> Vec<(u32, u32)> {
        self.entries
            .iter()
            .map(|e| (if e.num().is_zero() { 0 } else { e.num().degree_in(&self.s) }, e.den().degree_in(&self.s)))
            .collect()
    }
}

impl Serialize for TransferMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            num: String,
            den: String,
        }
        let entries: Vec<Entry> = self
            .entries
            .iter()
            .map(|e| Entry { num: e.num().to_string(), den: e.den().to_string() })
            .collect();
        let mut st = s.serialize_struct("TransferMatrix", 3)?;
        st.serialize_field("entries", &entries)?;
        st.serialize_field("processed", &self.processed)?;
        st.serialize_field("canonical", &self.canonical)?;
        st.end()
    }
}

impl fmt::Display for TransferMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            writeln!(f, "H[{}] = {}", i + 1, e)?;
        }
        Ok(())
    }
}

fn exact(p: &Poly, d: &Poly) -> Poly {
    p.div_exact(d).expect("fraction-free elimination divides exactly")
}

/// Computes `C (sI - A)^-1 x0` exactly. Fraction-free Gauss-Jordan on
/// `(sI - A | x0)` leaves `det(sI - A)` on the diagonal and `adj(sI - A) x0`
/// in the last column; the leading principal minors are monic in `s`, so no
/// pivoting is needed.
pub fn build_transfer_matrix(spec: &StructureSpec) -> TransferMatrix {
    let n = spec.n;
    let s = TransferMatrix::laplace();
    let sp = Poly::var(&s);
    let mut m: Vec<Vec<Poly>> = (0..n)
        .map(|i| {
            let mut row: Vec<Poly> = (0..n)
                .map(|j| if i == j { &sp - &spec.a[i][j] } else { -&spec.a[i][j] })
                .collect();
            row.push(spec.x0[i].clone());
            row
        })
        .collect();
    let mut prev = Poly::one();
    for k in 0..n {
        let pivot = m[k][k].clone();
        debug_assert!(!pivot.is_zero());
        for i in (0..n).filter(|&i| i != k) {
            let factor = m[i][k].clone();
            for j in (0..=n).filter(|&j| j != k) {
                let v = &(&pivot * &m[i][j]) - &(&factor * &m[k][j]);
                m[i][j] = exact(&v, &prev);
            }
            m[i][k] = Poly::zero();
        }
        prev = pivot;
    }
    let det = prev;
    let entries = spec
        .c
        .iter()
        .map(|row| {
            let num = row.iter().zip(&m).fold(Poly::zero(), |acc, (c, r)| &acc + &(c * &r[n]));
            RatFunc::new(num, det.clone()).expect("det(sI - A) is monic in s")
        })
        .collect();
    TransferMatrix { entries, processed: false, canonical: false, s }
}

/// Cancels common factors in every entry and, with `canonical_form`, makes
/// each denominator monic in `s`. Polynomials are stored over `sort_order`
/// (extra symbols follow), which fixes their printed term order.
pub fn process_matrix(tm: &TransferMatrix, canonical_form: bool, sort_order: &[Symbol]) -> Result<TransferMatrix, TransferError> {
    if tm.processed {
        return Err(TransferError::AlreadyProcessed);
    }
    let mut entries = Vec::with_capacity(tm.entries.len());
    for (idx, e) in tm.entries.iter().enumerate() {
        let g = poly_gcd(e.num(), e.den())?;
        let mut num = e.num().div_exact(&g).expect("gcd divides");
        let mut den = e.den().div_exact(&g).expect("gcd divides");
        if canonical_form {
            let lc = den.leading_coefficient_in(&tm.s);
            let Some(c) = lc.constant_value() else {
                return Err(TransferError::NonConstantLeadingCoefficient { entry: idx + 1, coefficient: lc.to_string() });
            };
            let inv = c.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        entries.push(RatFunc::new(num.reorder(sort_order), den.reorder(sort_order))?);
    }
    Ok(TransferMatrix { entries, processed: true, canonical: canonical_form, s: tm.s.clone() })
}

/// Default symbol order for processing: parameters, constants, then `s`.
pub fn default_sort_order(spec: &StructureSpec) -> Vec<Symbol> {
    let mut v = spec.symbols();
    v.push(TransferMatrix::laplace());
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, rat, sym, GenericPoint};
    use crate::structures::parse_structure;

    fn p(s: &str) -> Poly {
        parse_poly(s).unwrap()
    }

    fn raw(num: &str, den: &str) -> TransferMatrix {
        TransferMatrix {
            entries: vec![RatFunc::new(p(num), p(den)).unwrap()],
            processed: false,
            canonical: false,
            s: sym("s"),
        }
    }

    #[test]
    fn one_compartment_by_inspection() {
        let spec = parse_structure(
            br#"{"n": 1, "k": 1, "parameters": ["k", "c", "x"], "A": [["-k"]], "C": [["c"]], "x0": ["x"]}"#,
        )
        .unwrap();
        let tm = build_transfer_matrix(&spec);
        assert!(tm.entries[0].equals(&RatFunc::new(p("c*x"), p("s + k")).unwrap()));
    }

    #[test]
    fn parent_shares_a_cubic_denominator() {
        let spec = parse_structure(include_bytes!("../../../specs/parent.json")).unwrap();
        let tm = build_transfer_matrix(&spec);
        assert_eq!(tm.entries.len(), 3);
        let s = sym("s");
        for e in &tm.entries {
            assert_eq!(e.den(), tm.entries[0].den());
            assert_eq!(e.den().degree_in(&s), 3);
            assert!(e.den().leading_coefficient_in(&s).is_one());
        }
    }

    /// Determinant by cofactor expansion: independent of the elimination.
    fn det(m: &[Vec<Poly>]) -> Poly {
        if m.len() == 1 {
            return m[0][0].clone();
        }
        let mut acc = Poly::zero();
        for j in 0..m.len() {
            let minor: Vec<Vec<Poly>> = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let term = &m[0][j] * &det(&minor);
            acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    }

    #[test]
    fn denominator_is_the_characteristic_polynomial() {
        let spec = parse_structure(include_bytes!("../../../specs/parent.json")).unwrap();
        let s = Poly::var(&sym("s"));
        let m: Vec<Vec<Poly>> = (0..3)
            .map(|i| (0..3).map(|j| if i == j { &s - &spec.a[i][j] } else { -&spec.a[i][j] }).collect())
            .collect();
        assert_eq!(build_transfer_matrix(&spec).entries[0].den(), &det(&m));
    }

    #[test]
    fn forced_cancellation() {
        let out = process_matrix(&raw("(s + k)*c", "(s + k)*(s + m)"), true, &[sym("c"), sym("k"), sym("m"), sym("s")]).unwrap();
        assert_eq!(out.entries[0].num(), &p("c"));
        assert_eq!(out.entries[0].den(), &p("s + m"));
        assert!(out.processed && out.canonical);
    }

    #[test]
    fn monic_normalization() {
        let out = process_matrix(&raw("c*x", "2*s + 2*k"), true, &[]).unwrap();
        assert_eq!(out.entries[0].num(), &p("c*x/2"));
        assert_eq!(out.entries[0].den(), &p("s + k"));
    }

    #[test]
    fn non_canonical_keeps_the_denominator() {
        let out = process_matrix(&raw("c*x", "2*s + 2*k"), false, &[]).unwrap();
        assert_eq!(out.entries[0].den(), &p("2*s + 2*k"));
        assert!(!out.canonical);
        let out = process_matrix(&raw("s + k", "(2*s + 2*m)*(s + k)"), false, &[]).unwrap();
        assert_eq!(out.entries[0].den(), &p("2*s + 2*m"));
    }

    #[test]
    fn parameter_leading_coefficient_is_rejected() {
        assert!(matches!(
            process_matrix(&raw("1", "k*s + 1"), true, &[]),
            Err(TransferError::NonConstantLeadingCoefficient { entry: 1, .. })
        ));
        assert_eq!(
            process_matrix(&process_matrix(&raw("1", "s"), true, &[]).unwrap(), true, &[]),
            Err(TransferError::AlreadyProcessed)
        );
    }

    #[test]
    fn zero_output_row_processes_to_zero() {
        let out = process_matrix(&raw("0", "s^2 + k*s + 1"), true, &[]).unwrap();
        assert!(out.entries[0].num().is_zero());
        assert!(out.entries[0].den().is_one());
    }

    #[test]
    fn point_evaluation_matches_direct_solve() {
        let spec = parse_structure(include_bytes!("../../../specs/parent.json")).unwrap();
        let tm = build_transfer_matrix(&spec);
        let mut point = GenericPoint::new(&spec.symbols(), 3).assignment;
        point.insert(sym("s"), rat(17));
        // (sI - A) y = x0 at the point, solved by Cramer's rule on rationals.
        let num = |q: &Poly| q.eval_rational(&point).unwrap();
        let m: Vec<Vec<Poly>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| {
                        let v = if i == j { rat(17) - num(&spec.a[i][j]) } else { -num(&spec.a[i][j]) };
                        Poly::constant(v)
                    })
                    .collect()
            })
            .collect();
        let d = det(&m).constant_value().unwrap();
        let y: Vec<_> = (0..3)
            .map(|col| {
                let mut mc = m.clone();
                for r in 0..3 {
                    mc[r][col] = Poly::constant(num(&spec.x0[r]));
                }
                det(&mc).constant_value().unwrap() / &d
            })
            .collect();
        for (i, e) in tm.entries.iter().enumerate() {
            let expected: crate::algebra::Rational = (0..3).map(|j| num(&spec.c[i][j]) * &y[j]).sum();
            assert_eq!(e.eval_rational(&point).unwrap(), expected);
        }
    }
}
