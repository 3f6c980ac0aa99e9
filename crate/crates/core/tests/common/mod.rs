//! Random compartmental structures for property tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sgi_core::algebra::{Poly, Rational, Symbol};
use sgi_core::structures::{parse_structure, StructureSpec};
use sgi_core::transfer::TransferMatrix;

/// A random linear compartmental structure with `n` compartments. Flows
/// `j -> i` are labelled `k{i}{j}`, outflows `k0{j}`; outputs observe a
/// compartment with a gain `c{i}` or a known gain of 1.
pub fn random_structure(seed: u64, n: usize) -> StructureSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params: Vec<String> = Vec::new();
    let mut a = vec![vec![String::from("0"); n]; n];
    let mut leaving: Vec<Vec<String>> = vec![Vec::new(); n];
    let mut outflow = vec![String::from("0"); n];
    for j in 0..n {
        for i in 0..n {
            if i != j && rng.gen_bool(0.6) {
                let name = format!("k{}{}", i + 1, j + 1);
                a[i][j] = name.clone();
                leaving[j].push(name.clone());
                params.push(name);
            }
        }
        if rng.gen_bool(0.5) {
            let name = format!("k0{}", j + 1);
            outflow[j] = name.clone();
            leaving[j].push(name.clone());
            params.push(name);
        }
    }
    for j in 0..n {
        if !leaving[j].is_empty() {
            a[j][j] = format!("-({})", leaving[j].join(" + "));
        }
    }
    let k = rng.gen_range(1..=n);
    let mut c = vec![vec![String::from("0"); n]; k];
    for (i, row) in c.iter_mut().enumerate() {
        let j = rng.gen_range(0..n);
        row[j] = if rng.gen_bool(0.5) {
            let name = format!("c{}", i + 1);
            params.push(name.clone());
            name
        } else {
            "1".into()
        };
    }
    let x0: Vec<String> = (0..n)
        .map(|j| match rng.gen_range(0..3) {
            0 => "0".into(),
            1 => "1".into(),
            _ => {
                let name = format!("x{}0", j + 1);
                params.push(name.clone());
                name
            }
        })
        .collect();
    let doc = serde_json::json!({
        "n": n, "k": k, "parameters": params, "A": a, "C": c, "x0": x0,
        "outflow_params": outflow, "compartmental": true,
    });
    parse_structure(doc.to_string().as_bytes()).expect("generated structure is valid")
}

/// Solves `m x = b` by Gauss-Jordan elimination with exact rationals.
pub fn solve(mut m: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        b.swap(col, pivot);
        let inv = BigRational::one() / &m[col][col];
        for x in m[col].iter_mut() {
            *x = &*x * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..n {
                    let v = &m[col][c] * &f;
                    m[r][c] -= v;
                }
                let v = &b[col] * &f;
                b[r] -= v;
            }
        }
    }
    Some(b)
}

pub fn random_point(spec: &StructureSpec, rng: &mut ChaCha8Rng) -> BTreeMap<Symbol, Rational> {
    let mut point: BTreeMap<Symbol, Rational> = spec
        .parameters
        .iter()
        .map(|p| (p.clone(), Rational::new(rng.gen_range(1..500).into(), rng.gen_range(1..50).into())))
        .collect();
    point.insert(TransferMatrix::laplace(), Rational::new(rng.gen_range(1..1000).into(), rng.gen_range(1..7).into()));
    point
}

/// `C (sI - A)^{-1} x0` at `point`, computed without the transfer module.
pub fn numeric_transfer(spec: &StructureSpec, point: &BTreeMap<Symbol, Rational>) -> Option<Vec<Rational>> {
    let s = point[&TransferMatrix::laplace()].clone();
    let ev = |p: &Poly| p.eval_rational(point).expect("all symbols assigned");
    let m: Vec<Vec<Rational>> = (0..spec.n)
        .map(|i| {
            (0..spec.n)
                .map(|j| {
                    let a = ev(&spec.a[i][j]);
                    if i == j {
                        &s - a
                    } else {
                        -a
                    }
                })
                .collect()
        })
        .collect();
    let x = solve(m, spec.x0.iter().map(ev).collect())?;
    Some(spec.c.iter().map(|row| row.iter().zip(&x).map(|(c, xi)| ev(c) * xi).sum()).collect())
}
