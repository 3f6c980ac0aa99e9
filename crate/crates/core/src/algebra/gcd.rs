//! Multivariate GCD by recursive content / primitive-part decomposition.
//!
//! Polynomials are viewed as univariate in their first occurring variable with
//! coefficients in the remaining ones. Contents are computed recursively and
//! the primitive parts go through a primitive pseudo-remainder sequence.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::budget::{charge, checkpoint};
use super::poly::{merge_vars, zero_exps, Exponents};
use super::{AlgebraError, Poly, Rational, Symbol};

/// Greatest common divisor, normalized so its lex-leading coefficient
/// (with respect to the merged variable list) is 1.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Result<Poly, AlgebraError> {
    if a.is_zero() && b.is_zero() {
        return Err(AlgebraError::InvalidInput("gcd of two zero polynomials".into()));
    }
    if a.is_zero() {
        return Ok(b.monic());
    }
    if b.is_zero() {
        return Ok(a.monic());
    }
    if a.is_constant() || b.is_constant() {
        return Ok(Poly::one());
    }
    let vars = merge_vars(a.vars_arc(), b.vars_arc());
    let a = a.remap(&vars).expect("merged");
    let b = b.remap(&vars).expect("merged");
    // Split off monomial contents; their gcd is the exponentwise minimum.
    let (ma, a) = split_monomial_content(&a);
    let (mb, b) = split_monomial_content(&b);
    let m: Exponents = ma.iter().zip(mb.iter()).map(|(x, y)| *x.min(y)).collect();
    let m = Poly::from_parts(vars.clone(), BTreeMap::from([(m, Rational::from_integer(1.into()))]));
    let g = if a.is_constant() || b.is_constant() {
        Poly::one()
    } else if a.monic() == b.monic() {
        a
    } else if let Some(g) = trial_gcd(&a, &b) {
        g
    } else if let Some(g) = heuristic_gcd(&a, &b) {
        g
    } else {
        gcd_rec(&a, &b).remap(&vars).expect("subset")
    };
    Ok((&m * &g).monic())
}

/// `(e, p / x^e)` where `x^e` is the largest monomial dividing `p`.
fn split_monomial_content(p: &Poly) -> (Exponents, Poly) {
    let n = p.vars().len();
    let mut mins: Vec<u32> = vec![u32::MAX; n];
    for e in p.term_map().keys() {
        for (m, x) in mins.iter_mut().zip(e.iter()) {
            *m = (*m).min(*x);
        }
    }
    let mins: Exponents = mins.into_iter().map(|m| if m == u32::MAX { 0 } else { m }).collect();
    if mins.iter().all(|&m| m == 0) {
        return (mins, p.clone());
    }
    let terms = p
        .term_map()
        .iter()
        .map(|(e, c)| (e.iter().zip(mins.iter()).map(|(x, m)| x - m).collect::<Exponents>(), c.clone()))
        .collect();
    (mins, Poly::from_parts(p.vars_arc().clone(), terms))
}

/// The smaller input when it divides the larger one.
fn trial_gcd(a: &Poly, b: &Poly) -> Option<Poly> {
    let (small, large) = if a.num_terms() <= b.num_terms() { (a, b) } else { (b, a) };
    let to_z = |p: &Poly| -> ZPoly { p.integer_primitive().term_map().iter().map(|(e, c)| (e.clone(), c.to_integer())).collect() };
    let (zs, zl) = (to_z(small), to_z(large));
    let ds = zs.keys().next_back()?;
    let dl = zl.keys().next_back()?;
    if ds.iter().zip(dl.iter()).any(|(x, y)| x > y) {
        return None;
    }
    z_divides(&zs, &zl).then(|| small.clone())
}

/// Content of `p` viewed as a polynomial in `x` (normalized gcd of its coefficients).
pub fn content_in(p: &Poly, x: &Symbol) -> Poly {
    let mut g = Poly::zero();
    for c in p.coefficients_in(x) {
        if c.is_zero() {
            continue;
        }
        g = if g.is_zero() { c.monic() } else { gcd_rec(&g, &c) };
        if g.is_constant() {
            return Poly::one();
        }
    }
    g
}

/// `p / content_in(p, x)`.
pub fn primitive_part_in(p: &Poly, x: &Symbol) -> Poly {
    if p.is_zero() {
        return Poly::zero();
    }
    let c = content_in(p, x);
    p.div_exact(&c).expect("content divides")
}

fn monomial_gcd(m: &Poly, p: &Poly) -> Poly {
    let vars: Arc<[Symbol]> = merge_vars(m.vars_arc(), p.vars_arc());
    let m = m.remap(&vars).expect("merged");
    let p = p.remap(&vars).expect("merged");
    let me = m.leading_exponents().expect("nonzero").to_vec();
    let mut mins = me;
    for e in p.term_map().keys() {
        for (i, x) in e.iter().enumerate() {
            mins[i] = mins[i].min(*x);
        }
    }
    let mut out = Poly::one();
    for (i, &x) in mins.iter().enumerate() {
        if x > 0 {
            out = &out * &Poly::monomial(&vars[i], x);
        }
    }
    out
}

type ZPoly = BTreeMap<Exponents, BigInt>;

/// Heuristic GCD: evaluate one variable at a large integer, recurse, and
/// read the result back in balanced base-`xi` digits. Candidates are
/// confirmed by trial division; `None` asks for the exact fallback.
fn heuristic_gcd(a: &Poly, b: &Poly) -> Option<Poly> {
    let vars = a.vars_arc().clone();
    let to_z = |p: &Poly| -> ZPoly { p.integer_primitive().term_map().iter().map(|(e, c)| (e.clone(), c.to_integer())).collect() };
    let (fa, fb) = (to_z(a), to_z(b));
    let g = heu_rec(&fa, &fb, &vars)?;
    Some(Poly::from_parts(vars, g.into_iter().map(|(e, c)| (e, Rational::from_integer(c))).collect()))
}

fn z_content(p: &ZPoly) -> BigInt {
    p.values().fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn z_norm(p: &ZPoly) -> BigInt {
    p.values().map(|c| c.abs()).max().unwrap_or_default()
}

fn z_div_scalar(p: &ZPoly, d: &BigInt) -> ZPoly {
    p.iter().map(|(e, c)| (e.clone(), c / d)).collect()
}

fn z_is_constant(p: &ZPoly) -> bool {
    p.keys().all(|e| e.iter().all(|&x| x == 0))
}

/// Size of `n` in 64-bit words, at least 1.
fn words(n: &BigInt) -> u64 {
    n.bits() / 64 + 1
}

fn z_eval(p: &ZPoly, k: usize, xi: &BigInt) -> ZPoly {
    let top = p.keys().map(|e| e[k]).max().unwrap_or(0) as usize;
    let mut powers = vec![BigInt::from(1)];
    for i in 0..top {
        powers.push(&powers[i] * xi);
    }
    let mut out: ZPoly = BTreeMap::new();
    for (e, c) in p {
        let mut e2 = e.clone();
        e2[k] = 0;
        let v = c * &powers[e[k] as usize];
        *out.entry(e2).or_insert_with(BigInt::zero) += v;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Inverse of [`z_eval`] for small coefficients: balanced digits in base `xi`.
fn z_interpolate(mut h: ZPoly, k: usize, xi: &BigInt) -> ZPoly {
    let half = xi / 2;
    let mut out: ZPoly = BTreeMap::new();
    let mut i = 0u32;
    while !h.is_empty() {
        let mut next: ZPoly = BTreeMap::new();
        for (e, c) in &h {
            let mut d = c.mod_floor(xi);
            if d > half {
                d -= xi;
            }
            let rest = (c - &d) / xi;
            if !rest.is_zero() {
                next.insert(e.clone(), rest);
            }
            if !d.is_zero() {
                let mut e2 = e.clone();
                e2[k] = i;
                out.insert(e2, d);
            }
        }
        h = next;
        i += 1;
        if i > 10_000 {
            break;
        }
    }
    out
}

/// Exact division over the integers; `None` when `d` does not divide `p`.
fn z_div_exact(p: &ZPoly, d: &ZPoly) -> Option<ZPoly> {
    let (dl, dc) = d.iter().next_back()?;
    let mut r = p.clone();
    let mut q: ZPoly = BTreeMap::new();
    while let Some((rl, rc)) = r.iter().next_back() {
        charge(d.len() as u64 * words(rc));
        let mut qe = rl.clone();
        for (x, y) in qe.iter_mut().zip(dl.iter()) {
            *x = x.checked_sub(*y)?;
        }
        let (qc, rem) = rc.div_rem(dc);
        if !rem.is_zero() {
            return None;
        }
        for (e, c) in d {
            let key: Exponents = e.iter().zip(qe.iter()).map(|(a, b)| a + b).collect();
            let v = r.entry(key).or_insert_with(BigInt::zero);
            *v -= &qc * c;
            if v.is_zero() {
                let key: Exponents = e.iter().zip(qe.iter()).map(|(a, b)| a + b).collect();
                r.remove(&key);
            }
        }
        q.insert(qe, qc);
    }
    Some(q)
}

fn z_divides(d: &ZPoly, p: &ZPoly) -> bool {
    z_div_exact(p, d).is_some()
}

fn heu_rec(f: &ZPoly, g: &ZPoly, vars: &Arc<[Symbol]>) -> Option<ZPoly> {
    let n = vars.len();
    if f.is_empty() || g.is_empty() {
        return None;
    }
    // Integer gcds dominate here; their cost grows with the square of the size.
    charge(f.values().chain(g.values()).map(|c| words(c).pow(2)).sum());
    let (cf, cg) = (z_content(f), z_content(g));
    let c = cf.gcd(&cg);
    let const_of = |v: BigInt| BTreeMap::from([(zero_exps(n), v)]);
    if z_is_constant(f) || z_is_constant(g) {
        return Some(const_of(c));
    }
    let f = z_div_scalar(f, &cf);
    let g = z_div_scalar(g, &cg);
    // Main variable: the last one present in either input.
    let k = (0..n).rev().find(|&k| f.keys().chain(g.keys()).any(|e| e[k] > 0))?;
    let (nf, ng) = (z_norm(&f), z_norm(&g));
    let bound: BigInt = BigInt::from(2) * nf.clone().min(ng.clone()) + 29;
    let lead = |p: &ZPoly, norm: &BigInt| norm / p.values().next_back().expect("nonzero").abs();
    let mut xi = bound.clone().min(BigInt::from(99) * bound.sqrt()).max(BigInt::from(2) * lead(&f, &nf).min(lead(&g, &ng)) + 2);
    let primitive = |p: ZPoly| -> ZPoly {
        let cc = z_content(&p);
        let sign = if p.values().next_back().is_some_and(|v| v.is_negative()) { -cc } else { cc };
        z_div_scalar(&p, &sign)
    };
    for _ in 0..6 {
        checkpoint();
        let (ff, gg) = (z_eval(&f, k, &xi), z_eval(&g, k, &xi));
        charge(ff.values().chain(gg.values()).map(words).sum());
        if !ff.is_empty() && !gg.is_empty() {
            if let Some(h) = heu_rec(&ff, &gg, vars) {
                let scaled = |p: ZPoly| -> ZPoly { p.into_iter().map(|(e, v)| (e, v * &c)).collect() };
                let cand = primitive(z_interpolate(h.clone(), k, &xi));
                if !cand.is_empty() && z_divides(&cand, &f) && z_divides(&cand, &g) {
                    return Some(scaled(cand));
                }
                // Large gcds have small cofactors; recover those instead.
                for (whole, image, other) in [(&f, &ff, &g), (&g, &gg, &f)] {
                    let Some(co) = z_div_exact(image, &h) else { continue };
                    let co = z_interpolate(co, k, &xi);
                    if co.is_empty() {
                        continue;
                    }
                    if let Some(cand) = z_div_exact(whole, &co) {
                        let cand = primitive(cand);
                        if z_divides(&cand, other) {
                            return Some(scaled(cand));
                        }
                    }
                }
            }
        }
        xi = BigInt::from(73794) * &xi * xi.sqrt().sqrt() / 27011;
    }
    None
}

/// Mersenne prime 2^61 - 1 used for modular degree bounds.
const P: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, P - 2)
}

fn int_mod(n: &BigInt) -> u64 {
    let m = BigInt::from(P);
    let r = ((n % &m) + &m) % &m;
    r.to_u64().expect("reduced")
}

fn rational_mod(c: &Rational) -> Option<u64> {
    let d = int_mod(c.denom());
    (d != 0).then(|| mul_mod(int_mod(c.numer()), inv_mod(d)))
}

/// Image of `p` in `F_P[x_main]` after sending the other variables to `point`.
fn univariate_image(p: &Poly, main: usize, point: &[u64]) -> Option<Vec<u64>> {
    let mut out = vec![0u64; p.degree_in(&p.vars()[main]) as usize + 1];
    for (e, c) in p.term_map() {
        let mut v = rational_mod(c)?;
        for (i, &x) in e.iter().enumerate() {
            if i != main && x > 0 {
                v = mul_mod(v, pow_mod(point[i], x as u64));
            }
        }
        let k = e[main] as usize;
        out[k] = (out[k] + v) % P;
    }
    Some(out)
}

fn trim(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

fn univariate_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a mod b
        let inv = inv_mod(*b.last().expect("nonempty"));
        while a.len() >= b.len() {
            let f = mul_mod(*a.last().expect("nonempty"), inv);
            let shift = a.len() - b.len();
            for (i, &bc) in b.iter().enumerate() {
                a[shift + i] = (a[shift + i] + P - mul_mod(f, bc)) % P;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// True when `gcd(a, b)` is certainly constant. For each variable the
/// other variables are specialized mod `P` at a point where the leading
/// coefficient of `a` survives, so the image gcd degree bounds the true one.
fn certainly_coprime(a: &Poly, b: &Poly) -> bool {
    let n = a.vars().len();
    for main in 0..n {
        let x = &a.vars()[main];
        if a.degree_in(x) == 0 || b.degree_in(x) == 0 {
            continue;
        }
        let mut bounded = false;
        for attempt in 0..3u64 {
            let point: Vec<u64> = (0..n).map(|i| splitmix((main as u64) << 32 ^ (attempt << 16) ^ i as u64) % P).collect();
            let (Some(ia), Some(ib)) = (univariate_image(a, main, &point), univariate_image(b, main, &point)) else {
                return false;
            };
            if ia.last() == Some(&0) {
                continue;
            }
            if univariate_gcd_degree(ia, ib) > 0 {
                return false;
            }
            bounded = true;
            break;
        }
        if !bounded {
            return false;
        }
    }
    true
}

fn gcd_rec(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.is_monomial() {
        return monomial_gcd(a, b);
    }
    if b.is_monomial() {
        return monomial_gcd(b, a);
    }
    if a.vars() == b.vars() && certainly_coprime(a, b) {
        return Poly::one();
    }
    // Main variable: first symbol (in list order) occurring in either input.
    let sa = a.symbols();
    let sb = b.symbols();
    let x = match a.vars().iter().find(|v| sa.contains(v) || sb.contains(v)) {
        Some(v) => v.clone(),
        None => b.vars().iter().find(|v| sb.contains(v)).expect("non-constant").clone(),
    };
    let in_a = sa.contains(&x);
    let in_b = sb.contains(&x);
    if !in_a {
        return gcd_rec(a, &content_in(b, &x));
    }
    if !in_b {
        return gcd_rec(&content_in(a, &x), b);
    }
    let ca = content_in(a, &x);
    let cb = content_in(b, &x);
    let c = gcd_rec(&ca, &cb);
    let mut p = a.div_exact(&ca).expect("content divides");
    let mut q = b.div_exact(&cb).expect("content divides");
    if p.degree_in(&x) < q.degree_in(&x) {
        std::mem::swap(&mut p, &mut q);
    }
    let g = loop {
        checkpoint();
        let r = pseudo_remainder(&p, &q, &x);
        if r.is_zero() {
            break q;
        }
        if r.degree_in(&x) == 0 {
            break Poly::one();
        }
        p = q;
        q = primitive_part_in(&r, &x);
    };
    let g = primitive_part_in(&g, &x);
    (&c * &g).monic()
}

/// Sparse pseudo-remainder of `a` by `b` in `x`; agrees with `prem` up to a
/// factor that is a power of the leading coefficient of `b`.
pub fn pseudo_remainder(a: &Poly, b: &Poly, x: &Symbol) -> Poly {
    let db = b.degree_in(x);
    let lb = b.leading_coefficient_in(x);
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(x) >= db {
        checkpoint();
        let dr = r.degree_in(x);
        let lr = r.leading_coefficient_in(x);
        let shift = Poly::monomial(x, dr - db);
        r = &(&lb * &r) - &(&(&lr * &shift) * b);
    }
    r
}

/// Squarefree part `p / gcd(p, dp/dx)` of a univariate polynomial.
pub fn squarefree_part(p: &Poly, x: &Symbol) -> Poly {
    let d = p.derivative(x);
    if d.is_zero() {
        return p.monic();
    }
    let g = poly_gcd(p, &d).expect("p nonzero");
    p.div_exact(&g).expect("gcd divides").monic()
}
