//! Buchberger's algorithm with Gebauer–Möller pair elimination.
//!
//! Two coefficient domains share one engine: plain rationals, and rational
//! functions in the parameter symbols (used by [`parametric_groebner_basis`]).
//! Basis elements are kept monic in both.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::poly::Exponents;
use super::{poly_gcd, AlgebraError, Poly, RatFunc, Rational, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    Lex,
    GrevLex,
}

/// A monomial order over an explicit variable precedence (first = largest).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermOrder {
    pub kind: OrderKind,
    pub vars: Vec<Symbol>,
}

impl TermOrder {
    pub fn lex(vars: &[Symbol]) -> Self {
        TermOrder { kind: OrderKind::Lex, vars: vars.to_vec() }
    }

    pub fn grevlex(vars: &[Symbol]) -> Self {
        TermOrder { kind: OrderKind::GrevLex, vars: vars.to_vec() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Mono {
    deg: u32,
    exps: Box<[u16]>,
}

impl Mono {
    fn new(exps: Box<[u16]>) -> Self {
        let deg = exps.iter().map(|&e| e as u32).sum();
        Mono { deg, exps }
    }

    fn divides(&self, other: &Mono) -> bool {
        self.deg <= other.deg && self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    fn lcm(&self, other: &Mono) -> Mono {
        Mono::new(self.exps.iter().zip(other.exps.iter()).map(|(a, b)| *a.max(b)).collect())
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono::new(self.exps.iter().zip(other.exps.iter()).map(|(a, b)| a + b).collect())
    }

    /// `self / other`, assuming `other` divides `self`.
    fn div(&self, other: &Mono) -> Mono {
        Mono::new(self.exps.iter().zip(other.exps.iter()).map(|(a, b)| a - b).collect())
    }

    fn coprime(&self, other: &Mono) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }

    fn is_one(&self) -> bool {
        self.deg == 0
    }
}

pub(crate) fn cmp_mono(kind: OrderKind, a: &Mono, b: &Mono) -> Ordering {
    match kind {
        OrderKind::Lex => a.exps.cmp(&b.exps),
        OrderKind::GrevLex => a.deg.cmp(&b.deg).then_with(|| {
            for (x, y) in a.exps.iter().zip(b.exps.iter()).rev() {
                if x != y {
                    return y.cmp(x);
                }
            }
            Ordering::Equal
        }),
    }
}

pub(crate) trait Domain {
    type C: Clone + std::fmt::Debug;
    fn is_zero(&self, c: &Self::C) -> bool;
    fn add(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn mul(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn neg(&self, a: &Self::C) -> Self::C;
    fn is_one(&self, a: &Self::C) -> bool;
    /// Returns `(u, v)` with `u * a == v * b`, keeping `u` as small as possible.
    fn cofactors(&self, a: &Self::C, b: &Self::C) -> (Self::C, Self::C);
    /// Rescales a nonzero polynomial to a canonical representative.
    fn normalize(&self, p: &mut EPoly<Self::C>);
}

pub(crate) type EPoly<C> = Vec<(Mono, C)>;

pub(crate) struct Field;

impl Domain for Field {
    type C = Rational;
    fn is_zero(&self, c: &Rational) -> bool {
        c.is_zero()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn is_one(&self, a: &Rational) -> bool {
        a.is_one()
    }
    fn cofactors(&self, a: &Rational, b: &Rational) -> (Rational, Rational) {
        (Rational::one(), a / b)
    }
    fn normalize(&self, p: &mut EPoly<Rational>) {
        if let Some(lc) = p.first().map(|t| t.1.clone()) {
            if !lc.is_one() {
                let inv = lc.recip();
                for t in p.iter_mut() {
                    t.1 *= &inv;
                }
            }
        }
    }
}

/// Coefficients are rational functions in the parameter symbols.
pub(crate) struct FracDomain;

impl Domain for FracDomain {
    type C = RatFunc;
    fn is_zero(&self, c: &RatFunc) -> bool {
        c.is_zero()
    }
    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a.add(b)
    }
    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a.mul(b)
    }
    fn neg(&self, a: &RatFunc) -> RatFunc {
        a.neg()
    }
    fn is_one(&self, a: &RatFunc) -> bool {
        a.den().is_one() && a.num().is_one()
    }
    fn cofactors(&self, a: &RatFunc, b: &RatFunc) -> (RatFunc, RatFunc) {
        (RatFunc::from_poly(Poly::one()), a.div(b).expect("nonzero"))
    }
    fn normalize(&self, p: &mut EPoly<RatFunc>) {
        if let Some(lc) = p.first().map(|t| t.1.clone()) {
            if !self.is_one(&lc) {
                for t in p.iter_mut() {
                    t.1 = t.1.div(&lc).expect("nonzero");
                }
            }
        }
    }
}

struct Ctx<'a, D: Domain> {
    dom: &'a D,
    kind: OrderKind,
    deadline: Option<Instant>,
}

impl<D: Domain> Ctx<'_, D> {
    fn check_deadline(&self) -> Result<(), AlgebraError> {
        super::budget::checkpoint();
        match self.deadline {
            Some(d) if Instant::now() > d => Err(AlgebraError::Timeout),
            _ => Ok(()),
        }
    }

    /// `u*f*mf - v*g*mg`, with the monomial multipliers applied termwise.
    fn combine(&self, u: &D::C, mf: &Mono, f: &[(Mono, D::C)], v: &D::C, mg: &Mono, g: &[(Mono, D::C)]) -> EPoly<D::C> {
        let dom = self.dom;
        let mut out = Vec::with_capacity(f.len() + g.len());
        let mut i = 0;
        let mut j = 0;
        let u_one = dom.is_one(u);
        let fm = |k: usize| f[k].0.mul(mf);
        let gm = |k: usize| g[k].0.mul(mg);
        let mut fi = if i < f.len() { Some(fm(i)) } else { None };
        let mut gj = if j < g.len() { Some(gm(j)) } else { None };
        loop {
            match (&fi, &gj) {
                (None, None) => break,
                (Some(a), None) => {
                    let c = if u_one { f[i].1.clone() } else { dom.mul(u, &f[i].1) };
                    out.push((a.clone(), c));
                    i += 1;
                    fi = if i < f.len() { Some(fm(i)) } else { None };
                }
                (None, Some(b)) => {
                    out.push((b.clone(), dom.neg(&dom.mul(v, &g[j].1))));
                    j += 1;
                    gj = if j < g.len() { Some(gm(j)) } else { None };
                }
                (Some(a), Some(b)) => match cmp_mono(self.kind, a, b) {
                    Ordering::Greater => {
                        let c = if u_one { f[i].1.clone() } else { dom.mul(u, &f[i].1) };
                        out.push((a.clone(), c));
                        i += 1;
                        fi = if i < f.len() { Some(fm(i)) } else { None };
                    }
                    Ordering::Less => {
                        out.push((b.clone(), dom.neg(&dom.mul(v, &g[j].1))));
                        j += 1;
                        gj = if j < g.len() { Some(gm(j)) } else { None };
                    }
                    Ordering::Equal => {
                        let cf = if u_one { f[i].1.clone() } else { dom.mul(u, &f[i].1) };
                        let c = dom.add(&cf, &dom.neg(&dom.mul(v, &g[j].1)));
                        if !dom.is_zero(&c) {
                            out.push((a.clone(), c));
                        }
                        i += 1;
                        j += 1;
                        fi = if i < f.len() { Some(fm(i)) } else { None };
                        gj = if j < g.len() { Some(gm(j)) } else { None };
                    }
                },
            }
        }
        out
    }

    /// Full reduction of `h` modulo `basis`.
    fn reduce(&self, h: EPoly<D::C>, basis: &[&EPoly<D::C>]) -> Result<EPoly<D::C>, AlgebraError> {
        self.reduce_with(h, basis, true)
    }

    fn reduce_with(&self, mut h: EPoly<D::C>, basis: &[&EPoly<D::C>], normalize: bool) -> Result<EPoly<D::C>, AlgebraError> {
        let dom = self.dom;
        let mut rem: EPoly<D::C> = Vec::new();
        while let Some((lm, lc)) = h.first().cloned() {
            self.check_deadline()?;
            let reducer = basis.iter().find(|g| g[0].0.divides(&lm));
            match reducer {
                Some(g) => {
                    let (u, v) = dom.cofactors(&lc, &g[0].1);
                    let m = lm.div(&g[0].0);
                    let one = Mono::new(vec![0; lm.exps.len()].into_boxed_slice());
                    h = self.combine(&u, &one, &h, &v, &m, g);
                    if !dom.is_one(&u) {
                        for t in rem.iter_mut() {
                            t.1 = dom.mul(&u, &t.1);
                        }
                    }
                }
                None => {
                    rem.push(h.remove(0));
                }
            }
        }
        if normalize && !rem.is_empty() {
            dom.normalize(&mut rem);
        }
        Ok(rem)
    }

    fn same(&self, a: &EPoly<D::C>, b: &EPoly<D::C>) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.0 == y.0 && self.dom.is_zero(&self.dom.add(&x.1, &self.dom.neg(&y.1))))
    }

    fn s_poly(&self, f: &EPoly<D::C>, g: &EPoly<D::C>) -> EPoly<D::C> {
        let l = f[0].0.lcm(&g[0].0);
        let (u, v) = self.dom.cofactors(&g[0].1, &f[0].1);
        // u * lc(g) == v * lc(f); so v*f*(l/lmf) - u*g*(l/lmg) cancels the lead.
        self.combine(&v, &l.div(&f[0].0), f, &u, &l.div(&g[0].0), g)
    }

    fn buchberger(&self, input: Vec<EPoly<D::C>>) -> Result<Vec<EPoly<D::C>>, AlgebraError> {
        let mut polys: Vec<EPoly<D::C>> = Vec::new();
        let mut active: Vec<bool> = Vec::new();
        let mut pairs: Vec<(usize, usize, Mono)> = Vec::new();

        let mut seed: Vec<EPoly<D::C>> = Vec::new();
        for mut p in input {
            if p.is_empty() {
                continue;
            }
            self.dom.normalize(&mut p);
            seed.push(p);
        }
        // Reduce each input by its predecessors until nothing changes.
        loop {
            let mut next: Vec<EPoly<D::C>> = Vec::with_capacity(seed.len());
            for p in &seed {
                let refs: Vec<&EPoly<D::C>> = next.iter().collect();
                let h = self.reduce(p.clone(), &refs)?;
                if !h.is_empty() {
                    next.push(h);
                }
            }
            let stable = next.len() == seed.len() && next.iter().zip(&seed).all(|(a, b)| self.same(a, b));
            seed = next;
            if stable {
                break;
            }
        }
        if seed.iter().any(|p| p[0].0.is_one()) {
            let one = seed.into_iter().find(|p| p[0].0.is_one()).expect("checked");
            return Ok(vec![one]);
        }
        seed.sort_by(|a, b| cmp_mono(self.kind, &a[0].0, &b[0].0));
        for p in seed {
            self.update(&mut polys, &mut active, &mut pairs, p);
        }

        while !pairs.is_empty() {
            self.check_deadline()?;
            // Normal selection strategy: smallest lcm first, ties by index.
            let mut best = 0;
            for k in 1..pairs.len() {
                let ord = cmp_mono(self.kind, &pairs[k].2, &pairs[best].2);
                if ord == Ordering::Less || (ord == Ordering::Equal && (pairs[k].0, pairs[k].1) < (pairs[best].0, pairs[best].1)) {
                    best = k;
                }
            }
            let (i, j, _) = pairs.swap_remove(best);
            let s = self.s_poly(&polys[i], &polys[j]);
            let mut refs: Vec<&EPoly<D::C>> = polys.iter().zip(&active).filter(|(_, a)| **a).map(|(p, _)| p).collect();
            refs.sort_by(|a, b| cmp_mono(self.kind, &a[0].0, &b[0].0));
            let h = self.reduce(s, &refs)?;
            if h.is_empty() {
                continue;
            }
            if h[0].0.is_one() {
                return Ok(vec![h]);
            }
            self.update(&mut polys, &mut active, &mut pairs, h);
        }

        let mut basis: Vec<EPoly<D::C>> = polys.into_iter().zip(active).filter(|(_, a)| *a).map(|(p, _)| p).collect();
        // Minimalize, then interreduce tails.
        let mut keep = vec![true; basis.len()];
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if i != j && keep[j] && basis[j][0].0.divides(&basis[i][0].0) && (basis[j][0].0 != basis[i][0].0 || j < i) {
                    keep[i] = false;
                    break;
                }
            }
        }
        basis = basis.into_iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p).collect();
        let mut reduced = Vec::with_capacity(basis.len());
        for i in 0..basis.len() {
            let others: Vec<&EPoly<D::C>> = basis.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p).collect();
            reduced.push(self.reduce_tail_only(&basis[i], &others)?);
        }
        reduced.sort_by(|a, b| cmp_mono(self.kind, &b[0].0, &a[0].0));
        Ok(reduced)
    }

    /// Reduces every non-leading term of `p` modulo `others`, keeping the
    /// leading monomial fixed.
    fn reduce_tail_only(&self, p: &EPoly<D::C>, others: &[&EPoly<D::C>]) -> Result<EPoly<D::C>, AlgebraError> {
        let dom = self.dom;
        let mut head = vec![p[0].clone()];
        let mut h: EPoly<D::C> = p[1..].to_vec();
        let mut rem: EPoly<D::C> = Vec::new();
        while let Some((lm, lc)) = h.first().cloned() {
            self.check_deadline()?;
            match others.iter().find(|g| g[0].0.divides(&lm)) {
                Some(g) => {
                    let (u, v) = dom.cofactors(&lc, &g[0].1);
                    let m = lm.div(&g[0].0);
                    let one = Mono::new(vec![0; lm.exps.len()].into_boxed_slice());
                    h = self.combine(&u, &one, &h, &v, &m, g);
                    if !dom.is_one(&u) {
                        for t in rem.iter_mut().chain(head.iter_mut()) {
                            t.1 = dom.mul(&u, &t.1);
                        }
                    }
                }
                None => rem.push(h.remove(0)),
            }
        }
        head.extend(rem);
        dom.normalize(&mut head);
        Ok(head)
    }

    /// Gebauer–Möller update with new element `h`.
    fn update(&self, polys: &mut Vec<EPoly<D::C>>, active: &mut Vec<bool>, pairs: &mut Vec<(usize, usize, Mono)>, h: EPoly<D::C>) {
        let hi = polys.len();
        let lh = h[0].0.clone();
        // Candidate pairs with the new element.
        let cands: Vec<(usize, Mono, bool)> = (0..hi)
            .filter(|&g| active[g])
            .map(|g| {
                let lg = &polys[g][0].0;
                (g, lh.lcm(lg), lh.coprime(lg))
            })
            .collect();
        // Criterion M / F: drop a candidate whose lcm is a proper multiple of
        // another candidate's lcm (or equal, keeping the first, preferring coprime).
        let mut kept: Vec<bool> = vec![true; cands.len()];
        for a in 0..cands.len() {
            for b in 0..cands.len() {
                if a == b || !kept[b] {
                    continue;
                }
                let (la, lb) = (&cands[a].1, &cands[b].1);
                if lb.divides(la) {
                    if lb != la {
                        kept[a] = false;
                        break;
                    }
                    // Equal lcms: keep one, favouring a coprime representative.
                    let prefer_b = (cands[b].2 && !cands[a].2) || (cands[b].2 == cands[a].2 && b < a);
                    if prefer_b {
                        kept[a] = false;
                        break;
                    }
                }
            }
        }
        // Criterion B on old pairs.
        pairs.retain(|(i, j, l)| {
            if !lh.divides(l) {
                return true;
            }
            let li = polys[*i][0].0.lcm(&lh);
            let lj = polys[*j][0].0.lcm(&lh);
            li == *l || lj == *l
        });
        // Product criterion: coprime leading monomials need no pair.
        for (k, (g, l, coprime)) in cands.into_iter().enumerate() {
            if kept[k] && !coprime {
                pairs.push((g, hi, l));
            }
        }
        for g in 0..hi {
            if active[g] && lh.divides(&polys[g][0].0) {
                active[g] = false;
            }
        }
        polys.push(h);
        active.push(true);
    }
}

fn check_vars(p: &Poly, allowed: &[Symbol]) -> Result<(), AlgebraError> {
    for s in p.symbols() {
        if !allowed.contains(&s) {
            return Err(AlgebraError::InvalidInput(format!("symbol {s} is not in the term order")));
        }
    }
    Ok(())
}

fn sort_epoly<C>(kind: OrderKind, p: &mut EPoly<C>) {
    p.sort_by(|a, b| cmp_mono(kind, &b.0, &a.0));
}

fn to_field_epoly(p: &Poly, order: &TermOrder) -> Result<EPoly<Rational>, AlgebraError> {
    check_vars(p, &order.vars)?;
    let vars: Arc<[Symbol]> = Arc::from(order.vars.clone());
    let q = p.remap(&vars).expect("checked");
    let mut out: EPoly<Rational> = q
        .term_map()
        .iter()
        .map(|(e, c)| (Mono::new(e.iter().map(|&x| x as u16).collect()), c.clone()))
        .collect();
    sort_epoly(order.kind, &mut out);
    Ok(out)
}

fn from_field_epoly(p: &EPoly<Rational>, order: &TermOrder) -> Poly {
    let vars: Arc<[Symbol]> = Arc::from(order.vars.clone());
    let terms: BTreeMap<Exponents, Rational> = p
        .iter()
        .map(|(m, c)| (m.exps.iter().map(|&x| x as u32).collect::<Exponents>(), c.clone()))
        .collect();
    Poly::from_parts(vars, terms)
}

fn to_param_epoly(p: &Poly, order: &TermOrder) -> EPoly<RatFunc> {
    let mut groups: BTreeMap<Vec<u16>, Vec<(Vec<(Symbol, u32)>, Rational)>> = BTreeMap::new();
    for (mono, c) in p.sparse_terms() {
        let mut key = vec![0u16; order.vars.len()];
        let mut rest = Vec::new();
        for (s, e) in mono {
            match order.vars.iter().position(|v| *v == s) {
                Some(i) => key[i] = e as u16,
                None => rest.push((s, e)),
            }
        }
        groups.entry(key).or_default().push((rest, c.clone()));
    }
    let mut out: EPoly<RatFunc> = groups
        .into_iter()
        .map(|(k, terms)| (Mono::new(k.into_boxed_slice()), RatFunc::from_poly(Poly::from_sparse_terms(terms))))
        .filter(|(_, c)| !c.is_zero())
        .collect();
    sort_epoly(order.kind, &mut out);
    out
}

/// Clears denominators and strips the content in the parameters, leaving a
/// primitive polynomial whose leading coefficient has leading rational 1.
fn from_param_epoly(p: &EPoly<RatFunc>, order: &TermOrder) -> Poly {
    if p.is_empty() {
        return Poly::zero();
    }
    let mut lcm = Poly::one();
    for (_, c) in p {
        let g = poly_gcd(&lcm, c.den()).expect("nonzero");
        lcm = &lcm * &c.den().div_exact(&g).expect("gcd divides");
    }
    let coeffs: Vec<Poly> = p
        .iter()
        .map(|(_, c)| (c.num() * &lcm).div_exact(c.den()).expect("lcm is a multiple"))
        .collect();
    let mut content = Poly::zero();
    for c in &coeffs {
        content = if content.is_zero() { c.monic() } else { poly_gcd(&content, c).expect("nonzero") };
        if content.is_one() {
            break;
        }
    }
    let lead = coeffs[0].div_exact(&content).expect("content divides").leading_coefficient();
    let scale = lead.recip();
    let mut out = Poly::zero();
    for ((m, _), c) in p.iter().zip(coeffs) {
        let mut t = c.div_exact(&content).expect("content divides").scale(&scale);
        for (i, &e) in m.exps.iter().enumerate() {
            if e > 0 {
                t = &t * &Poly::monomial(&order.vars[i], e as u32);
            }
        }
        out = &out + &t;
    }
    // Present unknowns first so lex display follows the order.
    out.reorder(&order.vars)
}

/// Reduced Gröbner basis over the rationals. An empty input gives the empty
/// basis (zero ideal); an inconsistent system gives `[1]`.
pub fn groebner_basis(polys: &[Poly], order: &TermOrder) -> Result<Vec<Poly>, AlgebraError> {
    groebner_basis_until(polys, order, None)
}

pub fn groebner_basis_until(polys: &[Poly], order: &TermOrder, deadline: Option<Instant>) -> Result<Vec<Poly>, AlgebraError> {
    let input = polys.iter().map(|p| to_field_epoly(p, order)).collect::<Result<Vec<_>, _>>()?;
    let ctx = Ctx { dom: &Field, kind: order.kind, deadline };
    let basis = ctx.buchberger(input)?;
    Ok(basis.iter().map(|p| from_field_epoly(p, order)).collect())
}

/// Monic normal form of `p` modulo a basis (over the rationals).
pub fn reduce(p: &Poly, basis: &[Poly], order: &TermOrder) -> Result<Poly, AlgebraError> {
    let ctx = Ctx { dom: &Field, kind: order.kind, deadline: None };
    let b = basis.iter().map(|q| to_field_epoly(q, order)).collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&EPoly<Rational>> = b.iter().filter(|q| !q.is_empty()).collect();
    // The remainder comes back monic.
    let r = ctx.reduce(to_field_epoly(p, order)?, &refs)?;
    Ok(from_field_epoly(&r, order))
}

/// Remainder of `p` modulo a basis over the rationals, without rescaling.
pub fn normal_form(p: &Poly, basis: &[Poly], order: &TermOrder) -> Result<Poly, AlgebraError> {
    let ctx = Ctx { dom: &Field, kind: order.kind, deadline: None };
    let b = basis.iter().map(|q| to_field_epoly(q, order)).collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&EPoly<Rational>> = b.iter().filter(|q| !q.is_empty()).collect();
    let r = ctx.reduce_with(to_field_epoly(p, order)?, &refs, false)?;
    Ok(from_field_epoly(&r, order))
}

/// Gröbner basis over the field of rational functions in every symbol not
/// listed in `order.vars`. Elements are returned as primitive polynomials.
pub fn parametric_groebner_basis(polys: &[Poly], order: &TermOrder, deadline: Option<Instant>) -> Result<Vec<Poly>, AlgebraError> {
    let input: Vec<EPoly<RatFunc>> = polys.iter().map(|p| to_param_epoly(p, order)).collect();
    let ctx = Ctx { dom: &FracDomain, kind: order.kind, deadline };
    let basis = ctx.buchberger(input)?;
    Ok(basis.iter().map(|p| from_param_epoly(p, order)).collect())
}

/// Fraction-free normal form over the parameter field; zero iff `p` lies in
/// the ideal generated by `basis` after extending scalars.
pub fn parametric_reduce(p: &Poly, basis: &[Poly], order: &TermOrder) -> Result<Poly, AlgebraError> {
    let ctx = Ctx { dom: &FracDomain, kind: order.kind, deadline: None };
    let b: Vec<EPoly<RatFunc>> = basis.iter().map(|q| to_param_epoly(q, order)).collect();
    let refs: Vec<&EPoly<RatFunc>> = b.iter().filter(|q| !q.is_empty()).collect();
    let r = ctx.reduce(to_param_epoly(p, order), &refs)?;
    Ok(from_param_epoly(&r, order))
}

/// Exponent vectors (over `order.vars`) of each basis element's leading monomial.
pub fn leading_monomials(basis: &[Poly], order: &TermOrder) -> Vec<Vec<u32>> {
    basis
        .iter()
        .filter(|p| !p.is_zero())
        .map(|p| {
            let e = to_param_epoly(p, order);
            e[0].0.exps.iter().map(|&x| x as u32).collect()
        })
        .collect()
}

/// True when the basis is `{c}` for a nonzero constant (over the parameter
/// field when extra symbols are present).
pub fn is_unit_ideal(basis: &[Poly], order: &TermOrder) -> bool {
    leading_monomials(basis, order).iter().any(|e| e.iter().all(|&x| x == 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, sym};
    use proptest::prelude::*;

    fn p(s: &str) -> Poly {
        parse_poly(s).unwrap()
    }

    fn xy() -> Vec<Symbol> {
        vec![sym("x"), sym("y")]
    }

    #[test]
    fn linear_triangular_system() {
        let gb = groebner_basis(&[p("x - 1"), p("y - x")], &TermOrder::lex(&xy())).unwrap();
        assert_eq!(gb, vec![p("x - 1"), p("y - 1")]);
    }

    #[test]
    fn already_reduced() {
        let gb = groebner_basis(&[p("x^2 - 1")], &TermOrder::lex(&xy())).unwrap();
        assert_eq!(gb, vec![p("x^2 - 1")]);
    }

    #[test]
    fn circle_and_line() {
        // By hand: x = y, so 2y^2 - 1 = 0 is the eliminant.
        let gb = groebner_basis(&[p("x^2 + y^2 - 1"), p("x - y")], &TermOrder::lex(&xy())).unwrap();
        assert_eq!(gb, vec![p("x - y"), p("y^2 - 1/2")]);
        let univariate = gb.iter().find(|q| !q.contains_symbol(&sym("x"))).unwrap();
        assert_eq!(univariate.scale(&crate::algebra::rat(2)), p("2*y^2 - 1"));
    }

    #[test]
    fn empty_and_inconsistent() {
        assert!(groebner_basis(&[], &TermOrder::lex(&xy())).unwrap().is_empty());
        let gb = groebner_basis(&[p("x - 1"), p("x - 2")], &TermOrder::grevlex(&xy())).unwrap();
        assert_eq!(gb, vec![Poly::one()]);
        assert!(is_unit_ideal(&gb, &TermOrder::grevlex(&xy())));
    }

    #[test]
    fn unknown_symbol_is_rejected() {
        assert!(groebner_basis(&[p("x - z")], &TermOrder::lex(&xy())).is_err());
    }

    #[test]
    fn parametric_basis_over_rational_functions() {
        let order = TermOrder::lex(&[sym("K"), sym("C"), sym("X")]);
        let gb = parametric_groebner_basis(&[p("K - k"), p("C*X - c*x")], &order, None).unwrap();
        assert_eq!(gb, vec![p("K - k"), p("C*X - c*x")]);
        // k*K - k^2 is a member, C - c is not.
        assert!(parametric_reduce(&p("k*K - k^2"), &gb, &order).unwrap().is_zero());
        assert!(!parametric_reduce(&p("C - c"), &gb, &order).unwrap().is_zero());
        // A relation only valid over the fraction field: c*C - ... with division by parameters.
        let gb2 = parametric_groebner_basis(&[p("c*C - 1")], &order, None).unwrap();
        assert!(parametric_reduce(&p("C*c^2 - c"), &gb2, &order).unwrap().is_zero());
    }

    #[test]
    fn deadline_in_the_past_times_out() {
        let order = TermOrder::grevlex(&[sym("x"), sym("y"), sym("z")]);
        let sys = [p("x^3 - y*z - 1"), p("y^3 - x*z - 2"), p("z^3 - x*y - 3")];
        let r = groebner_basis_until(&sys, &order, Some(Instant::now() - std::time::Duration::from_secs(1)));
        assert_eq!(r, Err(AlgebraError::Timeout));
    }

    fn small_system() -> impl Strategy<Value = Vec<Poly>> {
        let term = (-3i64..=3, 0u32..=2, 0u32..=2, 0u32..=1);
        let poly = prop::collection::vec(term, 1..4).prop_map(|ts| {
            Poly::from_sparse_terms(ts.into_iter().map(|(c, a, b, d)| {
                (vec![(sym("x"), a), (sym("y"), b), (sym("z"), d)], crate::algebra::rat(c))
            }))
        });
        prop::collection::vec(poly, 1..4)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn inputs_and_s_polynomials_reduce_to_zero(sys in small_system(), lex in any::<bool>()) {
            let vars = vec![sym("x"), sym("y"), sym("z")];
            let order = if lex { TermOrder::lex(&vars) } else { TermOrder::grevlex(&vars) };
            let gb = groebner_basis(&sys, &order).unwrap();
            for f in &sys {
                prop_assert!(reduce(f, &gb, &order).unwrap().is_zero());
            }
            let ctx = Ctx { dom: &Field, kind: order.kind, deadline: None };
            let e: Vec<EPoly<Rational>> = gb.iter().map(|q| to_field_epoly(q, &order).unwrap()).collect();
            let refs: Vec<&EPoly<Rational>> = e.iter().collect();
            for i in 0..e.len() {
                for j in (i + 1)..e.len() {
                    let s = ctx.s_poly(&e[i], &e[j]);
                    prop_assert!(ctx.reduce(s, &refs).unwrap().is_empty());
                }
            }
        }
    }
}
