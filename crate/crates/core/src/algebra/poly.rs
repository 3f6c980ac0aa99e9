//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! A [`Poly`] carries its own ordered variable list; exponent vectors are
//! indexed by position in that list. Binary operations on polynomials with
//! different variable lists first merge the lists (left operand's order wins).
//! The variable order doubles as the lexicographic order used for "leading"
//! terms and for normalizing GCDs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Symbol;

pub type Rational = BigRational;
pub(crate) type Exponents = Box<[u32]>;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone)]
pub struct Poly {
    vars: Arc<[Symbol]>,
    terms: BTreeMap<Exponents, Rational>,
}

fn empty_vars() -> Arc<[Symbol]> {
    Arc::from(Vec::<Symbol>::new())
}

pub(crate) fn zero_exps(n: usize) -> Exponents {
    vec![0; n].into_boxed_slice()
}

/// Merges two variable lists, keeping `a`'s order and appending unseen names of `b`.
pub(crate) fn merge_vars(a: &Arc<[Symbol]>, b: &Arc<[Symbol]>) -> Arc<[Symbol]> {
    if Arc::ptr_eq(a, b) || a[..] == b[..] {
        return a.clone();
    }
    if b.iter().all(|v| a.contains(v)) {
        return a.clone();
    }
    let mut out: Vec<Symbol> = a.to_vec();
    for v in b.iter() {
        if !out.contains(v) {
            out.push(v.clone());
        }
    }
    Arc::from(out)
}

impl Poly {
    pub fn zero() -> Self {
        Poly { vars: empty_vars(), terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(zero_exps(0), c);
        }
        Poly { vars: empty_vars(), terms }
    }

    pub fn from_int(n: i64) -> Self {
        Poly::constant(rat(n))
    }

    pub fn var(s: &Symbol) -> Self {
        Poly::monomial(s, 1)
    }

    /// `s^e` with unit coefficient.
    pub fn monomial(s: &Symbol, e: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![e].into_boxed_slice(), Rational::one());
        Poly { vars: Arc::from(vec![s.clone()]), terms }
    }

    /// Builds a polynomial from sparse `(symbol, exponent)` terms.
    pub fn from_sparse_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<(Symbol, u32)>, Rational)>,
    {
        let mut out = Poly::zero();
        for (mono, c) in terms {
            let mut t = Poly::constant(c);
            for (s, e) in mono {
                t = &t * &Poly::monomial(&s, e);
            }
            out = &out + &t;
        }
        out
    }

    pub(crate) fn from_parts(vars: Arc<[Symbol]>, terms: BTreeMap<Exponents, Rational>) -> Self {
        debug_assert!(terms.keys().all(|k| k.len() == vars.len()));
        debug_assert!(terms.values().all(|c| !c.is_zero()));
        Poly { vars, terms }
    }

    pub fn vars(&self) -> &[Symbol] {
        &self.vars
    }

    pub(crate) fn vars_arc(&self) -> &Arc<[Symbol]> {
        &self.vars
    }

    pub(crate) fn term_map(&self) -> &BTreeMap<Exponents, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// True for the zero polynomial and nonzero constants.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if !self.is_constant() {
            return None;
        }
        Some(self.terms.values().next().cloned().unwrap_or_else(Rational::zero))
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    fn var_index(&self, s: &Symbol) -> Option<usize> {
        self.vars.iter().position(|v| v == s)
    }

    /// Symbols that actually occur, in variable-list order.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut used = vec![false; self.vars.len()];
        for e in self.terms.keys() {
            for (i, &x) in e.iter().enumerate() {
                if x > 0 {
                    used[i] = true;
                }
            }
        }
        self.vars
            .iter()
            .zip(used)
            .filter(|&(_v, u)| u).map(|(v, _u)| v.clone())
            .collect()
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        match self.var_index(s) {
            Some(i) => self.terms.keys().any(|e| e[i] > 0),
            None => false,
        }
    }

    /// Iterates `(sparse monomial, coefficient)` pairs in ascending lex order.
    pub fn sparse_terms(&self) -> impl Iterator<Item = (Vec<(Symbol, u32)>, &Rational)> + '_ {
        self.terms.iter().map(move |(e, c)| {
            let mono = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| (self.vars[i].clone(), x))
                .collect();
            (mono, c)
        })
    }

    /// Re-expresses the polynomial over `vars`, which must contain every used symbol.
    pub(crate) fn remap(&self, vars: &Arc<[Symbol]>) -> Option<Poly> {
        if Arc::ptr_eq(&self.vars, vars) || self.vars[..] == vars[..] {
            return Some(Poly { vars: vars.clone(), terms: self.terms.clone() });
        }
        let mut index = Vec::with_capacity(self.vars.len());
        for v in self.vars.iter() {
            index.push(vars.iter().position(|w| w == v));
        }
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut ne = zero_exps(vars.len());
            for (i, &x) in e.iter().enumerate() {
                if x > 0 {
                    ne[index[i]?] = x;
                }
            }
            terms.insert(ne, c.clone());
        }
        Some(Poly { vars: vars.clone(), terms })
    }

    /// Reorders the variable list so that `order` comes first; other used
    /// symbols follow in their current order. Unused variables are dropped.
    pub fn reorder(&self, order: &[Symbol]) -> Poly {
        let used = self.symbols();
        let mut vars: Vec<Symbol> = order.to_vec();
        for u in used {
            if !vars.contains(&u) {
                vars.push(u);
            }
        }
        self.remap(&Arc::from(vars)).expect("all used symbols present")
    }

    fn aligned(&self, other: &Poly) -> (Poly, Poly) {
        let vars = merge_vars(&self.vars, &other.vars);
        (
            self.remap(&vars).expect("merged vars"),
            other.remap(&vars).expect("merged vars"),
        )
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    fn add_scaled(&self, other: &Poly, sign: bool) -> Poly {
        let (mut a, b) = self.aligned(other);
        for (e, c) in b.terms {
            let c = if sign { c } else { -c };
            match a.terms.get_mut(&e) {
                Some(x) => {
                    *x += c;
                    if x.is_zero() {
                        a.terms.remove(&e);
                    }
                }
                None => {
                    a.terms.insert(e, c);
                }
            }
        }
        a
    }

    /// Total size of the coefficients in 64-bit words, at least one per term.
    pub fn word_size(&self) -> u64 {
        self.terms.values().map(|c| (c.numer().bits() + c.denom().bits()) / 64 + 1).sum()
    }

    fn mul_poly(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let (a, b) = self.aligned(other);
        let n = a.vars.len();
        let mut terms: BTreeMap<Exponents, Rational> = BTreeMap::new();
        let words = |c: &Rational| (c.numer().bits() + c.denom().bits()) / 64 + 1;
        let b_words = b.terms.values().map(words).max().unwrap_or(1);
        for (ea, ca) in &a.terms {
            super::budget::charge(b.terms.len() as u64 * (words(ca) + b_words));
            for (eb, cb) in &b.terms {
                let mut e = zero_exps(n);
                for i in 0..n {
                    e[i] = ea[i] + eb[i];
                }
                let c = ca * cb;
                match terms.get_mut(&e) {
                    Some(x) => {
                        *x += c;
                        if x.is_zero() {
                            terms.remove(&e);
                        }
                    }
                    None => {
                        terms.insert(e, c);
                    }
                }
            }
        }
        Poly { vars: a.vars, terms }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn degree_in(&self, s: &Symbol) -> u32 {
        match self.var_index(s) {
            Some(i) => self.terms.keys().map(|e| e[i]).max().unwrap_or(0),
            None => 0,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Coefficients with respect to `s`: entry `i` multiplies `s^i`.
    pub fn coefficients_in(&self, s: &Symbol) -> Vec<Poly> {
        let Some(idx) = self.var_index(s) else {
            return vec![self.clone()];
        };
        let deg = self.degree_in(s) as usize;
        let mut parts: Vec<BTreeMap<Exponents, Rational>> = vec![BTreeMap::new(); deg + 1];
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let p = ne[idx] as usize;
            ne[idx] = 0;
            parts[p].insert(ne, c.clone());
        }
        parts
            .into_iter()
            .map(|terms| Poly { vars: self.vars.clone(), terms })
            .collect()
    }

    pub fn leading_coefficient_in(&self, s: &Symbol) -> Poly {
        self.coefficients_in(s).pop().unwrap_or_else(Poly::zero)
    }

    /// Inverse of [`Poly::coefficients_in`].
    pub fn from_coefficients_in(s: &Symbol, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                out = &out + &(c * &Poly::monomial(s, i as u32));
            }
        }
        out
    }

    /// Lex-leading term with respect to the variable list.
    pub fn leading_coefficient(&self) -> Rational {
        self.terms.values().next_back().cloned().unwrap_or_else(Rational::zero)
    }

    pub(crate) fn leading_exponents(&self) -> Option<&[u32]> {
        self.terms.keys().next_back().map(|e| &e[..])
    }

    /// Divides by the lex-leading coefficient; zero stays zero.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let lc = self.leading_coefficient();
        self.scale(&lc.recip())
    }

    /// Substitutes rational values for some symbols; the rest stay symbolic.
    pub fn evaluate(&self, values: &BTreeMap<Symbol, Rational>) -> Poly {
        let subs: Vec<Option<&Rational>> = self.vars.iter().map(|v| values.get(v)).collect();
        if subs.iter().all(Option::is_none) {
            return self.clone();
        }
        let mut terms: BTreeMap<Exponents, Rational> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut c = c.clone();
            let mut ne = e.clone();
            for (i, s) in subs.iter().enumerate() {
                if let Some(v) = s {
                    if ne[i] > 0 {
                        c *= num_traits::pow(v.to_owned().clone(), ne[i] as usize);
                        ne[i] = 0;
                    }
                }
            }
            if c.is_zero() {
                continue;
            }
            let entry = terms.entry(ne).or_insert_with(Rational::zero);
            *entry += c;
        }
        terms.retain(|_, c| !c.is_zero());
        Poly { vars: self.vars.clone(), terms }
    }

    /// Full evaluation; `None` if some occurring symbol has no value.
    pub fn eval_rational(&self, values: &BTreeMap<Symbol, Rational>) -> Option<Rational> {
        self.evaluate(values).constant_value()
    }

    /// Simultaneous substitution of polynomials for symbols.
    pub fn substitute(&self, values: &BTreeMap<Symbol, Poly>) -> Poly {
        let mut out = Poly::zero();
        // Cache powers per variable.
        let mut powers: Vec<Vec<Poly>> = vec![Vec::new(); self.vars.len()];
        for (e, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for (i, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let factor = match values.get(&self.vars[i]) {
                    Some(p) => {
                        let cache = &mut powers[i];
                        if cache.is_empty() {
                            cache.push(Poly::one());
                        }
                        while cache.len() <= x as usize {
                            let next = &cache[cache.len() - 1] * p;
                            cache.push(next);
                        }
                        cache[x as usize].clone()
                    }
                    None => Poly::monomial(&self.vars[i], x),
                };
                t = &t * &factor;
            }
            out = &out + &t;
        }
        out
    }

    pub fn rename(&self, map: &BTreeMap<Symbol, Symbol>) -> Poly {
        let vars: Vec<Symbol> = self
            .vars
            .iter()
            .map(|v| map.get(v).cloned().unwrap_or_else(|| v.clone()))
            .collect();
        let distinct: BTreeSet<&Symbol> = vars.iter().collect();
        if distinct.len() == vars.len() {
            return Poly { vars: Arc::from(vars), terms: self.terms.clone() };
        }
        let subs = map.iter().map(|(k, v)| (k.clone(), Poly::var(v))).collect();
        self.substitute(&subs)
    }

    pub fn derivative(&self, s: &Symbol) -> Poly {
        let Some(idx) = self.var_index(s) else {
            return Poly::zero();
        };
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[idx] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[idx] -= 1;
            terms.insert(ne, c * rat(e[idx] as i64));
        }
        Poly { vars: self.vars.clone(), terms }
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = divisor.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (mut rem, b) = self.aligned(divisor);
        let n = rem.vars.len();
        let (lb_e, lb_c) = b.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone()))?;
        let mut quot: BTreeMap<Exponents, Rational> = BTreeMap::new();
        while let Some((le, lc)) = rem.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            super::budget::checkpoint();
            let mut qe = zero_exps(n);
            for i in 0..n {
                if le[i] < lb_e[i] {
                    return None;
                }
                qe[i] = le[i] - lb_e[i];
            }
            let qc = &lc / &lb_c;
            let t = Poly { vars: rem.vars.clone(), terms: BTreeMap::from([(qe.clone(), qc.clone())]) };
            rem = rem.add_scaled(&(&t * &b), false);
            quot.insert(qe, qc);
        }
        Some(Poly { vars: rem.vars, terms: quot })
    }

    /// Exact square root over the rationals, if one exists.
    pub fn sqrt_exact(&self) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let n = self.vars.len();
        let (le, lc) = self.terms.iter().next_back()?;
        if lc.is_negative() {
            return None;
        }
        let root_c = rational_sqrt(lc)?;
        let mut root_e = zero_exps(n);
        for i in 0..n {
            if le[i] % 2 == 1 {
                return None;
            }
            root_e[i] = le[i] / 2;
        }
        let mut root = Poly { vars: self.vars.clone(), terms: BTreeMap::from([(root_e.clone(), root_c.clone())]) };
        let two_lead = Poly { vars: self.vars.clone(), terms: BTreeMap::from([(root_e, root_c * rat(2))]) };
        // Each new root term has a monomial whose square lies among the
        // monomials of `self`'s Newton range, so the term count is bounded.
        let limit = self.terms.len() * 4 + 8;
        for _ in 0..limit {
            let rem = self - &(&root * &root);
            if rem.is_zero() {
                return Some(root);
            }
            let lead = Poly {
                vars: rem.vars.clone(),
                terms: rem.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone())).into_iter().collect(),
            };
            let t = lead.div_exact(&two_lead)?;
            let t_e = t.leading_exponents()?.to_vec();
            if root.terms.keys().next().is_some_and(|low| t_e.as_slice() >= &low[..]) {
                return None;
            }
            root = &root + &t;
        }
        None
    }

    /// Least common multiple of coefficient denominators, times the gcd-free
    /// numerator content sign, turned into a primitive integer polynomial.
    pub fn integer_primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        use num_integer::Integer;
        let mut den = BigInt::one();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            let v = (c * Rational::from_integer(den.clone())).to_integer();
            g = g.gcd(&v);
        }
        let mut factor = Rational::new(den, g);
        if self.leading_coefficient().is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    /// Renders terms ordered per `order`: graded, then lexicographic by the
    /// given symbols (remaining symbols follow in their current order).
    pub fn to_string_ordered(&self, order: &[Symbol]) -> String {
        self.reorder(order).to_string()
    }
}

fn rational_sqrt(c: &Rational) -> Option<Rational> {
    let n = c.numer().sqrt();
    let d = c.denom().sqrt();
    if &(&n * &n) == c.numer() && &(&d * &d) == c.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        if self.terms.len() != other.terms.len() {
            return false;
        }
        if self.vars[..] == other.vars[..] {
            return self.terms == other.terms;
        }
        let (a, b) = self.aligned(other);
        a.terms == b.terms
    }
}

impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // Graded order: higher total degree first, ties broken by lex.
        let mut ordered: Vec<(&Exponents, &Rational)> = self.terms.iter().collect();
        ordered.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (k, (e, c)) in ordered.into_iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else if negative {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| {
                    if x == 1 {
                        self.vars[i].to_string()
                    } else {
                        format!("{}^{}", self.vars[i], x)
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                let f: fn(&Poly, &Poly) -> Poly = $body;
                f(self, rhs)
            }
        }
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.add_scaled(b, true));
forward_binop!(Sub, sub, |a, b| a.add_scaled(b, false));
forward_binop!(Mul, mul, |a, b| a.mul_poly(b));

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&rat(-1))
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::sym;

    fn x() -> Poly {
        Poly::var(&sym("x"))
    }
    fn y() -> Poly {
        Poly::var(&sym("y"))
    }

    #[test]
    fn zero_is_empty_and_cancellation_removes_terms() {
        let p = &x() - &x();
        assert!(p.is_zero());
        assert_eq!(p.num_terms(), 0);
        assert_eq!(p.to_string(), "0");
    }

    #[test]
    fn equality_ignores_variable_order() {
        let a = &x() + &y();
        let b = &y() + &x();
        assert_eq!(a, b);
        assert_ne!(a, &x() - &y());
    }

    #[test]
    fn display_is_graded() {
        let p = &(&x() * &x()) - &(&Poly::from_int(2) * &y()) + Poly::constant(ratio(1, 2));
        assert_eq!(p.to_string(), "x^2 - 2*y + 1/2");
        assert_eq!((-x()).to_string(), "-x");
    }

    #[test]
    fn exact_division() {
        let a = &(&x() + &y()) * &(&x() - &y());
        assert_eq!(a.div_exact(&(&x() + &y())).unwrap(), &x() - &y());
        assert!(a.div_exact(&(&x() + &Poly::one())).is_none());
    }

    #[test]
    fn coefficients_round_trip() {
        let s = sym("s");
        let p = &(&Poly::monomial(&s, 2) * &x()) + &(&Poly::var(&s) * &y()) + Poly::from_int(3);
        let cs = p.coefficients_in(&s);
        assert_eq!(cs.len(), 3);
        assert_eq!(cs[1], y());
        assert_eq!(Poly::from_coefficients_in(&s, &cs), p);
    }

    #[test]
    fn square_roots() {
        let p = &(&x() - &y()) + &Poly::from_int(3);
        let sq = &p * &p;
        let r = sq.sqrt_exact().unwrap();
        assert!(r == p || r == -p.clone());
        assert!((&sq + &Poly::one()).sqrt_exact().is_none());
        assert!(Poly::from_int(2).sqrt_exact().is_none());
        assert_eq!(Poly::constant(ratio(9, 4)).sqrt_exact().unwrap(), Poly::constant(ratio(3, 2)));
    }

    #[test]
    fn substitution_and_derivative() {
        let p = &x() * &x() * y();
        let subs = BTreeMap::from([(sym("x"), &y() + &Poly::one())]);
        assert_eq!(p.substitute(&subs), &(&(&y() + &Poly::one()) * &(&y() + &Poly::one())) * &y());
        assert_eq!(p.derivative(&sym("x")), &Poly::from_int(2) * &(&x() * &y()));
        assert!(p.derivative(&sym("z")).is_zero());
    }

    #[test]
    fn rename_to_existing_symbol_merges() {
        let p = &x() + &y();
        let r = p.rename(&BTreeMap::from([(sym("x"), sym("y"))]));
        assert_eq!(r, &Poly::from_int(2) * &y());
    }
}
