use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::{poly_gcd, AlgebraError, Poly, Rational, Symbol};

/// Quotient of two polynomials. Construction through [`RatFunc::new`] keeps
/// the fraction unreduced; arithmetic results are reduced.
#[derive(Clone, Debug, PartialEq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        Ok(RatFunc { num, den })
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn zero() -> Self {
        RatFunc::from_poly(Poly::zero())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn into_parts(self) -> (Poly, Poly) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Cancels the GCD of numerator and denominator without rescaling.
    pub fn cancel(&self) -> RatFunc {
        if self.num.is_zero() {
            return RatFunc { num: Poly::zero(), den: Poly::one() };
        }
        let g = poly_gcd(&self.num, &self.den).expect("den nonzero");
        if g.is_one() {
            return self.clone();
        }
        RatFunc {
            num: self.num.div_exact(&g).expect("gcd divides num"),
            den: self.den.div_exact(&g).expect("gcd divides den"),
        }
    }

    /// Cancels common factors and makes the denominator's lex-leading
    /// coefficient 1.
    pub fn reduce(&self) -> RatFunc {
        let c = self.cancel();
        let lc = c.den.leading_coefficient();
        RatFunc { num: c.num.scale(&lc.recip()), den: c.den.scale(&lc.recip()) }
    }

    /// Sum of two reduced fractions; only factors of the shared part of the
    /// denominators can cancel.
    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if self.den.is_one() && other.den.is_one() {
            return RatFunc { num: &self.num + &other.num, den: Poly::one() };
        }
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        super::budget::charge(self.size() + other.size());
        let g = poly_gcd(&self.den, &other.den).expect("nonzero");
        let b = self.den.div_exact(&g).expect("gcd divides");
        let d = other.den.div_exact(&g).expect("gcd divides");
        let t = &(&self.num * &d) + &(&other.num * &b);
        if t.is_zero() {
            return RatFunc::zero();
        }
        let g2 = if g.is_one() { g.clone() } else { poly_gcd(&t, &g).expect("nonzero") };
        let num = t.div_exact(&g2).expect("gcd divides");
        let den = &b * &other.den.div_exact(&g2).expect("gcd divides");
        RatFunc { num, den }.normalized()
    }

    /// Storage size in machine words, used to charge arithmetic against a step budget.
    fn size(&self) -> u64 {
        self.num.word_size() + self.den.word_size()
    }

    fn normalized(self) -> RatFunc {
        let lc = self.den.leading_coefficient();
        if lc == Rational::from_integer(1.into()) {
            return self;
        }
        RatFunc { num: self.num.scale(&lc.recip()), den: self.den.scale(&lc.recip()) }
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.den.is_one() && other.den.is_one() {
            return RatFunc { num: &self.num * &other.num, den: Poly::one() };
        }
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero();
        }
        super::budget::charge(self.size() + other.size());
        let g1 = poly_gcd(&self.num, &other.den).expect("nonzero");
        let g2 = poly_gcd(&other.num, &self.den).expect("nonzero");
        let num = &self.num.div_exact(&g1).expect("gcd divides") * &other.num.div_exact(&g2).expect("gcd divides");
        let den = &self.den.div_exact(&g2).expect("gcd divides") * &other.den.div_exact(&g1).expect("gcd divides");
        RatFunc { num, den }.normalized()
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc, AlgebraError> {
        if other.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        Ok(self.mul(&RatFunc { num: other.den.clone(), den: other.num.clone() }))
    }

    /// Evaluates at a rational point; errors if the denominator vanishes.
    pub fn eval_rational(&self, values: &BTreeMap<Symbol, Rational>) -> Result<Rational, AlgebraError> {
        let n = self.num.eval_rational(values).ok_or(AlgebraError::UnboundSymbol)?;
        let d = self.den.eval_rational(values).ok_or(AlgebraError::UnboundSymbol)?;
        if d.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        Ok(n / d)
    }

    /// Value equality `a/b == c/d` via cross-multiplication.
    pub fn equals(&self, other: &RatFunc) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out = self.num.symbols();
        for s in self.den.symbols() {
            if !out.contains(&s) {
                out.push(s);
            }
        }
        out
    }

    /// Substitutes rational functions for symbols in a polynomial.
    pub fn substitute_into(p: &Poly, values: &BTreeMap<Symbol, RatFunc>) -> RatFunc {
        if values.is_empty() || !values.keys().any(|s| p.contains_symbol(s)) {
            return RatFunc::from_poly(p.clone());
        }
        // Bring every value over one common denominator D, then
        // p(n_i / D) = sum c * prod n_i^e_i * D^(deg - |e|) / D^deg.
        let mut common = Poly::one();
        for v in values.values() {
            let g = poly_gcd(&common, &v.den).expect("nonzero");
            common = &common * &v.den.div_exact(&g).expect("gcd divides");
        }
        let scaled: BTreeMap<Symbol, Poly> = values
            .iter()
            .map(|(s, v)| (s.clone(), &v.num * &common.div_exact(&v.den).expect("lcm")))
            .collect();
        let substituted_syms: Vec<Symbol> = values.keys().cloned().collect();
        // Homogenize in the substituted symbols with respect to degree.
        let mut max_deg = 0u32;
        let mut by_degree: BTreeMap<u32, Poly> = BTreeMap::new();
        for (mono, c) in p.sparse_terms() {
            let deg: u32 = mono.iter().filter(|(s, _)| substituted_syms.contains(s)).map(|(_, e)| *e).sum();
            max_deg = max_deg.max(deg);
            let t = Poly::from_sparse_terms([(mono, c.clone())]);
            let entry = by_degree.entry(deg).or_insert_with(Poly::zero);
            *entry = &*entry + &t;
        }
        let mut num = Poly::zero();
        for (deg, part) in by_degree {
            let sub = part.substitute(&scaled);
            num = &num + &(&sub * &common.pow(max_deg - deg));
        }
        RatFunc { num, den: common.pow(max_deg) }.reduce()
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Poly| {
            if p.num_terms() > 1 {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        // A lone constant denominator divides cleanly.
        if let Some(c) = self.den.constant_value() {
            if !c.is_zero() {
                return write!(f, "{}", self.num.scale(&c.recip()));
            }
        }
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, rat, sym};

    fn p(s: &str) -> Poly {
        parse_poly(s).unwrap()
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(RatFunc::new(p("x"), Poly::zero()).is_err());
    }

    #[test]
    fn reduction_cancels_common_factors() {
        let r = RatFunc::new(p("(s+k)*c"), p("(s+k)*(s+m)")).unwrap().reduce();
        assert_eq!(r.num(), &p("c"));
        assert_eq!(r.den(), &p("s+m"));
    }

    #[test]
    fn arithmetic() {
        let a = RatFunc::new(p("1"), p("x")).unwrap();
        let b = RatFunc::new(p("1"), p("y")).unwrap();
        let s = a.add(&b);
        assert!(s.equals(&RatFunc::new(p("x + y"), p("x*y")).unwrap()));
        assert!(a.sub(&a).is_zero());
        assert!(a.mul(&b).equals(&RatFunc::new(p("1"), p("x*y")).unwrap()));
        assert!(a.div(&b).unwrap().equals(&RatFunc::new(p("y"), p("x")).unwrap()));
    }

    #[test]
    fn substitution_of_fractions() {
        // p = X*Y - c, X = c*x/Y  ->  c*x - c
        let q = p("X*Y - c");
        let vals = BTreeMap::from([(sym("X"), RatFunc::new(p("c*x"), p("Y")).unwrap())]);
        let r = RatFunc::substitute_into(&q, &vals);
        assert!(r.equals(&RatFunc::from_poly(p("c*x - c"))));
        let vals = BTreeMap::from([
            (sym("X"), RatFunc::new(p("1"), p("a")).unwrap()),
            (sym("Y"), RatFunc::new(p("a"), p("b")).unwrap()),
        ]);
        let r = RatFunc::substitute_into(&p("X*Y + X + 1"), &vals);
        assert!(r.equals(&RatFunc::new(p("a + b + a*b"), p("a*b")).unwrap()));
        let at = BTreeMap::from([(sym("a"), rat(2)), (sym("b"), rat(3))]);
        // 1/3 + 1/2 + 1
        assert_eq!(r.eval_rational(&at).unwrap(), crate::algebra::ratio(11, 6));
    }
}
