//! Canonical rational functions in ℚ(u, α, β, γ, δ).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::gcd::poly_gcd;
use super::poly::{mono_inv, rat_int, Mono, Poly, Rat, Sym, NVARS};
use super::ArithError;

/// Invariants: `den` is a genuine polynomial with no monomial factor and lex
/// leading coefficient 1, and `num`, `den` share no nonunit factor. Equal
/// functions therefore have identical fields.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Self::from_rat(Rat::one())
    }

    pub fn from_rat(c: Rat) -> Self {
        RatFunc { num: Poly::constant(c), den: Poly::one() }
    }

    pub fn int(n: i64) -> Self {
        Self::from_rat(rat_int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::from_rat(super::poly::rat(n, d))
    }

    pub fn var(s: Sym) -> Self {
        RatFunc { num: Poly::var(s), den: Poly::one() }
    }

    /// Monomial with the given exponents and coefficient 1.
    pub fn mono(m: Mono) -> Self {
        RatFunc { num: Poly::monomial(m, Rat::one()), den: Poly::one() }
    }

    pub fn u() -> Self {
        Self::var(Sym::U)
    }

    /// q = u².
    pub fn q() -> Self {
        Self::u_pow(2)
    }

    /// u^k = q^{k/2}.
    pub fn u_pow(k: i32) -> Self {
        let mut m = [0; NVARS];
        m[0] = k;
        Self::mono(m)
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_rat(&self) -> Option<Rat> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// Reduce an arbitrary fraction of Laurent polynomials to canonical form.
    pub fn normalize(num: Poly, den: Poly) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let shift = mono_inv(&den.min_exponents());
        let (mut num, mut den) = (num.shift(&shift), den.shift(&shift));
        if !den.is_monomial() && !num.is_monomial() {
            let g = poly_gcd(&num, &den);
            if !g.is_one() {
                num = num.div_exact(&g).expect("gcd divides numerator");
                den = den.div_exact(&g).expect("gcd divides denominator");
            }
        }
        Ok(Self::finish(num, den))
    }

    /// Scale so the denominator is monic; assumes the remaining invariants hold.
    fn finish(num: Poly, den: Poly) -> Self {
        let lc = den.leading().expect("nonzero denominator").1.clone();
        if lc.is_one() {
            RatFunc { num, den }
        } else {
            let inv = lc.recip();
            RatFunc { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn inv(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        // Already coprime: only rescaling and monomial shifting remain.
        let shift = mono_inv(&self.num.min_exponents());
        Ok(Self::finish(self.den.shift(&shift), self.num.shift(&shift)))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ArithError> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i32) -> Self {
        if e == 0 {
            return Self::one();
        }
        let base = if e < 0 {
            self.inv().expect("division by zero in coefficient field")
        } else {
            self.clone()
        };
        let k = e.unsigned_abs();
        // Powers of coprime parts stay coprime.
        Self::finish(base.num.pow(k), base.den.pow(k))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Replace symbols by rational functions.
    pub fn substitute(&self, bindings: &BTreeMap<Sym, RatFunc>) -> Result<Self, ArithError> {
        let n = eval_poly(&self.num, bindings)?;
        let d = eval_poly(&self.den, bindings)?;
        if d.is_zero() {
            return Err(ArithError::VanishingDenominator(self.den_string()));
        }
        n.checked_div(&d)
    }

    /// Specialise every symbol to a rational number.
    pub fn eval_rat(&self, values: &BTreeMap<Sym, Rat>) -> Result<Rat, ArithError> {
        let b: BTreeMap<Sym, RatFunc> =
            values.iter().map(|(k, v)| (*k, RatFunc::from_rat(v.clone()))).collect();
        let r = self.substitute(&b)?;
        r.as_rat().ok_or_else(|| ArithError::Unbound(r.to_string()))
    }

    fn den_string(&self) -> String {
        super::format::poly_to_string(&self.den)
    }

    /// Sum over k ≥ `start` of coeff·ratioᵏ, as a formal series.
    pub fn sum_geometric(coeff: &Self, ratio: &Self, start: i32) -> Result<Self, ArithError> {
        let one_minus = &Self::one() - ratio;
        if one_minus.is_zero() {
            return Err(ArithError::DivergentSeries);
        }
        if coeff.is_zero() {
            return Ok(Self::zero());
        }
        let head = if ratio.is_zero() {
            if start == 0 {
                Self::one()
            } else if start > 0 {
                Self::zero()
            } else {
                return Err(ArithError::DivisionByZero);
            }
        } else {
            ratio.pow(start)
        };
        (coeff * &head).checked_div(&one_minus)
    }

    /// Largest total u-degree of numerator minus denominator; used as the q→∞ order.
    pub fn u_order(&self) -> i32 {
        self.num.degree_in(Sym::U) - self.den.degree_in(Sym::U)
    }
}

fn eval_poly(p: &Poly, b: &BTreeMap<Sym, RatFunc>) -> Result<RatFunc, ArithError> {
    let mut cache: BTreeMap<(Sym, i32), RatFunc> = BTreeMap::new();
    let mut acc = RatFunc::zero();
    let mut plain: Vec<(Mono, Rat)> = Vec::new();
    for (m, c) in p.terms() {
        let mut rest = *m;
        let mut factor = RatFunc::one();
        for s in Sym::ALL {
            let e = m[s.index()];
            if e == 0 {
                continue;
            }
            if let Some(v) = b.get(&s) {
                rest[s.index()] = 0;
                if !cache.contains_key(&(s, e)) {
                    if e < 0 && v.is_zero() {
                        return Err(ArithError::VanishingDenominator(s.letter().to_string()));
                    }
                    cache.insert((s, e), v.pow(e));
                }
                factor = &factor * &cache[&(s, e)];
            }
        }
        if factor.is_one() {
            plain.push((rest, c.clone()));
        } else {
            let t = RatFunc::from_poly(Poly::monomial(rest, c.clone()));
            acc = &acc + &(&t * &factor);
        }
    }
    Ok(&acc + &RatFunc::from_poly(Poly::from_terms(plain)))
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RatFunc {
    fn one() -> Self {
        RatFunc::one()
    }
}

impl<'a> Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            let n = self.num.add(&o.num);
            if self.den.is_one() {
                return RatFunc { num: n, den: self.den.clone() };
            }
            return RatFunc::normalize(n, self.den.clone()).unwrap();
        }
        if self.den.is_one() {
            let n = self.num.mul(&o.den).add(&o.num);
            return RatFunc { num: n, den: o.den.clone() };
        }
        if o.den.is_one() {
            let n = o.num.mul(&self.den).add(&self.num);
            return RatFunc { num: n, den: self.den.clone() };
        }
        let g = poly_gcd(&self.den, &o.den);
        let b_g = self.den.div_exact(&g).unwrap();
        let d_g = o.den.div_exact(&g).unwrap();
        let n = self.num.mul(&d_g).add(&o.num.mul(&b_g));
        if n.is_zero() {
            return RatFunc::zero();
        }
        // Any common factor of n with b·(d/g) divides g.
        let h = if g.is_one() { Poly::one() } else { poly_gcd(&n, &g) };
        let (n, g2) = if h.is_one() {
            (n, g)
        } else {
            (n.div_exact(&h).unwrap(), g.div_exact(&h).unwrap())
        };
        let den = b_g.mul(&d_g).mul(&g2);
        let shift = mono_inv(&den.min_exponents());
        RatFunc::finish(n.shift(&shift), den.shift(&shift))
    }
}

impl<'a> Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self + &(-o)
    }
}

impl<'a> Neg for &'a RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }
}

impl<'a> Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return RatFunc { num: self.num.mul(&o.num), den: Poly::one() };
        }
        let g1 = poly_gcd(&self.num, &o.den);
        let g2 = poly_gcd(&o.num, &self.den);
        let a = if g1.is_one() { self.num.clone() } else { self.num.div_exact(&g1).unwrap() };
        let d = if g1.is_one() { o.den.clone() } else { o.den.div_exact(&g1).unwrap() };
        let c = if g2.is_one() { o.num.clone() } else { o.num.div_exact(&g2).unwrap() };
        let b = if g2.is_one() { self.den.clone() } else { self.den.div_exact(&g2).unwrap() };
        let num = a.mul(&c);
        let den = b.mul(&d);
        let shift = mono_inv(&den.min_exponents());
        RatFunc::finish(num.shift(&shift), den.shift(&shift))
    }
}

impl<'a> Div<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn div(self, o: &RatFunc) -> RatFunc {
        self.checked_div(o).expect("division by zero in coefficient field")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, o: RatFunc) -> RatFunc {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, o: &RatFunc) -> RatFunc {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<RatFunc> for &'a RatFunc {
            type Output = RatFunc;
            fn $m(self, o: RatFunc) -> RatFunc {
                self.$m(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::format::ratfunc_to_string(self))
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl std::str::FromStr for RatFunc {
    type Err = ArithError;
    fn from_str(s: &str) -> Result<Self, ArithError> {
        super::format::parse(s)
    }
}

impl std::iter::Sum for RatFunc {
    fn sum<I: Iterator<Item = RatFunc>>(it: I) -> RatFunc {
        it.fold(RatFunc::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for RatFunc {
    fn product<I: Iterator<Item = RatFunc>>(it: I) -> RatFunc {
        it.fold(RatFunc::one(), |a, b| a * b)
    }
}
