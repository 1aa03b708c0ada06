//! Sparse Laurent polynomials in the five symbols u, α, β, γ, δ over ℚ.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub const NVARS: usize = 5;

/// Exponent vector, compared lexicographically on (u, α, β, γ, δ).
pub type Mono = [i32; NVARS];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    U = 0,
    Alpha = 1,
    Beta = 2,
    Gamma = 3,
    Delta = 4,
}

impl Sym {
    pub const ALL: [Sym; NVARS] = [Sym::U, Sym::Alpha, Sym::Beta, Sym::Gamma, Sym::Delta];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Letter used by the canonical string format.
    pub fn letter(self) -> char {
        match self {
            Sym::U => 'u',
            Sym::Alpha => 'a',
            Sym::Beta => 'b',
            Sym::Gamma => 'g',
            Sym::Delta => 'd',
        }
    }

    pub fn from_letter(c: char) -> Option<Sym> {
        Some(match c {
            'u' => Sym::U,
            'a' => Sym::Alpha,
            'b' => Sym::Beta,
            'g' => Sym::Gamma,
            'd' => Sym::Delta,
            _ => return None,
        })
    }
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Terms are kept sorted by descending monomial with no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(Mono, Rat)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial([0; NVARS], c)
    }

    pub fn monomial(m: Mono, c: Rat) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    pub fn var(s: Sym) -> Self {
        let mut m = [0; NVARS];
        m[s.index()] = 1;
        Self::monomial(m, Rat::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (Mono, Rat)>>(it: I) -> Self {
        let mut acc: HashMap<Mono, Rat> = HashMap::new();
        for (m, c) in it {
            *acc.entry(m).or_insert_with(Rat::zero) += c;
        }
        let mut terms: Vec<(Mono, Rat)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Mono, Rat)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == [0; NVARS] && self.terms[0].1.is_one()
    }

    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.as_slice() {
            [] => Some(Rat::zero()),
            [(m, c)] if *m == [0; NVARS] => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&(Mono, Rat)> {
        self.terms.first()
    }

    /// Componentwise minimum exponent; the monomial that shifts the support into ℕ⁵.
    pub fn min_exponents(&self) -> Mono {
        let mut out = [i32::MAX; NVARS];
        for (m, _) in &self.terms {
            for i in 0..NVARS {
                out[i] = out[i].min(m[i]);
            }
        }
        if self.terms.is_empty() {
            [0; NVARS]
        } else {
            out
        }
    }

    pub fn max_exponents(&self) -> Mono {
        let mut out = [i32::MIN; NVARS];
        for (m, _) in &self.terms {
            for i in 0..NVARS {
                out[i] = out[i].max(m[i]);
            }
        }
        if self.terms.is_empty() {
            [0; NVARS]
        } else {
            out
        }
    }

    pub fn shift(&self, by: &Mono) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (mono_mul(m, by), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, a)| (*m, -a)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Poly { terms: out }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return Poly {
                terms: self.terms.iter().map(|(a, x)| (mono_mul(a, m), x * c)).collect(),
            };
        }
        if self.terms.len() == 1 {
            return other.mul(self);
        }
        let mut acc: HashMap<Mono, Rat> = HashMap::with_capacity(self.len() * other.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(mono_mul(ma, mb)).or_insert_with(Rat::zero) += ca * cb;
            }
        }
        let mut terms: Vec<(Mono, Rat)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Exact Laurent division; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by zero in coefficient field");
        if d.terms.len() == 1 {
            let (m, c) = &d.terms[0];
            let inv = mono_inv(m);
            let ci = c.recip();
            return Some(Poly {
                terms: self.terms.iter().map(|(a, x)| (mono_mul(a, &inv), x * &ci)).collect(),
            });
        }
        // Move both into ℕ⁵; a Laurent quotient exists iff the shifted one divides.
        let sd = d.min_exponents();
        let dd = d.shift(&mono_inv(&sd));
        let sn = self.min_exponents();
        let nn = self.shift(&mono_inv(&sn));
        let q = nn.div_exact_poly(&dd)?;
        Some(q.shift(&mono_mul(&sn, &mono_inv(&sd))))
    }

    /// Division of genuine polynomials by lex leading terms.
    fn div_exact_poly(&self, d: &Poly) -> Option<Poly> {
        use std::collections::BTreeMap;
        let (lm, lc) = d.terms[0].clone();
        let lci = lc.recip();
        let mut rem: BTreeMap<Mono, Rat> = self.terms.iter().cloned().collect();
        let mut quot = Vec::new();
        while let Some((m, c)) = rem.iter().next_back().map(|(m, c)| (*m, c.clone())) {
            let qm = mono_div(&m, &lm)?;
            if qm.iter().any(|&e| e < 0) {
                return None;
            }
            let qc = &c * &lci;
            for (dm, dc) in &d.terms {
                let key = mono_mul(&qm, dm);
                let v = rem.entry(key).or_insert_with(Rat::zero);
                *v -= &qc * dc;
                if v.is_zero() {
                    rem.remove(&key);
                }
            }
            quot.push((qm, qc));
        }
        Some(Poly { terms: quot })
    }

    /// Least common multiple of coefficient denominators.
    pub fn denom_lcm(&self) -> BigInt {
        self.terms
            .iter()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()))
    }

    /// True iff every exponent vector is nonnegative.
    pub fn is_polynomial(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.iter().all(|&e| e >= 0))
    }

    pub fn degree_in(&self, s: Sym) -> i32 {
        self.terms.iter().map(|(m, _)| m[s.index()]).max().unwrap_or(0)
    }

    pub fn uses(&self, s: Sym) -> bool {
        self.terms.iter().any(|(m, _)| m[s.index()] != 0)
    }

    pub fn max_abs_coeff(&self) -> Rat {
        self.terms.iter().map(|(_, c)| c.abs()).max().unwrap_or_else(Rat::zero)
    }
}

pub fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut out = [0; NVARS];
    for i in 0..NVARS {
        out[i] = a[i] + b[i];
    }
    out
}

pub fn mono_inv(a: &Mono) -> Mono {
    let mut out = [0; NVARS];
    for i in 0..NVARS {
        out[i] = -a[i];
    }
    out
}

fn mono_div(a: &Mono, b: &Mono) -> Option<Mono> {
    Some(mono_mul(a, &mono_inv(b)))
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::format::poly_to_string(self))
    }
}
