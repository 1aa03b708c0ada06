//! Multivariate gcd over ℤ by the heuristic evaluation/interpolation method.
//!
//! Variables are evaluated one at a time at a large integer ξ; the gcd of the
//! images is lifted back by symmetric ξ-adic expansion and accepted only after
//! exact trial division, so every returned gcd is verified.

use std::collections::BTreeMap;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::{Mono, Poly, Rat, NVARS};

type IMono = [u32; NVARS];

#[derive(Clone, Debug, PartialEq, Eq)]
struct IPoly {
    // Descending lex order, no zeros.
    terms: Vec<(IMono, BigInt)>,
}

const MAX_ATTEMPTS: usize = 32;

impl IPoly {
    fn zero() -> Self {
        IPoly { terms: Vec::new() }
    }

    fn constant(c: BigInt) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            IPoly { terms: vec![([0; NVARS], c)] }
        }
    }

    fn from_map(m: BTreeMap<IMono, BigInt>) -> Self {
        let mut terms: Vec<_> = m.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.reverse();
        IPoly { terms }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn div_scalar(&self, c: &BigInt) -> IPoly {
        IPoly {
            terms: self.terms.iter().map(|(m, a)| (*m, a / c)).collect(),
        }
    }

    fn mul_scalar(&self, c: &BigInt) -> IPoly {
        IPoly {
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    fn max_norm(&self) -> BigInt {
        self.terms.iter().map(|(_, c)| c.abs()).max().unwrap_or_else(BigInt::zero)
    }

    fn lc(&self) -> &BigInt {
        &self.terms[0].1
    }

    fn main_var(&self) -> Option<usize> {
        (0..NVARS).find(|&v| self.terms.iter().any(|(m, _)| m[v] > 0))
    }

    /// Substitute `x` for variable `v`.
    fn eval(&self, v: usize, x: &BigInt) -> IPoly {
        let mut acc: BTreeMap<IMono, BigInt> = BTreeMap::new();
        let maxd = self.terms.iter().map(|(m, _)| m[v]).max().unwrap_or(0) as usize;
        let mut pows = Vec::with_capacity(maxd + 1);
        pows.push(BigInt::one());
        for i in 1..=maxd {
            let p = &pows[i - 1] * x;
            pows.push(p);
        }
        for (m, c) in &self.terms {
            let mut k = *m;
            let e = k[v] as usize;
            k[v] = 0;
            *acc.entry(k).or_insert_with(BigInt::zero) += c * &pows[e];
        }
        IPoly::from_map(acc)
    }

    /// Inverse of `eval` through symmetric base-`x` digits.
    fn interpolate(&self, v: usize, x: &BigInt) -> IPoly {
        let half = x / 2;
        let mut acc: BTreeMap<IMono, BigInt> = BTreeMap::new();
        let mut h = self.clone();
        let mut i = 0u32;
        while !h.is_zero() {
            let mut next = Vec::with_capacity(h.terms.len());
            for (m, c) in &h.terms {
                let mut g = c.mod_floor(x);
                if g > half {
                    g -= x;
                }
                if !g.is_zero() {
                    let mut k = *m;
                    k[v] += i;
                    acc.insert(k, g.clone());
                }
                let r = (c - &g) / x;
                if !r.is_zero() {
                    next.push((*m, r));
                }
            }
            h = IPoly { terms: next };
            i += 1;
        }
        IPoly::from_map(acc)
    }

    fn primitive(&self) -> IPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.lc().sign() == Sign::Minus {
            c = -c;
        }
        self.div_scalar(&c)
    }

    fn div_exact(&self, d: &IPoly) -> Option<IPoly> {
        if d.is_zero() {
            return None;
        }
        let (lm, lc) = d.terms[0].clone();
        let mut rem: BTreeMap<IMono, BigInt> = self.terms.iter().cloned().collect();
        let mut quot: BTreeMap<IMono, BigInt> = BTreeMap::new();
        while let Some((m, c)) = rem.iter().next_back().map(|(m, c)| (*m, c.clone())) {
            let mut qm = [0u32; NVARS];
            for i in 0..NVARS {
                if m[i] < lm[i] {
                    return None;
                }
                qm[i] = m[i] - lm[i];
            }
            let (qc, r) = c.div_rem(&lc);
            if !r.is_zero() {
                return None;
            }
            for (dm, dc) in &d.terms {
                let mut key = qm;
                for i in 0..NVARS {
                    key[i] += dm[i];
                }
                let e = rem.entry(key).or_insert_with(BigInt::zero);
                *e -= &qc * dc;
                if e.is_zero() {
                    rem.remove(&key);
                }
            }
            quot.insert(qm, qc);
        }
        Some(IPoly::from_map(quot))
    }
}

/// Returns (gcd, f/gcd, g/gcd), or `None` if every evaluation point failed.
fn heu_gcd(f: &IPoly, g: &IPoly) -> Option<(IPoly, IPoly, IPoly)> {
    if f.is_zero() && g.is_zero() {
        return Some((IPoly::zero(), IPoly::zero(), IPoly::zero()));
    }
    if f.is_zero() {
        let h = g.primitive().mul_scalar(&g.content());
        let s = g.div_exact(&h)?;
        return Some((h, IPoly::zero(), s));
    }
    if g.is_zero() {
        let h = f.primitive().mul_scalar(&f.content());
        let s = f.div_exact(&h)?;
        return Some((h, s, IPoly::zero()));
    }
    let v = match (f.main_var(), g.main_var()) {
        (None, None) => {
            let a = f.lc();
            let b = g.lc();
            let h = a.gcd(b);
            return Some((IPoly::constant(h.clone()), IPoly::constant(a / &h), IPoly::constant(b / &h)));
        }
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
    };
    let cf = f.content();
    let cg = g.content();
    let h0 = cf.gcd(&cg);
    let f = f.div_scalar(&h0);
    let g = g.div_scalar(&h0);

    let fnorm = f.max_norm();
    let gnorm = g.max_norm();
    let b: BigInt = BigInt::from(2) * fnorm.clone().min(gnorm.clone()) + 29;
    let lc_bound: BigInt = BigInt::from(2) * (&fnorm / f.lc().abs()).min(&gnorm / g.lc().abs()) + 2;
    let mut x = b.max(lc_bound);

    for _ in 0..MAX_ATTEMPTS {
        let ff = f.eval(v, &x);
        let gg = g.eval(v, &x);
        if !ff.is_zero() && !gg.is_zero() {
            if let Some((h, cff, cfg)) = heu_gcd(&ff, &gg) {
                let hh = h.interpolate(v, &x).primitive();
                if let (Some(a), Some(bq)) = (f.div_exact(&hh), g.div_exact(&hh)) {
                    return Some((hh.mul_scalar(&h0), a, bq));
                }
                let cf_i = cff.interpolate(v, &x);
                if !cf_i.is_zero() {
                    if let Some(hh) = f.div_exact(&cf_i) {
                        let hh2 = hh.primitive();
                        if let (Some(a), Some(bq)) = (f.div_exact(&hh2), g.div_exact(&hh2)) {
                            return Some((hh2.mul_scalar(&h0), a, bq));
                        }
                    }
                }
                let cg_i = cfg.interpolate(v, &x);
                if !cg_i.is_zero() {
                    if let Some(hh) = g.div_exact(&cg_i) {
                        let hh2 = hh.primitive();
                        if let (Some(a), Some(bq)) = (f.div_exact(&hh2), g.div_exact(&hh2)) {
                            return Some((hh2.mul_scalar(&h0), a, bq));
                        }
                    }
                }
            }
        }
        let r = x.sqrt().sqrt();
        x = BigInt::from(73794) * &x * r / BigInt::from(27011);
    }
    None
}

/// Converts a genuine polynomial to a primitive integer one.
fn to_ipoly(p: &Poly) -> IPoly {
    let l = p.denom_lcm();
    let terms = p
        .terms()
        .iter()
        .map(|(m, c)| {
            let mut k = [0u32; NVARS];
            for i in 0..NVARS {
                debug_assert!(m[i] >= 0);
                k[i] = m[i] as u32;
            }
            (k, (c * Rat::from_integer(l.clone())).to_integer())
        })
        .collect();
    IPoly { terms }
}

fn from_ipoly(p: &IPoly) -> Poly {
    Poly::from_terms(p.terms.iter().map(|(m, c)| {
        let mut k: Mono = [0; NVARS];
        for i in 0..NVARS {
            k[i] = m[i] as i32;
        }
        (k, Rat::from_integer(c.clone()))
    }))
}

/// Gcd of two Laurent polynomials, normalised to a primitive integer
/// polynomial with no monomial factor and positive leading coefficient.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() && b.is_zero() {
        return Poly::zero();
    }
    if a.is_monomial() || b.is_monomial() {
        return Poly::one();
    }
    let sa = a.shift(&neg(&a.min_exponents()));
    let sb = b.shift(&neg(&b.min_exponents()));
    if a.is_zero() || b.is_zero() {
        let p = if a.is_zero() { sb } else { sa };
        return from_ipoly(&to_ipoly(&p).primitive());
    }
    let (fa, fb) = (to_ipoly(&sa), to_ipoly(&sb));
    let (h, _, _) = heu_gcd(&fa, &fb)
        .expect("heuristic gcd exhausted its evaluation points");
    let h = h.primitive();
    let p = from_ipoly(&h);
    // Strip any monomial factor the interpolation could not have produced.
    p.shift(&neg(&p.min_exponents()))
}

fn neg(m: &Mono) -> Mono {
    let mut o = *m;
    for e in o.iter_mut() {
        *e = -*e;
    }
    o
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::poly::{rat_int, Sym};

    fn x(s: Sym) -> Poly {
        Poly::var(s)
    }

    #[test]
    fn gcd_of_products() {
        let a = x(Sym::U).add(&Poly::constant(rat_int(-1)));
        let b = x(Sym::Alpha).mul(&x(Sym::Gamma)).add(&Poly::constant(rat_int(3)));
        let c = x(Sym::Delta).pow(2).sub(&x(Sym::Beta));
        let f = a.mul(&b).mul(&c);
        let g = a.mul(&c).mul(&x(Sym::Gamma).add(&Poly::one()));
        let h = poly_gcd(&f, &g);
        let want = a.mul(&c);
        let ratio = h.div_exact(&want).unwrap();
        assert!(ratio.as_constant().is_some(), "{h:?} vs {want:?}");
    }

    #[test]
    fn coprime_is_one() {
        let f = x(Sym::U).pow(2).sub(&Poly::constant(rat_int(2)));
        let g = x(Sym::U).add(&Poly::one());
        assert!(poly_gcd(&f, &g).is_one());
    }

    #[test]
    fn laurent_shift_ignored() {
        let base = x(Sym::Gamma).add(&Poly::constant(rat_int(5)));
        let f = base.shift(&[0, -2, 0, 1, 0]);
        let g = base.mul(&x(Sym::U).sub(&Poly::one())).shift(&[-3, 0, 0, 0, 0]);
        assert_eq!(poly_gcd(&f, &g), base);
    }
}
