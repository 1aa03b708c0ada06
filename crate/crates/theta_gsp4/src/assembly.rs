//! Right-hand sides of the global interpolation formulas, the mass constant
//! and the cross-module verification suite.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use thiserror::Error;

use crate::cm_theta::{
    enumerate_cm_points, fourier_hecke, level_classes, master_identity, synthetic_uq_eigen, theta_element, theta_pushforward,
    CmTower, FourierExpansion, HeckeOp,
};
use crate::exact_arith::{alpha, beta, delta, gamma, int, parse, u, ArithError, Poly, RatFunc, Rat};
use crate::hecke_gsp4::{eigen_checks, relation_checks, IdentityStatus};
use crate::lfactors::{
    gamma_factor, l_tau, modified_euler, modified_euler_local, zeta, CharWithConductor, EulerCase, FChar, Half, KLambda,
    SatakeGSp4, Splitting,
};
use crate::local_bessel::{
    arch_bessel_assembly, arch_bessel_ratio, bessel_fq_constant, bessel_steinberg, bf_from_str, bf_lt, fq_dagger_display,
    fq_statement, ordinary_chain, ordinary_j_target, ordinary_ratio, paramodular_assembly, paramodular_closed,
    quaternion_ratio_assembly, quaternion_ratio_closed, rel_diff, spherical_target, to_decimal, ArchDatum, BesselPath,
    ChiTriple, OrdStage, OrdinaryDatum, SteinbergDatum,
};
use crate::quadfield::{
    anticyc_character, class_group, class_number_formula, generators, is_prime, kronecker, prime_factors, ring_class_number,
    splitting_type, Form, ImagQuadField, QuadError, RingClassTower, RootOfUnity,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AssemblyError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("{0} is not a positive square-free integer")]
    NotSquarefree(i64),
    #[error("N+ = {0} and N- = {1} are not coprime")]
    NotCoprime(i64, i64),
    #[error("N- = {0} does not have an even number of prime factors")]
    OddNMinus(i64),
    #[error("Heegner shape fails at {0}: {1}")]
    Heegner(i64, String),
    #[error("p = {0} divides N or is not prime")]
    BadP(i64),
    #[error("missing or invalid Atkin-Lehner sign at {0}")]
    Sign(i64),
    #[error("invalid datum: {0}")]
    Invalid(String),
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("config line {0}: {1}")]
    Config(usize, String),
}

fn factor(mut n: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut k = 0;
        while n % d == 0 {
            n /= d;
            k += 1;
        }
        if k > 0 {
            out.push((d, k));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn squarefree(n: i64) -> bool {
    n > 0 && factor(n).iter().all(|&(_, k)| k == 1)
}

fn r(n: i64) -> Ratio<i64> {
    Ratio::from_integer(n)
}

/// phase × ∏ p^{e_p} × ∏ symbol^{e_s} with rational exponents, or zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymProduct {
    zero: bool,
    phase: RootOfUnity,
    primes: BTreeMap<i64, Ratio<i64>>,
    symbols: BTreeMap<String, Ratio<i64>>,
}

impl SymProduct {
    pub fn one() -> Self {
        SymProduct { zero: false, phase: RootOfUnity::one(), primes: BTreeMap::new(), symbols: BTreeMap::new() }
    }

    pub fn zero() -> Self {
        SymProduct { zero: true, ..Self::one() }
    }

    pub fn integer(n: i64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        let mut s = Self::one();
        if n < 0 {
            s.phase = RootOfUnity::new(Ratio::new(1, 2));
        }
        for (p, k) in factor(n.abs()) {
            s.primes.insert(p, r(k));
        }
        s
    }

    pub fn rational(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Self::integer(n).mul(&Self::integer(d).inv().expect("nonzero"))
    }

    pub fn from_ratio(x: Ratio<i64>) -> Self {
        Self::rational(*x.numer(), *x.denom())
    }

    pub fn root(z: RootOfUnity) -> Self {
        SymProduct { phase: z, ..Self::one() }
    }

    pub fn sym(name: &str) -> Self {
        let mut s = Self::one();
        s.symbols.insert(name.to_string(), r(1));
        s
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one()
    }

    pub fn phase(&self) -> RootOfUnity {
        self.phase
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.zero || o.zero {
            return Self::zero();
        }
        let mut s = self.clone();
        s.phase = s.phase.mul(&o.phase);
        for (p, e) in &o.primes {
            *s.primes.entry(*p).or_insert_with(Ratio::zero) += e;
        }
        for (k, e) in &o.symbols {
            *s.symbols.entry(k.clone()).or_insert_with(Ratio::zero) += e;
        }
        s.primes.retain(|_, e| !e.is_zero());
        s.symbols.retain(|_, e| !e.is_zero());
        s
    }

    pub fn inv(&self) -> Result<Self, AssemblyError> {
        self.pow(r(-1))
    }

    pub fn div(&self, o: &Self) -> Result<Self, AssemblyError> {
        Ok(self.mul(&o.inv()?))
    }

    /// Fractional powers are taken on the positive part; they require a trivial phase.
    pub fn pow(&self, e: Ratio<i64>) -> Result<Self, AssemblyError> {
        if self.zero {
            return if e > Ratio::zero() { Ok(Self::zero()) } else { Err(AssemblyError::ZeroInverse) };
        }
        if !e.is_integer() && !self.phase.is_one() {
            return Err(AssemblyError::Invalid(format!("fractional power {e} of a signed quantity")));
        }
        let mut s = self.clone();
        s.phase = RootOfUnity::new(self.phase.0 * e);
        s.primes.values_mut().for_each(|x| *x *= e);
        s.symbols.values_mut().for_each(|x| *x *= e);
        s.primes.retain(|_, x| !x.is_zero());
        s.symbols.retain(|_, x| !x.is_zero());
        Ok(s)
    }

    pub fn powi(&self, e: i64) -> Result<Self, AssemblyError> {
        self.pow(r(e))
    }

    pub fn exponent(&self, name: &str) -> Ratio<i64> {
        self.symbols.get(name).copied().unwrap_or_else(Ratio::zero)
    }

    pub fn without(&self, name: &str) -> Self {
        let mut s = self.clone();
        s.symbols.remove(name);
        s
    }

    /// Replaces symbol^e by value^e.
    pub fn substitute(&self, name: &str, value: &SymProduct) -> Result<Self, AssemblyError> {
        let e = self.exponent(name);
        Ok(self.without(name).mul(&value.pow(e)?))
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&String, &Ratio<i64>)> {
        self.symbols.iter()
    }

    /// The value as a rational number, when it is one.
    pub fn rational_value(&self) -> Option<BigRational> {
        if self.zero {
            return Some(BigRational::zero());
        }
        if !self.symbols.is_empty() || !(self.phase.is_one() || self.phase.0 == Ratio::new(1, 2)) {
            return None;
        }
        let mut x = BigRational::one();
        for (p, e) in &self.primes {
            if !e.is_integer() {
                return None;
            }
            let b = BigRational::from_integer(BigInt::from(*p));
            let k = e.to_integer();
            x *= if k >= 0 { pow_big(&b, k as u32) } else { pow_big(&b, (-k) as u32).recip() };
        }
        if !self.phase.is_one() {
            x = -x;
        }
        Some(x)
    }
}

fn pow_big(b: &BigRational, k: u32) -> BigRational {
    (0..k).fold(BigRational::one(), |acc, _| acc * b)
}

fn fmt_exp(e: &Ratio<i64>) -> String {
    if e.is_integer() {
        format!("^{}", e)
    } else {
        format!("^({})", e)
    }
}

impl fmt::Display for SymProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            return write!(f, "0");
        }
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        let mut parts = Vec::new();
        for (p, e) in &self.primes {
            let k = e.floor().to_integer();
            let frac = e - r(k);
            if k >= 0 {
                num *= BigInt::from(*p).pow(k as u32);
            } else {
                den *= BigInt::from(*p).pow((-k) as u32);
            }
            if !frac.is_zero() {
                parts.push(format!("{}{}", p, fmt_exp(&frac)));
            }
        }
        let sign = if self.phase.0 == Ratio::new(1, 2) { "-" } else { "" };
        let scalar = if den.is_one() { format!("{sign}{num}") } else { format!("{sign}{num}/{den}") };
        let mut out = Vec::new();
        if scalar != "1" || (parts.is_empty() && self.symbols.is_empty() && self.phase.is_one()) {
            out.push(scalar);
        }
        out.extend(parts);
        if !self.phase.is_one() && self.phase.0 != Ratio::new(1, 2) {
            out.push(self.phase.to_string());
        }
        for (k, e) in &self.symbols {
            out.push(if *e == r(1) { k.clone() } else { format!("{}{}", k, fmt_exp(e)) });
        }
        write!(f, "{}", out.join(" * "))
    }
}

pub const PHI_NORM: &str = "<phi,phi>";
pub const F_NORM: &str = "<f,f>";
pub const XI24: &str = "xi(2)xi(4)";
pub const L_TAU: &str = "L(1,tau_p)";
pub const L_CENTRAL: &str = "Lambda(1/2,Spn(pi)_K x nu)";
pub const L_AD: &str = "Lambda(1,pi,ad)";
pub const E_P: &str = "e(pi_p,nu_p)";
pub const ALPHA_LOC: &str = "alpha_p";
pub const ALPHA_P: &str = "alpha_P";
pub const OMEGA: &str = "Omega";
pub const TRACE_PHASE: &str = "exp(4 pi i Tr(S i))";

/// c·π^k with c rational.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PiMultiple {
    pub coeff: Ratio<i64>,
    pub pi_power: i32,
}

impl PiMultiple {
    pub fn mul(&self, o: &Self) -> Self {
        PiMultiple { coeff: self.coeff * o.coeff, pi_power: self.pi_power + o.pi_power }
    }
}

impl fmt::Display for PiMultiple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} pi^{}", self.coeff, self.pi_power)
    }
}

fn bernoulli(n: usize) -> Ratio<i64> {
    let mut b = vec![Ratio::<i64>::one()];
    for m in 1..=n {
        let mut s = Ratio::zero();
        let mut c = 1i64;
        for (j, bj) in b.iter().enumerate() {
            s += *bj * r(c);
            c = c * (m as i64 + 1 - j as i64) / (j as i64 + 1);
        }
        b.push(-s / r(m as i64 + 1));
    }
    b[n]
}

fn factorial(n: i64) -> i64 {
    (1..=n).product()
}

/// ξ(2k) = π^{−k}Γ(k)ζ(2k), from ζ(2k) = (−1)^{k+1}B_{2k}(2π)^{2k}/(2(2k)!).
pub fn xi_even(k: u32) -> PiMultiple {
    let k = k as i64;
    let sign = if k % 2 == 1 { 1 } else { -1 };
    let zeta = bernoulli(2 * k as usize) * r(sign * (1 << (2 * k))) / r(2 * factorial(2 * k));
    PiMultiple { coeff: zeta * r(factorial(k - 1)), pi_power: k as i32 }
}

/// 2ξ(2)ξ(4)∏_{q|N⁺}(q²+1)∏_{ℓ|N⁻}(ℓ²−1).
pub fn mass_volume(n_plus: i64, n_minus: i64) -> Result<PiMultiple, AssemblyError> {
    for n in [n_plus, n_minus] {
        if !squarefree(n) && n != 1 {
            return Err(AssemblyError::NotSquarefree(n));
        }
    }
    if n_plus.gcd(&n_minus) != 1 {
        return Err(AssemblyError::NotCoprime(n_plus, n_minus));
    }
    let mut c = r(2);
    for (q, _) in factor(n_plus) {
        c *= r(q * q + 1);
    }
    for (l, _) in factor(n_minus) {
        c *= r(l * l - 1);
    }
    Ok(PiMultiple { coeff: c, pi_power: 0 }.mul(&xi_even(1)).mul(&xi_even(2)))
}

/// ν as values on the greedy generators of 𝒢_level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NuSpec {
    pub level: u32,
    pub values: Vec<Ratio<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalDatum {
    pub kappa: i32,
    pub n_plus: i64,
    pub n_minus: i64,
    pub delta_k: i64,
    pub p: i64,
    pub alpha_p: RatFunc,
    pub beta_p: RatFunc,
    /// ε_ℓ(π) for every ℓ | N.
    pub signs: BTreeMap<i64, i64>,
    pub s_pi: u32,
    /// None is the trivial character.
    pub nu: Option<NuSpec>,
    /// Replaces the central-value symbol when given.
    pub central_value: Option<Ratio<i64>>,
}

impl GlobalDatum {
    /// N = 1, trivial ν, symbolic α_P, β_P.
    pub fn simple(delta_k: i64, p: i64, kappa: i32, s_pi: u32) -> Self {
        GlobalDatum {
            kappa,
            n_plus: 1,
            n_minus: 1,
            delta_k,
            p,
            alpha_p: alpha(),
            beta_p: beta(),
            signs: BTreeMap::new(),
            s_pi,
            nu: None,
            central_value: None,
        }
    }

    pub fn validate(&self) -> Result<ImagQuadField, AssemblyError> {
        let field = ImagQuadField::new(self.delta_k)?;
        if self.kappa < 1 {
            return Err(AssemblyError::Invalid(format!("weight {}", self.kappa)));
        }
        if !matches!(self.s_pi, 1 | 2) {
            return Err(AssemblyError::Invalid(format!("s_pi = {} is not 1 or 2", self.s_pi)));
        }
        for n in [self.n_plus, self.n_minus] {
            if n != 1 && !squarefree(n) {
                return Err(AssemblyError::NotSquarefree(n));
            }
        }
        if self.n_plus.gcd(&self.n_minus) != 1 {
            return Err(AssemblyError::NotCoprime(self.n_plus, self.n_minus));
        }
        if prime_factors(self.n_minus).len() % 2 == 1 {
            return Err(AssemblyError::OddNMinus(self.n_minus));
        }
        if !is_prime(self.p) || (self.n_plus * self.n_minus) % self.p == 0 {
            return Err(AssemblyError::BadP(self.p));
        }
        for l in prime_factors(self.n_plus) {
            if splitting_type(l, self.delta_k) != Splitting::Split {
                return Err(AssemblyError::Heegner(l, "divides N+ but does not split in K".into()));
            }
        }
        for l in prime_factors(self.n_minus) {
            if splitting_type(l, self.delta_k) == Splitting::Split {
                return Err(AssemblyError::Heegner(l, "divides N- but splits in K".into()));
            }
        }
        let primes: Vec<i64> = prime_factors(self.n_plus * self.n_minus);
        for l in &primes {
            if !matches!(self.signs.get(l), Some(1) | Some(-1)) {
                return Err(AssemblyError::Sign(*l));
            }
        }
        if let Some(l) = self.signs.keys().find(|l| !primes.contains(l)) {
            return Err(AssemblyError::Sign(*l));
        }
        if self.alpha_p.is_zero() || self.beta_p.is_zero() {
            return Err(AssemblyError::Invalid("Satake parameters must be nonzero".into()));
        }
        Ok(field)
    }

    /// Flat `key = value` text; `#` starts a comment.
    pub fn from_config(text: &str) -> Result<Self, AssemblyError> {
        let mut kv = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| AssemblyError::Config(i + 1, "expected key = value".into()))?;
            kv.insert(k.trim().to_string(), (i + 1, v.trim().to_string()));
        }
        let take = |k: &str| kv.get(k).cloned();
        let int_of = |k: &str, default: Option<i64>| -> Result<i64, AssemblyError> {
            match take(k) {
                Some((i, v)) => v.parse().map_err(|_| AssemblyError::Config(i, format!("{k}: not an integer"))),
                None => default.ok_or_else(|| AssemblyError::Config(0, format!("missing key {k}"))),
            }
        };
        let ratio_of = |i: usize, s: &str| -> Result<Ratio<i64>, AssemblyError> {
            let bad = || AssemblyError::Config(i, format!("{s}: not a rational number"));
            match s.split_once('/') {
                Some((a, b)) => {
                    let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                    if b == 0 {
                        return Err(bad());
                    }
                    Ok(Ratio::new(a, b))
                }
                None => Ok(r(s.parse().map_err(|_| bad())?)),
            }
        };
        let mut g = GlobalDatum::simple(int_of("delta_k", None)?, int_of("p", None)?, int_of("kappa", None)? as i32, int_of("s_pi", Some(1))? as u32);
        g.n_plus = int_of("n_plus", Some(1))?;
        g.n_minus = int_of("n_minus", Some(1))?;
        for (k, sym) in [("alpha_p", &mut g.alpha_p), ("beta_p", &mut g.beta_p)] {
            if let Some((i, v)) = take(k) {
                *sym = parse(&v).map_err(|e| AssemblyError::Config(i, e.to_string()))?;
            }
        }
        if let Some((i, v)) = take("signs") {
            for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (l, e) = item.split_once(':').ok_or_else(|| AssemblyError::Config(i, format!("{item}: expected l:sign")))?;
                let l: i64 = l.trim().parse().map_err(|_| AssemblyError::Config(i, format!("{item}: bad prime")))?;
                let e: i64 = e.trim().parse().map_err(|_| AssemblyError::Config(i, format!("{item}: bad sign")))?;
                g.signs.insert(l, e);
            }
        }
        if let Some((i, v)) = take("nu") {
            let level = int_of("nu_level", Some(0))? as u32;
            let values = v.split_whitespace().map(|s| ratio_of(i, s)).collect::<Result<_, _>>()?;
            g.nu = Some(NuSpec { level, values });
        }
        if let Some((i, v)) = take("central_value") {
            g.central_value = Some(ratio_of(i, &v)?);
        }
        let known = ["delta_k", "p", "kappa", "s_pi", "n_plus", "n_minus", "alpha_p", "beta_p", "signs", "nu", "nu_level", "central_value"];
        if let Some((k, (i, _))) = kv.iter().find(|(k, _)| !known.contains(&k.as_str())) {
            return Err(AssemblyError::Config(*i, format!("unknown key {k}")));
        }
        Ok(g)
    }
}

/// Field-dependent quantities in the totally real setting; `d` is [F : ℚ].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldData {
    pub d: i64,
    pub delta_f: SymProduct,
    pub q_k: SymProduct,
    pub index: SymProduct,
    pub norm_4s: SymProduct,
    pub norm_s: SymProduct,
    pub q: SymProduct,
}

impl FieldData {
    pub fn symbolic(d: i64) -> Self {
        FieldData {
            d,
            delta_f: SymProduct::sym("Delta_F"),
            q_k: SymProduct::sym("Q_K"),
            index: SymProduct::sym("[o_K:o_F+theta o_F]"),
            norm_4s: SymProduct::sym("N(4S)"),
            norm_s: SymProduct::sym("N(S)"),
            q: SymProduct::sym("q_p"),
        }
    }

    /// F = ℚ with S the norm form of o_K = ℤ + ℤθ.
    pub fn rational(field: &ImagQuadField, p: i64) -> Self {
        let det = field.s_theta().det_quarter();
        FieldData {
            d: 1,
            delta_f: SymProduct::one(),
            q_k: SymProduct::one(),
            index: SymProduct::one(),
            norm_4s: SymProduct::from_ratio(det * r(16)),
            norm_s: SymProduct::from_ratio(det),
            q: SymProduct::integer(p),
        }
    }
}

/// Global constants of a validated datum, as they enter every display.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolved {
    pub field: ImagQuadField,
    pub kappa: i32,
    pub s_pi: u32,
    pub n: i64,
    /// max(1, c(ν)).
    pub level: u32,
    pub conductor: u32,
    pub eps_n_plus: SymProduct,
    pub eps_n_minus: SymProduct,
    /// ν(𝔑₀⁺).
    pub nu_n0: SymProduct,
    /// ∏_{ℓ | (N⁻, Δ_K)} (1 − ε_ℓ ν(l_K)).
    pub ramified: SymProduct,
    /// The same product without ν.
    pub ramified_untwisted: SymProduct,
    pub central: SymProduct,
    /// e(π_p, ν_p) with q = p, when its local values are rational.
    pub euler: Option<RatFunc>,
    pub alpha_p: RatFunc,
}

/// A root b of b² ≡ −Δ_K (mod 4ℓ) with 0 ≤ b < 2ℓ, fixing a prime above ℓ.
fn prime_root(delta_k: i64, l: i64) -> i64 {
    (0..2 * l).find(|b| (b * b + delta_k).rem_euclid(4 * l) == 0).expect("ℓ splits or ramifies")
}

/// The form of 𝔩 ∩ O_{pⁿ} for the prime 𝔩 above ℓ fixed by `prime_root`.
fn prime_form(field: &ImagQuadField, p: i64, n: u32, l: i64) -> Form {
    let b0 = prime_root(field.delta_k, l);
    let pn = p.pow(n);
    Form::new(l, pn * b0, pn * pn * (b0 * b0 + field.delta_k) / (4 * l))
}

/// Replaces the odd-free powers of u by powers of p; None if an odd power occurs.
pub fn at_p(f: &RatFunc, p: i64) -> Option<RatFunc> {
    let conv = |poly: &Poly| -> Option<Poly> {
        let mut terms = Vec::new();
        for (m, c) in poly.terms() {
            if m[0] % 2 != 0 {
                return None;
            }
            let k = m[0] / 2;
            let b = BigRational::from_integer(BigInt::from(p));
            let s: Rat = if k >= 0 { pow_big(&b, k as u32) } else { pow_big(&b, (-k) as u32).recip() };
            let mut m2 = *m;
            m2[0] = 0;
            terms.push((m2, c * &s));
        }
        Some(Poly::from_terms(terms))
    };
    RatFunc::normalize(conv(f.numer())?, conv(f.denom())?).ok()
}

fn root_to_ratfunc(z: RootOfUnity) -> Option<RatFunc> {
    if z.is_one() {
        Some(int(1))
    } else if z.0 == Ratio::new(1, 2) {
        Some(int(-1))
    } else {
        None
    }
}

pub fn resolve(g: &GlobalDatum) -> Result<Resolved, AssemblyError> {
    let field = g.validate()?;
    let p = g.p;
    let nu_level = g.nu.as_ref().map_or(0, |s| s.level);
    let tower = RingClassTower::new(&field, p, nu_level)?;
    let chr = match &g.nu {
        None => None,
        Some(spec) => {
            let grp = tower.group(spec.level)?;
            let gens = generators(grp);
            if gens.len() != spec.values.len() {
                return Err(AssemblyError::Invalid(format!(
                    "nu needs {} generator values at level {}, got {}",
                    gens.len(),
                    spec.level,
                    spec.values.len()
                )));
            }
            let assign: Vec<_> = gens.iter().zip(&spec.values).map(|(&i, &v)| (i, RootOfUnity::new(v))).collect();
            Some(anticyc_character(&tower, spec.level, &assign)?)
        }
    };
    let nu_at = |f: &Form| -> Result<RootOfUnity, AssemblyError> {
        let Some(c) = &chr else { return Ok(RootOfUnity::one()) };
        let grp = tower.group(nu_level)?;
        let i = grp.index_of(f).ok_or_else(|| AssemblyError::Invalid(format!("form {f} outside the class group")))?;
        Ok(c.value(i))
    };
    let conductor = chr.as_ref().map_or(0, |c| c.conductor);
    let mut nu_n0 = RootOfUnity::one();
    let mut eps_n_plus = SymProduct::one();
    for l in prime_factors(g.n_plus) {
        nu_n0 = nu_n0.mul(&nu_at(&prime_form(&field, p, nu_level, l))?);
        eps_n_plus = eps_n_plus.mul(&SymProduct::integer(g.signs[&l]));
    }
    let mut eps_n_minus = SymProduct::one();
    let mut ramified = SymProduct::one();
    let mut ramified_untwisted = SymProduct::one();
    for l in prime_factors(g.n_minus) {
        let e = g.signs[&l];
        eps_n_minus = eps_n_minus.mul(&SymProduct::integer(e));
        if field.delta_k % l == 0 {
            let z = nu_at(&prime_form(&field, p, nu_level, l))?;
            let v = root_to_ratfunc(z)
                .and_then(|x| x.as_rat())
                .ok_or_else(|| AssemblyError::Invalid(format!("nu(l_K) = {z} at ramified {l} is not a sign")))?;
            let s = if v.is_positive() { 1 } else { -1 };
            ramified = ramified.mul(&SymProduct::integer(1 - e * s));
            ramified_untwisted = ramified_untwisted.mul(&SymProduct::integer(1 - e));
        }
    }
    let sat = SatakeGSp4 { alpha_p: g.alpha_p.clone(), beta_p: g.beta_p.clone(), kappa: g.kappa };
    let case = if conductor > 0 {
        Some(EulerCase::Ramified(conductor))
    } else {
        let lam = |f: Form| -> Result<Option<RatFunc>, AssemblyError> {
            let base = class_group(-field.delta_k)?;
            let i0 = base.index_of(&f).expect("prime class");
            let z = match &chr {
                None => RootOfUnity::one(),
                Some(c) => {
                    let i = (0..tower.group(nu_level)?.order()).find(|&i| tower.project(nu_level, 0, i) == i0).expect("surjective");
                    c.value(i)
                }
            };
            Ok(root_to_ratfunc(z))
        };
        match splitting_type(p, field.delta_k) {
            Splitting::Inert => Some(EulerCase::Inert),
            Splitting::Split => {
                let b0 = prime_root(field.delta_k, p);
                let c0 = (b0 * b0 + field.delta_k) / (4 * p);
                match (lam(Form::new(p, b0, c0))?, lam(Form::new(p, -b0, c0))?) {
                    (Some(l1), Some(l2)) => Some(EulerCase::Split(l1, l2)),
                    _ => None,
                }
            }
            Splitting::Ramified => {
                let b0 = prime_root(field.delta_k, p);
                lam(Form::new(p, b0, (b0 * b0 + field.delta_k) / (4 * p)))?.map(EulerCase::RamifiedK)
            }
        }
    };
    let euler = case.map(|c| at_p(&modified_euler(&sat, &c), p).expect("integral q-powers"));
    let central = match g.central_value {
        Some(x) => SymProduct::from_ratio(x),
        None => SymProduct::sym(L_CENTRAL),
    };
    Ok(Resolved {
        field,
        kappa: g.kappa,
        s_pi: g.s_pi,
        n: g.n_plus * g.n_minus,
        level: conductor.max(1),
        conductor,
        eps_n_plus,
        eps_n_minus,
        nu_n0: SymProduct::root(nu_n0),
        ramified,
        ramified_untwisted,
        central,
        euler,
        alpha_p: g.alpha_p.clone(),
    })
}

fn two(k: i64) -> SymProduct {
    SymProduct::integer(2).powi(k).expect("nonzero")
}

fn sym_pow(name: &str, e: Ratio<i64>) -> SymProduct {
    SymProduct::sym(name).pow(e).expect("nonzero")
}

fn central_over_ad(rs: &Resolved) -> Result<SymProduct, AssemblyError> {
    rs.central.div(&SymProduct::integer(rs.n).mul(&SymProduct::sym(L_AD)))
}

/// B² from the global Bessel-period formula, including ⟨φ,φ⟩ and the trace phase.
pub fn bessel_square(fd: &FieldData, rs: &Resolved) -> Result<SymProduct, AssemblyError> {
    let k = rs.kappa as i64;
    let n = rs.level as i64;
    let num = [
        fd.delta_f.powi(2)?,
        SymProduct::sym(XI24),
        fd.norm_4s.powi(k)?,
        fd.index.powi(-3)?,
    ];
    let den = [
        rs.eps_n_plus.clone(),
        rs.nu_n0.clone(),
        two(2 * fd.d + rs.s_pi as i64),
        SymProduct::integer(rs.field.delta_k).pow(Ratio::new(1, 2))?,
        fd.norm_s.pow(Ratio::new(3, 2))?,
    ];
    let local = [
        sym_pow(E_P, r(2)),
        sym_pow(ALPHA_LOC, r(-2 * n)),
        fd.q.powi(-4 * n)?,
        sym_pow(L_TAU, r(2)),
        central_over_ad(rs)?,
        rs.ramified.clone(),
    ];
    let mut x = SymProduct::sym(PHI_NORM).mul(&SymProduct::sym(TRACE_PHASE));
    for f in num.iter().chain(&local) {
        x = x.mul(f);
    }
    for f in &den {
        x = x.div(f)?;
    }
    Ok(x)
}

/// vol of the image of K_∞^×Ô_{pⁿ}^× from the class number formula.
pub fn toric_volume(fd: &FieldData, rs: &Resolved) -> Result<SymProduct, AssemblyError> {
    Ok(two(fd.d + 1)
        .div(&fd.q_k)?
        .div(&SymProduct::integer(rs.field.w_k))?
        .mul(&fd.delta_f.div(&SymProduct::integer(rs.field.delta_k))?.pow(Ratio::new(1, 2))?)
        .mul(&SymProduct::sym(L_TAU))
        .mul(&fd.q.powi(-(rs.level as i64))?))
}

/// How the trace phase enters B = phase·vol·q⁻ⁿα⁻ⁿΛ(Θₙ).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TracePhase {
    /// e^{−2πi Tr(S i)}, as displayed.
    Literal,
    /// e^{+2πi Tr(S i)}, the sign for which the phase cancels.
    Cancelling,
}

/// Λ(Θₙ)² obtained from B² and the volume relation.
pub fn theta_square_from_bessel(fd: &FieldData, rs: &Resolved, phase: TracePhase) -> Result<SymProduct, AssemblyError> {
    let n = rs.level as i64;
    let b2 = bessel_square(fd, rs)?;
    let vol = toric_volume(fd, rs)?;
    let scale = vol.powi(2)?.mul(&fd.q.powi(-2 * n)?).mul(&sym_pow(ALPHA_LOC, r(-2 * n)));
    let ph = match phase {
        TracePhase::Literal => sym_pow(TRACE_PHASE, r(1)),
        TracePhase::Cancelling => sym_pow(TRACE_PHASE, r(-1)),
    };
    b2.mul(&ph).div(&scale)
}

/// Λ(Θₙ)² from the theta-element proposition, including ⟨φ,φ⟩.
pub fn theta_square(fd: &FieldData, rs: &Resolved) -> Result<SymProduct, AssemblyError> {
    let k = rs.kappa as i64;
    let mut x = SymProduct::sym(PHI_NORM)
        .mul(&fd.q_k.powi(2)?)
        .mul(&SymProduct::integer(rs.field.w_k).powi(2)?)
        .mul(&fd.delta_f)
        .mul(&SymProduct::integer(rs.field.delta_k).pow(Ratio::new(1, 2))?)
        .mul(&fd.norm_4s.powi(k)?)
        .div(&two(4 * fd.d + 2 + rs.s_pi as i64))?
        .div(&fd.norm_s.pow(Ratio::new(3, 2))?)?
        .mul(&SymProduct::sym(XI24))
        .mul(&central_over_ad(rs)?)
        .mul(&sym_pow(E_P, r(2)))
        .mul(&rs.eps_n_plus);
    x = x.div(&fd.index.powi(3)?)?.div(&rs.nu_n0)?;
    Ok(x.mul(&rs.ramified))
}

/// ν̂(Θ)² from the classical interpolation theorem, including ⟨f,f⟩.
pub fn global_display(rs: &Resolved) -> Result<SymProduct, AssemblyError> {
    let k = rs.kappa as i64;
    SymProduct::sym(F_NORM)
        .mul(&SymProduct::integer(rs.field.w_k).powi(2)?)
        .mul(&two(2 * k - 3))
        .mul(&SymProduct::integer(rs.field.delta_k).powi(k - 1)?)
        .mul(&sym_pow(E_P, r(2)))
        .mul(&central_over_ad(rs)?)
        .div(&two(rs.s_pi as i64))?
        .mul(&rs.eps_n_plus)
        .div(&rs.nu_n0)
        .map(|x| x.mul(&rs.ramified))
}

/// ν̂(Θ_f)² from the introduction's interpolation formula, with Ω = Λ(1,ad)/⟨f,f⟩.
pub fn intro_display(rs: &Resolved) -> Result<SymProduct, AssemblyError> {
    let k = rs.kappa as i64;
    let omega = SymProduct::sym(L_AD).div(&SymProduct::sym(F_NORM))?;
    let x = rs
        .central
        .div(&SymProduct::sym(OMEGA))?
        .mul(&sym_pow(E_P, r(2)))
        .div(&rs.nu_n0)?
        .mul(&sym_pow(ALPHA_P, r(6)))
        .mul(&two(2 * k - 3 - rs.s_pi as i64))
        .mul(&SymProduct::integer(rs.field.w_k).powi(2)?)
        .mul(&SymProduct::integer(rs.field.delta_k).powi(k - 1)?)
        .mul(&rs.eps_n_minus)
        .div(&SymProduct::integer(rs.n))?
        .mul(&rs.ramified_untwisted);
    x.substitute(OMEGA, &omega)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorValue {
    Exact(SymProduct),
    Local(RatFunc),
}

impl fmt::Display for FactorValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorValue::Exact(x) => write!(f, "{x}"),
            FactorValue::Local(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub name: String,
    pub value: FactorValue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpolationReport {
    pub factors: Vec<Factor>,
    /// Product of the exact factors; the local ones are in `local`.
    pub constant: SymProduct,
    pub local: RatFunc,
    /// `local`·α_P⁶, the normalization of the introduction.
    pub intro_local: RatFunc,
    /// Introduction display over the classical display, both as values of ν̂(·)².
    pub intro_ratio: Result<SymProduct, AssemblyError>,
    pub checks: Vec<CrossCheck>,
}

impl InterpolationReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    /// (kind, name, value) rows.
    pub fn rows(&self) -> Vec<(String, String, String)> {
        let mut rows: Vec<_> = self.factors.iter().map(|f| ("factor".into(), f.name.clone(), f.value.to_string())).collect();
        rows.push(("product".into(), "global exact".into(), self.constant.to_string()));
        rows.push(("product".into(), "global local".into(), self.local.to_string()));
        rows.push(("product".into(), "intro local".into(), self.intro_local.to_string()));
        let ratio = match &self.intro_ratio {
            Ok(x) => x.to_string(),
            Err(e) => format!("undefined ({e})"),
        };
        rows.push(("normalization".into(), "intro / global".into(), ratio));
        for c in &self.checks {
            rows.push(("check".into(), c.name.clone(), format!("{}\t{}", if c.holds { "pass" } else { "fail" }, c.detail)));
        }
        rows
    }
}

fn check(name: &str, holds: bool, detail: String) -> CrossCheck {
    CrossCheck { name: name.into(), holds, detail }
}

/// Compares a display (symbols e, α_P left free) with exact × local parts.
pub fn matches_display(display: &SymProduct, constant: &SymProduct, local: &RatFunc, euler: Option<&RatFunc>, alpha_p: &RatFunc) -> bool {
    let (ke, ka) = (display.exponent(E_P), display.exponent(ALPHA_P));
    if !ke.is_integer() || !ka.is_integer() {
        return false;
    }
    let (rest, e_local) = match euler {
        Some(e) => (display.without(E_P), e.pow(ke.to_integer() as i32)),
        None => (display.clone(), int(1)),
    };
    let want_local = &e_local * &alpha_p.pow(ka.to_integer() as i32);
    rest.without(ALPHA_P) == *constant && *local == want_local
}

pub fn interpolation_rhs(g: &GlobalDatum) -> Result<InterpolationReport, AssemblyError> {
    let rs = resolve(g)?;
    let k = rs.kappa as i64;
    let mut factors = vec![
        Factor { name: "w_K^2".into(), value: FactorValue::Exact(SymProduct::integer(rs.field.w_k).powi(2)?) },
        Factor { name: "2^(2k-3)".into(), value: FactorValue::Exact(two(2 * k - 3)) },
        Factor { name: "Delta_K^(k-1)".into(), value: FactorValue::Exact(SymProduct::integer(rs.field.delta_k).powi(k - 1)?) },
    ];
    match &rs.euler {
        Some(e) => factors.push(Factor { name: "e(pi_p,nu_p)^2".into(), value: FactorValue::Local(e.pow(2)) }),
        None => factors.push(Factor { name: "e(pi_p,nu_p)^2".into(), value: FactorValue::Exact(sym_pow(E_P, r(2))) }),
    }
    factors.extend([
        Factor { name: "eps_N+(pi)".into(), value: FactorValue::Exact(rs.eps_n_plus.clone()) },
        Factor { name: "nu(N0+)^-1".into(), value: FactorValue::Exact(rs.nu_n0.inv()?) },
        Factor { name: "N^-1".into(), value: FactorValue::Exact(SymProduct::integer(rs.n).inv()?) },
        Factor { name: "2^(-s_pi)".into(), value: FactorValue::Exact(two(-(rs.s_pi as i64))) },
        Factor { name: "prod(1-eps_l nu(l_K))".into(), value: FactorValue::Exact(rs.ramified.clone()) },
        Factor {
            name: "central/adjoint".into(),
            value: FactorValue::Exact(rs.central.div(&SymProduct::sym(L_AD))?),
        },
    ]);
    let mut constant = SymProduct::one();
    let mut local = int(1);
    for f in &factors {
        match &f.value {
            FactorValue::Exact(x) => constant = constant.mul(x),
            FactorValue::Local(x) => local = &local * x,
        }
    }
    let intro_local = &local * &rs.alpha_p.pow(6);

    let mut checks = Vec::new();
    let global = global_display(&rs)?.div(&SymProduct::sym(F_NORM))?;
    checks.push(check(
        "factor product = classical display",
        matches_display(&global, &constant, &local, rs.euler.as_ref(), &rs.alpha_p),
        format!("{global}"),
    ));
    let intro_ratio = intro_display(&rs).and_then(|i| i.div(&global_display(&rs)?));
    let intro_norm = global.mul(&sym_pow(ALPHA_P, r(6)));
    checks.push(check(
        "intro factor product = alpha_P^6 x classical display",
        matches_display(&intro_norm, &constant, &intro_local, rs.euler.as_ref(), &rs.alpha_p),
        format!("{intro_norm}"),
    ));
    for d in [1, 2] {
        let fd = FieldData::symbolic(d);
        let a = theta_square_from_bessel(&fd, &rs, TracePhase::Cancelling)?;
        let b = theta_square(&fd, &rs)?;
        checks.push(check(&format!("Bessel formula -> theta formula, symbolic F, d = {d}"), a == b, format!("{b}")));
    }
    let fq = FieldData::rational(&rs.field, g.p);
    let lit = theta_square_from_bessel(&fq, &rs, TracePhase::Literal)?.div(&theta_square(&fq, &rs)?)?;
    checks.push(CrossCheck {
        name: "literal trace phase residual".into(),
        holds: true,
        detail: format!("{lit}"),
    });
    let th = theta_square(&fq, &rs)?;
    let phi = SymProduct::sym(F_NORM).div(&SymProduct::sym(XI24))?;
    let spec = th.substitute(PHI_NORM, &phi)?;
    let cls = global_display(&rs)?;
    checks.push(check("theta formula at F = Q, det S = Delta_K/4 = classical display", spec == cls, format!("{spec}")));
    let unit = Resolved { ramified: SymProduct::one(), ..rs.clone() };
    let pref = theta_square(&fq, &unit)?
        .without(PHI_NORM)
        .without(XI24)
        .without(E_P)
        .div(&central_over_ad(&rs)?)?
        .div(&rs.eps_n_plus)?
        .mul(&rs.nu_n0);
    let want = SymProduct::integer(rs.field.w_k).powi(2)?.mul(&SymProduct::integer(rs.field.delta_k).powi(k - 1)?).mul(&two(2 * k - 3 - rs.s_pi as i64));
    checks.push(check("prefactor at F = Q = w_K^2 Delta_K^(k-1) 2^(2k-3-s_pi)", pref == want, format!("{pref}")));
    Ok(InterpolationReport { factors, constant, local, intro_local, intro_ratio, checks })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    /// Holds after imposing αβγ² = 1.
    PassCentral,
    /// The literal form fails; a corrected reading is reported as its own entry.
    Deviation,
    /// Outside the hypotheses of the identity; not an identity failure.
    Skipped,
    Fail,
}

impl Status {
    pub fn passed(self) -> bool {
        matches!(self, Status::Pass | Status::PassCentral | Status::Skipped)
    }

    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::PassCentral => "pass_central",
            Status::Deviation => "deviation",
            Status::Skipped => "skipped",
            Status::Fail => "fail",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SuiteEntry {
    pub group: String,
    pub name: String,
    pub anchor: String,
    pub status: Status,
    pub detail: String,
}

impl SuiteEntry {
    pub fn tsv(&self) -> String {
        format!("{}\t{}\t{}\t{}\t{}", self.group, self.name, self.anchor, self.status.name(), self.detail)
    }
}

pub const GROUPS: [&str; 8] = ["arch", "bessel", "classgroup", "cm", "hecke", "interp", "lfactors", "mass"];

struct Sink {
    group: &'static str,
    out: Vec<SuiteEntry>,
}

impl Sink {
    fn push(&mut self, name: impl Into<String>, anchor: &str, status: Status, detail: impl Into<String>) {
        self.out.push(SuiteEntry { group: self.group.into(), name: name.into(), anchor: anchor.into(), status, detail: detail.into() });
    }

    fn bool(&mut self, name: impl Into<String>, anchor: &str, ok: bool, detail: impl Into<String>) {
        self.push(name, anchor, if ok { Status::Pass } else { Status::Fail }, detail);
    }

    fn error(&mut self, name: impl Into<String>, anchor: &str, e: impl fmt::Display) {
        self.push(name, anchor, Status::Fail, e.to_string());
    }
}

fn hecke_status(s: &IdentityStatus) -> Status {
    if s.generic {
        Status::Pass
    } else if s.central {
        Status::PassCentral
    } else {
        Status::Fail
    }
}

fn suite_hecke(s: &mut Sink) {
    for st in relation_checks() {
        s.push(format!("relations: {}", st.name), "iwahori-hecke relations", hecke_status(&st), "");
    }
    for st in eigen_checks() {
        s.push(format!("eigen: {}", st.name), "ordinary vectors", hecke_status(&st), "");
    }
}

fn suite_bessel(s: &mut Sink) {
    for eps in [1, -1] {
        let d = match SteinbergDatum::new(eps, gamma(), delta()) {
            Ok(d) => d,
            Err(e) => return s.error("steinberg: datum", "steinberg", e),
        };
        let series = bessel_steinberg(&d, BesselPath::Series);
        let closed = bessel_steinberg(&d, BesselPath::Closed);
        let derived = bessel_steinberg(&d, BesselPath::Derived);
        match (series, closed, derived) {
            (Ok(a), Ok(b), Ok(c)) => {
                let lit = if a == b { Status::Pass } else { Status::Deviation };
                let quot = b.checked_div(&a).map(|x| x.to_string()).unwrap_or_default();
                s.push(format!("steinberg: series = literal closed form (eps={eps:+})"), "steinberg closed form", lit, format!("closed/series = {quot}"));
                s.bool(format!("steinberg: series = closed form with L(3/2, eps sigma^-1) (eps={eps:+})"), "steinberg closed form", a == c, "");
            }
            (a, b, c) => s.error(format!("steinberg: evaluation (eps={eps:+})"), "steinberg closed form", format!("{:?}", (a.err(), b.err(), c.err()))),
        }
        match paramodular_assembly(&d) {
            Ok(a) => s.bool(format!("paramodular: assembly = closed ratio (eps={eps:+})"), "paramodular ratio", a == paramodular_closed(&d), ""),
            Err(e) => s.error(format!("paramodular: assembly (eps={eps:+})"), "paramodular ratio", e),
        }
    }
    for e in [1, -1] {
        let a = quaternion_ratio_assembly(&gamma(), e);
        let st = quaternion_ratio_closed(&gamma(), e);
        let quot = a.checked_div(&st).map(|x| x.to_string()).unwrap_or_default();
        s.bool(format!("quaternion: assembly = closed ratio (e={e:+})"), "quaternionic ratio", a == st, format!("assembly/closed = {quot}"));
    }
    let encodings = |c: u32| {
        [
            ("split", CharWithConductor { lam: KLambda::Split { delta: delta() }, conductor: c }),
            ("inert", CharWithConductor { lam: KLambda::Inert, conductor: c }),
            ("ramified", CharWithConductor { lam: KLambda::Ramified { lambda: int(-1) }, conductor: c }),
        ]
    };
    let zz = &zeta(Half::int(2)) * &zeta(Half::int(4));
    for c in 0..4u32 {
        for (name, lam) in encodings(c) {
            for sign in [1, -1] {
                let label = format!("ordinary: chain = final ratio (c={c}, {name}, sign {sign:+})");
                let d = match OrdinaryDatum::minimal(alpha(), gamma(), lam.clone(), sign) {
                    Ok(d) => d,
                    Err(e) => {
                        s.error(label, "ordinary ratio", e);
                        continue;
                    }
                };
                let ch = ordinary_chain(&d);
                let tau = &l_tau(d.lam.splitting()) * &zz;
                let ok = ch.j_normalized == ordinary_j_target(&d)
                    && ch.spherical == spherical_target(&d)
                    && &ch.ratio / &tau == &ordinary_ratio(&d, OrdStage::Final) / &tau;
                s.bool(label, "ordinary ratio", ok, "");
            }
        }
    }
}

fn suite_lfactors(s: &mut Sink) {
    let lam = CharWithConductor::unramified(KLambda::Split { delta: delta() });
    let mu = &alpha() * &gamma();
    let chi = ChiTriple::from_mu_sigma(&mu, &gamma());
    match bessel_fq_constant("s2", &chi, &lam) {
        Ok(c) => s.bool("fe constants: c(s2) = 1", "functional equation constants", c.is_one(), c.to_string()),
        Err(e) => s.error("fe constants: c(s2) = 1", "functional equation constants", e),
    }
    match bessel_fq_constant("s1s2s1s2", &chi, &lam) {
        Ok(c) => {
            let ok = c == fq_dagger_display(&chi, &lam) && c == fq_statement(&mu, &gamma(), &lam);
            s.bool("fe constants: c(w dagger) = product of gamma factors", "functional equation constants", ok, "");
        }
        Err(e) => s.error("fe constants: c(w dagger)", "functional equation constants", e),
    }
    let mut rng = StdRng::seed_from_u64(7);
    let mut bad = Vec::new();
    for i in 0..100 {
        let ch = random_fchar(&mut rng);
        let sh = Half(rng.gen_range(-9..10));
        let lhs = &gamma_factor(sh, &ch) * &gamma_factor(sh.one_minus(), &ch.inverse());
        if lhs != int(ch.sign) {
            bad.push(i);
        }
    }
    s.bool("fe constants: gamma(s) gamma(1-s) = chi(-1), 100 random characters", "tate gamma factor", bad.is_empty(), format!("failures {bad:?}"));
    let (a, g, d) = (alpha(), gamma(), delta());
    let mut ok = true;
    for kappa in 1..5 {
        let sat = SatakeGSp4::from_local(&a, &g, kappa);
        let pairs = [
            (EulerCase::Split(d.clone(), d.inv().unwrap()), KLambda::Split { delta: d.clone() }),
            (EulerCase::Inert, KLambda::Inert),
            (EulerCase::RamifiedK(int(-1)), KLambda::Ramified { lambda: int(-1) }),
        ];
        for (case, lam) in pairs {
            ok &= modified_euler(&sat, &case) == modified_euler_local(&a, &g, &CharWithConductor::unramified(lam));
        }
        for c in 1..4 {
            let lam = CharWithConductor { lam: KLambda::Inert, conductor: c };
            ok &= modified_euler(&sat, &EulerCase::Ramified(c)) == modified_euler_local(&a, &g, &lam);
        }
    }
    s.bool("euler: classical multiplier = local multiplier, all four cases", "p-adic multiplier", ok, "");
    let sat = SatakeGSp4 { alpha_p: alpha(), beta_p: gamma(), kappa: 3 };
    s.bool("hecke polynomial: roots reproduce coefficients", "hecke polynomial", sat.product_coeffs() == sat.hecke_coeffs(), "");
}

/// A random character of F^×: unramified with a symbolic value, or ramified with a symbolic root number.
pub fn random_fchar(rng: &mut StdRng) -> FChar {
    let k = rng.gen_range(1..6);
    let num = rng.gen_range(1..9);
    if rng.gen_bool(0.5) {
        FChar::unramified(&int(num) * &gamma().pow(if rng.gen_bool(0.5) { 1 } else { -1 }))
    } else {
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        FChar::ramified(k as u32, &(&int(num) * &delta()) * &u().pow(rng.gen_range(-3..4)), sign)
    }
}

fn suite_arch(s: &mut Sink) {
    let oracle = bf_from_str("9.65336556019460238346455418608691896579651682388403894907384e-8");
    match ArchDatum::new(2, "1", "0", "1") {
        Ok(d) => {
            let v = arch_bessel_ratio(&d);
            let rd = rel_diff(&v, &oracle);
            s.bool("arch: kappa=2, S=1 closed form vs 50-digit oracle", "archimedean ratio", bf_lt(&rd, &bf_from_str("1e-30")), format!("rel diff {}", to_decimal(&rd)));
        }
        Err(e) => s.error("arch: kappa=2 datum", "archimedean ratio", e),
    }
    for k in 1..=6 {
        match ArchDatum::new(k, "1.5", "0.25", "0.75") {
            Ok(d) => {
                let rd = rel_diff(&arch_bessel_assembly(&d), &arch_bessel_ratio(&d));
                s.bool(format!("arch: assembly = closed form (kappa={k})"), "archimedean ratio", bf_lt(&rd, &bf_from_str("1e-30")), format!("rel diff {}", to_decimal(&rd)));
            }
            Err(e) => s.error(format!("arch: datum kappa={k}"), "archimedean ratio", e),
        }
    }
}

pub const CLASS_GRID_D: [i64; 9] = [3, 4, 7, 8, 11, 15, 20, 23, 24];
pub const CLASS_GRID_P: [i64; 5] = [2, 3, 5, 7, 13];

fn suite_classgroup(s: &mut Sink) {
    match class_group(-23) {
        Ok(g) => s.bool("class number h(-23) = 3", "class groups", g.order() == 3 && g.verify().is_ok(), format!("h = {}", g.order())),
        Err(e) => s.error("class number h(-23)", "class groups", e),
    }
    match class_group(-100) {
        Ok(g) => s.bool("class number h(-100) = 2", "class groups", g.order() == 2 && g.verify().is_ok(), format!("h = {}", g.order())),
        Err(e) => s.error("class number h(-100)", "class groups", e),
    }
    let mut bad = Vec::new();
    let mut count = 0;
    for d in CLASS_GRID_D {
        for p in CLASS_GRID_P {
            for n in 0..=3 {
                count += 1;
                if ring_class_number(d, p, n).is_err() {
                    bad.push(format!("({d},{p},{n})"));
                }
            }
        }
    }
    s.bool("ring class numbers: formula = form enumeration over the grid", "class number formula", bad.is_empty(), format!("{count} cases, failures {bad:?}"));
    let field = ImagQuadField::new(7).expect("fundamental");
    let ok = class_number_formula(&field, 2, 2).ok() == Some(2) && kronecker(-7, 2) == 1;
    s.bool("ring class numbers: h(O_4) for Delta_K = 7", "class number formula", ok, "");
}

pub const CM_DISCS: [i64; 4] = [3, 4, 7, 11];
pub const CM_PRIMES: [i64; 3] = [5, 7, 13];

/// Coefficients on random classes of the order discriminant and on CM classes.
pub fn random_expansion(rng: &mut StdRng, t: &CmTower, n: u32) -> FourierExpansion {
    let m = t.order_level(n.max(1));
    let mut f = FourierExpansion::new(m);
    let cl = level_classes(t.field.order_disc(t.p, n), m, false);
    for _ in 0..8 {
        let (_, b) = cl[rng.gen_range(0..cl.len())];
        f.set(&b, int(rng.gen_range(-9..10)));
    }
    for pt in &t.levels[n as usize].points {
        if rng.gen_bool(0.6) {
            f.set(&pt.s, int(rng.gen_range(-9..10)));
        }
    }
    f
}

fn suite_cm(s: &mut Sink) {
    let mut rng = StdRng::seed_from_u64(2024);
    for d in CM_DISCS {
        for p in CM_PRIMES {
            let tag = format!("Delta_K={d}, p={p}");
            if d % p == 0 {
                s.push(format!("cm: all identities ({tag})"), "cm points", Status::Skipped, "p ramifies in K, outside the Heegner setting");
                continue;
            }
            for n in 0..=2 {
                match (enumerate_cm_points(d, p, n, 1), ring_class_number(d, p, n)) {
                    (Ok(pts), Ok(h)) => s.bool(format!("cm: count = ring class number ({tag}, n={n})"), "cm points", pts.len() as u64 == h, format!("{} points, h = {h}", pts.len())),
                    (a, b) => s.error(format!("cm: count ({tag}, n={n})"), "cm points", format!("{:?} {:?}", a.err(), b.err())),
                }
            }
            let t = match CmTower::new(d, p, 3, 1) {
                Ok(t) => t,
                Err(e) => {
                    s.error(format!("cm: tower ({tag})"), "cm points", e);
                    continue;
                }
            };
            for n in 1..=2 {
                match t.fiber_identity(n) {
                    Ok(v) => {
                        let bad: Vec<usize> = v.iter().filter(|x| !x.1).map(|x| x.0).collect();
                        s.bool(format!("cm: fiber multiset identity ({tag}, n={n})"), "galois action", bad.is_empty(), format!("{} sigma, failures {bad:?}", v.len()));
                    }
                    Err(e) => s.error(format!("cm: fiber identity ({tag}, n={n})"), "galois action", e),
                }
            }
            let aq = &alpha() * &beta();
            let mut fails = 0;
            for _ in 0..20 {
                let f = random_expansion(&mut rng, &t, 2);
                if !master_identity(&f, &t, &aq, 1).unwrap_or(false) {
                    fails += 1;
                }
            }
            s.bool(format!("theta: pushforward master identity, 20 random f ({tag})"), "theta elements", fails == 0, format!("{fails} failures"));
            let a_q = &int(3) * &alpha();
            let mut k = 0;
            let ok = synthetic_uq_eigen(&t, 1, 2, &a_q, || {
                k += 1;
                &int(k) + &gamma()
            })
            .and_then(|f| {
                let hi = theta_element(&f, &t, &a_q, 2)?;
                let lo = theta_element(&f, &t, &a_q, 1)?;
                let uq = fourier_hecke(&f, HeckeOp::UQ, p);
                let eigen = t.levels[1].points.iter().all(|pt| uq.get(&pt.s) == &a_q * &f.get(&pt.s));
                Ok(theta_pushforward(&hi, &t)? == lo && eigen)
            });
            match ok {
                Ok(b) => s.bool(format!("theta: norm compatibility for U^Q-eigen data ({tag})"), "norm compatibility", b, ""),
                Err(e) => s.error(format!("theta: norm compatibility ({tag})"), "norm compatibility", e),
            }
        }
    }
}

fn suite_mass(s: &mut Sink) {
    let xi = [(1, Ratio::new(1, 6), 1), (2, Ratio::new(1, 90), 2)];
    for (k, c, e) in xi {
        let v = xi_even(k);
        s.bool(format!("mass: xi({}) = {} pi^{}", 2 * k, c, e), "mass formula", v == PiMultiple { coeff: c, pi_power: e }, v.to_string());
    }
    for (np, nm, want) in [(1, 1, Ratio::new(1, 270)), (2, 1, Ratio::new(1, 54)), (1, 6, Ratio::new(24, 270))] {
        let label = format!("mass: volume(N+={np}, N-={nm}) = {want} pi^3");
        match mass_volume(np, nm) {
            Ok(v) => s.bool(label, "mass formula", v == PiMultiple { coeff: want, pi_power: 3 }, v.to_string()),
            Err(e) => s.error(label, "mass formula", e),
        }
    }
    let base = mass_volume(1, 1).expect("unit level");
    let mut ok = true;
    for (a, b) in [(2, 3), (5, 7), (6, 35), (10, 21), (3, 2)] {
        let v = mass_volume(a, b).expect("coprime square-free");
        let mut want = base.coeff;
        for (q, _) in factor(a) {
            want *= r(q * q + 1);
        }
        for (l, _) in factor(b) {
            want *= r(l * l - 1);
        }
        ok &= v.coeff == want && v.pi_power == 3;
        let split = mass_volume(a, 1).unwrap().coeff * mass_volume(1, b).unwrap().coeff / base.coeff;
        ok &= split == v.coeff;
    }
    s.bool("mass: multiplicativity over N+ and N- prime factors", "mass formula", ok, "");
    s.bool("mass: non-square-free input rejected", "mass formula", mass_volume(4, 1).is_err() && mass_volume(2, 2).is_err(), "");
}

/// Representative data: trivial and non-trivial ν, N⁺ > 1, and N⁻ with a ramified prime.
pub fn sample_data() -> Vec<(String, GlobalDatum)> {
    let mut out = Vec::new();
    for (d, p, k, s) in [(7, 5, 3, 1), (4, 13, 2, 1), (3, 7, 4, 2), (11, 3, 5, 1)] {
        out.push((format!("Delta_K={d}, p={p}, kappa={k}, N=1, trivial nu"), GlobalDatum::simple(d, p, k, s)));
    }
    let mut g = GlobalDatum::simple(4, 5, 3, 1);
    g.p = 13;
    g.nu = Some(NuSpec { level: 1, values: vec![Ratio::new(1, 6)] });
    out.push(("Delta_K=4, p=13, nu of order 6 and conductor 1".into(), g));
    let mut g = GlobalDatum::simple(15, 7, 2, 1);
    g.nu = Some(NuSpec { level: 0, values: vec![Ratio::new(1, 2)] });
    out.push(("Delta_K=15, p=7, unramified quadratic nu".into(), g));
    let mut g = GlobalDatum::simple(7, 3, 3, 2);
    g.n_plus = 2;
    g.signs.insert(2, -1);
    out.push(("Delta_K=7, p=3, N+=2".into(), g));
    let mut g = GlobalDatum::simple(3, 5, 2, 1);
    g.n_minus = 6;
    g.signs.insert(2, 1);
    g.signs.insert(3, -1);
    out.push(("Delta_K=3, p=5, N-=6".into(), g));
    out
}

fn suite_interp(s: &mut Sink) {
    for (label, g) in sample_data() {
        match interpolation_rhs(&g) {
            Ok(rep) => {
                let (st, detail) = match &rep.intro_ratio {
                    Ok(x) if *x == sym_pow(ALPHA_P, r(6)) => (Status::Pass, x.to_string()),
                    Ok(x) => (Status::Deviation, x.to_string()),
                    Err(e) => (Status::Deviation, e.to_string()),
                };
                s.push(format!("interp: intro display / classical display = alpha_P^6 ({label})"), "interpolation assembly", st, detail);
                for c in &rep.checks {
                    if c.name == "literal trace phase residual" {
                        let st = if c.detail == "1" { Status::Pass } else { Status::Deviation };
                        s.push(format!("interp: {} ({label})", c.name), "interpolation assembly", st, c.detail.clone());
                    } else {
                        s.bool(format!("interp: {} ({label})", c.name), "interpolation assembly", c.holds, c.detail.clone());
                    }
                }
            }
            Err(e) => s.error(format!("interp: report ({label})"), "interpolation assembly", e),
        }
    }
    let g = GlobalDatum::simple(7, 5, 3, 1);
    let ex = interpolation_rhs(&g).map(|rep| {
        let rs = resolve(&g).expect("valid");
        let want = SymProduct::integer(4).mul(&two(3)).mul(&SymProduct::integer(49)).mul(&two(-1)).mul(&SymProduct::sym(L_CENTRAL)).div(&SymProduct::sym(L_AD)).unwrap();
        rep.constant == want && rep.local == rs.euler.unwrap().pow(2)
    });
    s.bool("interp: trivial nu, N=1, s_pi=1 gives w^2 2^(2k-3) Delta^(k-1) e^2 / 2 (Delta_K=7, kappa=3)", "interpolation assembly", ex == Ok(true), "");
}

/// Runs the named groups (all when empty); entries sorted by group then name.
pub fn run_verification_suite(selection: &[&str]) -> Vec<SuiteEntry> {
    let chosen: Vec<&str> = if selection.is_empty() { GROUPS.to_vec() } else { selection.to_vec() };
    let mut out: Vec<SuiteEntry> = std::thread::scope(|sc| {
        let handles: Vec<_> = chosen
            .iter()
            .map(|&name| {
                sc.spawn(move || {
                    let Some(&group) = GROUPS.iter().find(|g| **g == name) else {
                        return vec![SuiteEntry {
                            group: name.into(),
                            name: "unknown group".into(),
                            anchor: "".into(),
                            status: Status::Fail,
                            detail: format!("known groups: {}", GROUPS.join(", ")),
                        }];
                    };
                    let mut s = Sink { group, out: Vec::new() };
                    match group {
                        "arch" => suite_arch(&mut s),
                        "bessel" => suite_bessel(&mut s),
                        "classgroup" => suite_classgroup(&mut s),
                        "cm" => suite_cm(&mut s),
                        "hecke" => suite_hecke(&mut s),
                        "interp" => suite_interp(&mut s),
                        "lfactors" => suite_lfactors(&mut s),
                        _ => suite_mass(&mut s),
                    }
                    s.out
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("suite worker panicked")).collect()
    });
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::qh;

    #[test]
    fn sym_product_arithmetic() {
        let x = SymProduct::rational(-12, 5);
        assert_eq!(x.to_string(), "-12/5");
        assert_eq!(x.rational_value(), Some(BigRational::new((-12).into(), 5.into())));
        let h = SymProduct::integer(7).pow(Ratio::new(1, 2)).unwrap();
        assert_eq!(h.mul(&h), SymProduct::integer(7));
        assert!(SymProduct::integer(-7).pow(Ratio::new(1, 2)).is_err());
        assert!(SymProduct::zero().inv().is_err());
        let s = SymProduct::sym("L").powi(2).unwrap().mul(&SymProduct::integer(3));
        assert_eq!(s.to_string(), "3 * L^2");
        assert_eq!(s.substitute("L", &SymProduct::integer(2)).unwrap(), SymProduct::integer(12));
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(1), Ratio::new(-1, 2));
        assert_eq!(bernoulli(2), Ratio::new(1, 6));
        assert_eq!(bernoulli(4), Ratio::new(-1, 30));
        assert_eq!(xi_even(1), PiMultiple { coeff: Ratio::new(1, 6), pi_power: 1 });
        assert_eq!(xi_even(2), PiMultiple { coeff: Ratio::new(1, 90), pi_power: 2 });
    }

    #[test]
    fn at_p_substitution() {
        let f = &(&qh(2) * &alpha()) + &int(1);
        assert_eq!(at_p(&f, 5).unwrap(), &(&int(5) * &alpha()) + &int(1));
        assert!(at_p(&u(), 5).is_none());
    }
}
