//! Local Bessel periods: Steinberg, paramodular, quaternionic, archimedean
//! and ordinary cases, with their series assemblies and closed forms.
//!
//! Sign convention for the Steinberg family: `eps` is ϵ = −ε(ϖ), so the
//! unramified quadratic character ε takes the value −ϵ at ϖ.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use thiserror::Error;

use crate::exact_arith::{int, q, qh, ArithError, RatFunc};
use crate::hecke_gsp4::{iwahori_pairing, phi_pa};
use crate::lfactors::{
    adjoint_principal, gamma_k_half, l_base_change, l_tau, l_value, spinor_adjoint_iia, spinor_principal, zeta,
    CharWithConductor, Half, KLambda, Splitting, Which,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BesselError {
    #[error("sign must be +1 or -1, got {0}")]
    BadSign(i64),
    #[error("{0} must be invertible")]
    NotInvertible(&'static str),
    #[error("cell {0} is outside the range covered by the cell formulas")]
    OutOfRange(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("S is not positive definite")]
    NotPositiveDefinite,
    #[error("cannot parse matrix entry {0:?}")]
    BadEntry(String),
    #[error("need n >= max(1, c(Λ)), got n = {n}, c = {c}")]
    BadLevel { n: u32, c: u32 },
    #[error("only the case with ϖ⁻¹S outside o_D⁻ is supported")]
    UnsupportedClass,
    #[error("Weyl word {0:?} is not reduced")]
    NonReduced(String),
    #[error("χ₁χ₂σ² must be 1")]
    CentralCharacter,
}

fn check_sign(e: i64) -> Result<(), BesselError> {
    if e == 1 || e == -1 {
        Ok(())
    } else {
        Err(BesselError::BadSign(e))
    }
}

fn split(delta: &RatFunc) -> CharWithConductor {
    CharWithConductor::unramified(KLambda::Split { delta: delta.clone() })
}

// ---------------------------------------------------------------------------
// Steinberg

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinbergDatum {
    pub eps: i64,
    pub gamma: RatFunc,
    pub delta: RatFunc,
}

impl SteinbergDatum {
    pub fn new(eps: i64, gamma: RatFunc, delta: RatFunc) -> Result<Self, BesselError> {
        check_sign(eps)?;
        if gamma.is_zero() {
            return Err(BesselError::NotInvertible("γ"));
        }
        if delta.is_zero() {
            return Err(BesselError::NotInvertible("δ"));
        }
        Ok(SteinbergDatum { eps, gamma, delta })
    }

    fn e(&self) -> RatFunc {
        int(self.eps)
    }

    /// The datum for σ⁻¹.
    pub fn inverse_sigma(&self) -> Self {
        SteinbergDatum { eps: self.eps, gamma: self.gamma.inv().unwrap(), delta: self.delta.clone() }
    }

    fn gi(&self) -> RatFunc {
        self.gamma.inv().unwrap()
    }

    fn di(&self) -> RatFunc {
        self.delta.inv().unwrap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TIndex {
    /// T'(m).
    Prime(u32),
    /// T_{v(y)}(v(x), v(w)).
    Cell { vy: u32, i: u32, j: u32 },
}

/// T'(0) = L(1, εΛ₀⁻¹).
pub fn t_prime_zero(d: &SteinbergDatum) -> RatFunc {
    l_value(Half::int(1), &(&-d.e() * &d.di()))
}

/// T'(m)/T'(0) = (1+ϵδ)(−ϵδ⁻¹)^m/(q^m(1−q⁻¹)) for m ≥ 1.
fn t_prime_rel(d: &SteinbergDatum, m: u32) -> RatFunc {
    if m == 0 {
        return RatFunc::one();
    }
    let one = RatFunc::one();
    let num = &(&one + &(&d.e() * &d.delta)) * &(&-d.e() * &d.di()).pow(m as i32);
    &num / &(&q().pow(m as i32) * &(&one - &q().pow(-1)))
}

/// Cell value divided by T'(0).
fn cell_rel(d: &SteinbergDatum, vy: u32, i: u32, j: u32) -> Result<RatFunc, BesselError> {
    let (ii, jj) = (i as i32, j as i32);
    let generic = || &(&(&d.e() * &d.gi().pow(ii + jj)) * &qh(-3 * (ii + jj))) * &d.delta.pow(jj - ii + 1);
    match (vy, i, j) {
        (0, i, _) if i >= 1 => Ok(generic()),
        (1, i, j) if i >= 2 && j >= 1 => Ok(generic()),
        (1, i, 0) if i >= 2 => {
            Ok(&(&(&d.gi().pow(ii) * &qh(-3 * ii)) * &d.delta.pow(2 - ii)) * &t_prime_rel(d, 1))
        }
        (1, 1, 0) => Ok(&d.gi().pow(2) * &q().pow(-3)),
        (1, 1, _) => Ok(&(&(&d.e() * &d.gi().pow(jj + 1)) * &qh(-3 * (jj + 1))) * &(&d.delta.pow(jj) * &t_prime_rel(d, 1))),
        _ => Err(BesselError::OutOfRange(format!("T_{vy}({i},{j})"))),
    }
}

pub fn steinberg_t(idx: TIndex, d: &SteinbergDatum) -> Result<RatFunc, BesselError> {
    let t0 = t_prime_zero(d);
    let rel = match idx {
        TIndex::Prime(m) => t_prime_rel(d, m),
        TIndex::Cell { vy, i, j } => cell_rel(d, vy, i, j)?,
    };
    Ok(&rel * &t0)
}

/// Σ_{k ≥ start} term(k) for a term known to be geometric in k; the ratio is
/// read off two consecutive terms and confirmed on a third.
fn geometric_tail(term: impl Fn(u32) -> Result<RatFunc, BesselError>, start: u32) -> Result<RatFunc, BesselError> {
    let (a, b, c) = (term(start)?, term(start + 1)?, term(start + 2)?);
    if a.is_zero() {
        return Ok(RatFunc::zero());
    }
    let r = &b / &a;
    assert_eq!(&c / &b, r, "cell terms are not geometric");
    Ok(RatFunc::sum_geometric(&a, &r, 0)?)
}

/// The pieces of the Steinberg series, each including the factor T'(0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinbergSeries {
    pub head: RatFunc,
    pub i0: RatFunc,
    pub j0: RatFunc,
    pub i1: RatFunc,
    pub j1: RatFunc,
    pub total: RatFunc,
}

pub fn steinberg_series(d: &SteinbergDatum) -> Result<SteinbergSeries, BesselError> {
    let t = |vy, i, j| steinberg_t(TIndex::Cell { vy, i, j }, d);
    let qq = q();
    let c = &RatFunc::one() - &q().pow(-1);
    let head = &qq * &(&t(0, 1, 0)? - &t(1, 1, 0)?);
    let i0 = geometric_tail(|i| Ok(&q().pow(i as i32) * &t(0, i, 0)?), 2)?;
    let j0 = geometric_tail(|j| Ok(&q().pow(j as i32 + 1) * &t(0, 1, j)?), 1)?;
    let i1 = &-&c * &geometric_tail(|i| Ok(&q().pow(i as i32) * &t(1, i, 0)?), 2)?;
    let j1 = &-&c * &geometric_tail(|j| Ok(&q().pow(j as i32 + 1) * &t(1, 1, j)?), 1)?;
    let total = &(&(&head + &(&c * &(&i0 + &j0))) + &i1) + &j1;
    Ok(SteinbergSeries { head, i0, j0, i1, j1, total })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BesselPath {
    /// Geometric-series assembly of the cell values.
    Series,
    /// The literal closed form, with L(3/2, εσ) in the denominator.
    Closed,
    /// The closed form obtained at the end of the series computation, with L(3/2, εσ⁻¹).
    Derived,
}

/// ϵγ⁻¹q^{-1/2}·L(1/2, σ_K⁻¹Λ)/(L(3/2, εσ^{±1})L(1, σ⁻²))·L(1, εΛ₀⁻¹).
fn steinberg_closed(d: &SteinbergDatum, sigma_sign: i32) -> RatFunc {
    let lk = l_base_change(Half(1), &d.gi(), &split(&d.delta));
    let l32 = l_value(Half(3), &(&-d.e() * &d.gamma.pow(sigma_sign)));
    let l1 = l_value(Half::int(1), &d.gi().pow(2));
    let pre = &(&d.e() * &d.gi()) * &qh(-1);
    &(&(&pre * &lk) / &(&l32 * &l1)) * &t_prime_zero(d)
}

pub fn bessel_steinberg(d: &SteinbergDatum, path: BesselPath) -> Result<RatFunc, BesselError> {
    match path {
        BesselPath::Series => Ok(steinberg_series(d)?.total),
        BesselPath::Closed => Ok(steinberg_closed(d, 1)),
        BesselPath::Derived => Ok(steinberg_closed(d, -1)),
    }
}

// ---------------------------------------------------------------------------
// Paramodular

/// γ(1/2, St⊗χ, ψ) for unramified χ with χ(ϖ) = x: −x·L(1, χ⁻¹)/L(1, χ).
pub fn gamma_steinberg_twist(x: &RatFunc) -> RatFunc {
    let one = Half::int(1);
    &(&-x * &l_value(one, &x.inv().unwrap())) / &l_value(one, x)
}

/// b(φ_σ, φ_{σ⁻¹}) = ζ(2)·q(φ^pa, φ^pa).
pub fn paramodular_pairing() -> RatFunc {
    &zeta(Half::int(2)) * &iwahori_pairing(&phi_pa(), &phi_pa())
}

/// The closed form, split K with Λ = (Λ₀, Λ₀⁻¹) and unit discriminants.
pub fn paramodular_closed(d: &SteinbergDatum) -> RatFunc {
    let lam = split(&d.delta);
    let spn = spinor_adjoint_iia(Half(1), &d.gamma, d.eps, &lam, Which::Spinor);
    let ad = spinor_adjoint_iia(Half::int(1), &d.gamma, d.eps, &lam, Which::Adjoint);
    let zz = &zeta(Half::int(2)) * &zeta(Half::int(4));
    let pre = &(&(&d.e() * &q()) * &(&RatFunc::one() + &q().pow(-2))) * &d.di();
    &(&(&pre * &zz) * &spn) / &(&l_tau(Splitting::Split) * &ad)
}

/// γ-factor × B(σ) × B(σ⁻¹) / pairing, with both periods from the series path.
pub fn paramodular_assembly(d: &SteinbergDatum) -> Result<RatFunc, BesselError> {
    let g = gamma_steinberg_twist(&(&-d.e() * &d.di()));
    let b1 = bessel_steinberg(d, BesselPath::Series)?;
    let b2 = bessel_steinberg(&d.inverse_sigma(), BesselPath::Series)?;
    Ok(&(&(&g * &b1) * &b2) / &paramodular_pairing())
}

pub fn paramodular_ratio(d: &SteinbergDatum) -> RatFunc {
    paramodular_closed(d)
}

// ---------------------------------------------------------------------------
// Quaternionic

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuatWhich {
    Alpha,
    Pairing,
    Ratio,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SClass {
    /// ϖ⁻¹S ∉ o_D⁻.
    Primitive,
    /// ϖ⁻¹S ∈ o_D⁻.
    Divisible,
}

/// α_p(S', x) written in y = q^{-x}: q^{3/2}y⁻¹·ζ_K(x+1/2)/(ζ(2x+1)ζ(x+3/2)).
pub fn quaternion_alpha_at(y: &RatFunc) -> RatFunc {
    let one = RatFunc::one();
    let y2 = &y.pow(2) * &q().pow(-1);
    let zeta_k = (&one - &y2).inv().unwrap();
    let z1 = (&one - &y2).inv().unwrap();
    let z32 = l_value(Half(3), y);
    &(&(&qh(3) / y) * &zeta_k) / &(&z1 * &z32)
}

/// B^σ(φ_σ) from α_p: q^{2s}·α_p(S', t − s) with γ = q^{-s}, ε(ϖ) = q^{-t}.
pub fn quaternion_b_from_alpha(gamma: &RatFunc, e: i64) -> RatFunc {
    let gi = gamma.inv().unwrap();
    &gi.pow(2) * &quaternion_alpha_at(&(&int(e) * &gi))
}

/// q^{3/2}(εσ)(ϖ)⁻¹·L(1/2, (εσ⁻¹)_K)/(L(1, σ⁻²)L(3/2, εσ⁻¹)), K unramified.
pub fn quaternion_b_closed(gamma: &RatFunc, e: i64) -> RatFunc {
    let gi = gamma.inv().unwrap();
    let x = &int(e) * &gi;
    let lk = l_base_change(Half(1), &x, &CharWithConductor::unramified(KLambda::Inert));
    let pre = &qh(3) / &(&int(e) * gamma);
    &(&pre * &lk) / &(&l_value(Half::int(1), &gi.pow(2)) * &l_value(Half(3), &x))
}

pub fn quaternion_pairing() -> RatFunc {
    &zeta(Half::int(2)) / &zeta(Half::int(4))
}

/// The closed ratio q³(1−q⁻²)ζ(4)L(1/2, Spn⊗ε_K)/(ζ(2)L(1,τ)L(1,ad)).
pub fn quaternion_ratio_closed(gamma: &RatFunc, e: i64) -> RatFunc {
    // ε_K = ε∘N is trivial on an unramified K, and ϵ = −ε(ϖ).
    let lam = CharWithConductor::unramified(KLambda::Inert);
    let spn = spinor_adjoint_iia(Half(1), gamma, -e, &lam, Which::Spinor);
    let ad = spinor_adjoint_iia(Half::int(1), gamma, -e, &lam, Which::Adjoint);
    let pre = &(&q().pow(3) * &(&RatFunc::one() - &q().pow(-2))) * &zeta(Half::int(4));
    &(&pre * &spn) / &(&(&zeta(Half::int(2)) * &l_tau(Splitting::Inert)) * &ad)
}

/// B^σ·B^{σ⁻¹}/pairing.
pub fn quaternion_ratio_assembly(gamma: &RatFunc, e: i64) -> RatFunc {
    let b1 = quaternion_b_closed(gamma, e);
    let b2 = quaternion_b_closed(&gamma.inv().unwrap(), e);
    &(&b1 * &b2) / &quaternion_pairing()
}

pub fn quaternion_bessel(gamma: &RatFunc, e: i64, which: QuatWhich, s: Half, class: SClass) -> Result<RatFunc, BesselError> {
    check_sign(e)?;
    match which {
        QuatWhich::Alpha => {
            if class != SClass::Primitive {
                return Err(BesselError::UnsupportedClass);
            }
            Ok(quaternion_alpha_at(&qh(-s.0)))
        }
        QuatWhich::Pairing => Ok(quaternion_pairing()),
        QuatWhich::Ratio => Ok(quaternion_ratio_closed(gamma, e)),
    }
}

// ---------------------------------------------------------------------------
// Archimedean

/// Working precision in bits, about 77 decimal digits.
pub const ARCH_PREC: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Clone, Debug)]
pub struct ArchDatum {
    pub kappa: u32,
    /// S = [[a, b], [b, c]].
    pub s: [BigFloat; 3],
}

impl ArchDatum {
    pub fn new(kappa: u32, a: &str, b: &str, c: &str) -> Result<Self, BesselError> {
        let mut cc = consts();
        let parse = |t: &str, cc: &mut Consts| {
            let v = BigFloat::parse(t, Radix::Dec, ARCH_PREC, RM, cc);
            if v.is_nan() {
                Err(BesselError::BadEntry(t.to_string()))
            } else {
                Ok(v)
            }
        };
        let s = [parse(a, &mut cc)?, parse(b, &mut cc)?, parse(c, &mut cc)?];
        Self::from_entries(kappa, s)
    }

    pub fn from_entries(kappa: u32, s: [BigFloat; 3]) -> Result<Self, BesselError> {
        if kappa == 0 {
            return Err(BesselError::BadEntry("κ = 0".into()));
        }
        let d = ArchDatum { kappa, s };
        if !d.det().is_positive() || !d.trace().is_positive() {
            return Err(BesselError::NotPositiveDefinite);
        }
        Ok(d)
    }

    pub fn det(&self) -> BigFloat {
        let ac = self.s[0].mul(&self.s[2], ARCH_PREC, RM);
        ac.sub(&self.s[1].mul(&self.s[1], ARCH_PREC, RM), ARCH_PREC, RM)
    }

    pub fn trace(&self) -> BigFloat {
        self.s[0].add(&self.s[2], ARCH_PREC, RM)
    }

    pub fn scaled(&self, t: &BigFloat) -> Self {
        let s = [0, 1, 2].map(|i| self.s[i].mul(t, ARCH_PREC, RM));
        ArchDatum { kappa: self.kappa, s }
    }
}

pub fn consts() -> Consts {
    Consts::new().expect("astro-float constants cache")
}

fn bf(n: i64) -> BigFloat {
    BigFloat::from_i64(n, ARCH_PREC)
}

fn factorial(n: u32) -> BigFloat {
    (1..=n as i64).fold(bf(1), |acc, k| acc.mul(&bf(k), ARCH_PREC, RM))
}

/// Γ(n) for integer n ≥ 1.
fn gamma_int(n: u32) -> BigFloat {
    factorial(n - 1)
}

/// Γ(k + 1/2) = (2k)!√π/(4^k k!).
fn gamma_half(k: u32, cc: &mut Consts) -> BigFloat {
    let sp = cc.pi(ARCH_PREC, RM).sqrt(ARCH_PREC, RM);
    let num = factorial(2 * k).mul(&sp, ARCH_PREC, RM);
    num.div(&bf(4).powi(k as usize, ARCH_PREC, RM).mul(&factorial(k), ARCH_PREC, RM), ARCH_PREC, RM)
}

/// x^{m/2} for x > 0.
fn pow_half(x: &BigFloat, m: i64, cc: &mut Consts) -> BigFloat {
    let e = bf(m).div(&bf(2), ARCH_PREC, RM);
    x.pow(&e, ARCH_PREC, RM, cc)
}

fn exp_neg_pi_trace(d: &ArchDatum, mult: i64, cc: &mut Consts) -> BigFloat {
    let pi = cc.pi(ARCH_PREC, RM);
    let arg = pi.mul(&d.trace(), ARCH_PREC, RM).mul(&bf(-mult), ARCH_PREC, RM);
    arg.exp(ARCH_PREC, RM, cc)
}

/// 2^{4κ−2}(2π)^{2κ−1}(det S)^{(2κ−3)/2}/Γ(2κ−1)·e^{−4π tr S}.
pub fn arch_bessel_ratio(d: &ArchDatum) -> BigFloat {
    let mut cc = consts();
    let k = d.kappa as i64;
    let two_pi = cc.pi(ARCH_PREC, RM).mul(&bf(2), ARCH_PREC, RM);
    let a = bf(2).powi((4 * k - 2) as usize, ARCH_PREC, RM);
    let b = two_pi.powi((2 * k - 1) as usize, ARCH_PREC, RM);
    let c = pow_half(&d.det(), 2 * k - 3, &mut cc);
    let e = exp_neg_pi_trace(d, 4, &mut cc);
    a.mul(&b, ARCH_PREC, RM)
        .mul(&c, ARCH_PREC, RM)
        .div(&gamma_int(2 * d.kappa - 1), ARCH_PREC, RM)
        .mul(&e, ARCH_PREC, RM)
}

/// The product 2⁻¹(−4)^κ·2e^{−2π tr S}·conj(ξ(i, S; κ, 0)), ξ being the quoted
/// closed value (−1)^κ 4π^{(4κ−1)/2}(4 det S)^{(2κ−3)/2}/(Γ(κ)Γ(κ−1/2))·e^{−2π tr S}.
pub fn arch_bessel_assembly(d: &ArchDatum) -> BigFloat {
    let mut cc = consts();
    let k = d.kappa as i64;
    let sign = if k % 2 == 0 { 1 } else { -1 };
    let pi = cc.pi(ARCH_PREC, RM);
    let four_det = d.det().mul(&bf(4), ARCH_PREC, RM);
    let xi = bf(4 * sign)
        .mul(&pow_half(&pi, 4 * k - 1, &mut cc), ARCH_PREC, RM)
        .mul(&pow_half(&four_det, 2 * k - 3, &mut cc), ARCH_PREC, RM)
        .div(&gamma_int(d.kappa).mul(&gamma_half(d.kappa - 1, &mut cc), ARCH_PREC, RM), ARCH_PREC, RM)
        .mul(&exp_neg_pi_trace(d, 2, &mut cc), ARCH_PREC, RM);
    // 2⁻¹·2 cancels; (−4)^κ = (−1)^κ 4^κ.
    let pre = bf(4)
        .powi(d.kappa as usize, ARCH_PREC, RM)
        .mul(&bf(sign), ARCH_PREC, RM)
        .mul(&exp_neg_pi_trace(d, 2, &mut cc), ARCH_PREC, RM);
    pre.mul(&xi, ARCH_PREC, RM)
}

/// |a − b|/|b|.
pub fn rel_diff(a: &BigFloat, b: &BigFloat) -> BigFloat {
    a.sub(b, ARCH_PREC, RM).abs().div(&b.abs(), ARCH_PREC, RM)
}

pub fn to_decimal(x: &BigFloat) -> String {
    let mut cc = consts();
    x.format(Radix::Dec, RM, &mut cc).unwrap_or_else(|_| "NaN".into())
}

/// Rounds to 15 significant digits via f64.
pub fn to_f64(x: &BigFloat) -> f64 {
    to_decimal(x).parse::<f64>().unwrap_or(f64::NAN)
}

pub fn bf_from_str(s: &str) -> BigFloat {
    BigFloat::parse(s, Radix::Dec, ARCH_PREC, RM, &mut consts())
}

pub fn bf_lt(a: &BigFloat, b: &BigFloat) -> bool {
    a.cmp(b) == Some(-1)
}

// ---------------------------------------------------------------------------
// Ordinary vectors on principal series

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrdinaryDatum {
    /// α = χ₁(ϖ); μ(ϖ) = αγ.
    pub alpha: RatFunc,
    /// γ = σ(ϖ).
    pub gamma: RatFunc,
    pub n: u32,
    pub lam: CharWithConductor,
    /// Λ₀(−1) in the split case.
    pub lambda0_sign: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrdStage {
    Toric,
    BesselB,
    Final,
}

impl OrdinaryDatum {
    pub fn new(alpha: RatFunc, gamma: RatFunc, n: u32, lam: CharWithConductor, lambda0_sign: i64) -> Result<Self, BesselError> {
        check_sign(lambda0_sign)?;
        let c = lam.conductor;
        if n < 1 || n < c {
            return Err(BesselError::BadLevel { n, c });
        }
        if alpha.is_zero() || gamma.is_zero() {
            return Err(BesselError::NotInvertible("α, γ"));
        }
        Ok(OrdinaryDatum { alpha, gamma, n, lam, lambda0_sign })
    }

    /// The datum at the minimal level n = max(1, c(Λ)).
    pub fn minimal(alpha: RatFunc, gamma: RatFunc, lam: CharWithConductor, lambda0_sign: i64) -> Result<Self, BesselError> {
        let n = lam.conductor.max(1);
        Self::new(alpha, gamma, n, lam, lambda0_sign)
    }

    pub fn mu(&self) -> RatFunc {
        &self.alpha * &self.gamma
    }

    pub fn chi2(&self) -> RatFunc {
        (&self.alpha * &self.gamma.pow(2)).inv().unwrap()
    }

    fn sign(&self) -> RatFunc {
        match self.lam.splitting() {
            Splitting::Split => int(self.lambda0_sign),
            _ => RatFunc::one(),
        }
    }

    fn spinor_set(&self) -> [RatFunc; 4] {
        let mu = self.mu();
        [self.gamma.clone(), mu.clone(), mu.inv().unwrap(), self.gamma.inv().unwrap()]
    }

    pub fn l_spinor(&self) -> RatFunc {
        spinor_principal(Half(1), &self.spinor_set(), &self.lam)
    }

    pub fn l_adjoint(&self) -> RatFunc {
        adjoint_principal(Half::int(1), &self.alpha, &self.chi2())
    }

    /// e(π, Λ) = α^{c}/(L(1/2, μ_KΛ)L(1/2, σ_K⁻¹Λ)).
    pub fn euler(&self) -> RatFunc {
        crate::lfactors::modified_euler_local(&self.alpha, &self.gamma, &self.lam)
    }

    /// d(χ) = L(1,χ₁)L(1,χ₂)L(1,(χ₁σ)²)L(1,σ⁻²).
    pub fn d_chi(&self) -> RatFunc {
        let one = Half::int(1);
        [&self.alpha, &self.chi2(), &self.mu().pow(2), &self.gamma.pow(-2)]
            .into_iter()
            .map(|x| l_value(one, x))
            .product()
    }
}

fn toric_at(d: &OrdinaryDatum) -> RatFunc {
    let n = d.n as i32;
    let tau = l_tau(d.lam.splitting());
    &(&tau * &d.sign()) / &(&d.mu().pow(n) * &qh(n))
}

pub fn ordinary_ratio(d: &OrdinaryDatum, stage: OrdStage) -> RatFunc {
    let n = d.n as i32;
    match stage {
        OrdStage::Toric => toric_at(d),
        OrdStage::BesselB => &(&d.gamma.pow(n) * &qh(-3 * n)) * &toric_at(d),
        OrdStage::Final => {
            let tau = l_tau(d.lam.splitting());
            let zz = &zeta(Half::int(2)) * &zeta(Half::int(4));
            let tail = &(&d.euler().pow(2) * &d.alpha.pow(-2 * n)) * &q().pow(-4 * n);
            &(&(&(&tau * &zz) * &d.l_spinor()) / &d.l_adjoint()) * &tail
        }
    }
}

/// The constants in the ordinary-vector assembly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrdinaryChain {
    pub gamma_mu: RatFunc,
    pub gamma_sigma: RatFunc,
    /// B(Λ)·B(Λ⁻¹) from the two toric values.
    pub periods: RatFunc,
    /// J/(ζ(1)L(1,τ)).
    pub j_normalized: RatFunc,
    /// d(χ)²·b(φ⁰, M φ⁰).
    pub spherical: RatFunc,
    pub ratio: RatFunc,
}

pub fn ordinary_chain(d: &OrdinaryDatum) -> OrdinaryChain {
    let tau = l_tau(d.lam.splitting());
    let inv = OrdinaryDatum { lam: d.lam.inverse(), ..d.clone() };
    let periods = &ordinary_ratio(d, OrdStage::BesselB) * &ordinary_ratio(&inv, OrdStage::BesselB);
    let gamma_mu = gamma_k_half(&d.mu(), &d.lam);
    let gamma_sigma = gamma_k_half(&d.gamma.inv().unwrap(), &d.lam);
    let j_normalized = &(&(&gamma_mu * &gamma_sigma) * &periods) / &tau.pow(2);
    let z1 = zeta(Half::int(1));
    let zz = &zeta(Half::int(2)) * &zeta(Half::int(4));
    let dchi = d.d_chi();
    let m_scalar = &d.l_adjoint() / &(&z1.pow(2) * &dchi.pow(2));
    let b_sharp = &z1.pow(3) / &zz;
    let spherical = &(&dchi.pow(2) * &m_scalar) * &b_sharp;
    let j = &(&j_normalized * &z1) * &tau;
    let ratio = &j / &spherical;
    OrdinaryChain { gamma_mu, gamma_sigma, periods, j_normalized, spherical, ratio }
}

/// L(Spn⊗Λ)e(π,Λ)²α^{−2n}q^{−4n}, the target of J/(ζ(1)L(1,τ)).
pub fn ordinary_j_target(d: &OrdinaryDatum) -> RatFunc {
    let n = d.n as i32;
    &(&(&d.l_spinor() * &d.euler().pow(2)) * &d.alpha.pow(-2 * n)) * &q().pow(-4 * n)
}

/// L(1,ad)ζ(1)ζ(2)⁻¹ζ(4)⁻¹.
pub fn spherical_target(d: &OrdinaryDatum) -> RatFunc {
    &(&d.l_adjoint() * &zeta(Half::int(1))) / &(&zeta(Half::int(2)) * &zeta(Half::int(4)))
}

// ---------------------------------------------------------------------------
// Unramified

/// ζ(2)ζ(4)L(1/2, Spn_K⊗Λ)/(L(1,τ)L(1,ad)) for χ₁(ϖ) = α, σ(ϖ) = γ.
pub fn unramified_ratio(alpha: &RatFunc, gamma: &RatFunc, lam: &KLambda) -> RatFunc {
    let lam = CharWithConductor::unramified(lam.clone());
    let mu = alpha * gamma;
    let set = [gamma.clone(), mu.clone(), mu.inv().unwrap(), gamma.inv().unwrap()];
    let spn = spinor_principal(Half(1), &set, &lam);
    let beta = (alpha * &gamma.pow(2)).inv().unwrap();
    let ad = adjoint_principal(Half::int(1), alpha, &beta);
    let zz = &zeta(Half::int(2)) * &zeta(Half::int(4));
    &(&zz * &spn) / &(&l_tau(lam.splitting()) * &ad)
}

// ---------------------------------------------------------------------------
// Functional-equation constants

/// Unramified values χ₁(ϖ), χ₂(ϖ), σ(ϖ) with χ₁χ₂ = σ⁻².
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChiTriple {
    pub chi1: RatFunc,
    pub chi2: RatFunc,
    pub sigma: RatFunc,
}

impl ChiTriple {
    pub fn new(chi1: RatFunc, chi2: RatFunc, sigma: RatFunc) -> Result<Self, BesselError> {
        if !(&(&chi1 * &chi2) * &sigma.pow(2)).is_one() {
            return Err(BesselError::CentralCharacter);
        }
        Ok(ChiTriple { chi1, chi2, sigma })
    }

    /// χ₁ = μσ⁻¹, χ₂ = μ⁻¹σ⁻¹.
    pub fn from_mu_sigma(mu: &RatFunc, sigma: &RatFunc) -> Self {
        ChiTriple { chi1: mu / sigma, chi2: (mu * sigma).inv().unwrap(), sigma: sigma.clone() }
    }

    /// χ^{s₁} = (χ₂, χ₁, σ).
    pub fn s1(&self) -> Self {
        ChiTriple { chi1: self.chi2.clone(), chi2: self.chi1.clone(), sigma: self.sigma.clone() }
    }

    /// χ^{s₂} = (χ₁, χ₂⁻¹, χ₂σ).
    pub fn s2(&self) -> Self {
        ChiTriple { chi1: self.chi1.clone(), chi2: self.chi2.inv().unwrap(), sigma: &self.chi2 * &self.sigma }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeylGen {
    S1,
    S2,
}

/// Parses a word such as "s1s2s1s2" or "s1 s2"; reduced words alternate and have length at most 4.
pub fn parse_weyl_word(w: &str) -> Result<Vec<WeylGen>, BesselError> {
    let bad = || BesselError::NonReduced(w.to_string());
    let compact: String = w.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
    let mut out = Vec::new();
    let mut rest = compact.as_str();
    if rest == "1" || rest == "id" {
        rest = "";
    }
    while !rest.is_empty() {
        let g = if let Some(r) = rest.strip_prefix("s1") {
            rest = r;
            WeylGen::S1
        } else if let Some(r) = rest.strip_prefix("s2") {
            rest = r;
            WeylGen::S2
        } else {
            return Err(bad());
        };
        if out.last() == Some(&g) {
            return Err(bad());
        }
        out.push(g);
    }
    if out.len() > 4 {
        return Err(bad());
    }
    Ok(out)
}

/// c(s, χ, Λ): γ(1/2, (χ₁σ)_KΛ, ψ_K) for s₁ and 1 for s₂.
pub fn fq_generator(g: WeylGen, chi: &ChiTriple, lam: &CharWithConductor) -> RatFunc {
    match g {
        WeylGen::S1 => gamma_k_half(&(&chi.chi1 * &chi.sigma), lam),
        WeylGen::S2 => RatFunc::one(),
    }
}

/// c(w, χ, Λ) by the cocycle rule c(s·w', χ) = c(s, χ^{w'})c(w', χ), reading w right to left.
pub fn bessel_fq_constant(word: &str, chi: &ChiTriple, lam: &CharWithConductor) -> Result<RatFunc, BesselError> {
    let gens = parse_weyl_word(word)?;
    let mut current = chi.clone();
    let mut c = RatFunc::one();
    for g in gens.iter().rev() {
        c = &c * &fq_generator(*g, &current, lam);
        current = match g {
            WeylGen::S1 => current.s1(),
            WeylGen::S2 => current.s2(),
        };
    }
    Ok(c)
}

/// γ(1/2, (χ₂σ)⁻¹_KΛ)·γ(1/2, (χ₁χ₂σ)_KΛ).
pub fn fq_dagger_display(chi: &ChiTriple, lam: &CharWithConductor) -> RatFunc {
    let a = gamma_k_half(&(&chi.chi2 * &chi.sigma).inv().unwrap(), lam);
    let b = gamma_k_half(&(&(&chi.chi1 * &chi.chi2) * &chi.sigma), lam);
    &a * &b
}

/// γ(1/2, μ_KΛ)·γ(1/2, σ_K⁻¹Λ).
pub fn fq_statement(mu: &RatFunc, sigma: &RatFunc, lam: &CharWithConductor) -> RatFunc {
    &gamma_k_half(mu, lam) * &gamma_k_half(&sigma.inv().unwrap(), lam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::{alpha, delta, gamma, parse};

    fn datum(eps: i64) -> SteinbergDatum {
        SteinbergDatum::new(eps, gamma(), delta()).unwrap()
    }

    #[test]
    fn t_prime_examples() {
        for eps in [1, -1] {
            let d = datum(eps);
            let t0 = t_prime_zero(&d);
            let want = (&RatFunc::one() + &(&(&int(eps) / &delta()) / &q())).inv().unwrap();
            assert_eq!(t0, want);
            let t1 = steinberg_t(TIndex::Prime(1), &d).unwrap();
            let want = &(&-&(&RatFunc::one() + &(&int(eps) / &delta())) / &(&q() - &int(1))) * &t0;
            assert_eq!(t1, want);
            let c = steinberg_t(TIndex::Cell { vy: 1, i: 1, j: 0 }, &d).unwrap();
            assert_eq!(c, &(&gamma().pow(-2) * &q().pow(-3)) * &t0);
            // T'(m) = (−q⁻¹ϵδ⁻¹)^{m−1} T'(1).
            let r = &(&-&int(eps) / &delta()) / &q();
            for m in 2..5 {
                assert_eq!(steinberg_t(TIndex::Prime(m), &d).unwrap(), &r.pow(m as i32 - 1) * &t1);
            }
        }
    }

    #[test]
    fn cells_out_of_range() {
        let d = datum(1);
        for (vy, i, j) in [(0, 0, 3), (1, 0, 0), (2, 1, 1)] {
            assert!(matches!(steinberg_t(TIndex::Cell { vy, i, j }, &d), Err(BesselError::OutOfRange(_))));
        }
        assert!(SteinbergDatum::new(0, gamma(), delta()).is_err());
    }

    #[test]
    fn i0_component() {
        let d = datum(1);
        let s = steinberg_series(&d).unwrap();
        let r = parse("g^-1*d^-1*u^-1").unwrap();
        let want = &(&parse("g^-2*q^-1*d^-1").unwrap() / &(&RatFunc::one() - &r)) * &t_prime_zero(&d);
        assert_eq!(s.i0, want);
    }

    #[test]
    fn series_matches_derived_form() {
        for eps in [1, -1] {
            let d = datum(eps);
            let s = bessel_steinberg(&d, BesselPath::Series).unwrap();
            assert_eq!(s, bessel_steinberg(&d, BesselPath::Derived).unwrap());
            assert_ne!(s, bessel_steinberg(&d, BesselPath::Closed).unwrap());
        }
    }

    #[test]
    fn paramodular_identity() {
        let pairing = paramodular_pairing();
        let z = |k| zeta(Half::int(k));
        assert_eq!(pairing, &(&q().pow(-2) * &z(1).pow(2)) / &z(2));
        for eps in [1, -1] {
            let d = datum(eps);
            assert_eq!(paramodular_assembly(&d).unwrap(), paramodular_closed(&d));
        }
    }

    #[test]
    fn quaternion_pieces() {
        for e in [1, -1] {
            assert_eq!(quaternion_b_from_alpha(&gamma(), e), quaternion_b_closed(&gamma(), e));
            let a = quaternion_ratio_assembly(&gamma(), e);
            let s = quaternion_ratio_closed(&gamma(), e);
            assert_eq!(&a / &s, zeta(Half::int(2)).pow(2));
        }
        assert!(quaternion_bessel(&gamma(), 1, QuatWhich::Alpha, Half(1), SClass::Divisible).is_err());
    }

    #[test]
    fn ordinary_chain_all_cases() {
        let lams = |c: u32| {
            vec![
                CharWithConductor { lam: KLambda::Split { delta: delta() }, conductor: c },
                CharWithConductor { lam: KLambda::Inert, conductor: c },
                CharWithConductor { lam: KLambda::Ramified { lambda: int(-1) }, conductor: c },
            ]
        };
        for c in 0..4 {
            for lam in lams(c) {
                let d = OrdinaryDatum::minimal(alpha(), gamma(), lam, -1).unwrap();
                let ch = ordinary_chain(&d);
                assert_eq!(ch.j_normalized, ordinary_j_target(&d));
                assert_eq!(ch.spherical, spherical_target(&d));
                let want = &ordinary_ratio(&d, OrdStage::Final) / &(&l_tau(d.lam.splitting()) * &(&zeta(Half::int(2)) * &zeta(Half::int(4))));
                let got = &ch.ratio / &(&l_tau(d.lam.splitting()) * &(&zeta(Half::int(2)) * &zeta(Half::int(4))));
                assert_eq!(got, want);
            }
        }
        let lam = CharWithConductor { lam: KLambda::Inert, conductor: 2 };
        assert!(OrdinaryDatum::new(alpha(), gamma(), 1, lam, 1).is_err());
    }

    #[test]
    fn fq_constants() {
        let lam = CharWithConductor::unramified(KLambda::Split { delta: delta() });
        let mu = &alpha() * &gamma();
        let chi = ChiTriple::from_mu_sigma(&mu, &gamma());
        assert!(bessel_fq_constant("s2", &chi, &lam).unwrap().is_one());
        let c = bessel_fq_constant("s1s2s1s2", &chi, &lam).unwrap();
        assert_eq!(c, fq_dagger_display(&chi, &lam));
        assert_eq!(c, fq_statement(&mu, &gamma(), &lam));
        assert!(bessel_fq_constant("s1s1", &chi, &lam).is_err());
        assert!(bessel_fq_constant("s1s2s1s2s1", &chi, &lam).is_err());
        assert!(ChiTriple::new(alpha(), alpha(), gamma()).is_err());
    }

    #[test]
    fn arch_values() {
        let d = ArchDatum::new(2, "1", "0", "1").unwrap();
        let v = arch_bessel_ratio(&d);
        let oracle = bf_from_str("9.65336556019460238346455418608691896579651682388403894907384e-8");
        assert!(bf_lt(&rel_diff(&v, &oracle), &bf_from_str("1e-30")));
        for k in 1..=6 {
            let d = ArchDatum::new(k, "1.5", "0.25", "0.75").unwrap();
            let r = rel_diff(&arch_bessel_assembly(&d), &arch_bessel_ratio(&d));
            assert!(bf_lt(&r, &bf_from_str("1e-60")), "κ = {k}");
        }
        assert!(ArchDatum::new(2, "1", "2", "1").is_err());
    }
}
