//! Local L-factors, γ-factors, spinor and adjoint factors, the Hecke
//! polynomial with its base change to K, and modified p-Euler factors.
//!
//! All powers of the residue cardinality q are carried by u (u² = q), so the
//! evaluation points s are half-integers `Half(k)` = k/2.

use thiserror::Error;

use crate::exact_arith::{int, q, qh, RatFunc};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Half(pub i32);

impl Half {
    pub fn int(n: i32) -> Half {
        Half(2 * n)
    }

    pub fn neg(self) -> Half {
        Half(-self.0)
    }

    pub fn one_minus(self) -> Half {
        Half(2 - self.0)
    }

    pub fn plus(self, o: Half) -> Half {
        Half(self.0 + o.0)
    }
}

impl std::fmt::Display for Half {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

impl Splitting {
    pub fn name(self) -> &'static str {
        match self {
            Splitting::Split => "split",
            Splitting::Inert => "inert",
            Splitting::Ramified => "ramified",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LError {
    #[error("λ data does not match the {0} splitting type")]
    InconsistentLambda(&'static str),
    #[error("only type IIa representations are supported at ramified primes")]
    UnsupportedType,
}

/// Unramified character of F^×, twisted by ω_F^{t/2}: value at ϖ is value·q^{-t/2}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnramChar {
    pub value: RatFunc,
    pub twist: Half,
}

impl UnramChar {
    pub fn new(value: RatFunc) -> Self {
        UnramChar { value, twist: Half(0) }
    }

    pub fn twisted(value: RatFunc, twist: Half) -> Self {
        UnramChar { value, twist }
    }

    pub fn at_uniformizer(&self) -> RatFunc {
        &self.value * &qh(-self.twist.0)
    }

    pub fn inverse(&self) -> Self {
        UnramChar { value: self.value.inv().expect("characters are invertible"), twist: self.twist.neg() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        UnramChar { value: &self.value * &o.value, twist: self.twist.plus(o.twist) }
    }
}

/// L(s, χ) = 1/(1 − χ(ϖ)q^{-s}) for unramified χ, and 1 otherwise (`None`).
pub fn local_l(s: Half, ch: Option<&UnramChar>) -> RatFunc {
    match ch {
        None => RatFunc::one(),
        Some(c) => l_value(s, &c.at_uniformizer()),
    }
}

/// 1/(1 − x q^{-s}).
pub fn l_value(s: Half, x: &RatFunc) -> RatFunc {
    (&RatFunc::one() - &(x * &qh(-s.0))).inv().expect("formal L-factor")
}

/// ζ(s) = 1/(1 − q^{-s}).
pub fn zeta(s: Half) -> RatFunc {
    l_value(s, &RatFunc::one())
}

/// An arbitrary character of F^× with its ε-factor data at an order-0 ψ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FChar {
    /// χ(ϖ) when unramified; ignored otherwise.
    pub value: RatFunc,
    pub conductor: u32,
    /// ε(1/2, χ, ψ); 1 when unramified.
    pub root_number: RatFunc,
    /// χ(−1) ∈ {±1}.
    pub sign: i64,
}

impl FChar {
    pub fn unramified(value: RatFunc) -> Self {
        FChar { value, conductor: 0, root_number: RatFunc::one(), sign: 1 }
    }

    pub fn ramified(conductor: u32, root_number: RatFunc, sign: i64) -> Self {
        assert!(conductor > 0);
        FChar { value: RatFunc::one(), conductor, root_number, sign }
    }

    /// χ⁻¹; ε(1/2, χ⁻¹) = χ(−1)/ε(1/2, χ).
    pub fn inverse(&self) -> Self {
        if self.conductor == 0 {
            FChar::unramified(self.value.inv().unwrap())
        } else {
            FChar {
                value: RatFunc::one(),
                conductor: self.conductor,
                root_number: &int(self.sign) / &self.root_number,
                sign: self.sign,
            }
        }
    }

    fn l(&self, s: Half) -> RatFunc {
        if self.conductor == 0 {
            l_value(s, &self.value)
        } else {
            RatFunc::one()
        }
    }

    /// ε(s, χ, ψ) = ε(1/2, χ, ψ)·q^{c(1/2 − s)}.
    pub fn epsilon(&self, s: Half) -> RatFunc {
        &self.root_number * &qh(self.conductor as i32 * (1 - s.0))
    }
}

/// γ(s, χ, ψ) = ε(s, χ, ψ) L(1−s, χ⁻¹)/L(s, χ).
pub fn gamma_factor(s: Half, ch: &FChar) -> RatFunc {
    &(&ch.epsilon(s) * &ch.inverse().l(s.one_minus())) / &ch.l(s)
}

/// A character Λ of K^× trivial on F^×, recorded by what the L-factors need.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KLambda {
    /// K = F ⊕ F, Λ = (Λ₀, Λ₀⁻¹) with δ = Λ₀(ϖ).
    Split { delta: RatFunc },
    /// Unramified Λ on an unramified quadratic K is trivial.
    Inert,
    /// λ = Λ(ϖ_K), necessarily ±1.
    Ramified { lambda: RatFunc },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharWithConductor {
    pub lam: KLambda,
    pub conductor: u32,
}

impl CharWithConductor {
    pub fn unramified(lam: KLambda) -> Self {
        CharWithConductor { lam, conductor: 0 }
    }

    pub fn splitting(&self) -> Splitting {
        match self.lam {
            KLambda::Split { .. } => Splitting::Split,
            KLambda::Inert => Splitting::Inert,
            KLambda::Ramified { .. } => Splitting::Ramified,
        }
    }

    pub fn inverse(&self) -> Self {
        let lam = match &self.lam {
            KLambda::Split { delta } => KLambda::Split { delta: delta.inv().unwrap() },
            KLambda::Inert => KLambda::Inert,
            KLambda::Ramified { lambda } => KLambda::Ramified { lambda: lambda.inv().unwrap() },
        };
        CharWithConductor { lam, conductor: self.conductor }
    }
}

/// L(s, χ_K Λ) for χ unramified on F^× with χ(ϖ) = x; 1 when c(Λ) > 0.
pub fn l_base_change(s: Half, x: &RatFunc, lam: &CharWithConductor) -> RatFunc {
    if lam.conductor > 0 {
        return RatFunc::one();
    }
    match &lam.lam {
        KLambda::Split { delta } => &l_value(s, &(x * delta)) * &l_value(s, &(x / delta)),
        KLambda::Inert => l_value(s.plus(s), &x.pow(2)),
        KLambda::Ramified { lambda } => l_value(s, &(x * lambda)),
    }
}

/// L(1, τ_{K/F}): ζ(1), 1/(1+q⁻¹) or 1.
pub fn l_tau(sp: Splitting) -> RatFunc {
    match sp {
        Splitting::Split => zeta(Half::int(1)),
        Splitting::Inert => l_value(Half::int(1), &int(-1)),
        Splitting::Ramified => RatFunc::one(),
    }
}

/// γ(1/2, χ_KΛ, ψ_K) = x^{2c(Λ)} L(1/2, χ_K⁻¹Λ⁻¹)/L(1/2, χ_KΛ), the L-factors being 1 when c(Λ) > 0.
pub fn gamma_k_half(x: &RatFunc, lam: &CharWithConductor) -> RatFunc {
    let h = Half(1);
    let num = l_base_change(h, &x.inv().unwrap(), &lam.inverse());
    let den = l_base_change(h, x, lam);
    &(&x.pow(2 * lam.conductor as i32) * &num) / &den
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Spinor,
    Adjoint,
}

/// Spinor or adjoint factor for π = I(St⊗ε, σ) with γ = σ(ϖ) and the sign ϵ = −ε(ϖ).
pub fn spinor_adjoint_iia(s: Half, gamma: &RatFunc, eps: i64, lam: &CharWithConductor, which: Which) -> RatFunc {
    let eps_val = int(-eps);
    match which {
        Which::Spinor => {
            let a = l_base_change(s, &gamma.inv().unwrap(), lam);
            let b = l_base_change(s, gamma, lam);
            // ω_K^{1/2}ε_K: on F-characters this is ε·ω_F^{1/2}, base changed.
            let c = l_base_change(s, &(&eps_val * &qh(-1)), lam);
            &(&a * &b) * &c
        }
        Which::Adjoint => {
            let s1 = s.plus(Half(2));
            let sh = s.plus(Half(1));
            [
                zeta(s),
                zeta(s1),
                l_value(s, &gamma.pow(-2)),
                l_value(s, &gamma.pow(2)),
                l_value(sh, &(&eps_val * gamma)),
                l_value(sh, &(&eps_val / gamma)),
            ]
            .into_iter()
            .product()
        }
    }
}

/// L(s, Spn(π)_K ⊗ Λ) for an unramified principal series with spinor Satake set `sat`.
pub fn spinor_principal(s: Half, sat: &[RatFunc; 4], lam: &CharWithConductor) -> RatFunc {
    sat.iter().map(|x| l_base_change(s, x, lam)).product()
}

/// L(s, π, ad) for χ₁ × χ₂ ⋊ σ with α = χ₁(ϖ), β = χ₂(ϖ).
pub fn adjoint_principal(s: Half, alpha: &RatFunc, beta: &RatFunc) -> RatFunc {
    let xs = [alpha.clone(), beta.clone(), alpha * beta, alpha / beta];
    let mut out = &zeta(s) * &zeta(s);
    for x in xs {
        out = &(&out * &l_value(s, &x)) * &l_value(s, &x.inv().unwrap());
    }
    out
}

/// Classical Satake data at p: α_P, β_P for weight κ, with p carried by q = u².
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatakeGSp4 {
    pub alpha_p: RatFunc,
    pub beta_p: RatFunc,
    pub kappa: i32,
}

impl SatakeGSp4 {
    /// Dictionary α_P = p^{κ−3/2}γ, β_P = p^{κ−3/2}(αγ)⁻¹ from local Satake data.
    pub fn from_local(alpha: &RatFunc, gamma: &RatFunc, kappa: i32) -> Self {
        let c = qh(2 * kappa - 3);
        SatakeGSp4 { alpha_p: &c * gamma, beta_p: &c / &(alpha * gamma), kappa }
    }

    fn c(&self) -> RatFunc {
        q().pow(2 * self.kappa - 3)
    }

    /// The four roots α_P, β_P, p^{2κ−3}/α_P, p^{2κ−3}/β_P.
    pub fn roots(&self) -> [RatFunc; 4] {
        let c = self.c();
        [self.alpha_p.clone(), self.beta_p.clone(), &c / &self.alpha_p, &c / &self.beta_p]
    }

    /// α_Q = p^{2−κ}α_Pβ_P.
    pub fn alpha_q(&self) -> RatFunc {
        &(&q().pow(2 - self.kappa) * &self.alpha_p) * &self.beta_p
    }

    /// β_Q = p^{2−κ}α_P·p^{2κ−3}β_P⁻¹.
    pub fn beta_q(&self) -> RatFunc {
        &(&q().pow(2 - self.kappa) * &self.alpha_p) * &(&self.c() / &self.beta_p)
    }

    pub fn t1(&self) -> RatFunc {
        self.roots().into_iter().sum()
    }

    pub fn t2(&self) -> RatFunc {
        let r = self.roots();
        let mut e2 = RatFunc::zero();
        for i in 0..4 {
            for j in i + 1..4 {
                e2 = &e2 + &(&r[i] * &r[j]);
            }
        }
        let l = q();
        let corr = &(&l.pow(3) + &l) * &l.pow(2 * self.kappa - 6);
        &(&e2 - &corr) / &l
    }

    /// Coefficients of Q_p(X), constant term first.
    pub fn hecke_coeffs(&self) -> [RatFunc; 5] {
        let l = q();
        let t1 = self.t1();
        [
            RatFunc::one(),
            -&t1,
            &(&l * &self.t2()) + &(&(&l.pow(3) + &l) * &l.pow(2 * self.kappa - 6)),
            -&(&l.pow(2 * self.kappa - 3) * &t1),
            l.pow(4 * self.kappa - 6),
        ]
    }

    /// Coefficients of ∏(1 − rX) over the four roots, constant term first.
    pub fn product_coeffs(&self) -> [RatFunc; 5] {
        let mut c = vec![RatFunc::one()];
        for r in self.roots() {
            let mut next = vec![RatFunc::zero(); c.len() + 1];
            for (i, a) in c.iter().enumerate() {
                next[i] = &next[i] + a;
                next[i + 1] = &next[i + 1] - &(a * &r);
            }
            c = next;
        }
        [c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone(), c[4].clone()]
    }

    pub fn hecke_poly_at(&self, x: &RatFunc) -> RatFunc {
        let c = self.hecke_coeffs();
        let mut acc = RatFunc::zero();
        for k in (0..5).rev() {
            acc = &(&acc * x) + &c[k];
        }
        acc
    }
}

/// λ-values attached to ν at primes above ℓ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LambdaValues {
    Split(RatFunc, RatFunc),
    Inert(RatFunc),
    Ramified(RatFunc),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseChange {
    pub t1: RatFunc,
    pub t2: RatFunc,
    pub coeffs: [RatFunc; 5],
    /// The product of Q_ℓ values displayed as the base-changed factor.
    pub euler_poly: RatFunc,
    /// Its reciprocal, the L-factor proper.
    pub l_factor: RatFunc,
}

/// Base-changed Hecke polynomial of `sat` at s, by splitting type.
pub fn hecke_poly_basechange(sat: &SatakeGSp4, sp: Splitting, lam: &LambdaValues, s: Half) -> Result<BaseChange, LError> {
    let shift = qh(3 - 2 * sat.kappa - s.0);
    let euler_poly = match (sp, lam) {
        (Splitting::Split, LambdaValues::Split(l1, l2)) => &sat.hecke_poly_at(&(l1 * &shift)) * &sat.hecke_poly_at(&(l2 * &shift)),
        (Splitting::Inert, LambdaValues::Inert(l)) => {
            let x = l * &shift;
            &sat.hecke_poly_at(&x) * &sat.hecke_poly_at(&-&x)
        }
        (Splitting::Ramified, LambdaValues::Ramified(l)) => sat.hecke_poly_at(&(l * &shift)),
        _ => return Err(LError::InconsistentLambda(sp.name())),
    };
    Ok(BaseChange {
        t1: sat.t1(),
        t2: sat.t2(),
        coeffs: sat.hecke_coeffs(),
        l_factor: euler_poly.inv().expect("nonzero Euler polynomial"),
        euler_poly,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EulerCase {
    /// c(ν) > 0.
    Ramified(u32),
    Split(RatFunc, RatFunc),
    Inert,
    RamifiedK(RatFunc),
}

/// The p-adic multiplier e(π_p, ν_p) in classical normalisation.
pub fn modified_euler(sat: &SatakeGSp4, case: &EulerCase) -> RatFunc {
    let one = RatFunc::one();
    let k = sat.kappa;
    let ai = sat.alpha_p.inv().unwrap();
    let bi = sat.beta_p.inv().unwrap();
    let c2 = q().pow(k - 2);
    match case {
        EulerCase::Ramified(c) => (&q().pow(k - 1) / &sat.alpha_q()).pow(*c as i32),
        EulerCase::Split(l1, l2) => [l1, l2]
            .iter()
            .map(|l| &(&one - &(&(&ai * *l) * &c2)) * &(&one - &(&(&bi * *l) * &c2)))
            .product(),
        EulerCase::Inert => {
            let c4 = q().pow(2 * k - 4);
            &(&one - &(&ai.pow(2) * &c4)) * &(&one - &(&bi.pow(2) * &c4))
        }
        EulerCase::RamifiedK(l) => &(&one - &(&(&ai * l) * &c2)) * &(&one - &(&(&bi * l) * &c2)),
    }
}

/// e(π, Λ) = α^{c(Λ)}/(L(1/2, (χ₁σ)_KΛ) L(1/2, σ_K⁻¹Λ)) with α = χ₁(ϖ), γ = σ(ϖ).
pub fn modified_euler_local(alpha: &RatFunc, gamma: &RatFunc, lam: &CharWithConductor) -> RatFunc {
    let h = Half(1);
    let a = l_base_change(h, &(alpha * gamma), lam);
    let b = l_base_change(h, &gamma.inv().unwrap(), lam);
    &alpha.pow(lam.conductor as i32) / &(&a * &b)
}

/// Factor table rows (name, s, case, value) for the CLI.
pub fn factor_table(gamma: &RatFunc, alpha: &RatFunc, delta: &RatFunc, eps: i64) -> Vec<(String, Half, String, RatFunc)> {
    let mut rows = Vec::new();
    let half = Half(1);
    let lams = [
        CharWithConductor::unramified(KLambda::Split { delta: delta.clone() }),
        CharWithConductor::unramified(KLambda::Inert),
        CharWithConductor::unramified(KLambda::Ramified { lambda: int(1) }),
    ];
    for lam in &lams {
        let case = lam.splitting().name().to_string();
        rows.push(("spinor_IIa".into(), half, case.clone(), spinor_adjoint_iia(half, gamma, eps, lam, Which::Spinor)));
        let ps = [gamma.clone(), alpha * gamma, (alpha * gamma).inv().unwrap(), gamma.inv().unwrap()];
        rows.push(("spinor_principal".into(), half, case.clone(), spinor_principal(half, &ps, lam)));
        rows.push(("modified_euler".into(), half, case.clone(), modified_euler_local(alpha, gamma, lam)));
        rows.push(("L(1,tau)".into(), Half(2), case, l_tau(lam.splitting())));
    }
    let lam = &lams[0];
    rows.push(("adjoint_IIa".into(), Half(2), "-".into(), spinor_adjoint_iia(Half(2), gamma, eps, lam, Which::Adjoint)));
    let beta = (alpha * &gamma.pow(2)).inv().unwrap();
    rows.push(("adjoint_principal".into(), Half(2), "-".into(), adjoint_principal(Half(2), alpha, &beta)));
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::{alpha, delta, gamma, u};

    #[test]
    fn local_l_examples() {
        let g = gamma();
        let want = (&RatFunc::one() - &(&g / &q())).inv().unwrap();
        assert_eq!(local_l(Half::int(1), Some(&UnramChar::new(g))), want);
        assert!(local_l(Half(5), None).is_one());
        let zz = &zeta(Half::int(2)) * &zeta(Half::int(4));
        let want = (&(&RatFunc::one() - &u().pow(-4)) * &(&RatFunc::one() - &u().pow(-8))).inv().unwrap();
        assert_eq!(zz, want);
    }

    #[test]
    fn gamma_examples() {
        let g = gamma();
        let ch = FChar::unramified(g.inv().unwrap());
        let want = &l_value(Half(1), &g) / &l_value(Half(1), &g.inv().unwrap());
        assert_eq!(gamma_factor(Half(1), &ch), want);
        let lam = CharWithConductor { lam: KLambda::Split { delta: delta() }, conductor: 2 };
        assert_eq!(gamma_k_half(&g.inv().unwrap(), &lam), g.pow(-4));
    }

    #[test]
    fn adjoint_iia_matches_display() {
        let lam = CharWithConductor::unramified(KLambda::Inert);
        let g = gamma();
        for eps in [1, -1] {
            let got = spinor_adjoint_iia(Half::int(1), &g, eps, &lam, Which::Adjoint);
            let e = int(-eps);
            let want = [
                zeta(Half::int(1)),
                zeta(Half::int(2)),
                l_value(Half::int(1), &g.pow(-2)),
                l_value(Half::int(1), &g.pow(2)),
                l_value(Half(3), &(&e * &g)),
                l_value(Half(3), &(&e / &g)),
            ]
            .into_iter()
            .product::<RatFunc>();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn spinor_split_expansion() {
        let (g, d) = (gamma(), delta());
        let lam = CharWithConductor::unramified(KLambda::Split { delta: d.clone() });
        let h = Half(1);
        let got = spinor_adjoint_iia(h, &g, 1, &lam, Which::Spinor);
        let e = int(-1);
        let w = &e * &qh(-1);
        let want = [
            l_value(h, &(&g.inv().unwrap() * &d)),
            l_value(h, &(&g.inv().unwrap() / &d)),
            l_value(h, &(&g * &d)),
            l_value(h, &(&g / &d)),
            l_value(h, &(&w * &d)),
            l_value(h, &(&w / &d)),
        ]
        .into_iter()
        .product::<RatFunc>();
        assert_eq!(got, want);
    }

    #[test]
    fn hecke_poly_palindromic() {
        let sat = SatakeGSp4 { alpha_p: alpha(), beta_p: gamma(), kappa: 3 };
        assert_eq!(sat.product_coeffs(), sat.hecke_coeffs());
        let c = sat.hecke_coeffs();
        assert_eq!(c[3], &(-&q().pow(3)) * &sat.t1());
        let bc = hecke_poly_basechange(&sat, Splitting::Inert, &LambdaValues::Inert(delta()), Half(1)).unwrap();
        let x = &delta() * &qh(3 - 6 - 1);
        assert_eq!(bc.euler_poly, &sat.hecke_poly_at(&x) * &sat.hecke_poly_at(&-&x));
        assert!(hecke_poly_basechange(&sat, Splitting::Split, &LambdaValues::Inert(delta()), Half(1)).is_err());
        let bc = hecke_poly_basechange(&sat, Splitting::Split, &LambdaValues::Split(delta(), delta()), Half(1)).unwrap();
        let one = hecke_poly_basechange(&sat, Splitting::Ramified, &LambdaValues::Ramified(delta()), Half(1)).unwrap();
        assert_eq!(bc.euler_poly, one.euler_poly.pow(2));
    }

    #[test]
    fn euler_dictionary_agrees() {
        let (a, g, d) = (alpha(), gamma(), delta());
        for kappa in 1..5 {
            let sat = SatakeGSp4::from_local(&a, &g, kappa);
            let pairs = [
                (EulerCase::Split(d.clone(), d.inv().unwrap()), KLambda::Split { delta: d.clone() }),
                (EulerCase::Inert, KLambda::Inert),
                (EulerCase::RamifiedK(int(-1)), KLambda::Ramified { lambda: int(-1) }),
            ];
            for (case, lam) in pairs {
                let lam = CharWithConductor::unramified(lam);
                assert_eq!(modified_euler(&sat, &case), modified_euler_local(&a, &g, &lam));
            }
            for c in 1..4 {
                let lam = CharWithConductor { lam: KLambda::Inert, conductor: c };
                assert_eq!(modified_euler(&sat, &EulerCase::Ramified(c)), modified_euler_local(&a, &g, &lam));
            }
        }
    }
}
