//! Exact rational-function arithmetic over ℚ in u (u² = q), α, β, γ, δ.

mod format;
mod gcd;
mod poly;
mod ratfunc;

use std::collections::BTreeMap;

use thiserror::Error;

pub use format::{parse, poly_to_string};
pub use gcd::poly_gcd;
pub use poly::{rat, rat_int, Mono, Poly, Rat, Sym, NVARS};
pub use ratfunc::RatFunc;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("division by zero in coefficient field")]
    DivisionByZero,
    #[error("divergent formal series")]
    DivergentSeries,
    #[error("denominator factor {0} vanishes after substitution")]
    VanishingDenominator(String),
    #[error("expression {0} still contains free symbols")]
    Unbound(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub fn normalize(num: Poly, den: Poly) -> Result<RatFunc, ArithError> {
    RatFunc::normalize(num, den)
}

pub fn substitute(f: &RatFunc, bindings: &BTreeMap<Sym, RatFunc>) -> Result<RatFunc, ArithError> {
    f.substitute(bindings)
}

pub fn sum_geometric(coeff: &RatFunc, ratio: &RatFunc, start: i32) -> Result<RatFunc, ArithError> {
    RatFunc::sum_geometric(coeff, ratio, start)
}

pub fn u() -> RatFunc {
    RatFunc::var(Sym::U)
}

pub fn q() -> RatFunc {
    RatFunc::q()
}

pub fn alpha() -> RatFunc {
    RatFunc::var(Sym::Alpha)
}

pub fn beta() -> RatFunc {
    RatFunc::var(Sym::Beta)
}

pub fn gamma() -> RatFunc {
    RatFunc::var(Sym::Gamma)
}

pub fn delta() -> RatFunc {
    RatFunc::var(Sym::Delta)
}

pub fn int(n: i64) -> RatFunc {
    RatFunc::int(n)
}

/// q^{k/2}.
pub fn qh(k: i32) -> RatFunc {
    RatFunc::u_pow(k)
}

/// Bindings for the central-character relation αβγ² = 1, eliminating β.
pub fn central_char_bindings() -> BTreeMap<Sym, RatFunc> {
    let mut b = BTreeMap::new();
    b.insert(Sym::Beta, (alpha() * gamma().pow(2)).inv().unwrap());
    b
}

/// Apply the substitution β ↦ α⁻¹γ⁻².
pub fn impose_central_char(f: &RatFunc) -> RatFunc {
    f.substitute(&central_char_bindings())
        .expect("β ↦ α⁻¹γ⁻² never vanishes a denominator symbolically")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> RatFunc {
        parse(s).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let f = (q() - int(1)) / (q().pow(2) - q());
        assert_eq!(f, q().pow(-1));
        let g = (u().pow(2) - int(1)) / (u() - int(1));
        assert_eq!(g, u() + int(1));
        let h = impose_central_char(&(alpha() * gamma() * beta()));
        assert_eq!(h, gamma().pow(-1));
        let zero_den = normalize(Poly::one(), Poly::zero());
        assert_eq!(zero_den.unwrap_err().to_string(), "division by zero in coefficient field");
    }

    #[test]
    fn substitute_examples() {
        let f = (int(1) - gamma() / u()).inv().unwrap();
        let mut b = BTreeMap::new();
        b.insert(Sym::Gamma, int(1));
        b.insert(Sym::U, int(2));
        assert_eq!(f.substitute(&b).unwrap(), int(2));
        let f = alpha() * beta() * gamma().pow(2);
        assert!(impose_central_char(&f).is_one());
        let f = q().pow(2) * alpha();
        let mut b = BTreeMap::new();
        b.insert(Sym::U, int(3));
        b.insert(Sym::Alpha, RatFunc::ratio(1, 3));
        assert_eq!(f.substitute(&b).unwrap(), int(27));
    }

    #[test]
    fn substitute_reports_vanishing_factor() {
        let f = (int(1) - gamma()).inv().unwrap();
        let mut b = BTreeMap::new();
        b.insert(Sym::Gamma, int(1));
        let e = f.substitute(&b).unwrap_err();
        assert!(matches!(e, ArithError::VanishingDenominator(ref s) if s.contains('g')));
    }

    #[test]
    fn geometric_examples() {
        let r = gamma() / delta();
        assert_eq!(sum_geometric(&int(1), &r, 0).unwrap(), (int(1) - r.clone()).inv().unwrap());
        assert!(sum_geometric(&int(0), &r, 3).unwrap().is_zero());
        assert_eq!(sum_geometric(&int(1), &int(1), 0).unwrap_err().to_string(), "divergent formal series");
    }

    #[test]
    fn geometric_i0_pattern() {
        // Σ_{i≥2} qⁱ·εγ^{-i}q^{-3i/2}δ^{1-i} with ε = 1 in ratio form γ⁻¹δ⁻¹q^{-1/2}.
        let ratio = (gamma() * delta() * u()).inv().unwrap();
        let coeff = delta();
        let got = sum_geometric(&coeff, &ratio, 2).unwrap();
        let want = gamma().pow(-2) / q() / delta() / (int(1) - ratio);
        assert_eq!(got, want);
    }

    #[test]
    fn print_parse_roundtrip() {
        let f = p("(q^2*a - 1)/(q*g + 1)");
        assert_eq!(f.to_string(), "(q^2*a - 1)/(q*g + 1)");
        for s in ["u^3*a^-1 - 3/2*g", "(2*u*d + 1)/(a*b - 7)", "0", "-q^-2", "(a)/(b^2 + b)"] {
            let f = p(s);
            assert_eq!(p(&f.to_string()), f, "{s}");
        }
        assert!(parse("q^").is_err());
        assert!(parse("x+1").is_err());
    }
}
