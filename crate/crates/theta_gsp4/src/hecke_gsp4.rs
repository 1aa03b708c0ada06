//! Iwahori–Hecke operators on the 8-dimensional Iwahori-fixed space of an
//! unramified principal series of GSp₄.
//!
//! Vectors are columns in the basis φ_w, w running through
//! 1, s₁, s₂, s₂s₁, s₁s₂s₁, s₁s₂, s₁s₂s₁s₂, s₂s₁s₂.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use thiserror::Error;

use crate::exact_arith::{alpha, beta, gamma, impose_central_char, int, parse, q, qh, RatFunc};

pub const DIM: usize = 8;

/// Index of φ† = φ_{s₁s₂s₁s₂}.
pub const DAGGER: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gen {
    S1,
    S2,
    Eta,
    S0,
    Id,
}

impl Gen {
    pub fn parse(tok: &str) -> Result<Gen, HeckeError> {
        Ok(match tok {
            "s1" => Gen::S1,
            "s2" => Gen::S2,
            "eta" => Gen::Eta,
            "s0" => Gen::S0,
            "id" | "1" => Gen::Id,
            _ => return Err(HeckeError::UnknownGenerator(tok.to_string())),
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeckeError {
    #[error("unknown generator token {0:?}")]
    UnknownGenerator(String),
    #[error("empty Hecke word")]
    EmptyWord,
    #[error("fixture line {0}: {1}")]
    Fixture(usize, String),
    #[error("matrix is singular")]
    Singular,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylElt {
    pub word: Vec<Gen>,
    pub length: u32,
    pub index: usize,
}

/// The Weyl group in basis order, each with one reduced word.
pub fn weyl_elements() -> Vec<WeylElt> {
    use Gen::*;
    let words: [&[Gen]; DIM] = [&[], &[S1], &[S2], &[S2, S1], &[S1, S2, S1], &[S1, S2], &[S1, S2, S1, S2], &[S2, S1, S2]];
    words
        .iter()
        .enumerate()
        .map(|(i, w)| WeylElt { word: w.to_vec(), length: w.len() as u32, index: i })
        .collect()
}

#[derive(Clone, PartialEq, Eq)]
pub struct HeckeMatrix {
    e: Vec<Vec<RatFunc>>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IwahoriVector {
    pub coords: Vec<RatFunc>,
}

impl HeckeMatrix {
    pub fn zero() -> Self {
        HeckeMatrix { e: vec![vec![RatFunc::zero(); DIM]; DIM] }
    }

    pub fn identity() -> Self {
        Self::scalar(&RatFunc::one())
    }

    pub fn scalar(c: &RatFunc) -> Self {
        let mut m = Self::zero();
        for i in 0..DIM {
            m.e[i][i] = c.clone();
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &RatFunc {
        &self.e[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RatFunc) {
        self.e[i][j] = v;
    }

    pub fn map(&self, f: impl Fn(&RatFunc) -> RatFunc) -> Self {
        HeckeMatrix { e: self.e.iter().map(|r| r.iter().map(&f).collect()).collect() }
    }

    pub fn scale(&self, c: &RatFunc) -> Self {
        self.map(|x| x * c)
    }

    pub fn apply(&self, v: &IwahoriVector) -> IwahoriVector {
        let coords = (0..DIM)
            .map(|i| (0..DIM).filter(|&j| !self.e[i][j].is_zero() && !v.coords[j].is_zero()).map(|j| &self.e[i][j] * &v.coords[j]).sum())
            .collect();
        IwahoriVector { coords }
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|r| r.iter().all(|x| x.is_zero()))
    }

    /// Positions where `self` and `other` differ.
    pub fn diff_entries(&self, other: &Self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..DIM {
            for j in 0..DIM {
                if self.e[i][j] != other.e[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Gauss–Jordan inverse over the rational function field.
    pub fn inverse(&self) -> Result<Self, HeckeError> {
        let mut a = self.e.clone();
        let mut inv = Self::identity().e;
        for col in 0..DIM {
            let piv = (col..DIM).find(|&r| !a[r][col].is_zero()).ok_or(HeckeError::Singular)?;
            a.swap(col, piv);
            inv.swap(col, piv);
            let p = a[col][col].inv().map_err(|_| HeckeError::Singular)?;
            for j in 0..DIM {
                a[col][j] = &a[col][j] * &p;
                inv[col][j] = &inv[col][j] * &p;
            }
            for r in 0..DIM {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for j in 0..DIM {
                    if !a[col][j].is_zero() {
                        a[r][j] = &a[r][j] - &(&f * &a[col][j]);
                    }
                    if !inv[col][j].is_zero() {
                        inv[r][j] = &inv[r][j] - &(&f * &inv[col][j]);
                    }
                }
            }
        }
        Ok(HeckeMatrix { e: inv })
    }

    pub fn with_central_char(&self) -> Self {
        self.map(impose_central_char)
    }

    /// Parse the "row col expr" fixture format.
    pub fn from_fixture(text: &str) -> Result<Self, HeckeError> {
        let mut m = Self::zero();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.splitn(3, char::is_whitespace);
            let (r, c, x) = match (it.next(), it.next(), it.next()) {
                (Some(r), Some(c), Some(x)) => (r, c, x),
                _ => return Err(HeckeError::Fixture(ln + 1, "expected \"row col expr\"".into())),
            };
            let r: usize = r.parse().map_err(|_| HeckeError::Fixture(ln + 1, "bad row".into()))?;
            let c: usize = c.parse().map_err(|_| HeckeError::Fixture(ln + 1, "bad column".into()))?;
            if r >= DIM || c >= DIM {
                return Err(HeckeError::Fixture(ln + 1, "index out of range".into()));
            }
            m.e[r][c] = parse(x).map_err(|e| HeckeError::Fixture(ln + 1, e.to_string()))?;
        }
        Ok(m)
    }

    pub fn to_fixture(&self) -> String {
        let mut s = String::new();
        for i in 0..DIM {
            for j in 0..DIM {
                if !self.e[i][j].is_zero() {
                    s.push_str(&format!("{i} {j} {}\n", self.e[i][j]));
                }
            }
        }
        s
    }
}

impl fmt::Debug for HeckeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_fixture())
    }
}

impl<'a> Mul<&'a HeckeMatrix> for &'a HeckeMatrix {
    type Output = HeckeMatrix;
    fn mul(self, o: &HeckeMatrix) -> HeckeMatrix {
        let mut out = HeckeMatrix::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                let mut acc = RatFunc::zero();
                for k in 0..DIM {
                    if !self.e[i][k].is_zero() && !o.e[k][j].is_zero() {
                        acc = &acc + &(&self.e[i][k] * &o.e[k][j]);
                    }
                }
                out.e[i][j] = acc;
            }
        }
        out
    }
}

impl<'a> Add<&'a HeckeMatrix> for &'a HeckeMatrix {
    type Output = HeckeMatrix;
    fn add(self, o: &HeckeMatrix) -> HeckeMatrix {
        let mut out = self.clone();
        for i in 0..DIM {
            for j in 0..DIM {
                out.e[i][j] = &self.e[i][j] + &o.e[i][j];
            }
        }
        out
    }
}

impl<'a> Sub<&'a HeckeMatrix> for &'a HeckeMatrix {
    type Output = HeckeMatrix;
    fn sub(self, o: &HeckeMatrix) -> HeckeMatrix {
        let mut out = self.clone();
        for i in 0..DIM {
            for j in 0..DIM {
                out.e[i][j] = &self.e[i][j] - &o.e[i][j];
            }
        }
        out
    }
}

impl IwahoriVector {
    pub fn zero() -> Self {
        IwahoriVector { coords: vec![RatFunc::zero(); DIM] }
    }

    pub fn basis(i: usize) -> Self {
        let mut v = Self::zero();
        v.coords[i] = RatFunc::one();
        v
    }

    pub fn scale(&self, c: &RatFunc) -> Self {
        IwahoriVector { coords: self.coords.iter().map(|x| x * c).collect() }
    }

    pub fn map(&self, f: impl Fn(&RatFunc) -> RatFunc) -> Self {
        IwahoriVector { coords: self.coords.iter().map(f).collect() }
    }

    /// `Some(c)` with self = c·other, if proportional.
    pub fn ratio_to(&self, other: &Self) -> Option<RatFunc> {
        let k = other.coords.iter().position(|x| !x.is_zero())?;
        let c = &self.coords[k] / &other.coords[k];
        if (0..DIM).all(|i| self.coords[i] == &other.coords[i] * &c) {
            Some(c)
        } else {
            None
        }
    }
}

/// φ⁰_χ, the spherical vector: all coordinates 1.
pub fn phi0() -> IwahoriVector {
    IwahoriVector { coords: vec![RatFunc::one(); DIM] }
}

pub fn phi_dagger() -> IwahoriVector {
    IwahoriVector::basis(DAGGER)
}

/// The paramodular vector φ^pa.
pub fn phi_pa() -> IwahoriVector {
    let t = qh(-3);
    let one = RatFunc::one();
    IwahoriVector { coords: vec![one.clone(), one.clone(), one.clone(), t.clone(), t.clone(), one, t.clone(), t] }
}

fn block_s1() -> HeckeMatrix {
    let mut m = HeckeMatrix::zero();
    let (qq, qm1) = (q(), q() - int(1));
    for b in [0, 2] {
        m.e[b][b + 1] = qq.clone();
        m.e[b + 1][b] = RatFunc::one();
        m.e[b + 1][b + 1] = qm1.clone();
    }
    for b in [4, 6] {
        m.e[b][b] = qm1.clone();
        m.e[b][b + 1] = RatFunc::one();
        m.e[b + 1][b] = qq.clone();
    }
    m
}

fn mat_s2() -> HeckeMatrix {
    let mut m = HeckeMatrix::zero();
    let (qq, qm1) = (q(), q() - int(1));
    for (i, j) in [(0, 2), (1, 5), (3, 7), (4, 6)] {
        m.e[i][j] = qq.clone();
    }
    for (i, j) in [(2, 0), (5, 1), (6, 4), (7, 3)] {
        m.e[i][j] = RatFunc::one();
    }
    for i in [2, 5, 6, 7] {
        m.e[i][i] = qm1.clone();
    }
    m
}

fn mat_eta() -> HeckeMatrix {
    let g = gamma();
    let vals = [
        &g * &qh(3),
        &g * &qh(3),
        &(&beta() * &g) * &qh(1),
        &(&beta() * &g) * &qh(1),
        &(&alpha() * &g) * &qh(-1),
        &(&alpha() * &g) * &qh(-1),
        &(&(&alpha() * &beta()) * &g) * &qh(-3),
        &(&(&alpha() * &beta()) * &g) * &qh(-3),
    ];
    let mut m = HeckeMatrix::zero();
    for (i, v) in vals.into_iter().enumerate() {
        m.e[i][DIM - 1 - i] = v;
    }
    m
}

pub fn generator_matrix(g: Gen) -> HeckeMatrix {
    match g {
        Gen::S1 => block_s1(),
        Gen::S2 => mat_s2(),
        Gen::Eta => mat_eta(),
        Gen::Id => HeckeMatrix::identity(),
        Gen::S0 => {
            let eta = mat_eta();
            let inv = eta.inverse().expect("η is invertible");
            &(&eta * &mat_s2()) * &inv
        }
    }
}

pub fn word_product(word: &[Gen]) -> HeckeMatrix {
    word.iter()
        .fold(HeckeMatrix::identity(), |acc, g| &acc * &generator_matrix(*g))
}

pub const UQ_WORD: [Gen; 4] = [Gen::S1, Gen::S2, Gen::S1, Gen::S0];
pub const UP_WORD: [Gen; 4] = [Gen::S2, Gen::S1, Gen::S2, Gen::Eta];

/// Product of a whitespace- or comma-separated word; `UQ`, `UP` expand to their defining words.
pub fn hecke_word(word: &str) -> Result<HeckeMatrix, HeckeError> {
    let toks: Vec<&str> = word.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
    if toks.is_empty() {
        return Err(HeckeError::EmptyWord);
    }
    let mut gens = Vec::new();
    for t in toks {
        match t {
            "UQ" => gens.extend_from_slice(&UQ_WORD),
            "UP" => gens.extend_from_slice(&UP_WORD),
            _ => gens.push(Gen::parse(t)?),
        }
    }
    Ok(word_product(&gens))
}

pub fn u_q() -> HeckeMatrix {
    word_product(&UQ_WORD)
}

pub fn u_p() -> HeckeMatrix {
    word_product(&UP_WORD)
}

pub fn uq_fixture() -> HeckeMatrix {
    HeckeMatrix::from_fixture(include_str!("../fixtures/uq.txt")).expect("valid U^Q fixture")
}

pub fn up_fixture() -> HeckeMatrix {
    HeckeMatrix::from_fixture(include_str!("../fixtures/up.txt")).expect("valid U^P fixture")
}

fn shifted(m: &HeckeMatrix, c: &RatFunc) -> HeckeMatrix {
    m - &HeckeMatrix::scalar(c)
}

/// e⁰_ord = α γ⁻³ q^{-13/2} (U^Q − q²/β)(U^P − q^{3/2}/γ)(U^P − q^{3/2}γα)(U^P − q^{3/2}γβ).
pub fn ordinary_projector() -> HeckeMatrix {
    let (uq, up) = (u_q(), u_p());
    let g = gamma();
    let q32 = qh(3);
    let f1 = shifted(&uq, &(&q() * &q() / &beta()));
    let f2 = shifted(&up, &(&q32 / &g));
    let f3 = shifted(&up, &(&(&q32 * &g) * &alpha()));
    let f4 = shifted(&up, &(&(&q32 * &g) * &beta()));
    let c = &alpha() / &(&g.pow(3) * &qh(13));
    (&(&(&f1 * &f2) * &f3) * &f4).scale(&c)
}

/// φ‡ = e⁰_ord φ⁰_χ.
pub fn phi_ddagger() -> IwahoriVector {
    let (uq, up) = (u_q(), u_p());
    let g = gamma();
    let q32 = qh(3);
    let v = phi0();
    let v = shifted(&up, &(&(&q32 * &g) * &beta())).apply(&v);
    let v = shifted(&up, &(&(&q32 * &g) * &alpha())).apply(&v);
    let v = shifted(&up, &(&q32 / &g)).apply(&v);
    let v = shifted(&uq, &(&q().pow(2) / &beta())).apply(&v);
    v.scale(&(&alpha() / &(&g.pow(3) * &qh(13))))
}

/// φ♭ = q^{-15/2}γ⁻¹α³(U^P − q^{3/2}γβ)(U^Q − q²α)(U^Q − q²β)(U^Q − q²β⁻¹)φ⁰_χ.
pub fn phi_flat() -> IwahoriVector {
    let (uq, up) = (u_q(), u_p());
    let q2 = q().pow(2);
    let v = phi0();
    let v = shifted(&uq, &(&q2 / &beta())).apply(&v);
    let v = shifted(&uq, &(&q2 * &beta())).apply(&v);
    let v = shifted(&uq, &(&q2 * &alpha())).apply(&v);
    let v = shifted(&up, &(&(&qh(3) * &gamma()) * &beta())).apply(&v);
    v.scale(&(&(&qh(-15) / &gamma()) * &alpha().pow(3)))
}

/// (1−αq⁻¹)(1−βq⁻¹)(1−α²γ²q⁻¹)(1−γ⁻²q⁻¹), the scalar with e⁰_ord φ⁰ = (·)φ†.
pub fn ordinary_scalar() -> RatFunc {
    let qi = q().pow(-1);
    let one = RatFunc::one();
    let ag = &alpha() * &gamma();
    [
        &one - &(&alpha() * &qi),
        &one - &(&beta() * &qi),
        &one - &(&ag.pow(2) * &qi),
        &one - &(&gamma().pow(-2) * &qi),
    ]
    .into_iter()
    .product()
}

/// Scalar by which e⁰_ord acts on φ†, from its defining polynomial at the φ† eigenvalues.
pub fn projector_scalar_on_dagger() -> RatFunc {
    let g = gamma();
    let q32 = qh(3);
    let aq = &q().pow(2) / &alpha();
    let ap = &q32 * &g;
    let parts = [
        &aq - &(&q().pow(2) / &beta()),
        &ap - &(&q32 / &g),
        &ap - &(&(&q32 * &g) * &alpha()),
        &ap - &(&(&q32 * &g) * &beta()),
    ];
    let c = &alpha() / &(&g.pow(3) * &qh(13));
    parts.into_iter().fold(c, |acc, x| &acc * &x)
}

/// vol(𝕀) = q⁻⁴(1+q⁻¹)⁻¹.
pub fn iwahori_volume() -> RatFunc {
    &q().pow(-4) / &(&RatFunc::one() + &q().pow(-1))
}

/// Σ_w v1_w v2_w q^{ℓ(w)} vol(𝕀).
pub fn iwahori_pairing(v1: &IwahoriVector, v2: &IwahoriVector) -> RatFunc {
    let s: RatFunc = weyl_elements()
        .iter()
        .map(|w| &(&v1.coords[w.index] * &v2.coords[w.index]) * &q().pow(w.length as i32))
        .sum();
    &s * &iwahori_volume()
}

/// Outcome of checking an identity generically and under αβγ² = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityStatus {
    pub name: String,
    pub generic: bool,
    pub central: bool,
}

impl IdentityStatus {
    pub fn holds(&self) -> bool {
        self.generic || self.central
    }
}

fn status_mat(name: &str, lhs: &HeckeMatrix, rhs: &HeckeMatrix) -> IdentityStatus {
    let generic = lhs == rhs;
    let central = generic || lhs.with_central_char() == rhs.with_central_char();
    IdentityStatus { name: name.to_string(), generic, central }
}

fn status_vec(name: &str, lhs: &IwahoriVector, rhs: &IwahoriVector) -> IdentityStatus {
    let generic = lhs == rhs;
    let central = generic || lhs.map(impose_central_char) == rhs.map(impose_central_char);
    IdentityStatus { name: name.to_string(), generic, central }
}

/// The Hecke relations: quadratic, braid, commutation, fixtures and reduced-word independence.
pub fn relation_checks() -> Vec<IdentityStatus> {
    let s1 = generator_matrix(Gen::S1);
    let s2 = generator_matrix(Gen::S2);
    let qm1 = q() - int(1);
    let id_q = HeckeMatrix::scalar(&q());
    let mut out = Vec::new();
    for (name, s) in [("quadratic s1", &s1), ("quadratic s2", &s2)] {
        out.push(status_mat(name, &(s * s), &(&s.scale(&qm1) + &id_q)));
    }
    let s0 = generator_matrix(Gen::S0);
    out.push(status_mat("quadratic s0", &(&s0 * &s0), &(&s0.scale(&qm1) + &id_q)));
    let b1 = word_product(&[Gen::S1, Gen::S2, Gen::S1, Gen::S2]);
    let b2 = word_product(&[Gen::S2, Gen::S1, Gen::S2, Gen::S1]);
    out.push(status_mat("braid C2", &b1, &b2));
    let (uq, up) = (u_q(), u_p());
    out.push(status_mat("UQ UP = UP UQ", &(&uq * &up), &(&up * &uq)));
    out.push(status_mat("UQ word = UQ fixture", &uq, &uq_fixture()));
    out.push(status_mat("UP word = UP fixture", &up, &up_fixture()));
    out
}

/// Eigen-relations, ordinary projection and stabilisation identities for φ†.
pub fn eigen_checks() -> Vec<IdentityStatus> {
    let (uq, up) = (u_q(), u_p());
    let dag = phi_dagger();
    let mut out = vec![
        status_vec("UQ phi_dagger = q^2 a^-1 phi_dagger", &uq.apply(&dag), &dag.scale(&(&q().pow(2) / &alpha()))),
        status_vec("UP phi_dagger = q^(3/2) g phi_dagger", &up.apply(&dag), &dag.scale(&(&qh(3) * &gamma()))),
    ];
    let pd = phi_ddagger();
    out.push(status_vec("e_ord phi0 = d(chi)^-1 phi_dagger", &pd, &dag.scale(&ordinary_scalar())));
    out.push(status_vec("e_ord matrix phi0 = phi_ddagger", &ordinary_projector().apply(&phi0()), &pd));
    out.push(status_vec("phi_flat = (a+1) phi_ddagger", &phi_flat(), &pd.scale(&(&alpha() + &int(1)))));
    out.push(status_vec(
        "e_ord phi_dagger = c phi_dagger",
        &ordinary_projector().apply(&dag),
        &dag.scale(&projector_scalar_on_dagger()),
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_rows() {
        let m = generator_matrix(Gen::Eta);
        assert_eq!(m.get(0, 7).to_string(), "u^3*g");
        assert_eq!(m.get(7, 0).to_string(), "u^-3*a*b*g");
        assert_eq!(generator_matrix(Gen::Id), HeckeMatrix::identity());
    }

    #[test]
    fn uq_corner() {
        assert_eq!(*hecke_word("UQ").unwrap().get(0, 0), &q().pow(2) * &alpha());
        assert!(matches!(hecke_word("s1 x"), Err(HeckeError::UnknownGenerator(_))));
        assert!(matches!(hecke_word(""), Err(HeckeError::EmptyWord)));
    }

    #[test]
    fn pairing_values() {
        let pa = phi_pa();
        let zeta = |k: i32| (&RatFunc::one() - &q().pow(-k)).inv().unwrap();
        let want = &(&q().pow(-2) * &zeta(1).pow(2)) / &zeta(2).pow(2);
        assert_eq!(iwahori_pairing(&pa, &pa), want);
        let e0 = IwahoriVector::basis(0);
        assert_eq!(iwahori_pairing(&e0, &e0), iwahori_volume());
        let total = &(&(&q() + &int(1)).pow(2) * &(&q().pow(2) + &int(1))) * &iwahori_volume();
        assert_eq!(iwahori_pairing(&phi0(), &phi0()), total);
    }

    #[test]
    fn fixture_roundtrip() {
        let m = uq_fixture();
        assert_eq!(HeckeMatrix::from_fixture(&m.to_fixture()).unwrap(), m);
    }
}
