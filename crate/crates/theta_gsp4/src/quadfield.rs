//! Imaginary quadratic fields, ring class groups of p-power conductor as
//! classes of positive definite binary quadratic forms, and finite-order
//! characters of those groups.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;
use thiserror::Error;

use crate::lfactors::Splitting;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadError {
    #[error("discriminant {0} is not negative and ≡ 0, 1 mod 4")]
    BadDiscriminant(i64),
    #[error("-{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("{0} is not prime")]
    NotPrime(i64),
    #[error("form ({0}, {1}, {2}) is not positive definite and primitive")]
    BadForm(i64, i64, i64),
    #[error("class number formula gives {formula} but enumeration gives {enumerated}")]
    Inconsistent { formula: u64, enumerated: u64 },
    #[error("group law check failed: {0}")]
    GroupLaw(String),
    #[error("character assignment is inconsistent at element {0}")]
    InconsistentAssignment(usize),
    #[error("assignment does not generate the group")]
    NotGenerating,
    #[error("level {0} is outside the tower")]
    Level(u32),
}

pub type Mat2 = [[i64; 2]; 2];

pub const IDENTITY: Mat2 = [[1, 0], [0, 1]];

pub fn mat_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut o = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    o
}

pub fn mat_det(x: &Mat2) -> i64 {
    x[0][0] * x[1][1] - x[0][1] * x[1][0]
}

/// Inverse of a determinant-one matrix.
pub fn mat_inv_sl2(x: &Mat2) -> Mat2 {
    debug_assert_eq!(mat_det(x), 1);
    [[x[1][1], -x[0][1]], [-x[1][0], x[0][0]]]
}

/// The form a x² + b xy + c y², i.e. the half-integral matrix [[a, b/2], [b/2, c]].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

impl Form {
    pub const fn new(a: i64, b: i64, c: i64) -> Form {
        Form { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn content(&self) -> i64 {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0 && self.disc() < 0
    }

    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    /// det of [[a, b/2], [b/2, c]].
    pub fn det_quarter(&self) -> Ratio<i64> {
        Ratio::new(-self.disc(), 4)
    }

    pub fn scale(&self, k: i64) -> Form {
        Form::new(self.a * k, self.b * k, self.c * k)
    }

    /// f∘g, the matrix ᵗg S g.
    pub fn transform(&self, g: &Mat2) -> Form {
        let [[p, r], [q, s]] = *g;
        Form::new(self.eval(p, q), 2 * self.a * p * r + self.b * (p * s + r * q) + 2 * self.c * q * s, self.eval(r, s))
    }

    pub fn is_reduced(&self) -> bool {
        self.b.abs() <= self.a && self.a <= self.c && (self.b >= 0 || (self.b.abs() != self.a && self.a != self.c))
    }

    /// Reduced form f∘g with g ∈ SL₂(ℤ).
    pub fn reduce_with(&self) -> (Form, Mat2) {
        assert!(self.is_positive_definite(), "reduction needs a positive definite form, got {self}");
        let mut f = *self;
        let mut g = IDENTITY;
        loop {
            // Translate b into (−a, a].
            let two_a = 2 * f.a;
            let k = Integer::div_floor(&(f.a - f.b), &two_a);
            if k != 0 {
                let t = [[1, k], [0, 1]];
                f = f.transform(&t);
                g = mat_mul(&g, &t);
            }
            if f.c < f.a {
                let s = [[0, -1], [1, 0]];
                f = f.transform(&s);
                g = mat_mul(&g, &s);
                continue;
            }
            if f.a == f.c && f.b < 0 {
                let s = [[0, -1], [1, 0]];
                f = f.transform(&s);
                g = mat_mul(&g, &s);
            }
            break;
        }
        debug_assert!(f.is_reduced(), "{f}");
        (f, g)
    }

    pub fn reduce(&self) -> Form {
        self.reduce_with().0
    }

    /// The class of ideals [a, (−b+√D)/2] compose as forms.
    pub fn compose(&self, other: &Form) -> Form {
        compose_forms(self, other).reduce()
    }

    pub fn inverse(&self) -> Form {
        Form::new(self.a, -self.b, self.c).reduce()
    }

    pub fn principal(disc: i64) -> Form {
        let b = disc.rem_euclid(2);
        Form::new(1, b, (b * b - disc) / 4)
    }

    /// Proper automorphs in SL₂(ℤ) of a reduced form.
    pub fn automorphs(&self) -> Vec<Mat2> {
        let mut out = Vec::new();
        let r = [-1i64, 0, 1];
        for &p in &r {
            for &q in &r {
                for &x in &r {
                    for &s in &r {
                        let g = [[p, x], [q, s]];
                        if mat_det(&g) == 1 && self.transform(&g) == *self {
                            out.push(g);
                        }
                    }
                }
            }
        }
        out
    }
}

/// Dirichlet composition (Cohen, Algorithm 5.4.7) without reduction.
fn compose_forms(f1: &Form, f2: &Form) -> Form {
    let (f1, f2) = if f1.a > f2.a { (*f2, *f1) } else { (*f1, *f2) };
    let (a1, b1) = (f1.a as i128, f1.b as i128);
    let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
    let s = (b1 + b2) / 2;
    let n = b2 - s;
    let (d, y1) = if a2 % a1 == 0 {
        (a1, 0)
    } else {
        let e = a2.extended_gcd(&a1);
        (e.gcd, e.x)
    };
    let (d1, x2, y2) = if s % d == 0 {
        (d, 0, -1)
    } else {
        let e = s.extended_gcd(&d);
        (e.gcd, e.x, -e.y)
    };
    let v1 = a1 / d1;
    let v2 = a2 / d1;
    let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
    let b3 = b2 + 2 * v2 * r;
    let a3 = v1 * v2;
    let c3 = (c2 * d1 + r * (b2 + v2 * r)) / v1;
    Form::new(a3 as i64, b3 as i64, c3 as i64)
}

pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors(mut n: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn pow_mod(mut b: i64, mut e: i64, m: i64) -> i64 {
    let mut r = 1i64;
    b = b.rem_euclid(m);
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as i128 * b as i128) % m as i128) as i64;
        }
        b = ((b as i128 * b as i128) % m as i128) as i64;
        e >>= 1;
    }
    r
}

/// Kronecker symbol (d | ℓ) for ℓ prime.
pub fn kronecker(d: i64, l: i64) -> i64 {
    if d % l == 0 {
        return 0;
    }
    if l == 2 {
        return match d.rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        };
    }
    match pow_mod(d, (l - 1) / 2, l) {
        1 => 1,
        _ => -1,
    }
}

pub fn splitting_type(l: i64, delta_k: i64) -> Splitting {
    match kronecker(-delta_k, l) {
        1 => Splitting::Split,
        -1 => Splitting::Inert,
        _ => Splitting::Ramified,
    }
}

fn squarefree(n: i64) -> bool {
    let mut d = 2;
    while d * d <= n {
        if n % (d * d) == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ImagQuadField {
    pub delta_k: i64,
    pub w_k: i64,
    /// Tr θ and N θ for o_K = ℤ + ℤθ.
    pub theta_trace: i64,
    pub theta_norm: i64,
}

impl ImagQuadField {
    pub fn new(delta_k: i64) -> Result<Self, QuadError> {
        let d = -delta_k;
        let fundamental = delta_k > 0
            && match d.rem_euclid(4) {
                1 => squarefree(delta_k),
                0 => {
                    let m = delta_k / 4;
                    matches!(m % 4, 1 | 2) && squarefree(m)
                }
                _ => false,
            };
        if !fundamental {
            return Err(QuadError::NotFundamental(delta_k));
        }
        let w_k = match delta_k {
            3 => 6,
            4 => 4,
            _ => 2,
        };
        let t = d.rem_euclid(2);
        Ok(ImagQuadField { delta_k, w_k, theta_trace: t, theta_norm: (t * t + delta_k) / 4 })
    }

    /// The norm form of ℤ + ℤθ, whose matrix has determinant Δ_K/4.
    pub fn s_theta(&self) -> Form {
        Form::new(1, self.theta_trace, self.theta_norm)
    }

    /// [O_K^× : ℤ^×].
    pub fn unit_index(&self) -> u64 {
        (self.w_k / 2) as u64
    }

    pub fn order_disc(&self, p: i64, n: u32) -> i64 {
        -p.pow(2 * n) * self.delta_k
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TowerInfo {
    pub field: ImagQuadField,
    pub p: i64,
    pub n: u32,
}

#[derive(Clone, Debug)]
pub struct RingClassGroup {
    pub disc: i64,
    pub tower: Option<TowerInfo>,
    pub elements: Vec<Form>,
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    pub inverse: Vec<usize>,
    index: HashMap<Form, usize>,
}

/// All reduced forms of discriminant `disc`, primitive or not.
pub fn reduced_forms(disc: i64, primitive_only: bool) -> Vec<Form> {
    let mut out = Vec::new();
    let dd = -disc;
    let mut a = 1i64;
    while 3 * a * a <= dd {
        for b in -a + 1..=a {
            if (b - disc).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let f = Form::new(a, b, c);
            if c < a || !f.is_reduced() {
                continue;
            }
            if primitive_only && !f.is_primitive() {
                continue;
            }
            out.push(f);
        }
        a += 1;
    }
    out
}

impl RingClassGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn index_of(&self, f: &Form) -> Option<usize> {
        self.index.get(&f.reduce()).copied()
    }

    pub fn pow(&self, i: usize, k: u64) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, i))
    }

    pub fn element_order(&self, i: usize) -> u64 {
        let mut x = i;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, i);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> u64 {
        (0..self.order()).map(|i| self.element_order(i)).fold(1, |a, b| a.lcm(&b))
    }

    /// Indices of squares σ² ∈ 𝒢.
    pub fn squares(&self) -> Vec<usize> {
        let mut s: Vec<usize> = (0..self.order()).map(|i| self.mul(i, i)).collect();
        s.sort();
        s.dedup();
        s
    }

    /// Identity, inverses, commutativity and associativity of the table.
    pub fn verify(&self) -> Result<(), QuadError> {
        let h = self.order();
        for i in 0..h {
            if self.mul(self.identity, i) != i {
                return Err(QuadError::GroupLaw(format!("identity fails at {}", self.elements[i])));
            }
            if self.mul(i, self.inverse[i]) != self.identity {
                return Err(QuadError::GroupLaw(format!("inverse fails at {}", self.elements[i])));
            }
            for j in 0..h {
                if self.mul(i, j) != self.mul(j, i) {
                    return Err(QuadError::GroupLaw("not commutative".into()));
                }
            }
        }
        // Associativity on a full pass for small groups, on generators' rows otherwise.
        let step = if h <= 40 { 1 } else { h / 40 };
        for i in (0..h).step_by(step) {
            for j in (0..h).step_by(step) {
                for k in 0..h {
                    if self.mul(self.mul(i, j), k) != self.mul(i, self.mul(j, k)) {
                        return Err(QuadError::GroupLaw("not associative".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn class_group(disc: i64) -> Result<RingClassGroup, QuadError> {
    if disc >= 0 || !matches!(disc.rem_euclid(4), 0 | 1) {
        return Err(QuadError::BadDiscriminant(disc));
    }
    let elements = reduced_forms(disc, true);
    let index: HashMap<Form, usize> = elements.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let h = elements.len();
    let mut table = vec![vec![0usize; h]; h];
    for i in 0..h {
        for j in i..h {
            let k = index[&elements[i].compose(&elements[j])];
            table[i][j] = k;
            table[j][i] = k;
        }
    }
    let identity = index[&Form::principal(disc)];
    let inverse = elements.iter().map(|f| index[&f.inverse()]).collect();
    let g = RingClassGroup { disc, tower: None, elements, table, identity, inverse, index };
    g.verify()?;
    Ok(g)
}

/// 𝒢ₙ = Pic(O_{pⁿ}).
pub fn ring_class_group(field: &ImagQuadField, p: i64, n: u32) -> Result<RingClassGroup, QuadError> {
    if !is_prime(p) {
        return Err(QuadError::NotPrime(p));
    }
    let mut g = class_group(field.order_disc(p, n))?;
    g.tower = Some(TowerInfo { field: *field, p, n });
    Ok(g)
}

/// h(O_{pⁿ}) = h_K pⁿ (1 − (−Δ_K|p)/p)/[O_K^× : O^×].
pub fn class_number_formula(field: &ImagQuadField, p: i64, n: u32) -> Result<u64, QuadError> {
    let hk = reduced_forms(-field.delta_k, true).len() as u64;
    if n == 0 {
        return Ok(hk);
    }
    let pm = p.pow(n - 1);
    let num = hk as i64 * pm * (p - kronecker(-field.delta_k, p));
    Ok((num / field.unit_index() as i64) as u64)
}

pub fn ring_class_number(delta_k: i64, p: i64, n: u32) -> Result<u64, QuadError> {
    let field = ImagQuadField::new(delta_k)?;
    if !is_prime(p) {
        return Err(QuadError::NotPrime(p));
    }
    let formula = class_number_formula(&field, p, n)?;
    let enumerated = reduced_forms(field.order_disc(p, n), true).len() as u64;
    if formula != enumerated {
        return Err(QuadError::Inconsistent { formula, enumerated });
    }
    Ok(formula)
}

/// An SL₂(ℤ)-equivalent form whose first coefficient is prime to p.
fn with_a_prime_to(f: &Form, p: i64) -> Form {
    for r in 1..50i64 {
        for x in -r..=r {
            for y in [-r, r].into_iter().chain(-r + 1..r) {
                if x.abs() != r && y.abs() != r {
                    continue;
                }
                if x.gcd(&y) != 1 || f.eval(x, y) % p == 0 {
                    continue;
                }
                let e = x.extended_gcd(&y);
                // [[x, −e.y], [y, e.x]] has determinant x·e.x + y·e.y = 1.
                let g = [[x, -e.y], [y, e.x]];
                return f.transform(&g);
            }
        }
    }
    unreachable!("a primitive form represents integers prime to p")
}

/// The image of a class of O_{p^{n+1}} in Pic(O_{pⁿ}): take a representative
/// ideal of norm prime to p and extend it, i.e. (a, b, c) ↦ (a, b/p, c/p²)
/// after a translation making p | b and p² | c.
pub fn project_form(f: &Form, p: i64) -> Form {
    let f = with_a_prime_to(f, p);
    let m = 2 * p * p;
    for k in 0..m {
        let t = f.transform(&[[1, k], [0, 1]]);
        if t.b % p == 0 && t.c % (p * p) == 0 {
            let g = Form::new(t.a, t.b / p, t.c / (p * p));
            if g.disc() * p * p == f.disc() {
                return g.reduce();
            }
        }
    }
    unreachable!("projection translation exists for {f}")
}

#[derive(Clone, Debug)]
pub struct RingClassTower {
    pub field: ImagQuadField,
    pub p: i64,
    pub groups: Vec<RingClassGroup>,
    /// maps[k][i] = image in 𝒢_k of element i of 𝒢_{k+1}.
    pub maps: Vec<Vec<usize>>,
}

impl RingClassTower {
    pub fn new(field: &ImagQuadField, p: i64, n_max: u32) -> Result<Self, QuadError> {
        let groups: Vec<RingClassGroup> = (0..=n_max).map(|n| ring_class_group(field, p, n)).collect::<Result<_, _>>()?;
        let mut maps = Vec::new();
        for k in 0..n_max as usize {
            let (big, small) = (&groups[k + 1], &groups[k]);
            let m: Vec<usize> = big
                .elements
                .iter()
                .map(|f| small.index_of(&project_form(f, p)).expect("projection lands in the smaller group"))
                .collect();
            maps.push(m);
        }
        let t = RingClassTower { field: *field, p, groups, maps };
        t.verify_maps()?;
        Ok(t)
    }

    pub fn n_max(&self) -> u32 {
        self.groups.len() as u32 - 1
    }

    pub fn group(&self, n: u32) -> Result<&RingClassGroup, QuadError> {
        self.groups.get(n as usize).ok_or(QuadError::Level(n))
    }

    /// Image of element i of 𝒢ₙ in 𝒢_m, m ≤ n.
    pub fn project(&self, n: u32, m: u32, mut i: usize) -> usize {
        for k in (m..n).rev() {
            i = self.maps[k as usize][i];
        }
        i
    }

    /// Elements of ker(𝒢ₙ → 𝒢_m).
    pub fn kernel(&self, n: u32, m: u32) -> Vec<usize> {
        let g = &self.groups[n as usize];
        let e = self.groups[m as usize].identity;
        (0..g.order()).filter(|&i| self.project(n, m, i) == e).collect()
    }

    /// Surjective homomorphisms with fibres of size |𝒢_{k+1}|/|𝒢_k|.
    pub fn verify_maps(&self) -> Result<(), QuadError> {
        for (k, m) in self.maps.iter().enumerate() {
            let (big, small) = (&self.groups[k + 1], &self.groups[k]);
            for i in 0..big.order() {
                for j in 0..big.order() {
                    if m[big.mul(i, j)] != small.mul(m[i], m[j]) {
                        return Err(QuadError::GroupLaw(format!("quotient map {} -> {} is not a homomorphism", k + 1, k)));
                    }
                }
            }
            let mut counts = vec![0usize; small.order()];
            for &x in m {
                counts[x] += 1;
            }
            let want = big.order() / small.order();
            if counts.iter().any(|&c| c != want) {
                return Err(QuadError::GroupLaw(format!("quotient map {} -> {} has unequal fibres", k + 1, k)));
            }
        }
        Ok(())
    }
}

/// e^{2πi r} with r ∈ [0, 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootOfUnity(pub Ratio<i64>);

impl RootOfUnity {
    pub fn new(r: Ratio<i64>) -> Self {
        let f = r - r.floor();
        RootOfUnity(f)
    }

    pub fn one() -> Self {
        RootOfUnity(Ratio::zero())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.0 + o.0)
    }

    pub fn pow(&self, k: i64) -> Self {
        Self::new(self.0 * Ratio::from_integer(k))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_zero()
    }

    pub fn order(&self) -> i64 {
        *self.0.denom()
    }

    /// Rendering only.
    pub fn to_complex(&self) -> (f64, f64) {
        let t = 2.0 * std::f64::consts::PI * (*self.0.numer() as f64) / (*self.0.denom() as f64);
        (t.cos(), t.sin())
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_zero() {
            write!(f, "1")
        } else if self.0 == Ratio::new(1, 2) {
            write!(f, "-1")
        } else {
            write!(f, "e(2pi i {}/{})", self.0.numer(), self.0.denom())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnticycChar {
    pub level: u32,
    pub values: Vec<RootOfUnity>,
    pub conductor: u32,
}

impl AnticycChar {
    pub fn value(&self, i: usize) -> RootOfUnity {
        self.values[i]
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|v| v.is_one())
    }

    pub fn order(&self) -> i64 {
        self.values.iter().map(|v| v.order()).fold(1, |a, b| a.lcm(&b))
    }
}

/// Extends a generator assignment to 𝒢ₙ, checking consistency, and computes
/// the least m with ν trivial on ker(𝒢ₙ → 𝒢_m).
pub fn anticyc_character(tower: &RingClassTower, n: u32, assignment: &[(usize, RootOfUnity)]) -> Result<AnticycChar, QuadError> {
    let g = tower.group(n)?;
    let h = g.order();
    let mut values: Vec<Option<RootOfUnity>> = vec![None; h];
    values[g.identity] = Some(RootOfUnity::one());
    let mut queue = VecDeque::from([g.identity]);
    while let Some(x) = queue.pop_front() {
        let vx = values[x].unwrap();
        for &(gen, v) in assignment {
            let y = g.mul(x, gen);
            let vy = vx.mul(&v);
            match values[y] {
                None => {
                    values[y] = Some(vy);
                    queue.push_back(y);
                }
                Some(w) if w != vy => return Err(QuadError::InconsistentAssignment(y)),
                Some(_) => {}
            }
        }
    }
    let values: Vec<RootOfUnity> = values.into_iter().collect::<Option<_>>().ok_or(QuadError::NotGenerating)?;
    for i in 0..h {
        for j in 0..h {
            if values[g.mul(i, j)] != values[i].mul(&values[j]) {
                return Err(QuadError::InconsistentAssignment(g.mul(i, j)));
            }
        }
    }
    let conductor = (0..=n)
        .find(|&m| tower.kernel(n, m).iter().all(|&i| values[i].is_one()))
        .unwrap_or(n);
    Ok(AnticycChar { level: n, values, conductor })
}

/// Pulls a character of 𝒢_m back to 𝒢ₙ along the quotient map.
pub fn pullback(tower: &RingClassTower, nu: &AnticycChar, n: u32) -> AnticycChar {
    let g = &tower.groups[n as usize];
    let values = (0..g.order()).map(|i| nu.values[tower.project(n, nu.level, i)]).collect();
    AnticycChar { level: n, values, conductor: nu.conductor }
}

/// All characters of a finite abelian group given by its table, in exact form.
pub fn all_characters(tower: &RingClassTower, n: u32) -> Result<Vec<AnticycChar>, QuadError> {
    let g = tower.group(n)?;
    let gens = generators(g);
    let orders: Vec<i64> = gens.iter().map(|&x| g.element_order(x) as i64).collect();
    let mut out = Vec::new();
    let mut idx = vec![0i64; gens.len()];
    loop {
        let assignment: Vec<(usize, RootOfUnity)> = gens
            .iter()
            .zip(&idx)
            .zip(&orders)
            .map(|((&x, &k), &o)| (x, RootOfUnity::new(Ratio::new(k, o))))
            .collect();
        if let Ok(c) = anticyc_character(tower, n, &assignment) {
            if !out.contains(&c) {
                out.push(c);
            }
        }
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(out);
            }
            idx[pos] += 1;
            if idx[pos] < orders[pos] {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// A generating set found greedily.
pub fn generators(g: &RingClassGroup) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut span: BTreeMap<usize, ()> = BTreeMap::new();
    span.insert(g.identity, ());
    let mut order: Vec<usize> = (0..g.order()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(g.element_order(i)));
    for x in order {
        if span.contains_key(&x) {
            continue;
        }
        gens.push(x);
        let mut frontier: Vec<usize> = span.keys().copied().collect();
        while let Some(y) = frontier.pop() {
            for &s in &gens {
                let z = g.mul(y, s);
                if span.insert(z, ()).is_none() {
                    frontier.push(z);
                }
            }
        }
        if span.len() == g.order() {
            break;
        }
    }
    gens
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_group_examples() {
        let g = class_group(-23).unwrap();
        assert_eq!(g.order(), 3);
        let mut e = g.elements.clone();
        e.sort();
        assert_eq!(e, vec![Form::new(1, 1, 6), Form::new(2, -1, 3), Form::new(2, 1, 3)]);
        let g = class_group(-4).unwrap();
        assert_eq!(g.elements, vec![Form::new(1, 0, 1)]);
        let g = class_group(-100).unwrap();
        assert_eq!(g.order(), 2);
        for i in 0..g.order() {
            assert_eq!(g.mul(g.identity, i), i);
        }
        assert!(class_group(5).is_err());
        assert!(class_group(-5).is_err());
    }

    #[test]
    fn class_numbers() {
        assert_eq!(ring_class_number(4, 5, 1).unwrap(), 2);
        assert_eq!(ring_class_number(4, 5, 0).unwrap(), 1);
        assert_eq!(ring_class_number(3, 7, 1).unwrap(), class_group(-147).unwrap().order() as u64);
        assert!(ring_class_number(12, 5, 1).is_err());
    }

    #[test]
    fn splitting() {
        assert_eq!(splitting_type(13, 4), Splitting::Split);
        assert_eq!(splitting_type(7, 4), Splitting::Inert);
        assert_eq!(splitting_type(2, 4), Splitting::Ramified);
        assert_eq!(splitting_type(2, 7), Splitting::Split);
        assert_eq!(splitting_type(2, 3), Splitting::Inert);
    }

    #[test]
    fn reduction_tracks_matrix() {
        let f = Form::new(13, 40, 31);
        let (r, g) = f.reduce_with();
        assert_eq!(mat_det(&g), 1);
        assert_eq!(f.transform(&g), r);
        assert!(r.is_reduced());
    }

    #[test]
    fn tower_and_characters() {
        let k = ImagQuadField::new(4).unwrap();
        let t = RingClassTower::new(&k, 5, 2).unwrap();
        assert_eq!(t.groups[1].order(), 2);
        assert_eq!(t.kernel(1, 0).len(), 2);
        let g1 = &t.groups[1];
        let other = (0..2).find(|&i| i != g1.identity).unwrap();
        let nu = anticyc_character(&t, 1, &[(other, RootOfUnity::new(Ratio::new(1, 2)))]).unwrap();
        assert_eq!(nu.values[g1.identity], RootOfUnity::one());
        assert_eq!(nu.values[other].to_string(), "-1");
        assert_eq!(nu.conductor, 1);
        let triv = anticyc_character(&t, 1, &[(other, RootOfUnity::one())]).unwrap();
        assert_eq!(triv.conductor, 0);
        assert!(anticyc_character(&t, 1, &[(other, RootOfUnity::new(Ratio::new(1, 3)))]).is_err());
        let chars = all_characters(&t, 2).unwrap();
        assert_eq!(chars.len(), t.groups[2].order());
        let back = pullback(&t, &nu, 2);
        assert_eq!(back.conductor, 1);
    }
}
