//! CM points on the definite side D = M₂(ℚ): optimal embeddings of O_{pⁿ}
//! into the standard Eichler order, their Galois translates by strong
//! approximation, Fourier-side U^Q/U^P operators, p-stabilization, and theta
//! elements over the ring class tower.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::exact_arith::{int, ArithError, RatFunc};
use crate::lfactors::Splitting;
use crate::quadfield::{
    mat_det, mat_inv_sl2, mat_mul, prime_factors, reduced_forms, splitting_type, Form, ImagQuadField, Mat2, QuadError,
    RingClassGroup, RingClassTower,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CmError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("no optimal embedding: {0}")]
    LocalObstruction(String),
    #[error("embedding is not optimal of conductor {0}")]
    NotOptimal(i64),
    #[error("strong approximation failed: {0}")]
    StrongApproximation(String),
    #[error("expected {expected} CM points, found {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("level mismatch: {0}")]
    LevelMismatch(String),
    #[error("no CM datum for group element {0}")]
    MissingDatum(usize),
    #[error("coefficient file line {0}: {1}")]
    Parse(usize, String),
}

/// ℛ = [[ℤ, ℤ], [Mℤ, ℤ]].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EichlerOrder {
    pub level: i64,
}

impl EichlerOrder {
    pub fn new(level: i64) -> Self {
        EichlerOrder { level }
    }

    pub fn contains(&self, x: &Mat2) -> bool {
        x[1][0] % self.level == 0
    }

    /// x ∈ ℓℛ.
    pub fn contains_scaled(&self, x: &Mat2, l: i64) -> bool {
        x[0][0] % l == 0 && x[0][1] % l == 0 && x[1][1] % l == 0 && x[1][0] % (l * self.level) == 0
    }

    pub fn basis(&self) -> [Mat2; 4] {
        [[[1, 0], [0, 0]], [[0, 1], [0, 0]], [[0, 0], [self.level, 0]], [[0, 0], [0, 1]]]
    }
}

/// Ψ determined by x = Ψ(cθ) for o_K = ℤ + ℤθ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OptimalEmbedding {
    pub x: Mat2,
    pub conductor: i64,
    pub order: EichlerOrder,
}

impl OptimalEmbedding {
    pub fn new(field: &ImagQuadField, x: Mat2, conductor: i64, order: EichlerOrder) -> Result<Self, CmError> {
        let c = conductor;
        if x[0][0] + x[1][1] != c * field.theta_trace || mat_det(&x) != c * c * field.theta_norm {
            return Err(CmError::NotOptimal(c));
        }
        if !order.contains(&x) {
            return Err(CmError::NotOptimal(c));
        }
        if prime_factors(c).into_iter().any(|l| order.contains_scaled(&x, l)) {
            return Err(CmError::NotOptimal(c));
        }
        Ok(OptimalEmbedding { x, conductor, order })
    }

    /// ±J·Ψ(c√−Δ_K/2) as a positive definite form.
    pub fn s_form(&self) -> Form {
        let x = &self.x;
        let f = Form::new(x[1][0], x[1][1] - x[0][0], -x[0][1]);
        if f.a < 0 {
            f.scale(-1)
        } else {
            f
        }
    }
}

/// A Γ₀(M)-class: the SL₂(ℤ)-reduced form together with the orbit of the
/// coset label in ℙ¹(ℤ/M) under the automorphs of the reduced form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassKey {
    pub form: Form,
    pub label: (i64, i64),
}

impl fmt::Display for ClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}:{}]", self.form, self.label.0, self.label.1)
    }
}

fn p1_normalize(x: i64, y: i64, m: i64) -> (i64, i64) {
    if m == 1 {
        return (0, 0);
    }
    let (x, y) = (x.rem_euclid(m), y.rem_euclid(m));
    (1..m).filter(|u| u.gcd(&m) == 1).map(|u| ((u * x) % m, (u * y) % m)).min().unwrap()
}

pub fn p1_points(m: i64) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = Vec::new();
    for x in 0..m.max(1) {
        for y in 0..m.max(1) {
            if x.gcd(&y).gcd(&m) == 1 || m == 1 {
                pts.push(p1_normalize(x, y, m));
            }
        }
    }
    pts.sort();
    pts.dedup();
    pts
}

/// An element of SL₂(ℤ) whose first column is ≡ (x, y) mod m.
pub fn lift_to_sl2(x: i64, y: i64, m: i64) -> Mat2 {
    for i in 0..40 {
        for j in 0..40 {
            let (a, c) = (x + i * m, y + j * m);
            if a.gcd(&c) == 1 {
                let e = a.extended_gcd(&c);
                return [[a, -e.y], [c, e.x]];
            }
        }
    }
    unreachable!("({x}:{y}) lifts to a primitive vector")
}

pub fn class_key(f: &Form, m: i64) -> ClassKey {
    let (r, g) = f.reduce_with();
    let h = mat_inv_sl2(&g);
    let label = r
        .automorphs()
        .iter()
        .map(|s| {
            let sh = mat_mul(s, &h);
            p1_normalize(sh[0][0], sh[1][0], m)
        })
        .min()
        .unwrap();
    ClassKey { form: r, label }
}

/// One representative form per Γ₀(M)-class of discriminant `disc`.
pub fn level_classes(disc: i64, m: i64, primitive_only: bool) -> Vec<(ClassKey, Form)> {
    let mut out: BTreeMap<ClassKey, Form> = BTreeMap::new();
    for r in reduced_forms(disc, primitive_only) {
        for (x, y) in p1_points(m) {
            let f = r.transform(&lift_to_sl2(x, y, m));
            out.entry(class_key(&f, m)).or_insert(f);
        }
    }
    out.into_iter().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CMPoint {
    pub embedding: OptimalEmbedding,
    pub s: Form,
}

impl CMPoint {
    pub fn from_embedding(embedding: OptimalEmbedding) -> Self {
        CMPoint { embedding, s: embedding.s_form() }
    }

    pub fn key(&self) -> ClassKey {
        class_key(&self.s, self.embedding.order.level)
    }

    pub fn conductor(&self) -> i64 {
        self.embedding.conductor
    }
}

fn check_heegner(field: &ImagQuadField, p: i64, n_plus: i64) -> Result<(), CmError> {
    if field.delta_k % p == 0 || n_plus % p == 0 {
        return Err(CmError::LocalObstruction(format!("p = {p} divides N⁺Δ_K")));
    }
    let fs = prime_factors(n_plus);
    if fs.iter().product::<i64>() != n_plus {
        return Err(CmError::LocalObstruction(format!("N⁺ = {n_plus} is not square-free")));
    }
    for l in fs {
        if splitting_type(l, field.delta_k) != Splitting::Split {
            return Err(CmError::LocalObstruction(format!("{l} | N⁺ does not split in K")));
        }
    }
    Ok(())
}

/// ℛ has level N⁺ at n = 0 and pN⁺ above.
pub fn order_level(p: i64, n: u32, n_plus: i64) -> i64 {
    if n == 0 {
        n_plus
    } else {
        p * n_plus
    }
}

fn embedding_from_form(field: &ImagQuadField, f: &Form, conductor: i64, order: EichlerOrder) -> Result<OptimalEmbedding, CmError> {
    let ct = conductor * field.theta_trace;
    let x = [[(ct - f.b) / 2, -f.c], [f.a, (ct + f.b) / 2]];
    OptimalEmbedding::new(field, x, conductor, order)
}

pub fn expected_cm_count(delta_k: i64, p: i64, n: u32, n_plus: i64) -> Result<usize, CmError> {
    let h = crate::quadfield::ring_class_number(delta_k, p, n)? as usize;
    Ok(h << prime_factors(n_plus).len())
}

pub fn verify_cm_count(found: usize, delta_k: i64, p: i64, n: u32, n_plus: i64) -> Result<(), CmError> {
    let expected = expected_cm_count(delta_k, p, n, n_plus)?;
    if expected != found {
        return Err(CmError::CountMismatch { expected, found });
    }
    Ok(())
}

/// Representatives of ℛ^×-conjugacy classes of optimal embeddings O_{pⁿ} → ℛ.
pub fn enumerate_cm_points(delta_k: i64, p: i64, n: u32, n_plus: i64) -> Result<Vec<CMPoint>, CmError> {
    let field = ImagQuadField::new(delta_k)?;
    check_heegner(&field, p, n_plus)?;
    let order = EichlerOrder::new(order_level(p, n, n_plus));
    let c = p.pow(n);
    let m = order.level;
    let mut seen: BTreeMap<ClassKey, CMPoint> = BTreeMap::new();
    for r in reduced_forms(field.order_disc(p, n), true) {
        for (x, y) in p1_points(m) {
            if r.eval(x, y).rem_euclid(m) != 0 {
                continue;
            }
            let f = r.transform(&lift_to_sl2(x, y, m));
            let pt = CMPoint::from_embedding(embedding_from_form(&field, &f, c, order)?);
            seen.entry(pt.key()).or_insert(pt);
        }
    }
    let pts: Vec<CMPoint> = seen.into_values().collect();
    verify_cm_count(pts.len(), delta_k, p, n, n_plus)?;
    Ok(pts)
}

/// Exhaustive search over x ∈ ℛ with |x₁₁|, |x₂₁/M| ≤ bound; independent of
/// the form-class enumeration.
pub fn brute_force_cm_keys(delta_k: i64, p: i64, n: u32, n_plus: i64, bound: i64) -> Result<Vec<ClassKey>, CmError> {
    let field = ImagQuadField::new(delta_k)?;
    let order = EichlerOrder::new(order_level(p, n, n_plus));
    let c = p.pow(n);
    let (ct, nn) = (c * field.theta_trace, c * c * field.theta_norm);
    let mut keys = Vec::new();
    for x11 in -bound..=bound {
        let x22 = ct - x11;
        for k in -bound..=bound {
            let a = k * order.level;
            if a == 0 {
                continue;
            }
            let num = x11 * x22 - nn;
            if num % a != 0 {
                continue;
            }
            let x = [[x11, num / a], [a, x22]];
            if let Ok(e) = OptimalEmbedding::new(&field, x, c, order) {
                let pt = CMPoint::from_embedding(e);
                if pt.s.is_primitive() {
                    keys.push(pt.key());
                }
            }
        }
    }
    keys.sort();
    keys.dedup();
    Ok(keys)
}

/// Row Hermite normal form of the ℤ-span of `rows`; zero rows dropped.
pub fn hnf(rows: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let mut m: Vec<Vec<i128>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    let mut pivots = Vec::new();
    for col in 0..ncols {
        // Euclid down the column until one nonzero entry remains.
        loop {
            let piv = (rank..m.len()).filter(|&i| m[i][col] != 0).min_by_key(|&i| m[i][col].abs());
            let Some(piv) = piv else { break };
            m.swap(rank, piv);
            let pr = m[rank].clone();
            let mut clean = true;
            for row in m.iter_mut().skip(rank + 1) {
                let q = Integer::div_floor(&row[col], &pr[col]);
                for (v, w) in row.iter_mut().zip(&pr) {
                    *v -= q * w;
                }
                clean &= row[col] == 0;
            }
            if clean {
                break;
            }
        }
        if rank < m.len() && m[rank][col] != 0 {
            if m[rank][col] < 0 {
                m[rank].iter_mut().for_each(|v| *v = -*v);
            }
            pivots.push(col);
            rank += 1;
        }
    }
    for r in 0..rank {
        let pc = pivots[r];
        let pr = m[r].clone();
        for row in m.iter_mut().take(r) {
            let q = Integer::div_floor(&row[pc], &pr[pc]);
            for (v, w) in row.iter_mut().zip(&pr) {
                *v -= q * w;
            }
        }
    }
    m.truncate(rank);
    m
}

fn hnf_det(rows: &[Vec<i128>]) -> i128 {
    let h = hnf(rows);
    let n = h.first().map_or(0, |r| r.len());
    if h.len() < n {
        return 0;
    }
    (0..n).map(|i| h[i][i]).product()
}

type Mat2q = [[i128; 2]; 2];

fn to_q(x: &Mat2) -> Mat2q {
    [[x[0][0] as i128, x[0][1] as i128], [x[1][0] as i128, x[1][1] as i128]]
}

fn mmul(x: &Mat2q, y: &Mat2q) -> Mat2q {
    let mut o = [[0i128; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    o
}

fn mdet(x: &Mat2q) -> i128 {
    x[0][0] * x[1][1] - x[0][1] * x[1][0]
}

fn adj(x: &Mat2q) -> Mat2q {
    [[x[1][1], -x[0][1]], [-x[1][0], x[0][0]]]
}

/// γ⁻¹ y γ when it is integral.
fn conj_by(gamma: &Mat2q, y: &Mat2q) -> Option<Mat2q> {
    let d = mdet(gamma);
    let z = mmul(&mmul(&adj(gamma), y), gamma);
    let mut o = [[0i128; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            if z[i][j] % d != 0 {
                return None;
            }
            o[i][j] = z[i][j] / d;
        }
    }
    Some(o)
}

fn in_order_q(x: &Mat2q, level: i64) -> bool {
    x[1][0] % level as i128 == 0
}

fn lattice_basis_2d(vs: &[[i128; 2]]) -> Result<Mat2q, CmError> {
    let rows: Vec<Vec<i128>> = vs.iter().map(|v| v.to_vec()).collect();
    let h = hnf(&rows);
    if h.len() != 2 {
        return Err(CmError::StrongApproximation("lattice is not of full rank".into()));
    }
    // Columns are the basis vectors.
    Ok([[h[0][0], h[1][0]], [h[0][1], h[1][1]]])
}

/// γ with det γ > 0 and Ψ(𝔞)ℛ = γℛ, from the lattice pair (ℤ², ℤ⊕Mℤ).
pub fn strong_approximation(gens: &[Mat2q], level: i64) -> Result<Mat2q, CmError> {
    let m = level as i128;
    let mut l1 = Vec::new();
    let mut l2 = Vec::new();
    for g in gens {
        let c1 = [g[0][0], g[1][0]];
        let c2 = [g[0][1], g[1][1]];
        l1.push(c1);
        l1.push(c2);
        l2.push(c1);
        l2.push([m * c2[0], m * c2[1]]);
    }
    let b1 = lattice_basis_2d(&l1)?;
    let b2 = lattice_basis_2d(&l2)?;
    let d1 = mdet(&b1);
    // Coordinates of the second lattice in the first basis.
    let coords = mmul(&adj(&b1), &b2);
    if coords.iter().flatten().any(|v| v % d1 != 0) {
        return Err(CmError::StrongApproximation("lattice pair is not nested".into()));
    }
    let lq = [[coords[0][0] / d1, coords[0][1] / d1], [coords[1][0] / d1, coords[1][1] / d1]];
    if mdet(&lq).abs() != m {
        return Err(CmError::StrongApproximation("lattice pair has the wrong index".into()));
    }
    for r in 0..30i128 {
        for s in -r..=r {
            for t in -r..=r {
                if s.abs() != r && t.abs() != r {
                    continue;
                }
                let v = [lq[0][0] * s + lq[0][1] * t, lq[1][0] * s + lq[1][1] * t];
                if v[0].gcd(&v[1]) != 1 {
                    continue;
                }
                let e = v[0].extended_gcd(&v[1]);
                let u: Mat2q = [[v[0], -e.y], [v[1], e.x]];
                // u⁻¹ L' must equal ℤ ⊕ Mℤ.
                let w = mmul(&adj(&u), &lq);
                if w[1][0] % m != 0 || w[1][1] % m != 0 {
                    continue;
                }
                let mut gamma = mmul(&b1, &u);
                if mdet(&gamma) < 0 {
                    gamma[0][1] = -gamma[0][1];
                    gamma[1][1] = -gamma[1][1];
                }
                return Ok(gamma);
            }
        }
    }
    Err(CmError::StrongApproximation("no adapted basis".into()))
}

/// [Ψ]^σ for σ the class of the ideal [a, (−b+√D)/2] attached to `g`.
pub fn galois_translate(field: &ImagQuadField, pt: &CMPoint, g: &Form) -> Result<CMPoint, CmError> {
    translate_with(field, pt, g, None)
}

/// As `galois_translate`, optionally replacing γ by γ·u for a unit u ∈ ℛ¹.
pub fn translate_with(field: &ImagQuadField, pt: &CMPoint, g: &Form, unit: Option<Mat2>) -> Result<CMPoint, CmError> {
    let emb = &pt.embedding;
    let c = emb.conductor;
    let disc = -c * c * field.delta_k;
    if g.disc() != disc || !g.is_primitive() || g.a <= 0 {
        return Err(CmError::LevelMismatch(format!("{g} is not a class of discriminant {disc}")));
    }
    let level = emb.order.level;
    let x = to_q(&emb.x);
    let k = ((g.b + c * field.theta_trace) / 2) as i128;
    let a = g.a as i128;
    // Ψ(a) and Ψ((−b+√D)/2) = x − k.
    let ideal = [[[a, 0], [0, a]], [[x[0][0] - k, x[0][1]], [x[1][0], x[1][1] - k]]];
    let mut gens = Vec::new();
    for i in &ideal {
        for r in emb.order.basis() {
            gens.push(mmul(i, &to_q(&r)));
        }
    }
    let mut gamma = strong_approximation(&gens, level)?;
    if let Some(u) = unit {
        if mat_det(&u) != 1 || !emb.order.contains(&u) {
            return Err(CmError::StrongApproximation("replacement is not a unit of ℛ".into()));
        }
        gamma = mmul(&gamma, &to_q(&u));
    }
    // Ψ(𝔞)ℛ = γℛ: γ⁻¹Ψ(𝔞)ℛ ⊆ ℛ and equal covolume.
    let d = mdet(&gamma);
    for gg in &gens {
        let z = mmul(&adj(&gamma), gg);
        if z.iter().flatten().any(|v| v % d != 0) {
            return Err(CmError::StrongApproximation("γ⁻¹Ψ(𝔞) ⊄ ℛ".into()));
        }
        let z = [[z[0][0] / d, z[0][1] / d], [z[1][0] / d, z[1][1] / d]];
        if !in_order_q(&z, level) {
            return Err(CmError::StrongApproximation("γ⁻¹Ψ(𝔞) ⊄ ℛ".into()));
        }
    }
    let rows: Vec<Vec<i128>> = gens.iter().map(|g| vec![g[0][0], g[0][1], g[1][0], g[1][1]]).collect();
    if hnf_det(&rows) != d * d * level as i128 {
        return Err(CmError::StrongApproximation("covolume of Ψ(𝔞)ℛ differs from γℛ".into()));
    }
    let xs = conj_by(&gamma, &x).ok_or_else(|| CmError::StrongApproximation("γ⁻¹Ψγ is not integral".into()))?;
    let narrow = |v: i128| i64::try_from(v).map_err(|_| CmError::StrongApproximation("entry overflow".into()));
    let xs = [[narrow(xs[0][0])?, narrow(xs[0][1])?], [narrow(xs[1][0])?, narrow(xs[1][1])?]];
    let out = CMPoint::from_embedding(OptimalEmbedding::new(field, xs, c, emb.order)?);
    if !out.s.is_primitive() {
        return Err(CmError::StrongApproximation(format!("translate has imprimitive S = {}", out.s)));
    }
    Ok(out)
}

/// Ψ_{n+1} = γ'⁻¹Ψₙγ' with γ' = diag(p, 1), so γ_{n+1} = γₙ·diag(p, 1).
pub fn tower_lift(field: &ImagQuadField, pt: &CMPoint, p: i64, n_plus: i64) -> Result<CMPoint, CmError> {
    let x = pt.embedding.x;
    let c = pt.conductor() * p;
    let xs = [[p * x[0][0], x[0][1]], [p * p * x[1][0], p * x[1][1]]];
    let order = EichlerOrder::new(p * n_plus);
    let e = OptimalEmbedding::new(field, xs, c, order)?;
    Ok(CMPoint::from_embedding(e))
}

#[derive(Clone, Debug)]
pub struct CmLevel {
    pub n: u32,
    pub gamma_n: Mat2,
    pub base: CMPoint,
    /// points[σ] = Ψₙ^σ for σ indexing 𝒢ₙ.
    pub points: Vec<CMPoint>,
    pub by_key: HashMap<ClassKey, usize>,
}

#[derive(Clone, Debug)]
pub struct CmTower {
    pub field: ImagQuadField,
    pub p: i64,
    pub n_plus: i64,
    pub groups: RingClassTower,
    pub levels: Vec<CmLevel>,
}

/// The conductor-one base point. With N⁺ = 1 it is the regular representation
/// of θ on (1, θ); a conjugation by [[1, k], [0, 1]] makes p ∤ C.
fn base_point(field: &ImagQuadField, p: i64, n_plus: i64) -> Result<CMPoint, CmError> {
    let pts = enumerate_cm_points(field.delta_k, p, 0, n_plus)?;
    let principal = Form::principal(-field.delta_k);
    let start = if n_plus == 1 {
        let x = [[0, -field.theta_norm], [1, field.theta_trace]];
        CMPoint::from_embedding(OptimalEmbedding::new(field, x, 1, EichlerOrder::new(1))?)
    } else {
        *pts.iter().find(|pt| pt.key().form == principal).ok_or(CmError::MissingDatum(0))?
    };
    for k in 0..p {
        let u = [[1, k], [0, 1]];
        let ui = mat_inv_sl2(&u);
        let x = mat_mul(&mat_mul(&ui, &start.embedding.x), &u);
        let e = OptimalEmbedding::new(field, x, 1, start.embedding.order)?;
        let pt = CMPoint::from_embedding(e);
        if pt.s.c % p != 0 {
            return Ok(pt);
        }
    }
    Err(CmError::LocalObstruction(format!("no base embedding with p ∤ C at p = {p}")))
}

impl CmTower {
    pub fn new(delta_k: i64, p: i64, n_max: u32, n_plus: i64) -> Result<Self, CmError> {
        let field = ImagQuadField::new(delta_k)?;
        check_heegner(&field, p, n_plus)?;
        let groups = RingClassTower::new(&field, p, n_max)?;
        let mut base = base_point(&field, p, n_plus)?;
        let mut levels = Vec::new();
        let mut gamma_n: Mat2 = [[1, 0], [0, 1]];
        for n in 0..=n_max {
            if n > 0 {
                base = tower_lift(&field, &base, p, n_plus)?;
                gamma_n = mat_mul(&gamma_n, &[[p, 0], [0, 1]]);
            }
            let g = &groups.groups[n as usize];
            let points: Vec<CMPoint> = g.elements.iter().map(|f| galois_translate(&field, &base, f)).collect::<Result<_, _>>()?;
            let mut by_key = HashMap::new();
            for (i, pt) in points.iter().enumerate() {
                if by_key.insert(pt.key(), i).is_some() {
                    return Err(CmError::StrongApproximation(format!("Galois action is not free at level {n}")));
                }
            }
            levels.push(CmLevel { n, gamma_n, base, points, by_key });
        }
        Ok(CmTower { field, p, n_plus, groups, levels })
    }

    pub fn group(&self, n: u32) -> &RingClassGroup {
        &self.groups.groups[n as usize]
    }

    pub fn level(&self, n: u32) -> Result<&CmLevel, CmError> {
        self.levels.get(n as usize).ok_or(CmError::LevelMismatch(format!("level {n} is not in the tower")))
    }

    pub fn order_level(&self, n: u32) -> i64 {
        order_level(self.p, n, self.n_plus)
    }

    /// Multiset identity between the fibre of 𝒢_{n+1} → 𝒢ₙ and the U^Q translates.
    pub fn fiber_identity(&self, n: u32) -> Result<Vec<(usize, bool)>, CmError> {
        let (lo, hi) = (self.level(n)?, self.level(n + 1)?);
        let m = self.order_level(n + 1);
        let map = &self.groups.maps[n as usize];
        let mut out = Vec::new();
        for (sigma, pt) in lo.points.iter().enumerate() {
            let mut fibre: Vec<ClassKey> = (0..hi.points.len()).filter(|&t| map[t] == sigma).map(|t| hi.points[t].key()).collect();
            let mut translates: Vec<ClassKey> = (1..=self.p).map(|x| class_key(&pt.s.transform(&[[self.p, x], [0, 1]]), m)).collect();
            fibre.sort();
            translates.sort();
            out.push((sigma, fibre == translates));
        }
        Ok(out)
    }
}

/// Finitely supported coefficients on Γ₀(M)-classes.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierExpansion {
    pub level: i64,
    pub coeffs: BTreeMap<ClassKey, (Form, RatFunc)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeckeOp {
    UQ,
    UP,
}

pub fn u_p(p: i64, x: i64) -> Mat2 {
    [[p, x], [0, 1]]
}

impl FourierExpansion {
    pub fn new(level: i64) -> Self {
        FourierExpansion { level, coeffs: BTreeMap::new() }
    }

    pub fn set(&mut self, b: &Form, v: RatFunc) {
        let key = class_key(b, self.level);
        if v.is_zero() {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, (*b, v));
        }
    }

    pub fn add_at(&mut self, b: &Form, v: &RatFunc) {
        let key = class_key(b, self.level);
        let cur = self.coeffs.get(&key).map(|e| e.1.clone()).unwrap_or_else(RatFunc::zero);
        let new = &cur + v;
        if new.is_zero() {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, (*b, new));
        }
    }

    pub fn get(&self, b: &Form) -> RatFunc {
        if !b.is_positive_definite() {
            return RatFunc::zero();
        }
        self.coeffs.get(&class_key(b, self.level)).map(|e| e.1.clone()).unwrap_or_else(RatFunc::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, k: &RatFunc) -> Self {
        let mut o = FourierExpansion::new(self.level);
        for (b, v) in self.coeffs.values() {
            o.set(b, v * k);
        }
        o
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut o = self.clone();
        for (b, v) in other.coeffs.values() {
            o.add_at(b, v);
        }
        o
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    pub fn discriminants(&self) -> Vec<i64> {
        let mut d: Vec<i64> = self.coeffs.keys().map(|k| k.form.disc()).collect();
        d.sort();
        d.dedup();
        d
    }

    /// Lines "a b c value" with B = [[a, b/2], [b/2, c]]; '#' starts a comment.
    pub fn parse(text: &str, level: i64) -> Result<Self, CmError> {
        let mut f = FourierExpansion::new(level);
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let mut num = || -> Result<i64, CmError> {
                it.next()
                    .ok_or_else(|| CmError::Parse(i + 1, "expected four fields".into()))?
                    .parse()
                    .map_err(|e| CmError::Parse(i + 1, format!("{e}")))
            };
            let (a, b, c) = (num()?, num()?, num()?);
            let rest: Vec<&str> = line.split_whitespace().skip(3).collect();
            if rest.is_empty() {
                return Err(CmError::Parse(i + 1, "missing value".into()));
            }
            let v = crate::exact_arith::parse(&rest.join(" ")).map_err(|e| CmError::Parse(i + 1, e.to_string()))?;
            let form = Form::new(a, b, c);
            if !form.is_positive_definite() {
                return Err(CmError::Parse(i + 1, format!("{form} is not positive definite")));
            }
            f.add_at(&form, &v);
        }
        Ok(f)
    }
}

/// (U f)_B for a single B.
pub fn hecke_coefficient(f: &FourierExpansion, which: HeckeOp, p: i64, b: &Form) -> RatFunc {
    match which {
        HeckeOp::UP => f.get(&b.scale(p)),
        HeckeOp::UQ => (1..=p).map(|x| f.get(&b.transform(&u_p(p, x)))).sum(),
    }
}

pub fn fourier_hecke(f: &FourierExpansion, which: HeckeOp, p: i64) -> FourierExpansion {
    let mut out = FourierExpansion::new(f.level);
    match which {
        HeckeOp::UP => {
            for (b, v) in f.coeffs.values() {
                if b.content() % p == 0 {
                    out.set(&Form::new(b.a / p, b.b / p, b.c / p), v.clone());
                }
            }
        }
        HeckeOp::UQ => {
            for d in f.discriminants() {
                if d % (p * p) != 0 || !matches!((d / (p * p)).rem_euclid(4), 0 | 1) {
                    continue;
                }
                for (_, b) in level_classes(d / (p * p), f.level, false) {
                    let v = hecke_coefficient(f, HeckeOp::UQ, p, &b);
                    if !v.is_zero() {
                        out.set(&b, v);
                    }
                }
            }
        }
    }
    out
}

fn pint(p: i64, e: i32) -> RatFunc {
    int(p).pow(e)
}

pub fn alpha_q(alpha_p: &RatFunc, beta_p: &RatFunc, kappa: i32, p: i64) -> RatFunc {
    &(&pint(p, 2 - kappa) * alpha_p) * beta_p
}

pub fn beta_q(alpha_p: &RatFunc, beta_p: &RatFunc, kappa: i32, p: i64) -> Result<RatFunc, CmError> {
    Ok(&(&pint(p, kappa - 1) * alpha_p) * &beta_p.inv()?)
}

/// The U^P roots removed by the stabilization, in application order.
fn up_shifts(alpha_p: &RatFunc, beta_p: &RatFunc, kappa: i32, p: i64) -> Result<[RatFunc; 3], CmError> {
    let c = pint(p, 2 * kappa - 3);
    Ok([beta_p.clone(), &c * &beta_p.inv()?, &c * &alpha_p.inv()?])
}

fn stabilization_scalar(alpha_p: &RatFunc, beta_p: &RatFunc, kappa: i32, p: i64) -> Result<RatFunc, CmError> {
    Ok((&alpha_p.pow(3) * &alpha_q(alpha_p, beta_p, kappa, p)).inv()?)
}

/// f‡ = α_P⁻³α_Q⁻¹(U^Q − β_Q)(U^P − p^{2κ−3}α_P⁻¹)(U^P − p^{2κ−3}β_P⁻¹)(U^P − β_P) f.
pub fn stabilize_form(f: &FourierExpansion, alpha_p: &RatFunc, beta_p: &RatFunc, kappa: i32, p: i64) -> Result<FourierExpansion, CmError> {
    let mut g = f.clone();
    for s in up_shifts(alpha_p, beta_p, kappa, p)? {
        g = fourier_hecke(&g, HeckeOp::UP, p).sub(&g.scale(&s));
    }
    let bq = beta_q(alpha_p, beta_p, kappa, p)?;
    g = fourier_hecke(&g, HeckeOp::UQ, p).sub(&g.scale(&bq));
    Ok(g.scale(&stabilization_scalar(alpha_p, beta_p, kappa, p)?))
}

/// c_B(f‡) evaluated directly at one B.
pub fn stabilized_coefficient(f: &FourierExpansion, alpha_p: &RatFunc, beta_p: &RatFunc, kappa: i32, p: i64, b: &Form) -> Result<RatFunc, CmError> {
    let [s1, s2, s3] = up_shifts(alpha_p, beta_p, kappa, p)?;
    // (U^P − s3)(U^P − s2)(U^P − s1) = Σ_k e_k (U^P)^k.
    let e = [-(&(&s1 * &s2) * &s3), &(&(&s1 * &s2) + &(&s1 * &s3)) + &(&s2 * &s3), -(&(&s1 + &s2) + &s3), RatFunc::one()];
    let g = |bb: &Form| -> RatFunc { (0..4u32).map(|k| &e[k as usize] * &f.get(&bb.scale(p.pow(k)))).sum() };
    let bq = beta_q(alpha_p, beta_p, kappa, p)?;
    let uq: RatFunc = (1..=p).map(|x| g(&b.transform(&u_p(p, x)))).sum();
    let v = &uq - &(&bq * &g(b));
    Ok(&v * &stabilization_scalar(alpha_p, beta_p, kappa, p)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaElement {
    pub level: u32,
    pub coeffs: Vec<RatFunc>,
}

impl ThetaElement {
    pub fn zero(level: u32, h: usize) -> Self {
        ThetaElement { level, coeffs: vec![RatFunc::zero(); h] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, k: &RatFunc) -> Self {
        ThetaElement { level: self.level, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// Σ ν(σ)c_σ with ν given by exponents; returned as a map exponent → coefficient.
    pub fn character_sum(&self, nu: &crate::quadfield::AnticycChar) -> BTreeMap<num_rational::Ratio<i64>, RatFunc> {
        let mut out: BTreeMap<num_rational::Ratio<i64>, RatFunc> = BTreeMap::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = out.entry(nu.values[i].0).or_insert_with(RatFunc::zero);
            *e = &*e + c;
        }
        out.retain(|_, v| !v.is_zero());
        out
    }
}

/// Θₙ(f) = α_Q^{−n} Σ_σ c_{S_{Ψₙ^σ}}(f)[σ].
pub fn theta_element(f: &FourierExpansion, tower: &CmTower, alpha_q: &RatFunc, n: u32) -> Result<ThetaElement, CmError> {
    let lvl = tower.level(n)?;
    let h = tower.group(n).order();
    if lvl.points.len() != h {
        return Err(CmError::MissingDatum(lvl.points.len()));
    }
    if n > 0 && f.level != tower.order_level(n) {
        return Err(CmError::LevelMismatch(format!("expansion level {} against order level {}", f.level, tower.order_level(n))));
    }
    let norm = alpha_q.pow(-(n as i32));
    let coeffs = lvl.points.iter().map(|pt| &f.get(&pt.s) * &norm).collect();
    Ok(ThetaElement { level: n, coeffs })
}

/// Coefficientwise pushforward along 𝒢_{n+1} → 𝒢ₙ.
pub fn theta_pushforward(theta: &ThetaElement, tower: &CmTower) -> Result<ThetaElement, CmError> {
    if theta.level == 0 {
        return Err(CmError::LevelMismatch("cannot push forward from level 0".into()));
    }
    let n = theta.level - 1;
    if theta.coeffs.len() != tower.group(theta.level).order() {
        return Err(CmError::LevelMismatch("element does not match the tower".into()));
    }
    let map = &tower.groups.maps[n as usize];
    let mut out = ThetaElement::zero(n, tower.group(n).order());
    for (i, c) in theta.coeffs.iter().enumerate() {
        out.coeffs[map[i]] = &out.coeffs[map[i]] + c;
    }
    Ok(out)
}

/// push(Θ_{n+1}(f)) = α_Q⁻¹Θₙ(U^Q f), for any f.
pub fn master_identity(f: &FourierExpansion, tower: &CmTower, alpha_q: &RatFunc, n: u32) -> Result<bool, CmError> {
    let lhs = theta_pushforward(&theta_element(f, tower, alpha_q, n + 1)?, tower)?;
    let uq = fourier_hecke(f, HeckeOp::UQ, tower.p);
    let rhs = theta_element(&uq, tower, alpha_q, n)?.scale(&alpha_q.inv()?);
    Ok(lhs == rhs)
}

/// A U^Q-eigen expansion with eigenvalue `a_q` on the CM-type classes of
/// levels n0..=n1, built fibre by fibre from free values `seed`.
pub fn synthetic_uq_eigen(
    tower: &CmTower,
    n0: u32,
    n1: u32,
    a_q: &RatFunc,
    mut seed: impl FnMut() -> RatFunc,
) -> Result<FourierExpansion, CmError> {
    if n0 == 0 {
        return Err(CmError::LevelMismatch("eigen data starts at level 1".into()));
    }
    let m = tower.order_level(n0);
    let p = tower.p;
    let mut f = FourierExpansion::new(m);
    let mut current: Vec<Form> = tower.level(n0)?.points.iter().map(|pt| pt.s).collect();
    for pt in &tower.level(n0)?.points {
        f.set(&pt.s, seed());
    }
    for _ in n0..n1 {
        let mut next = Vec::new();
        for b in &current {
            let children: Vec<Form> = (1..=p).map(|x| b.transform(&u_p(p, x))).collect();
            let target = a_q * &f.get(b);
            let mut acc = RatFunc::zero();
            for (i, ch) in children.iter().enumerate() {
                if !f.get(ch).is_zero() {
                    return Err(CmError::LevelMismatch("U^Q fibres overlap".into()));
                }
                let v = if i + 1 == children.len() { &target - &acc } else { seed() };
                acc = &acc + &v;
                f.set(ch, v);
                next.push(*ch);
            }
        }
        current = next;
    }
    Ok(f)
}
