//! Real irreducible matrix representations of the Clifford fiber.
//!
//! Generators are built recursively from a few seed algebras:
//!
//! * `Cl(p,q) = Cl(p-1,q-1) ⊗ M2(R)`: old generators tensored with `Z`,
//!   plus `I ⊗ X` (square +1) and `I ⊗ E` (square -1);
//! * `Cl(p,0) = Cl(1,p-1)` by the twist `f1 = e1`, `fj = ej e1`;
//! * `Cl(0,q) = Cl(4,q-4)` by multiplying the first four generators with
//!   `w = e1 e2 e3 e4`.
//!
//! Every intermediate and final system is signed-permutation valued and is
//! re-verified against the Clifford relations.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GrafError, Result};
use crate::exterior::{interior_sign, Blade, Form, Metric, Signature};
use crate::linalg::{nullspace, rank_of_vectors, RatMatrix, SparseMatrix, SparseRow};
use crate::rational::{self, Rational};

/// Blade matrices are cached eagerly up to this dimension.
const EAGER_CACHE_MAX_DIM: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    R,
    C,
    H,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::R => "R",
            Field::C => "C",
            Field::H => "H",
        })
    }
}

/// Row of the real Clifford classification table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AbsType {
    pub field: Field,
    /// Real dimension of an irreducible representation.
    pub d: usize,
    /// Two inequivalent irreducibles (`p - q ≡ 1, 5 mod 8`).
    pub double: bool,
    /// The constant `k_F` (matrix order over the field).
    pub k: usize,
}

pub fn abs_type(sig: Signature) -> AbsType {
    let half = sig.n() / 2;
    let r = sig.pq_mod8();
    let field = match r {
        0..=2 => Field::R,
        3 | 7 => Field::C,
        _ => Field::H,
    };
    let (d, k) = match field {
        Field::R => (1 << half, 1 << half),
        Field::C => (1 << (half + 1), 1 << half),
        Field::H => (1 << (half + 1), 1 << half.saturating_sub(1)),
    };
    AbsType { field, d, double: r == 1 || r == 5, k }
}

fn m2(rows: [[i64; 2]; 2]) -> RatMatrix {
    RatMatrix::from_i64(&[&rows[0], &rows[1]])
}

fn seed_x() -> RatMatrix {
    m2([[0, 1], [1, 0]])
}

fn seed_z() -> RatMatrix {
    m2([[1, 0], [0, -1]])
}

fn seed_e() -> RatMatrix {
    m2([[0, 1], [-1, 0]])
}

/// Left multiplication by `i`, `j`, `k` on the quaternions `(1, i, j, k)`.
fn quaternion_units() -> [RatMatrix; 3] {
    let qi = RatMatrix::from_i64(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]);
    let qj = RatMatrix::from_i64(&[&[0, 0, -1, 0], &[0, 0, 0, 1], &[1, 0, 0, 0], &[0, -1, 0, 0]]);
    let qk = qi.matmul(&qj);
    [qi, qj, qk]
}

/// Generators for the orthonormal signature `(p,q)`: the first `p` square to
/// `+Id`, the remaining `q` to `-Id`.
fn build_generators(p: usize, q: usize) -> Vec<RatMatrix> {
    match (p, q) {
        (0, 0) => Vec::new(),
        (1, 0) => vec![RatMatrix::identity(1)],
        (0, 1) => vec![seed_e()],
        (2, 0) => vec![seed_x(), seed_z()],
        (0, 2) => {
            let [i, j, _] = quaternion_units();
            vec![i, j]
        }
        (0, 3) => {
            let [i, j, k] = quaternion_units();
            vec![i, j, k]
        }
        (p, q) if p >= 1 && q >= 1 => {
            let sub = build_generators(p - 1, q - 1);
            let d = if sub.is_empty() { 1 } else { sub[0].rows() };
            let id = RatMatrix::identity(d);
            let z = seed_z();
            let mut out: Vec<RatMatrix> = sub[..p - 1].iter().map(|g| g.kron(&z)).collect();
            out.push(id.kron(&seed_x()));
            out.extend(sub[p - 1..].iter().map(|g| g.kron(&z)));
            out.push(id.kron(&seed_e()));
            out
        }
        (p, 0) => {
            // Cl(1,p-1): one +1 generator e1, p-1 generators squaring to -1.
            let sub = build_generators(1, p - 1);
            let e1 = sub[0].clone();
            let mut out = vec![e1.clone()];
            out.extend(sub[1..].iter().map(|g| g.matmul(&e1)));
            out
        }
        (0, q) => {
            let sub = build_generators(4, q - 4);
            let w = sub[0].matmul(&sub[1]).matmul(&sub[2]).matmul(&sub[3]);
            let mut out: Vec<RatMatrix> = sub[..4].iter().map(|g| g.matmul(&w)).collect();
            out.extend(sub[4..].iter().cloned());
            out
        }
        _ => unreachable!("every (p,q) is covered above"),
    }
}

/// `G_i G_j + G_j G_i = 2 g^{ij} Id` for every pair.
pub fn clifford_relations_hold(gens: &[RatMatrix], metric: &Metric) -> bool {
    let n = metric.dim();
    if gens.len() != n {
        return false;
    }
    let d = gens.first().map_or(1, |g| g.rows());
    for i in 0..n {
        for j in i..n {
            let anti = gens[i].anticommutator(&gens[j]);
            let want = RatMatrix::scalar(d, metric.g(i + 1, j + 1) * rational::int(2));
            if anti != want {
                return false;
            }
        }
    }
    true
}

/// A real matrix realization `λ^Γ` of the Clifford fiber.
#[derive(Clone, Debug)]
pub struct Rep {
    metric: Metric,
    abs: AbsType,
    volume_sign: i32,
    d: usize,
    generators: Vec<RatMatrix>,
    blades: Option<Vec<RatMatrix>>,
    sparse_blades: Option<Vec<SparseMatrix>>,
}

impl Rep {
    /// Orthonormal representation of `sig`. `volume_sign` fixes `λ(v) = ±Id`
    /// for the double algebras and `J = ±λ(v)` in the almost-complex case.
    pub fn build(sig: Signature, volume_sign: i32) -> Result<Self> {
        Self::build_with_metric(Metric::orthonormal(sig), volume_sign)
    }

    /// Representation for a general metric, obtained by a rational change of
    /// coframe to an orthonormal one.
    pub fn build_with_metric(metric: Metric, volume_sign: i32) -> Result<Self> {
        if volume_sign != 1 && volume_sign != -1 {
            return Err(GrafError::Representation(format!("volume sign must be ±1, got {volume_sign}")));
        }
        let sig = metric.signature();
        let ortho = build_generators(sig.p, sig.q);
        let gens = if metric == Metric::orthonormal(sig) {
            ortho
        } else {
            let p = metric.orthonormalizing_frame()?;
            let pinv = p
                .inverse()
                .ok_or_else(|| GrafError::Representation("singular frame change".into()))?;
            let n = sig.n();
            (0..n)
                .map(|i| {
                    let mut g = RatMatrix::zeros(ortho[0].rows(), ortho[0].cols());
                    for (a, ga) in ortho.iter().enumerate() {
                        g.add_scaled(&pinv[(i, a)], ga);
                    }
                    g
                })
                .collect()
        };
        Self::from_generators(metric, volume_sign, gens, true)
    }

    /// Wraps and verifies a generator system. With `normalize`, the last
    /// generator is negated if needed so that the volume sign holds.
    fn from_generators(metric: Metric, volume_sign: i32, mut gens: Vec<RatMatrix>, normalize: bool) -> Result<Self> {
        let sig = metric.signature();
        let abs = abs_type(sig);
        let d = gens.first().map_or(1, |g| g.rows());
        if gens.iter().any(|g| g.rows() != d || g.cols() != d) {
            return Err(GrafError::Representation("generators are not square of equal size".into()));
        }
        if d != abs.d {
            return Err(GrafError::Representation(format!(
                "dimension {d} differs from the irreducible dimension {} of {sig}",
                abs.d
            )));
        }
        if !clifford_relations_hold(&gens, &metric) {
            return Err(GrafError::Representation(format!("Clifford relations fail for {sig}")));
        }
        if abs.double {
            let lv = ordered_product(&gens, d);
            let c = lv
                .as_scalar()
                .ok_or_else(|| GrafError::Representation("λ(v) is not scalar in a double algebra".into()))?;
            if (c.is_positive() && volume_sign < 0) || (c.is_negative() && volume_sign > 0) {
                if !normalize {
                    return Err(GrafError::Representation(format!(
                        "λ(v) = {c}·Id does not match volume sign {volume_sign}"
                    )));
                }
                let last = gens.len() - 1;
                gens[last] = -gens[last].clone();
            }
        }
        let mut rep = Rep { metric, abs, volume_sign, d, generators: gens, blades: None, sparse_blades: None };
        if sig.n() <= EAGER_CACHE_MAX_DIM {
            let n = sig.n();
            let mut cache: Vec<RatMatrix> = Vec::with_capacity(1 << n);
            for mask in 0..(1u32 << n) {
                let m = rep.compute_blade(Blade::from_mask(mask as u16), &cache);
                cache.push(m);
            }
            rep.sparse_blades = Some(cache.iter().map(SparseMatrix::from_dense).collect());
            rep.blades = Some(cache);
        }
        Ok(rep)
    }

    /// `λ(e^{iB})` with `i < min(B)`, from `e^i ⋄ e^B = e^{iB} + Σ_j g^{ij} e_j ⌟ e^B`.
    fn compute_blade(&self, b: Blade, cache: &[RatMatrix]) -> RatMatrix {
        if b.grade() == 0 {
            return RatMatrix::identity(self.d);
        }
        let i = b.indices()[0];
        let rest = b.without(Blade::basis(i));
        let get = |x: Blade| -> RatMatrix {
            cache
                .get(x.mask() as usize)
                .cloned()
                .unwrap_or_else(|| self.compute_blade(x, cache))
        };
        let mut m = self.generators[i - 1].matmul(&get(rest));
        if !self.metric.is_diagonal() {
            for j in rest.indices() {
                let gij = self.metric.g(i, j);
                if gij.is_zero() {
                    continue;
                }
                let s = rational::int(interior_sign(j, rest) as i64);
                m.add_scaled(&-(gij * s), &get(rest.without(Blade::basis(j))));
            }
        }
        m
    }

    pub fn signature(&self) -> Signature {
        self.metric.signature()
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn abs_type(&self) -> AbsType {
        self.abs
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn volume_sign(&self) -> i32 {
        self.volume_sign
    }

    pub fn generators(&self) -> &[RatMatrix] {
        &self.generators
    }

    /// `λ^{Γ,I} = λ(e^I)`.
    pub fn blade_matrix(&self, b: Blade) -> RatMatrix {
        match &self.blades {
            Some(cache) => cache[b.mask() as usize].clone(),
            None => self.compute_blade(b, &[]),
        }
    }

    /// Borrowing access when the cache exists.
    pub fn blade_matrix_ref(&self, b: Blade) -> Option<&RatMatrix> {
        self.blades.as_ref().map(|c| &c[b.mask() as usize])
    }

    /// `λ(e^I) v`.
    pub fn apply_blade(&self, b: Blade, v: &[Rational]) -> Vec<Rational> {
        match &self.sparse_blades {
            Some(cache) => cache[b.mask() as usize].mul_vec(v),
            None => self.blade_matrix(b).mul_vec(v),
        }
    }

    /// `λ^Γ(f) = Σ f_I λ(e^I)`.
    pub fn lambda_form(&self, f: &Form) -> Result<RatMatrix> {
        if f.dim() != self.metric.dim() {
            return Err(GrafError::DimensionMismatch { left: f.dim(), right: self.metric.dim() });
        }
        let mut out = RatMatrix::zeros(self.d, self.d);
        for (b, c) in f.terms() {
            match self.blade_matrix_ref(*b) {
                Some(m) => out.add_scaled(c, m),
                None => out.add_scaled(c, &self.blade_matrix(*b)),
            }
        }
        Ok(out)
    }

    /// `λ(v)`.
    pub fn volume_matrix(&self) -> RatMatrix {
        self.blade_matrix(Blade::volume(self.metric.dim()))
    }

    pub fn to_json(&self) -> RepJson {
        RepJson {
            signature: self.signature(),
            volume_sign: self.volume_sign,
            generators: self.generators.iter().map(|g| g.to_strings()).collect(),
        }
    }

    /// Imports an orthonormal representation, re-verifying it.
    pub fn from_json(json: &RepJson, cap: usize) -> Result<Self> {
        let sig = Signature::with_cap(json.signature.p, json.signature.q, cap)?;
        let gens = json
            .generators
            .iter()
            .map(|g| RatMatrix::from_strings(g))
            .collect::<Result<Vec<_>>>()?;
        if gens.len() != sig.n() {
            return Err(GrafError::Representation(format!(
                "{} generators for dimension {}",
                gens.len(),
                sig.n()
            )));
        }
        Self::from_generators(Metric::orthonormal(sig), json.volume_sign, gens, false)
    }
}

fn ordered_product(gens: &[RatMatrix], d: usize) -> RatMatrix {
    gens.iter().fold(RatMatrix::identity(d), |acc, g| acc.matmul(g))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepJson {
    pub signature: Signature,
    pub volume_sign: i32,
    pub generators: Vec<Vec<Vec<String>>>,
}

/// Solves `X M_i = s_i M_i X` for all `i`, returning a basis of `d×d` solutions.
pub fn intertwiner_space(mats: &[(RatMatrix, i32)], d: usize) -> Vec<RatMatrix> {
    let mut rows: Vec<SparseRow> = Vec::new();
    for (m, s) in mats {
        let nz: Vec<Vec<(usize, Rational)>> = (0..d)
            .map(|r| (0..d).filter(|&c| !m[(r, c)].is_zero()).map(|c| (c, m[(r, c)].clone())).collect())
            .collect();
        let nz_cols: Vec<Vec<(usize, Rational)>> = (0..d)
            .map(|c| (0..d).filter(|&r| !m[(r, c)].is_zero()).map(|r| (r, m[(r, c)].clone())).collect())
            .collect();
        let sign = rational::int(*s as i64);
        for r in 0..d {
            for c in 0..d {
                // (X M)[r,c] - s (M X)[r,c]
                let mut row: SparseRow = nz_cols[c].iter().map(|(k, v)| (r * d + k, v.clone())).collect();
                row.extend(nz[r].iter().map(|(k, v)| (k * d + c, -(&sign * v))));
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    }
    nullspace(rows, d * d)
        .into_iter()
        .map(|v| RatMatrix::from_flat(d, d, v))
        .collect()
}

/// Basis of the commutant `{X : X G_i = G_i X}`.
pub fn commutant(rep: &Rep) -> Vec<RatMatrix> {
    let mats: Vec<(RatMatrix, i32)> = rep.generators.iter().map(|g| (g.clone(), 1)).collect();
    intertwiner_space(&mats, rep.d)
}

pub fn commutant_dim(rep: &Rep) -> usize {
    let basis = commutant(rep);
    rank_of_vectors(&basis.iter().map(|m| m.entries().to_vec()).collect::<Vec<_>>())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseTag {
    Normal,
    AlmostComplex,
    Quaternionic,
}

impl From<Field> for CaseTag {
    fn from(f: Field) -> Self {
        match f {
            Field::R => CaseTag::Normal,
            Field::C => CaseTag::AlmostComplex,
            Field::H => CaseTag::Quaternionic,
        }
    }
}

/// The centralizer structure of the representation image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MainSubalgebra {
    Normal,
    AlmostComplex {
        j: RatMatrix,
        d: RatMatrix,
        /// `s_D` with `D² = s_D Id`, i.e. `(-1)^{(p-q+1)/4}`.
        d_square: i32,
    },
    Quaternionic {
        h: [RatMatrix; 3],
    },
}

impl MainSubalgebra {
    pub fn case(&self) -> CaseTag {
        match self {
            MainSubalgebra::Normal => CaseTag::Normal,
            MainSubalgebra::AlmostComplex { .. } => CaseTag::AlmostComplex,
            MainSubalgebra::Quaternionic { .. } => CaseTag::Quaternionic,
        }
    }

    pub fn d_matrix(&self) -> Option<&RatMatrix> {
        match self {
            MainSubalgebra::AlmostComplex { d, .. } => Some(d),
            _ => None,
        }
    }

    pub fn j_matrix(&self) -> Option<&RatMatrix> {
        match self {
            MainSubalgebra::AlmostComplex { j, .. } => Some(j),
            _ => None,
        }
    }

    /// `H_0 = Id, H_1, H_2, H_3` in the quaternionic case.
    pub fn h_units(&self, d: usize) -> Option<[RatMatrix; 4]> {
        match self {
            MainSubalgebra::Quaternionic { h } => {
                Some([RatMatrix::identity(d), h[0].clone(), h[1].clone(), h[2].clone()])
            }
            _ => None,
        }
    }
}

/// `(-1)^{(p-q+1)/4}`. In the almost-complex case `p - q ≡ 3 (mod 4)`, so the
/// exponent is an integer for the actual value of `p - q`.
pub fn d_square_sign(sig: Signature) -> Result<i32> {
    let diff = sig.p as i64 - sig.q as i64 + 1;
    if diff.rem_euclid(4) != 0 {
        return Err(GrafError::Structure(format!("(p-q+1)/4 is not an integer for {sig}")));
    }
    Ok(if (diff / 4).rem_euclid(2) == 0 { 1 } else { -1 })
}

/// Finds `x, y` with `x² + y² = t`, `t > 0` rational, by a bounded search.
fn two_squares(t: &Rational) -> Option<(Rational, Rational)> {
    if !t.is_positive() {
        return None;
    }
    // x = X/v, y = Y/v with X² + Y² = u v.
    let (u, v) = (t.numer().clone(), t.denom().clone());
    let target = &u * &v;
    let limit: i64 = 4096;
    for x in 0..=limit {
        let xx = num_bigint::BigInt::from(x * x);
        if xx > target {
            break;
        }
        let rest = &target - &xx;
        let y = rest.sqrt();
        if &y * &y == rest {
            let vv = Rational::from_integer(v.clone());
            return Some((rational::int(x) / &vv, Rational::from_integer(y) / vv));
        }
    }
    None
}

/// Finds a combination of `basis` that squares to `-c Id` with `c` a nonzero
/// rational square, and returns it normalized to square `-Id`.
fn unit_imaginary(basis: &[RatMatrix], d: usize) -> Option<RatMatrix> {
    let combos: Vec<Vec<i64>> = small_integer_vectors(basis.len(), 2);
    for coeffs in combos {
        let mut x = RatMatrix::zeros(d, d);
        for (c, b) in coeffs.iter().zip(basis) {
            x.add_scaled(&rational::int(*c), b);
        }
        if x.is_zero() {
            continue;
        }
        let sq = x.matmul(&x);
        let Some(c) = sq.as_scalar() else { continue };
        let c = -c;
        if !c.is_positive() {
            continue;
        }
        if let Some(r) = rational::sqrt_exact(&c) {
            return Some(x.scale(&r.recip()));
        }
    }
    None
}

/// Nonzero integer vectors with entries in `-bound..=bound`, fewest and
/// smallest entries first.
fn small_integer_vectors(len: usize, bound: i64) -> Vec<Vec<i64>> {
    let width = (2 * bound + 1) as usize;
    let total = width.pow(len as u32);
    let mut out: Vec<Vec<i64>> = (0..total)
        .map(|mut code| {
            (0..len)
                .map(|_| {
                    let v = (code % width) as i64 - bound;
                    code /= width;
                    v
                })
                .collect::<Vec<i64>>()
        })
        .filter(|v| v.iter().any(|x| *x != 0))
        .collect();
    out.sort_by_key(|v| {
        let m = v.iter().map(|x| x.abs()).max().unwrap_or(0);
        let nz = v.iter().filter(|x| **x != 0).count();
        (m, nz)
    });
    out
}

/// Builds `J`, `D` or `H_1..H_3` for `rep`, verifying every structure identity.
pub fn build_structure(rep: &Rep) -> Result<MainSubalgebra> {
    let d = rep.d;
    let sig = rep.signature();
    match rep.abs.field {
        Field::R => Ok(MainSubalgebra::Normal),
        Field::C => {
            let j = rep.volume_matrix().scale(&rational::int(rep.volume_sign as i64));
            let minus_id = RatMatrix::scalar(d, -Rational::one());
            if j.matmul(&j) != minus_id {
                return Err(GrafError::Structure("λ(v)² ≠ -Id in the almost-complex case".into()));
            }
            let mut mats: Vec<(RatMatrix, i32)> = rep.generators.iter().map(|g| (g.clone(), -1)).collect();
            mats.push((j.clone(), -1));
            let sols = intertwiner_space(&mats, d);
            let d0 = sols
                .into_iter()
                .next()
                .ok_or_else(|| GrafError::Structure("intertwiner system has no nonzero solution".into()))?;
            let a = d0
                .matmul(&d0)
                .as_scalar()
                .ok_or_else(|| GrafError::Structure("D0² is not scalar".into()))?;
            let s_d = d_square_sign(sig)?;
            let t = rational::int(s_d as i64) / &a;
            let (x, y) = two_squares(&t).ok_or_else(|| {
                GrafError::Structure(format!("cannot scale D: D0² = {a}·Id but D² = {s_d}·Id is required"))
            })?;
            let mut dm = d0.scale(&x);
            dm.add_scaled(&y, &j.matmul(&d0));
            let st = MainSubalgebra::AlmostComplex { j, d: dm, d_square: s_d };
            verify_structure(rep, &st)?;
            Ok(st)
        }
        Field::H => {
            let basis = commutant(rep);
            if basis.len() != 4 {
                return Err(GrafError::Structure(format!(
                    "quaternionic commutant has dimension {}",
                    basis.len()
                )));
            }
            let inv_d = rational::frac(1, d as i64);
            let imag: Vec<RatMatrix> = basis
                .iter()
                .map(|x| {
                    let re = x.trace() * &inv_d;
                    x.clone() - RatMatrix::scalar(d, re)
                })
                .collect();
            let h1 = unit_imaginary(&imag, d)
                .ok_or_else(|| GrafError::Structure("no rational unit imaginary element in the commutant".into()))?;
            let anti: Vec<RatMatrix> = imag
                .iter()
                .map(|x| {
                    // Component anticommuting with h1: ½(x + h1 x h1).
                    let t = x.clone() + h1.matmul(x).matmul(&h1);
                    t.scale(&rational::frac(1, 2))
                })
                .collect();
            let h2 = unit_imaginary(&anti, d)
                .ok_or_else(|| GrafError::Structure("no rational unit orthogonal to H1".into()))?;
            let h3 = h1.matmul(&h2);
            let st = MainSubalgebra::Quaternionic { h: [h1, h2, h3] };
            verify_structure(rep, &st)?;
            Ok(st)
        }
    }
}

/// Machine-checks the identities that define each structure.
pub fn verify_structure(rep: &Rep, st: &MainSubalgebra) -> Result<()> {
    let d = rep.d;
    let id = RatMatrix::identity(d);
    let minus_id = RatMatrix::scalar(d, -Rational::one());
    let fail = |what: &str| Err(GrafError::Structure(format!("{what} fails for {}", rep.signature())));
    match st {
        MainSubalgebra::Normal => Ok(()),
        MainSubalgebra::AlmostComplex { j, d: dm, d_square } => {
            if j.matmul(j) != minus_id {
                return fail("J² = -Id");
            }
            if rep.generators.iter().any(|g| !g.commutes_with(j)) {
                return fail("J central in the image");
            }
            if dm.matmul(dm) != id.scale(&rational::int(*d_square as i64)) {
                return fail("D² = s_D Id");
            }
            if !dm.anticommutes_with(j) {
                return fail("J D = -D J");
            }
            if rep.generators.iter().any(|g| !dm.anticommutes_with(g)) {
                return fail("D λ(f) = λ(#f) D");
            }
            Ok(())
        }
        MainSubalgebra::Quaternionic { h } => {
            for x in h {
                if x.matmul(x) != minus_id {
                    return fail("H_i² = -Id");
                }
                if rep.generators.iter().any(|g| !g.commutes_with(x)) {
                    return fail("H_i central in the image");
                }
            }
            // H_j H_k = -δ_jk + ε_jkl H_l
            for jx in 0..3 {
                for kx in 0..3 {
                    let prod = h[jx].matmul(&h[kx]);
                    let want = if jx == kx {
                        minus_id.clone()
                    } else {
                        let l = 3 - jx - kx;
                        let eps = levi_civita(jx, kx, l);
                        h[l].scale(&rational::int(eps as i64))
                    };
                    if prod != want {
                        return fail("quaternion relations");
                    }
                }
            }
            Ok(())
        }
    }
}

/// `ε_{jkl}` on 0-based indices.
pub fn levi_civita(j: usize, k: usize, l: usize) -> i32 {
    match (j, k, l) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    #[test]
    fn abs_type_rows() {
        let t = abs_type(sig(9, 0));
        assert_eq!((t.field, t.d, t.double, t.k), (Field::R, 16, true, 16));
        let t = abs_type(sig(1, 2));
        assert_eq!((t.field, t.d, t.double, t.k), (Field::C, 4, false, 2));
        let t = abs_type(sig(0, 4));
        assert_eq!((t.field, t.d, t.double, t.k), (Field::H, 8, false, 2));
    }

    #[test]
    fn every_small_signature_builds() {
        for s in Signature::all_up_to(8) {
            for vs in [1, -1] {
                let rep = Rep::build(s, vs).unwrap_or_else(|e| panic!("{s}: {e}"));
                assert_eq!(rep.dim(), abs_type(s).d, "{s}");
                if abs_type(s).double {
                    assert_eq!(rep.volume_matrix().as_scalar(), Some(rational::int(vs as i64)));
                }
            }
        }
    }

    #[test]
    fn structures_build_for_small_signatures() {
        for s in Signature::all_up_to(6) {
            let rep = Rep::build(s, 1).unwrap();
            let st = build_structure(&rep).unwrap_or_else(|e| panic!("{s}: {e}"));
            assert_eq!(st.case(), CaseTag::from(abs_type(s).field), "{s}");
            let want = match st.case() {
                CaseTag::Normal => 1,
                CaseTag::AlmostComplex => 2,
                CaseTag::Quaternionic => 4,
            };
            assert_eq!(commutant_dim(&rep), want, "{s}");
        }
    }

    #[test]
    fn d_square_examples() {
        assert_eq!(d_square_sign(sig(1, 2)).unwrap(), 1);
        assert_eq!(d_square_sign(sig(3, 0)).unwrap(), -1);
        assert_eq!(d_square_sign(sig(0, 1)).unwrap(), 1);
        assert!(d_square_sign(sig(2, 0)).is_err());
    }

    #[test]
    fn json_round_trip_reverifies() {
        let rep = Rep::build(sig(1, 2), 1).unwrap();
        let json = rep.to_json();
        let back = Rep::from_json(&json, 12).unwrap();
        assert_eq!(back.generators(), rep.generators());
        let mut bad = json.clone();
        bad.generators[0] = bad.generators[1].clone();
        assert!(Rep::from_json(&bad, 12).is_err());
    }

    #[test]
    fn non_orthonormal_metric_rep() {
        let s = sig(1, 1);
        let m = Metric::from_gram(s, RatMatrix::from_i64(&[&[0, 2], &[2, 0]])).unwrap();
        let rep = Rep::build_with_metric(m.clone(), 1).unwrap();
        assert!(clifford_relations_hold(rep.generators(), &m));
    }
}
