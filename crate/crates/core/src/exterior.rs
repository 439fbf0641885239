//! Sparse exterior algebra over a fixed coframe `e^1..e^n` with a rational metric.
//!
//! Blades are bitmasks (bit `i-1` stands for `e^i`), so every sign is a
//! popcount of the bits that a covector has to hop over.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GrafError, Result};
use crate::linalg::{congruence_diagonalize, RatMatrix};
use crate::rational::{self, Rational};

/// Largest dimension a blade mask can hold.
pub const HARD_MAX_DIM: usize = 16;
/// Default cap on `n`; callers may raise it up to [`HARD_MAX_DIM`].
pub const DEFAULT_MAX_DIM: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        Self::with_cap(p, q, DEFAULT_MAX_DIM)
    }

    pub fn with_cap(p: usize, q: usize, cap: usize) -> Result<Self> {
        let cap = cap.min(HARD_MAX_DIM);
        if p + q > cap {
            return Err(GrafError::InvalidSignature {
                p,
                q,
                reason: format!("dimension {} exceeds the cap {cap}", p + q),
            });
        }
        Ok(Signature { p, q })
    }

    pub fn n(&self) -> usize {
        self.p + self.q
    }

    /// `p - q` reduced into `0..8`.
    pub fn pq_mod8(&self) -> usize {
        (self.p as i64 - self.q as i64).rem_euclid(8) as usize
    }

    /// Every signature with `p + q <= max_n`, including `(0,0)`.
    pub fn all_up_to(max_n: usize) -> Vec<Signature> {
        let mut out = Vec::new();
        for n in 0..=max_n {
            for p in (0..=n).rev() {
                out.push(Signature { p, q: n - p });
            }
        }
        out
    }

    /// Parses `"p,q"`.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| GrafError::Parse(format!("signature {s:?} is not of the form p,q")))?;
        let p = a.trim().parse().map_err(|_| GrafError::Parse(format!("bad p in {s:?}")))?;
        let q = b.trim().parse().map_err(|_| GrafError::Parse(format!("bad q in {s:?}")))?;
        Ok(Signature { p, q })
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// A canonical coframe blade `e^{i1 i2 ... ik}` with `i1 < i2 < ... < ik`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Blade(u16);

impl Blade {
    pub const SCALAR: Blade = Blade(0);

    pub fn from_mask(mask: u16) -> Self {
        Blade(mask)
    }

    /// Single covector `e^i` (1-based).
    pub fn basis(i: usize) -> Self {
        debug_assert!((1..=HARD_MAX_DIM).contains(&i));
        Blade(1 << (i - 1))
    }

    /// Strictly increasing 1-based indices.
    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u16;
        let mut last = 0;
        for &i in indices {
            if i == 0 || i > HARD_MAX_DIM {
                return Err(GrafError::IndexOutOfRange { index: i, dim: HARD_MAX_DIM });
            }
            if i <= last {
                return Err(GrafError::Parse(format!(
                    "blade indices must be strictly increasing: {indices:?}"
                )));
            }
            last = i;
            mask |= 1 << (i - 1);
        }
        Ok(Blade(mask))
    }

    /// Canonicalizes an arbitrary index list into `sign * e^{sorted}`;
    /// `None` when an index repeats.
    pub fn from_unordered(indices: &[usize]) -> Option<(i32, Blade)> {
        let mut acc = Blade::SCALAR;
        let mut sign = 1;
        for &i in indices {
            let b = Blade::basis(i);
            if acc.0 & b.0 != 0 {
                return None;
            }
            sign *= wedge_sign(acc, b);
            acc = Blade(acc.0 | b.0);
        }
        Some((sign, acc))
    }

    pub fn mask(self) -> u16 {
        self.0
    }

    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        i >= 1 && i <= HARD_MAX_DIM && self.0 & (1 << (i - 1)) != 0
    }

    pub fn indices(self) -> Vec<usize> {
        (0..HARD_MAX_DIM).filter(|b| self.0 & (1 << b) != 0).map(|b| b + 1).collect()
    }

    /// Highest index used, 0 for the scalar blade.
    pub fn top(self) -> usize {
        16 - self.0.leading_zeros() as usize
    }

    pub fn union(self, other: Blade) -> Blade {
        Blade(self.0 | other.0)
    }

    pub fn intersection(self, other: Blade) -> Blade {
        Blade(self.0 & other.0)
    }

    pub fn without(self, other: Blade) -> Blade {
        Blade(self.0 & !other.0)
    }

    /// The full volume blade `e^{1..n}`.
    pub fn volume(n: usize) -> Blade {
        if n >= 16 {
            Blade(u16::MAX)
        } else {
            Blade((1u16 << n) - 1)
        }
    }

    /// All blades of grade `k` in dimension `n`, in canonical order.
    pub fn of_grade(n: usize, k: usize) -> Vec<Blade> {
        let mut v: Vec<Blade> = (0..(1u32 << n))
            .map(|m| Blade(m as u16))
            .filter(|b| b.grade() == k)
            .collect();
        v.sort();
        v
    }

    /// All `2^n` blades, ordered by grade then lexicographically.
    pub fn all(n: usize) -> Vec<Blade> {
        let mut v: Vec<Blade> = (0..(1u32 << n)).map(|m| Blade(m as u16)).collect();
        v.sort();
        v
    }
}

impl Ord for Blade {
    // Grade first, then lexicographic on the ascending index lists. For two
    // sets of equal size, the one holding the lowest differing index is
    // lexicographically smaller.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.grade().cmp(&other.grade()) {
            Ordering::Equal => {}
            o => return o,
        }
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        let low = diff & diff.wrapping_neg();
        if self.0 & low != 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl PartialOrd for Blade {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices().iter().map(|i| i.to_string()).collect();
        write!(f, "e{{{}}}", idx.join(","))
    }
}

#[inline]
fn parity(x: u32) -> i32 {
    if x & 1 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of `e^A ∧ e^B = sign * e^{A∪B}` for disjoint `A`, `B`: the number of
/// pairs `a > b` with `a ∈ A`, `b ∈ B`.
#[inline]
pub fn wedge_sign(a: Blade, b: Blade) -> i32 {
    let mut swaps = 0u32;
    let mut rest = b.0;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        rest &= rest - 1;
        let above = if bit >= 15 { 0 } else { a.0 >> (bit + 1) };
        swaps += above.count_ones();
    }
    parity(swaps)
}

/// Sign of `e_i ⌟ e^A`: `(-1)^(m-1)` where `m` is the 1-based position of `i` in `A`.
#[inline]
pub fn interior_sign(i: usize, a: Blade) -> i32 {
    let below = a.0 & ((1u32 << (i - 1)) - 1) as u16;
    parity(below.count_ones())
}

/// Sign picked up by removing the indices of `c` (a subset of `a`) from `a`
/// one after another in ascending order.
#[inline]
pub fn removal_sign(a: Blade, c: Blade) -> i32 {
    let mut cur = a.0;
    let mut s = 1;
    let mut rest = c.0;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        rest &= rest - 1;
        s *= parity((cur & ((1u32 << bit) - 1) as u16).count_ones());
        cur &= !(1 << bit);
    }
    s
}

/// `Σ x_A y_B s(A,B) e^{blade(A,B)}` for a blade rule returning a sign,
/// accumulated over common-denominator integer numerators. `None` when a
/// numerator or partial sum leaves `i64` / `i128`.
pub(crate) fn bilinear_int(f: &Form, g: &Form, rule: impl Fn(Blade, Blade) -> Option<(Blade, i32)>) -> Option<Form> {
    let n = f.dim;
    let (fd, fnum) = integer_numerators(f)?;
    let (gd, gnum) = integer_numerators(g)?;
    let mut acc = vec![0i128; 1usize << n];
    for (a, x) in &fnum {
        for (b, y) in &gnum {
            let Some((blade, s)) = rule(*a, *b) else { continue };
            let t = (*x as i128).checked_mul(*y as i128)?;
            let slot = &mut acc[blade.0 as usize];
            *slot = if s > 0 { slot.checked_add(t)? } else { slot.checked_sub(t)? };
        }
    }
    let denom = Rational::from_integer(fd * gd);
    let terms = acc
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c != 0)
        .map(|(m, c)| (Blade(m as u16), Rational::from_integer(c.into()) / &denom));
    Some(Form::from_terms(n, terms).expect("masks below 2^n"))
}

/// `(L, [(blade, L·c)])` with `L` the lcm of the denominators, when every
/// numerator fits in an `i64`.
fn integer_numerators(f: &Form) -> Option<(num_bigint::BigInt, Vec<(Blade, i64)>)> {
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    let l = f.terms.values().fold(num_bigint::BigInt::one(), |l, c| l.lcm(c.denom()));
    let nums = f
        .terms
        .iter()
        .map(|(b, c)| (c.numer() * (&l / c.denom())).to_i64().map(|v| (*b, v)))
        .collect::<Option<Vec<_>>>()?;
    Some((l, nums))
}

/// A metric on the coframe: the symmetric invertible Gram matrix `g^{ij}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metric {
    sig: Signature,
    gram: RatMatrix,
    lower: RatMatrix,
    diagonal: Option<Vec<Rational>>,
    /// Set of `i` with `g^{ii} = -1` when the metric is diagonal with ±1 entries.
    unit_negatives: Option<u16>,
}

impl Metric {
    /// `diag(+1 x p, -1 x q)`.
    pub fn orthonormal(sig: Signature) -> Self {
        let n = sig.n();
        let mut gram = RatMatrix::zeros(n, n);
        for i in 0..n {
            gram[(i, i)] = if i < sig.p { Rational::one() } else { -Rational::one() };
        }
        let diag: Vec<Rational> = (0..n).map(|i| gram[(i, i)].clone()).collect();
        let neg = ((1u32 << n) - 1) as u16 & !(((1u32 << sig.p) - 1) as u16);
        Metric {
            sig,
            lower: gram.clone(),
            gram,
            diagonal: Some(diag),
            unit_negatives: Some(neg),
        }
    }

    /// Any symmetric invertible rational Gram matrix whose inertia is `(p,q)`.
    pub fn from_gram(sig: Signature, gram: RatMatrix) -> Result<Self> {
        let n = sig.n();
        if gram.rows() != n || gram.cols() != n {
            return Err(GrafError::DimensionMismatch { left: gram.rows(), right: n });
        }
        let (_, d) = congruence_diagonalize(&gram)?;
        if d.iter().any(Zero::is_zero) {
            return Err(GrafError::InvalidMetric("gram matrix is singular".into()));
        }
        let pos = d.iter().filter(|x| x.is_positive()).count();
        if pos != sig.p {
            return Err(GrafError::InvalidMetric(format!(
                "gram matrix has inertia ({pos},{}) but the signature is {sig}",
                n - pos
            )));
        }
        let lower = gram
            .inverse()
            .ok_or_else(|| GrafError::InvalidMetric("gram matrix is singular".into()))?;
        let is_diag = (0..n).all(|i| (0..n).all(|j| i == j || gram[(i, j)].is_zero()));
        let diagonal = is_diag.then(|| (0..n).map(|i| gram[(i, i)].clone()).collect::<Vec<_>>());
        let unit_negatives = diagonal.as_ref().and_then(|d| {
            let mut m = 0u16;
            for (i, x) in d.iter().enumerate() {
                if x.is_one() {
                } else if (-x).is_one() {
                    m |= 1 << i;
                } else {
                    return None;
                }
            }
            Some(m)
        });
        Ok(Metric { sig, gram, lower, diagonal, unit_negatives })
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn dim(&self) -> usize {
        self.sig.n()
    }

    /// `g^{ij}` with 1-based indices.
    pub fn g(&self, i: usize, j: usize) -> &Rational {
        &self.gram[(i - 1, j - 1)]
    }

    /// `g_{ij}`, the inverse matrix, 1-based.
    pub fn g_lower(&self, i: usize, j: usize) -> &Rational {
        &self.lower[(i - 1, j - 1)]
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.gram
    }

    pub fn inverse_gram(&self) -> &RatMatrix {
        &self.lower
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal.is_some()
    }

    pub fn is_orthonormal(&self) -> bool {
        self.unit_negatives.is_some()
    }

    fn check(&self, f: &Form) -> Result<()> {
        if f.dim != self.dim() {
            return Err(GrafError::DimensionMismatch { left: f.dim, right: self.dim() });
        }
        Ok(())
    }

    /// `Π_{c∈C} g^{cc}` for a diagonal metric.
    fn diag_product(&self, c: Blade) -> Rational {
        if let Some(neg) = self.unit_negatives {
            return rational::sign(parity((c.0 & neg).count_ones()));
        }
        let d = self.diagonal.as_ref().expect("diagonal metric");
        c.indices()
            .iter()
            .fold(Rational::one(), |acc, &i| acc * &d[i - 1])
    }

    /// Contracted wedge of two blades, `e^A ∧_k e^B`, as a list of terms.
    pub fn blade_contracted_wedge(&self, a: Blade, b: Blade, k: usize) -> Vec<(Blade, Rational)> {
        if k > a.grade() || k > b.grade() {
            return Vec::new();
        }
        if self.diagonal.is_some() {
            // Only i = j contractions survive and each must hit a common index;
            // the k! orderings of the common set all carry the same sign.
            let c = a.intersection(b);
            if c.grade() != k {
                return Vec::new();
            }
            let (ar, br) = (a.without(c), b.without(c));
            let s = removal_sign(a, c) * removal_sign(b, c) * wedge_sign(ar, br);
            let coeff = rational::factorial(k) * self.diag_product(c) * rational::sign(s);
            return vec![(ar.union(br), coeff)];
        }
        let mut acc: BTreeMap<Blade, Rational> = BTreeMap::new();
        self.blade_cw_general(a, b, k, Rational::one(), &mut acc);
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    fn blade_cw_general(
        &self,
        a: Blade,
        b: Blade,
        k: usize,
        factor: Rational,
        acc: &mut BTreeMap<Blade, Rational>,
    ) {
        if k == 0 {
            if a.0 & b.0 == 0 {
                let v = factor * rational::int(wedge_sign(a, b) as i64);
                let e = acc.entry(a.union(b)).or_insert_with(Rational::zero);
                *e += v;
            }
            return;
        }
        for i in a.indices() {
            let sa = interior_sign(i, a);
            let a2 = a.without(Blade::basis(i));
            for j in b.indices() {
                let gij = self.g(i, j);
                if gij.is_zero() {
                    continue;
                }
                let sb = interior_sign(j, b);
                let b2 = b.without(Blade::basis(j));
                let f = &factor * gij * rational::int((sa * sb) as i64);
                self.blade_cw_general(a2, b2, k - 1, f, acc);
            }
        }
    }

    /// `f ∧_k g`.
    pub fn contracted_wedge(&self, f: &Form, g: &Form, k: usize) -> Result<Form> {
        self.check(f)?;
        self.check(g)?;
        if let Some(neg) = self.unit_negatives {
            let fk = rational::factorial(k);
            let out = bilinear_int(f, g, |a, b| {
                let c = a.intersection(b);
                if c.grade() != k {
                    return None;
                }
                let s = removal_sign(a, c)
                    * removal_sign(b, c)
                    * wedge_sign(a.without(c), b.without(c))
                    * parity((c.0 & neg).count_ones());
                Some((a.without(c).union(b.without(c)), s))
            });
            if let Some(out) = out {
                return Ok(out.scale(&fk));
            }
        }
        if self.diagonal.is_some() {
            let mut acc = vec![Rational::zero(); 1usize << f.dim];
            for (a, x) in &f.terms {
                for (b, y) in &g.terms {
                    if (a.0 & b.0).count_ones() as usize != k {
                        continue;
                    }
                    for (blade, c) in self.blade_contracted_wedge(*a, *b, k) {
                        acc[blade.0 as usize] += x * y * c;
                    }
                }
            }
            let terms = acc
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (Blade(m as u16), c));
            return Form::from_terms(f.dim, terms);
        }
        let mut out = Form::zero(f.dim);
        for (a, x) in &f.terms {
            for (b, y) in &g.terms {
                for (blade, c) in self.blade_contracted_wedge(*a, *b, k) {
                    out.add_term(blade, x * y * c);
                }
            }
        }
        Ok(out)
    }

    /// The congruence that brings this metric to an orthonormal frame, when
    /// one exists over the rationals: returns `P` with `P g P^T = diag(±1)`.
    pub fn orthonormalizing_frame(&self) -> Result<RatMatrix> {
        let (p, d) = congruence_diagonalize(&self.gram)?;
        let mut scaled = p;
        let n = self.dim();
        // Sort so that positive directions come first.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| if d[i].is_positive() { 0 } else { 1 });
        let mut out = RatMatrix::zeros(n, n);
        for (row, &i) in order.iter().enumerate() {
            let r = rational::sqrt_exact(&d[i].abs()).ok_or_else(|| {
                GrafError::InvalidMetric(format!(
                    "no rational orthonormal frame: |{}| is not a rational square",
                    d[i]
                ))
            })?;
            let inv = r.recip();
            for c in 0..n {
                out[(row, c)] = &scaled[(i, c)] * &inv;
            }
        }
        scaled = out;
        Ok(scaled)
    }
}

/// A form: a sparse rational combination of canonical blades.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Form {
    dim: usize,
    terms: BTreeMap<Blade, Rational>,
}

impl Form {
    pub fn zero(dim: usize) -> Self {
        Form { dim, terms: BTreeMap::new() }
    }

    /// The unit `1_Γ`.
    pub fn one(dim: usize) -> Self {
        Self::scalar(dim, Rational::one())
    }

    pub fn scalar(dim: usize, c: Rational) -> Self {
        Self::blade(dim, Blade::SCALAR, c)
    }

    pub fn blade(dim: usize, b: Blade, c: Rational) -> Self {
        let mut f = Self::zero(dim);
        f.add_term(b, c);
        f
    }

    /// `e^{i1..ik}` with coefficient 1; indices need not be sorted.
    pub fn e(dim: usize, indices: &[usize]) -> Self {
        match Blade::from_unordered(indices) {
            Some((s, b)) => Self::blade(dim, b, rational::sign(s)),
            None => Self::zero(dim),
        }
    }

    /// The volume form `e^{1..n}`.
    pub fn volume(dim: usize) -> Self {
        Self::blade(dim, Blade::volume(dim), Rational::one())
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Blade, Rational)>) -> Result<Self> {
        let mut f = Self::zero(dim);
        for (b, c) in terms {
            if b.top() > dim {
                return Err(GrafError::IndexOutOfRange { index: b.top(), dim });
            }
            f.add_term(b, c);
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Blade, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, b: Blade) -> Rational {
        self.terms.get(&b).cloned().unwrap_or_else(Rational::zero)
    }

    /// The grade-0 coefficient.
    pub fn scalar_part(&self) -> Rational {
        self.coeff(Blade::SCALAR)
    }

    pub fn add_term(&mut self, b: Blade, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(b) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn same_dim(&self, other: &Form) -> Result<()> {
        if self.dim != other.dim {
            return Err(GrafError::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(())
    }

    /// Grades that carry at least one nonzero term, ascending.
    pub fn grades(&self) -> Vec<usize> {
        let mut g: Vec<usize> = self.terms.keys().map(|b| b.grade()).collect();
        g.dedup();
        g
    }

    /// `Some(k)` for a nonzero homogeneous form; `Some(0)` for zero.
    pub fn homogeneous_grade(&self) -> Option<usize> {
        match self.grades().as_slice() {
            [] => Some(0),
            [k] => Some(*k),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rational) -> Form {
        if c.is_zero() {
            return Form::zero(self.dim);
        }
        Form {
            dim: self.dim,
            terms: self.terms.iter().map(|(b, x)| (*b, x * c)).collect(),
        }
    }

    fn map_by_grade(&self, sign: impl Fn(usize) -> bool) -> Form {
        Form {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(b, x)| (*b, if sign(b.grade()) { -x } else { x.clone() }))
                .collect(),
        }
    }

    pub fn grade_project(&self, k: usize) -> Form {
        Form {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| b.grade() == k)
                .map(|(b, x)| (*b, x.clone()))
                .collect(),
        }
    }

    /// Keeps the terms whose grade satisfies `keep`.
    pub fn filter_grades(&self, keep: impl Fn(usize) -> bool) -> Form {
        Form {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| keep(b.grade()))
                .map(|(b, x)| (*b, x.clone()))
                .collect(),
        }
    }

    /// `#f`: grade-k terms times `(-1)^k`.
    pub fn grade_involution(&self) -> Form {
        self.map_by_grade(|k| k % 2 == 1)
    }

    /// `f~`: grade-k terms times `(-1)^{k(k-1)/2}`.
    pub fn reversal(&self) -> Form {
        self.map_by_grade(|k| (k * k.saturating_sub(1) / 2) % 2 == 1)
    }

    pub fn try_add(&self, other: &Form) -> Result<Form> {
        self.same_dim(other)?;
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.add_term(*b, c.clone());
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &Form) -> Result<Form> {
        self.same_dim(other)?;
        let mut out = Form::zero(self.dim);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if a.0 & b.0 != 0 {
                    continue;
                }
                let c = x * y;
                out.add_term(a.union(*b), if wedge_sign(*a, *b) < 0 { -c } else { c });
            }
        }
        Ok(out)
    }

    /// `e_i ⌟ f` for the frame vector `e_i`, 1-based.
    pub fn interior(&self, i: usize) -> Result<Form> {
        if i == 0 || i > self.dim {
            return Err(GrafError::IndexOutOfRange { index: i, dim: self.dim });
        }
        let bit = Blade::basis(i);
        let mut out = Form::zero(self.dim);
        for (b, x) in &self.terms {
            if b.0 & bit.0 == 0 {
                continue;
            }
            let v = if interior_sign(i, *b) < 0 { -x } else { x.clone() };
            out.add_term(b.without(bit), v);
        }
        Ok(out)
    }

    /// Text form, e.g. `3/2*e{1,3} + -1*e{2}`; the zero form prints as `0`.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(b, c)| format!("{c}*{b}"))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parses the text form. Terms are separated by ` + `; a bare blade means
    /// coefficient 1 and a bare rational means a scalar.
    pub fn parse(dim: usize, text: &str) -> Result<Form> {
        let t = text.trim();
        let mut f = Form::zero(dim);
        if t == "0" || t.is_empty() {
            return Ok(f);
        }
        for raw in t.split(" + ") {
            let term = raw.trim();
            let (coeff, blade) = match term.find("e{") {
                Some(pos) => {
                    let c = term[..pos].trim().trim_end_matches('*').trim();
                    let coeff = match c {
                        "" | "+" => Rational::one(),
                        "-" => -Rational::one(),
                        _ => rational::parse(c)?,
                    };
                    let rest = &term[pos + 2..];
                    let inner = rest
                        .strip_suffix('}')
                        .ok_or_else(|| GrafError::Parse(format!("unterminated blade in {term:?}")))?;
                    let idx = if inner.trim().is_empty() {
                        Vec::new()
                    } else {
                        inner
                            .split(',')
                            .map(|s| {
                                s.trim()
                                    .parse::<usize>()
                                    .map_err(|_| GrafError::Parse(format!("bad index in {term:?}")))
                            })
                            .collect::<Result<Vec<_>>>()?
                    };
                    (coeff, idx)
                }
                None => (rational::parse(term)?, Vec::new()),
            };
            if let Some(&bad) = blade.iter().find(|&&i| i == 0 || i > dim) {
                return Err(GrafError::IndexOutOfRange { index: bad, dim });
            }
            match Blade::from_unordered(&blade) {
                Some((s, b)) => f.add_term(b, coeff * rational::sign(s)),
                None => {}
            }
        }
        Ok(f)
    }

    pub fn to_json_terms(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(b, c)| TermJson { blade: b.indices(), coeff: c.clone() })
            .collect()
    }

    pub fn from_json_terms(dim: usize, terms: &[TermJson]) -> Result<Form> {
        let mut f = Form::zero(dim);
        for t in terms {
            if let Some(&bad) = t.blade.iter().find(|&&i| i == 0 || i > dim) {
                return Err(GrafError::IndexOutOfRange { index: bad, dim });
            }
            f.add_term(Blade::from_indices(&t.blade)?, t.coeff.clone());
        }
        Ok(f)
    }
}

/// JSON shape of one term: `{"blade":[1,3],"coeff":"3/2"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub blade: Vec<usize>,
    #[serde(with = "crate::rational::serde_rational")]
    pub coeff: Rational,
}

impl Serialize for Form {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_terms().serialize(s)
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form[{}]({})", self.dim, self.to_text())
    }
}

// The operator impls panic on a dimension mismatch; use `try_add` or the
// fallible methods where the dimensions are not known to agree.
impl Add for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        self.try_add(rhs).expect("forms of different dimension")
    }
}

impl Add for Form {
    type Output = Form;
    fn add(self, rhs: Form) -> Form {
        &self + &rhs
    }
}

impl AddAssign<&Form> for Form {
    fn add_assign(&mut self, rhs: &Form) {
        assert_eq!(self.dim, rhs.dim, "forms of different dimension");
        for (b, c) in &rhs.terms {
            self.add_term(*b, c.clone());
        }
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        self + &(-rhs)
    }
}

impl Sub for Form {
    type Output = Form;
    fn sub(self, rhs: Form) -> Form {
        &self - &rhs
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        Form {
            dim: self.dim,
            terms: self.terms.iter().map(|(b, x)| (*b, -x)).collect(),
        }
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        -&self
    }
}

/// JSON shape of a metric: `{"p":1,"q":2,"gram":[["1","0",..],..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricJson {
    pub p: usize,
    pub q: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<Vec<Vec<String>>>,
}

impl MetricJson {
    pub fn from_metric(m: &Metric) -> Self {
        let sig = m.signature();
        MetricJson {
            p: sig.p,
            q: sig.q,
            gram: (!m.is_orthonormal() || !is_standard(m)).then(|| m.gram().to_strings()),
        }
    }

    pub fn to_metric(&self, cap: usize) -> Result<Metric> {
        let sig = Signature::with_cap(self.p, self.q, cap)?;
        match &self.gram {
            None => Ok(Metric::orthonormal(sig)),
            Some(rows) => Metric::from_gram(sig, RatMatrix::from_strings(rows)?),
        }
    }
}

fn is_standard(m: &Metric) -> bool {
    *m == Metric::orthonormal(m.signature())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn e(dim: usize, idx: &[usize]) -> Form {
        Form::e(dim, idx)
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(e(3, &[1]).wedge(&e(3, &[2])).unwrap(), e(3, &[1, 2]));
        assert!(e(3, &[1]).wedge(&e(3, &[1])).unwrap().is_zero());
        assert_eq!(e(3, &[2]).wedge(&e(3, &[1])).unwrap(), -e(3, &[1, 2]));
        assert!(e(3, &[1]).wedge(&e(4, &[1])).is_err());
    }

    #[test]
    fn interior_examples() {
        let f = e(3, &[1, 2]);
        assert_eq!(f.interior(1).unwrap(), e(3, &[2]));
        assert_eq!(f.interior(2).unwrap(), -e(3, &[1]));
        assert!(f.interior(3).unwrap().is_zero());
        assert!(f.interior(4).is_err());
        assert!(f.interior(0).is_err());
    }

    #[test]
    fn contracted_wedge_examples() {
        let m = Metric::orthonormal(Signature::new(1, 2).unwrap());
        let x = m.contracted_wedge(&e(3, &[1]), &e(3, &[1]), 1).unwrap();
        assert_eq!(x, Form::one(3));
        let m2 = Metric::orthonormal(Signature::new(2, 0).unwrap());
        let y = m2.contracted_wedge(&e(2, &[1, 2]), &e(2, &[1, 2]), 2).unwrap();
        assert_eq!(y, Form::scalar(2, int(2)));
        let f = e(3, &[1, 3]);
        assert_eq!(m.contracted_wedge(&f, &e(3, &[2]), 0).unwrap(), f.wedge(&e(3, &[2])).unwrap());
        assert!(m.contracted_wedge(&f, &e(3, &[2]), 2).unwrap().is_zero());
    }

    #[test]
    fn grading_operators() {
        let f = Form::one(3) + e(3, &[1]) + e(3, &[1, 2]);
        assert_eq!(f.grade_project(1), e(3, &[1]));
        assert!(e(3, &[1, 2]).grade_project(0).is_zero());
        let sum = (0..=3).fold(Form::zero(3), |acc, k| acc + f.grade_project(k));
        assert_eq!(sum, f);
        assert_eq!(e(3, &[1]).grade_involution(), -e(3, &[1]));
        assert_eq!(e(3, &[1, 2]).grade_involution(), e(3, &[1, 2]));
        assert_eq!(e(3, &[1, 2]).reversal(), -e(3, &[1, 2]));
        assert_eq!(e(3, &[1]).reversal(), e(3, &[1]));
        assert_eq!(f.reversal().reversal(), f);
    }

    #[test]
    fn text_round_trip() {
        let f = Form::from_terms(
            3,
            [
                (Blade::from_indices(&[1, 3]).unwrap(), frac(3, 2)),
                (Blade::basis(2), int(-1)),
                (Blade::SCALAR, int(5)),
            ],
        )
        .unwrap();
        let text = f.to_text();
        assert_eq!(text, "5*e{} + -1*e{2} + 3/2*e{1,3}");
        assert_eq!(Form::parse(3, &text).unwrap(), f);
        assert_eq!(Form::parse(3, "0").unwrap(), Form::zero(3));
        assert_eq!(Form::parse(3, "e{2,1}").unwrap(), -e(3, &[1, 2]));
        assert!(Form::parse(2, "e{3}").is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = Form::parse(4, "3/2*e{1,3} + -1*e{2}").unwrap();
        let v = serde_json::to_string(&f).unwrap();
        assert_eq!(v, r#"[{"blade":[2],"coeff":"-1"},{"blade":[1,3],"coeff":"3/2"}]"#);
        let terms: Vec<TermJson> = serde_json::from_str(&v).unwrap();
        assert_eq!(Form::from_json_terms(4, &terms).unwrap(), f);
    }

    #[test]
    fn blade_order_is_grade_then_lex() {
        let all = Blade::all(3);
        let names: Vec<String> = all.iter().map(|b| b.to_string()).collect();
        assert_eq!(
            names,
            ["e{}", "e{1}", "e{2}", "e{3}", "e{1,2}", "e{1,3}", "e{2,3}", "e{1,2,3}"]
        );
    }

    #[test]
    fn non_diagonal_metric_contraction() {
        // g = [[0,1],[1,0]]: e^1 ∧_1 e^2 = g^{12}.
        let sig = Signature::new(1, 1).unwrap();
        let m = Metric::from_gram(sig, RatMatrix::from_i64(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(m.contracted_wedge(&e(2, &[1]), &e(2, &[2]), 1).unwrap(), Form::one(2));
        assert!(m.contracted_wedge(&e(2, &[1]), &e(2, &[1]), 1).unwrap().is_zero());
        assert!(Metric::from_gram(Signature::new(2, 0).unwrap(), RatMatrix::from_i64(&[&[0, 1], &[1, 0]])).is_err());
    }

    #[test]
    fn orthonormal_frame_when_rational() {
        let sig = Signature::new(2, 0).unwrap();
        let g = RatMatrix::from_i64(&[&[4, 0], &[0, 9]]);
        let m = Metric::from_gram(sig, g.clone()).unwrap();
        let p = m.orthonormalizing_frame().unwrap();
        assert!(p.matmul(&g).matmul(&p.transpose()).is_identity());
        let bad = Metric::from_gram(sig, RatMatrix::from_i64(&[&[2, 0], &[0, 1]])).unwrap();
        assert!(bad.orthonormalizing_frame().is_err());
    }
}
