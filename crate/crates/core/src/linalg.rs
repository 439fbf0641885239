//! Dense rational matrices, spinor vectors and a sparse nullspace solver.
//!
//! Every matrix that shows up in the representation code is small (at most
//! 64x64 for n = 12) but the linear systems built from them are not: the
//! intertwiner and pairing systems have d^2 unknowns and n*d^2 equations.
//! Those equations have only a handful of nonzero entries each, so they are
//! solved with a sparse incremental row reduction instead of a dense one.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GrafError, Result};
use crate::rational::{self, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        &mut self.data[r * self.cols + c]
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Rational::one())
    }

    pub fn scalar(n: usize, c: Rational) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(GrafError::Parse("ragged matrix rows".into()));
        }
        Ok(RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix from small integers, handy for seed matrices.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let data: Vec<Vec<Rational>> = rows
            .iter()
            .map(|row| row.iter().map(|&v| rational::int(v)).collect())
            .collect();
        Self::from_rows(data).expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.as_scalar().is_some_and(|c| c.is_one())
    }

    /// Returns `c` when the matrix equals `c * Id`.
    pub fn as_scalar(&self) -> Option<Rational> {
        if !self.is_square() {
            return None;
        }
        let c = if self.rows == 0 {
            Rational::zero()
        } else {
            self[(0, 0)].clone()
        };
        for r in 0..self.rows {
            for col in 0..self.cols {
                let v = &self[(r, col)];
                if r == col {
                    if *v != c {
                        return None;
                    }
                } else if !v.is_zero() {
                    return None;
                }
            }
        }
        Some(c)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|v| if v.is_zero() { v.clone() } else { v * c })
                .collect(),
        }
    }

    /// `self += c * other`, skipping zero entries.
    pub fn add_scaled(&mut self, c: &Rational, other: &RatMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        if c.is_zero() {
            return;
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                *a += c * b;
            }
        }
    }

    pub fn matmul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "matmul shape");
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "mul_vec shape");
        let mut out = vec![Rational::zero(); self.rows];
        for (i, slot) in out.iter_mut().enumerate() {
            for (k, x) in v.iter().enumerate() {
                let a = &self[(i, k)];
                if !a.is_zero() && !x.is_zero() {
                    *slot += a * x;
                }
            }
        }
        out
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &RatMatrix) -> RatMatrix {
        let (r1, c1, r2, c2) = (self.rows, self.cols, other.rows, other.cols);
        let mut out = RatMatrix::zeros(r1 * r2, c1 * c2);
        for i in 0..r1 {
            for j in 0..c1 {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..r2 {
                    for l in 0..c2 {
                        let b = &other[(k, l)];
                        if !b.is_zero() {
                            out[(i * r2 + k, j * c2 + l)] = a * b;
                        }
                    }
                }
            }
        }
        out
    }

    /// Anticommutator `AB + BA`.
    pub fn anticommutator(&self, other: &RatMatrix) -> RatMatrix {
        self.matmul(other) + other.matmul(self)
    }

    pub fn commutes_with(&self, other: &RatMatrix) -> bool {
        self.matmul(other) == other.matmul(self)
    }

    pub fn anticommutes_with(&self, other: &RatMatrix) -> bool {
        self.anticommutator(other).is_zero()
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        row_reduce(&mut m).len()
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = RatMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, n + r)] = Rational::one();
        }
        let pivots = row_reduce(&mut aug);
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        let mut inv = RatMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv[(r, c)] = aug[(r, n + c)].clone();
            }
        }
        Some(inv)
    }

    /// Flattens row-major; used as the unknown layout of matrix equations.
    pub fn from_flat(rows: usize, cols: usize, data: Vec<Rational>) -> Self {
        assert_eq!(data.len(), rows * cols);
        RatMatrix { rows, cols, data }
    }

    /// Index of the first nonzero entry in row-major order.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.data.iter().position(|v| !v.is_zero())
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.to_rows()
            .into_iter()
            .map(|row| row.iter().map(|v| v.to_string()).collect())
            .collect()
    }

    pub fn from_strings(rows: &[Vec<String>]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|row| row.iter().map(|s| rational::parse(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(parsed)
    }
}

/// In-place Gauss-Jordan elimination; returns the pivot columns.
fn row_reduce(m: &mut RatMatrix) -> Vec<usize> {
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                m.data.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = m[(r, c)].recip();
        for j in c..cols {
            let v = &m[(r, j)] * &inv;
            m[(r, j)] = v;
        }
        for i in 0..rows {
            if i == r || m[(i, c)].is_zero() {
                continue;
            }
            let f = m[(i, c)].clone();
            for j in c..cols {
                if !m[(r, j)].is_zero() {
                    let d = &f * &m[(r, j)];
                    m[(i, j)] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

impl Add for RatMatrix {
    type Output = RatMatrix;
    fn add(mut self, rhs: RatMatrix) -> RatMatrix {
        self.add_scaled(&Rational::one(), &rhs);
        self
    }
}

impl Sub for RatMatrix {
    type Output = RatMatrix;
    fn sub(mut self, rhs: RatMatrix) -> RatMatrix {
        self.add_scaled(&-Rational::one(), &rhs);
        self
    }
}

impl Neg for RatMatrix {
    type Output = RatMatrix;
    fn neg(self) -> RatMatrix {
        self.scale(&-Rational::one())
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        self.matmul(rhs)
    }
}

/// Row-compressed matrix; blade matrices of the constructed representations
/// are signed permutations, so applying them this way is linear in `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: Vec<Vec<(usize, Rational)>>,
}

impl SparseMatrix {
    pub fn from_dense(m: &RatMatrix) -> Self {
        SparseMatrix {
            rows: (0..m.rows())
                .map(|r| {
                    (0..m.cols())
                        .filter(|&c| !m[(r, c)].is_zero())
                        .map(|c| (c, m[(r, c)].clone()))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        self.rows
            .iter()
            .map(|row| {
                row.iter().fold(Rational::zero(), |acc, (c, a)| {
                    if v[*c].is_zero() {
                        acc
                    } else if a.is_one() {
                        acc + &v[*c]
                    } else if (-a).is_one() {
                        acc - &v[*c]
                    } else {
                        acc + a * &v[*c]
                    }
                })
            })
            .collect()
    }
}

/// A vector in the representation space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Spinor(#[serde(with = "crate::rational::serde_rational_vec")] pub Vec<Rational>);

impl Spinor {
    pub fn zeros(d: usize) -> Self {
        Spinor(vec![Rational::zero(); d])
    }

    pub fn basis(d: usize, i: usize) -> Self {
        let mut v = Self::zeros(d);
        v.0[i] = Rational::one();
        v
    }

    pub fn from_i64(v: &[i64]) -> Self {
        Spinor(v.iter().map(|&x| rational::int(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> Spinor {
        Spinor(self.0.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, other: &Spinor) -> Spinor {
        Spinor(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn apply(m: &RatMatrix, v: &Spinor) -> Spinor {
        Spinor(m.mul_vec(&v.0))
    }
}

/// One sparse linear equation: `sum coeff * x[col] = 0`.
pub type SparseRow = Vec<(usize, Rational)>;

/// Basis of `{x : row . x = 0 for every row}` over `ncols` unknowns.
///
/// Rows are fed one at a time into an incremental reduction; each stored
/// pivot row only ever contains its pivot, free columns and pivots created
/// after it, so back substitution in reverse creation order is exact.
pub fn nullspace(rows: impl IntoIterator<Item = SparseRow>, ncols: usize) -> Vec<Vec<Rational>> {
    let mut pivot_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut stored: Vec<(usize, BTreeMap<usize, Rational>)> = Vec::new();

    for raw in rows {
        let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
        for (c, v) in raw {
            debug_assert!(c < ncols);
            if v.is_zero() {
                continue;
            }
            let e = row.entry(c).or_insert_with(Rational::zero);
            *e += v;
            if e.is_zero() {
                row.remove(&c);
            }
        }
        // Eliminate existing pivot columns; eliminating may introduce
        // later pivots, so loop until none remain.
        loop {
            let hit = row
                .iter()
                .find(|(c, _)| pivot_of.contains_key(c))
                .map(|(c, v)| (*c, v.clone()));
            let Some((c, factor)) = hit else { break };
            let (_, prow) = &stored[pivot_of[&c]];
            for (pc, pv) in prow {
                let e = row.entry(*pc).or_insert_with(Rational::zero);
                *e -= &factor * pv;
                if e.is_zero() {
                    row.remove(pc);
                }
            }
        }
        let Some((&pc, pv)) = row.iter().next() else {
            continue;
        };
        let inv = pv.recip();
        for v in row.values_mut() {
            *v *= &inv;
        }
        pivot_of.insert(pc, stored.len());
        stored.push((pc, row));
    }

    let free: Vec<usize> = (0..ncols).filter(|c| !pivot_of.contains_key(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &f in &free {
        let mut x = vec![Rational::zero(); ncols];
        x[f] = Rational::one();
        for (pc, prow) in stored.iter().rev() {
            let mut acc = Rational::zero();
            for (c, v) in prow {
                if c != pc && !x[*c].is_zero() {
                    acc -= v * &x[*c];
                }
            }
            x[*pc] = acc;
        }
        basis.push(x);
    }
    basis
}

/// Rank of a list of vectors.
pub fn rank_of_vectors(vectors: &[Vec<Rational>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let cols = vectors[0].len();
    let mut m = RatMatrix::from_flat(
        vectors.len(),
        cols,
        vectors.iter().flat_map(|v| v.iter().cloned()).collect(),
    );
    row_reduce(&mut m).len()
}

/// Symmetric congruence diagonalization: returns `(P, d)` with
/// `P g P^T = diag(d)` and `P` invertible.
pub fn congruence_diagonalize(g: &RatMatrix) -> Result<(RatMatrix, Vec<Rational>)> {
    if !g.is_symmetric() {
        return Err(GrafError::InvalidMetric("gram matrix is not symmetric".into()));
    }
    let n = g.rows();
    let mut a = g.clone();
    let mut p = RatMatrix::identity(n);

    // Row op on P plus the matching congruence on A.
    fn add_multiple(a: &mut RatMatrix, p: &mut RatMatrix, dst: usize, src: usize, f: &Rational) {
        let n = a.rows();
        for j in 0..n {
            let v = &a[(src, j)] * f;
            a[(dst, j)] += v;
        }
        for i in 0..n {
            let v = &a[(i, src)] * f;
            a[(i, dst)] += v;
        }
        for j in 0..n {
            let v = &p[(src, j)] * f;
            p[(dst, j)] += v;
        }
    }
    fn swap(a: &mut RatMatrix, p: &mut RatMatrix, x: usize, y: usize) {
        let n = a.rows();
        for j in 0..n {
            let t = a[(x, j)].clone();
            a[(x, j)] = a[(y, j)].clone();
            a[(y, j)] = t;
        }
        for i in 0..n {
            let t = a[(i, x)].clone();
            a[(i, x)] = a[(i, y)].clone();
            a[(i, y)] = t;
        }
        for j in 0..n {
            let t = p[(x, j)].clone();
            p[(x, j)] = p[(y, j)].clone();
            p[(y, j)] = t;
        }
    }

    for i in 0..n {
        if a[(i, i)].is_zero() {
            if let Some(j) = (i + 1..n).find(|&j| !a[(j, j)].is_zero()) {
                swap(&mut a, &mut p, i, j);
            } else if let Some(j) = (i + 1..n).find(|&j| !a[(i, j)].is_zero()) {
                add_multiple(&mut a, &mut p, i, j, &Rational::one());
            } else {
                continue;
            }
        }
        let piv = a[(i, i)].clone();
        for j in i + 1..n {
            if a[(j, i)].is_zero() {
                continue;
            }
            let f = -(&a[(j, i)] / &piv);
            add_multiple(&mut a, &mut p, j, i, &f);
        }
    }
    let d: Vec<Rational> = (0..n).map(|i| a[(i, i)].clone()).collect();
    Ok((p, d))
}
