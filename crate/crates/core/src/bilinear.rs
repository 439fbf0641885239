//! Admissible bilinear pairings `B(α,β) = αᵀ A β` on the representation space.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{GrafError, Result};
use crate::exterior::Blade;
use crate::linalg::{nullspace, RatMatrix, SparseRow, Spinor};
use crate::matrixrep::{Field, MainSubalgebra, Rep};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Isotropy {
    /// `B(P+, P-) = 0`, `i(B) = +1`.
    Orthogonal,
    /// `B(P+, P+) = 0 = B(P-, P-)`, `i(B) = -1`.
    Isotropic,
    /// No `P±` split exists.
    NotApplicable,
    /// A split exists but `B` is neither orthogonal nor isotropic on it.
    Violated,
}

impl Isotropy {
    pub fn value(self) -> Option<i32> {
        match self {
            Isotropy::Orthogonal => Some(1),
            Isotropy::Isotropic => Some(-1),
            _ => None,
        }
    }
}

impl fmt::Display for Isotropy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Isotropy::Orthogonal => "+1 (orthogonal)",
            Isotropy::Isotropic => "-1 (isotropic)",
            Isotropy::NotApplicable => "not-applicable",
            Isotropy::Violated => "violated",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pairing {
    gram: RatMatrix,
    gram_inv: RatMatrix,
    sigma: i32,
    tau: i32,
    isotropy: Isotropy,
}

/// Expected `σ(B)` from the symmetry table, when the table has a row.
pub fn table_sigma(field: Field, pq_mod8: usize, n: usize) -> Option<i32> {
    let nm = n % 8;
    let row = |a: &[usize], b: &[usize], va: i32, vb: i32| {
        if a.contains(&nm) {
            Some(va)
        } else if b.contains(&nm) {
            Some(vb)
        } else {
            None
        }
    };
    match (field, pq_mod8) {
        (Field::R, 0 | 2) => row(&[0, 2], &[4, 6], 1, -1),
        (Field::R, 1) => row(&[1, 7], &[3, 5], 1, -1),
        (Field::C, 3 | 7) => row(&[1, 7], &[3, 5], 1, -1),
        (Field::H, 4 | 6) => row(&[0, 2], &[4, 6], -1, 1),
        (Field::H, 5) => row(&[1, 7], &[3, 5], -1, 1),
        _ => None,
    }
}

/// Expected `τ(B)` from the type table, when the table has a row.
pub fn table_tau(field: Field, pq_mod8: usize, n: usize) -> Option<i32> {
    let nm = n % 8;
    match (field, pq_mod8) {
        (Field::R, 0 | 2) => Some(1),
        (Field::R, 1) | (Field::H, 5) => match nm {
            1 | 5 => Some(1),
            3 | 7 => Some(-1),
            _ => None,
        },
        (Field::C, 3 | 7) => Some(-1),
        (Field::H, 4 | 6) => Some(1),
        _ => None,
    }
}

/// Comparison of the computed `(σ, τ)` with the table rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableCheck {
    pub expected_sigma: Option<i32>,
    pub expected_tau: Option<i32>,
    pub sigma: i32,
    pub tau: i32,
}

impl TableCheck {
    /// True when every printed table value agrees; missing rows count as agreement.
    pub fn agrees(&self) -> bool {
        self.expected_sigma.is_none_or(|s| s == self.sigma) && self.expected_tau.is_none_or(|t| t == self.tau)
    }
}

fn admissibility_rows(rep: &Rep, tau: i32, sigma: i32) -> Vec<SparseRow> {
    let d = rep.dim();
    let t = rational::int(tau as i64);
    let mut rows: Vec<SparseRow> = Vec::new();
    for g in rep.generators() {
        // (A G)[r,c] - τ (Gᵀ A)[r,c] = Σ_k A[r,k] G[k,c] - τ Σ_k G[k,r] A[k,c]
        for r in 0..d {
            for c in 0..d {
                let mut row: SparseRow = Vec::new();
                for k in 0..d {
                    if !g[(k, c)].is_zero() {
                        row.push((r * d + k, g[(k, c)].clone()));
                    }
                    if !g[(k, r)].is_zero() {
                        row.push((k * d + c, -(&t * &g[(k, r)])));
                    }
                }
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    }
    let s = rational::int(sigma as i64);
    for r in 0..d {
        for c in r..d {
            // A[c,r] = σ A[r,c]
            if r == c {
                if sigma < 0 {
                    rows.push(vec![(r * d + r, Rational::one())]);
                }
            } else {
                rows.push(vec![(c * d + r, Rational::one()), (r * d + c, -s.clone())]);
            }
        }
    }
    rows
}

fn normalize_first_nonzero(m: RatMatrix) -> RatMatrix {
    match m.first_nonzero() {
        Some(i) => {
            let f = m.entries()[i].recip();
            m.scale(&f)
        }
        None => m,
    }
}

/// Basis of the admissible solutions of `A G_i = τ G_iᵀ A`, split by symmetry.
/// Non-invertible basis elements are dropped.
pub fn solve_pairing(rep: &Rep, tau: i32) -> Vec<Pairing> {
    let d = rep.dim();
    let mut out = Vec::new();
    for sigma in [1, -1] {
        let sols = nullspace(admissibility_rows(rep, tau, sigma), d * d);
        for v in sols {
            let a = normalize_first_nonzero(RatMatrix::from_flat(d, d, v));
            if let Some(inv) = a.inverse() {
                out.push(Pairing { gram: a, gram_inv: inv, sigma, tau, isotropy: Isotropy::NotApplicable });
            }
        }
    }
    out
}

impl Pairing {
    /// Wraps a Gram matrix, deriving `σ` and checking admissibility for `τ`.
    pub fn from_gram(rep: &Rep, gram: RatMatrix, tau: i32) -> Result<Self> {
        let inv = gram
            .inverse()
            .ok_or_else(|| GrafError::NoPairing("gram matrix is singular".into()))?;
        let t = gram.transpose();
        let sigma = if t == gram {
            1
        } else if t == -gram.clone() {
            -1
        } else {
            return Err(GrafError::NoPairing("gram matrix is neither symmetric nor skew".into()));
        };
        let tr = rational::int(tau as i64);
        for g in rep.generators() {
            if gram.matmul(g) != g.transpose().matmul(&gram).scale(&tr) {
                return Err(GrafError::NoPairing(format!("A G ≠ {tau}·Gᵀ A")));
            }
        }
        Ok(Pairing { gram, gram_inv: inv, sigma, tau, isotropy: Isotropy::NotApplicable })
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.gram
    }

    pub fn sigma(&self) -> i32 {
        self.sigma
    }

    pub fn tau(&self) -> i32 {
        self.tau
    }

    pub fn isotropy(&self) -> Isotropy {
        self.isotropy
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    /// `B(α,β) = αᵀ A β`.
    pub fn b_eval(&self, alpha: &Spinor, beta: &Spinor) -> Result<Rational> {
        let d = self.dim();
        if alpha.dim() != d || beta.dim() != d {
            return Err(GrafError::DimensionMismatch { left: alpha.dim().max(beta.dim()), right: d });
        }
        let ab = self.gram.mul_vec(&beta.0);
        Ok(alpha.0.iter().zip(&ab).fold(Rational::zero(), |acc, (x, y)| {
            if x.is_zero() || y.is_zero() {
                acc
            } else {
                acc + x * y
            }
        }))
    }

    /// The B-adjoint `M^Γ = A⁻¹ Mᵀ A`, so that `B(Mα, β) = B(α, M^Γ β)`.
    pub fn adjoint(&self, m: &RatMatrix) -> RatMatrix {
        self.gram_inv.matmul(&m.transpose()).matmul(&self.gram)
    }

    /// Fills the isotropy from the `P±` split of `structure` (or of `λ(v)`).
    pub fn with_isotropy(mut self, rep: &Rep, structure: &MainSubalgebra) -> Self {
        self.isotropy = isotropy_of(&self.gram, rep, structure);
        self
    }

    pub fn table_check(&self, rep: &Rep) -> TableCheck {
        let sig = rep.signature();
        let field = rep.abs_type().field;
        TableCheck {
            expected_sigma: table_sigma(field, sig.pq_mod8(), sig.n()),
            expected_tau: table_tau(field, sig.pq_mod8(), sig.n()),
            sigma: self.sigma,
            tau: self.tau,
        }
    }

    /// Checks `A⁻¹ (λ^I)ᵀ A = τ^k (-1)^{k(k-1)/2} λ^I` for every blade.
    pub fn transpose_check(&self, rep: &Rep) -> bool {
        let n = rep.signature().n();
        Blade::all(n).into_iter().all(|b| {
            let k = b.grade();
            let m = rep.blade_matrix(b);
            let sign = transpose_sign(self.tau, k);
            self.adjoint(&m) == m.scale(&rational::int(sign as i64))
        })
    }

    /// Hex SHA-256 of the Gram matrix entries, used as provenance.
    pub fn gram_hash(&self) -> String {
        let mut h = Sha256::new();
        for row in self.gram.to_strings() {
            h.update(row.join(",").as_bytes());
            h.update(b";");
        }
        hex::encode(h.finalize())
    }

    pub fn to_json(&self) -> PairingJson {
        PairingJson {
            gram: self.gram.to_strings(),
            sigma: self.sigma,
            tau: self.tau,
            isotropy: self.isotropy,
        }
    }
}

/// `τ^k (-1)^{k(k-1)/2}`.
pub fn transpose_sign(tau: i32, k: usize) -> i32 {
    let t = if tau < 0 && k % 2 == 1 { -1 } else { 1 };
    let r = if (k * k.saturating_sub(1) / 2) % 2 == 1 { -1 } else { 1 };
    t * r
}

/// Whether `B(α, λ^I α)` is forced to vanish for rank `k`: the pairing is
/// `σ`-symmetric while `λ^I` is `ε`-self-adjoint, so `σ ε = -1` kills it.
pub fn rank_forced_zero(sigma: i32, tau: i32, k: usize) -> bool {
    sigma * transpose_sign(tau, k) == -1
}

fn isotropy_of(gram: &RatMatrix, rep: &Rep, structure: &MainSubalgebra) -> Isotropy {
    let d = rep.dim();
    let split = match structure.d_matrix() {
        Some(dm) => Some(dm.clone()),
        None => {
            let lv = rep.volume_matrix();
            let id = RatMatrix::identity(d);
            (lv.matmul(&lv) == id && lv.as_scalar().is_none()).then_some(lv)
        }
    };
    let Some(s) = split else {
        return Isotropy::NotApplicable;
    };
    // For D² = -Id there is no real ±1 eigenspace split.
    if s.matmul(&s) != RatMatrix::identity(d) {
        return Isotropy::NotApplicable;
    }
    let half = rational::frac(1, 2);
    let id = RatMatrix::identity(d);
    let pp = (id.clone() + s.clone()).scale(&half);
    let pm = (id - s).scale(&half);
    let block = |x: &RatMatrix, y: &RatMatrix| x.transpose().matmul(gram).matmul(y).is_zero();
    if block(&pp, &pm) {
        Isotropy::Orthogonal
    } else if block(&pp, &pp) && block(&pm, &pm) {
        Isotropy::Isotropic
    } else {
        Isotropy::Violated
    }
}

/// Picks the pairing matching the table row for `rep`, falling back to the
/// first invertible solution of either type. Also reports every solution.
pub fn select_pairing(rep: &Rep, structure: &MainSubalgebra) -> Result<(Pairing, Vec<Pairing>)> {
    let sig = rep.signature();
    let field = rep.abs_type().field;
    let want_tau = table_tau(field, sig.pq_mod8(), sig.n());
    let want_sigma = table_sigma(field, sig.pq_mod8(), sig.n());
    let mut all = Vec::new();
    for tau in [1, -1] {
        all.extend(solve_pairing(rep, tau).into_iter().map(|p| p.with_isotropy(rep, structure)));
    }
    let pick = all
        .iter()
        .find(|p| want_tau.is_none_or(|t| t == p.tau) && want_sigma.is_none_or(|s| s == p.sigma))
        .or_else(|| all.first())
        .cloned()
        .ok_or_else(|| GrafError::NoPairing(format!("no invertible admissible pairing for {sig}")))?;
    Ok((pick, all))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingJson {
    pub gram: Vec<Vec<String>>,
    pub sigma: i32,
    pub tau: i32,
    pub isotropy: Isotropy,
}
