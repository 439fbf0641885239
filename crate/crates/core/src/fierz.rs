//! Form-valued bilinear covariants and the geometric Fierz identities.
//!
//! The covariants are the inverse images under `λ^Γ` of the rank-one maps
//! `E_{α,β}(γ) = B(γ,β) α`. Each coefficient is a trace against the blade
//! basis: for an orthonormal coframe
//!
//! ```text
//! c_I = κ τ^k (Π_{i∈I} g_ii) B(α, λ^I β),     κ = k_F / 2^n,
//! ```
//!
//! where the metric factor lowers the blade index. The almost-complex and
//! quaternionic components insert `D` or `H_i` in the same way.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::bilinear::Pairing;
use crate::error::{GrafError, Result};
use crate::exterior::{Blade, Form};
use crate::graf::GrafAlgebra;
use crate::linalg::{RatMatrix, Spinor};
use crate::matrixrep::{build_structure, levi_civita, CaseTag, MainSubalgebra, Rep};
use crate::rational::{self, Rational};

/// Everything needed to compute covariants: the representation, its main
/// subalgebra (with `D` aligned to the pairing) and the pairing itself.
#[derive(Clone, Debug)]
pub struct FierzContext {
    pub rep: Rep,
    pub structure: MainSubalgebra,
    pub pairing: Pairing,
    pub algebra: GrafAlgebra,
    /// Which of `D`, `JD` was kept so that `D` is `B`-symmetric.
    pub d_alignment: Option<DAlignment>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DAlignment {
    /// The solver's `D` was already `B`-symmetric.
    Kept,
    /// `D` was `B`-skew and was replaced by `J D`.
    TimesJ,
}

impl FierzContext {
    pub fn new(rep: Rep, structure: MainSubalgebra, pairing: Pairing) -> Result<Self> {
        if !rep.metric().is_orthonormal() {
            return Err(GrafError::InvalidMetric(
                "covariants are computed in an orthonormal coframe".into(),
            ));
        }
        if pairing.dim() != rep.dim() {
            return Err(GrafError::DimensionMismatch { left: pairing.dim(), right: rep.dim() });
        }
        let (structure, d_alignment) = align_d(structure, &pairing)?;
        let algebra = GrafAlgebra::new(rep.metric().clone());
        Ok(FierzContext { rep, structure, pairing, algebra, d_alignment })
    }

    /// Builds the structure and the table-matching pairing for `rep`.
    pub fn for_rep(rep: Rep) -> Result<Self> {
        let structure = build_structure(&rep)?;
        let (pairing, _) = crate::bilinear::select_pairing(&rep, &structure)?;
        Self::new(rep, structure, pairing)
    }

    pub fn case(&self) -> CaseTag {
        self.structure.case()
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    /// `κ = k_F / 2^n`.
    pub fn prefactor(&self) -> Rational {
        let abs = self.rep.abs_type();
        rational::frac(abs.k as i64, 1i64 << self.rep.signature().n())
    }

    /// `Π_{i∈I} g_ii` for the orthonormal coframe.
    fn lowering_sign(&self, b: Blade) -> Rational {
        b.indices()
            .into_iter()
            .fold(Rational::one(), |acc, i| acc * self.rep.metric().g_lower(i, i))
    }

    fn check_spinor(&self, s: &Spinor) -> Result<()> {
        if s.dim() != self.dim() {
            return Err(GrafError::DimensionMismatch { left: s.dim(), right: self.dim() });
        }
        Ok(())
    }

    /// `E_{α,β}`: the matrix of `γ ↦ B(γ,β) α`, i.e. `α (Aβ)ᵀ`.
    pub fn endo_e(&self, alpha: &Spinor, beta: &Spinor) -> Result<RatMatrix> {
        endo_e(&self.pairing, alpha, beta)
    }

    /// Form with coefficients `κ τ^k Π g_ii B(α, M λ^I β)` for a fixed insertion `M`.
    fn expand(&self, alpha: &Spinor, beta: &Spinor, insertion: Option<&RatMatrix>) -> Form {
        let n = self.rep.signature().n();
        let kappa = self.prefactor();
        let tau = self.pairing.tau();
        let left: Vec<Rational> = match insertion {
            // B(α, M x) = αᵀ A M x
            Some(m) => m.transpose().matmul(&self.pairing.gram().transpose()).mul_vec(&alpha.0),
            None => self.pairing.gram().transpose().mul_vec(&alpha.0),
        };
        let mut out = Form::zero(n);
        for b in Blade::all(n) {
            let lb = self.rep.apply_blade(b, &beta.0);
            let val = left
                .iter()
                .zip(&lb)
                .filter(|(x, y)| !x.is_zero() && !y.is_zero())
                .fold(Rational::zero(), |acc, (x, y)| acc + x * y);
            if val.is_zero() {
                continue;
            }
            let mut c = val * &kappa * self.lowering_sign(b);
            if tau < 0 && b.grade() % 2 == 1 {
                c = -c;
            }
            out.add_term(b, c);
        }
        out
    }

    /// The covariant `Ē_{α,β}` in the case of this context.
    pub fn covariant(&self, alpha: &Spinor, beta: &Spinor) -> Result<Covariant> {
        self.check_spinor(alpha)?;
        self.check_spinor(beta)?;
        Ok(match &self.structure {
            MainSubalgebra::Normal => Covariant::Normal(self.expand(alpha, beta, None)),
            MainSubalgebra::AlmostComplex { d, d_square, .. } => {
                let x0 = self.expand(alpha, beta, None);
                // (D⁻¹)^Γ = s_D D once D is aligned to be B-symmetric.
                let x1 = self.expand(alpha, beta, Some(d)).scale(&rational::int(*d_square as i64));
                Covariant::AlmostComplex([x0, x1])
            }
            MainSubalgebra::Quaternionic { h } => {
                let mut comps = [
                    self.expand(alpha, beta, None),
                    Form::zero(0),
                    Form::zero(0),
                    Form::zero(0),
                ];
                for i in 0..3 {
                    // (H_i⁻¹)^Γ = -(H_i)^Γ
                    let ins = -self.pairing.adjoint(&h[i]);
                    comps[i + 1] = self.expand(alpha, beta, Some(&ins));
                }
                Covariant::Quaternionic(comps)
            }
        })
    }

    /// Reassembles `λ^Γ` of the components with the case's `D` / `H_i` insertions.
    pub fn reassemble(&self, cov: &Covariant) -> Result<RatMatrix> {
        match (cov, &self.structure) {
            (Covariant::Normal(x), MainSubalgebra::Normal) => self.rep.lambda_form(x),
            (Covariant::AlmostComplex([x0, x1]), MainSubalgebra::AlmostComplex { d, .. }) => {
                Ok(self.rep.lambda_form(x0)? + d.matmul(&self.rep.lambda_form(x1)?))
            }
            (Covariant::Quaternionic(xs), MainSubalgebra::Quaternionic { h }) => {
                let mut m = self.rep.lambda_form(&xs[0])?;
                for i in 0..3 {
                    m = m + h[i].matmul(&self.rep.lambda_form(&xs[i + 1])?);
                }
                Ok(m)
            }
            _ => Err(GrafError::CaseMismatch(format!(
                "covariant of case {:?} against structure {:?}",
                cov.case(),
                self.case()
            ))),
        }
    }

    /// `λ^Γ` of the covariant reassembles `E_{α,β}` exactly.
    pub fn reconstruct_check(&self, cov: &Covariant, alpha: &Spinor, beta: &Spinor) -> Result<bool> {
        Ok(self.reassemble(cov)? == self.endo_e(alpha, beta)?)
    }

    /// Checks the case's Fierz identities for `(α1,β1)`, `(α2,β2)`.
    pub fn check_fierz(
        &self,
        alpha1: &Spinor,
        beta1: &Spinor,
        alpha2: &Spinor,
        beta2: &Spinor,
    ) -> Result<FierzVerdict> {
        let c11 = self.covariant(alpha1, beta1)?;
        let c22 = self.covariant(alpha2, beta2)?;
        let c12 = self.covariant(alpha1, beta2)?;
        let b = self.pairing.b_eval(alpha2, beta1)?;
        let alg = &self.algebra;
        let mut ids = Vec::new();
        match (&c11, &c22, &c12) {
            (Covariant::Normal(x), Covariant::Normal(y), Covariant::Normal(z)) => {
                ids.push(IdentityVerdict::new("normal", alg.product(x, y)?, z.scale(&b)));
            }
            (Covariant::AlmostComplex(x), Covariant::AlmostComplex(y), Covariant::AlmostComplex(z)) => {
                let s_d = match &self.structure {
                    MainSubalgebra::AlmostComplex { d_square, .. } => rational::int(*d_square as i64),
                    _ => unreachable!("case checked by covariant"),
                };
                let p00 = alg.product(&x[0], &y[0])?;
                let p11 = alg.product(&x[1], &y[1])?;
                let p01 = alg.product(&x[0], &y[1])?;
                let p10 = alg.product(&x[1], &y[0])?;
                // As printed: the grade involution acts on the whole product.
                ids.push(IdentityVerdict::new(
                    "complex-identity-part",
                    &p00 + &p11.grade_involution().scale(&s_d),
                    z[0].scale(&b),
                ));
                ids.push(IdentityVerdict::new(
                    "complex-d-part",
                    &p01.grade_involution() + &p10,
                    z[1].scale(&b),
                ));
                // From D λ(f) = λ(#f) D: the involution acts on the left factor only.
                let q11 = alg.product(&x[1].grade_involution(), &y[1])?;
                let q01 = alg.product(&x[0].grade_involution(), &y[1])?;
                ids.push(IdentityVerdict::new(
                    "complex-identity-part-operator",
                    &p00 + &q11.scale(&s_d),
                    z[0].scale(&b),
                ));
                ids.push(IdentityVerdict::new("complex-d-part-operator", &q01 + &p10, z[1].scale(&b)));
            }
            (Covariant::Quaternionic(x), Covariant::Quaternionic(y), Covariant::Quaternionic(z)) => {
                let mut real = alg.product(&x[0], &y[0])?;
                for i in 1..4 {
                    real = real - alg.product(&x[i], &y[i])?;
                }
                ids.push(IdentityVerdict::new("quaternion-real-part", real, z[0].scale(&b)));
                for i in 1..4 {
                    let mut lhs = alg.product(&x[0], &y[i])? + alg.product(&x[i], &y[0])?;
                    for j in 1..4 {
                        for k in 1..4 {
                            let eps = levi_civita(i - 1, j - 1, k - 1);
                            if eps != 0 {
                                let t = alg.product(&x[j], &y[k])?;
                                lhs = lhs + t.scale(&rational::int(eps as i64));
                            }
                        }
                    }
                    ids.push(IdentityVerdict::new(&format!("quaternion-unit-{i}"), lhs, z[i].scale(&b)));
                }
            }
            _ => return Err(GrafError::CaseMismatch("covariants of mixed case".into())),
        }
        Ok(FierzVerdict {
            case: self.case(),
            identities: ids,
            inputs: [alpha1.clone(), beta1.clone(), alpha2.clone(), beta2.clone()],
            seed: None,
        })
    }

    /// `E_{α1,β1} E_{α2,β2} = B(α2,β1) E_{α1,β2}` as matrices.
    pub fn fundamental_identity(
        &self,
        alpha1: &Spinor,
        beta1: &Spinor,
        alpha2: &Spinor,
        beta2: &Spinor,
    ) -> Result<bool> {
        let lhs = self.endo_e(alpha1, beta1)?.matmul(&self.endo_e(alpha2, beta2)?);
        let rhs = self.endo_e(alpha1, beta2)?.scale(&self.pairing.b_eval(alpha2, beta1)?);
        Ok(lhs == rhs)
    }
}

/// `E_{α,β} = α (Aβ)ᵀ`.
pub fn endo_e(pairing: &Pairing, alpha: &Spinor, beta: &Spinor) -> Result<RatMatrix> {
    let d = pairing.dim();
    if alpha.dim() != d || beta.dim() != d {
        return Err(GrafError::DimensionMismatch { left: alpha.dim().max(beta.dim()), right: d });
    }
    let ab = pairing.gram().mul_vec(&beta.0);
    let mut m = RatMatrix::zeros(d, d);
    for r in 0..d {
        if alpha.0[r].is_zero() {
            continue;
        }
        for c in 0..d {
            if !ab[c].is_zero() {
                m[(r, c)] = &alpha.0[r] * &ab[c];
            }
        }
    }
    Ok(m)
}

/// Replaces `D` by `J D` when `D` is `B`-skew, so that `D^Γ = D`.
fn align_d(structure: MainSubalgebra, pairing: &Pairing) -> Result<(MainSubalgebra, Option<DAlignment>)> {
    match structure {
        MainSubalgebra::AlmostComplex { j, d, d_square } => {
            let adj = pairing.adjoint(&d);
            if adj == d {
                Ok((MainSubalgebra::AlmostComplex { j, d, d_square }, Some(DAlignment::Kept)))
            } else {
                let jd = j.matmul(&d);
                if pairing.adjoint(&jd) == jd {
                    Ok((MainSubalgebra::AlmostComplex { j, d: jd, d_square }, Some(DAlignment::TimesJ)))
                } else {
                    Err(GrafError::Structure("neither D nor JD is B-symmetric".into()))
                }
            }
        }
        other => Ok((other, None)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "case", content = "components", rename_all = "kebab-case")]
pub enum Covariant {
    Normal(Form),
    AlmostComplex([Form; 2]),
    Quaternionic([Form; 4]),
}

impl Covariant {
    pub fn case(&self) -> CaseTag {
        match self {
            Covariant::Normal(_) => CaseTag::Normal,
            Covariant::AlmostComplex(_) => CaseTag::AlmostComplex,
            Covariant::Quaternionic(_) => CaseTag::Quaternionic,
        }
    }

    pub fn components(&self) -> &[Form] {
        match self {
            Covariant::Normal(x) => std::slice::from_ref(x),
            Covariant::AlmostComplex(x) => x,
            Covariant::Quaternionic(x) => x,
        }
    }
}

/// Splits a form by grade, keeping nonzero parts only.
pub fn by_grade(f: &Form) -> BTreeMap<usize, Form> {
    f.grades().into_iter().map(|k| (k, f.grade_project(k))).collect()
}

/// Exact outcome of one identity `lhs = rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityVerdict {
    #[serde(rename = "identity-id")]
    pub id: String,
    pub pass: bool,
    /// `lhs - rhs` split by grade; empty on success.
    pub residuals: BTreeMap<usize, Form>,
}

impl IdentityVerdict {
    pub fn new(id: &str, lhs: Form, rhs: Form) -> Self {
        let diff = &lhs - &rhs;
        IdentityVerdict { id: id.to_string(), pass: diff.is_zero(), residuals: by_grade(&diff) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FierzVerdict {
    pub case: CaseTag,
    pub identities: Vec<IdentityVerdict>,
    pub inputs: [Spinor; 4],
    pub seed: Option<u64>,
}

impl FierzVerdict {
    pub fn pass(&self) -> bool {
        self.identities.iter().all(|v| v.pass)
    }

    /// Pass status restricted to the identities exactly as printed (the
    /// almost-complex operator variants are excluded).
    pub fn printed_pass(&self) -> bool {
        self.identities.iter().filter(|v| !v.id.ends_with("-operator")).all(|v| v.pass)
    }
}
