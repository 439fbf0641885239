//! Classification of spinors by the vanishing pattern of their low-rank
//! covariants, for the two worked signatures:
//!
//! * `(1,2)`, almost complex, skew pairing: Majorana spinors (`Dα = α`) have
//!   covariants `φ₀ ∈ Λ⁰` and `φ₂ ∈ Λ²` only, constrained by the reduced
//!   Fierz system `φ₂ ∧₂ φ₂ = -2B φ₀`, `φ₂ ∧₁ φ₂ = 0`.
//! * `(9,0)`, normal, symmetric pairing: the truncated covariant lives in
//!   `Λ⁰ ⊕ Λ¹ ⊕ Λ⁴` and satisfies a quadratic identity for `◆₊`.
//!
//! In `(9,0)` the truncated covariant `Ē^L` is half the preimage of `Ē`
//! under `P₊`, so the exact identity is `Ē^L ◆ Ē^L = ½ B Ē^L`, equivalently
//! `(2Ē^L) ◆ (2Ē^L) = B (2Ē^L)`. That lifted form is the gate used for
//! classification; the unit-coefficient identity and the grade-by-grade
//! system derived from it are evaluated and reported alongside.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bilinear::{table_sigma, table_tau};
use crate::error::{GrafError, Result};
use crate::exterior::{Blade, Form, MetricJson, Signature};
use crate::fierz::{by_grade, Covariant, FierzContext, IdentityVerdict};
use crate::graf::{GrafAlgebra, PmSign};
use crate::linalg::Spinor;
use crate::matrixrep::{build_structure, CaseTag, MainSubalgebra, Rep};
use crate::rational::{self, Rational};
use crate::sample;

/// Provenance block attached to every report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub tool_version: String,
    pub signature: String,
    pub metric: MetricJson,
    pub volume_sign: i32,
    pub pairing_hash: String,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(ctx: &FierzContext, seed: Option<u64>) -> Self {
        Provenance {
            tool_version: crate::TOOL_VERSION.to_string(),
            signature: ctx.rep.signature().to_string(),
            metric: MetricJson::from_metric(ctx.rep.metric()),
            volume_sign: ctx.rep.volume_sign(),
            pairing_hash: ctx.pairing.gram_hash(),
            seed,
        }
    }
}

fn sig(p: usize, q: usize) -> Signature {
    Signature::new(p, q).expect("small signature")
}

fn require_signature(ctx: &FierzContext, p: usize, q: usize) -> Result<()> {
    let s = ctx.rep.signature();
    if s != sig(p, q) {
        return Err(GrafError::UnsupportedSignature {
            p: s.p,
            q: s.q,
            what: format!("this classification is defined for {}", sig(p, q)),
        });
    }
    Ok(())
}

/// Context for `(1,2)` with the table pairing (`σ = τ = -1`).
pub fn context_12() -> Result<FierzContext> {
    FierzContext::for_rep(Rep::build(sig(1, 2), 1)?)
}

/// Context for `(9,0)` with the table pairing (`σ = τ = +1`).
pub fn context_90() -> Result<FierzContext> {
    FierzContext::for_rep(Rep::build(sig(9, 0), 1)?)
}

/// Every admissible pairing of `rep` as a context, the table-matching one
/// first. Pairings for which `D` cannot be aligned are skipped.
pub fn contexts_for_all_pairings(rep: &Rep) -> Result<Vec<FierzContext>> {
    let structure = build_structure(rep)?;
    let (pick, all) = crate::bilinear::select_pairing(rep, &structure)?;
    let mut out = vec![FierzContext::new(rep.clone(), structure.clone(), pick.clone())?];
    for p in all {
        if p.gram() == pick.gram() {
            continue;
        }
        if let Ok(c) = FierzContext::new(rep.clone(), structure.clone(), p) {
            out.push(c);
        }
    }
    Ok(out)
}

/// Ranks `k` for which some `B(α, λ(e^I) α)` with `|I| = k` is nonzero.
pub fn nonzero_ranks(ctx: &FierzContext, alpha: &Spinor) -> Result<Vec<usize>> {
    let n = ctx.rep.signature().n();
    let a_alpha = ctx.pairing.gram().transpose().mul_vec(&alpha.0);
    let mut ranks = Vec::new();
    for k in 0..=n {
        let hit = Blade::of_grade(n, k).into_iter().any(|b| {
            let lb = ctx.rep.apply_blade(b, &alpha.0);
            let v = a_alpha.iter().zip(&lb).fold(Rational::zero(), |acc, (x, y)| acc + x * y);
            !v.is_zero()
        });
        if hit {
            ranks.push(k);
        }
    }
    Ok(ranks)
}

// ---------------------------------------------------------------------------
// (1,2)

/// `½(α + Dα)`.
pub fn majorana_project(ctx: &FierzContext, alpha: &Spinor) -> Result<Spinor> {
    let d = ctx
        .structure
        .d_matrix()
        .ok_or_else(|| GrafError::CaseMismatch("Majorana projection needs an almost complex structure".into()))?;
    if alpha.dim() != ctx.dim() {
        return Err(GrafError::DimensionMismatch { left: alpha.dim(), right: ctx.dim() });
    }
    Ok(alpha.add(&Spinor::apply(d, alpha)).scale(&rational::frac(1, 2)))
}

pub fn is_majorana(ctx: &FierzContext, alpha: &Spinor) -> bool {
    ctx.structure.d_matrix().is_some_and(|d| Spinor::apply(d, alpha) == *alpha)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Covariants12 {
    pub phi0: Form,
    pub phi2: Form,
}

impl Covariants12 {
    /// The scalar `B(α,α)` carried by `φ₀`.
    pub fn b(&self) -> Rational {
        self.phi0.scalar_part()
    }
}

/// `φ₀ = B(α,α)` and `φ₂ = Σ_{i<j} B(α, λ(e^i)λ(e^j) α) g_ii g_jj e^{ij}` of
/// a Majorana spinor, with consistency checks against the full covariant.
pub fn covariants_12(ctx: &FierzContext, alpha: &Spinor) -> Result<Covariants12> {
    require_signature(ctx, 1, 2)?;
    if !is_majorana(ctx, alpha) {
        return Err(GrafError::NotMajorana);
    }
    let n = 3;
    let pairing = &ctx.pairing;
    let phi0 = Form::scalar(n, pairing.b_eval(alpha, alpha)?);
    let mut phi2 = Form::zero(n);
    let a_alpha = pairing.gram().transpose().mul_vec(&alpha.0);
    for b in Blade::of_grade(n, 2) {
        let lb = ctx.rep.apply_blade(b, &alpha.0);
        let v = a_alpha.iter().zip(&lb).fold(Rational::zero(), |acc, (x, y)| acc + x * y);
        let lower = b
            .indices()
            .into_iter()
            .fold(Rational::one(), |acc, i| acc * ctx.rep.metric().g_lower(i, i));
        phi2.add_term(b, v * lower);
    }
    if nonzero_ranks(ctx, alpha)?.iter().any(|k| k % 2 == 1) {
        return Err(GrafError::NotASpinor("odd-rank bilinears of a Majorana spinor must vanish".into()));
    }
    // Both components of the covariant equal ¼(φ₀ + φ₂).
    if let Covariant::AlmostComplex([x0, x1]) = ctx.covariant(alpha, alpha)? {
        let expect = (&phi0 + &phi2).scale(&rational::frac(1, 4));
        if x0 != expect || x1 != expect {
            return Err(GrafError::NotASpinor("covariant components disagree with (φ₀, φ₂)".into()));
        }
    }
    Ok(Covariants12 { phi0, phi2 })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reduced12Verdict {
    /// `φ₂ ∧₂ φ₂ = -2B φ₀` and `φ₂ ∧₁ φ₂ = 0`.
    pub constraints: Vec<IdentityVerdict>,
    /// The combined identity `Φ ⋄ Φ = 2B Φ` and its grade-0 and grade-2 parts.
    pub grade_split: Vec<IdentityVerdict>,
}

impl Reduced12Verdict {
    pub fn pass(&self) -> bool {
        self.constraints.iter().chain(&self.grade_split).all(|v| v.pass)
    }
}

pub fn check_reduced_12(alg: &GrafAlgebra, c: &Covariants12, b: &Rational) -> Result<Reduced12Verdict> {
    let m = alg.metric();
    let two = rational::int(2);
    let w2 = m.contracted_wedge(&c.phi2, &c.phi2, 2)?;
    let w1 = m.contracted_wedge(&c.phi2, &c.phi2, 1)?;
    let constraints = vec![
        IdentityVerdict::new("two-form-double-contraction", w2.clone(), c.phi0.scale(&(-&two * b))),
        IdentityVerdict::new("two-form-single-contraction", w1.clone(), Form::zero(3)),
    ];
    let phi = &c.phi0 + &c.phi2;
    let sq = alg.product(&phi, &phi)?;
    let half = rational::frac(1, 2);
    let grade_split = vec![
        IdentityVerdict::new("combined", sq, phi.scale(&(&two * b))),
        IdentityVerdict::new(
            "scalar-part",
            c.phi0.wedge(&c.phi0)? - w2.scale(&half),
            c.phi0.scale(&(&two * b)),
        ),
        IdentityVerdict::new(
            "two-form-part",
            c.phi0.wedge(&c.phi2)?.scale(&two) - w1,
            c.phi2.scale(&(&two * b)),
        ),
    ];
    Ok(Reduced12Verdict { constraints, grade_split })
}

/// `1`: both zero; `2`: `φ₀ ≠ 0, φ₂ = 0`; `3`: `φ₀ = 0, φ₂ ≠ 0`;
/// `4`: both nonzero.
pub fn class_index_12(c: &Covariants12) -> u8 {
    match (c.phi0.is_zero(), c.phi2.is_zero()) {
        (true, true) => 1,
        (false, true) => 2,
        (true, false) => 3,
        (false, false) => 4,
    }
}

/// Classifies after checking the reduced system with `B = φ₀`.
pub fn classify_12(alg: &GrafAlgebra, c: &Covariants12) -> Result<u8> {
    let v = check_reduced_12(alg, c, &c.b())?;
    if !v.pass() {
        return Err(GrafError::NotASpinor("covariants violate the reduced Fierz system".into()));
    }
    Ok(class_index_12(c))
}

pub fn class_label_12(class: u8) -> &'static str {
    match class {
        1 => "phi0 = 0, phi2 = 0",
        2 => "phi0 != 0, phi2 = 0",
        3 => "phi0 = 0, phi2 != 0",
        4 => "phi0 != 0, phi2 != 0",
        _ => "unknown",
    }
}

// ---------------------------------------------------------------------------
// (9,0)

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Covariants90 {
    pub psi0: Form,
    pub psi1: Form,
    pub psi4: Form,
}

impl Covariants90 {
    pub fn b(&self) -> Rational {
        self.psi0.scalar_part()
    }

    /// `ψ₀ + ψ₁ + ψ₄`.
    pub fn sum(&self) -> Form {
        &(&self.psi0 + &self.psi1) + &self.psi4
    }

    /// `Ē^L = (ψ₀ + ψ₁ + ψ₄) / 32`.
    pub fn truncated(&self) -> Form {
        self.sum().scale(&rational::frac(1, 32))
    }

    /// Splits a lower-half form into the three pieces; other grades are an error.
    pub fn from_lower(f: &Form) -> Result<Self> {
        if f.dim() != 9 {
            return Err(GrafError::DimensionMismatch { left: f.dim(), right: 9 });
        }
        if f.grades().iter().any(|k| ![0, 1, 4].contains(k)) {
            return Err(GrafError::NotAPinor(format!("grades {:?} outside 0, 1, 4", f.grades())));
        }
        Ok(Covariants90 { psi0: f.grade_project(0), psi1: f.grade_project(1), psi4: f.grade_project(4) })
    }
}

/// `ψ_k = Σ_{|I|=k} B(α, λ(e^I) α) e^I` for `k = 0, 1, 4`, after checking
/// that ranks 2, 3, 6, 7 vanish and that `Ē = Ē^L + ⋆Ē^L`.
pub fn covariants_90(ctx: &FierzContext, alpha: &Spinor) -> Result<Covariants90> {
    require_signature(ctx, 9, 0)?;
    if ctx.pairing.sigma() != 1 || ctx.pairing.tau() != 1 {
        return Err(GrafError::NoPairing("(9,0) covariants use the symmetric pairing with tau = +1".into()));
    }
    let Covariant::Normal(full) = ctx.covariant(alpha, alpha)? else {
        return Err(GrafError::CaseMismatch("(9,0) is a normal case".into()));
    };
    if full.grades().iter().any(|k| [2, 3, 6, 7].contains(k)) {
        return Err(GrafError::NotAPinor(format!("covariant has grades {:?}", full.grades())));
    }
    let alg = &ctx.algebra;
    let split = alg.truncate(&full);
    if &split.lower + &alg.hodge(&split.lower)? != full {
        return Err(GrafError::NotAPinor("upper half is not the Hodge image of the lower half".into()));
    }
    let mut c = Covariants90::from_lower(&split.lower.scale(&rational::int(32)))?;
    // Cross-check the scalar against the pairing directly.
    if c.b() != ctx.pairing.b_eval(alpha, alpha)? {
        return Err(GrafError::NotAPinor("scalar covariant differs from B(α,α)".into()));
    }
    c.psi0 = Form::scalar(9, c.b());
    Ok(c)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reduced90Verdict {
    pub b: String,
    /// `(2Ē^L) ◆ (2Ē^L) = B (2Ē^L)`; gates classification.
    pub lifted_identity: IdentityVerdict,
    /// `Ē^L ◆ Ē^L = B Ē^L` with unit coefficient.
    pub unit_coefficient_identity: IdentityVerdict,
    /// `P_L(Ē^L ⋄ v) = 0`.
    pub truncation_lemma: IdentityVerdict,
    /// `P_L(Ē^L ◆ v) = 0` with `◆` taken literally.
    pub truncation_lemma_diamond: IdentityVerdict,
    /// Grade-by-grade system derived from the lifted identity.
    pub reduced: Vec<IdentityVerdict>,
    /// The same system with the coefficients 31, 30, 60 that follow from the
    /// unit-coefficient identity.
    pub reduced_unit_coefficient: Vec<IdentityVerdict>,
    /// Oracle passes but some reported equation does not.
    pub flagged: bool,
}

impl Reduced90Verdict {
    pub fn oracle_pass(&self) -> bool {
        self.lifted_identity.pass
    }

    pub fn reduced_pass(&self) -> bool {
        self.reduced.iter().all(|v| v.pass)
    }

    /// Residuals of every failing reported equation.
    pub fn flagged_residuals(&self) -> BTreeMap<String, BTreeMap<usize, Form>> {
        std::iter::once(&self.unit_coefficient_identity)
            .chain(&self.reduced)
            .chain(&self.reduced_unit_coefficient)
            .filter(|v| !v.pass)
            .map(|v| (v.id.clone(), v.residuals.clone()))
            .collect()
    }
}

fn reduced_system_90(alg: &GrafAlgebra, c: &Covariants90, b: &Rational, coeffs: [i64; 3], suffix: &str) -> Result<Vec<IdentityVerdict>> {
    let m = alg.metric();
    let (p1, p4) = (&c.psi1, &c.psi4);
    let scalar = |k: i64| rational::int(k) * b;
    let id = |name: &str| format!("{name}{suffix}");
    let w = |f: &Form, g: &Form, k: usize| m.contracted_wedge(f, g, k);
    let p44 = p4.wedge(p4)?;
    let p14 = p1.wedge(p4)?;
    let fact = |k: usize| Rational::one() / rational::factorial(k);
    Ok(vec![
        IdentityVerdict::new(
            &id("scalar-part"),
            &w(p1, p1, 1)? + &w(p4, p4, 4)?.scale(&fact(4)),
            c.psi0.scale(&scalar(coeffs[0])),
        ),
        IdentityVerdict::new(&id("vector-part"), alg.hodge(&p44)?, p1.scale(&scalar(coeffs[1]))),
        IdentityVerdict::new(
            &id("two-form-part"),
            &p1.wedge(p1)? + &w(p4, p4, 3)?.scale(&fact(3)),
            Form::zero(9),
        ),
        IdentityVerdict::new(&id("three-form-part"), alg.hodge(&w(p4, p4, 1)?)?, Form::zero(9)),
        IdentityVerdict::new(
            &id("four-form-part"),
            alg.hodge(&p14)?.scale(&rational::int(4)) - w(p4, p4, 2)?,
            p4.scale(&scalar(coeffs[2])),
        ),
    ])
}

pub fn check_reduced_90(alg: &GrafAlgebra, c: &Covariants90, b: &Rational) -> Result<Reduced90Verdict> {
    if alg.signature() != sig(9, 0) {
        let s = alg.signature();
        return Err(GrafError::UnsupportedSignature { p: s.p, q: s.q, what: "(9,0) reduced system".into() });
    }
    let el = c.truncated();
    let two_el = el.scale(&rational::int(2));
    let lifted = IdentityVerdict::new(
        "lifted-identity",
        alg.diamond(&two_el, &two_el, PmSign::Plus)?,
        two_el.scale(b),
    );
    let unit = IdentityVerdict::new(
        "unit-coefficient-identity",
        alg.diamond(&el, &el, PmSign::Plus)?,
        el.scale(b),
    );
    let v = &alg.volume().v;
    let lemma = IdentityVerdict::new("truncation-lemma", alg.lower(&alg.product(&el, v)?), Form::zero(9));
    let lemma_diamond = IdentityVerdict::new(
        "truncation-lemma-diamond",
        alg.lower(&alg.diamond(&el, v, PmSign::Plus)?),
        Form::zero(9),
    );
    let reduced = reduced_system_90(alg, c, b, [15, 14, 28], "")?;
    let reduced_unit = reduced_system_90(alg, c, b, [31, 30, 60], "-unit-coefficient")?;
    let reported_fail = !unit.pass || reduced.iter().chain(&reduced_unit).any(|v| !v.pass);
    let flagged = lifted.pass && reported_fail;
    Ok(Reduced90Verdict {
        b: rational::to_string(b),
        lifted_identity: lifted,
        unit_coefficient_identity: unit,
        truncation_lemma: lemma,
        truncation_lemma_diamond: lemma_diamond,
        reduced,
        reduced_unit_coefficient: reduced_unit,
        flagged,
    })
}

/// Classes by the zero pattern of `(ψ₀, ψ₁, ψ₄)`.
pub fn class_index_90(c: &Covariants90) -> u8 {
    match (c.psi0.is_zero(), c.psi1.is_zero(), c.psi4.is_zero()) {
        (true, false, false) => 1,
        (false, true, false) => 2,
        (false, false, true) => 3,
        (true, true, false) => 4,
        (true, false, true) => 5,
        (false, true, true) => 6,
        (true, true, true) => 7,
        (false, false, false) => 8,
    }
}

pub fn classify_90(alg: &GrafAlgebra, c: &Covariants90) -> Result<u8> {
    let v = check_reduced_90(alg, c, &c.b())?;
    if !v.oracle_pass() {
        return Err(GrafError::NotAPinor("covariants violate the quadratic identity".into()));
    }
    Ok(class_index_90(c))
}

pub fn class_label_90(class: u8) -> &'static str {
    match class {
        1 => "psi0 = 0, psi1 != 0, psi4 != 0",
        2 => "psi0 != 0, psi1 = 0, psi4 != 0",
        3 => "psi0 != 0, psi1 != 0, psi4 = 0",
        4 => "psi0 = 0, psi1 = 0, psi4 != 0",
        5 => "psi0 = 0, psi1 != 0, psi4 = 0",
        6 => "psi0 != 0, psi1 = 0, psi4 = 0",
        7 => "psi0 = 0, psi1 = 0, psi4 = 0",
        8 => "psi0 != 0, psi1 != 0, psi4 != 0",
        _ => "unknown",
    }
}

// ---------------------------------------------------------------------------
// Reports

/// Covariants of either worked signature, tagged.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Covariants {
    Lorentzian3 { phi0: Form, phi2: Form },
    Euclidean9 { psi0: Form, psi1: Form, psi4: Form },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConstraintReport {
    Lorentzian3(Reduced12Verdict),
    Euclidean9(Box<Reduced90Verdict>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub provenance: Provenance,
    pub class_index: u8,
    pub class_label: String,
    pub covariants: Covariants,
    pub constraints: ConstraintReport,
    /// Set when covariants were supplied directly instead of from a spinor.
    pub injected: bool,
}

impl ClassReport {
    pub fn flagged(&self) -> bool {
        match &self.constraints {
            ConstraintReport::Lorentzian3(_) => false,
            ConstraintReport::Euclidean9(v) => v.flagged,
        }
    }
}

/// Classifies a spinor of `(1,2)` (after Majorana projection when `project`)
/// or `(9,0)`, using the context's signature to choose.
pub fn classify_spinor(ctx: &FierzContext, alpha: &Spinor, project: bool) -> Result<ClassReport> {
    let s = ctx.rep.signature();
    if s == sig(1, 2) {
        let a = if project { majorana_project(ctx, alpha)? } else { alpha.clone() };
        let c = covariants_12(ctx, &a)?;
        report_12(ctx, c, false)
    } else if s == sig(9, 0) {
        let c = covariants_90(ctx, alpha)?;
        report_90(ctx, c, false)
    } else {
        Err(GrafError::UnsupportedSignature { p: s.p, q: s.q, what: "classification covers (1,2) and (9,0)".into() })
    }
}

pub fn report_12(ctx: &FierzContext, c: Covariants12, injected: bool) -> Result<ClassReport> {
    let verdict = check_reduced_12(&ctx.algebra, &c, &c.b())?;
    let class = classify_12(&ctx.algebra, &c)?;
    Ok(ClassReport {
        provenance: Provenance::new(ctx, None),
        class_index: class,
        class_label: class_label_12(class).into(),
        covariants: Covariants::Lorentzian3 { phi0: c.phi0, phi2: c.phi2 },
        constraints: ConstraintReport::Lorentzian3(verdict),
        injected,
    })
}

pub fn report_90(ctx: &FierzContext, c: Covariants90, injected: bool) -> Result<ClassReport> {
    let verdict = check_reduced_90(&ctx.algebra, &c, &c.b())?;
    let class = classify_90(&ctx.algebra, &c)?;
    Ok(ClassReport {
        provenance: Provenance::new(ctx, None),
        class_index: class,
        class_label: class_label_90(class).into(),
        covariants: Covariants::Euclidean9 { psi0: c.psi0, psi1: c.psi1, psi4: c.psi4 },
        constraints: ConstraintReport::Euclidean9(Box::new(verdict)),
        injected,
    })
}

// ---------------------------------------------------------------------------
// Census

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassEntry {
    pub class_index: u8,
    pub class_label: String,
    pub count: usize,
    pub representative: Option<Spinor>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingPopulation {
    pub pairing_hash: String,
    pub sigma: i32,
    pub tau: i32,
    pub table_match: bool,
    pub classes: Vec<ClassEntry>,
    /// Samples whose covariants failed the gate.
    pub refused: usize,
    /// Samples flagged by the reduced-system comparison.
    pub flagged: usize,
}

impl PairingPopulation {
    pub fn populated(&self) -> Vec<u8> {
        self.classes.iter().filter(|c| c.count > 0).map(|c| c.class_index).collect()
    }

    pub fn total(&self) -> usize {
        self.classes.iter().map(|c| c.count).sum::<usize>() + self.refused
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub provenance: Provenance,
    pub signature: String,
    pub samples: usize,
    pub seed: u64,
    pub box_bound: i64,
    pub populations: Vec<PairingPopulation>,
}

impl CensusReport {
    /// Population under the table-matching pairing.
    pub fn primary(&self) -> &PairingPopulation {
        &self.populations[0]
    }
}

enum Outcome {
    Class(u8, bool),
    Refused,
}

fn census_one(ctx: &FierzContext, alpha: &Spinor) -> Outcome {
    let s = ctx.rep.signature();
    let res = if s == sig(1, 2) {
        majorana_project(ctx, alpha)
            .and_then(|a| covariants_12(ctx, &a))
            .and_then(|c| classify_12(&ctx.algebra, &c).map(|k| (k, false)))
    } else {
        covariants_90(ctx, alpha).and_then(|c| {
            // ◆ is bilinear, so one product decides both the lifted and the
            // unit-coefficient identity; the latter failing is what flags.
            let el = c.truncated();
            let sq = ctx.algebra.diamond(&el, &el, PmSign::Plus)?;
            let target = el.scale(&c.b());
            if sq.scale(&rational::int(2)) != target {
                return Err(GrafError::NotAPinor(String::new()));
            }
            Ok((class_index_90(&c), sq != target))
        })
    };
    match res {
        Ok((k, f)) => Outcome::Class(k, f),
        Err(_) => Outcome::Refused,
    }
}

/// Seeded census over spinors with integer entries in `[-bound, bound]`.
/// Samples are drawn sequentially and classified in parallel, so the report
/// depends only on the seed.
pub fn census(signature: Signature, samples: usize, seed: u64, bound: i64) -> Result<CensusReport> {
    let (classes, label): (u8, fn(u8) -> &'static str) = if signature == sig(1, 2) {
        (4, class_label_12)
    } else if signature == sig(9, 0) {
        (8, class_label_90)
    } else {
        return Err(GrafError::UnsupportedSignature {
            p: signature.p,
            q: signature.q,
            what: "census covers (1,2) and (9,0)".into(),
        });
    };
    let rep = Rep::build(signature, 1)?;
    let ctxs = contexts_for_all_pairings(&rep)?;
    let mut rng = sample::rng(seed);
    let draws: Vec<Spinor> = (0..samples).map(|_| sample::spinor(&mut rng, rep.dim(), bound)).collect();
    let field = rep.abs_type().field;
    let want = (
        table_sigma(field, signature.pq_mod8(), signature.n()),
        table_tau(field, signature.pq_mod8(), signature.n()),
    );
    let mut populations = Vec::new();
    for ctx in &ctxs {
        let outcomes: Vec<Outcome> = draws.par_iter().map(|a| census_one(ctx, a)).collect();
        let mut entries: Vec<ClassEntry> = (1..=classes)
            .map(|k| ClassEntry { class_index: k, class_label: label(k).into(), count: 0, representative: None })
            .collect();
        let (mut refused, mut flagged) = (0, 0);
        for (o, a) in outcomes.iter().zip(&draws) {
            match o {
                Outcome::Class(k, f) => {
                    let e = &mut entries[*k as usize - 1];
                    e.count += 1;
                    e.representative.get_or_insert_with(|| a.clone());
                    flagged += *f as usize;
                }
                Outcome::Refused => refused += 1,
            }
        }
        let p = &ctx.pairing;
        populations.push(PairingPopulation {
            pairing_hash: p.gram_hash(),
            sigma: p.sigma(),
            tau: p.tau(),
            table_match: want.0.is_none_or(|s| s == p.sigma()) && want.1.is_none_or(|t| t == p.tau()),
            classes: entries,
            refused,
            flagged,
        });
    }
    Ok(CensusReport {
        provenance: Provenance::new(&ctxs[0], Some(seed)),
        signature: signature.to_string(),
        samples,
        seed,
        box_bound: bound,
        populations,
    })
}

// ---------------------------------------------------------------------------
// Product expansions for Λ⁰, Λ¹, Λ⁴ in (9,0)

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpansionResult {
    pub id: String,
    /// Grades the product is claimed to occupy.
    pub claimed_grades: Vec<usize>,
    pub trials: usize,
    pub passed: usize,
    /// First failing input triple `(ψ₀, ψ₁, ψ₄)` and its residuals.
    pub counterexample: Option<(Form, Form, Form, BTreeMap<usize, Form>)>,
}

impl ExpansionResult {
    pub fn pass(&self) -> bool {
        self.passed == self.trials
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AppendixReport {
    pub provenance: Provenance,
    pub trials: usize,
    pub seed: u64,
    pub expansions: Vec<ExpansionResult>,
}

impl AppendixReport {
    pub fn pass(&self) -> bool {
        self.expansions.iter().all(ExpansionResult::pass)
    }
}

/// Evaluates the twelve expansions of `⋄` and `◆₊` between forms of grades
/// 0, 1 and 4 in `(9,0)`; `B` is the value of the scalar form.
fn expansions(alg: &GrafAlgebra, p0: &Form, p1: &Form, p4: &Form) -> Result<Vec<(String, Vec<usize>, Form, Form)>> {
    let m = alg.metric();
    let b = p0.scalar_part();
    let d = |f: &Form, g: &Form| alg.diamond(f, g, PmSign::Plus);
    let w = |f: &Form, g: &Form, k: usize| m.contracted_wedge(f, g, k);
    let star = |f: &Form| alg.hodge(f);
    let fact = |k: usize| Rational::one() / rational::factorial(k);
    let half = rational::frac(1, 2);
    let mut out = Vec::new();
    let mut push = |id: &str, grades: &[usize], lhs: Form, rhs: Form| {
        out.push((id.to_string(), grades.to_vec(), lhs, rhs));
    };
    push("scalar-scalar", &[0], d(p0, p0)?, p0.scale(&b));
    push("scalar-vector", &[1], d(p0, p1)?, p1.scale(&b));
    push("scalar-four", &[4], d(p0, p4)?, p4.scale(&b));
    push("vector-scalar", &[1], d(p1, p0)?, p1.scale(&b));
    push("vector-vector", &[0, 2], d(p1, p1)?, &p1.wedge(p1)? + &w(p1, p1, 1)?);
    push("vector-four-graf", &[3, 5], alg.product(p1, p4)?, &p1.wedge(p4)? + &w(p1, p4, 1)?);
    push("vector-four", &[3, 4], d(p1, p4)?, &w(p1, p4, 1)? + &star(&p1.wedge(p4)?)?);
    push("four-scalar", &[4], d(p4, p0)?, p4.scale(&b));
    push("four-vector-graf", &[3, 5], alg.product(p4, p1)?, &p1.wedge(p4)? - &w(p1, p4, 1)?);
    push("four-vector", &[3, 4], d(p4, p1)?, &star(&p1.wedge(p4)?)? - &w(p1, p4, 1)?);
    let common = &(&w(p4, p4, 2)?.scale(&-&half) + &w(p4, p4, 3)?.scale(&fact(3))) + &w(p4, p4, 4)?.scale(&fact(4));
    push(
        "four-four-graf",
        &[0, 2, 4, 6, 8],
        alg.product(p4, p4)?,
        &(&p4.wedge(p4)? - &w(p4, p4, 1)?) + &common,
    );
    push(
        "four-four",
        &[0, 1, 2, 3, 4],
        d(p4, p4)?,
        &(&common + &star(&p4.wedge(p4)?)?) - &star(&w(p4, p4, 1)?)?,
    );
    Ok(out)
}

/// Checks the expansions on `trials` seeded random triples.
pub fn appendix_check(trials: usize, seed: u64) -> Result<AppendixReport> {
    let ctx = context_90()?;
    let alg = &ctx.algebra;
    let mut rng = sample::rng(seed);
    let inputs: Vec<(Form, Form, Form)> = (0..trials)
        .map(|_| {
            let b = rng.gen_range(-sample::DEFAULT_BOX..=sample::DEFAULT_BOX);
            (
                Form::scalar(9, rational::int(b)),
                sample::form_of_grade(&mut rng, 9, 1, sample::DEFAULT_BOX, 0.8),
                sample::form_of_grade(&mut rng, 9, 4, sample::DEFAULT_BOX, 0.3),
            )
        })
        .collect();
    let evaluated: Vec<Vec<(String, Vec<usize>, Form, Form)>> = inputs
        .par_iter()
        .map(|(a, b, c)| expansions(alg, a, b, c))
        .collect::<Result<_>>()?;
    let mut results: Vec<ExpansionResult> = Vec::new();
    for (t, rows) in evaluated.into_iter().enumerate() {
        for (i, (id, grades, lhs, rhs)) in rows.into_iter().enumerate() {
            if t == 0 {
                results.push(ExpansionResult {
                    id: id.clone(),
                    claimed_grades: grades.clone(),
                    trials: 0,
                    passed: 0,
                    counterexample: None,
                });
            }
            let r = &mut results[i];
            r.trials += 1;
            let in_grades = lhs.grades().iter().all(|k| grades.contains(k));
            let diff = &lhs - &rhs;
            if diff.is_zero() && in_grades {
                r.passed += 1;
            } else if r.counterexample.is_none() {
                let (a, b, c) = &inputs[t];
                let mut res = by_grade(&diff);
                if !in_grades {
                    // Record the stray grades of the product itself.
                    for k in lhs.grades().into_iter().filter(|k| !grades.contains(k)) {
                        res.entry(k).or_insert_with(|| lhs.grade_project(k));
                    }
                }
                r.counterexample = Some((a.clone(), b.clone(), c.clone(), res));
            }
        }
    }
    Ok(AppendixReport { provenance: Provenance::new(&ctx, Some(seed)), trials, seed, expansions: results })
}

/// The case tag expected for the two worked signatures.
pub fn expected_case(s: Signature) -> Option<CaseTag> {
    if s == sig(1, 2) {
        Some(CaseTag::AlmostComplex)
    } else if s == sig(9, 0) {
        Some(CaseTag::Normal)
    } else {
        None
    }
}

/// Whether `st` carries the almost complex structure needed for Majorana projection.
pub fn has_majorana_structure(st: &MainSubalgebra) -> bool {
    st.d_matrix().is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lorentzian_majorana_spinors_are_null() {
        let ctx = context_12().unwrap();
        let mut r = sample::rng(3);
        for _ in 0..20 {
            let a = majorana_project(&ctx, &sample::spinor(&mut r, 4, 5)).unwrap();
            let c = covariants_12(&ctx, &a).unwrap();
            assert!(c.phi0.is_zero());
            let v = check_reduced_12(&ctx.algebra, &c, &c.b()).unwrap();
            assert!(v.pass(), "{v:?}");
            assert!(matches!(classify_12(&ctx.algebra, &c).unwrap(), 1 | 3));
        }
    }

    #[test]
    fn non_majorana_input_is_rejected() {
        let ctx = context_12().unwrap();
        let mut r = sample::rng(4);
        let a = sample::spinor(&mut r, 4, 5);
        if !is_majorana(&ctx, &a) {
            assert!(matches!(covariants_12(&ctx, &a), Err(GrafError::NotMajorana)));
        }
    }

    #[test]
    fn euclidean_nine_lifted_identity() {
        let ctx = context_90().unwrap();
        let a = Spinor::basis(16, 0);
        let c = covariants_90(&ctx, &a).unwrap();
        let v = check_reduced_90(&ctx.algebra, &c, &c.b()).unwrap();
        assert!(v.oracle_pass());
        assert!(v.reduced_pass(), "{:?}", v.reduced);
        assert!(v.truncation_lemma.pass);
    }

    #[test]
    fn injected_scalar_only_covariant_is_refused() {
        let ctx = context_90().unwrap();
        let c = Covariants90 { psi0: Form::one(9), psi1: Form::zero(9), psi4: Form::zero(9) };
        assert!(matches!(classify_90(&ctx.algebra, &c), Err(GrafError::NotAPinor(_))));
    }

    #[test]
    fn class_patterns() {
        let z = Form::zero(9);
        let c = Covariants90 { psi0: z.clone(), psi1: z.clone(), psi4: z };
        assert_eq!(class_index_90(&c), 7);
    }
}
