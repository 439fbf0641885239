//! The Graf (Kähler–Atiyah) product on forms and the structure built from it:
//! volume form, Hodge star, the projectors `P±`, the lower/upper truncation
//! and the truncated product `◆±`.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{GrafError, Result};
use crate::exterior::{bilinear_int, removal_sign, wedge_sign, Blade, Form, Metric, Signature};
use crate::rational::{self, Rational};

/// Sign of `v ⋄ v` for an orthonormal coframe of signature `(p,q)`.
pub fn volume_square_sign(sig: Signature) -> i32 {
    match sig.pq_mod8() {
        0 | 1 | 4 | 5 => 1,
        _ => -1,
    }
}

/// Whether `P±` are algebra endomorphisms and `◆±` models `(Γ±, ⋄)`:
/// `n` odd and `p - q ≡ 0,1,4,5 (mod 8)`.
pub fn in_truncation_regime(sig: Signature) -> bool {
    sig.n() % 2 == 1 && volume_square_sign(sig) == 1
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumeForm {
    pub v: Form,
    /// The scalar `v ⋄ v`; `±1` for an orthonormal coframe.
    pub vsquare: Rational,
}

/// Lower/upper split of a form at grade `⌊n/2⌋`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncationSplit {
    pub lower: Form,
    pub upper: Form,
}

/// The value of `f ◆± g` together with whether the signature lies outside the
/// regime where `◆±` models `(Γ±, ⋄)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncatedProduct {
    pub value: Form,
    pub outside_regime: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PmSign {
    Plus,
    Minus,
}

impl PmSign {
    pub fn as_i32(self) -> i32 {
        match self {
            PmSign::Plus => 1,
            PmSign::Minus => -1,
        }
    }
}

/// The algebra `(Γ(Λ), ⋄)` for a fixed metric.
#[derive(Clone, Debug)]
pub struct GrafAlgebra {
    metric: Metric,
    volume: VolumeForm,
}

impl GrafAlgebra {
    pub fn new(metric: Metric) -> Self {
        let n = metric.dim();
        let v = Form::volume(n);
        let mut alg = GrafAlgebra {
            metric,
            volume: VolumeForm { v: v.clone(), vsquare: Rational::zero() },
        };
        alg.volume.vsquare = alg.product(&v, &v).expect("same dimension").scalar_part();
        alg
    }

    pub fn orthonormal(sig: Signature) -> Self {
        Self::new(Metric::orthonormal(sig))
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn signature(&self) -> Signature {
        self.metric.signature()
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn volume(&self) -> &VolumeForm {
        &self.volume
    }

    fn check(&self, f: &Form) -> Result<()> {
        if f.dim() != self.dim() {
            return Err(GrafError::DimensionMismatch { left: f.dim(), right: self.dim() });
        }
        Ok(())
    }

    /// `e^A ⋄ e^B` for a diagonal metric: a single blade `A △ B`. The `1/k!`
    /// of the product formula cancels the `k!` orderings of the contraction.
    fn blade_product_diag(&self, a: Blade, b: Blade) -> (Blade, Rational) {
        let c = a.intersection(b);
        let (m, k) = (a.grade(), c.grade());
        let (ar, br) = (a.without(c), b.without(c));
        let exp = k * (m - k) + k / 2;
        let s = if exp % 2 == 0 { 1 } else { -1 };
        let s = s * removal_sign(a, c) * removal_sign(b, c) * wedge_sign(ar, br);
        let mut coeff = rational::sign(s);
        for i in c.indices() {
            let g = self.metric.g(i, i);
            if !g.is_one() {
                coeff *= g;
            }
        }
        (ar.union(br), coeff)
    }

    /// `e^A ⋄ e^B` for any metric, summing every contraction order.
    pub fn blade_product(&self, a: Blade, b: Blade) -> Vec<(Blade, Rational)> {
        if self.metric.is_diagonal() {
            let (blade, c) = self.blade_product_diag(a, b);
            return vec![(blade, c)];
        }
        let m = a.grade();
        let mut out: Vec<(Blade, Rational)> = Vec::new();
        for k in 0..=m.min(b.grade()) {
            let exp = k * (m - k) + k / 2;
            let pref = rational::sign(if exp % 2 == 0 { 1 } else { -1 }) / rational::factorial(k);
            for (blade, c) in self.metric.blade_contracted_wedge(a, b, k) {
                out.push((blade, c * &pref));
            }
        }
        out
    }

    /// `f ⋄ g`, extended bilinearly over the homogeneous components of both factors.
    pub fn product(&self, f: &Form, g: &Form) -> Result<Form> {
        self.check(f)?;
        self.check(g)?;
        let n = self.dim();
        if f.is_zero() || g.is_zero() {
            return Ok(Form::zero(n));
        }
        let unit = self.metric.is_orthonormal();
        if unit {
            if let Some(out) = self.product_orthonormal_int(f, g) {
                return Ok(out);
            }
        }
        let mut acc = vec![Rational::zero(); 1usize << n];
        let diag = self.metric.is_diagonal();
        for (a, x) in f.terms() {
            for (b, y) in g.terms() {
                if diag {
                    let (blade, c) = self.blade_product_diag(*a, *b);
                    let slot = &mut acc[blade.mask() as usize];
                    if unit {
                        if c.is_one() {
                            *slot += x * y;
                        } else {
                            *slot -= x * y;
                        }
                    } else {
                        *slot += x * y * c;
                    }
                } else {
                    for (blade, c) in self.blade_product(*a, *b) {
                        acc[blade.mask() as usize] += x * y * c;
                    }
                }
            }
        }
        Ok(dense_to_form(n, acc))
    }

    /// Sign of `e^A ⋄ e^B = ± e^{A△B}` in an orthonormal coframe.
    fn orthonormal_sign(&self, a: Blade, b: Blade, negative: u16) -> i32 {
        let c = a.intersection(b);
        let (m, k) = (a.grade(), c.grade());
        let exp = k * (m - k) + k / 2 + (c.mask() & negative).count_ones() as usize;
        let s = if exp % 2 == 0 { 1 } else { -1 };
        s * removal_sign(a, c) * removal_sign(b, c) * wedge_sign(a.without(c), b.without(c))
    }

    /// Orthonormal product over integer numerators; `None` on overflow.
    fn product_orthonormal_int(&self, f: &Form, g: &Form) -> Option<Form> {
        let negative = (1..=self.dim())
            .filter(|&i| self.metric.g(i, i).is_negative())
            .fold(0u16, |m, i| m | Blade::basis(i).mask());
        bilinear_int(f, g, |a, b| {
            Some((Blade::from_mask(a.mask() ^ b.mask()), self.orthonormal_sign(a, b, negative)))
        })
    }

    /// Right-hand side of the reversed-order formula for `g ⋄ f`, with `f` an
    /// `m`-form, `g` an `r`-form and `m <= r`.
    pub fn reversed_rhs(&self, f: &Form, g: &Form) -> Result<Form> {
        self.check(f)?;
        self.check(g)?;
        let m = f.homogeneous_grade().ok_or_else(|| GrafError::NonHomogeneous(f.grades()))?;
        let r = g.homogeneous_grade().ok_or_else(|| GrafError::NonHomogeneous(g.grades()))?;
        let mut out = Form::zero(self.dim());
        for k in 0..=m {
            let exp = m * r + k * (m + 1 - k) + k / 2;
            let pref = rational::sign(if exp % 2 == 0 { 1 } else { -1 }) / rational::factorial(k);
            out += &self.metric.contracted_wedge(f, g, k)?.scale(&pref);
        }
        Ok(out)
    }

    /// Checks `g ⋄ f` against the reversed-order formula; requires homogeneous
    /// `f`, `g` with `grade(f) <= grade(g)` (zero forms count as any grade).
    pub fn reversed_check(&self, f: &Form, g: &Form) -> Result<bool> {
        let m = f.homogeneous_grade().ok_or_else(|| GrafError::NonHomogeneous(f.grades()))?;
        let r = g.homogeneous_grade().ok_or_else(|| GrafError::NonHomogeneous(g.grades()))?;
        if m > r && !f.is_zero() && !g.is_zero() {
            return Err(GrafError::Parse(format!(
                "reversed-order formula needs grade(f) <= grade(g), got {m} > {r}"
            )));
        }
        Ok(self.product(g, f)? == self.reversed_rhs(f, g)?)
    }

    /// `⋆f = f ⋄ v`.
    pub fn hodge(&self, f: &Form) -> Result<Form> {
        self.product(f, &self.volume.v)
    }

    /// Closed form of `⋆f` for a homogeneous `r`-form: `(1/r!) (-1)^⌊r/2⌋ f ∧_r v`.
    pub fn hodge_closed_form(&self, f: &Form) -> Result<Form> {
        let r = f.homogeneous_grade().ok_or_else(|| GrafError::NonHomogeneous(f.grades()))?;
        let pref = rational::sign(if (r / 2) % 2 == 0 { 1 } else { -1 }) / rational::factorial(r);
        Ok(self.metric.contracted_wedge(f, &self.volume.v, r)?.scale(&pref))
    }

    /// `P±(f) = ½(f ± ⋆f)`.
    pub fn projector(&self, f: &Form, sign: PmSign) -> Result<Form> {
        let star = self.hodge(f)?;
        let sum = match sign {
            PmSign::Plus => f + &star,
            PmSign::Minus => f - &star,
        };
        Ok(sum.scale(&rational::frac(1, 2)))
    }

    /// Split at `⌊n/2⌋`: grades `<= ⌊n/2⌋` go to `lower`.
    pub fn truncate(&self, f: &Form) -> TruncationSplit {
        let half = self.dim() / 2;
        TruncationSplit {
            lower: f.filter_grades(|k| k <= half),
            upper: f.filter_grades(|k| k > half),
        }
    }

    pub fn lower(&self, f: &Form) -> Form {
        self.truncate(f).lower
    }

    /// `f ◆± g = 2 P_L(P±(f) ⋄ P±(g))`.
    pub fn truncated_product(&self, f: &Form, g: &Form, sign: PmSign) -> Result<TruncatedProduct> {
        let pf = self.projector(f, sign)?;
        let pg = self.projector(g, sign)?;
        let prod = self.product(&pf, &pg)?;
        Ok(TruncatedProduct {
            value: self.lower(&prod).scale(&rational::int(2)),
            outside_regime: !in_truncation_regime(self.signature()),
        })
    }

    /// Shorthand for the value of `f ◆± g`.
    pub fn diamond(&self, f: &Form, g: &Form, sign: PmSign) -> Result<Form> {
        Ok(self.truncated_product(f, g, sign)?.value)
    }
}

fn dense_to_form(n: usize, acc: Vec<Rational>) -> Form {
    let terms = acc
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(m, c)| (Blade::from_mask(m as u16), c));
    Form::from_terms(n, terms).expect("masks below 2^n")
}
