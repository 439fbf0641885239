use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use graf_core::bilinear::{select_pairing, PairingJson, TableCheck};
use graf_core::classify::{self, Covariants12, Covariants90, Provenance};
use graf_core::exterior::MetricJson;
use graf_core::fierz::FierzContext;
use graf_core::graf::{in_truncation_regime, volume_square_sign};
use graf_core::matrixrep::{build_structure, clifford_relations_hold, commutant_dim, MainSubalgebra, RepJson};
use graf_core::rational::{self, Rational};
use graf_core::sample;
use graf_core::{AbsType, Form, GrafAlgebra, Metric, Pairing, PmSign, Rep, Signature, Spinor};

use crate::config::{read_json, CliError, CliResult, RunConfig};

/// A finished report plus whether every oracle-level check passed.
pub struct Outcome {
    pub report: Value,
    pub ok: bool,
}

fn outcome(report: impl Serialize, ok: bool) -> CliResult<Outcome> {
    let report = serde_json::to_value(report).map_err(|e| CliError::Failure(e.to_string()))?;
    Ok(Outcome { report, ok })
}

fn provenance(rep: &Rep, pairing: &Pairing, seed: u64) -> Provenance {
    Provenance {
        tool_version: graf_core::TOOL_VERSION.to_string(),
        signature: rep.signature().to_string(),
        metric: MetricJson::from_metric(rep.metric()),
        volume_sign: rep.volume_sign(),
        pairing_hash: pairing.gram_hash(),
        seed: Some(seed),
    }
}

fn build_rep(cfg: &RunConfig, sig: Signature) -> CliResult<Rep> {
    let metric = match &cfg.metric {
        Some(m) if m.signature() == sig => m.clone(),
        Some(m) => {
            return Err(CliError::Usage(format!(
                "--metric has signature {} but --signature is {sig}",
                m.signature()
            )))
        }
        None => Metric::orthonormal(sig),
    };
    Ok(Rep::build_with_metric(metric, cfg.volume_sign)?)
}

fn context(cfg: &RunConfig) -> CliResult<FierzContext> {
    cfg.require_orthonormal()?;
    let sig = cfg.require_signature()?;
    Ok(FierzContext::for_rep(build_rep(cfg, sig)?)?)
}

// ---------------------------------------------------------------------------
// check-algebra

#[derive(Serialize)]
struct PropertyResult {
    property: String,
    pass: bool,
    checked: usize,
    counterexample: Option<String>,
}

struct PropertyRun {
    results: Vec<PropertyResult>,
}

impl PropertyRun {
    /// Runs `f` on `0..count` and keeps the first failure message.
    fn run(&mut self, name: &str, count: usize, mut f: impl FnMut(usize) -> Result<(), String>) {
        let mut res = PropertyResult { property: name.into(), pass: true, checked: 0, counterexample: None };
        for i in 0..count {
            res.checked += 1;
            if let Err(msg) = f(i) {
                res.pass = false;
                res.counterexample = Some(msg);
                break;
            }
        }
        self.results.push(res);
    }
}

#[derive(Serialize)]
struct SignatureRow {
    provenance: Provenance,
    volume_square: String,
    expected_volume_square_sign: i32,
    in_truncation_regime: bool,
    properties: Vec<PropertyResult>,
}

#[derive(Serialize)]
struct AlgebraReport {
    tool_version: &'static str,
    seed: u64,
    trials: usize,
    pass: bool,
    signatures: Vec<SignatureRow>,
}

fn density(n: usize) -> f64 {
    match n {
        0..=5 => 0.6,
        6..=7 => 0.3,
        _ => 0.1,
    }
}

fn check_signature(cfg: &RunConfig, sig: Signature) -> CliResult<SignatureRow> {
    let rep = build_rep(cfg, sig)?;
    let structure = build_structure(&rep)?;
    let (pairing, _) = select_pairing(&rep, &structure)?;
    let alg = GrafAlgebra::new(rep.metric().clone());
    let n = sig.n();
    let mut rng = sample::rng(cfg.seed);
    let mut run = PropertyRun { results: Vec::new() };
    let e = |i: usize| Form::e(n, &[i]);

    run.run("clifford-relation", 1, |_| {
        for i in 1..=n {
            for j in 1..=n {
                let lhs = alg.product(&e(i), &e(j)).unwrap() + alg.product(&e(j), &e(i)).unwrap();
                if lhs != Form::scalar(n, rational::int(2) * alg.metric().g(i, j)) {
                    return Err(format!("e{i} e{j} + e{j} e{i} = {lhs}"));
                }
            }
        }
        Ok(())
    });
    run.run("generator-relations", 1, |_| {
        clifford_relations_hold(rep.generators(), rep.metric())
            .then_some(())
            .ok_or_else(|| "generators violate the Clifford relation".into())
    });
    run.run("associativity", cfg.trials, |_| {
        let f: Vec<Form> = (0..3).map(|_| sample::homogeneous_form(&mut rng, n, 5, density(n))).collect();
        let l = alg.product(&alg.product(&f[0], &f[1]).unwrap(), &f[2]).unwrap();
        let r = alg.product(&f[0], &alg.product(&f[1], &f[2]).unwrap()).unwrap();
        (l == r).then_some(()).ok_or_else(|| format!("({}) ({}) ({})", f[0], f[1], f[2]))
    });
    let expected = volume_square_sign(sig);
    let vsq = alg.volume().vsquare.clone();
    run.run("volume-square", 1, |_| {
        let sign = if vsq > Rational::from_integer(0.into()) { 1 } else { -1 };
        (sign == expected).then_some(()).ok_or_else(|| format!("v ⋄ v = {vsq}"))
    });
    let few = cfg.trials.min(20);
    if n % 2 == 1 {
        let v = alg.volume().v.clone();
        run.run("volume-centrality", few, |_| {
            let f = sample::form(&mut rng, n, 5, density(n));
            (alg.product(&f, &v).unwrap() == alg.product(&v, &f).unwrap())
                .then_some(())
                .ok_or_else(|| format!("f = {f}"))
        });
    }
    run.run("hodge-closed-form", few, |_| {
        let f = sample::homogeneous_form(&mut rng, n, 5, density(n));
        (alg.hodge(&f).unwrap() == alg.hodge_closed_form(&f).unwrap())
            .then_some(())
            .ok_or_else(|| format!("f = {f}"))
    });
    let regime = in_truncation_regime(sig) && rep.metric().is_orthonormal();
    if regime {
        run.run("truncated-model", few, |_| {
            let f = sample::form(&mut rng, n, 5, density(n));
            let g = sample::form(&mut rng, n, 5, density(n));
            for sign in [PmSign::Plus, PmSign::Minus] {
                let pf = alg.projector(&f, sign).unwrap();
                if alg.projector(&pf, sign).unwrap() != pf {
                    return Err(format!("projector not idempotent on {f}"));
                }
                if alg.projector(&alg.lower(&pf).scale(&rational::int(2)), sign).unwrap() != pf {
                    return Err(format!("lower half does not rebuild {pf}"));
                }
                let lhs = alg.projector(&alg.diamond(&f, &g, sign).unwrap(), sign).unwrap();
                let rhs = alg.product(&pf, &alg.projector(&g, sign).unwrap()).unwrap();
                if lhs != rhs {
                    return Err(format!("projector does not intertwine on ({f}, {g})"));
                }
            }
            Ok(())
        });
    }
    run.run("representation-homomorphism", few, |_| {
        let d = if n >= 8 { 0.03 } else { density(n) };
        let f = sample::form(&mut rng, n, 5, d);
        let g = sample::form(&mut rng, n, 5, d);
        let lhs = rep.lambda_form(&alg.product(&f, &g).unwrap()).unwrap();
        let rhs = rep.lambda_form(&f).unwrap().matmul(&rep.lambda_form(&g).unwrap());
        (lhs == rhs).then_some(()).ok_or_else(|| format!("({f}, {g})"))
    });
    Ok(SignatureRow {
        provenance: provenance(&rep, &pairing, cfg.seed),
        volume_square: rational::to_string(&vsq),
        expected_volume_square_sign: expected,
        in_truncation_regime: regime,
        properties: run.results,
    })
}

pub fn check_algebra(cfg: &RunConfig) -> CliResult<Outcome> {
    let sigs = match cfg.signature {
        Some(s) => vec![s],
        None => Signature::all_up_to(cfg.max_dim.min(9)),
    };
    let rows = sigs.into_iter().map(|s| check_signature(cfg, s)).collect::<CliResult<Vec<_>>>()?;
    let pass = rows.iter().all(|r| r.properties.iter().all(|p| p.pass));
    outcome(
        AlgebraReport { tool_version: graf_core::TOOL_VERSION, seed: cfg.seed, trials: cfg.trials, pass, signatures: rows },
        pass,
    )
}

// ---------------------------------------------------------------------------
// build-rep

#[derive(Serialize)]
struct StructureJson {
    case: graf_core::matrixrep::CaseTag,
    d: Option<Vec<Vec<String>>>,
    j: Option<Vec<Vec<String>>>,
    d_square: Option<i32>,
    h: Option<Vec<Vec<Vec<String>>>>,
}

#[derive(Serialize)]
struct PairingSummary {
    sigma: i32,
    tau: i32,
    pairing_hash: String,
}

#[derive(Serialize)]
struct RepReport {
    provenance: Provenance,
    abs_type: AbsType,
    commutant_dim: usize,
    representation: RepJson,
    structure: StructureJson,
    pairing: PairingJson,
    table_check: TableCheck,
    transpose_law: bool,
    admissible_pairings: Vec<PairingSummary>,
}

pub fn build_rep_cmd(cfg: &RunConfig) -> CliResult<Outcome> {
    let sig = cfg.require_signature()?;
    let rep = build_rep(cfg, sig)?;
    let structure = build_structure(&rep)?;
    let (pairing, all) = select_pairing(&rep, &structure)?;
    let st = match &structure {
        MainSubalgebra::Normal => StructureJson { case: structure.case(), d: None, j: None, d_square: None, h: None },
        MainSubalgebra::AlmostComplex { j, d, d_square } => StructureJson {
            case: structure.case(),
            d: Some(d.to_strings()),
            j: Some(j.to_strings()),
            d_square: Some(*d_square),
            h: None,
        },
        MainSubalgebra::Quaternionic { h } => StructureJson {
            case: structure.case(),
            d: None,
            j: None,
            d_square: None,
            h: Some(h.iter().map(|m| m.to_strings()).collect()),
        },
    };
    let table = pairing.table_check(&rep);
    let transpose_law = pairing.transpose_check(&rep);
    let ok = transpose_law;
    let report = RepReport {
        provenance: provenance(&rep, &pairing, cfg.seed),
        abs_type: rep.abs_type(),
        commutant_dim: commutant_dim(&rep),
        representation: rep.to_json(),
        structure: st,
        pairing: pairing.to_json(),
        table_check: table,
        transpose_law,
        admissible_pairings: all
            .iter()
            .map(|p| PairingSummary { sigma: p.sigma(), tau: p.tau(), pairing_hash: p.gram_hash() })
            .collect(),
    };
    outcome(report, ok)
}

// ---------------------------------------------------------------------------
// verify-fierz

#[derive(Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum Role {
    Oracle,
    Reported,
}

#[derive(Serialize)]
struct Failure {
    inputs: Vec<Spinor>,
    residuals: BTreeMap<usize, Form>,
}

#[derive(Serialize)]
struct IdentitySummary {
    id: String,
    role: Role,
    checked: usize,
    passed: usize,
    first_failure: Option<Failure>,
}

#[derive(Default)]
struct Tally {
    rows: Vec<IdentitySummary>,
}

impl Tally {
    fn record(&mut self, id: &str, role: Role, pass: bool, inputs: &[Spinor], residuals: &BTreeMap<usize, Form>) {
        let idx = match self.rows.iter().position(|r| r.id == id) {
            Some(i) => i,
            None => {
                self.rows.push(IdentitySummary { id: id.into(), role, checked: 0, passed: 0, first_failure: None });
                self.rows.len() - 1
            }
        };
        let row = &mut self.rows[idx];
        row.checked += 1;
        if pass {
            row.passed += 1;
        } else if row.first_failure.is_none() {
            row.first_failure = Some(Failure { inputs: inputs.to_vec(), residuals: residuals.clone() });
        }
    }

    fn oracle_pass(&self) -> bool {
        self.rows.iter().filter(|r| r.role == Role::Oracle).all(|r| r.passed == r.checked)
    }

    fn flagged(&self) -> Vec<String> {
        self.rows
            .iter()
            .filter(|r| r.role == Role::Reported && r.passed < r.checked)
            .map(|r| r.id.clone())
            .collect()
    }
}

#[derive(Serialize)]
struct FierzReport {
    provenance: Provenance,
    case: graf_core::matrixrep::CaseTag,
    trials: usize,
    majorana_projected: bool,
    oracle_pass: bool,
    flagged: Vec<String>,
    identities: Vec<IdentitySummary>,
}

pub fn verify_fierz(cfg: &RunConfig) -> CliResult<Outcome> {
    let ctx = context(cfg)?;
    let sig = ctx.rep.signature();
    let majorana = matches!(ctx.structure, MainSubalgebra::AlmostComplex { d_square: 1, .. });
    let mut rng = sample::rng(cfg.seed);
    let mut tally = Tally::default();
    let none = BTreeMap::new();
    for _ in 0..cfg.trials {
        let mut s: Vec<Spinor> = (0..4).map(|_| sample::spinor(&mut rng, ctx.dim(), sample::DEFAULT_BOX)).collect();
        if majorana {
            s = s.iter().map(|a| classify::majorana_project(&ctx, a)).collect::<Result<_, _>>()?;
        }
        let fund = ctx.fundamental_identity(&s[0], &s[1], &s[2], &s[3])?;
        tally.record("fundamental-identity", Role::Oracle, fund, &s, &none);
        let cov = ctx.covariant(&s[0], &s[1])?;
        let rec = ctx.reconstruct_check(&cov, &s[0], &s[1])?;
        tally.record("reconstruction", Role::Oracle, rec, &s[..2], &none);
        let v = ctx.check_fierz(&s[0], &s[1], &s[2], &s[3])?;
        for id in &v.identities {
            // The printed almost-complex forms are only guaranteed on Majorana inputs.
            let printed_complex = id.id.starts_with("complex-") && !id.id.ends_with("-operator");
            let role = if printed_complex && !majorana { Role::Reported } else { Role::Oracle };
            tally.record(&id.id, role, id.pass, &s, &id.residuals);
        }
        let a = &s[0];
        if sig == Signature::new(1, 2).unwrap() {
            let c = classify::covariants_12(&ctx, a)?;
            let r = classify::check_reduced_12(&ctx.algebra, &c, &c.b())?;
            for id in r.constraints.iter().chain(&r.grade_split) {
                tally.record(&id.id, Role::Reported, id.pass, std::slice::from_ref(a), &id.residuals);
            }
        } else if sig == Signature::new(9, 0).unwrap() {
            let c = classify::covariants_90(&ctx, a)?;
            let r = classify::check_reduced_90(&ctx.algebra, &c, &c.b())?;
            let one = std::slice::from_ref(a);
            tally.record(&r.lifted_identity.id, Role::Oracle, r.lifted_identity.pass, one, &r.lifted_identity.residuals);
            for id in [&r.unit_coefficient_identity, &r.truncation_lemma, &r.truncation_lemma_diamond]
                .into_iter()
                .chain(&r.reduced)
                .chain(&r.reduced_unit_coefficient)
            {
                tally.record(&id.id, Role::Reported, id.pass, one, &id.residuals);
            }
        }
    }
    let ok = tally.oracle_pass();
    let report = FierzReport {
        provenance: provenance(&ctx.rep, &ctx.pairing, cfg.seed),
        case: ctx.case(),
        trials: cfg.trials,
        majorana_projected: majorana,
        oracle_pass: ok,
        flagged: tally.flagged(),
        identities: tally.rows,
    };
    outcome(report, ok)
}

// ---------------------------------------------------------------------------
// classify

fn rational_of(v: &Value) -> CliResult<Rational> {
    match v {
        Value::String(s) => Ok(rational::parse(s)?),
        Value::Number(n) if n.is_i64() => Ok(rational::int(n.as_i64().unwrap())),
        other => Err(CliError::Usage(format!("expected an integer or a rational string, got {other}"))),
    }
}

pub fn parse_spinor(v: &Value) -> CliResult<Spinor> {
    let items = v
        .as_array()
        .ok_or_else(|| CliError::Usage("spinor file must hold a JSON array of rationals".into()))?;
    Ok(Spinor(items.iter().map(rational_of).collect::<CliResult<_>>()?))
}

fn parse_form(v: &Value, n: usize, key: &str) -> CliResult<Form> {
    match v {
        Value::Null => Ok(Form::zero(n)),
        Value::String(s) => Ok(Form::parse(n, s)?),
        Value::Array(_) => {
            let terms: Vec<graf_core::exterior::TermJson> = serde_json::from_value(v.clone()).map_err(|e| CliError::Usage(format!("{key}: {e}")))?;
            Ok(Form::from_json_terms(n, &terms)?)
        }
        other => Err(CliError::Usage(format!("{key}: expected a form, got {other}"))),
    }
}

fn checked_grade(f: Form, k: usize, key: &str) -> CliResult<Form> {
    if f.grades().iter().any(|&g| g != k) {
        return Err(CliError::Usage(format!("{key} must be a {k}-form, found grades {:?}", f.grades())));
    }
    Ok(f)
}

pub fn classify_cmd(cfg: &RunConfig, spinor: Option<&Path>, covariants: Option<&Path>, project: bool) -> CliResult<Outcome> {
    let ctx = context(cfg)?;
    let sig = ctx.rep.signature();
    let mut report = match (spinor, covariants) {
        (Some(path), None) => {
            let a = parse_spinor(&read_json(path)?)?;
            if a.dim() != ctx.dim() {
                return Err(CliError::Usage(format!("spinor has {} entries, the representation has dimension {}", a.dim(), ctx.dim())));
            }
            classify::classify_spinor(&ctx, &a, project)?
        }
        (None, Some(path)) => {
            let v = read_json(path)?;
            let get = |k: &str| v.get(k).cloned().unwrap_or(Value::Null);
            if sig == Signature::new(1, 2).unwrap() {
                let c = Covariants12 {
                    phi0: checked_grade(parse_form(&get("phi0"), 3, "phi0")?, 0, "phi0")?,
                    phi2: checked_grade(parse_form(&get("phi2"), 3, "phi2")?, 2, "phi2")?,
                };
                classify::report_12(&ctx, c, true)?
            } else if sig == Signature::new(9, 0).unwrap() {
                let c = Covariants90 {
                    psi0: checked_grade(parse_form(&get("psi0"), 9, "psi0")?, 0, "psi0")?,
                    psi1: checked_grade(parse_form(&get("psi1"), 9, "psi1")?, 1, "psi1")?,
                    psi4: checked_grade(parse_form(&get("psi4"), 9, "psi4")?, 4, "psi4")?,
                };
                classify::report_90(&ctx, c, true)?
            } else {
                return Err(CliError::Usage(format!("classification covers (1,2) and (9,0), not {sig}")));
            }
        }
        _ => return Err(CliError::Usage("pass exactly one of --spinor or --covariants".into())),
    };
    report.provenance.seed = Some(cfg.seed);
    outcome(report, true)
}

// ---------------------------------------------------------------------------
// census, appendix-check

pub fn census_cmd(cfg: &RunConfig) -> CliResult<Outcome> {
    cfg.require_orthonormal()?;
    let sig = cfg.require_signature()?;
    if cfg.volume_sign != 1 {
        return Err(CliError::Usage("the census uses the representation with volume sign +".into()));
    }
    let report = classify::census(sig, cfg.samples, cfg.seed, sample::DEFAULT_BOX)?;
    outcome(report, true)
}

pub fn appendix_cmd(cfg: &RunConfig) -> CliResult<Outcome> {
    cfg.require_orthonormal()?;
    if let Some(s) = cfg.signature {
        if s != Signature::new(9, 0).unwrap() {
            return Err(CliError::Usage(format!("appendix-check runs in (9,0), not {s}")));
        }
    }
    let report = classify::appendix_check(cfg.trials, cfg.seed)?;
    let ok = report.pass();
    outcome(report, ok)
}
