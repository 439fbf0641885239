use graf_core::classify::{self, Covariants12, Covariants90};
use graf_core::rational;
use graf_core::sample;
use graf_core::{Form, GrafError, Signature, Spinor};

fn sig(p: usize, q: usize) -> Signature {
    Signature::new(p, q).unwrap()
}

#[test]
fn majorana_projection_fixes_plus_and_kills_minus() {
    let c = classify::context_12().unwrap();
    let d = c.structure.d_matrix().unwrap().clone();
    let mut r = sample::rng(1);
    let a = sample::spinor(&mut r, 4, 5);
    let minus = a.add(&Spinor::apply(&d, &a).scale(&rational::int(-1))).scale(&rational::frac(1, 2));
    assert!(classify::majorana_project(&c, &minus).unwrap().is_zero());
    assert!(classify::majorana_project(&c, &Spinor::zeros(4)).unwrap().is_zero());
}

#[test]
fn skew_pairing_forces_vanishing_scalar() {
    let c = classify::context_12().unwrap();
    let mut r = sample::rng(2);
    for _ in 0..10 {
        let a = classify::majorana_project(&c, &sample::spinor(&mut r, 4, 5)).unwrap();
        assert!(classify::covariants_12(&c, &a).unwrap().phi0.is_zero());
    }
}

#[test]
fn injected_two_form_in_three_dimensions() {
    let c = classify::context_12().unwrap();
    let cov = Covariants12 { phi0: Form::zero(3), phi2: Form::e(3, &[1, 2]) };
    let v = classify::check_reduced_12(&c.algebra, &cov, &rational::int(0)).unwrap();
    let single = v.constraints.iter().find(|x| x.id == "two-form-single-contraction").unwrap();
    assert!(single.pass);
    // e^12 ∧₂ e^12 = 2 g^11 g^22 = -2 in signature (1,2), so it is not null.
    let double = v.constraints.iter().find(|x| x.id == "two-form-double-contraction").unwrap();
    assert!(!double.pass);
    assert!(matches!(classify::classify_12(&c.algebra, &cov), Err(GrafError::NotASpinor(_))));
}

#[test]
fn class_examples_in_three_dimensions() {
    let c = classify::context_12().unwrap();
    let zero = Covariants12 { phi0: Form::zero(3), phi2: Form::zero(3) };
    assert_eq!(classify::classify_12(&c.algebra, &zero).unwrap(), 1);
    // A null two-form: (e^12 + e^23) ∧₂ itself vanishes for g = diag(1,-1,-1).
    let null = Covariants12 { phi0: Form::zero(3), phi2: &Form::e(3, &[1, 2]) + &Form::e(3, &[2, 3]) };
    assert_eq!(classify::classify_12(&c.algebra, &null).unwrap(), 3);
}

#[test]
fn basis_pinor_in_nine_dimensions() {
    let c = classify::context_90().unwrap();
    let cov = classify::covariants_90(&c, &Spinor::basis(16, 0)).unwrap();
    assert_eq!(cov.b(), rational::int(1));
    let k = classify::classify_90(&c.algebra, &cov).unwrap();
    assert!([2, 3, 6, 8].contains(&k));
}

#[test]
fn injected_covariants_take_the_flagged_path() {
    let c = classify::context_90().unwrap();
    let genuine = classify::covariants_90(&c, &Spinor::basis(16, 3)).unwrap();
    let injected = Covariants90::from_lower(&genuine.sum()).unwrap();
    let report = classify::report_90(&c, injected, true).unwrap();
    assert!(report.injected);
    assert!(report.flagged());
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["constraints"]["flagged"], true);
    assert!(!json["constraints"]["unit_coefficient_identity"]["residuals"].as_object().unwrap().is_empty());
}

#[test]
fn all_zero_covariants_pass_everything() {
    let c = classify::context_90().unwrap();
    let z = Form::zero(9);
    let cov = Covariants90 { psi0: z.clone(), psi1: z.clone(), psi4: z };
    let v = classify::check_reduced_90(&c.algebra, &cov, &rational::int(0)).unwrap();
    assert!(v.oracle_pass() && v.unit_coefficient_identity.pass && !v.flagged);
    assert!(v.reduced.iter().chain(&v.reduced_unit_coefficient).all(|x| x.pass));
}

#[test]
fn scalar_only_covariants_are_not_a_pinor() {
    let c = classify::context_90().unwrap();
    let cov = Covariants90 { psi0: Form::scalar(9, rational::int(3)), psi1: Form::zero(9), psi4: Form::zero(9) };
    let v = classify::check_reduced_90(&c.algebra, &cov, &cov.b()).unwrap();
    assert!(!v.oracle_pass());
    assert!(matches!(classify::classify_90(&c.algebra, &cov), Err(GrafError::NotAPinor(_))));
}

#[test]
fn stray_grades_are_rejected_on_injection() {
    assert!(Covariants90::from_lower(&Form::e(9, &[1, 2])).is_err());
}

#[test]
fn census_edge_cases() {
    let empty = classify::census(sig(9, 0), 0, 1, 5).unwrap();
    assert!(empty.populations.iter().all(|p| p.total() == 0 && p.populated().is_empty()));
    assert!(classify::census(sig(2, 1), 10, 1, 5).is_err());
    let small = classify::census(sig(1, 2), 50, 3, 5).unwrap();
    assert!(small.populations.len() >= 2);
    assert!(small.primary().table_match);
    for p in &small.populations {
        assert_eq!(p.total(), 50);
    }
    assert_eq!(small.provenance.seed, Some(3));
    assert_eq!(small.provenance.pairing_hash.len(), 64);
}

#[test]
fn appendix_edge_cases() {
    let none = classify::appendix_check(0, 1).unwrap();
    assert!(none.pass());
    let some = classify::appendix_check(5, 2).unwrap();
    assert!(some.pass(), "{:?}", some.expansions.iter().filter(|e| !e.pass()).collect::<Vec<_>>());
}

#[test]
fn wrong_signature_is_refused() {
    let c = graf_core::fierz::FierzContext::for_rep(graf_core::Rep::build(sig(2, 1), 1).unwrap()).unwrap();
    assert!(classify::covariants_90(&c, &Spinor::zeros(c.dim())).is_err());
    assert!(classify::covariants_12(&c, &Spinor::zeros(c.dim())).is_err());
}
