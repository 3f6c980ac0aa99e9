//! End-to-end analyses of the bundled three-compartment structures.

mod common;

use sgi_core::algebra::groebner::parametric_reduce;
use sgi_core::algebra::{parse_poly, sym, TermOrder};
use sgi_core::classify::Verdict;
use sgi_core::invariants::{collect_invariants, identifiability_eqn_list, theta_prime_creation, InvariantError, NamingMode};
use sgi_core::service::{run_analysis, AnalysisOptions, AnalysisRequest, Stage};
use sgi_core::solver::{jacobian_rank_oracle, solve_generic, GenericCount, SymbolicStatus, UnknownStatus, DEFAULT_SEEDS};
use sgi_core::structures::{parse_structure, StructureSpec};
use sgi_core::transfer::{build_transfer_matrix, default_sort_order, process_matrix};

fn analyze(req: &AnalysisRequest) -> sgi_core::service::AnalysisResult {
    run_analysis(req, &AnalysisOptions::default())
}

#[test]
fn parent_is_unidentifiable_with_unique_k01() {
    let r = analyze(&AnalysisRequest::for_example("parent"));
    let c = &r.classification;
    assert_eq!(c.verdict, Verdict::Su);
    assert_eq!(c.status_of(&sym("k01")), Some(UnknownStatus::Unique));
    assert!(c.rationale.parameters.iter().any(|p| p.status == UnknownStatus::Free));
    let sol = r.solution.value().unwrap();
    assert_eq!(sol.generic_dimension, 1);
    assert_eq!(sol.symbolic, SymbolicStatus::Complete);
    let order = TermOrder::lex(&sol.unknowns);
    let relation = parse_poly("C1*X20 - c1*x20").unwrap();
    assert!(parametric_reduce(&relation, &sol.symbolic_basis, &order).unwrap().is_zero());
    // A relation that does not hold must not reduce to zero.
    let wrong = parse_poly("C1*X20 - c2*x20").unwrap();
    assert!(!parametric_reduce(&wrong, &sol.symbolic_basis, &order).unwrap().is_zero());
}

#[test]
fn unit_gain_on_compartment_one_is_globally_identifiable() {
    let r = analyze(&AnalysisRequest::for_example("parent").with_edits(&["C[1][1]=1"]));
    assert_eq!(r.classification.verdict, Verdict::Sgi);
    assert!(r.classification.rationale.parameters.iter().all(|p| p.status == UnknownStatus::Unique));
}

#[test]
fn two_unit_gains_are_locally_identifiable() {
    let r = analyze(&AnalysisRequest::for_example("parent_sli"));
    assert_eq!(r.classification.verdict, Verdict::Sli);
    let sol = r.solution.value().unwrap();
    assert_eq!(sol.generic_count, GenericCount::Finite(2));
    assert_eq!(sol.branches.len(), 2);
    assert_eq!(r.classification.status_of(&sym("k12")), Some(UnknownStatus::Unique));
    assert_eq!(r.classification.status_of(&sym("k01")), Some(UnknownStatus::FinitelyMany));
}

#[test]
fn analysis_is_byte_identical_across_runs() {
    for name in ["parent", "parent_sli", "one_compartment"] {
        let req = AnalysisRequest::for_example(name);
        assert_eq!(analyze(&req).to_json(), analyze(&req).to_json(), "{name}");
    }
}

fn equations_for(spec: &StructureSpec, mode: NamingMode) -> Option<(sgi_core::invariants::TestEquations, sgi_core::invariants::ParameterRenaming)> {
    let tm = process_matrix(&build_transfer_matrix(spec), true, &default_sort_order(spec)).unwrap();
    let inv = match collect_invariants(&tm) {
        Ok(i) => i,
        Err(InvariantError::NoInvariants) => return None,
        Err(e) => panic!("{e}"),
    };
    let ren = theta_prime_creation(&spec.parameters, mode, &[]).unwrap();
    match identifiability_eqn_list(&inv, &ren) {
        Ok(eqs) => Some((eqs, ren)),
        Err(InvariantError::NoInvariants) => None,
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn true_parameters_satisfy_every_equation() {
    let mut specs: Vec<StructureSpec> = ["parent", "parent_c1", "parent_sli", "one_compartment"]
        .iter()
        .map(|n| parse_structure(sgi_core::service::example(n).unwrap().as_bytes()).unwrap())
        .collect();
    specs.extend((0..10).map(|s| common::random_structure(100 + s, 3)));
    for spec in &specs {
        for mode in [NamingMode::Caps, NamingMode::Underscore] {
            let Some((eqs, ren)) = equations_for(spec, mode) else { continue };
            for e in &eqs.equations {
                assert!(ren.unprime(e).is_zero(), "{e}");
            }
        }
    }
}

fn nullity_matches_dimension(spec: &StructureSpec) -> (usize, usize) {
    let tm = process_matrix(&build_transfer_matrix(spec), true, &default_sort_order(spec)).unwrap();
    let p = spec.parameters.len();
    let inv = match collect_invariants(&tm) {
        Ok(i) => i,
        Err(_) => return (p, p),
    };
    let nullity = jacobian_rank_oracle(&inv, &spec.parameters, 7).nullity;
    let ren = theta_prime_creation(&spec.parameters, NamingMode::Caps, &[]).unwrap();
    let Ok(eqs) = identifiability_eqn_list(&inv, &ren) else { return (nullity, p) };
    let dim = solve_generic(&eqs, &DEFAULT_SEEDS).unwrap().generic_dimension;
    (nullity, dim)
}

#[test]
fn jacobian_nullity_equals_generic_dimension() {
    for name in ["parent", "parent_c1", "parent_sli", "one_compartment"] {
        let spec = parse_structure(sgi_core::service::example(name).unwrap().as_bytes()).unwrap();
        let (nullity, dim) = nullity_matches_dimension(&spec);
        assert_eq!(nullity, dim, "{name}");
    }
    for seed in 0..10 {
        let spec = common::random_structure(500 + seed, 2);
        let (nullity, dim) = nullity_matches_dimension(&spec);
        assert_eq!(nullity, dim, "random structure {seed}: {}", spec.to_json());
    }
}

#[test]
fn malformed_structure_fails_at_the_structure_stage() {
    let req = AnalysisRequest { spec: Some(serde_json::json!({"n": 2})), ..AnalysisRequest::for_example("") };
    let req = AnalysisRequest { example: None, ..req };
    let r = analyze(&req);
    assert!(matches!(r.structure, Stage::Failed { stage: "structure", .. }));
    assert_eq!(r.classification.verdict, Verdict::Unknown);
}
