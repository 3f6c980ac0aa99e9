//! Verdicts: SGI, SLI, SU or unknown, with per-parameter statuses.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::algebra::{BranchValue, GenericPoint, Rational, Symbol};
use crate::invariants::ParameterRenaming;
use crate::solver::{GenericCount, SolutionSet, SymbolicStatus, UnknownStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "SGI")]
    Sgi,
    #[serde(rename = "SLI")]
    Sli,
    #[serde(rename = "SU")]
    Su,
    #[serde(rename = "unknown")]
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Sgi => "SGI",
            Verdict::Sli => "SLI",
            Verdict::Su => "SU",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParameterStatus {
    pub parameter: Symbol,
    pub primed: Symbol,
    pub status: UnknownStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatusSource {
    Branches,
    GenericPoint,
    NoInvariants,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rationale {
    pub dimension: Option<usize>,
    pub count: Option<GenericCount>,
    pub free_unknowns: Vec<Symbol>,
    pub parameters: Vec<ParameterStatus>,
    pub status_source: Option<StatusSource>,
    /// Why no verdict could be reached.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// How the symbolic branches fare against `theta' >= 0` at a positive
/// generic point. Reported alongside the verdict; it never changes it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PositivityNote {
    pub seed: u64,
    pub branches_total: usize,
    /// 1-based indices of branches with every value non-negative.
    pub branches_in_orthant: Vec<usize>,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub rationale: Rationale,
    pub positivity_note: Option<PositivityNote>,
}

impl Classification {
    /// The verdict when no solution set is available.
    pub fn unknown(reason: impl Into<String>) -> Self {
        Classification {
            verdict: Verdict::Unknown,
            rationale: Rationale {
                dimension: None,
                count: None,
                free_unknowns: Vec::new(),
                parameters: Vec::new(),
                status_source: None,
                reason: Some(reason.into()),
            },
            positivity_note: None,
        }
    }

    /// An output that carries no parameter information: every parameter is free.
    pub fn no_invariants(ren: &ParameterRenaming) -> Self {
        let parameters: Vec<ParameterStatus> = ren
            .theta
            .iter()
            .zip(&ren.theta_prime)
            .map(|(t, tp)| ParameterStatus { parameter: t.clone(), primed: tp.clone(), status: UnknownStatus::Free })
            .collect();
        let p = parameters.len();
        Classification {
            verdict: if p == 0 { Verdict::Sgi } else { Verdict::Su },
            rationale: Rationale {
                dimension: Some(p),
                count: Some(if p == 0 { GenericCount::Finite(1) } else { GenericCount::Infinite }),
                free_unknowns: ren.theta_prime.clone(),
                parameters,
                status_source: Some(StatusSource::NoInvariants),
                reason: None,
            },
            positivity_note: None,
        }
    }

    pub fn status_of(&self, parameter: &Symbol) -> Option<UnknownStatus> {
        self.rationale.parameters.iter().find(|s| &s.parameter == parameter).map(|s| s.status)
    }
}

fn verdict_for(dimension: usize, count: GenericCount) -> Verdict {
    match (dimension, count) {
        (0, GenericCount::Finite(1)) => Verdict::Sgi,
        (0, GenericCount::Finite(_)) => Verdict::Sli,
        (0, GenericCount::Infinite) => Verdict::Unknown,
        _ => Verdict::Su,
    }
}

/// Status of one unknown read off the symbolic branches: free if any branch
/// leaves it free or ties it to a free unknown, unique if every branch gives
/// the same expression, finitely-many otherwise.
fn branch_status(sol: &SolutionSet, unknown: &Symbol) -> Option<UnknownStatus> {
    let mut exprs = Vec::new();
    for b in &sol.branches {
        match b.get(unknown)? {
            BranchValue::Free => return Some(UnknownStatus::Free),
            BranchValue::Expr(r) => {
                if r.symbols().iter().any(|s| sol.unknowns.contains(s)) {
                    return Some(UnknownStatus::Free);
                }
                exprs.push(r);
            }
        }
    }
    let first = exprs.first()?;
    Some(if exprs.iter().all(|r| r.equals(first)) { UnknownStatus::Unique } else { UnknownStatus::FinitelyMany })
}

pub fn classify_solutions(sol: &SolutionSet, ren: &ParameterRenaming) -> Classification {
    let verdict = verdict_for(sol.generic_dimension, sol.generic_count);
    let use_branches = sol.symbolic == SymbolicStatus::Complete && !sol.branches.is_empty();
    let mut parameters = Vec::with_capacity(ren.theta.len());
    let mut from_branches = use_branches;
    for (t, tp) in ren.theta.iter().zip(&ren.theta_prime) {
        let generic = sol.status_of(tp).unwrap_or(UnknownStatus::Free);
        let status = if use_branches {
            branch_status(sol, tp).unwrap_or_else(|| {
                from_branches = false;
                generic
            })
        } else {
            generic
        };
        parameters.push(ParameterStatus { parameter: t.clone(), primed: tp.clone(), status });
    }
    Classification {
        verdict,
        rationale: Rationale {
            dimension: Some(sol.generic_dimension),
            count: Some(sol.generic_count),
            free_unknowns: sol.free_unknowns.clone(),
            parameters,
            status_source: Some(if from_branches { StatusSource::Branches } else { StatusSource::GenericPoint }),
            reason: sol.disagreement.clone(),
        },
        positivity_note: None,
    }
}

/// Evaluates each symbolic branch at a positive generic point (parameters
/// and free unknowns alike) and records which branches stay in the
/// non-negative orthant.
pub fn positivity_note(sol: &SolutionSet, ren: &ParameterRenaming, seed: u64) -> PositivityNote {
    if sol.branches.is_empty() {
        return PositivityNote {
            seed,
            branches_total: 0,
            branches_in_orthant: Vec::new(),
            summary: "no symbolic branches to check".into(),
        };
    }
    let symbols: Vec<Symbol> = ren.theta.iter().chain(&ren.theta_prime).cloned().collect();
    let point = GenericPoint::new(&symbols, seed);
    let zero = Rational::from_integer(0.into());
    let mut inside = Vec::new();
    for (i, b) in sol.branches.iter().enumerate() {
        let mut values: BTreeMap<Symbol, Rational> = point.assignment.clone();
        // Free unknowns keep their generic value; others are overwritten in order.
        let mut ok = true;
        for (u, v) in b.values.iter().rev() {
            if let BranchValue::Expr(r) = v {
                match r.eval_rational(&values) {
                    Ok(x) => {
                        ok &= x >= zero;
                        values.insert(u.clone(), x);
                    }
                    Err(_) => ok = false,
                }
            }
        }
        if ok {
            inside.push(i + 1);
        }
    }
    let total = sol.branches.len();
    let summary = format!("{} of {} branches lie in the non-negative orthant", inside.len(), total);
    PositivityNote { seed, branches_total: total, branches_in_orthant: inside, summary }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, sym, Branch, RatFunc};
    use crate::invariants::{theta_prime_creation, NamingMode};
    use crate::solver::SymbolicStatus;

    fn solution(dim: usize, count: GenericCount, status: Vec<UnknownStatus>, unknowns: &[&str]) -> SolutionSet {
        SolutionSet {
            unknowns: unknowns.iter().map(|u| sym(u)).collect(),
            generic_dimension: dim,
            generic_count: count,
            count_with_multiplicity: None,
            free_unknowns: Vec::new(),
            generic_status: status,
            branches: Vec::new(),
            relation_certificates: Vec::new(),
            seeds_used: vec![1, 2, 3],
            seed_reports: Vec::new(),
            disagreement: None,
            symbolic: SymbolicStatus::NotAttempted,
            symbolic_basis: Vec::new(),
        }
    }

    fn ren(theta: &[&str]) -> ParameterRenaming {
        let t: Vec<Symbol> = theta.iter().map(|s| sym(s)).collect();
        theta_prime_creation(&t, NamingMode::Caps, &[]).unwrap()
    }

    fn expr(s: &str) -> BranchValue {
        BranchValue::Expr(RatFunc::from_poly(parse_poly(s).unwrap()))
    }

    #[test]
    fn verdict_table() {
        use UnknownStatus::*;
        let r = ren(&["k"]);
        let c = classify_solutions(&solution(0, GenericCount::Finite(1), vec![Unique], &["K"]), &r);
        assert_eq!(c.verdict, Verdict::Sgi);
        let c = classify_solutions(&solution(0, GenericCount::Finite(2), vec![FinitelyMany], &["K"]), &r);
        assert_eq!(c.verdict, Verdict::Sli);
        let c = classify_solutions(&solution(1, GenericCount::Infinite, vec![Free], &["K"]), &r);
        assert_eq!(c.verdict, Verdict::Su);
        assert_eq!(c.status_of(&sym("k")), Some(Free));
        assert_eq!(c.rationale.status_source, Some(StatusSource::GenericPoint));
        assert_eq!(Classification::unknown("seeds disagree").verdict, Verdict::Unknown);
    }

    #[test]
    fn statuses_from_branches() {
        use UnknownStatus::*;
        let r = ren(&["k", "m", "c", "x"]);
        let mut sol = solution(1, GenericCount::Infinite, vec![Unique, FinitelyMany, Free, Free], &["K", "M", "C", "X"]);
        let c_val = BranchValue::Expr(RatFunc::new(parse_poly("c*x").unwrap(), parse_poly("X").unwrap()).unwrap());
        sol.branches = vec![
            Branch { values: vec![(sym("K"), expr("k")), (sym("M"), expr("m")), (sym("C"), c_val.clone()), (sym("X"), BranchValue::Free)] },
            Branch { values: vec![(sym("K"), expr("k")), (sym("M"), expr("k - m")), (sym("C"), c_val), (sym("X"), BranchValue::Free)] },
        ];
        sol.symbolic = SymbolicStatus::Complete;
        let c = classify_solutions(&sol, &r);
        assert_eq!(c.rationale.status_source, Some(StatusSource::Branches));
        let got: Vec<UnknownStatus> = c.rationale.parameters.iter().map(|p| p.status).collect();
        assert_eq!(got, vec![Unique, FinitelyMany, Free, Free]);
        assert_eq!(c.verdict, Verdict::Su);
    }

    #[test]
    fn empty_invariants_make_everything_free() {
        let c = Classification::no_invariants(&ren(&["k", "c"]));
        assert_eq!(c.verdict, Verdict::Su);
        assert!(c.rationale.parameters.iter().all(|p| p.status == UnknownStatus::Free));
    }

    #[test]
    fn positivity_counts_branches() {
        let r = ren(&["a", "b"]);
        let mut sol = solution(0, GenericCount::Finite(2), vec![], &["A", "B"]);
        sol.branches = vec![
            Branch { values: vec![(sym("A"), expr("a")), (sym("B"), expr("b"))] },
            // a - b - 10^7 is negative for values in [1, 10^6].
            Branch { values: vec![(sym("A"), expr("a - b - 10000000")), (sym("B"), expr("b"))] },
        ];
        let note = positivity_note(&sol, &r, 1);
        assert_eq!(note.branches_total, 2);
        assert_eq!(note.branches_in_orthant, vec![1]);
        let empty = solution(1, GenericCount::Infinite, vec![], &["A"]);
        assert_eq!(positivity_note(&empty, &r, 1).branches_total, 0);
    }

    proptest::proptest! {
        #[test]
        fn exactly_one_verdict(dim in 0usize..4, count in proptest::option::of(1usize..5)) {
            let count = count.map_or(GenericCount::Infinite, GenericCount::Finite);
            let v = verdict_for(dim, count);
            let sgi = dim == 0 && count == GenericCount::Finite(1);
            let sli = dim == 0 && matches!(count, GenericCount::Finite(n) if n > 1);
            let su = dim > 0;
            proptest::prop_assert_eq!(v == Verdict::Sgi, sgi);
            proptest::prop_assert_eq!(v == Verdict::Sli, sli);
            proptest::prop_assert_eq!(v == Verdict::Su, su);
            proptest::prop_assert_eq!(v == Verdict::Unknown, !(sgi || sli || su));
        }
    }
}
