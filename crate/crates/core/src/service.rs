//! The full pipeline behind the CLI and the HTTP API: request in, one
//! self-describing result out. Every stage either succeeds, fails with its
//! name and message, or is skipped because an earlier stage failed.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::Symbol;
use crate::classify::{classify_solutions, positivity_note, Classification};
use crate::invariants::{
    collect_invariants, identifiability_eqn_list, theta_prime_creation, InvariantError, InvariantSet, NamingMode,
    ParameterRenaming, TestEquations,
};
use crate::report::{render_report, Report, DEFAULT_LAYOUT};
use crate::solver::{attach_symbolic, solve_generic_until, SolutionSet, SolverError, SymbolicOptions, DEFAULT_SEEDS};
use crate::structures::{apply_edits, parse_structure, validate_compartmental, DesignEdit, StructureError, StructureSpec, ValidationReport};
use crate::transfer::{build_transfer_matrix, default_sort_order, process_matrix, TransferMatrix};

/// Bundled example structures, by name.
pub const EXAMPLES: [(&str, &str); 4] = [
    ("parent", include_str!("../../../specs/parent.json")),
    ("parent_c1", include_str!("../../../specs/parent_c1.json")),
    ("parent_sli", include_str!("../../../specs/parent_sli.json")),
    ("one_compartment", include_str!("../../../specs/one_compartment.json")),
];

pub fn example(name: &str) -> Option<&'static str> {
    EXAMPLES.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisRequest {
    /// Inline structure document. Exactly one of `spec` and `example`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<serde_json::Value>,
    /// Name of a bundled example.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example: Option<String>,
    /// Edits in `coord=expr` form, applied in order.
    #[serde(default)]
    pub edits: Vec<String>,
    #[serde(default = "default_true")]
    pub canonical_form: bool,
    #[serde(default)]
    pub naming_mode: NamingMode,
    #[serde(default)]
    pub layout_hint: Option<String>,
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub positivity_filter: bool,
    /// Wall-clock timings make results differ between runs; off by default.
    #[serde(default)]
    pub include_timings: bool,
}

impl AnalysisRequest {
    pub fn for_example(name: &str) -> Self {
        AnalysisRequest {
            spec: None,
            example: Some(name.into()),
            edits: Vec::new(),
            canonical_form: true,
            naming_mode: NamingMode::default(),
            layout_hint: None,
            seeds: None,
            positivity_filter: false,
            include_timings: false,
        }
    }

    pub fn for_spec(spec: &StructureSpec) -> Self {
        AnalysisRequest { spec: Some(spec.to_value()), example: None, ..Self::for_example("") }
    }

    pub fn with_edits(mut self, edits: &[&str]) -> Self {
        self.edits = edits.iter().map(|e| e.to_string()).collect();
        self
    }

    /// The structure to analyze: the base document with edits applied.
    pub fn resolve(&self) -> Result<StructureSpec, RequestError> {
        let base = match (&self.spec, &self.example) {
            (Some(v), None) => parse_structure(v.to_string().as_bytes()).map_err(RequestError::Structure)?,
            (None, Some(name)) => {
                let text = example(name).ok_or_else(|| RequestError::UnknownExample(name.clone()))?;
                parse_structure(text.as_bytes()).map_err(RequestError::Structure)?
            }
            _ => return Err(RequestError::SpecSource),
        };
        let edits: Vec<DesignEdit> =
            self.edits.iter().map(|e| e.parse()).collect::<Result<_, _>>().map_err(RequestError::Edit)?;
        let spec = apply_edits(&base, &edits).map_err(RequestError::Edit)?;
        if let Some(seeds) = &self.seeds {
            if seeds.is_empty() {
                return Err(RequestError::NoSeeds);
            }
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RequestError {
    #[error("give exactly one of `spec` and `example`")]
    SpecSource,
    #[error("no bundled example named {0:?}")]
    UnknownExample(String),
    #[error("structure: {0}")]
    Structure(StructureError),
    #[error("edits: {0}")]
    Edit(StructureError),
    #[error("seeds: the list must not be empty")]
    NoSeeds,
}

impl RequestError {
    pub fn stage(&self) -> &'static str {
        match self {
            RequestError::SpecSource | RequestError::UnknownExample(_) | RequestError::NoSeeds => "request",
            RequestError::Structure(_) => "structure",
            RequestError::Edit(_) => "edits",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Stage<T> {
    Ok { value: T },
    Failed { stage: &'static str, error: String },
    Skipped { reason: String },
}

impl<T> Stage<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            Stage::Ok { value } => Some(value),
            _ => None,
        }
    }

    fn skipped_after(stage: &str) -> Self {
        Stage::Skipped { reason: format!("{stage} did not complete") }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub transfer_ms: f64,
    pub invariants_ms: f64,
    pub generic_solve_ms: f64,
    pub symbolic_solve_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisResult {
    pub request: AnalysisRequest,
    pub structure: Stage<serde_json::Value>,
    pub validation: Stage<ValidationReport>,
    pub transfer_matrix: Stage<TransferMatrix>,
    pub invariants: Stage<InvariantSet>,
    pub renaming: Stage<ParameterRenaming>,
    pub equations: Stage<TestEquations>,
    pub solution: Stage<SolutionSet>,
    pub classification: Classification,
    pub report: Stage<Report>,
    /// Set when the time budget ran out before the verdict was reached.
    pub timed_out: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl AnalysisResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes") + "\n"
    }

    /// Text report, or the first failure when no report was produced.
    pub fn to_text(&self) -> String {
        match &self.report {
            Stage::Ok { value } => value.to_text(),
            _ => format!("analysis failed\n\nverdict: {}\n", self.classification.verdict),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    /// Budget for the whole request.
    pub timeout: Duration,
    pub symbolic_max_unknowns: usize,
    /// Step limit for the symbolic solve; `None` leaves only the time budget.
    pub symbolic_max_steps: Option<u64>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        let symbolic = SymbolicOptions::default();
        AnalysisOptions {
            timeout: DEFAULT_TIMEOUT,
            symbolic_max_unknowns: symbolic.max_unknowns,
            symbolic_max_steps: symbolic.max_steps,
        }
    }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1000.0
}

/// Runs every stage in order. A request that does not resolve still yields
/// a result, with the failure recorded under `structure`.
pub fn run_analysis(req: &AnalysisRequest, options: &AnalysisOptions) -> AnalysisResult {
    let start = Instant::now();
    let deadline = start + options.timeout;
    let mut timings = Timings::default();
    let mut result = AnalysisResult {
        request: req.clone(),
        structure: Stage::skipped_after("request"),
        validation: Stage::skipped_after("structure"),
        transfer_matrix: Stage::skipped_after("structure"),
        invariants: Stage::skipped_after("transfer"),
        renaming: Stage::skipped_after("structure"),
        equations: Stage::skipped_after("invariants"),
        solution: Stage::skipped_after("equations"),
        classification: Classification::unknown("analysis did not reach classification"),
        report: Stage::skipped_after("structure"),
        timed_out: false,
        timings: None,
    };
    let spec = match req.resolve() {
        Ok(s) => s,
        Err(e) => {
            result.structure = Stage::Failed { stage: e.stage(), error: e.to_string() };
            result.classification = Classification::unknown(e.to_string());
            return result;
        }
    };
    result.structure = Stage::Ok { value: spec.to_value() };
    result.validation = if spec.compartmental {
        Stage::Ok { value: validate_compartmental(&spec) }
    } else {
        Stage::Skipped { reason: "structure is not declared compartmental".into() }
    };

    let t = Instant::now();
    let tm = build_transfer_matrix(&spec);
    let processed = process_matrix(&tm, req.canonical_form, &default_sort_order(&spec));
    timings.transfer_ms = ms(t);
    let processed = match processed {
        Ok(p) => {
            result.transfer_matrix = Stage::Ok { value: p.clone() };
            Some(p)
        }
        Err(e) => {
            result.transfer_matrix = Stage::Failed { stage: "transfer", error: e.to_string() };
            None
        }
    };

    let mut reserved: Vec<Symbol> = spec.constants.clone();
    reserved.push(TransferMatrix::laplace());
    let renaming = match theta_prime_creation(&spec.parameters, req.naming_mode, &reserved) {
        Ok(r) => {
            result.renaming = Stage::Ok { value: r.clone() };
            Some(r)
        }
        Err(e) => {
            result.renaming = Stage::Failed { stage: "renaming", error: e.to_string() };
            None
        }
    };

    let t = Instant::now();
    let inv = processed.as_ref().map(collect_invariants);
    let inv = match inv {
        Some(Ok(i)) => {
            result.invariants = Stage::Ok { value: i.clone() };
            Some(i)
        }
        Some(Err(e)) => {
            result.invariants = Stage::Failed { stage: "invariants", error: e.to_string() };
            None
        }
        None => None,
    };

    let mut solution: Option<SolutionSet> = None;
    let mut solver_failure: Option<String> = None;
    if let (Some(inv), Some(ren)) = (&inv, &renaming) {
        match identifiability_eqn_list(inv, ren) {
            Ok(eqs) => {
                timings.invariants_ms = ms(t);
                result.equations = Stage::Ok { value: eqs.clone() };
                let seeds = req.seeds.clone().unwrap_or_else(|| DEFAULT_SEEDS.to_vec());
                let t = Instant::now();
                let generic = solve_generic_until(&eqs, &seeds, Some(deadline));
                timings.generic_solve_ms = ms(t);
                match generic {
                    Ok(mut sol) => {
                        let remaining = deadline.saturating_duration_since(Instant::now());
                        let t = Instant::now();
                        let opts = SymbolicOptions {
                            max_unknowns: options.symbolic_max_unknowns,
                            timeout: remaining,
                            max_steps: options.symbolic_max_steps,
                        };
                        attach_symbolic(&mut sol, &eqs, &opts);
                        timings.symbolic_solve_ms = ms(t);
                        let mut c = classify_solutions(&sol, ren);
                        if req.positivity_filter {
                            c.positivity_note = Some(positivity_note(&sol, ren, seeds[0]));
                        }
                        result.classification = c;
                        result.solution = Stage::Ok { value: sol.clone() };
                        solution = Some(sol);
                    }
                    Err(e) => {
                        result.timed_out = e == SolverError::Timeout;
                        let msg = e.to_string();
                        result.classification = Classification::unknown(msg.clone());
                        result.solution = Stage::Failed { stage: "solver", error: msg.clone() };
                        solver_failure = Some(msg);
                    }
                }
            }
            Err(InvariantError::NoInvariants) => {
                result.equations = Stage::Failed { stage: "equations", error: InvariantError::NoInvariants.to_string() };
                result.solution = Stage::Skipped { reason: "no invariants: every parameter is free".into() };
                result.classification = Classification::no_invariants(ren);
                solver_failure = Some(InvariantError::NoInvariants.to_string());
            }
            Err(e) => {
                result.equations = Stage::Failed { stage: "equations", error: e.to_string() };
                result.classification = Classification::unknown(e.to_string());
            }
        }
    } else {
        let why = match (&result.transfer_matrix, &result.renaming) {
            (Stage::Failed { error, .. }, _) | (_, Stage::Failed { error, .. }) => error.clone(),
            _ => "an earlier stage failed".into(),
        };
        result.classification = Classification::unknown(why);
    }

    let layout = req.layout_hint.as_deref().unwrap_or(DEFAULT_LAYOUT);
    result.report = match &renaming {
        Some(ren) => {
            let sol = match (&solution, &solver_failure) {
                (Some(s), _) => Ok(s),
                (None, Some(why)) => Err(why.as_str()),
                (None, None) => Err("an earlier stage failed"),
            };
            Stage::Ok { value: render_report(&spec, ren, sol, &result.classification, layout) }
        }
        None => Stage::skipped_after("renaming"),
    };
    timings.total_ms = ms(start);
    if req.include_timings {
        result.timings = Some(timings);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::Verdict;

    #[test]
    fn bundled_examples_parse() {
        for (name, text) in EXAMPLES {
            let spec = parse_structure(text.as_bytes()).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(spec.to_json(), text, "{name} is not in canonical form");
        }
        assert!(example("nope").is_none());
    }

    #[test]
    fn bundled_variants_match_edits() {
        let parent = parse_structure(example("parent").unwrap().as_bytes()).unwrap();
        let c1 = AnalysisRequest::for_example("parent").with_edits(&["C[1][1]=1"]).resolve().unwrap();
        assert_eq!(c1, parse_structure(example("parent_c1").unwrap().as_bytes()).unwrap());
        let sli = AnalysisRequest::for_example("parent").with_edits(&["C[1][1]=1", "C[2][2]=1", "C[3][3]=0"]);
        assert_eq!(sli.resolve().unwrap(), parse_structure(example("parent_sli").unwrap().as_bytes()).unwrap());
        assert_eq!(AnalysisRequest::for_spec(&parent).resolve().unwrap(), parent);
    }

    #[test]
    fn request_defaults_and_errors() {
        let r: AnalysisRequest = serde_json::from_str(r#"{"example":"parent"}"#).unwrap();
        assert!(r.canonical_form);
        assert_eq!(r.naming_mode, NamingMode::Caps);
        assert!(!r.positivity_filter);
        assert!(serde_json::from_str::<AnalysisRequest>(r#"{"example":"parent","bogus":1}"#).is_err());
        let both = AnalysisRequest { spec: Some(serde_json::json!({})), ..AnalysisRequest::for_example("parent") };
        assert_eq!(both.resolve().unwrap_err().stage(), "request");
        let bad_edit = AnalysisRequest::for_example("parent").with_edits(&["C[9][9]=1"]);
        assert_eq!(bad_edit.resolve().unwrap_err().stage(), "edits");
        let r = run_analysis(&bad_edit, &AnalysisOptions::default());
        assert!(matches!(r.structure, Stage::Failed { stage: "edits", .. }));
        assert_eq!(r.classification.verdict, Verdict::Unknown);
    }

    #[test]
    fn one_compartment_end_to_end() {
        let r = run_analysis(&AnalysisRequest::for_example("one_compartment"), &AnalysisOptions::default());
        assert_eq!(r.classification.verdict, Verdict::Su);
        assert!(r.to_text().ends_with("verdict: SU\n"));
        assert!(r.timings.is_none());
    }

    #[test]
    fn constant_output_short_circuits() {
        let spec = parse_structure(br#"{"n":1,"k":1,"parameters":["k"],"A":[["-k"]],"C":[["0"]],"x0":["1"]}"#).unwrap();
        let r = run_analysis(&AnalysisRequest::for_spec(&spec), &AnalysisOptions::default());
        assert_eq!(r.classification.verdict, Verdict::Su);
        assert!(matches!(r.solution, Stage::Skipped { .. }));
        assert!(matches!(r.report, Stage::Ok { .. }));
    }

    #[test]
    fn exhausted_budget_is_unknown() {
        let opts = AnalysisOptions { timeout: Duration::ZERO, ..Default::default() };
        let r = run_analysis(&AnalysisRequest::for_example("parent"), &opts);
        assert!(r.timed_out);
        assert_eq!(r.classification.verdict, Verdict::Unknown);
        assert!(matches!(r.transfer_matrix, Stage::Ok { .. }));
        assert!(matches!(r.report, Stage::Ok { .. }));
    }
}
