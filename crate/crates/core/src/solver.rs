//! Solving the test equations for `theta'`.
//!
//! The generic path specializes `theta` at random integer points and reads
//! dimension and point count off a grevlex Gröbner basis; several seeds vote.
//! The symbolic path computes a lex basis over `Q(theta)` and extracts
//! solution branches and relation certificates when it can.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::groebner::{groebner_basis_until, is_unit_ideal, parametric_groebner_basis, parametric_reduce};
use crate::algebra::{
    linalg, reduce, run_limited, solve_triangular, Limits, variety_dimension, AlgebraError, Branch, GenericPoint, Poly, Rational, Symbol,
    TermOrder,
};
use crate::invariants::{InvariantSet, TestEquations};

pub const DEFAULT_SEEDS: [u64; 3] = [1, 2, 3];
/// Seeds used when the first round disagrees.
const ESCALATED_SEED_COUNT: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("no informative equations to solve")]
    NoEquations,
    #[error("no seeds given")]
    NoSeeds,
    #[error("generic solves disagree across seeds: {0}")]
    Indeterminate(String),
    #[error("the test equations have no solution, which cannot happen for genuine test equations")]
    Inconsistent,
    #[error("solver exceeded its time budget")]
    Timeout,
    #[error("solver exceeded its work limit of {0} steps")]
    WorkLimit(u64),
    #[error(transparent)]
    Algebra(AlgebraError),
}

impl From<AlgebraError> for SolverError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::Timeout => SolverError::Timeout,
            AlgebraError::WorkLimit(n) => SolverError::WorkLimit(n),
            AlgebraError::NoSolution => SolverError::Inconsistent,
            e => SolverError::Algebra(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GenericCount {
    Finite(usize),
    Infinite,
}

impl Serialize for GenericCount {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            GenericCount::Finite(n) => s.serialize_u64(*n as u64),
            GenericCount::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl fmt::Display for GenericCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenericCount::Finite(n) => write!(f, "{n}"),
            GenericCount::Infinite => f.write_str("infinite"),
        }
    }
}

/// How a single unknown behaves on the solution set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownStatus {
    Unique,
    FinitelyMany,
    Free,
}

impl fmt::Display for UnknownStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnknownStatus::Unique => "unique",
            UnknownStatus::FinitelyMany => "finitely-many",
            UnknownStatus::Free => "free",
        })
    }
}

/// Outcome of one generic-point solve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeedReport {
    pub seed: u64,
    pub dimension: usize,
    pub count: GenericCount,
    /// Quotient-ring dimension, counting multiplicity (zero-dimensional only).
    pub count_with_multiplicity: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "state", content = "detail", rename_all = "snake_case")]
pub enum SymbolicStatus {
    NotAttempted,
    Complete,
    NotExtractable(String),
    TooManyUnknowns(usize),
    Timeout,
    /// The step limit was reached; unlike a timeout this does not depend on machine speed.
    WorkLimit(u64),
    Failed(String),
}

/// A polynomial in `(theta', theta)` lying in the ideal of the test equations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate(pub Poly);

impl Certificate {
    /// `lhs = rhs` with positive terms on the left and negated negative terms
    /// on the right, e.g. `C1*X20 = c1*x20`.
    pub fn relation(&self) -> String {
        use num_traits::Signed;
        let mut lhs = Poly::zero();
        let mut rhs = Poly::zero();
        for (mono, c) in self.0.sparse_terms() {
            let t = Poly::from_sparse_terms([(mono, c.abs())]);
            if c.is_positive() {
                lhs = &lhs + &t;
            } else {
                rhs = &rhs + &t;
            }
        }
        let order = self.0.vars().to_vec();
        format!("{} = {}", lhs.reorder(&order), rhs.reorder(&order))
    }
}

impl Serialize for Certificate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct C {
            polynomial: String,
            relation: String,
        }
        C { polynomial: self.0.to_string(), relation: self.relation() }.serialize(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionSet {
    pub unknowns: Vec<Symbol>,
    pub generic_dimension: usize,
    pub generic_count: GenericCount,
    pub count_with_multiplicity: Option<usize>,
    /// Maximal independent set of unknowns at the generic point.
    pub free_unknowns: Vec<Symbol>,
    /// Status of each unknown at the generic point, in `unknowns` order.
    pub generic_status: Vec<UnknownStatus>,
    pub branches: Vec<Branch>,
    pub relation_certificates: Vec<Certificate>,
    pub seeds_used: Vec<u64>,
    pub seed_reports: Vec<SeedReport>,
    /// Set when the seeds did not all agree but a majority did.
    pub disagreement: Option<String>,
    pub symbolic: SymbolicStatus,
    /// Lex basis over `Q(theta)`, when the symbolic solve finished.
    #[serde(serialize_with = "poly_texts")]
    pub symbolic_basis: Vec<Poly>,
}

fn poly_texts<S: Serializer>(v: &[Poly], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|p| p.to_string()))
}

impl SolutionSet {
    pub fn status_of(&self, unknown: &Symbol) -> Option<UnknownStatus> {
        self.unknowns.iter().position(|u| u == unknown).map(|i| self.generic_status[i])
    }
}

/// Symbols other than the unknowns, in a deterministic order: the known
/// parameters first, then anything else (declared constants).
fn specialized_symbols(eqs: &TestEquations) -> Vec<Symbol> {
    let mut out = eqs.knowns.clone();
    let extra: BTreeSet<Symbol> = eqs
        .equations
        .iter()
        .flat_map(Poly::symbols)
        .filter(|s| !eqs.unknowns.contains(s) && !out.contains(s))
        .collect();
    out.extend(extra);
    out
}

struct SeedSolve {
    report: SeedReport,
    free: Vec<Symbol>,
    status: Vec<UnknownStatus>,
}

fn solve_at_seed(eqs: &TestEquations, polys: &[Poly], seed: u64, deadline: Option<Instant>) -> Result<SeedSolve, SolverError> {
    let point = GenericPoint::new(&specialized_symbols(eqs), seed);
    let specialized: Vec<Poly> = polys.iter().map(|p| p.evaluate(&point.assignment)).collect();
    let order = TermOrder::grevlex(&eqs.unknowns);
    let basis = groebner_basis_until(&specialized, &order, deadline)?;
    let dim = variety_dimension(&basis, &order)?;
    let count = match dim.distinct_count {
        Some(c) if dim.dimension == 0 => GenericCount::Finite(c),
        _ => GenericCount::Infinite,
    };

    // Values outside the generic point for the "finitely many" probe.
    let probe = GenericPoint::new(&eqs.unknowns, seed.wrapping_add(0x9e37_79b9));
    let mut status = Vec::with_capacity(eqs.unknowns.len());
    for (u, known) in eqs.unknowns.iter().zip(&eqs.knowns) {
        let truth = point.get(known).expect("every known is specialized").clone();
        status.push(unknown_status(&basis, &order, u, truth, probe.get(u).expect("assigned"), dim.dimension, deadline)?);
    }
    Ok(SeedSolve {
        report: SeedReport { seed, dimension: dim.dimension, count, count_with_multiplicity: dim.count_with_multiplicity },
        free: dim.free,
        status,
    })
}

fn unknown_status(
    basis: &[Poly],
    order: &TermOrder,
    u: &Symbol,
    truth: Rational,
    probe: &Rational,
    dimension: usize,
    deadline: Option<Instant>,
) -> Result<UnknownStatus, SolverError> {
    let target = &Poly::var(u) - &Poly::constant(truth);
    if reduce(&target, basis, order)?.is_zero() {
        return Ok(UnknownStatus::Unique);
    }
    // An unknown with infinitely many values takes almost every value, so a
    // random one is attainable; one with finitely many values misses it.
    if dimension > 0 {
        let mut with_probe = basis.to_vec();
        with_probe.push(&Poly::var(u) - &Poly::constant(probe.clone()));
        let gb = groebner_basis_until(&with_probe, order, deadline)?;
        if !is_unit_ideal(&gb, order) {
            return Ok(UnknownStatus::Free);
        }
    }
    Ok(if vanishes_on_variety(basis, order, &target, deadline)? { UnknownStatus::Unique } else { UnknownStatus::FinitelyMany })
}

/// Radical membership by the Rabinowitsch trick: `f` vanishes on `V(I)` iff
/// `I + (1 - t f)` is the unit ideal.
fn vanishes_on_variety(basis: &[Poly], order: &TermOrder, f: &Poly, deadline: Option<Instant>) -> Result<bool, SolverError> {
    let t = fresh_symbol(&order.vars);
    let mut vars = order.vars.clone();
    vars.push(t.clone());
    let ext = TermOrder { kind: order.kind, vars };
    let mut polys = basis.to_vec();
    polys.push(&Poly::one() - &(&Poly::var(&t) * f));
    let gb = groebner_basis_until(&polys, &ext, deadline)?;
    Ok(is_unit_ideal(&gb, &ext))
}

fn fresh_symbol(taken: &[Symbol]) -> Symbol {
    (0..)
        .map(|i| Symbol::new(&format!("aux{i}")).expect("valid"))
        .find(|s| !taken.contains(s))
        .expect("unbounded")
}

fn extra_seeds(given: &[u64], total: usize) -> Vec<u64> {
    let mut out = given.to_vec();
    let mut next = given.iter().max().copied().unwrap_or(0);
    while out.len() < total {
        next = next.wrapping_add(1);
        if !out.contains(&next) {
            out.push(next);
        }
    }
    out
}

/// Generic-point classification data. All seeds must agree; otherwise the
/// seed list is extended to five and a strict majority decides.
pub fn solve_generic(eqs: &TestEquations, seeds: &[u64]) -> Result<SolutionSet, SolverError> {
    solve_generic_until(eqs, seeds, None)
}

pub fn solve_generic_until(eqs: &TestEquations, seeds: &[u64], deadline: Option<Instant>) -> Result<SolutionSet, SolverError> {
    let polys = eqs.nontrivial();
    if polys.is_empty() {
        return Err(SolverError::NoEquations);
    }
    if seeds.is_empty() {
        return Err(SolverError::NoSeeds);
    }
    let mut runs: Vec<SeedSolve> = Vec::new();
    for &seed in seeds {
        runs.push(solve_at_seed(eqs, &polys, seed, deadline)?);
    }
    let key = |r: &SeedSolve| (r.report.dimension, r.report.count);
    let unanimous = runs.windows(2).all(|w| key(&w[0]) == key(&w[1]));
    let mut disagreement = None;
    let winner = if unanimous {
        key(&runs[0])
    } else {
        let all = extra_seeds(seeds, ESCALATED_SEED_COUNT);
        for &seed in &all[seeds.len()..] {
            runs.push(solve_at_seed(eqs, &polys, seed, deadline)?);
        }
        let mut votes: BTreeMap<(usize, GenericCount), usize> = BTreeMap::new();
        for r in &runs {
            *votes.entry(key(r)).or_default() += 1;
        }
        let summary = runs
            .iter()
            .map(|r| format!("seed {}: dimension {}, count {}", r.report.seed, r.report.dimension, r.report.count))
            .collect::<Vec<_>>()
            .join("; ");
        let (best, n) = votes.iter().max_by_key(|(_, n)| **n).map(|(k, n)| (*k, *n)).expect("nonempty");
        if 2 * n <= runs.len() {
            return Err(SolverError::Indeterminate(summary));
        }
        disagreement = Some(summary);
        best
    };
    let chosen = runs.iter().find(|r| key(r) == winner).expect("winner came from a run");
    Ok(SolutionSet {
        unknowns: eqs.unknowns.clone(),
        generic_dimension: winner.0,
        generic_count: winner.1,
        count_with_multiplicity: chosen.report.count_with_multiplicity,
        free_unknowns: chosen.free.clone(),
        generic_status: chosen.status.clone(),
        branches: Vec::new(),
        relation_certificates: Vec::new(),
        seeds_used: runs.iter().map(|r| r.report.seed).collect(),
        seed_reports: runs.iter().map(|r| r.report.clone()).collect(),
        disagreement,
        symbolic: SymbolicStatus::NotAttempted,
        symbolic_basis: Vec::new(),
    })
}

/// Default step limit for each route of the symbolic basis computation.
pub const DEFAULT_SYMBOLIC_STEPS: u64 = 4_000_000;

#[derive(Debug, Clone)]
pub struct SymbolicOptions {
    pub max_unknowns: usize,
    pub timeout: Duration,
    /// Step limit per basis route (see [`crate::algebra::Limits`]).
    pub max_steps: Option<u64>,
}

impl Default for SymbolicOptions {
    fn default() -> Self {
        SymbolicOptions { max_unknowns: 12, timeout: Duration::from_secs(60), max_steps: Some(DEFAULT_SYMBOLIC_STEPS) }
    }
}

/// Result of the symbolic solve alone.
#[derive(Debug, Clone)]
pub struct SymbolicSolution {
    pub basis: Vec<Poly>,
    pub branches: Vec<Branch>,
    pub certificates: Vec<Certificate>,
    pub status: SymbolicStatus,
}

/// Lex basis over `Q(theta)` with branch extraction and certificate harvest.
/// Branch extraction failures are reported in `status`; errors are reserved
/// for a missing basis (timeout, inconsistency, too many unknowns).
pub fn solve_symbolic(eqs: &TestEquations, options: &SymbolicOptions) -> Result<SymbolicSolution, SolverError> {
    let polys = eqs.nontrivial();
    if polys.is_empty() {
        return Err(SolverError::NoEquations);
    }
    if eqs.unknowns.len() > options.max_unknowns {
        return Ok(SymbolicSolution {
            basis: Vec::new(),
            branches: Vec::new(),
            certificates: Vec::new(),
            status: SymbolicStatus::TooManyUnknowns(eqs.unknowns.len()),
        });
    }
    let deadline = Instant::now() + options.timeout;
    let order = TermOrder::lex(&eqs.unknowns);
    let basis = lex_basis(&polys, &eqs.unknowns, deadline, options.max_steps)?;
    if is_unit_ideal(&basis, &order) {
        return Err(SolverError::Inconsistent);
    }
    let (branches, status) = match solve_triangular(&basis, &eqs.unknowns) {
        Ok(b) => (b, SymbolicStatus::Complete),
        Err(AlgebraError::NotExtractable(why)) => (Vec::new(), SymbolicStatus::NotExtractable(why)),
        Err(e) => (Vec::new(), SymbolicStatus::Failed(e.to_string())),
    };
    let certificates = harvest_certificates(eqs, &basis, &order)?;
    Ok(SymbolicSolution { basis, branches, certificates, status })
}

fn swap(eqs: &TestEquations) -> BTreeMap<Symbol, Symbol> {
    let mut m = BTreeMap::new();
    for (u, k) in eqs.unknowns.iter().zip(&eqs.knowns) {
        m.insert(u.clone(), k.clone());
        m.insert(k.clone(), u.clone());
    }
    m
}

/// Relations symmetric under `theta <-> theta'`: antisymmetric basis
/// elements, plus product and ratio relations between pairs of unknowns that
/// are not individually pinned down.
fn harvest_certificates(eqs: &TestEquations, basis: &[Poly], order: &TermOrder) -> Result<Vec<Certificate>, SolverError> {
    let sw = swap(eqs);
    let display = eqs.unknowns.iter().chain(&eqs.knowns).cloned().collect::<Vec<_>>();
    let mut out: Vec<Poly> = Vec::new();
    let push = |p: Poly, out: &mut Vec<Poly>| {
        let p = p.integer_primitive().reorder(&display);
        if !out.contains(&p) && !out.contains(&-&p) {
            out.push(p);
        }
    };
    for b in basis {
        let has_unknown = b.symbols().iter().any(|s| eqs.unknowns.contains(s));
        if has_unknown && (b.rename(&sw) == -b) {
            push(b.clone(), &mut out);
        }
    }
    let linear: Vec<bool> = eqs
        .unknowns
        .iter()
        .zip(&eqs.knowns)
        .map(|(u, k)| {
            let d = &Poly::var(u) - &Poly::var(k);
            parametric_reduce(&d, basis, order).map(|r| r.is_zero())
        })
        .collect::<Result<_, _>>()?;
    let n = eqs.unknowns.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if linear[i] || linear[j] {
                continue;
            }
            let (ui, uj) = (Poly::var(&eqs.unknowns[i]), Poly::var(&eqs.unknowns[j]));
            let (ki, kj) = (Poly::var(&eqs.knowns[i]), Poly::var(&eqs.knowns[j]));
            for cand in [&(&ui * &uj) - &(&ki * &kj), &(&ui * &kj) - &(&ki * &uj)] {
                if parametric_reduce(&cand, basis, order)?.is_zero() {
                    push(cand, &mut out);
                }
            }
        }
    }
    Ok(out.into_iter().map(Certificate).collect())
}

/// Reduced lex basis over `Q(theta)`. Two routes race on separate threads:
/// lex directly, and grevlex followed by lex. The reduced basis is unique,
/// so whichever finishes first gives the same answer; the other is cancelled.
/// Each route has its own step limit, so whether a basis is found at all
/// does not depend on thread timing.
fn lex_basis(polys: &[Poly], unknowns: &[Symbol], deadline: Instant, max_steps: Option<u64>) -> Result<Vec<Poly>, SolverError> {
    let lex = TermOrder::lex(unknowns);
    let grevlex = TermOrder::grevlex(unknowns);
    let done = Arc::new(AtomicBool::new(false));
    let run = |route: &dyn Fn() -> Result<Vec<Poly>, AlgebraError>| {
        let limits = Limits { deadline: Some(deadline), cancel: Some(done.clone()), max_steps };
        let r = run_limited(limits, route).0;
        if !matches!(r, Err(AlgebraError::Timeout | AlgebraError::WorkLimit(_))) {
            done.store(true, AtomicOrdering::Relaxed);
        }
        r
    };
    let (direct, graded) = std::thread::scope(|scope| {
        let direct = scope.spawn(|| run(&|| parametric_groebner_basis(polys, &lex, None)));
        let graded = run(&|| {
            let g = parametric_groebner_basis(polys, &grevlex, None)?;
            parametric_groebner_basis(&g, &lex, None)
        });
        (direct.join().unwrap_or_else(|p| std::panic::resume_unwind(p)), graded)
    });
    let spent = |r: &Result<Vec<Poly>, AlgebraError>| matches!(r, Err(AlgebraError::Timeout | AlgebraError::WorkLimit(_)));
    Ok(match (direct, graded) {
        (d, g) if spent(&d) && spent(&g) => match (d, g) {
            (Err(AlgebraError::WorkLimit(n)), Err(AlgebraError::WorkLimit(_))) => Err(AlgebraError::WorkLimit(n)),
            _ => Err(AlgebraError::Timeout),
        },
        (d, g) if spent(&d) => g,
        (d, _) => d,
    }?)
}

/// Runs [`solve_symbolic`] and folds the outcome into `sol`.
pub fn attach_symbolic(sol: &mut SolutionSet, eqs: &TestEquations, options: &SymbolicOptions) {
    match solve_symbolic(eqs, options) {
        Ok(s) => {
            sol.branches = s.branches;
            sol.relation_certificates = s.certificates;
            sol.symbolic = s.status;
            sol.symbolic_basis = s.basis;
        }
        Err(SolverError::Timeout) => sol.symbolic = SymbolicStatus::Timeout,
        Err(SolverError::WorkLimit(n)) => sol.symbolic = SymbolicStatus::WorkLimit(n),
        Err(e) => sol.symbolic = SymbolicStatus::Failed(e.to_string()),
    }
}

/// Exact rank of the invariant Jacobian at a generic point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub seed: u64,
    pub rank: usize,
    pub nullity: usize,
}

pub fn jacobian_rank_oracle(inv: &InvariantSet, theta: &[Symbol], seed: u64) -> RankReport {
    let mut symbols = theta.to_vec();
    let others: BTreeSet<Symbol> = inv.invariants.iter().flat_map(Poly::symbols).filter(|s| !theta.contains(s)).collect();
    symbols.extend(others);
    let point = GenericPoint::new(&symbols, seed);
    let rows: Vec<Vec<Rational>> = inv
        .invariants
        .iter()
        .map(|phi| {
            theta
                .iter()
                .map(|t| phi.derivative(t).eval_rational(&point.assignment).expect("all symbols assigned"))
                .collect()
        })
        .collect();
    let rank = linalg::rank(&rows);
    RankReport { seed, rank, nullity: theta.len() - rank }
}
