//! Uncontrolled LTI model structures `x' = A x`, `y = C x`, `x(0) = x0`,
//! their compartmental sign conditions, and experiment-design edits.
//!
//! The file format is JSON with every matrix entry written as polynomial
//! text. Serialization is canonical: entries are printed with their terms
//! ordered by the declared parameter list, so `parse(serialize(s)) == s`
//! and `serialize(parse(t)) == t` for canonical `t`.

use std::fmt;
use std::str::FromStr;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{parse_poly, GenericPoint, Poly, Symbol};

/// The Laplace indeterminate; never a parameter.
pub const LAPLACE_SYMBOL: &str = "s";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("malformed document at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{location}: {message}")]
    Expression { location: String, message: String },
    #[error("{location}: expected {expected}, found {found}")]
    Shape { location: String, expected: usize, found: usize },
    #[error("duplicate parameter {0}")]
    DuplicateParameter(String),
    #[error("{location}: symbol {symbol} is neither a parameter nor a declared constant")]
    UndeclaredSymbol { location: String, symbol: String },
    #[error("symbol {0} is reserved for the Laplace variable")]
    ReservedSymbol(String),
    #[error("invalid edit: {0}")]
    InvalidEdit(String),
}

/// A model structure with parameter vector `parameters`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureSpec {
    pub n: usize,
    pub k: usize,
    pub parameters: Vec<Symbol>,
    /// Known symbolic constants: may appear in entries but are not estimated.
    pub constants: Vec<Symbol>,
    pub a: Vec<Vec<Poly>>,
    pub c: Vec<Vec<Poly>>,
    pub x0: Vec<Poly>,
    /// Environment outflow label per compartment (zero for none).
    pub outflow_params: Vec<Poly>,
    pub compartmental: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    n: usize,
    k: usize,
    parameters: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    constants: Vec<String>,
    #[serde(rename = "A")]
    a: Vec<Vec<String>>,
    #[serde(rename = "C")]
    c: Vec<Vec<String>>,
    x0: Vec<String>,
    #[serde(default)]
    outflow_params: Option<Vec<String>>,
    #[serde(default)]
    compartmental: bool,
}

impl StructureSpec {
    /// Parameters followed by constants: the symbol order used for display.
    pub fn symbols(&self) -> Vec<Symbol> {
        self.parameters.iter().chain(&self.constants).cloned().collect()
    }

    fn canonical(&self, p: &Poly) -> Poly {
        p.reorder(&self.symbols())
    }

    /// Builds and validates a spec from its parts.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        parameters: Vec<Symbol>,
        constants: Vec<Symbol>,
        a: Vec<Vec<Poly>>,
        c: Vec<Vec<Poly>>,
        x0: Vec<Poly>,
        outflow_params: Option<Vec<Poly>>,
        compartmental: bool,
    ) -> Result<Self, StructureError> {
        let n = a.len();
        let k = c.len();
        let outflow_params = outflow_params.unwrap_or_else(|| vec![Poly::zero(); n]);
        let mut spec = StructureSpec { n, k, parameters, constants, a, c, x0, outflow_params, compartmental };
        spec.check()?;
        spec.canonicalize();
        Ok(spec)
    }

    fn canonicalize(&mut self) {
        let order = self.symbols();
        let fix = |p: &mut Poly| *p = p.reorder(&order);
        self.a.iter_mut().flatten().for_each(fix);
        self.c.iter_mut().flatten().for_each(fix);
        self.x0.iter_mut().for_each(fix);
        self.outflow_params.iter_mut().for_each(fix);
    }

    fn check(&self) -> Result<(), StructureError> {
        if self.n == 0 {
            return Err(StructureError::Shape { location: "A".into(), expected: 1, found: 0 });
        }
        if self.k == 0 {
            return Err(StructureError::Shape { location: "C".into(), expected: 1, found: 0 });
        }
        let mut seen = std::collections::BTreeSet::new();
        for p in self.parameters.iter().chain(&self.constants) {
            if p.name() == LAPLACE_SYMBOL {
                return Err(StructureError::ReservedSymbol(p.name().into()));
            }
            if !seen.insert(p.clone()) {
                return Err(StructureError::DuplicateParameter(p.name().into()));
            }
        }
        for (i, row) in self.a.iter().enumerate() {
            shape(&format!("A[{}]", i + 1), self.n, row.len())?;
        }
        for (i, row) in self.c.iter().enumerate() {
            shape(&format!("C[{}]", i + 1), self.n, row.len())?;
        }
        shape("x0", self.n, self.x0.len())?;
        shape("outflow_params", self.n, self.outflow_params.len())?;
        let entries = self.located_entries();
        for (loc, p) in &entries {
            for s in p.symbols() {
                if !seen.contains(&s) {
                    if s.name() == LAPLACE_SYMBOL {
                        return Err(StructureError::ReservedSymbol(s.name().into()));
                    }
                    return Err(StructureError::UndeclaredSymbol { location: loc.clone(), symbol: s.name().into() });
                }
            }
        }
        for (i, row) in self.a.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                if p.total_degree() > 1 {
                    return Err(StructureError::Expression {
                        location: format!("A[{}][{}]", i + 1, j + 1),
                        message: "entries of A must be linear in the parameters".into(),
                    });
                }
            }
        }
        Ok(())
    }

    fn located_entries(&self) -> Vec<(String, &Poly)> {
        let mut out = Vec::new();
        for (name, m) in [("A", &self.a), ("C", &self.c)] {
            for (i, row) in m.iter().enumerate() {
                for (j, p) in row.iter().enumerate() {
                    out.push((format!("{name}[{}][{}]", i + 1, j + 1), p));
                }
            }
        }
        for (i, p) in self.x0.iter().enumerate() {
            out.push((format!("x0[{}]", i + 1), p));
        }
        for (i, p) in self.outflow_params.iter().enumerate() {
            out.push((format!("outflow_params[{}]", i + 1), p));
        }
        out
    }

    /// Canonical pretty-printed JSON, newline-terminated.
    pub fn to_json(&self) -> String {
        let show = |p: &Poly| self.canonical(p).to_string();
        let file = SpecFile {
            n: self.n,
            k: self.k,
            parameters: self.parameters.iter().map(|s| s.name().to_string()).collect(),
            constants: self.constants.iter().map(|s| s.name().to_string()).collect(),
            a: self.a.iter().map(|r| r.iter().map(show).collect()).collect(),
            c: self.c.iter().map(|r| r.iter().map(show).collect()).collect(),
            x0: self.x0.iter().map(show).collect(),
            outflow_params: Some(self.outflow_params.iter().map(show).collect()),
            compartmental: self.compartmental,
        };
        let mut s = serde_json::to_string_pretty(&file).expect("plain data serializes");
        s.push('\n');
        s
    }

    /// Output-independent description of the structure for JSON payloads.
    pub fn to_value(&self) -> serde_json::Value {
        serde_json::from_str(&self.to_json()).expect("own output parses")
    }
}

impl Serialize for StructureSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for StructureSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let file = SpecFile::deserialize(d)?;
        from_file(file).map_err(serde::de::Error::custom)
    }
}

fn shape(location: &str, expected: usize, found: usize) -> Result<(), StructureError> {
    if expected == found {
        Ok(())
    } else {
        Err(StructureError::Shape { location: location.into(), expected, found })
    }
}

fn symbol_list(names: &[String], field: &str) -> Result<Vec<Symbol>, StructureError> {
    names
        .iter()
        .enumerate()
        .map(|(i, n)| {
            Symbol::new(n).map_err(|e| StructureError::Expression {
                location: format!("{field}[{}]", i + 1),
                message: e.to_string(),
            })
        })
        .collect()
}

fn entry(text: &str, location: String) -> Result<Poly, StructureError> {
    parse_poly(text).map_err(|e| StructureError::Expression { location, message: e.to_string() })
}

fn from_file(file: SpecFile) -> Result<StructureSpec, StructureError> {
    let parameters = symbol_list(&file.parameters, "parameters")?;
    let constants = symbol_list(&file.constants, "constants")?;
    shape("A", file.n, file.a.len())?;
    shape("C", file.k, file.c.len())?;
    let matrix = |m: &[Vec<String>], name: &str| -> Result<Vec<Vec<Poly>>, StructureError> {
        m.iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, t)| entry(t, format!("{name}[{}][{}]", i + 1, j + 1)))
                    .collect()
            })
            .collect()
    };
    let vector = |v: &[String], name: &str| -> Result<Vec<Poly>, StructureError> {
        v.iter().enumerate().map(|(i, t)| entry(t, format!("{name}[{}]", i + 1))).collect()
    };
    let a = matrix(&file.a, "A")?;
    let c = matrix(&file.c, "C")?;
    let x0 = vector(&file.x0, "x0")?;
    let outflow = file.outflow_params.as_deref().map(|v| vector(v, "outflow_params")).transpose()?;
    StructureSpec::new(parameters, constants, a, c, x0, outflow, file.compartmental)
}

/// Parses and validates a structure document.
pub fn parse_structure(text: &[u8]) -> Result<StructureSpec, StructureError> {
    let file: SpecFile = serde_json::from_slice(text).map_err(|e| StructureError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    from_file(file)
}

/// Which conservation-of-mass condition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    /// `A[i][j] >= 0` for `i != j`.
    OffDiagonal,
    /// `A[i][i] <= -sum_{j != i} A[j][i]`, reported at `(i, i)`.
    Diagonal,
    /// `C[i][j] >= 0`.
    Observation,
}

/// A violated constraint at a 1-based `(row, col)` position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ConstraintKind,
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Sign of a polynomial over the non-negative orthant, when decidable from
/// coefficient signs alone.
fn coefficient_sign(p: &Poly) -> Option<std::cmp::Ordering> {
    use std::cmp::Ordering::*;
    if p.is_zero() {
        return Some(Equal);
    }
    let coeffs: Vec<_> = p.sparse_terms().map(|(_, c)| c.clone()).collect();
    if coeffs.iter().all(|c| c.is_positive()) {
        Some(Greater)
    } else if coeffs.iter().all(|c| c.is_negative()) {
        Some(Less)
    } else {
        None
    }
}

fn nonnegative(p: &Poly, point: &GenericPoint) -> bool {
    match coefficient_sign(p) {
        Some(o) => o != std::cmp::Ordering::Less,
        None => !p.eval_rational(&point.assignment).expect("all symbols assigned").is_negative(),
    }
}

/// Checks the compartmental sign and column-sum conditions. Entries whose
/// sign follows from their coefficients are decided symbolically (symbols
/// range over the non-negative orthant); mixed-sign entries are checked at
/// a positive generic point.
pub fn validate_compartmental(spec: &StructureSpec) -> ValidationReport {
    let point = GenericPoint::new(&spec.symbols(), 0);
    let mut violations = Vec::new();
    for i in 0..spec.n {
        for j in 0..spec.n {
            if i != j && !nonnegative(&spec.a[i][j], &point) {
                violations.push(Violation { kind: ConstraintKind::OffDiagonal, row: i + 1, col: j + 1 });
            }
        }
        let mut column = spec.a[i][i].clone();
        for j in (0..spec.n).filter(|&j| j != i) {
            column = &column + &spec.a[j][i];
        }
        if !nonnegative(&-&column, &point) {
            violations.push(Violation { kind: ConstraintKind::Diagonal, row: i + 1, col: i + 1 });
        }
    }
    for (i, row) in spec.c.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            if !nonnegative(p, &point) {
                violations.push(Violation { kind: ConstraintKind::Observation, row: i + 1, col: j + 1 });
            }
        }
    }
    ValidationReport { violations }
}

/// Position edited by a [`DesignEdit`], 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EditTarget {
    C { row: usize, col: usize },
    X0 { index: usize },
}

impl fmt::Display for EditTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EditTarget::C { row, col } => write!(f, "C[{row}][{col}]"),
            EditTarget::X0 { index } => write!(f, "x0[{index}]"),
        }
    }
}

fn bracketed(s: &str) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        let inner = rest.strip_prefix('[')?;
        let close = inner.find(']')?;
        out.push(inner[..close].trim().parse().ok()?);
        rest = &inner[close + 1..];
    }
    Some(out)
}

impl FromStr for EditTarget {
    type Err = StructureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || StructureError::InvalidEdit(format!("unrecognized target {s:?}; use C[i][j] or x0[i]"));
        if let Some(rest) = s.strip_prefix("x0") {
            match bracketed(rest).as_deref() {
                Some(&[index]) => Ok(EditTarget::X0 { index }),
                _ => Err(bad()),
            }
        } else if let Some(rest) = s.strip_prefix('C') {
            match bracketed(rest).as_deref() {
                Some(&[row, col]) => Ok(EditTarget::C { row, col }),
                _ => Err(bad()),
            }
        } else {
            Err(bad())
        }
    }
}

impl Serialize for EditTarget {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EditTarget {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Replaces one entry of `C` or `x0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignEdit {
    pub target: EditTarget,
    #[serde(with = "poly_text")]
    pub value: Poly,
}

mod poly_text {
    use super::*;

    pub fn serialize<S: serde::Serializer>(p: &Poly, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(p)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Poly, D::Error> {
        let s = String::deserialize(d)?;
        parse_poly(&s).map_err(serde::de::Error::custom)
    }
}

impl FromStr for DesignEdit {
    type Err = StructureError;

    /// Parses `coord=expr`, e.g. `C[1][1]=1` or `x0[2]=d`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (t, v) = s
            .split_once('=')
            .ok_or_else(|| StructureError::InvalidEdit(format!("expected coord=expr, got {s:?}")))?;
        let target = t.parse()?;
        let value = parse_poly(v).map_err(|e| StructureError::InvalidEdit(format!("{}: {e}", t.trim())))?;
        Ok(DesignEdit { target, value })
    }
}

/// Applies edits in order to a copy of `spec`. Symbols introduced by edits
/// become parameters appended to the end; parameters that no longer appear
/// in `A`, `C` or `x0` are dropped.
pub fn apply_edits(spec: &StructureSpec, edits: &[DesignEdit]) -> Result<StructureSpec, StructureError> {
    let mut out = spec.clone();
    for e in edits {
        let slot = match e.target {
            EditTarget::C { row, col } if (1..=spec.k).contains(&row) && (1..=spec.n).contains(&col) => {
                &mut out.c[row - 1][col - 1]
            }
            EditTarget::X0 { index } if (1..=spec.n).contains(&index) => &mut out.x0[index - 1],
            t => return Err(StructureError::InvalidEdit(format!("{t} is out of range for n={}, k={}", spec.n, spec.k))),
        };
        for s in e.value.symbols() {
            if s.name() == LAPLACE_SYMBOL {
                return Err(StructureError::ReservedSymbol(s.name().into()));
            }
            if !out.parameters.contains(&s) && !out.constants.contains(&s) {
                out.parameters.push(s);
            }
        }
        *slot = e.value.clone();
    }
    let used: std::collections::BTreeSet<Symbol> = out
        .a
        .iter()
        .flatten()
        .chain(out.c.iter().flatten())
        .chain(&out.x0)
        .flat_map(Poly::symbols)
        .collect();
    out.parameters.retain(|p| used.contains(p));
    // Outflow labels only annotate the diagram; keep them consistent.
    for o in out.outflow_params.iter_mut() {
        if o.symbols().iter().any(|s| !used.contains(s) && !out.constants.contains(s)) {
            *o = Poly::zero();
        }
    }
    out.canonicalize();
    Ok(out)
}

impl fmt::Display for StructureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::sym;

    const PARENT: &str = include_str!("../../../specs/parent.json");

    fn one_compartment(a: &str) -> StructureSpec {
        let text = format!(
            r#"{{"n": 1, "k": 1, "parameters": ["k"], "A": [["{a}"]], "C": [["1"]], "x0": ["1"], "compartmental": true}}"#
        );
        parse_structure(text.as_bytes()).unwrap()
    }

    #[test]
    fn parent_parses_with_eleven_parameters_in_order() {
        let s = parse_structure(PARENT.as_bytes()).unwrap();
        assert_eq!((s.n, s.k), (3, 3));
        let names: Vec<&str> = s.parameters.iter().map(Symbol::name).collect();
        assert_eq!(names, ["k01", "k12", "k21", "k23", "k32", "x10", "x20", "x30", "c1", "c2", "c3"]);
        assert!(validate_compartmental(&s).passed());
    }

    #[test]
    fn canonical_round_trip_is_bit_exact() {
        let s = parse_structure(PARENT.as_bytes()).unwrap();
        assert_eq!(s.to_json(), PARENT);
        assert_eq!(parse_structure(s.to_json().as_bytes()).unwrap(), s);
    }

    #[test]
    fn single_compartment_validation() {
        let s = one_compartment("-k");
        assert_eq!((s.n, s.k), (1, 1));
        assert!(validate_compartmental(&s).passed());
        let bad = parse_structure(
            br#"{"n": 1, "k": 1, "parameters": [], "A": [["1"]], "C": [["1"]], "x0": ["1"], "compartmental": true}"#,
        )
        .unwrap();
        assert_eq!(
            validate_compartmental(&bad).violations,
            vec![Violation { kind: ConstraintKind::Diagonal, row: 1, col: 1 }]
        );
    }

    #[test]
    fn mixed_sign_entries_use_the_generic_point() {
        let text = br#"{"n": 1, "k": 1, "parameters": ["a", "b"], "A": [["-a"]], "C": [["a - b"]], "x0": ["1"]}"#;
        let s = parse_structure(text).unwrap();
        let point = GenericPoint::new(&s.symbols(), 0);
        let expected_ok = point.get(&sym("a")).unwrap() >= point.get(&sym("b")).unwrap();
        assert_eq!(validate_compartmental(&s).passed(), expected_ok);
    }

    #[test]
    fn shape_mismatch_reports_location() {
        let text = br#"{"n": 2, "k": 1, "parameters": ["k"], "A": [["-k", "0", "0"], ["0", "-k"]], "C": [["1", "0"]], "x0": ["1", "0"]}"#;
        assert_eq!(
            parse_structure(text).unwrap_err(),
            StructureError::Shape { location: "A[1]".into(), expected: 2, found: 3 }
        );
    }

    #[test]
    fn other_parse_errors() {
        let dup = br#"{"n": 1, "k": 1, "parameters": ["k", "k"], "A": [["-k"]], "C": [["1"]], "x0": ["1"]}"#;
        assert_eq!(parse_structure(dup).unwrap_err(), StructureError::DuplicateParameter("k".into()));
        let undeclared = br#"{"n": 1, "k": 1, "parameters": [], "A": [["-k"]], "C": [["1"]], "x0": ["1"]}"#;
        assert!(matches!(parse_structure(undeclared), Err(StructureError::UndeclaredSymbol { .. })));
        let malformed = br#"{"n": 1, "k": 1, "parameters": ["k"], "A": [["-k +"]], "C": [["1"]], "x0": ["1"]}"#;
        match parse_structure(malformed).unwrap_err() {
            StructureError::Expression { location, .. } => assert_eq!(location, "A[1][1]"),
            e => panic!("{e}"),
        }
        assert!(matches!(parse_structure(b"{\"n\": 1,"), Err(StructureError::Syntax { line: 1, .. })));
        let reserved = br#"{"n": 1, "k": 1, "parameters": ["s"], "A": [["-s"]], "C": [["1"]], "x0": ["1"]}"#;
        assert_eq!(parse_structure(reserved).unwrap_err(), StructureError::ReservedSymbol("s".into()));
    }

    #[test]
    fn edits() {
        let s = parse_structure(PARENT.as_bytes()).unwrap();
        let before = s.clone();
        let c1: DesignEdit = "C[1][1]=1".parse().unwrap();
        let e = apply_edits(&s, &[c1]).unwrap();
        assert_eq!(e.parameters.len(), 10);
        assert!(!e.parameters.contains(&sym("c1")));
        assert_eq!(s, before);
        assert_eq!(apply_edits(&s, &[]).unwrap(), s);

        let c3: DesignEdit = "C[3][3]=0".parse().unwrap();
        let once = apply_edits(&s, std::slice::from_ref(&c3)).unwrap();
        assert_eq!(apply_edits(&s, &[c3.clone(), c3.clone()]).unwrap(), once);
        assert_eq!(apply_edits(&once, &[c3]).unwrap(), once);

        let fresh = apply_edits(&s, &["x0[2]=d*x20".parse().unwrap()]).unwrap();
        assert_eq!(fresh.parameters.last(), Some(&sym("d")));

        assert!(matches!(
            apply_edits(&s, &["C[4][1]=1".parse().unwrap()]),
            Err(StructureError::InvalidEdit(_))
        ));
        assert!("A[1][1]=0".parse::<DesignEdit>().is_err());
        assert!("C[1][1]=1+".parse::<DesignEdit>().is_err());
    }

    #[test]
    fn edit_serde() {
        let e: DesignEdit = serde_json::from_str(r#"{"target": "x0[3]", "value": "2"}"#).unwrap();
        assert_eq!(e.target, EditTarget::X0 { index: 3 });
        assert_eq!(serde_json::to_string(&e).unwrap(), r#"{"target":"x0[3]","value":"2"}"#);
    }
}
