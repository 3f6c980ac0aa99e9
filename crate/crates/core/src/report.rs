//! Compartment diagrams and the four-panel analysis report.

use std::fmt::Write as _;

use serde::Serialize;

use crate::classify::{Classification, ParameterStatus};
use crate::invariants::ParameterRenaming;
use crate::solver::{SolutionSet, SymbolicStatus};
use crate::structures::StructureSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Compartment,
    Output,
    Environment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    /// Initial condition of a compartment, as polynomial text.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Flow,
    Outflow,
    Observation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub kind: EdgeKind,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompartmentGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub layout_hint: String,
}

pub const DEFAULT_LAYOUT: &str = "dot";
const GRAPHVIZ_ENGINES: [&str; 6] = ["dot", "neato", "fdp", "sfdp", "circo", "twopi"];

pub const ENVIRONMENT: &str = "env";

/// Nodes `x1..xn`, `y_i` for each nonzero row of `C`, and `env` when some
/// compartment has an outflow. Edges follow the sparsity of `A`, `C` and the
/// outflow labels exactly.
pub fn build_graph(spec: &StructureSpec, layout_hint: &str) -> CompartmentGraph {
    let mut nodes: Vec<Node> = (0..spec.n)
        .map(|j| Node { id: format!("x{}", j + 1), kind: NodeKind::Compartment, initial: Some(spec.x0[j].to_string()) })
        .collect();
    let mut edges = Vec::new();
    for j in 0..spec.n {
        for i in 0..spec.n {
            if i != j && !spec.a[i][j].is_zero() {
                edges.push(Edge {
                    from: format!("x{}", j + 1),
                    to: format!("x{}", i + 1),
                    kind: EdgeKind::Flow,
                    label: spec.a[i][j].to_string(),
                });
            }
        }
    }
    let has_outflow = spec.outflow_params.iter().any(|p| !p.is_zero());
    for (j, p) in spec.outflow_params.iter().enumerate() {
        if !p.is_zero() {
            edges.push(Edge {
                from: format!("x{}", j + 1),
                to: ENVIRONMENT.into(),
                kind: EdgeKind::Outflow,
                label: p.to_string(),
            });
        }
    }
    for (i, row) in spec.c.iter().enumerate() {
        if row.iter().all(|c| c.is_zero()) {
            continue;
        }
        let y = format!("y{}", i + 1);
        nodes.push(Node { id: y.clone(), kind: NodeKind::Output, initial: None });
        for (j, c) in row.iter().enumerate() {
            if !c.is_zero() {
                edges.push(Edge {
                    from: format!("x{}", j + 1),
                    to: y.clone(),
                    kind: EdgeKind::Observation,
                    label: c.to_string(),
                });
            }
        }
    }
    if has_outflow {
        nodes.push(Node { id: ENVIRONMENT.into(), kind: NodeKind::Environment, initial: None });
    }
    let layout_hint = if layout_hint.is_empty() { DEFAULT_LAYOUT } else { layout_hint };
    CompartmentGraph { nodes, edges, layout_hint: layout_hint.into() }
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

impl CompartmentGraph {
    /// Graphviz DOT text.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph compartments {\n");
        if GRAPHVIZ_ENGINES.contains(&self.layout_hint.as_str()) {
            let _ = writeln!(out, "  layout={};", self.layout_hint);
        } else {
            let _ = writeln!(out, "  // layout hint: {}", self.layout_hint.replace('\n', " "));
        }
        out.push_str("  rankdir=LR;\n");
        for n in &self.nodes {
            let attrs = match n.kind {
                NodeKind::Compartment => {
                    let label = match &n.initial {
                        Some(x) if x != "0" => format!("{}\\n{}(0) = {}", n.id, n.id, x),
                        _ => n.id.clone(),
                    };
                    format!("shape=box, label={}", dot_quote(&label))
                }
                NodeKind::Output => format!("shape=ellipse, label={}", dot_quote(&n.id)),
                NodeKind::Environment => format!("shape=point, label={}", dot_quote(&n.id)),
            };
            let _ = writeln!(out, "  {} [{}];", dot_quote(&n.id), attrs);
        }
        for e in &self.edges {
            let style = match e.kind {
                EdgeKind::Flow => "",
                EdgeKind::Outflow => ", style=bold",
                EdgeKind::Observation => ", style=dashed",
            };
            let _ = writeln!(out, "  {} -> {} [label={}{}];", dot_quote(&e.from), dot_quote(&e.to), dot_quote(&e.label), style);
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParameterPair {
    pub theta: String,
    pub theta_prime: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionPanel {
    pub dimension: Option<usize>,
    pub count: Option<String>,
    pub free_unknowns: Vec<String>,
    pub branches: Vec<String>,
    pub certificates: Vec<String>,
    pub symbolic: Option<SymbolicStatus>,
    /// Why the panel is empty, when it is.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphPanel {
    pub graph: CompartmentGraph,
    pub dot: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerdictPanel {
    pub verdict: String,
    pub parameters: Vec<ParameterStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positivity: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub parameters: Vec<ParameterPair>,
    pub solution: SolutionPanel,
    pub graph: GraphPanel,
    pub verdict: VerdictPanel,
}

/// `solution` is `Err` with a reason when the solver produced nothing.
pub fn render_report(
    spec: &StructureSpec,
    ren: &ParameterRenaming,
    solution: Result<&SolutionSet, &str>,
    classification: &Classification,
    layout_hint: &str,
) -> Report {
    let parameters = ren
        .theta
        .iter()
        .zip(&ren.theta_prime)
        .map(|(t, tp)| ParameterPair { theta: t.to_string(), theta_prime: tp.to_string() })
        .collect();
    let solution = match solution {
        Ok(sol) => SolutionPanel {
            dimension: Some(sol.generic_dimension),
            count: Some(sol.generic_count.to_string()),
            free_unknowns: sol.free_unknowns.iter().map(ToString::to_string).collect(),
            branches: sol.branches.iter().map(ToString::to_string).collect(),
            certificates: sol.relation_certificates.iter().map(|c| c.relation()).collect(),
            symbolic: Some(sol.symbolic.clone()),
            failure: None,
        },
        Err(why) => SolutionPanel {
            dimension: None,
            count: None,
            free_unknowns: Vec::new(),
            branches: Vec::new(),
            certificates: Vec::new(),
            symbolic: None,
            failure: Some(why.to_string()),
        },
    };
    let graph = build_graph(spec, layout_hint);
    let dot = graph.to_dot();
    Report {
        parameters,
        solution,
        graph: GraphPanel { graph, dot },
        verdict: VerdictPanel {
            verdict: classification.verdict.to_string(),
            parameters: classification.rationale.parameters.clone(),
            positivity: classification.positivity_note.as_ref().map(|n| n.summary.clone()),
        },
    }
}

impl Report {
    /// Plain-text rendering; the last line is `verdict: <V>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("parameters (theta -> theta'):\n");
        for p in &self.parameters {
            let _ = writeln!(out, "  {} -> {}", p.theta, p.theta_prime);
        }
        out.push_str("\nsolution set:\n");
        let s = &self.solution;
        if let Some(why) = &s.failure {
            let _ = writeln!(out, "  unavailable: {why}");
        } else {
            let _ = writeln!(
                out,
                "  generic dimension {}, solution count {}",
                s.dimension.map_or("?".into(), |d| d.to_string()),
                s.count.as_deref().unwrap_or("?")
            );
            if !s.free_unknowns.is_empty() {
                let _ = writeln!(out, "  free: {}", s.free_unknowns.join(", "));
            }
            match &s.symbolic {
                Some(SymbolicStatus::Complete) | None => {}
                Some(other) => {
                    let _ = writeln!(out, "  symbolic solve: {}", symbolic_text(other));
                }
            }
            for (i, b) in s.branches.iter().enumerate() {
                let _ = writeln!(out, "  branch {}: {}", i + 1, b);
            }
            if !s.certificates.is_empty() {
                out.push_str("  relations:\n");
                for c in &s.certificates {
                    let _ = writeln!(out, "    {c}");
                }
            }
        }
        out.push_str("\ndiagram:\n");
        for e in &self.graph.graph.edges {
            let _ = writeln!(out, "  {} -> {} [{}]", e.from, e.to, e.label);
        }
        out.push_str("\nparameter status:\n");
        for p in &self.verdict.parameters {
            let _ = writeln!(out, "  {}: {}", p.parameter, p.status);
        }
        if let Some(note) = &self.verdict.positivity {
            let _ = writeln!(out, "  positivity: {note}");
        }
        let _ = write!(out, "\nverdict: {}\n", self.verdict.verdict);
        out
    }
}

fn symbolic_text(s: &SymbolicStatus) -> String {
    match s {
        SymbolicStatus::NotAttempted => "not attempted".into(),
        SymbolicStatus::Complete => "complete".into(),
        SymbolicStatus::NotExtractable(why) => format!("branches not extractable ({why})"),
        SymbolicStatus::TooManyUnknowns(n) => format!("skipped, {n} unknowns"),
        SymbolicStatus::Timeout => "timed out".into(),
        SymbolicStatus::WorkLimit(n) => format!("stopped at the work limit of {n} steps"),
        SymbolicStatus::Failed(why) => format!("failed ({why})"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{apply_edits, parse_structure, DesignEdit};

    fn parent() -> StructureSpec {
        parse_structure(include_bytes!("../../../specs/parent.json")).unwrap()
    }

    fn edges_of(g: &CompartmentGraph, kind: EdgeKind) -> Vec<(String, String, String)> {
        g.edges.iter().filter(|e| e.kind == kind).map(|e| (e.from.clone(), e.to.clone(), e.label.clone())).collect()
    }

    #[test]
    fn parent_diagram() {
        let g = build_graph(&parent(), "");
        let ids: Vec<&str> = g.nodes.iter().map(|n| n.id.as_str()).collect();
        assert_eq!(ids, ["x1", "x2", "x3", "y1", "y2", "y3", "env"]);
        let flows = edges_of(&g, EdgeKind::Flow);
        let pairs: Vec<(&str, &str, &str)> = flows.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
        assert_eq!(pairs, [("x1", "x2", "k21"), ("x2", "x1", "k12"), ("x2", "x3", "k32"), ("x3", "x2", "k23")]);
        assert_eq!(edges_of(&g, EdgeKind::Outflow), [("x1".into(), "env".into(), "k01".into())]);
        assert_eq!(edges_of(&g, EdgeKind::Observation).len(), 3);
        assert_eq!(g.layout_hint, DEFAULT_LAYOUT);
    }

    #[test]
    fn zero_gain_drops_output() {
        let e: DesignEdit = "C[3][3]=0".parse().unwrap();
        let g = build_graph(&apply_edits(&parent(), &[e]).unwrap(), "circo");
        assert!(!g.nodes.iter().any(|n| n.id == "y3"));
        assert!(!g.edges.iter().any(|e| e.to == "y3"));
        assert!(g.to_dot().contains("layout=circo;"));
    }

    #[test]
    fn single_compartment_without_outflow() {
        let spec = parse_structure(
            br#"{"n":1,"k":1,"parameters":["k","c","x"],"A":[["-k"]],"C":[["c"]],"x0":["x"]}"#,
        )
        .unwrap();
        let g = build_graph(&spec, "spring");
        let compartments = g.nodes.iter().filter(|n| n.kind == NodeKind::Compartment).count();
        assert_eq!(compartments, 1);
        assert!(!g.nodes.iter().any(|n| n.kind == NodeKind::Environment));
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.edges[0].kind, EdgeKind::Observation);
        assert!(g.to_dot().contains("// layout hint: spring"));
    }

    #[test]
    fn dot_is_well_formed() {
        let dot = build_graph(&parent(), "dot").to_dot();
        assert!(dot.starts_with("digraph compartments {\n"));
        assert!(dot.ends_with("}\n"));
        assert_eq!(dot.matches("->").count(), 8);
        assert!(dot.contains(r#""x1" -> "env" [label="k01", style=bold];"#));
        assert_eq!(dot.matches('"').count() % 2, 0);
    }
}
