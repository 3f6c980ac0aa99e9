//! Coefficient invariants of a processed transfer matrix, the primed
//! parameter copy, and the test equations `phi(theta') - phi(theta)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Poly, Symbol};
use crate::transfer::TransferMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("transfer matrix must be processed before invariants are collected")]
    Unprocessed,
    #[error("naming mode {mode} needs a lower-case initial letter, got {name}")]
    ModeUnsupported { mode: NamingMode, name: String },
    #[error("generated name {0} collides with an existing symbol")]
    Collision(String),
    #[error("the output carries no parameter information")]
    NoInvariants,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Den,
    Num,
}

/// Where an invariant came from: output row (1-based), power of `s`, part.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Origin {
    pub output: usize,
    pub power: u32,
    pub part: Part,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantSet {
    pub invariants: Vec<Poly>,
    pub origins: Vec<Origin>,
}

impl InvariantSet {
    pub fn len(&self) -> usize {
        self.invariants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.invariants.is_empty()
    }
}

impl Serialize for InvariantSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Item<'a> {
            invariant: String,
            #[serde(flatten)]
            origin: &'a Origin,
        }
        s.collect_seq(
            self.invariants
                .iter()
                .zip(&self.origins)
                .map(|(p, o)| Item { invariant: p.to_string(), origin: o }),
        )
    }
}

/// Collects the `s`-coefficients of every entry: entry by entry, denominator
/// before numerator, ascending powers. Constants are dropped and only the
/// first of several identical coefficients is kept.
pub fn collect_invariants(tm: &TransferMatrix) -> Result<InvariantSet, InvariantError> {
    if !tm.processed {
        return Err(InvariantError::Unprocessed);
    }
    let mut invariants: Vec<Poly> = Vec::new();
    let mut origins = Vec::new();
    for (i, e) in tm.entries.iter().enumerate() {
        for (part, poly) in [(Part::Den, e.den()), (Part::Num, e.num())] {
            for (power, c) in poly.coefficients_in(&tm.s).into_iter().enumerate() {
                if c.is_constant() || invariants.contains(&c) {
                    continue;
                }
                invariants.push(c);
                origins.push(Origin { output: i + 1, power: power as u32, part });
            }
        }
    }
    Ok(InvariantSet { invariants, origins })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamingMode {
    /// `k01 -> k01_`
    Underscore,
    /// `k01 -> K01`
    #[default]
    Caps,
}

impl std::fmt::Display for NamingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NamingMode::Underscore => "underscore",
            NamingMode::Caps => "caps",
        })
    }
}

impl std::str::FromStr for NamingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "underscore" => Ok(NamingMode::Underscore),
            "caps" => Ok(NamingMode::Caps),
            _ => Err(format!("unknown naming mode {s:?}; expected underscore or caps")),
        }
    }
}

/// Positionally aligned `theta -> theta'`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParameterRenaming {
    pub theta: Vec<Symbol>,
    pub theta_prime: Vec<Symbol>,
    pub mode: NamingMode,
}

impl ParameterRenaming {
    pub fn forward(&self) -> BTreeMap<Symbol, Symbol> {
        self.theta.iter().cloned().zip(self.theta_prime.iter().cloned()).collect()
    }

    pub fn backward(&self) -> BTreeMap<Symbol, Symbol> {
        self.theta_prime.iter().cloned().zip(self.theta.iter().cloned()).collect()
    }

    pub fn prime(&self, p: &Poly) -> Poly {
        p.rename(&self.forward())
    }

    pub fn unprime(&self, p: &Poly) -> Poly {
        p.rename(&self.backward())
    }

    /// `theta'` then `theta`: the display order for equations.
    pub fn display_order(&self) -> Vec<Symbol> {
        self.theta_prime.iter().chain(&self.theta).cloned().collect()
    }
}

/// Builds `theta'`. `reserved` lists other symbols in play (constants, `s`)
/// that generated names must avoid.
pub fn theta_prime_creation(theta: &[Symbol], mode: NamingMode, reserved: &[Symbol]) -> Result<ParameterRenaming, InvariantError> {
    let mut theta_prime = Vec::with_capacity(theta.len());
    for t in theta {
        let name = t.name();
        let new = match mode {
            NamingMode::Underscore => format!("{name}_"),
            NamingMode::Caps => {
                let mut chars = name.chars();
                let first = chars.next().expect("symbols are nonempty");
                if !first.is_lowercase() {
                    return Err(InvariantError::ModeUnsupported { mode, name: name.into() });
                }
                first.to_uppercase().chain(chars).collect()
            }
        };
        let sym = Symbol::new(&new).expect("derived from a valid name");
        if theta.contains(&sym) || reserved.contains(&sym) || theta_prime.contains(&sym) {
            return Err(InvariantError::Collision(new));
        }
        theta_prime.push(sym);
    }
    Ok(ParameterRenaming { theta: theta.to_vec(), theta_prime, mode })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestEquations {
    pub equations: Vec<Poly>,
    /// `true` where the equation vanishes identically.
    pub trivial: Vec<bool>,
    pub unknowns: Vec<Symbol>,
    pub knowns: Vec<Symbol>,
}

impl TestEquations {
    /// Equations that carry information.
    pub fn nontrivial(&self) -> Vec<Poly> {
        self.equations
            .iter()
            .zip(&self.trivial)
            .filter(|(_, t)| !**t)
            .map(|(e, _)| e.clone())
            .collect()
    }
}

impl Serialize for TestEquations {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Eq {
            equation: String,
            trivial: bool,
        }
        #[derive(Serialize)]
        struct Out<'a> {
            equations: Vec<Eq>,
            unknowns: &'a [Symbol],
            knowns: &'a [Symbol],
        }
        Out {
            equations: self
                .equations
                .iter()
                .zip(&self.trivial)
                .map(|(e, t)| Eq { equation: e.to_string(), trivial: *t })
                .collect(),
            unknowns: &self.unknowns,
            knowns: &self.knowns,
        }
        .serialize(s)
    }
}

/// One equation `phi_i(theta') - phi_i(theta)` per invariant.
pub fn identifiability_eqn_list(inv: &InvariantSet, ren: &ParameterRenaming) -> Result<TestEquations, InvariantError> {
    if inv.is_empty() {
        return Err(InvariantError::NoInvariants);
    }
    let order = ren.display_order();
    let equations: Vec<Poly> = inv
        .invariants
        .iter()
        .map(|phi| (&ren.prime(phi) - phi).reorder(&order))
        .collect();
    let trivial = equations.iter().map(Poly::is_zero).collect();
    Ok(TestEquations { equations, trivial, unknowns: ren.theta_prime.clone(), knowns: ren.theta.clone() })
}
