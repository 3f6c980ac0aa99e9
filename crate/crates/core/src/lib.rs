pub mod algebra;
pub mod structures;
pub mod transfer;
pub mod invariants;
pub mod solver;
pub mod classify;
pub mod report;
pub mod service;
