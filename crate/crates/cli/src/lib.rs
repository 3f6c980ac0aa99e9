//! Command-line front end and HTTP service for the identifiability workbench.

pub mod api;
pub mod cli;
