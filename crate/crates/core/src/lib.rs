//! Tydi-lang compiler frontend.

pub mod backend;
pub mod cli;
pub mod diag;
pub mod drc;
pub mod eval;
pub mod model;
pub mod parser;
pub mod pipeline;
pub mod sugar;
pub mod syntax;
pub mod value;
