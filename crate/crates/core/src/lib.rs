//! Finite epistemic models with comparative knowledge and common distributed
//! knowledge, reading dynamics, reduction to the static language, and a
//! satisfiability procedure over pseudo-models.

pub mod checker;
pub mod decision;
pub mod dynamics;
pub mod gen;
pub mod models;
pub mod reducer;
pub mod syntax;
