//! Cubical ω-categories with connections: foldings, shells, thin elements
//! and their fillers, with finite models for mechanical checking.

pub mod array;
pub mod commands;
pub mod cube;
pub mod expr;
pub mod fillers;
pub mod folding;
pub mod laws;
pub mod models;
pub mod shell;
pub mod thin;
pub mod verify;

pub use cube::{CubeError, CubeResult, CubeSystem, Sign};
