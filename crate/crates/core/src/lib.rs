//! Attractors of generalized iterated function systems.
//!
//! A system of order `m` consists of `n` contractions `f_i : X^m -> X` on
//! `X = R^d`. Its attractor is the fixed point of the set map
//! `F(K_1, .., K_m) = ⋃ f_i(K_1 × .. × K_m)`. This crate approximates it
//! deterministically, by a chaos game, and for affine maps by closed-form
//! code-space tables.

pub mod affine;
pub mod budget;
pub mod chaos;
pub mod codespace;
pub mod deterministic;
pub mod error;
pub mod exec;
pub mod hutchinson;
pub mod metric;
pub mod point;
pub mod render;
pub mod system;

mod grid;

pub use budget::Budget;
pub use error::{GifsError, Result};
pub use exec::Execution;
pub use point::{Point, PointCloud};
pub use system::{AffineMap, ContractivityReport, GifsMap, GifsSystem, Matrix};
