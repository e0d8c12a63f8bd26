//! Numerical decision procedures for the convex and star transform orders
//! between lifetime distributions and the systems built from them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod config;
pub mod distcore;
pub mod error;
pub mod evidence;
pub mod fixtures;
pub mod grid;
pub mod lifetime;
pub mod logspace;
pub mod orders;
pub mod report;
pub mod systems;

pub use error::{Error, Result};
pub use lifetime::{Functional, Lifetime};
