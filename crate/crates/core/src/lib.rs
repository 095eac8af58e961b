//! Numerical verification of configurational-stress identities for
//! variational problems of elasticity: Eshelby tensors, Clapeyron-type
//! relations, invariant integrals, interface and shock jump conditions,
//! and energy release by void nucleation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli_report;
pub mod energy_models;
pub mod error;
pub mod fields_domains;
pub mod identity_lab;
pub mod radial_solver;
pub mod shock_dynamics;
pub mod tensor_core;
pub mod void_energy;

pub use error::{Error, Result};
