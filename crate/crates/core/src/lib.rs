//! Weighted analytic centers and interactive weight-space cutting-plane
//! methods for linear programs with uncertain right-hand sides.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod api;
pub mod cli;
pub mod cutting_plane;
pub mod lp;
pub mod lp_model;
pub mod prob_bounds;
pub mod utility;
pub mod serde_util;
pub mod session;
pub mod wac;
