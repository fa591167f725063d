//! Panel-blocked Cholesky, LU and QR factorizations whose trailing-matrix
//! updates are deferred for up to `s` columns and then applied as one
//! rectangular product through a pluggable multiplication backend.

// Breakdown tests are written `!(x > 0.0)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decomp;
pub mod error;
pub mod generate;
pub mod matmul;
pub mod matrix;
pub mod mmio;
pub mod oracle;
pub mod policy;
pub mod report;

pub use decomp::{
    blocked_cholesky, blocked_lu, blocked_qr, DecompStats, PanelSchedule, PanelState,
};
pub use error::{Error, Result};
pub use matmul::{MulBackend, OpCount};
pub use matrix::{Matrix, Region};
pub use policy::{predict_cost, sweep_s, BlockPolicy, CostEstimate};
pub use report::{Factors, Kind, RunReport};
