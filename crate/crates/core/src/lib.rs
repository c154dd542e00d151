//! Compressor surge analysis and anti-surge valve control.
//!
//! * [`compressor`]: cubic compressor map, two-state surge model, equilibria.
//! * [`stability`]: Jacobian, discriminant, surge line, Bendixson indicator,
//!   limit-cycle detection.
//! * [`ode`]: fixed-step RK4 engine and trajectory recording.
//! * [`control`]: saturating valve, disturbance, PD/PID and MIT-rule adaptive
//!   laws, Ziegler–Nichols tuning, closed-loop simulation.
//! * [`averaging`]: averaged adaptation dynamics and their eigenvalues.
//! * [`scenario`], [`output`], [`cli`]: configuration files, CSV/SVG output
//!   and the command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod averaging;
pub mod cli;
pub mod compressor;
pub mod control;
mod error;
pub mod ode;
pub mod output;
pub mod scenario;
pub mod stability;

pub use error::{Error, Result};
