//! Approximation of the shift-K filter by order-S diagonal linear
//! recurrences: closed-form losses, optimal-coefficient solvers, lower and
//! upper bounds, frequency-window asymptotics and synthetic copy-task
//! training.
//!
//! The kernel under study is `c_k = sum_{s=1}^S b_s a_s^k` with stable
//! complex poles (`|a_s| < 1`); the target is the lagged delta
//! `d_k = 1_{k = K}`. Everything is desk-scale, dense and double-precision.
//!
//! ```
//! use shiftk_core::{TaskSpec, filter::shiftk_init, loss::loss_white_closed,
//!                   bounds::lower_bound_white};
//!
//! let spec = TaskSpec::new(51, 500, 0.0, 1.0)?;
//! let filter = shiftk_init(&spec)?;
//! let loss = loss_white_closed(&filter, spec.k)?;
//! // The white-noise loss sits between the theoretical bound and 1.
//! assert!(loss > lower_bound_white(spec.s, spec.k) && loss < 1.0);
//! # Ok::<(), shiftk_core::Error>(())
//! ```

pub mod asymptotics;
pub mod bounds;
pub mod csvfmt;
pub mod error;
pub mod experiments;
pub mod filter;
pub mod linalg;
pub mod loss;
pub mod signal;

#[cfg(test)]
pub(crate) mod testutil;

pub use asymptotics::{BoundEstimate, WindowCsvRow, WindowPoint};
pub use bounds::{BoundValues, CauchyGram};
pub use error::{Error, Result};
pub use experiments::{ArDatasetSpec, ArSample, InitScheme, TrainConfig, TrainRun};
pub use filter::{FilterParams, IndexConvention, ShiftKTarget, TaskSpec};
pub use loss::LossReport;
pub use signal::{ComplexSeq, FreqGrid, GridScheme, NoiseModel};
