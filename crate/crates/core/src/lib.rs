//! Survival-analysis toolkit for non-proportional hazards.
//!
//! The crate covers four layers:
//!
//! - [`data`]: datasets, event tables and Kaplan-Meier curves,
//! - [`wlrt`]: log-rank and Fleming-Harrington weighted log-rank tests,
//! - [`whr`]: the weighted hazard ratio Cox model (`lambda0(t) exp(A(t) beta X)`),
//! - [`dgm`] and [`sim`]: data-generating mechanisms under which the
//!   `G^rho` and `G^gamma` tests are optimal, and a Monte Carlo harness that
//!   checks how well the weighted hazard ratio recovers the true profile.
//!
//! ```
//! use nph::data::{Arm, Dataset, Observation};
//! use nph::wlrt::{self, WeightSpec};
//!
//! let ds = Dataset::new(vec![
//!     Observation::new(1.0, true, Arm::Treatment),
//!     Observation::new(2.0, false, Arm::Control),
//! ])
//! .unwrap();
//! let res = wlrt::test_dataset(&ds, WeightSpec::LOG_RANK).unwrap();
//! assert!((res.z - 1.0).abs() < 1e-12);
//! ```

pub mod cli;
pub mod data;
pub mod dgm;
pub mod error;
pub mod io;
pub mod quad;
pub mod rng;
pub mod sim;
pub mod whr;
pub mod wlrt;

pub use error::{NphError, Result};
