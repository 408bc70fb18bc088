//! Simulation and statistical verification of point-process limits in the
//! coupon collector's and Dixie cup problems.
//!
//! The discrete scheme ([`discrete`]) draws one uniformly typed coupon per
//! unit time; the poissonized scheme ([`poissonized`]) attaches unit-rate
//! exponential gaps to the same marks, which couples the two exactly.
//! Normalized arrival times form point patterns ([`point_process`]) that
//! are compared with closed-form limits ([`limit_laws`]) by the tests in
//! [`stats`]. [`experiments`] runs declarative, seeded sweeps and persists
//! the reports.

pub mod discrete;
pub mod error;
pub mod experiments;
pub mod limit_laws;
pub mod point_process;
pub mod poissonized;
pub mod samplers;
pub mod special;
pub mod stats;

pub use discrete::{run_discrete, CollectorTrace};
pub use error::{Error, Result};
pub use limit_laws::LimitLaw;
pub use point_process::{Normalization, PointPattern, RarePath};
pub use poissonized::{run_coupled, CoupledTrace};
pub use samplers::{SeedSpec, Stream};
pub use stats::GofResult;
