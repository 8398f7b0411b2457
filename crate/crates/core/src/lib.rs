//! Optimal inexactness schedules for first-order methods whose oracles can be
//! queried at a chosen accuracy, at a computational price.
//!
//! The crate is organised bottom-up:
//!
//! - [`cost_models`]: oracle cost shapes `h` and the Lambert `W₀` function.
//! - [`schedule`]: the accuracy- and work-controlled allocation problems,
//!   their closed forms, a KKT water-filling solver and the online rules.
//! - [`certificates`]: impact coefficients for the supported method families
//!   and the fast gradient certificate recursion.
//! - [`fgm`]: the fast gradient method driven by inexact oracles.
//! - [`problems`]: test problems, the synthetic noisy oracle and the
//!   inner-solver oracle for robust optimization over a convex hull.
//! - [`experiment`]: the benchmark harness producing CSV trajectories.
//!
//! Runnable walkthroughs of each capability live in `examples/`.

pub mod certificates;
pub mod cost_models;
pub mod error;
pub mod experiment;
pub mod fgm;
pub mod problems;
pub mod schedule;

pub use cost_models::{lambert_w0, CostKind, CostModel};
pub use error::{Error, Result};
pub use schedule::{
    KktCertificate, Schedule, ScheduleKind, ScheduleProblem, WorkProblem,
};
