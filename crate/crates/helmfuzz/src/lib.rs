//! Fuzzy heading autopilot for a large tanker, together with the plant
//! model and closed-loop machinery needed to exercise it:
//!
//! - [`fis`] — Mamdani inference over triangular sets with centroid
//!   defuzzification.
//! - [`ruledsl`] — the `.fis` text format and the built-in controller.
//! - [`vessel`] — depth-dependent sway-yaw dynamics and an RK4 stepper.
//! - [`guidance`] — second-order reference model, command schedules and
//!   depth profiles.
//! - [`simloop`] — the closed-loop executor, its log and summary metrics.
//! - [`presets`] — canned course-changing and tracking scenarios.

pub mod fis;
pub mod guidance;
pub mod presets;
pub mod ruledsl;
pub mod simloop;
pub mod vessel;

pub use fis::FisDefinition;
pub use simloop::{compute_metrics, run_scenario, Metrics, Scenario, SimLog, SimRecord};
