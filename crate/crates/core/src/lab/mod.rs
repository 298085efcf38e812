//! Runnable surface: published cases, seeded trials, counterexample search
//! and the command line.

pub mod cli;
pub mod registry;
pub mod search;
pub mod trials;

pub use registry::{reproduce, ReproduceOutcome};
pub use search::{search, SearchConfig, SearchSummary};
pub use trials::{run_trial, run_trial_with, TrialInputs};
