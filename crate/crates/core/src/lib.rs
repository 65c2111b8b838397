//! Learner-path analytics over course clickstreams.
//!
//! The crate is `no_std` (with `alloc`) and contains only pure algorithms:
//!
//! - [`ingest`]: course structures, first-access learner paths, cohort labels
//!   and a seeded synthetic cohort generator.
//! - [`pathflow`]: linear / catch-up transition classification and
//!   step-level (fish-eye) or block-level (bird-eye) flow networks.
//! - [`themes`]: dropout-after-theme counts and catch-up theme transitions.
//! - [`stats`]: Shapiro-Wilk and Wilcoxon signed-rank tests and the paired
//!   completer-vs-dropout comparison built on them.
//! - [`boost`]: early-dropout features and two gradient-boosted tree learners.
//!
//! Parsing, rendering and the command line live in the `pathlens` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod boost;
pub mod ingest;
pub mod pathflow;
pub mod stats;
pub mod themes;

pub(crate) mod math;

pub use ingest::{ActivityEvent, CohortLabel, CourseStep, CourseStructure, LearnerPath, StepId, Theme, Timestamp};
