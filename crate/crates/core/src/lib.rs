//! Agent-based simulation of a hospital ward in which human doctors, robot
//! doctors and daily visitors interact with patients.
//!
//! The crate is organised around five pieces:
//!
//! * [`fuzzy`] — a type-1 Mamdani fuzzy-inference engine plus a small
//!   line-oriented definition format, used for all treatment/visit duration
//!   decisions;
//! * [`agents`] and [`statechart`] — the agent records (patients, providers,
//!   visitors, beds), their stereotype parameters and the statechart
//!   transition tables that drive them;
//! * [`network`] — the bed-adjacency trust network with hourly diffusion and
//!   green/yellow/red edge classification;
//! * [`sim`] — the deterministic 1-minute-tick scheduler, treatment queue and
//!   end-to-end run loop;
//! * [`experiments`] and [`config`] — the JSON configuration schema,
//!   replication runner, sweep/aggregation machinery and hypothesis report.
//!
//! A run is a pure function of `(config, seed)`: identical inputs produce
//! byte-identical trace output.

pub mod agents;
pub mod config;
pub mod experiments;
pub mod fuzzy;
pub mod network;
pub mod sim;
pub mod statechart;

pub use config::ExperimentConfig;
pub use experiments::{run_replications, RunSummary};
pub use fuzzy::FuzzySystem;
pub use sim::{run_simulation, RunResult};
