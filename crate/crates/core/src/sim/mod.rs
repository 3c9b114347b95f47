//! Discrete-time simulation core: a 1-minute-tick scheduler, the FIFO
//! treatment queue, and the end-to-end run loop.
//!
//! Tick order is fixed and canonical: advance clock, timeouts, conditions,
//! arrivals, visitor window, dispatch, treatment/visit effects, hourly trust
//! diffusion, midnight decay, trace sampling. One run is strictly
//! single-threaded; `(config, seed)` determines the entire trace, and
//! separate replications share no mutable state.

mod engine;
pub mod rng;
pub mod trace;

use std::collections::VecDeque;

use thiserror::Error;

use crate::agents::PatientId;
use crate::config::{ConfigError, ExperimentConfig, FlsSet};
use crate::network::EdgeCounts;

pub use engine::Ward;
pub use trace::{patients_csv, network_csv, trace_csv, NetworkDumpRow, PatientFinal, TraceHeader, TraceRow, VERSION};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Wall clock of the ward: minute of day plus day index. Advances by
/// exactly one minute per tick; the day increments on wrap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimClock {
    pub day: u32,
    pub minute_of_day: u32,
}

impl SimClock {
    pub fn start() -> Self {
        Self { day: 0, minute_of_day: 0 }
    }

    pub fn advance(&mut self) {
        self.minute_of_day += 1;
        if self.minute_of_day == 1440 {
            self.minute_of_day = 0;
            self.day += 1;
        }
    }

    pub fn total_minutes(&self) -> u64 {
        self.day as u64 * 1440 + self.minute_of_day as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RequestKind {
    CheckUp,
    SelfRequest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueueEntry {
    pub patient: PatientId,
    pub kind: RequestKind,
    pub enqueued_tick: u64,
}

/// FIFO queue of patients waiting to be seen; a patient appears at most
/// once. Entries become dispatchable the tick after they are enqueued so a
/// patient never takes two statechart transitions in one tick.
#[derive(Debug, Clone, Default)]
pub struct TreatmentQueue {
    entries: VecDeque<QueueEntry>,
}

impl TreatmentQueue {
    pub fn contains(&self, patient: PatientId) -> bool {
        self.entries.iter().any(|e| e.patient == patient)
    }

    pub fn push(&mut self, entry: QueueEntry) {
        debug_assert!(!self.contains(entry.patient), "duplicates are filtered before push");
        self.entries.push_back(entry);
    }

    /// Head entry if it was enqueued before this tick.
    pub fn peek_dispatchable(&self, now: u64) -> Option<&QueueEntry> {
        self.entries.front().filter(|e| e.enqueued_tick < now)
    }

    pub fn pop(&mut self) -> Option<QueueEntry> {
        self.entries.pop_front()
    }

    /// Removes a queued request (a visitor pulled the patient back to the
    /// bedside). Returns whether an entry was removed.
    pub fn cancel(&mut self, patient: PatientId) -> bool {
        let before = self.entries.len();
        self.entries.retain(|e| e.patient != patient);
        before != self.entries.len()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &QueueEntry> {
        self.entries.iter()
    }
}

/// Request accounting: every enqueued request is dispatched, cancelled by a
/// visit, or still queued when the run ends. Nothing is lost.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueueStats {
    pub enqueued: u64,
    pub dispatched: u64,
    pub cancelled_by_visit: u64,
    pub duplicates_ignored: u64,
    pub remaining_at_end: u64,
}

/// Everything a finished run reports: final response values, the sampled
/// time series, per-patient final states and the queue accounting.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub final_mean_mental_state: f64,
    pub final_mean_trust_robots: f64,
    pub final_mean_opinion_doctors: f64,
    pub final_mean_opinion_robots: f64,
    pub final_edges: EdgeCounts,
    /// Mean over sampled trace rows of the red share of classified edges.
    pub red_edge_fraction: f64,
    pub trace: Vec<TraceRow>,
    pub patients: Vec<PatientFinal>,
    pub queue_stats: QueueStats,
    /// Per-day edge dump, present when requested.
    pub network_dump: Option<Vec<NetworkDumpRow>>,
}

/// Per-tick hook for tests and invariant checkers.
pub trait Observer {
    fn on_tick(&mut self, ward: &Ward);
}

struct NoopObserver;

impl Observer for NoopObserver {
    fn on_tick(&mut self, _ward: &Ward) {}
}

/// Runs one replication. The configuration is validated before anything is
/// initialized; identical `(config, seed)` pairs give identical results.
pub fn run_simulation(
    config: &ExperimentConfig,
    fls: &FlsSet,
    seed: u64,
) -> Result<RunResult, SimError> {
    run_simulation_observed(config, fls, seed, false, &mut NoopObserver)
}

/// [`run_simulation`] with the per-day network edge dump enabled on demand.
pub fn run_simulation_with_options(
    config: &ExperimentConfig,
    fls: &FlsSet,
    seed: u64,
    dump_network: bool,
) -> Result<RunResult, SimError> {
    run_simulation_observed(config, fls, seed, dump_network, &mut NoopObserver)
}

/// [`run_simulation`] with a per-tick observer and an optional per-day
/// network edge dump.
pub fn run_simulation_observed(
    config: &ExperimentConfig,
    fls: &FlsSet,
    seed: u64,
    dump_network: bool,
    observer: &mut dyn Observer,
) -> Result<RunResult, SimError> {
    config.validate()?;
    let mut ward = Ward::new(config, fls, seed, dump_network);
    let total_ticks = config.duration_days as u64 * 1440;
    for _ in 0..total_ticks {
        ward.step();
        observer.on_tick(&ward);
    }
    Ok(ward.finish())
}
