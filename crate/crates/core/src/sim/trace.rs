//! Trace rows and CSV rendering. Every output file starts with `#` header
//! lines embedding the config hash, seed and crate version, so any result
//! is reproducible from its own header. Nothing time- or host-dependent is
//! ever written: identical runs produce byte-identical files.

use std::fmt::Write as _;

use crate::network::EdgeCounts;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One sampled row of the per-interval trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub tick: u64,
    pub day: u32,
    pub mean_mental_state: f64,
    pub mean_trust_robots: f64,
    pub mean_opinion_doctors: f64,
    pub mean_opinion_robots: f64,
    pub queue_length: usize,
    pub edges: EdgeCounts,
}

/// Per-patient final state, written next to the trace.
#[derive(Debug, Clone, PartialEq)]
pub struct PatientFinal {
    pub id: usize,
    pub bed: Option<usize>,
    pub mental_state: f64,
    pub trust_robots: f64,
    pub opinion_doctors: f64,
    pub opinion_robots: f64,
    pub severity: f64,
    pub state: &'static str,
}

/// One edge observation in the optional per-day network dump.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkDumpRow {
    pub day: u32,
    pub i: usize,
    pub j: usize,
    pub abs_diff: f64,
    pub color: &'static str,
}

/// Provenance lines shared by all output files of one run.
#[derive(Debug, Clone, Default)]
pub struct TraceHeader {
    pub config_hash: String,
    pub seed: u64,
    pub scenario: Option<String>,
    pub overrides: Vec<String>,
    pub green_max: f64,
    pub yellow_max: f64,
}

impl TraceHeader {
    fn render(&self, out: &mut String) {
        let _ = writeln!(out, "# wardsim v{VERSION}");
        let _ = writeln!(out, "# config_hash: {}", self.config_hash);
        let _ = writeln!(out, "# seed: {}", self.seed);
        if let Some(name) = &self.scenario {
            let _ = writeln!(out, "# scenario: {name}");
        }
        for line in &self.overrides {
            let _ = writeln!(out, "# override: {line}");
        }
        let _ = writeln!(
            out,
            "# edge_thresholds: green<{} yellow<{}",
            self.green_max, self.yellow_max
        );
    }
}

pub fn trace_csv(header: &TraceHeader, rows: &[TraceRow]) -> String {
    let mut out = String::new();
    header.render(&mut out);
    out.push_str(
        "tick,day,meanMentalState,meanTrustRobots,meanOpinionDoctors,meanOpinionRobots,queueLength,edgesGreen,edgesYellow,edgesRed\n",
    );
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6},{:.6},{},{},{},{}",
            row.tick,
            row.day,
            row.mean_mental_state,
            row.mean_trust_robots,
            row.mean_opinion_doctors,
            row.mean_opinion_robots,
            row.queue_length,
            row.edges.green,
            row.edges.yellow,
            row.edges.red,
        );
    }
    out
}

pub fn patients_csv(header: &TraceHeader, rows: &[PatientFinal]) -> String {
    let mut out = String::new();
    header.render(&mut out);
    out.push_str("id,bed,mentalState,trustRobots,opinionDoctors,opinionRobots,severity,state\n");
    for row in rows {
        let bed = row.bed.map(|b| b.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{}",
            row.id,
            bed,
            row.mental_state,
            row.trust_robots,
            row.opinion_doctors,
            row.opinion_robots,
            row.severity,
            row.state,
        );
    }
    out
}

pub fn network_csv(header: &TraceHeader, rows: &[NetworkDumpRow]) -> String {
    let mut out = String::new();
    header.render(&mut out);
    out.push_str("day,i,j,absDiff,color\n");
    for row in rows {
        let _ = writeln!(out, "{},{},{},{:.6},{}", row.day, row.i, row.j, row.abs_diff, row.color);
    }
    out
}
