//! Replication runner, sweep machinery and aggregation.
//!
//! Replication k runs with seed `seed_base + k`, and every scenario of a
//! sweep shares the same seed list (common random numbers), so scenario
//! deltas are paired comparisons. Replications and scenarios may run in
//! parallel; results are assembled by (scenario, replication) index so the
//! output never depends on worker count.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig, FlsSet};
use crate::network::EdgeCounts;
use crate::sim::{RunResult, SimError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("sweep parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("duplicate scenario name '{0}'")]
    DuplicateScenario(String),
    #[error("missing baseline scenario '{0}' in sweep")]
    MissingBaseline(String),
    #[error("scenario '{name}': {source}")]
    Scenario {
        name: String,
        #[source]
        source: ConfigError,
    },
}

/// The scalar responses extracted from one run, in reporting order.
pub const RESPONSES: [&str; 8] = [
    "finalMeanMentalState",
    "finalMeanTrustRobots",
    "finalMeanOpinionDoctors",
    "finalMeanOpinionRobots",
    "redEdgeFraction",
    "finalEdgesGreen",
    "finalEdgesYellow",
    "finalEdgesRed",
];

/// Scalar view of a [`RunResult`], used for aggregation and reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub final_mean_mental_state: f64,
    pub final_mean_trust_robots: f64,
    pub final_mean_opinion_doctors: f64,
    pub final_mean_opinion_robots: f64,
    pub red_edge_fraction: f64,
    pub final_edges: EdgeCounts,
}

impl From<&RunResult> for RunSummary {
    fn from(result: &RunResult) -> Self {
        Self {
            final_mean_mental_state: result.final_mean_mental_state,
            final_mean_trust_robots: result.final_mean_trust_robots,
            final_mean_opinion_doctors: result.final_mean_opinion_doctors,
            final_mean_opinion_robots: result.final_mean_opinion_robots,
            red_edge_fraction: result.red_edge_fraction,
            final_edges: result.final_edges,
        }
    }
}

impl RunSummary {
    pub fn response(&self, name: &str) -> f64 {
        match name {
            "finalMeanMentalState" => self.final_mean_mental_state,
            "finalMeanTrustRobots" => self.final_mean_trust_robots,
            "finalMeanOpinionDoctors" => self.final_mean_opinion_doctors,
            "finalMeanOpinionRobots" => self.final_mean_opinion_robots,
            "redEdgeFraction" => self.red_edge_fraction,
            "finalEdgesGreen" => self.final_edges.green as f64,
            "finalEdgesYellow" => self.final_edges.yellow as f64,
            "finalEdgesRed" => self.final_edges.red as f64,
            other => panic!("unknown response '{other}'"),
        }
    }
}

/// Runs the configured number of replications (seed `seed_base + k`) on the
/// current rayon pool. Results come back ordered by replication index no
/// matter how execution interleaves.
pub fn run_replications(
    config: &ExperimentConfig,
    fls: &FlsSet,
) -> Result<Vec<RunResult>, ExperimentError> {
    run_replications_with(config, fls, false)
}

/// [`run_replications`] with the per-day network dump toggled per run.
pub fn run_replications_with(
    config: &ExperimentConfig,
    fls: &FlsSet,
    dump_network: bool,
) -> Result<Vec<RunResult>, ExperimentError> {
    config.validate()?;
    let results: Result<Vec<RunResult>, SimError> = (0..config.replications as u64)
        .into_par_iter()
        .map(|k| {
            crate::sim::run_simulation_with_options(
                config,
                fls,
                config.seed_base + k,
                dump_network,
            )
        })
        .collect();
    Ok(results?)
}

/// Mean, sample standard deviation, min and max of one response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

/// Standard formulas; the sample standard deviation of a single value is
/// reported as 0. Values are sorted before summing so permuting the input
/// yields a bit-identical summary.
pub fn aggregate(values: &[f64]) -> Aggregate {
    assert!(!values.is_empty(), "aggregate needs at least one value");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let std = if sorted.len() < 2 {
        0.0
    } else {
        (sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Aggregate { mean, std, min: sorted[0], max: sorted[sorted.len() - 1] }
}

/// A named delta over the sweep's base configuration. `overrides` is a JSON
/// object deep-merged onto the base config.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub overrides: serde_json::Value,
}

/// A sweep: a base configuration, the name of the baseline scenario, and a
/// list of scenario deltas.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub base: serde_json::Value,
    pub baseline: String,
    pub scenarios: Vec<Scenario>,
}

fn deep_merge(base: &mut serde_json::Value, overlay: &serde_json::Value) {
    match (base, overlay) {
        (serde_json::Value::Object(base_map), serde_json::Value::Object(overlay_map)) => {
            for (key, value) in overlay_map {
                deep_merge(base_map.entry(key.clone()).or_insert(serde_json::Value::Null), value);
            }
        }
        (slot, value) => *slot = value.clone(),
    }
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let spec: Self = serde_json::from_str(text)?;
        let mut seen = std::collections::BTreeSet::new();
        for scenario in &spec.scenarios {
            if !seen.insert(scenario.name.as_str()) {
                return Err(ExperimentError::DuplicateScenario(scenario.name.clone()));
            }
        }
        if !seen.contains(spec.baseline.as_str()) {
            return Err(ExperimentError::MissingBaseline(spec.baseline.clone()));
        }
        Ok(spec)
    }

    /// Resolves one scenario into a validated configuration.
    pub fn resolve(&self, scenario: &Scenario) -> Result<ExperimentConfig, ExperimentError> {
        let mut merged = if self.base.is_null() {
            serde_json::json!({})
        } else {
            self.base.clone()
        };
        if !scenario.overrides.is_null() {
            deep_merge(&mut merged, &scenario.overrides);
        }
        let config: ExperimentConfig = serde_json::from_value(merged)
            .map_err(|e| ExperimentError::Scenario {
                name: scenario.name.clone(),
                source: ConfigError::Parse(e),
            })?;
        config.validate().map_err(|e| ExperimentError::Scenario {
            name: scenario.name.clone(),
            source: e,
        })?;
        Ok(config)
    }
}

/// One scenario's configuration and per-replication results.
#[derive(Debug)]
pub struct ScenarioOutcome {
    pub name: String,
    pub config: ExperimentConfig,
    pub results: Vec<RunResult>,
}

impl ScenarioOutcome {
    pub fn summaries(&self) -> Vec<RunSummary> {
        self.results.iter().map(RunSummary::from).collect()
    }

    pub fn mean_response(&self, response: &str) -> f64 {
        let values: Vec<f64> =
            self.summaries().iter().map(|s| s.response(response)).collect();
        aggregate(&values).mean
    }
}

/// Runs every scenario of a sweep. All configurations are resolved and
/// validated up front: one bad scenario rejects the whole sweep before any
/// simulation starts.
pub fn run_sweep(
    spec: &SweepSpec,
    fls_base_dir: Option<&Path>,
    dump_network: bool,
) -> Result<Vec<ScenarioOutcome>, ExperimentError> {
    let mut resolved = Vec::with_capacity(spec.scenarios.len());
    for scenario in &spec.scenarios {
        let config = spec.resolve(scenario)?;
        let fls = config.fls.load(fls_base_dir).map_err(|e| ExperimentError::Scenario {
            name: scenario.name.clone(),
            source: e,
        })?;
        resolved.push((scenario.name.clone(), config, fls));
    }
    resolved
        .into_par_iter()
        .map(|(name, config, fls)| {
            let results = run_replications_with(&config, &fls, dump_network)?;
            Ok(ScenarioOutcome { name, config, results })
        })
        .collect()
}

/// One row of the hypothesis report: a scenario response compared with the
/// baseline under common random numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scenario: String,
    pub response: String,
    pub baseline_mean: f64,
    pub scenario_mean: f64,
    pub delta: f64,
}

/// Per-scenario deltas against the named baseline for every response.
/// The baseline's own rows are identically zero.
pub fn hypothesis_report(
    outcomes: &[ScenarioOutcome],
    baseline: &str,
) -> Result<Vec<ReportRow>, ExperimentError> {
    let base = outcomes
        .iter()
        .find(|o| o.name == baseline)
        .ok_or_else(|| ExperimentError::MissingBaseline(baseline.to_string()))?;
    let mut rows = Vec::new();
    for outcome in outcomes {
        for response in RESPONSES {
            let baseline_mean = base.mean_response(response);
            let scenario_mean = outcome.mean_response(response);
            rows.push(ReportRow {
                scenario: outcome.name.clone(),
                response: response.to_string(),
                baseline_mean,
                scenario_mean,
                delta: scenario_mean - baseline_mean,
            });
        }
    }
    Ok(rows)
}

/// `summary.csv`: one row per scenario per response.
pub fn summary_csv(outcomes: &[ScenarioOutcome], header_lines: &[String]) -> String {
    let mut out = String::new();
    for line in header_lines {
        let _ = writeln!(out, "# {line}");
    }
    out.push_str("scenario,response,mean,std,min,max\n");
    for outcome in outcomes {
        let summaries = outcome.summaries();
        for response in RESPONSES {
            let values: Vec<f64> = summaries.iter().map(|s| s.response(response)).collect();
            let agg = aggregate(&values);
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6},{:.6},{:.6}",
                outcome.name, response, agg.mean, agg.std, agg.min, agg.max
            );
        }
    }
    out
}

/// `report.csv`: the hypothesis report rendered as CSV.
pub fn report_csv(rows: &[ReportRow], header_lines: &[String]) -> String {
    let mut out = String::new();
    for line in header_lines {
        let _ = writeln!(out, "# {line}");
    }
    out.push_str("scenario,response,baselineMean,scenarioMean,delta\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6}",
            row.scenario, row.response, row.baseline_mean, row.scenario_mean, row.delta
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::FlsPaths;
    use crate::sim::run_simulation;

    fn tiny_config(days: u32, reps: u32) -> ExperimentConfig {
        let mut config = ExperimentConfig::default();
        config.patients = 4;
        config.beds = 3;
        config.visitors = 2;
        config.duration_days = days;
        config.replications = reps;
        config
    }

    #[test]
    fn aggregate_matches_hand_values() {
        let single = aggregate(&[0.5]);
        assert_eq!(single.mean, 0.5);
        assert_eq!(single.std, 0.0);

        let pair = aggregate(&[0.4, 0.6]);
        assert!((pair.mean - 0.5).abs() < 1e-12);
        assert!((pair.std - 0.1414).abs() < 1e-3);
        assert_eq!(pair.min, 0.4);
        assert_eq!(pair.max, 0.6);
    }

    #[test]
    fn aggregate_is_permutation_invariant() {
        let a = aggregate(&[0.1, 0.7, 0.4]);
        let b = aggregate(&[0.7, 0.4, 0.1]);
        assert_eq!(a, b);
    }

    #[test]
    fn single_replication_equals_direct_run() {
        let config = tiny_config(1, 1);
        let fls = FlsPaths::default().load(None).unwrap();
        let direct = run_simulation(&config, &fls, config.seed_base).unwrap();
        let replicated = run_replications(&config, &fls).unwrap();
        assert_eq!(replicated.len(), 1);
        assert_eq!(replicated[0].trace, direct.trace);
    }

    #[test]
    fn replications_are_reproducible_and_seed_distinct() {
        let config = tiny_config(1, 3);
        let fls = FlsPaths::default().load(None).unwrap();
        let first = run_replications(&config, &fls).unwrap();
        let second = run_replications(&config, &fls).unwrap();
        for (a, b) in first.iter().zip(&second) {
            assert_eq!(a.trace, b.trace);
        }
        assert_ne!(first[0].trace, first[1].trace, "different seeds must differ");
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let config = tiny_config(1, 4);
        let fls = FlsPaths::default().load(None).unwrap();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_replications(&config, &fls))
            .unwrap();
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_replications(&config, &fls))
            .unwrap();
        for (a, b) in one.iter().zip(&four) {
            assert_eq!(a.trace, b.trace);
        }
    }

    #[test]
    fn sweep_requires_known_baseline_and_unique_names() {
        let missing = SweepSpec::from_json(
            r#"{"baseline": "nope", "scenarios": [{"name": "a"}]}"#,
        )
        .unwrap_err();
        assert!(matches!(missing, ExperimentError::MissingBaseline(_)));

        let duplicate = SweepSpec::from_json(
            r#"{"baseline": "a", "scenarios": [{"name": "a"}, {"name": "a"}]}"#,
        )
        .unwrap_err();
        assert!(matches!(duplicate, ExperimentError::DuplicateScenario(_)));
    }

    #[test]
    fn overrides_deep_merge_onto_base() {
        let spec = SweepSpec::from_json(
            r#"{
                "base": {"patients": 6, "beds": 4, "doctors": {"senior": 2, "junior": 2}},
                "baseline": "base",
                "scenarios": [
                    {"name": "base"},
                    {"name": "few", "overrides": {"doctors": {"junior": 0}}}
                ]
            }"#,
        )
        .unwrap();
        let base = spec.resolve(&spec.scenarios[0]).unwrap();
        assert_eq!(base.doctors.junior, 2);
        assert_eq!(base.patients, 6);
        let few = spec.resolve(&spec.scenarios[1]).unwrap();
        assert_eq!(few.doctors.junior, 0);
        assert_eq!(few.doctors.senior, 2, "sibling fields survive the merge");
        assert_eq!(few.patients, 6);
    }

    #[test]
    fn baseline_report_rows_are_zero() {
        let mut config = tiny_config(1, 2);
        config.iteration_shuffle_seed = None;
        let spec_json = serde_json::json!({
            "base": serde_json::to_value(&config).unwrap(),
            "baseline": "baseline",
            "scenarios": [
                {"name": "baseline"},
                {"name": "no-visitors", "overrides": {"visitors": 0}}
            ]
        });
        let spec = SweepSpec::from_json(&spec_json.to_string()).unwrap();
        let outcomes = run_sweep(&spec, None, false).unwrap();
        let rows = hypothesis_report(&outcomes, "baseline").unwrap();
        for row in rows.iter().filter(|r| r.scenario == "baseline") {
            assert_eq!(row.delta, 0.0, "baseline delta for {}", row.response);
        }
        assert_eq!(rows.len(), 2 * RESPONSES.len());
    }
}
