//! Experiment configuration: the JSON schema, validation, CLI overrides and
//! fuzzy-system loading. Every field has a default, so `{}` is a complete
//! configuration; the shipped fuzzy definitions are embedded and used
//! whenever no explicit file path is given.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::agents::EffectParams;
use crate::fuzzy::{load_fls_definition, FuzzyError, FuzzySystem};
use crate::network::Thresholds;

pub const DOCTOR_FLS_TEXT: &str = include_str!("../data/doctor.fls");
pub const ROBOT_FLS_TEXT: &str = include_str!("../data/robot.fls");
pub const VISITOR_PROPENSITY_FLS_TEXT: &str = include_str!("../data/visitor_propensity.fls");
pub const VISITOR_DURATION_FLS_TEXT: &str = include_str!("../data/visitor_duration.fls");

pub fn default_doctor_fls() -> FuzzySystem {
    load_fls_definition(DOCTOR_FLS_TEXT).expect("shipped doctor.fls is valid")
}

pub fn default_robot_fls() -> FuzzySystem {
    load_fls_definition(ROBOT_FLS_TEXT).expect("shipped robot.fls is valid")
}

pub fn default_visitor_propensity_fls() -> FuzzySystem {
    load_fls_definition(VISITOR_PROPENSITY_FLS_TEXT).expect("shipped visitor_propensity.fls is valid")
}

pub fn default_visitor_duration_fls() -> FuzzySystem {
    load_fls_definition(VISITOR_DURATION_FLS_TEXT).expect("shipped visitor_duration.fls is valid")
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("fuzzy definition '{path}': {source}")]
    Fls { path: String, source: FuzzyError },
    #[error("cannot read '{path}': {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(default, deny_unknown_fields)]
pub struct StaffSpec {
    pub senior: u32,
    pub junior: u32,
}

impl Default for StaffSpec {
    fn default() -> Self {
        Self { senior: 2, junior: 1 }
    }
}

impl StaffSpec {
    pub fn total(&self) -> u32 {
        self.senior + self.junior
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RobotSpec {
    pub humanlike: u32,
    pub robotlike: u32,
    /// Humanlike variable assigned to the humanlike group; must be in [0.5, 1].
    pub humanlike_h: f64,
    /// Humanlike variable assigned to the robotlike group; must be in [0, 0.5).
    pub robotlike_h: f64,
}

impl Default for RobotSpec {
    fn default() -> Self {
        Self { humanlike: 1, robotlike: 1, humanlike_h: 0.8, robotlike_h: 0.2 }
    }
}

impl RobotSpec {
    pub fn total(&self) -> u32 {
        self.humanlike + self.robotlike
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkParams {
    pub green_max: f64,
    pub yellow_max: f64,
    /// Per-hour relaxation rate toward the occupied-neighbour mean.
    pub alpha_per_hour: f64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        Self { green_max: 0.1, yellow_max: 0.3, alpha_per_hour: 0.05 }
    }
}

impl NetworkParams {
    pub fn thresholds(&self) -> Thresholds {
        Thresholds { green_max: self.green_max, yellow_max: self.yellow_max }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleParams {
    /// Minute of day the visiting window opens (default 14:00).
    pub visit_window_start_minute: u32,
    /// Window length; also the cap on a single visit.
    pub visit_window_minutes: u32,
    /// Mean of the exponential inter-request time for self-requests.
    pub self_request_mean_minutes: f64,
    /// Daily probability that an at-home patient requests admission.
    pub admit_probability: f64,
    /// Trace sampling interval in simulated minutes.
    pub trace_interval_minutes: u32,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        Self {
            visit_window_start_minute: 14 * 60,
            visit_window_minutes: 60,
            self_request_mean_minutes: 480.0,
            admit_probability: 0.2,
            trace_interval_minutes: 60,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct InitParams {
    pub mental_low: f64,
    pub mental_high: f64,
    pub trust_initial: f64,
    pub severity_low: f64,
    pub severity_high: f64,
    /// How many patients start admitted (in beds 0..n). Default: as many as
    /// fit, `min(patients, beds)`; the rest start at home.
    pub initial_in_bed: Option<u32>,
}

impl Default for InitParams {
    fn default() -> Self {
        Self {
            mental_low: 0.4,
            mental_high: 0.8,
            trust_initial: 0.5,
            severity_low: 3.0,
            severity_high: 8.0,
            initial_in_bed: None,
        }
    }
}

/// Paths to fuzzy definition files; `None` selects the embedded default.
/// Relative paths are resolved against the configuration file's directory.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct FlsPaths {
    pub doctor: Option<PathBuf>,
    pub robot: Option<PathBuf>,
    pub visitor_propensity: Option<PathBuf>,
    pub visitor_duration: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub doctors: StaffSpec,
    pub robots: RobotSpec,
    pub patients: u32,
    pub beds: u32,
    pub visitors: u32,
    pub duration_days: u32,
    pub seed_base: u64,
    pub replications: u32,
    /// Capacity of the at-home population; admissions beyond beds wait here.
    pub home_capacity: u32,
    /// When several providers are idle, pick doctors first.
    pub prefer_doctors: bool,
    pub effects: EffectParams,
    pub network: NetworkParams,
    pub schedule: ScheduleParams,
    pub init: InitParams,
    pub fls: FlsPaths,
    /// Testing hook: shuffle per-phase agent iteration order with this seed.
    /// Results are iteration-order independent, so traces must not change.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iteration_shuffle_seed: Option<u64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            doctors: StaffSpec::default(),
            robots: RobotSpec::default(),
            patients: 20,
            beds: 12,
            visitors: 10,
            duration_days: 30,
            seed_base: 42,
            replications: 1,
            home_capacity: 1000,
            prefer_doctors: false,
            effects: EffectParams::default(),
            network: NetworkParams::default(),
            schedule: ScheduleParams::default(),
            init: InitParams::default(),
            fls: FlsPaths::default(),
            iteration_shuffle_seed: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Field-by-field validation; error messages name the offending field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError::Invalid(msg));
        if self.beds == 0 {
            return fail("beds: a ward needs at least one bed".into());
        }
        if self.replications == 0 {
            return fail("replications: must be at least 1".into());
        }
        if self.patients > self.beds + self.home_capacity {
            return fail(format!(
                "patients: {} exceeds beds + home_capacity = {}",
                self.patients,
                self.beds + self.home_capacity
            ));
        }
        if !(0.5..=1.0).contains(&self.robots.humanlike_h) {
            return fail(format!(
                "robots.humanlike_h: must be in [0.5, 1], got {}",
                self.robots.humanlike_h
            ));
        }
        if !(0.0..0.5).contains(&self.robots.robotlike_h) {
            return fail(format!(
                "robots.robotlike_h: must be in [0, 0.5), got {}",
                self.robots.robotlike_h
            ));
        }
        self.effects.validate().map_err(ConfigError::Invalid)?;
        let net = self.network;
        if !(0.0 < net.green_max && net.green_max < net.yellow_max && net.yellow_max <= 2.0) {
            return fail(format!(
                "network.green_max/network.yellow_max: need 0 < green_max < yellow_max <= 2, got {}/{}",
                net.green_max, net.yellow_max
            ));
        }
        if !(net.alpha_per_hour > 0.0 && net.alpha_per_hour < 1.0) {
            return fail(format!(
                "network.alpha_per_hour: must be in (0, 1), got {}",
                net.alpha_per_hour
            ));
        }
        let sched = self.schedule;
        if sched.visit_window_minutes == 0 || sched.visit_window_minutes > 1440 {
            return fail(format!(
                "schedule.visit_window_minutes: must be in [1, 1440], got {}",
                sched.visit_window_minutes
            ));
        }
        if sched.visit_window_start_minute + sched.visit_window_minutes > 1440 {
            return fail(format!(
                "schedule.visit_window_start_minute: window [{}, {}] leaves the day",
                sched.visit_window_start_minute,
                sched.visit_window_start_minute + sched.visit_window_minutes
            ));
        }
        if !(sched.self_request_mean_minutes > 0.0) {
            return fail(format!(
                "schedule.self_request_mean_minutes: must be positive, got {}",
                sched.self_request_mean_minutes
            ));
        }
        if !(0.0..=1.0).contains(&sched.admit_probability) {
            return fail(format!(
                "schedule.admit_probability: must be in [0, 1], got {}",
                sched.admit_probability
            ));
        }
        if sched.trace_interval_minutes == 0 {
            return fail("schedule.trace_interval_minutes: must be at least 1".into());
        }
        let init = self.init;
        if !(0.0 <= init.mental_low && init.mental_low <= init.mental_high && init.mental_high <= 1.0)
        {
            return fail(format!(
                "init.mental_low/init.mental_high: need 0 <= low <= high <= 1, got {}/{}",
                init.mental_low, init.mental_high
            ));
        }
        if !(0.0..=1.0).contains(&init.trust_initial) {
            return fail(format!("init.trust_initial: must be in [0, 1], got {}", init.trust_initial));
        }
        if !(0.0 <= init.severity_low
            && init.severity_low <= init.severity_high
            && init.severity_high <= 10.0)
        {
            return fail(format!(
                "init.severity_low/init.severity_high: need 0 <= low <= high <= 10, got {}/{}",
                init.severity_low, init.severity_high
            ));
        }
        if let Some(n) = init.initial_in_bed {
            if n > self.patients.min(self.beds) {
                return fail(format!(
                    "init.initial_in_bed: {} exceeds min(patients, beds) = {}",
                    n,
                    self.patients.min(self.beds)
                ));
            }
        }
        Ok(())
    }

    /// Short, stable hash of the canonical JSON form; embedded in every
    /// output file header so results carry their own provenance.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(16);
        for byte in digest.iter().take(8) {
            let _ = write!(hex, "{byte:02x}");
        }
        hex
    }
}

/// The four loaded fuzzy systems, shared read-only across replications.
#[derive(Debug, Clone)]
pub struct FlsSet {
    pub doctor: Arc<FuzzySystem>,
    pub robot: Arc<FuzzySystem>,
    pub visitor_propensity: Arc<FuzzySystem>,
    pub visitor_duration: Arc<FuzzySystem>,
}

fn load_one(
    path: &Option<PathBuf>,
    base_dir: Option<&Path>,
    embedded: &str,
    embedded_name: &str,
    required_inputs: &[&str],
) -> Result<Arc<FuzzySystem>, ConfigError> {
    let (text, name) = match path {
        Some(p) => {
            let resolved = match base_dir {
                Some(dir) if p.is_relative() => dir.join(p),
                _ => p.clone(),
            };
            let text = std::fs::read_to_string(&resolved).map_err(|source| ConfigError::Io {
                path: resolved.display().to_string(),
                source,
            })?;
            (text, resolved.display().to_string())
        }
        None => (embedded.to_string(), embedded_name.to_string()),
    };
    let system = load_fls_definition(&text)
        .map_err(|source| ConfigError::Fls { path: name.clone(), source })?;
    for required in required_inputs {
        if !system.inputs().iter().any(|v| v.name() == *required) {
            return Err(ConfigError::Invalid(format!(
                "fls: '{name}' must declare an input named '{required}'"
            )));
        }
    }
    Ok(Arc::new(system))
}

impl FlsPaths {
    /// Loads all four systems, falling back to the embedded defaults, and
    /// checks that each declares the inputs the agents will feed it.
    pub fn load(&self, base_dir: Option<&Path>) -> Result<FlsSet, ConfigError> {
        let treatment_inputs = ["severity", "mentalState"];
        let visitor_inputs = ["daysSinceLastVisit", "patientMentalState"];
        Ok(FlsSet {
            doctor: load_one(&self.doctor, base_dir, DOCTOR_FLS_TEXT, "<builtin doctor.fls>", &treatment_inputs)?,
            robot: load_one(&self.robot, base_dir, ROBOT_FLS_TEXT, "<builtin robot.fls>", &treatment_inputs)?,
            visitor_propensity: load_one(
                &self.visitor_propensity,
                base_dir,
                VISITOR_PROPENSITY_FLS_TEXT,
                "<builtin visitor_propensity.fls>",
                &visitor_inputs,
            )?,
            visitor_duration: load_one(
                &self.visitor_duration,
                base_dir,
                VISITOR_DURATION_FLS_TEXT,
                "<builtin visitor_duration.fls>",
                &visitor_inputs,
            )?,
        })
    }
}
