//! Agent records and the treatment/visit effect rules.
//!
//! Patients carry a mental state ("satisfaction"), trust in robots, opinions
//! of doctors and robots, and a symptom severity. Providers are doctors
//! (Senior/Junior stereotype, extra treatment minutes) or robots (humanlike
//! variable `h`; `h >= 0.5` reads as humanlike with a positive effect on the
//! patient, `h < 0.5` as robotlike with a negative one). Every effect rule
//! clamps its result back into the field's declared range.

use serde::{Deserialize, Serialize};

use crate::fuzzy::FuzzySystem;

pub type PatientId = usize;
pub type ProviderId = usize;
pub type VisitorId = usize;

pub const SEVERITY_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatientState {
    AtHome,
    WaitingForBed,
    InBedIdle,
    InQueue,
    BeingTreated,
    BeingVisited,
}

impl PatientState {
    pub fn name(&self) -> &'static str {
        match self {
            Self::AtHome => "AtHome",
            Self::WaitingForBed => "WaitingForBed",
            Self::InBedIdle => "InBedIdle",
            Self::InQueue => "InQueue",
            Self::BeingTreated => "BeingTreated",
            Self::BeingVisited => "BeingVisited",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Patient {
    pub id: PatientId,
    pub bed: Option<usize>,
    /// Satisfaction/happiness in [0, 1].
    pub mental_state: f64,
    /// Trust in robot doctors, in [0, 1].
    pub trust_robots: f64,
    /// Opinion of human doctors, in [-1, 1].
    pub opinion_doctors: f64,
    /// Opinion of robot doctors, in [-1, 1].
    pub opinion_robots: f64,
    /// Symptom severity in [0, 10]; discharge at 0.
    pub severity: f64,
    pub last_visit_day: Option<u32>,
    pub state: PatientState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DoctorLevel {
    Senior,
    Junior,
}

impl DoctorLevel {
    /// Extra treatment minutes added on top of the fuzzy decision.
    pub fn extra_treat_minutes(&self) -> u32 {
        match self {
            Self::Senior => 0,
            Self::Junior => 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RobotKind {
    Humanlike,
    Robotlike,
}

/// Robot stereotype: the humanlike variable `h` in [0, 1]. The kind is
/// derived from `h` so the two can never disagree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotStereotype {
    humanlike: f64,
}

impl RobotStereotype {
    pub fn new(humanlike: f64) -> Result<Self, String> {
        if !(0.0..=1.0).contains(&humanlike) {
            return Err(format!("humanlike variable must be in [0, 1], got {humanlike}"));
        }
        Ok(Self { humanlike })
    }

    pub fn h(&self) -> f64 {
        self.humanlike
    }

    pub fn kind(&self) -> RobotKind {
        if self.humanlike >= 0.5 {
            RobotKind::Humanlike
        } else {
            RobotKind::Robotlike
        }
    }

    /// Signed appearance factor `2h - 1` in [-1, 1]; zero at h = 0.5.
    pub fn appearance_factor(&self) -> f64 {
        2.0 * self.humanlike - 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProviderKind {
    Doctor(DoctorLevel),
    Robot(RobotStereotype),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProviderState {
    Idle,
    Treating { patient: PatientId, remaining: u32 },
}

#[derive(Debug, Clone)]
pub struct Provider {
    pub id: ProviderId,
    pub kind: ProviderKind,
    pub state: ProviderState,
}

impl Provider {
    pub fn is_idle(&self) -> bool {
        self.state == ProviderState::Idle
    }

    pub fn is_doctor(&self) -> bool {
        matches!(self.kind, ProviderKind::Doctor(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VisitorState {
    AtHome,
    Visiting { remaining: u32 },
}

/// Visitors are persistent agents, reused every day for the same patient.
#[derive(Debug, Clone)]
pub struct Visitor {
    pub id: VisitorId,
    pub patient: Option<PatientId>,
    pub state: VisitorState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BedState {
    Free,
    Occupied,
}

#[derive(Debug, Clone)]
pub struct Bed {
    pub index: usize,
    pub occupant: Option<PatientId>,
    pub state: BedState,
}

/// Magnitudes for the treatment/visit effect rules. The directions are
/// fixed by the model; the sizes are configuration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct EffectParams {
    /// Mental-state gain per doctor treatment.
    pub doctor_sat_gain: f64,
    /// Base mental-state gain per robot treatment.
    pub robot_sat_base: f64,
    /// Appearance-driven mental-state gain per robot treatment, scaled by 2h-1.
    pub look_gain: f64,
    /// Trust-in-robots gain per robot treatment, scaled by 2h-1.
    pub trust_gain: f64,
    /// Opinion gain per treatment (doctors: flat; robots: scaled by 2h-1).
    pub opinion_gain: f64,
    /// Mental-state gain per full hour of visit.
    pub visit_gain_per_hour: f64,
    /// Mental-state decay applied at every midnight, toward 0.
    pub daily_decay: f64,
    /// Severity reduction per completed treatment.
    pub severity_relief: f64,
}

impl Default for EffectParams {
    fn default() -> Self {
        Self {
            doctor_sat_gain: 0.10,
            robot_sat_base: 0.05,
            look_gain: 0.05,
            trust_gain: 0.05,
            opinion_gain: 0.05,
            visit_gain_per_hour: 0.08,
            daily_decay: 0.02,
            severity_relief: 1.0,
        }
    }
}

impl EffectParams {
    pub fn validate(&self) -> Result<(), String> {
        let fields = [
            ("effects.doctor_sat_gain", self.doctor_sat_gain),
            ("effects.robot_sat_base", self.robot_sat_base),
            ("effects.look_gain", self.look_gain),
            ("effects.trust_gain", self.trust_gain),
            ("effects.opinion_gain", self.opinion_gain),
            ("effects.visit_gain_per_hour", self.visit_gain_per_hour),
            ("effects.daily_decay", self.daily_decay),
            ("effects.severity_relief", self.severity_relief),
        ];
        for (name, value) in fields {
            if !value.is_finite() || value < 0.0 {
                return Err(format!("{name} must be a nonnegative number, got {value}"));
            }
        }
        if self.doctor_sat_gain <= self.robot_sat_base {
            return Err(format!(
                "effects.doctor_sat_gain ({}) must exceed effects.robot_sat_base ({})",
                self.doctor_sat_gain, self.robot_sat_base
            ));
        }
        Ok(())
    }
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

fn clamp_opinion(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// Stereotype arithmetic on an already-inferred crisp duration: round to the
/// nearest minute, add the doctor's extra minutes (robots add nothing), and
/// never go below one minute.
pub fn duration_from_crisp(kind: &ProviderKind, crisp: f64) -> u32 {
    let base = crisp.round().max(0.0) as u32;
    let extra = match kind {
        ProviderKind::Doctor(level) => level.extra_treat_minutes(),
        ProviderKind::Robot(_) => 0,
    };
    (base + extra).max(1)
}

/// Treatment duration in whole minutes for this provider/patient pair.
///
/// The fuzzy system must declare inputs named `severity` and `mentalState`
/// (checked when configuration is loaded). Inputs are clamped inside the
/// engine; a no-rule-fired fallback is logged and still yields a duration.
pub fn treatment_duration(provider: &Provider, patient: &Patient, fls: &FuzzySystem) -> u32 {
    let inference = fls
        .infer_pairs(&[("severity", patient.severity), ("mentalState", patient.mental_state)])
        .expect("treatment FLS misses required inputs; configuration loading validates this");
    if inference.no_rule_fired {
        log::warn!(
            "no rule fired for provider {} treating patient {} (severity {:.3}, mental {:.3}); using universe midpoint",
            provider.id, patient.id, patient.severity, patient.mental_state
        );
    }
    duration_from_crisp(&provider.kind, inference.crisp)
}

/// Applies the post-treatment effects to the patient. Doctors raise mental
/// state and the doctor opinion; robots shift mental state, robot trust and
/// robot opinion by the signed appearance factor 2h-1.
pub fn apply_treatment(patient: &mut Patient, kind: &ProviderKind, params: &EffectParams) {
    match kind {
        ProviderKind::Doctor(_) => {
            patient.mental_state = clamp01(patient.mental_state + params.doctor_sat_gain);
            patient.opinion_doctors = clamp_opinion(patient.opinion_doctors + params.opinion_gain);
        }
        ProviderKind::Robot(stereotype) => {
            let look = stereotype.appearance_factor();
            let satisfaction_gain = params.robot_sat_base + params.look_gain * look;
            patient.mental_state = clamp01(patient.mental_state + satisfaction_gain);
            patient.trust_robots = clamp01(patient.trust_robots + params.trust_gain * look);
            patient.opinion_robots =
                clamp_opinion(patient.opinion_robots + params.opinion_gain * look);
        }
    }
    patient.severity = (patient.severity - params.severity_relief).clamp(0.0, SEVERITY_MAX);
}

/// Days since this patient was last visited, clamped to the fuzzy input
/// universe; never-visited patients count as maximally overdue.
pub fn days_since_last_visit(patient: &Patient, day: u32) -> f64 {
    match patient.last_visit_day {
        Some(last) => (day.saturating_sub(last) as f64).min(14.0),
        None => 14.0,
    }
}

/// The visit tie rule: a crisp propensity of exactly 0.5 still visits.
pub fn decide_visit(propensity_crisp: f64) -> bool {
    propensity_crisp >= 0.5
}

/// Daily visitor decision: returns `Some(minutes)` when the visitor decides
/// to visit, with the duration rounded, capped at the visiting window and at
/// least one minute. The duration system is only consulted when the
/// propensity says visit.
pub fn visitor_decision(
    patient: &Patient,
    day: u32,
    propensity_fls: &FuzzySystem,
    duration_fls: &FuzzySystem,
    window_minutes: u32,
) -> Option<u32> {
    let inputs = [
        ("daysSinceLastVisit", days_since_last_visit(patient, day)),
        ("patientMentalState", patient.mental_state),
    ];
    let propensity = propensity_fls
        .infer_pairs(&inputs)
        .expect("visitor propensity FLS misses required inputs; configuration loading validates this");
    if !decide_visit(propensity.crisp) {
        return None;
    }
    let duration = duration_fls
        .infer_pairs(&inputs)
        .expect("visitor duration FLS misses required inputs; configuration loading validates this");
    if propensity.no_rule_fired || duration.no_rule_fired {
        log::warn!("no rule fired in a visitor decision for patient {}", patient.id);
    }
    let minutes = (duration.crisp.round().max(0.0) as u32).min(window_minutes).max(1);
    Some(minutes)
}

/// Applies a completed visit: mental-state gain proportional to the visit
/// length, and the last-visit day is recorded.
pub fn apply_visit(patient: &mut Patient, minutes: u32, params: &EffectParams, day: u32) {
    debug_assert!(minutes >= 1, "a decided visit lasts at least one minute");
    patient.mental_state =
        clamp01(patient.mental_state + params.visit_gain_per_hour * (minutes as f64 / 60.0));
    patient.last_visit_day = Some(day);
}
