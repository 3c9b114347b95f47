//! Statechart transition tables for every agent kind.
//!
//! Three trigger families drive all transitions: timeouts fire when an
//! agent's countdown elapses, conditions fire when a predicate over the ward
//! state becomes true, and messages fire when another agent sends one.
//! Transition functions are pure: they return the successor state when the
//! trigger is enabled and `None` otherwise. The simulation loop enforces the
//! at-most-one-transition-per-agent-per-tick rule, logs ignored triggers and
//! arbitrates simultaneous triggers with Message > Condition > Timeout
//! priority at each offering point; across phases the documented tick order
//! is canonical.
//!
//! The tables are reconstructions: the source material shows the machines
//! only schematically, so the minimal machines consistent with it are used.

use crate::agents::{
    BedState, PatientId, PatientState, ProviderState, VisitorState,
};

/// Payload-carrying messages exchanged between agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Message {
    /// Queue head is assigned to a provider; delivered to both sides.
    StartTreatment { patient: PatientId, minutes: u32 },
    /// A visitor arrives at the bedside for this many minutes.
    VisitorArrives { minutes: u32 },
    /// The daily scheduled check-up is due.
    CheckUpDue,
    /// The patient asks to be seen.
    SelfRequest,
    /// A bed receives an occupant.
    AssignBed { patient: PatientId },
    /// A bed's occupant leaves.
    ReleaseBed,
}

/// Predicates evaluated by the scheduler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// The patient's scheduled admission request has come due.
    AdmissionRequest,
    /// A free bed was found for a waiting patient.
    BedFree { bed: usize },
    /// Severity reached zero; the patient goes home.
    Discharge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Trigger {
    Timeout,
    Condition(Condition),
    Message(Message),
}

impl Trigger {
    /// Arbitration order when several triggers are offered at once.
    pub fn priority(&self) -> u8 {
        match self {
            Trigger::Message(_) => 2,
            Trigger::Condition(_) => 1,
            Trigger::Timeout => 0,
        }
    }
}

/// Patient machine: home, waiting, bedside idle, queued, treated, visited.
/// A visitor arriving for a queued patient cancels the queued request and
/// starts the visit in a single step.
pub fn patient_transition(state: PatientState, trigger: &Trigger) -> Option<PatientState> {
    use PatientState::*;
    match (state, trigger) {
        (AtHome, Trigger::Condition(Condition::AdmissionRequest)) => Some(WaitingForBed),
        (WaitingForBed, Trigger::Condition(Condition::BedFree { .. })) => Some(InBedIdle),
        (InBedIdle, Trigger::Message(Message::CheckUpDue | Message::SelfRequest)) => Some(InQueue),
        (InQueue, Trigger::Message(Message::StartTreatment { .. })) => Some(BeingTreated),
        (BeingTreated, Trigger::Timeout) => Some(InBedIdle),
        (InBedIdle | InQueue, Trigger::Message(Message::VisitorArrives { .. })) => {
            Some(BeingVisited)
        }
        (BeingVisited, Trigger::Timeout) => Some(InBedIdle),
        (InBedIdle, Trigger::Condition(Condition::Discharge)) => Some(AtHome),
        _ => None,
    }
}

/// Provider machine (doctors and robots share it): Idle <-> Treating.
pub fn provider_transition(state: ProviderState, trigger: &Trigger) -> Option<ProviderState> {
    use ProviderState::*;
    match (state, trigger) {
        (Idle, Trigger::Message(Message::StartTreatment { patient, minutes })) => {
            Some(Treating { patient: *patient, remaining: *minutes })
        }
        (Treating { .. }, Trigger::Timeout) => Some(Idle),
        _ => None,
    }
}

/// Visitor machine: at home until the daily window opens, then visiting
/// until the decided duration elapses.
pub fn visitor_transition(state: VisitorState, trigger: &Trigger) -> Option<VisitorState> {
    use VisitorState::*;
    match (state, trigger) {
        (AtHome, Trigger::Message(Message::VisitorArrives { minutes })) => {
            Some(Visiting { remaining: *minutes })
        }
        (Visiting { .. }, Trigger::Timeout) => Some(AtHome),
        _ => None,
    }
}

/// Bed machine: Free <-> Occupied.
pub fn bed_transition(state: BedState, trigger: &Trigger) -> Option<BedState> {
    use BedState::*;
    match (state, trigger) {
        (Free, Trigger::Message(Message::AssignBed { .. })) => Some(Occupied),
        (Occupied, Trigger::Message(Message::ReleaseBed)) => Some(Free),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn provider_start_and_finish_treatment() {
        let start = Trigger::Message(Message::StartTreatment { patient: 3, minutes: 25 });
        let treating = provider_transition(ProviderState::Idle, &start).unwrap();
        assert_eq!(treating, ProviderState::Treating { patient: 3, remaining: 25 });
        assert_eq!(provider_transition(treating, &Trigger::Timeout), Some(ProviderState::Idle));
    }

    #[test]
    fn patient_visit_from_idle_and_from_queue() {
        let arrive = Trigger::Message(Message::VisitorArrives { minutes: 30 });
        assert_eq!(
            patient_transition(PatientState::InBedIdle, &arrive),
            Some(PatientState::BeingVisited)
        );
        assert_eq!(
            patient_transition(PatientState::InQueue, &arrive),
            Some(PatientState::BeingVisited)
        );
        assert_eq!(
            patient_transition(PatientState::BeingVisited, &Trigger::Timeout),
            Some(PatientState::InBedIdle)
        );
    }

    #[test]
    fn patient_admission_chain() {
        let request = Trigger::Condition(Condition::AdmissionRequest);
        let bed = Trigger::Condition(Condition::BedFree { bed: 2 });
        let discharge = Trigger::Condition(Condition::Discharge);
        assert_eq!(
            patient_transition(PatientState::AtHome, &request),
            Some(PatientState::WaitingForBed)
        );
        assert_eq!(
            patient_transition(PatientState::WaitingForBed, &bed),
            Some(PatientState::InBedIdle)
        );
        assert_eq!(
            patient_transition(PatientState::InBedIdle, &discharge),
            Some(PatientState::AtHome)
        );
    }

    #[test]
    fn disabled_triggers_are_ignored_not_fatal() {
        // Treating a patient who is being visited is not a legal transition.
        let start = Trigger::Message(Message::StartTreatment { patient: 0, minutes: 10 });
        assert_eq!(patient_transition(PatientState::BeingVisited, &start), None);
        // Timeouts mean nothing to an idle provider or an at-home visitor.
        assert_eq!(provider_transition(ProviderState::Idle, &Trigger::Timeout), None);
        assert_eq!(visitor_transition(VisitorState::AtHome, &Trigger::Timeout), None);
        // A free bed cannot be released.
        assert_eq!(bed_transition(BedState::Free, &Trigger::Message(Message::ReleaseBed)), None);
    }

    #[test]
    fn message_beats_condition_beats_timeout() {
        let msg = Trigger::Message(Message::CheckUpDue);
        let cond = Trigger::Condition(Condition::Discharge);
        assert!(msg.priority() > cond.priority());
        assert!(cond.priority() > Trigger::Timeout.priority());
    }
}
