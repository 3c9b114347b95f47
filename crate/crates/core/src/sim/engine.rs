//! The ward state and the per-tick phase implementations.
//!
//! Phases that touch shared structures collect their actions first and
//! apply them in key-sorted order, and every stochastic draw comes from a
//! per-agent stream, so agent iteration order inside a phase can never
//! change the outcome (exercised by the shuffled-iteration tests).

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::agents::{
    apply_treatment, apply_visit, treatment_duration, visitor_decision, Bed, BedState, Patient,
    PatientId, PatientState, Provider, ProviderId, ProviderKind, ProviderState, RobotStereotype,
    Visitor, VisitorState, DoctorLevel,
};
use crate::config::{ExperimentConfig, FlsSet};
use crate::network::TrustNetwork;
use crate::sim::rng::{Concern, RandomStream};
use crate::sim::trace::{NetworkDumpRow, PatientFinal, TraceRow};
use crate::sim::{QueueEntry, QueueStats, RequestKind, RunResult, SimClock, TreatmentQueue};
use crate::statechart::{
    bed_transition, patient_transition, provider_transition, visitor_transition, Condition,
    Message, Trigger,
};

/// Admission requests are scheduled strictly before 23:00 so a same-day bed
/// assignment is always possible.
const ADMISSION_LAST_MINUTE: u64 = 23 * 60;

/// Complete state of one running replication.
pub struct Ward {
    pub clock: SimClock,
    /// Tick index == total simulated minutes; 0 before the first tick.
    pub tick: u64,
    pub patients: Vec<Patient>,
    pub providers: Vec<Provider>,
    pub visitors: Vec<Visitor>,
    pub beds: Vec<Bed>,
    pub queue: TreatmentQueue,
    pub stats: QueueStats,
    pub network: TrustNetwork,
    config: ExperimentConfig,
    fls: FlsSet,

    // Scheduling state, per patient.
    pending_admission: Vec<Option<u64>>,
    next_self_request: Vec<Option<u64>>,
    checkup_minute: Vec<u32>,
    wait_since: Vec<u64>,

    // Last tick each agent transitioned; enforces one transition per tick.
    patient_moved: Vec<u64>,
    provider_moved: Vec<u64>,
    visitor_moved: Vec<u64>,
    bed_moved: Vec<u64>,

    // Per-agent random streams.
    arrival_rng: Vec<ChaCha8Rng>,
    init_rng: Vec<ChaCha8Rng>,
    self_request_dist: Exp<f64>,

    // Iteration orders, shuffled per tick when the testing hook is set.
    patient_order: Vec<usize>,
    provider_order: Vec<usize>,
    visitor_order: Vec<usize>,
    shuffle_rng: Option<ChaCha8Rng>,

    // Completions collected during the timeout phase, applied in the
    // effects phase in patient order.
    treatment_done: Vec<(PatientId, ProviderId, ProviderKind)>,
    visits_done: Vec<(PatientId, u32)>,
    visit_minutes: Vec<u32>,

    rr_cursor: usize,
    trace: Vec<TraceRow>,
    network_dump: Option<Vec<NetworkDumpRow>>,
}

impl Ward {
    pub fn new(config: &ExperimentConfig, fls: &FlsSet, seed: u64, dump_network: bool) -> Self {
        let streams = RandomStream::new(seed);
        let n_patients = config.patients as usize;
        let n_beds = config.beds as usize;

        let arrival_rng: Vec<ChaCha8Rng> =
            (0..n_patients).map(|i| streams.stream(Concern::Arrivals, i as u64)).collect();
        let mut init_rng: Vec<ChaCha8Rng> =
            (0..n_patients).map(|i| streams.stream(Concern::InitialValues, i as u64)).collect();

        let init = config.init;
        let initially_admitted =
            init.initial_in_bed.unwrap_or(config.patients.min(config.beds)) as usize;
        let mut patients = Vec::with_capacity(n_patients);
        let mut beds: Vec<Bed> =
            (0..n_beds).map(|index| Bed { index, occupant: None, state: BedState::Free }).collect();
        for id in 0..n_patients {
            let rng = &mut init_rng[id];
            let mental = init.mental_low + rng.gen::<f64>() * (init.mental_high - init.mental_low);
            let severity =
                init.severity_low + rng.gen::<f64>() * (init.severity_high - init.severity_low);
            let in_bed = id < initially_admitted;
            if in_bed {
                beds[id].occupant = Some(id);
                beds[id].state = BedState::Occupied;
            }
            patients.push(Patient {
                id,
                bed: in_bed.then_some(id),
                mental_state: mental,
                trust_robots: init.trust_initial,
                opinion_doctors: 0.0,
                opinion_robots: 0.0,
                severity,
                last_visit_day: None,
                state: if in_bed { PatientState::InBedIdle } else { PatientState::AtHome },
            });
        }

        let checkup_minute: Vec<u32> =
            (0..n_patients).map(|i| init_rng[i].gen_range(0..1440u32)).collect();

        let mut providers = Vec::new();
        for _ in 0..config.doctors.senior {
            providers.push(ProviderKind::Doctor(DoctorLevel::Senior));
        }
        for _ in 0..config.doctors.junior {
            providers.push(ProviderKind::Doctor(DoctorLevel::Junior));
        }
        for _ in 0..config.robots.humanlike {
            providers.push(ProviderKind::Robot(
                RobotStereotype::new(config.robots.humanlike_h).expect("validated"),
            ));
        }
        for _ in 0..config.robots.robotlike {
            providers.push(ProviderKind::Robot(
                RobotStereotype::new(config.robots.robotlike_h).expect("validated"),
            ));
        }
        let providers: Vec<Provider> = providers
            .into_iter()
            .enumerate()
            .map(|(id, kind)| Provider { id, kind, state: ProviderState::Idle })
            .collect();

        let visitors: Vec<Visitor> = (0..config.visitors as usize)
            .map(|id| Visitor {
                id,
                patient: (n_patients > 0).then(|| id % n_patients),
                state: VisitorState::AtHome,
            })
            .collect();

        let network = TrustNetwork::build_network(
            n_beds,
            config.network.thresholds(),
            config.network.alpha_per_hour,
        )
        .expect("validated");

        let self_request_dist =
            Exp::new(1.0 / config.schedule.self_request_mean_minutes).expect("validated");

        let mut ward = Self {
            clock: SimClock::start(),
            tick: 0,
            next_self_request: vec![None; n_patients],
            pending_admission: vec![None; n_patients],
            wait_since: vec![0; n_patients],
            patient_moved: vec![u64::MAX; n_patients],
            provider_moved: vec![u64::MAX; providers.len()],
            visitor_moved: vec![u64::MAX; visitors.len()],
            bed_moved: vec![u64::MAX; n_beds],
            visit_minutes: vec![0; visitors.len()],
            patient_order: (0..n_patients).collect(),
            provider_order: (0..providers.len()).collect(),
            visitor_order: (0..visitors.len()).collect(),
            shuffle_rng: config
                .iteration_shuffle_seed
                .map(|s| RandomStream::new(s).stream(Concern::Noise, 0)),
            treatment_done: Vec::new(),
            visits_done: Vec::new(),
            rr_cursor: 0,
            trace: Vec::new(),
            network_dump: dump_network.then(Vec::new),
            patients,
            providers,
            visitors,
            beds,
            queue: TreatmentQueue::default(),
            stats: QueueStats::default(),
            network,
            config: config.clone(),
            fls: fls.clone(),
            checkup_minute,
            arrival_rng,
            init_rng,
            self_request_dist,
        };

        // Day-0 scheduling: self-request timers for patients already in bed
        // and admission draws for those at home.
        for id in 0..ward.patients.len() {
            if ward.patients[id].bed.is_some() {
                ward.next_self_request[id] = Some(ward.draw_self_request_interval(id));
            }
        }
        ward.draw_daily_admissions();
        ward.sample_trace();
        ward
    }

    fn draw_self_request_interval(&mut self, patient: PatientId) -> u64 {
        let sample = self.self_request_dist.sample(&mut self.arrival_rng[patient]);
        self.tick + (sample.ceil() as u64).max(1)
    }

    /// At every midnight each at-home patient draws whether (and when,
    /// before 23:00) to request admission today.
    fn draw_daily_admissions(&mut self) {
        let day_start = self.tick;
        let p = self.config.schedule.admit_probability;
        for id in 0..self.patients.len() {
            if self.patients[id].state != PatientState::AtHome
                || self.pending_admission[id].is_some()
            {
                continue;
            }
            let rng = &mut self.arrival_rng[id];
            if rng.gen::<f64>() < p {
                self.pending_admission[id] = Some(day_start + rng.gen_range(0..ADMISSION_LAST_MINUTE));
            }
        }
    }

    // ----- statechart firing with the per-tick budget -----

    fn fire_patient(&mut self, id: PatientId, trigger: Trigger) -> bool {
        if self.patient_moved[id] == self.tick {
            log::debug!("patient {id}: trigger {trigger:?} ignored (already transitioned this tick)");
            return false;
        }
        match patient_transition(self.patients[id].state, &trigger) {
            Some(next) => {
                self.patients[id].state = next;
                self.patient_moved[id] = self.tick;
                true
            }
            None => {
                log::debug!(
                    "patient {id}: trigger {trigger:?} not enabled in {:?}",
                    self.patients[id].state
                );
                false
            }
        }
    }

    fn fire_provider(&mut self, id: ProviderId, trigger: Trigger) -> bool {
        if self.provider_moved[id] == self.tick {
            log::debug!("provider {id}: trigger {trigger:?} ignored (already transitioned this tick)");
            return false;
        }
        match provider_transition(self.providers[id].state, &trigger) {
            Some(next) => {
                self.providers[id].state = next;
                self.provider_moved[id] = self.tick;
                true
            }
            None => {
                log::debug!(
                    "provider {id}: trigger {trigger:?} not enabled in {:?}",
                    self.providers[id].state
                );
                false
            }
        }
    }

    fn fire_visitor(&mut self, id: usize, trigger: Trigger) -> bool {
        if self.visitor_moved[id] == self.tick {
            log::debug!("visitor {id}: trigger {trigger:?} ignored (already transitioned this tick)");
            return false;
        }
        match visitor_transition(self.visitors[id].state, &trigger) {
            Some(next) => {
                self.visitors[id].state = next;
                self.visitor_moved[id] = self.tick;
                true
            }
            None => {
                log::debug!(
                    "visitor {id}: trigger {trigger:?} not enabled in {:?}",
                    self.visitors[id].state
                );
                false
            }
        }
    }

    fn fire_bed(&mut self, index: usize, trigger: Trigger) -> bool {
        if self.bed_moved[index] == self.tick {
            log::debug!("bed {index}: trigger {trigger:?} ignored (already transitioned this tick)");
            return false;
        }
        match bed_transition(self.beds[index].state, &trigger) {
            Some(next) => {
                self.beds[index].state = next;
                self.bed_moved[index] = self.tick;
                true
            }
            None => {
                log::debug!(
                    "bed {index}: trigger {trigger:?} not enabled in {:?}",
                    self.beds[index].state
                );
                false
            }
        }
    }

    // ----- one tick -----

    pub fn step(&mut self) {
        self.tick += 1;
        self.clock.advance();
        if let Some(rng) = self.shuffle_rng.as_mut() {
            self.patient_order.shuffle(rng);
            self.provider_order.shuffle(rng);
            self.visitor_order.shuffle(rng);
        }

        self.phase_timeouts();
        self.phase_conditions();
        self.phase_arrivals();
        self.phase_visitor_window();
        self.phase_dispatch();
        self.phase_effects();
        if self.clock.minute_of_day.is_multiple_of(60) {
            self.phase_diffusion();
        }
        if self.clock.minute_of_day == 0 {
            self.phase_daily_decay();
            self.dump_network_day();
            self.draw_daily_admissions();
        }
        if self.tick.is_multiple_of(self.config.schedule.trace_interval_minutes as u64) {
            self.sample_trace();
        }
    }

    /// Countdowns elapse: treatments and visits that reach zero transition
    /// both sides back and queue their effects.
    fn phase_timeouts(&mut self) {
        for idx in 0..self.provider_order.len() {
            let id = self.provider_order[idx];
            if let ProviderState::Treating { patient, remaining } = self.providers[id].state {
                let remaining = remaining - 1;
                self.providers[id].state = ProviderState::Treating { patient, remaining };
                if remaining == 0 {
                    let kind = self.providers[id].kind;
                    let fired = self.fire_provider(id, Trigger::Timeout);
                    debug_assert!(fired, "treatment end is always enabled");
                    let fired = self.fire_patient(patient, Trigger::Timeout);
                    debug_assert!(fired, "patient leaves treatment when the provider finishes");
                    self.treatment_done.push((patient, id, kind));
                }
            }
        }
        for idx in 0..self.visitor_order.len() {
            let id = self.visitor_order[idx];
            if let VisitorState::Visiting { remaining } = self.visitors[id].state {
                let remaining = remaining - 1;
                self.visitors[id].state = VisitorState::Visiting { remaining };
                if remaining == 0 {
                    let fired = self.fire_visitor(id, Trigger::Timeout);
                    debug_assert!(fired, "visit end is always enabled");
                    if let Some(patient) = self.visitors[id].patient {
                        let fired = self.fire_patient(patient, Trigger::Timeout);
                        debug_assert!(fired, "visited patient returns to bedside idle");
                        self.visits_done.push((patient, self.visit_minutes[id]));
                    }
                }
            }
        }
    }

    /// Condition transitions: discharges, due admission requests, and bed
    /// assignment for waiting patients (earliest request first, lowest bed
    /// index first).
    fn phase_conditions(&mut self) {
        for idx in 0..self.patient_order.len() {
            let id = self.patient_order[idx];
            if self.patients[id].state == PatientState::InBedIdle
                && self.patients[id].severity <= 0.0
                && self.fire_patient(id, Trigger::Condition(Condition::Discharge))
            {
                let bed = self.patients[id].bed.take().expect("bedside patients have a bed");
                let fired = self.fire_bed(bed, Trigger::Message(Message::ReleaseBed));
                debug_assert!(fired, "occupied beds can always release");
                self.beds[bed].occupant = None;
                self.next_self_request[id] = None;
                log::debug!("patient {id} discharged on day {}", self.clock.day);
            }
        }

        for idx in 0..self.patient_order.len() {
            let id = self.patient_order[idx];
            if self.patients[id].state != PatientState::AtHome {
                continue;
            }
            if self.pending_admission[id].is_some_and(|due| due <= self.tick)
                && self.fire_patient(id, Trigger::Condition(Condition::AdmissionRequest))
            {
                self.pending_admission[id] = None;
                self.wait_since[id] = self.tick;
                // A new hospital episode gets a fresh severity.
                let init = self.config.init;
                let draw = self.init_rng[id].gen::<f64>();
                self.patients[id].severity =
                    init.severity_low + draw * (init.severity_high - init.severity_low);
            }
        }

        let mut waiting: Vec<PatientId> = self
            .patients
            .iter()
            .filter(|p| p.state == PatientState::WaitingForBed)
            .filter(|p| self.patient_moved[p.id] != self.tick)
            .map(|p| p.id)
            .collect();
        waiting.sort_by_key(|&id| (self.wait_since[id], id));
        let free_beds: Vec<usize> = self
            .beds
            .iter()
            .filter(|b| b.state == BedState::Free && self.bed_moved[b.index] != self.tick)
            .map(|b| b.index)
            .collect();
        for (&patient, &bed) in waiting.iter().zip(free_beds.iter()) {
            let fired = self.fire_patient(patient, Trigger::Condition(Condition::BedFree { bed }));
            debug_assert!(fired, "filtered waiting patients can take a bed");
            let fired = self.fire_bed(bed, Trigger::Message(Message::AssignBed { patient }));
            debug_assert!(fired, "filtered free beds can be assigned");
            self.beds[bed].occupant = Some(patient);
            self.patients[patient].bed = Some(bed);
            self.next_self_request[patient] = Some(self.draw_self_request_interval(patient));
        }
    }

    /// Check-ups at each patient's fixed daily minute plus exponentially
    /// spaced self-requests; both enqueue treatment requests.
    fn phase_arrivals(&mut self) {
        let minute = self.clock.minute_of_day;
        let mut requests: Vec<(PatientId, RequestKind)> = Vec::new();
        for idx in 0..self.patient_order.len() {
            let id = self.patient_order[idx];
            let in_bed = self.patients[id].bed.is_some();
            if in_bed && self.checkup_minute[id] == minute {
                if self.patients[id].state == PatientState::InBedIdle && !self.queue.contains(id) {
                    requests.push((id, RequestKind::CheckUp));
                } else {
                    log::debug!("patient {id}: daily check-up skipped (busy)");
                }
            }
            if let Some(due) = self.next_self_request[id] {
                if due <= self.tick {
                    if in_bed {
                        if self.patients[id].state == PatientState::InBedIdle
                            && !self.queue.contains(id)
                        {
                            requests.push((id, RequestKind::SelfRequest));
                        }
                        self.next_self_request[id] = Some(self.draw_self_request_interval(id));
                    } else {
                        self.next_self_request[id] = None;
                    }
                }
            }
        }
        requests.sort();
        for (patient, kind) in requests {
            self.enqueue_request(patient, kind);
        }
    }

    /// Appends a treatment request; duplicates are ignored and logged.
    pub fn enqueue_request(&mut self, patient: PatientId, kind: RequestKind) {
        if self.queue.contains(patient) {
            self.stats.duplicates_ignored += 1;
            log::warn!("patient {patient}: duplicate {kind:?} request ignored");
            return;
        }
        let message = match kind {
            RequestKind::CheckUp => Message::CheckUpDue,
            RequestKind::SelfRequest => Message::SelfRequest,
        };
        if self.fire_patient(patient, Trigger::Message(message)) {
            self.queue.push(QueueEntry { patient, kind, enqueued_tick: self.tick });
            self.stats.enqueued += 1;
        }
    }

    /// At the daily window opening every visitor decides whether and how
    /// long to visit. Decisions are pure per visitor; arrivals are applied
    /// in visitor-id order.
    fn phase_visitor_window(&mut self) {
        if self.clock.minute_of_day != self.config.schedule.visit_window_start_minute
            || self.visitors.is_empty()
        {
            return;
        }
        let day = self.clock.day;
        let window = self.config.schedule.visit_window_minutes;
        let mut arrivals: Vec<(usize, PatientId, u32)> = Vec::new();
        for idx in 0..self.visitor_order.len() {
            let id = self.visitor_order[idx];
            if self.visitors[id].state != VisitorState::AtHome {
                continue;
            }
            let Some(patient) = self.visitors[id].patient else { continue };
            if let Some(minutes) = visitor_decision(
                &self.patients[patient],
                day,
                &self.fls.visitor_propensity,
                &self.fls.visitor_duration,
                window,
            ) {
                arrivals.push((id, patient, minutes));
            }
        }
        arrivals.sort();
        for (visitor, patient, minutes) in arrivals {
            match self.patients[patient].state {
                PatientState::BeingTreated => {
                    log::info!(
                        "visitor {visitor}: visit to patient {patient} skipped on day {day} (in treatment)"
                    );
                    continue;
                }
                PatientState::InBedIdle | PatientState::InQueue => {}
                other => {
                    log::debug!(
                        "visitor {visitor}: visit to patient {patient} skipped on day {day} (patient {other:?})"
                    );
                    continue;
                }
            }
            let was_queued = self.patients[patient].state == PatientState::InQueue;
            if self.fire_patient(patient, Trigger::Message(Message::VisitorArrives { minutes })) {
                if was_queued {
                    let removed = self.queue.cancel(patient);
                    debug_assert!(removed, "queued patients have a queue entry");
                    self.stats.cancelled_by_visit += 1;
                    log::debug!("patient {patient}: queued request cancelled by a visit");
                }
                let fired =
                    self.fire_visitor(visitor, Trigger::Message(Message::VisitorArrives { minutes }));
                debug_assert!(fired, "an at-home visitor can always start visiting");
                self.visit_minutes[visitor] = minutes;
            } else {
                log::info!(
                    "visitor {visitor}: visit to patient {patient} skipped on day {day} (not available)"
                );
            }
        }
    }

    /// FIFO dispatch: while the queue head is dispatchable and an idle
    /// provider exists, pair them. Provider choice is round-robin by id;
    /// with `prefer_doctors`, idle doctors go first.
    fn phase_dispatch(&mut self) {
        while let Some(entry) = self.queue.peek_dispatchable(self.tick).copied() {
            let Some(provider_id) = self.pick_provider() else { break };
            let popped = self.queue.pop().expect("peeked entry exists");
            debug_assert_eq!(popped.patient, entry.patient);
            let minutes = {
                let provider = &self.providers[provider_id];
                let fls = if provider.is_doctor() { &self.fls.doctor } else { &self.fls.robot };
                treatment_duration(provider, &self.patients[entry.patient], fls)
            };
            let message = Message::StartTreatment { patient: entry.patient, minutes };
            let fired = self.fire_provider(provider_id, Trigger::Message(message));
            debug_assert!(fired, "picked providers are idle with a free budget");
            let fired = self.fire_patient(entry.patient, Trigger::Message(message));
            debug_assert!(fired, "dispatchable queue entries hold queued patients");
            self.stats.dispatched += 1;
            self.rr_cursor = (provider_id + 1) % self.providers.len();
        }
    }

    fn pick_provider(&self) -> Option<ProviderId> {
        let n = self.providers.len();
        if n == 0 {
            return None;
        }
        let available =
            |p: &Provider| p.is_idle() && self.provider_moved[p.id] != self.tick;
        let doctors_only = self.config.prefer_doctors
            && self.providers.iter().any(|p| available(p) && p.is_doctor());
        for k in 0..n {
            let id = (self.rr_cursor + k) % n;
            let provider = &self.providers[id];
            if available(provider) && (!doctors_only || provider.is_doctor()) {
                return Some(id);
            }
        }
        None
    }

    /// Applies the effects of everything that completed this tick, in
    /// patient order.
    fn phase_effects(&mut self) {
        let mut treatments = std::mem::take(&mut self.treatment_done);
        treatments.sort_by_key(|&(patient, provider, _)| (patient, provider));
        for (patient, _, kind) in treatments {
            apply_treatment(&mut self.patients[patient], &kind, &self.config.effects);
        }
        let mut visits = std::mem::take(&mut self.visits_done);
        visits.sort();
        let day = self.clock.day;
        for (patient, minutes) in visits {
            apply_visit(&mut self.patients[patient], minutes, &self.config.effects, day);
        }
    }

    fn occupied_trust(&self) -> Vec<Option<f64>> {
        self.beds
            .iter()
            .map(|bed| bed.occupant.map(|p| self.patients[p].trust_robots))
            .collect()
    }

    /// Hourly synchronous trust diffusion over occupied beds.
    fn phase_diffusion(&mut self) {
        let trust = self.occupied_trust();
        let updated = self.network.diffuse_trust(&trust);
        for (bed, value) in self.beds.iter().zip(updated) {
            if let (Some(patient), Some(t)) = (bed.occupant, value) {
                self.patients[patient].trust_robots = t;
            }
        }
    }

    /// Midnight decay of mental state toward zero, for every patient.
    fn phase_daily_decay(&mut self) {
        let decay = self.config.effects.daily_decay;
        for patient in &mut self.patients {
            patient.mental_state = (patient.mental_state - decay).max(0.0);
        }
    }

    fn dump_network_day(&mut self) {
        let Some(dump) = self.network_dump.as_mut() else { return };
        let day_ended = self.clock.day - 1;
        let trust = self
            .beds
            .iter()
            .map(|bed| bed.occupant.map(|p| self.patients[p].trust_robots))
            .collect::<Vec<_>>();
        for (i, j) in self.network.edges() {
            let (Some(ti), Some(tj)) = (trust[i], trust[j]) else { continue };
            let color =
                crate::network::classify_edge(ti, tj, self.network.thresholds()).name();
            dump.push(NetworkDumpRow { day: day_ended, i, j, abs_diff: (ti - tj).abs(), color });
        }
    }

    /// Currently occupied bed count, for tests and observers.
    pub fn occupied_beds(&self) -> usize {
        self.beds.iter().filter(|b| b.occupant.is_some()).count()
    }

    fn means(&self) -> (f64, f64, f64, f64) {
        let n = self.patients.len();
        if n == 0 {
            return (0.0, 0.0, 0.0, 0.0);
        }
        let inv = 1.0 / n as f64;
        let mut mental = 0.0;
        let mut trust = 0.0;
        let mut op_doc = 0.0;
        let mut op_rob = 0.0;
        for p in &self.patients {
            mental += p.mental_state;
            trust += p.trust_robots;
            op_doc += p.opinion_doctors;
            op_rob += p.opinion_robots;
        }
        (mental * inv, trust * inv, op_doc * inv, op_rob * inv)
    }

    fn sample_trace(&mut self) {
        let (mental, trust, op_doc, op_rob) = self.means();
        let edges = self.network.network_summary(&self.occupied_trust());
        self.trace.push(TraceRow {
            tick: self.tick,
            day: self.clock.day,
            mean_mental_state: mental,
            mean_trust_robots: trust,
            mean_opinion_doctors: op_doc,
            mean_opinion_robots: op_rob,
            queue_length: self.queue.len(),
            edges,
        });
    }

    /// Final responses and the collected time series.
    pub(crate) fn finish(mut self) -> RunResult {
        let (mental, trust, op_doc, op_rob) = self.means();
        let final_edges = self.network.network_summary(&self.occupied_trust());
        let red_edge_fraction = if self.trace.is_empty() {
            0.0
        } else {
            self.trace.iter().map(|r| r.edges.red_fraction()).sum::<f64>() / self.trace.len() as f64
        };
        self.stats.remaining_at_end = self.queue.len() as u64;
        let patients = self
            .patients
            .iter()
            .map(|p| PatientFinal {
                id: p.id,
                bed: p.bed,
                mental_state: p.mental_state,
                trust_robots: p.trust_robots,
                opinion_doctors: p.opinion_doctors,
                opinion_robots: p.opinion_robots,
                severity: p.severity,
                state: p.state.name(),
            })
            .collect();
        RunResult {
            final_mean_mental_state: mental,
            final_mean_trust_robots: trust,
            final_mean_opinion_doctors: op_doc,
            final_mean_opinion_robots: op_rob,
            final_edges,
            red_edge_fraction,
            trace: self.trace,
            patients,
            queue_stats: self.stats,
            network_dump: self.network_dump,
        }
    }
}
