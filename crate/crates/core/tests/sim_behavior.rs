//! End-to-end behaviour of the run loop through the public API:
//! determinism, iteration-order independence, queue accounting, degenerate
//! arrival settings and the trace format.

use wardsim::agents::{PatientState, ProviderState, VisitorState};
use wardsim::config::{ExperimentConfig, FlsPaths, FlsSet};
use wardsim::sim::{
    run_simulation, run_simulation_observed, run_simulation_with_options, trace_csv, Observer,
    TraceHeader, Ward,
};

fn fls() -> FlsSet {
    FlsPaths::default().load(None).unwrap()
}

fn config(patients: u32, beds: u32, days: u32) -> ExperimentConfig {
    let mut config = ExperimentConfig::default();
    config.patients = patients;
    config.beds = beds;
    config.duration_days = days;
    config.visitors = patients / 2;
    config
}

#[test]
fn zero_day_run_reports_the_initial_snapshot_only() {
    let result = run_simulation(&config(8, 6, 0), &fls(), 1).unwrap();
    assert_eq!(result.trace.len(), 1);
    assert_eq!(result.trace[0].tick, 0);
    assert_eq!(result.queue_stats.enqueued, 0);
    assert_eq!(result.patients.len(), 8);
}

#[test]
fn identical_seed_and_config_reproduce_the_trace_byte_for_byte() {
    let cfg = config(10, 8, 3);
    let a = run_simulation(&cfg, &fls(), 42).unwrap();
    let b = run_simulation(&cfg, &fls(), 42).unwrap();
    assert_eq!(a.trace, b.trace);
    let header = TraceHeader { config_hash: cfg.config_hash(), seed: 42, ..Default::default() };
    assert_eq!(trace_csv(&header, &a.trace), trace_csv(&header, &b.trace));

    let c = run_simulation(&cfg, &fls(), 43).unwrap();
    assert_ne!(a.trace, c.trace, "a different seed must change the trace");
}

#[test]
fn shuffled_agent_iteration_does_not_change_results() {
    let base = config(12, 8, 3);
    let reference = run_simulation(&base, &fls(), 7).unwrap();
    for shuffle_seed in [1u64, 99] {
        let mut shuffled = base.clone();
        shuffled.iteration_shuffle_seed = Some(shuffle_seed);
        let result = run_simulation(&shuffled, &fls(), 7).unwrap();
        assert_eq!(result.trace, reference.trace, "shuffle seed {shuffle_seed}");
        assert_eq!(result.final_edges, reference.final_edges);
        assert_eq!(result.queue_stats, reference.queue_stats);
    }
}

#[test]
fn queue_accounting_conserves_every_request() {
    let result = run_simulation(&config(15, 10, 5), &fls(), 11).unwrap();
    let stats = result.queue_stats;
    assert!(stats.enqueued > 0, "a five-day run sees requests");
    assert_eq!(
        stats.enqueued,
        stats.dispatched + stats.cancelled_by_visit + stats.remaining_at_end,
        "requests are dispatched, cancelled by a visit, or still queued: {stats:?}"
    );
}

#[test]
fn zero_admission_probability_keeps_home_patients_home() {
    let mut cfg = config(10, 4, 3);
    cfg.schedule.admit_probability = 0.0;
    let result = run_simulation(&cfg, &fls(), 5).unwrap();
    for patient in result.patients.iter().filter(|p| p.id >= 4) {
        assert_eq!(patient.state, "AtHome", "patient {} was admitted", patient.id);
    }
}

#[test]
fn certain_admission_with_scarce_beds_leaves_patients_waiting() {
    let mut cfg = config(10, 6, 1);
    cfg.schedule.admit_probability = 1.0;
    cfg.effects.severity_relief = 0.0; // nobody is discharged
    let result = run_simulation(&cfg, &fls(), 3).unwrap();
    let waiting = result.patients.iter().filter(|p| p.state == "WaitingForBed").count();
    assert_eq!(waiting, 4, "only 6 beds for 10 patients");
}

#[test]
fn all_home_patients_admitted_on_day_zero_when_beds_abound() {
    // Everyone starts at home with free beds for all; with certain
    // admission and no discharges, every patient is in a bed before day 0
    // ends.
    let mut cfg = config(6, 8, 1);
    cfg.schedule.admit_probability = 1.0;
    cfg.effects.severity_relief = 0.0;
    cfg.init.initial_in_bed = Some(0);
    struct AllInBedAt(Option<u64>);
    impl Observer for AllInBedAt {
        fn on_tick(&mut self, ward: &Ward) {
            if self.0.is_none() && ward.patients.iter().all(|p| p.bed.is_some()) {
                self.0 = Some(ward.tick);
            }
        }
    }
    let mut observer = AllInBedAt(None);
    let result = run_simulation_observed(&cfg, &fls(), 9, false, &mut observer).unwrap();
    let admitted_at = observer.0.expect("everyone is admitted");
    assert!(admitted_at < 1440, "admissions completed within day 0, at tick {admitted_at}");
    assert!(result.patients.iter().all(|p| p.bed.is_some()));
}

/// An all-robotlike ward drives mean robot trust below its initial value.
#[test]
fn robotlike_only_ward_erodes_trust() {
    let mut cfg = config(10, 12, 30);
    cfg.doctors.senior = 0;
    cfg.doctors.junior = 0;
    cfg.robots.humanlike = 0;
    cfg.robots.robotlike = 1;
    cfg.robots.robotlike_h = 0.0;
    let result = run_simulation(&cfg, &fls(), 21).unwrap();
    assert!(
        result.final_mean_trust_robots < 0.5,
        "expected erosion below the initial 0.5, got {}",
        result.final_mean_trust_robots
    );
}

#[test]
fn nobody_is_treated_and_visited_at_once() {
    struct Exclusive;
    impl Observer for Exclusive {
        fn on_tick(&mut self, ward: &Ward) {
            for provider in &ward.providers {
                if let ProviderState::Treating { patient, .. } = provider.state {
                    assert_eq!(
                        ward.patients[patient].state,
                        PatientState::BeingTreated,
                        "tick {}: provider {} treats patient {} in state {:?}",
                        ward.tick,
                        provider.id,
                        patient,
                        ward.patients[patient].state
                    );
                }
            }
        }
    }
    run_simulation_observed(&config(10, 8, 3), &fls(), 13, false, &mut Exclusive).unwrap();
}

#[test]
fn visitors_exist_only_inside_the_window() {
    struct WindowBounds;
    impl Observer for WindowBounds {
        fn on_tick(&mut self, ward: &Ward) {
            let start = 14 * 60;
            let end = start + 60;
            for visitor in &ward.visitors {
                if matches!(visitor.state, VisitorState::Visiting { .. }) {
                    assert!(
                        (start..=end).contains(&ward.clock.minute_of_day),
                        "visitor {} outside the window at minute {}",
                        visitor.id,
                        ward.clock.minute_of_day
                    );
                }
            }
            for patient in &ward.patients {
                if patient.state == PatientState::BeingVisited {
                    assert!((start..=end).contains(&ward.clock.minute_of_day));
                }
            }
        }
    }
    run_simulation_observed(&config(10, 8, 3), &fls(), 17, false, &mut WindowBounds).unwrap();
}

#[test]
fn trace_csv_has_pinned_columns_and_provenance_header() {
    let cfg = config(6, 6, 1);
    let result = run_simulation(&cfg, &fls(), 1).unwrap();
    let header = TraceHeader {
        config_hash: cfg.config_hash(),
        seed: 1,
        scenario: None,
        overrides: vec!["beds=6".to_string()],
        green_max: 0.1,
        yellow_max: 0.3,
    };
    let csv = trace_csv(&header, &result.trace);
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# wardsim v"));
    assert!(csv.contains(&format!("# config_hash: {}", cfg.config_hash())));
    assert!(csv.contains("# seed: 1"));
    assert!(csv.contains("# override: beds=6"));
    assert!(csv.contains("# edge_thresholds: green<0.1 yellow<0.3"));
    let columns = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(
        columns,
        "tick,day,meanMentalState,meanTrustRobots,meanOpinionDoctors,meanOpinionRobots,queueLength,edgesGreen,edgesYellow,edgesRed"
    );
    // One row per sampled hour plus the initial snapshot.
    let data_rows = csv.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(data_rows, 25);
}

#[test]
fn network_dump_is_present_only_on_request() {
    let cfg = config(6, 6, 1);
    let without = run_simulation(&cfg, &fls(), 1).unwrap();
    assert!(without.network_dump.is_none());
    let with = run_simulation_with_options(&cfg, &fls(), 1, true).unwrap();
    let dump = with.network_dump.unwrap();
    assert!(!dump.is_empty());
    assert!(dump.iter().all(|row| row.day == 0), "a one-day run dumps day 0 only");
}

#[test]
fn invalid_config_is_rejected_before_the_run_starts() {
    let mut cfg = config(10, 8, 1);
    cfg.beds = 0;
    let err = run_simulation(&cfg, &fls(), 1).unwrap_err();
    assert!(err.to_string().contains("beds"));
}
