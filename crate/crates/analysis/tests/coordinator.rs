mod common;

use common::Setup;
use creol_translate::{ComposedSystem, Strategy};
use ta_analysis::{
    check_schedulability, compile_composed, discrete_oracle, replay_to, resolve_target, run_query,
    ErrorCause, ExploreOptions, OracleOptions, OracleVerdict, Query, Schedulability,
    SchedulabilityReport, Target,
};

fn check(sys: &ComposedSystem) -> SchedulabilityReport {
    check_schedulability(sys, ExploreOptions::default(), &mut |_, _, _| {}).unwrap()
}

/// The Error trace must replay with exact clocks and end in `Error`.
fn assert_replayable_miss(sys: &ComposedSystem, report: &SchedulabilityReport) -> ErrorCause {
    let Schedulability::NonSchedulable {
        concrete, cause, ..
    } = &report.verdict
    else {
        panic!("expected a deadline miss, got {}", report.verdict.name())
    };
    let mut compiled = compile_composed(sys).unwrap();
    let goal = resolve_target(&Target::Error, sys, &mut compiled).unwrap();
    let trace = concrete
        .as_ref()
        .expect("the symbolic trace has a concrete witness");
    replay_to(&compiled, trace, &goal).unwrap();
    cause.clone()
}

#[test]
fn edf_meets_all_deadlines_at_speed_25() {
    let sys = Setup::coordinator(&[("SPEED", 25), ("MD", 21)]).build();
    let mut states = 0;
    let mut violation = None;
    let report = check_schedulability(&sys, ExploreOptions::default(), &mut |_, layout, s| {
        states += 1;
        if violation.is_none() {
            if let Err(e) = layout.check_invariants(s.vars(layout.n_instances)) {
                violation = Some(e);
            }
        }
    })
    .unwrap();
    assert_eq!(report.verdict.name(), "schedulable");
    assert!(
        report.max_occupancy <= 7,
        "occupancy {}",
        report.max_occupancy
    );
    assert_eq!(violation, None);
    assert_eq!(states, report.stats.stored);
}

#[test]
fn deadline_boundary_is_20() {
    let ok = Setup::coordinator(&[("SPEED", 25), ("MD", 20)]).build();
    assert_eq!(check(&ok).verdict.name(), "schedulable");
    let tight = Setup::coordinator(&[("SPEED", 25), ("MD", 19)]).build();
    let report = check(&tight);
    match assert_replayable_miss(&tight, &report) {
        ErrorCause::DeadlineMiss { task, deadline, .. } => {
            assert!(task.starts_with('m'), "{task}");
            assert_eq!(deadline, 19);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn arrivals_every_16_overload_the_object() {
    let sys = Setup::coordinator(&[("SPEED", 16), ("MD", 21)]).build();
    let report = check(&sys);
    assert_replayable_miss(&sys, &report);
}

#[test]
fn jitter_breaks_synchronisation() {
    let with = |j: i64| {
        let consts = [("SPEED", 25), ("MD", 21), ("J", j)];
        let mut setup = Setup::coordinator(&consts);
        setup.env = "coordinator/jitter.xta";
        let sys = setup.build();
        let report = check(&sys);
        (sys, report)
    };
    let (sys, report) = with(2);
    assert_replayable_miss(&sys, &report);
    assert_eq!(with(0).1.verdict.name(), "schedulable");
    let (sys, report) = with(1);
    assert_replayable_miss(&sys, &report);
}

#[test]
fn m1_passes_both_release_points() {
    let sys = Setup::coordinator(&[]).build();
    let q: Query = "reach line m1:26".parse().unwrap();
    let out = run_query(&sys, &q, ExploreOptions::default()).unwrap();
    assert_eq!(out.holds, Some(true));
    let mut compiled = compile_composed(&sys).unwrap();
    let goal = resolve_target(&q.target, &sys, &mut compiled).unwrap();
    replay_to(&compiled, out.concrete.unwrap().as_ref().unwrap(), &goal).unwrap();
}

#[test]
fn m1_cannot_run_two_rounds_ahead() {
    let sys = Setup {
        creol: "coordinator/rounds.creol",
        env: "coordinator/rounds.xta",
        ranges: &[("r1", 0, 3), ("r2", 0, 3), ("r3", 0, 3)],
        ..Setup::coordinator(&[])
    }
    .build();
    let ahead: Query = "invariant not state r1[0] == 3 && r2[0] == 1"
        .parse()
        .unwrap();
    assert_eq!(
        run_query(&sys, &ahead, ExploreOptions::default())
            .unwrap()
            .holds,
        Some(true)
    );
    let one_ahead: Query = "reach state r1[0] == 2 && r2[0] == 1".parse().unwrap();
    assert_eq!(
        run_query(&sys, &one_ahead, ExploreOptions::default())
            .unwrap()
            .holds,
        Some(true)
    );
}

#[test]
fn larger_queues_never_hurt() {
    let mut previous: Option<bool> = None;
    for max in 6..=10 {
        let sys = Setup {
            max_queue: Some(max),
            ..Setup::coordinator(&[("SPEED", 18), ("MD", 21)])
        }
        .build();
        let report = check(&sys);
        let ok = match &report.verdict {
            Schedulability::Schedulable => true,
            Schedulability::NonSchedulable { cause, .. } => {
                assert_eq!(*cause, ErrorCause::Overflow, "MAX={max}");
                false
            }
            other => panic!("MAX={max}: {}", other.name()),
        };
        assert!(report.max_occupancy <= max);
        if previous == Some(true) {
            assert!(ok, "MAX={max} lost schedulability");
        }
        previous = Some(ok);
    }
    assert_eq!(previous, Some(true));
}

fn pair(strategy: Strategy) -> ComposedSystem {
    Setup {
        creol: "pair/pair.creol",
        class: "Pair",
        env: "pair/pair.xta",
        ranges: &[],
        constants: &[],
        strategy,
        max_queue: None,
    }
    .build()
}

fn oracle_verdict(sys: &ComposedSystem) -> OracleVerdict {
    let mut compiled = compile_composed(sys).unwrap();
    let goal = resolve_target(&Target::Error, sys, &mut compiled).unwrap();
    let horizon = compiled.max_constants.iter().copied().max().unwrap_or(0) + 1;
    let opts = OracleOptions {
        integer_strict: true,
        ..OracleOptions::new(horizon, 1_000_000)
    };
    discrete_oracle(&compiled, &goal, opts).unwrap()
}

#[test]
fn edf_serves_the_short_task_in_time_and_fcfs_does_not() {
    let edf = pair(Strategy::Edf);
    assert_eq!(check(&edf).verdict.name(), "schedulable");
    assert_eq!(oracle_verdict(&edf), OracleVerdict::Unreachable);

    let fcfs = pair(Strategy::Fcfs);
    let report = check(&fcfs);
    match assert_replayable_miss(&fcfs, &report) {
        ErrorCause::DeadlineMiss { task, .. } => assert_eq!(task, "short"),
        other => panic!("{other:?}"),
    }
    assert_eq!(oracle_verdict(&fcfs), OracleVerdict::Reachable);
}
