//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit status
//! when any criterion fails. Thresholds and time limits are the constants
//! below; nothing here is tuned to the observed results.

#[path = "../../analysis/tests/common/networks.rs"]
mod networks;

#[path = "../../translate/tests/common/guards.rs"]
mod guards;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use creol_syntax::{parse_model, BinOp, Expr, Guard, UnOp};
use creol_ta::config::{Project, StrategyName};
use creol_translate::{golden_text, translate_class, AbstractionPolicy, ComposedSystem};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ta_analysis::{
    check_schedulability, compile_composed, discrete_oracle, replay_to, resolve_target, run_query,
    ErrorCause, ExploreOptions, OracleOptions, OracleVerdict, Query, Schedulability,
    SchedulabilityReport, Target,
};
use ta_model::dbm::{le, lt, Constraint, Dbm};

const SPEED: i64 = 25;
const MD: i64 = 21;
/// Queue slots the coordinator may occupy at SPEED/MD.
const MAX_OCCUPANCY: usize = 7;
const JITTER: i64 = 2;
const RANDOM_NETWORKS: usize = 200;
const MIN_NETWORKS: usize = 20;
const RANDOM_ZONES: usize = 1000;
const RANDOM_GUARDS: usize = 1000;
const QUEUE_SIZES: std::ops::RangeInclusive<usize> = 7..=10;
const SEED: u64 = 0x5eed;

const SECOND: Duration = Duration::from_secs(1);
const MINUTE: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn project(rel: &str, constants: &[(&str, i64)]) -> Project {
    let mut p = Project::load(&models().join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"));
    for &(name, value) in constants {
        p.config.constants.insert(name.to_string(), value);
    }
    p
}

fn system(p: &Project) -> ComposedSystem {
    creol_ta::build(p).unwrap_or_else(|e| panic!("{e}"))
}

fn coordinator(speed: i64, md: i64) -> ComposedSystem {
    system(&project(
        "coordinator/coordinator.toml",
        &[("SPEED", speed), ("MD", md)],
    ))
}

fn check(sys: &ComposedSystem) -> SchedulabilityReport {
    check_schedulability(sys, ExploreOptions::default(), &mut |_, _, _| {}).unwrap()
}

/// `Ok(Some(cause))` for a deadline miss or overflow whose trace replays
/// with exact clocks, `Ok(None)` when schedulable.
fn replayable_error(
    sys: &ComposedSystem,
    r: &SchedulabilityReport,
) -> Result<Option<ErrorCause>, String> {
    match &r.verdict {
        Schedulability::Schedulable => Ok(None),
        Schedulability::NonSchedulable {
            concrete, cause, ..
        } => {
            let trace = concrete
                .as_ref()
                .map_err(|e| format!("no concrete trace: {e}"))?;
            let mut compiled = compile_composed(sys).map_err(|e| e.to_string())?;
            let goal =
                resolve_target(&Target::Error, sys, &mut compiled).map_err(|e| e.to_string())?;
            replay_to(&compiled, trace, &goal)
                .map_err(|e| format!("trace does not replay: {e}"))?;
            Ok(Some(cause.clone()))
        }
        other => Err(other.name().to_string()),
    }
}

fn describe(cause: &Option<ErrorCause>) -> String {
    match cause {
        None => "schedulable".into(),
        Some(ErrorCause::DeadlineMiss { task, deadline, .. }) => {
            format!("{task} misses deadline {deadline}")
        }
        Some(ErrorCause::Overflow) => "queue overflow".into(),
        Some(ErrorCause::Unknown) => "nonschedulable".into(),
    }
}

fn golden_translation() -> Outcome {
    let src = std::fs::read_to_string(models().join("coordinator/coordinator.creol")).unwrap();
    let model = parse_model(&src).unwrap();
    let class = model.class("Coordinator").unwrap();
    let policy = AbstractionPolicy::for_class(class, &BTreeMap::new(), &BTreeSet::new()).unwrap();
    let tr = translate_class(&model, "Coordinator", &policy, None).unwrap();
    let enabler = |task: &str| tr.table.task(task).map(|t| t.enabler.to_string());
    for (task, expected) in [
        ("run1", "s1[self] && s2[self] && s3[self]"),
        ("run2", "!s1[self] && !s2[self] && !s3[self]"),
        ("m11", "sync[self] && !s1[self]"),
        ("m12", "!sync[self]"),
    ] {
        ensure!(
            enabler(task).as_deref() == Some(expected),
            "{task} enabled by {:?}",
            enabler(task)
        );
    }
    let mut mapped = 0;
    for t in &tr.templates {
        for l in t.locations.iter().filter(|l| l.id != "l0" && l.id != "u") {
            ensure!(
                tr.source_of(&t.name, &l.id).is_some(),
                "{}.{} has no source line",
                t.name,
                l.id
            );
            mapped += 1;
        }
    }
    let golden = std::fs::read_to_string(models().join("coordinator/coordinator.golden")).unwrap();
    ensure!(
        golden_text(&tr) == golden,
        "translation differs from coordinator.golden"
    );
    Ok(format!(
        "matches golden file; {mapped} inner locations mapped to source lines"
    ))
}

fn schedulability() -> Outcome {
    let r = check(&coordinator(SPEED, MD));
    ensure!(
        matches!(r.verdict, Schedulability::Schedulable),
        "SPEED={SPEED} MD={MD}: {}",
        r.verdict.name()
    );
    ensure!(
        r.max_occupancy <= MAX_OCCUPANCY,
        "occupancy {} > {MAX_OCCUPANCY}",
        r.max_occupancy
    );
    Ok(format!(
        "SPEED={SPEED} MD={MD} schedulable, max occupancy {} <= {MAX_OCCUPANCY}, {} states",
        r.max_occupancy, r.stats.stored
    ))
}

fn boundary() -> Outcome {
    let mut observed = Vec::new();
    let mut failing = Vec::new();
    for (speed, md) in [(SPEED - 1, MD), (SPEED, MD - 1)] {
        let sys = coordinator(speed, md);
        let cause = replayable_error(&sys, &check(&sys))?;
        if cause.is_some() {
            failing.push(format!("SPEED={speed} MD={md}"));
        }
        observed.push(format!("SPEED={speed} MD={md}: {}", describe(&cause)));
    }
    // the tightest settings this model tolerates, for the record
    for (speed, md) in [(17, MD), (16, MD), (SPEED, 19)] {
        let sys = coordinator(speed, md);
        observed.push(format!(
            "SPEED={speed} MD={md}: {}",
            describe(&replayable_error(&sys, &check(&sys))?)
        ));
    }
    let text = observed.join("; ");
    ensure!(!failing.is_empty(), "{text}");
    Ok(format!(
        "{} nonschedulable with replayable trace; {text}",
        failing.join(" and ")
    ))
}

fn jitter() -> Outcome {
    let verdict = |j: i64| {
        let sys = system(&project(
            "coordinator/jitter.toml",
            &[("SPEED", SPEED), ("MD", MD), ("J", j)],
        ));
        replayable_error(&sys, &check(&sys))
    };
    let at = verdict(JITTER)?;
    ensure!(at.is_some(), "jitter {JITTER} stays schedulable");
    let mut smallest = JITTER;
    for j in 0..JITTER {
        if verdict(j)?.is_some() {
            smallest = j;
            break;
        }
    }
    Ok(format!(
        "jitter {JITTER}: {} (replayed); smallest failing jitter {smallest}",
        describe(&at)
    ))
}

fn query(sys: &ComposedSystem, text: &str) -> Result<(bool, usize), String> {
    let q: Query = text.parse().map_err(|e| format!("{e}"))?;
    let out = run_query(sys, &q, ExploreOptions::default()).map_err(|e| e.to_string())?;
    let holds = out
        .holds
        .ok_or_else(|| format!("`{text}`: {}", out.verdict.name()))?;
    if let Some(concrete) = &out.concrete {
        let trace = concrete
            .as_ref()
            .map_err(|e| format!("`{text}`: no concrete trace: {e}"))?;
        let mut compiled = compile_composed(sys).map_err(|e| e.to_string())?;
        let goal = resolve_target(&q.target, sys, &mut compiled).map_err(|e| e.to_string())?;
        replay_to(&compiled, trace, &goal).map_err(|e| format!("`{text}`: {e}"))?;
    }
    Ok((holds, out.stats.stored))
}

fn correctness_queries() -> Outcome {
    let (line26, n1) = query(&coordinator(SPEED, MD), "reach line m1:26")?;
    ensure!(line26, "line 26 of m1 is unreachable");
    let rounds = system(&project("coordinator/rounds.toml", &[]));
    let (never, n2) = query(&rounds, "invariant not state r1[0] == 3 && r2[0] == 1")?;
    ensure!(never, "m1 can run two rounds ahead of m2");
    let (one_ahead, _) = query(&rounds, "reach state r1[0] == 2 && r2[0] == 1")?;
    ensure!(
        one_ahead,
        "m1 never gets one round ahead, so the counters are not moving"
    );
    Ok(format!(
        "line m1:26 reachable ({n1} states); r1 == 3 && r2 == 1 unreachable ({n2} states)"
    ))
}

fn oracle_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut checked, mut reachable) = (0, 0);
    for round in 0..RANDOM_NETWORKS {
        let net = networks::random_network(&mut rng);
        let r =
            networks::agree(&net).map_err(|e| format!("network {round}: {e}\n{}", net.source))?;
        reachable += r as usize;
        checked += 1;
    }
    ensure!(checked >= MIN_NETWORKS, "only {checked} networks");
    Ok(format!(
        "{checked} networks, {reachable} reachable, 0 disagreements"
    ))
}

fn random_zone(rng: &mut ChaCha8Rng, dim: usize) -> Dbm {
    let mut z = Dbm::universe(dim);
    for _ in 0..rng.gen_range(0..10) {
        let (i, j) = (rng.gen_range(0..dim), rng.gen_range(0..dim));
        if i == j {
            continue;
        }
        let c = rng.gen_range(-6..12);
        let mut t = z.clone();
        if t.constrain(i, j, if rng.gen_bool(0.5) { lt(c) } else { le(c) }) {
            z = t;
        }
    }
    z
}

fn points(dim: usize, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![0i64]];
    for _ in 1..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=hi).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

fn canonical(z: &Dbm) -> bool {
    let mut c = Dbm::from_raw(z.dim(), z.raw().to_vec());
    c.close();
    c == *z
}

fn shifted(p: &[i64], d: i64) -> Vec<i64> {
    p.iter()
        .enumerate()
        .map(|(i, v)| if i == 0 { 0 } else { v + d })
        .collect()
}

fn zone_algebra(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for k in 0..RANDOM_ZONES {
        let dim = rng.gen_range(2..6);
        let z = random_zone(rng, dim);
        let pts = points(dim, 6);
        ensure!(!z.is_empty() && z.is_closed(), "zone {k} not canonical");
        let mut again = z.clone();
        again.close();
        ensure!(again == z, "zone {k}: closing twice changes it");

        let delay = rng.gen_range(0..5);
        let (mut up, mut down) = (z.clone(), z.clone());
        up.up();
        down.down();
        ensure!(canonical(&up) && up.includes(&z), "zone {k}: up");
        ensure!(canonical(&down) && down.includes(&z), "zone {k}: down");
        for p in pts.iter().filter(|p| z.contains_point(p)) {
            ensure!(
                up.contains_point(&shifted(p, delay)),
                "zone {k}: up loses {p:?}+{delay}"
            );
        }
        for p in &pts {
            if z.contains_point(&shifted(p, delay)) {
                ensure!(down.contains_point(p), "zone {k}: down misses {p:?}");
            }
        }

        let x = rng.gen_range(1..dim);
        let v = rng.gen_range(0..4);
        let mut r = z.clone();
        r.reset(x, v);
        ensure!(canonical(&r), "zone {k}: reset");
        for p in &pts {
            if z.contains_point(p) {
                let mut q = p.clone();
                q[x] = v as i64;
                ensure!(r.contains_point(&q), "zone {k}: reset loses {p:?}");
            }
            if r.contains_point(p) {
                ensure!(p[x] == v as i64, "zone {k}: reset keeps {p:?}");
            }
        }

        let (i, j) = (rng.gen_range(0..dim), rng.gen_range(0..dim));
        if i != j {
            let (c, strict) = (rng.gen_range(-4..8), rng.gen_bool(0.5));
            let raw = if strict { lt(c) } else { le(c) };
            let mut cz = z.clone();
            let nonempty = cz.constrain(i, j, raw);
            ensure!(nonempty == !cz.is_empty(), "zone {k}: constrain emptiness");
            for p in &pts {
                let d = p[i] - p[j];
                let sat = if strict { d < c as i64 } else { d <= c as i64 };
                ensure!(
                    cz.contains_point(p) == (z.contains_point(p) && sat),
                    "zone {k}: constrain at {p:?}"
                );
            }
            if nonempty {
                let mut twice = cz.clone();
                twice.apply(Constraint::new(i, j, raw));
                ensure!(
                    twice == cz,
                    "zone {k}: constraint applied twice changes the zone"
                );
            }
        }

        let other = random_zone(rng, dim);
        let mut meet = z.clone();
        meet.intersect(&other);
        for p in &pts {
            ensure!(
                meet.contains_point(p) == (z.contains_point(p) && other.contains_point(p)),
                "zone {k}: intersection at {p:?}"
            );
        }

        let (mut free, mut extra) = (z.clone(), z.clone());
        free.free(x);
        extra.extrapolate(&vec![rng.gen_range(0..6); dim]);
        ensure!(canonical(&free) && free.includes(&z), "zone {k}: free");
        ensure!(
            canonical(&extra) && extra.includes(&z),
            "zone {k}: extrapolation shrinks"
        );
    }
    Ok(())
}

fn random_int(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.4) {
        return match rng.gen_range(0..3) {
            0 => Expr::Int(rng.gen_range(-3..4)),
            1 => Expr::var("n"),
            _ => Expr::var("m"),
        };
    }
    match rng.gen_range(0..4) {
        3 => Expr::Unary(UnOp::Neg, Box::new(random_int(rng, depth - 1))),
        k => {
            let op = [BinOp::Add, BinOp::Sub, BinOp::Mul][k];
            Expr::bin(op, random_int(rng, depth - 1), random_int(rng, depth - 1))
        }
    }
}

fn random_bool(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.4) {
        return match rng.gen_range(0..4) {
            0 => Expr::var("a"),
            1 => Expr::var("b"),
            2 => Expr::Bool(rng.gen_bool(0.5)),
            _ => {
                let op = *[
                    BinOp::Eq,
                    BinOp::Ne,
                    BinOp::Lt,
                    BinOp::Le,
                    BinOp::Gt,
                    BinOp::Ge,
                ]
                .choose(rng)
                .unwrap();
                Expr::bin(op, random_int(rng, 2), random_int(rng, 2))
            }
        };
    }
    match rng.gen_range(0..3) {
        0 => Expr::bin(
            BinOp::And,
            random_bool(rng, depth - 1),
            random_bool(rng, depth - 1),
        ),
        1 => Expr::bin(
            BinOp::Or,
            random_bool(rng, depth - 1),
            random_bool(rng, depth - 1),
        ),
        _ => random_bool(rng, depth - 1).not(),
    }
}

fn random_guard(rng: &mut ChaCha8Rng, depth: u32) -> Guard {
    if depth == 0 || rng.gen_bool(0.4) {
        return if rng.gen_bool(0.8) {
            Guard::Bool(random_bool(rng, 3))
        } else {
            Guard::Reply("t".into())
        };
    }
    if rng.gen_bool(0.6) {
        random_guard(rng, depth - 1).and(random_guard(rng, depth - 1))
    } else {
        random_guard(rng, depth - 1).not()
    }
}

fn abstraction(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..RANDOM_GUARDS {
        let g = random_guard(rng, 3);
        for _ in 0..4 {
            let v = guards::Valuation {
                a: rng.gen_bool(0.5),
                b: rng.gen_bool(0.5),
                n: rng.gen_range(-4..5),
                m: rng.gen_range(-4..5),
                t: rng.gen_bool(0.5),
            };
            guards::check_over_approximation(&g, &v)?;
        }
    }
    Ok(())
}

fn queue_model() -> Result<usize, String> {
    let sys = coordinator(SPEED, MD);
    let mut states = 0;
    let mut violation = None;
    check_schedulability(&sys, ExploreOptions::default(), &mut |_, layout, s| {
        states += 1;
        if violation.is_none() {
            violation = layout.check_invariants(s.vars(layout.n_instances)).err();
        }
    })
    .map_err(|e| e.to_string())?;
    match violation {
        Some(v) => Err(format!("queue invariant broken: {v}")),
        None => Ok(states),
    }
}

fn queue_monotonicity() -> Result<String, String> {
    let mut verdicts = Vec::new();
    let mut was_schedulable = false;
    for max in QUEUE_SIZES {
        let mut p = project(
            "coordinator/coordinator.toml",
            &[("SPEED", SPEED), ("MD", MD)],
        );
        p.config.scheduler.max_queue = Some(max);
        let r = check(&system(&p));
        let ok = match &r.verdict {
            Schedulability::Schedulable => true,
            Schedulability::NonSchedulable { .. } => false,
            other => return Err(format!("MAX={max}: {}", other.name())),
        };
        ensure!(ok || !was_schedulable, "MAX={max} loses schedulability");
        was_schedulable = ok;
        verdicts.push(format!("{max}:{}", if ok { "ok" } else { "miss" }));
    }
    Ok(verdicts.join(" "))
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    zone_algebra(&mut rng)?;
    abstraction(&mut rng)?;
    let states = queue_model()?;
    let max = queue_monotonicity()?;
    Ok(format!(
        "{RANDOM_ZONES} zones, {RANDOM_GUARDS} guards x 4 valuations, queue invariants on {states} states, MAX {max}"
    ))
}

fn pair(strategy: StrategyName) -> ComposedSystem {
    let mut p = project("pair/pair.toml", &[]);
    p.config.scheduler.strategy = strategy;
    system(&p)
}

fn oracle(sys: &ComposedSystem) -> Result<OracleVerdict, String> {
    let mut compiled = compile_composed(sys).map_err(|e| e.to_string())?;
    let goal = resolve_target(&Target::Error, sys, &mut compiled).map_err(|e| e.to_string())?;
    let horizon = compiled.max_constants.iter().copied().max().unwrap_or(0) + 1;
    let opts = OracleOptions {
        integer_strict: true,
        ..OracleOptions::new(horizon, 1_000_000)
    };
    discrete_oracle(&compiled, &goal, opts).map_err(|e| e.to_string())
}

fn strategies() -> Outcome {
    let edf = pair(StrategyName::Edf);
    let edf_engine = replayable_error(&edf, &check(&edf))?;
    ensure!(edf_engine.is_none(), "EDF: {}", describe(&edf_engine));
    ensure!(
        oracle(&edf)? == OracleVerdict::Unreachable,
        "EDF: the oracle finds a miss"
    );
    let fcfs = pair(StrategyName::Fcfs);
    let fcfs_engine = replayable_error(&fcfs, &check(&fcfs))?;
    ensure!(
        matches!(&fcfs_engine, Some(ErrorCause::DeadlineMiss { task, .. }) if task == "short"),
        "FCFS: {}",
        describe(&fcfs_engine)
    );
    ensure!(
        oracle(&fcfs)? == OracleVerdict::Reachable,
        "FCFS: the oracle finds no miss"
    );
    Ok(format!(
        "EDF schedulable, FCFS: {}; engine and oracle agree",
        describe(&fcfs_engine)
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "golden translation", SECOND, golden_translation),
        (
            2,
            "schedulability at SPEED=25 MD=21",
            5 * MINUTE,
            schedulability,
        ),
        (3, "boundary sensitivity", 5 * MINUTE, boundary),
        (4, "arrival jitter", 10 * MINUTE, jitter),
        (5, "correctness queries", 10 * MINUTE, correctness_queries),
        (6, "engine and oracle agree", 10 * MINUTE, oracle_agreement),
        (7, "property suites", 10 * MINUTE, property_suites),
        (8, "strategy differentiation", MINUTE, strategies),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|d| {
            if elapsed > limit {
                Err(format!("{d}; took longer than {limit:?}"))
            } else {
                Ok(d)
            }
        });
        let secs = elapsed.as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {n} ({name}): PASS: {d} [{secs:.2} s]"),
            Err(d) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL: {d} [{secs:.2} s]");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
