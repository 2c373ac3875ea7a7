//! Random small networks for comparing the zone engine with the
//! integer-time oracle.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use ta_analysis::{
    concretize, discrete_oracle, explore, replay_to, ExploreOptions, OracleOptions, OracleVerdict,
    Verdict,
};
use ta_model::{compile, parse_expr, parse_xta, SystemModel};

pub const MAX_CONST: i64 = 6;

pub struct Network {
    pub source: String,
    pub goal: String,
}

/// Up to three automata sharing up to four clocks, one bounded integer and
/// two binary channels (one of them urgent).
pub fn random_network(rng: &mut ChaCha8Rng) -> Network {
    let n_auto = rng.gen_range(1..=3);
    let n_clocks = rng.gen_range(1..=4);
    let clocks: Vec<String> = (0..n_clocks).map(|c| format!("c{c}")).collect();
    let mut src = format!(
        "int[0,2] v; chan a; urgent chan u; clock {};\n",
        clocks.join(", ")
    );
    let mut goals = Vec::new();
    for p in 0..n_auto {
        let n_locs = rng.gen_range(2..=4);
        let mut states = Vec::new();
        let mut marks = Vec::new();
        for l in 0..n_locs {
            if l > 0 && rng.gen_bool(0.4) {
                let c = clocks.choose(rng).unwrap();
                states.push(format!(
                    "l{l} {{ {c} <= {} }}",
                    rng.gen_range(0..=MAX_CONST)
                ));
            } else {
                states.push(format!("l{l}"));
            }
            if l > 0 && rng.gen_bool(0.1) {
                marks.push(format!(
                    "{} l{l};",
                    if rng.gen_bool(0.5) {
                        "urgent"
                    } else {
                        "commit"
                    }
                ));
            }
            goals.push(format!("P{p}.l{l}"));
        }
        let mut trans = Vec::new();
        for _ in 0..rng.gen_range(2..=5) {
            let (s, d) = (rng.gen_range(0..n_locs), rng.gen_range(0..n_locs));
            let sync = match rng.gen_range(0..6) {
                0 => Some("a!"),
                1 => Some("a?"),
                2 => Some("u!"),
                3 => Some("u?"),
                _ => None,
            };
            let mut guard = Vec::new();
            if !matches!(sync, Some("u!" | "u?")) {
                for _ in 0..rng.gen_range(0..=2) {
                    let c = clocks.choose(rng).unwrap();
                    let rel = ["<=", ">=", "=="].choose(rng).unwrap();
                    guard.push(format!("{c} {rel} {}", rng.gen_range(0..=MAX_CONST)));
                }
            }
            if rng.gen_bool(0.3) {
                guard.push(format!(
                    "v {} {}",
                    ["==", "!=", "<"].choose(rng).unwrap(),
                    rng.gen_range(0..=2)
                ));
            }
            let mut assign = Vec::new();
            if rng.gen_bool(0.5) {
                assign.push(format!("{} = 0", clocks.choose(rng).unwrap()));
            }
            if rng.gen_bool(0.3) {
                assign.push("v = (v + 1) % 3".to_string());
            }
            let mut body = String::new();
            if !guard.is_empty() {
                body += &format!("guard {}; ", guard.join(" && "));
            }
            if let Some(s) = sync {
                body += &format!("sync {s}; ");
            }
            if !assign.is_empty() {
                body += &format!("assign {}; ", assign.join(", "));
            }
            trans.push(format!("l{s} -> l{d} {{ {body}}}"));
        }
        src += &format!(
            "process T{p}() {{ state {}; {} init l0; trans {}; }}\nP{p} = T{p}();\n",
            states.join(", "),
            marks.join(" "),
            trans.join(", ")
        );
    }
    let mut goal = goals.choose(rng).unwrap().clone();
    if rng.gen_bool(0.3) {
        goal = format!("{goal} && v == {}", rng.gen_range(0..=2));
    }
    Network { source: src, goal }
}

/// Answer the network's query with both procedures. `Ok(reachable)` when
/// they agree and every reachable answer replays.
pub fn agree(net: &Network) -> Result<bool, String> {
    let f = parse_xta(&net.source).map_err(|e| e.to_string())?;
    let model = SystemModel {
        globals: f.declarations,
        templates: f.templates,
        instances: f.instances,
    };
    let mut sys = compile(&model).map_err(|e| e.to_string())?;
    let goal = sys
        .compile_predicate(&parse_expr(&net.goal).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let oracle = discrete_oracle(
        &sys,
        &goal,
        OracleOptions::new(MAX_CONST as i32 + 1, 1_000_000),
    )
    .map_err(|e| format!("oracle failed: {e}"))?;
    let run = explore(&sys, &goal, ExploreOptions::default(), &mut |_| {});
    let engine = match &run.verdict {
        Verdict::Reachable(trace) => {
            let concrete = concretize(&sys, &trace.transitions(), &goal)?;
            replay_to(&sys, &concrete, &goal).map_err(|e| e.to_string())?;
            OracleVerdict::Reachable
        }
        Verdict::Unreachable => OracleVerdict::Unreachable,
        other => return Err(format!("engine: {}", other.name())),
    };
    if engine != oracle {
        return Err(format!(
            "engine {engine:?}, oracle {oracle:?} for {}",
            net.goal
        ));
    }
    Ok(engine == OracleVerdict::Reachable)
}
