use ta_analysis::{
    concretize, explore, replay, replay_to, Action, Engine, ExploreOptions, Time, Transition,
    Verdict, ZoneMode,
};
use ta_model::compile::{CExpr, CompiledSystem};
use ta_model::{compile, parse_expr, parse_xta, SystemModel};

fn system(src: &str) -> CompiledSystem {
    let f = parse_xta(src).unwrap();
    compile(&SystemModel {
        globals: f.declarations,
        templates: f.templates,
        instances: f.instances,
    })
    .unwrap()
}

fn goal(sys: &mut CompiledSystem, text: &str) -> CExpr {
    sys.compile_predicate(&parse_expr(text).unwrap()).unwrap()
}

fn reach(src: &str, target: &str) -> Verdict {
    let mut sys = system(src);
    let g = goal(&mut sys, target);
    explore(&sys, &g, ExploreOptions::default(), &mut |_| {}).verdict
}

#[test]
fn invariant_blocks_late_guard() {
    let src =
        "process P() { clock x; state a { x <= 4 }, b; init a; trans a -> b { guard x >= 5; }; }
               p = P(); system p;";
    assert!(matches!(reach(src, "p.b"), Verdict::Unreachable));
    let open = src.replace("x <= 4", "x <= 5");
    assert!(reach(&open, "p.b").is_reachable());
}

#[test]
fn urgent_channel_suppresses_delay() {
    let src = "urgent chan go;
               process S() { clock x; state a, b, c; init a;
                 trans a -> b { sync go!; }, a -> c { guard x >= 1; }; }
               process R() { state a, b; init a; trans a -> b { sync go?; }; }
               s = S(); r = R(); system s, r;";
    assert!(matches!(reach(src, "s.c"), Verdict::Unreachable));
    assert!(reach(src, "s.b").is_reachable());
}

#[test]
fn two_senders_do_not_synchronise() {
    let src = "chan c;
               process S() { state a, b; init a; trans a -> b { sync c!; }; }
               s1 = S(); s2 = S(); system s1, s2;";
    let sys = system(src);
    let mut engine = Engine::new(&sys);
    let s0 = engine.initial(ZoneMode::ABSTRACT).unwrap().unwrap();
    assert!(engine
        .successors(&s0, ZoneMode::ABSTRACT)
        .unwrap()
        .is_empty());
}

#[test]
fn committed_location_goes_first() {
    let src = "int n;
               process A() { state a, b, c; commit b; init a;
                 trans a -> b { assign n = 1; }, b -> c { assign n = 2; }; }
               process B() { state a, b; init a; trans a -> b { guard n == 1; }; }
               pa = A(); pb = B(); system pa, pb;";
    assert!(matches!(reach(src, "pb.b"), Verdict::Unreachable));
}

#[test]
fn sender_updates_run_before_receiver() {
    let src = "chan c; int v;
               process S() { state a, b; init a; trans a -> b { sync c!; assign v = 3; }; }
               process R() { int seen; state a, b; init a; trans a -> b { sync c?; assign seen = v; }; }
               s = S(); r = R(); system s, r;";
    assert!(reach(src, "r.b && r.seen == 3").is_reachable());
}

#[test]
fn out_of_range_update_is_a_modeling_error() {
    let src = "int[0,1] v;
               process P() { state a; init a; trans a -> a { assign v = v + 1; }; }
               p = P(); system p;";
    assert!(matches!(
        reach(src, "v == 5"),
        Verdict::ModelingError { .. }
    ));
}

#[test]
fn budget_is_reported() {
    let src = "int[0,100] v;
               process P() { state a; init a; trans a -> a { guard v < 100; assign v = v + 1; }; }
               p = P(); system p;";
    let mut sys = system(src);
    let g = goal(&mut sys, "v == 100");
    let opts = ExploreOptions {
        budget: 10,
        ..ExploreOptions::default()
    };
    assert!(matches!(
        explore(&sys, &g, opts, &mut |_| {}).verdict,
        Verdict::BudgetExhausted
    ));
}

#[test]
fn traces_are_shortest_and_replay() {
    let src = "process P() { clock x, y; state a, b { y <= 3 }, c; init a;
                 trans a -> b { guard x >= 2; assign y = 0; }, b -> c { guard x - y >= 2 && y >= 1 && x <= 4; },
                       a -> a { assign x = 0; }; }
               p = P(); system p;";
    let mut sys = system(src);
    let g = goal(&mut sys, "p.c");
    let Verdict::Reachable(trace) =
        explore(&sys, &g, ExploreOptions::default(), &mut |_| {}).verdict
    else {
        panic!("p.c should be reachable")
    };
    assert_eq!(trace.transitions().len(), 2);
    let concrete = concretize(&sys, &trace.transitions(), &g).unwrap();
    let last = replay_to(&sys, &concrete, &g).unwrap();
    assert!(last.clocks[2] >= Time::from_integer(1));
}

#[test]
fn replay_rejects_illegal_actions() {
    let src =
        "process P() { clock x; state a { x <= 2 }, b; init a; trans a -> b { guard x >= 1; }; }
               p = P(); system p;";
    let sys = system(src);
    let fire = Action::Fire(Transition::Internal {
        instance: 0,
        edge: 0,
    });
    let half = Action::Delay(Time::new(1, 2));
    assert!(replay(&sys, &[half, fire]).is_err());
    assert!(replay(&sys, &[Action::Delay(Time::from_integer(3))]).is_err());
    let states = replay(&sys, &[half, half, fire]).unwrap();
    assert_eq!(states.last().unwrap().now, Time::from_integer(1));
}
