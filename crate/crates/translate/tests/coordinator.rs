use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use creol_syntax::parse_model;
use creol_translate::{build_system, AbstractionPolicy, Strategy, SystemSpec};
use ta_model::{compile, parse_xta};

fn model_file(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../models/coordinator")
        .join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn spec(env: &str) -> (creol_syntax::SourceModel, SystemSpec) {
    let model = parse_model(&model_file("coordinator.creol")).unwrap();
    let class = model.class("Coordinator").unwrap();
    let policy = AbstractionPolicy::for_class(class, &BTreeMap::new(), &BTreeSet::new()).unwrap();
    let spec = SystemSpec::new("Coordinator", policy)
        .with_environment(parse_xta(&model_file(env)).unwrap());
    (model, spec)
}

#[test]
fn periodic_system_composes_and_compiles() {
    let (model, spec) = spec("periodic.xta");
    let sys = build_system(&model, &spec).unwrap();
    assert_eq!(sys.bounds.d_max, 50);
    assert_eq!(sys.bounds.b_min, 1);
    assert_eq!(sys.computed_queue_bound, Some(50));
    assert_eq!(sys.max_queue, 10);
    assert_eq!(sys.model.templates.len(), 10);
    let c = compile(&sys.model).unwrap();
    assert_eq!(c.instances.len(), 10);
}

#[test]
fn strategies_all_compile() {
    let (model, mut spec) = spec("jitter.xta");
    spec.max_queue = Some(3);
    for strategy in [
        Strategy::Edf,
        Strategy::Fcfs,
        Strategy::Fps(
            [
                "init", "run", "body", "m1", "m2", "m3", "run1", "run2", "m11", "m12", "m21",
                "m22", "m31", "m32",
            ]
            .iter()
            .enumerate()
            .map(|(k, t)| (t.to_string(), k as u32))
            .collect(),
        ),
    ] {
        spec.strategy = strategy;
        let sys = build_system(&model, &spec).unwrap();
        compile(&sys.model).unwrap();
    }
}

fn translation() -> creol_translate::ClassTranslation {
    let model = parse_model(&model_file("coordinator.creol")).unwrap();
    let class = model.class("Coordinator").unwrap();
    let policy = AbstractionPolicy::for_class(class, &BTreeMap::new(), &BTreeSet::new()).unwrap();
    creol_translate::translate_class(&model, "Coordinator", &policy, None).unwrap()
}

#[test]
fn subtasks_and_enablers() {
    let tr = translation();
    let enabler = |task: &str| {
        let t = tr
            .table
            .tasks
            .iter()
            .find(|t| t.name == task)
            .unwrap_or_else(|| panic!("no task {task}"));
        t.enabler.to_string()
    };
    assert_eq!(enabler("run"), "true");
    assert_eq!(enabler("run1"), "s1[self] && s2[self] && s3[self]");
    assert_eq!(enabler("run2"), "!s1[self] && !s2[self] && !s3[self]");
    assert_eq!(enabler("m11"), "sync[self] && !s1[self]");
    assert_eq!(enabler("m12"), "!sync[self]");
    let names: Vec<&str> = tr.table.tasks.iter().map(|t| t.name.as_str()).collect();
    assert_eq!(
        names,
        [
            "init", "body", "run", "run1", "run2", "m1", "m11", "m12", "m2", "m21", "m22", "m3",
            "m31", "m32"
        ]
    );
}

#[test]
fn every_inner_location_has_a_source_line() {
    let tr = translation();
    for t in &tr.templates {
        for l in &t.locations {
            if l.id == "l0" || l.id == "u" {
                continue;
            }
            let span = tr
                .source_of(&t.name, &l.id)
                .unwrap_or_else(|| panic!("{}.{} has no source line", t.name, l.id));
            assert!(
                (6..=39).contains(&span.start.line),
                "{}.{} -> {}",
                t.name,
                l.id,
                span.start.line
            );
        }
    }
}

#[test]
fn translation_matches_golden() {
    let text = creol_translate::golden_text(&translation());
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../models/coordinator/coordinator.golden");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let golden =
        std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(text, golden);
}
