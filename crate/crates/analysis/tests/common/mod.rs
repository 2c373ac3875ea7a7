#![allow(dead_code)]

pub mod networks;

use std::collections::{BTreeMap, BTreeSet};

use creol_syntax::parse_model;
use creol_translate::{build_system, AbstractionPolicy, ComposedSystem, Strategy, SystemSpec};
use ta_model::parse_xta;

pub fn model_path(rel: &str) -> String {
    format!("{}/../../models/{rel}", env!("CARGO_MANIFEST_DIR"))
}

pub struct Setup<'a> {
    pub creol: &'a str,
    pub class: &'a str,
    pub env: &'a str,
    pub ranges: &'a [(&'a str, i64, i64)],
    pub constants: &'a [(&'a str, i64)],
    pub strategy: Strategy,
    pub max_queue: Option<usize>,
}

impl<'a> Setup<'a> {
    pub fn coordinator(constants: &'a [(&'a str, i64)]) -> Setup<'a> {
        Setup {
            creol: "coordinator/coordinator.creol",
            class: "Coordinator",
            env: "coordinator/periodic.xta",
            ranges: &[],
            constants,
            strategy: Strategy::Edf,
            max_queue: None,
        }
    }

    pub fn build(&self) -> ComposedSystem {
        let model = parse_model(&std::fs::read_to_string(model_path(self.creol)).unwrap()).unwrap();
        let class = model.class(self.class).unwrap();
        let ranges: BTreeMap<String, (i64, i64)> = self
            .ranges
            .iter()
            .map(|&(n, lo, hi)| (n.to_string(), (lo, hi)))
            .collect();
        let policy = AbstractionPolicy::for_class(class, &ranges, &BTreeSet::new()).unwrap();
        let env = parse_xta(&std::fs::read_to_string(model_path(self.env)).unwrap()).unwrap();
        let mut spec = SystemSpec::new(self.class, policy).with_environment(env);
        for &(name, value) in self.constants {
            spec.set_constant(name, value).unwrap();
        }
        spec.strategy = self.strategy.clone();
        spec.max_queue = self.max_queue;
        build_system(&model, &spec).unwrap()
    }
}
