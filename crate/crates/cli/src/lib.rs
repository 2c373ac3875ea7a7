//! Driver for the Creol to timed-automata tool chain: loads a project
//! file, builds the composed network, exports it and checks it.

pub mod config;
pub mod report;
pub mod uppaal;

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use creol_syntax::parse_model;
use creol_translate::{
    build_system, AbstractionPolicy, ComposedSystem, DeadlineRange, Strategy, SystemSpec,
    TranslateError,
};
use serde::Serialize;
use ta_analysis::{
    check_schedulability, compile_composed, run_query, target_expr, trace_to_source, AnalysisError,
    ConcreteTrace, ExploreOptions, Query, QueryError, QueryKind, Schedulability,
    SchedulabilityReport, Target, Verdict,
};
use ta_model::parse_xta;

use config::{ConfigError, Project, ProjectConfig, StrategyName};
use report::{
    Cause, QueryEntry, Report, SchedulabilityEntry, StatsEntry, Step, Sweep, SweepRow, SystemInfo,
    Tool, Witness, SCHEMA_VERSION,
};
use uppaal::Formula;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// A verdict differs from the expected one.
    pub const MISMATCH: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const BUDGET: i32 = 3;
    /// Unreadable or ill-formed input, or a failed translation.
    pub const INPUT: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("query `{text}`: {source}")]
    Query { text: String, source: QueryError },
}

/// Command-line settings that take precedence over the project file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub strategy: Option<StrategyName>,
    pub max_queue: Option<usize>,
    pub budget: Option<usize>,
    pub constants: Vec<(String, i64)>,
}

impl Overrides {
    pub fn apply(&self, c: &mut ProjectConfig) {
        if let Some(s) = self.strategy {
            c.scheduler.strategy = s;
            if s != StrategyName::Fps {
                c.scheduler.priorities.clear();
            }
        }
        if let Some(m) = self.max_queue {
            c.scheduler.max_queue = Some(m);
        }
        if let Some(b) = self.budget {
            c.budget = Some(b);
        }
        for (name, value) in &self.constants {
            c.constants.insert(name.clone(), *value);
        }
    }
}

/// `NAME=FROM..TO`, both ends included. `NAME` is an environment constant
/// or `max_queue`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    pub variable: String,
    pub from: i64,
    pub to: i64,
}

pub const QUEUE_VARIABLE: &str = "max_queue";

impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<SweepSpec, String> {
        let bad = || format!("expected NAME=FROM..TO, got `{s}`");
        let (variable, range) = s.split_once('=').ok_or_else(bad)?;
        let (from, to) = range.split_once("..").ok_or_else(bad)?;
        let from: i64 = from.trim().parse().map_err(|_| bad())?;
        let to: i64 = to.trim().parse().map_err(|_| bad())?;
        let variable = variable.trim();
        if variable.is_empty() || from > to {
            return Err(bad());
        }
        if variable == QUEUE_VARIABLE && from < 1 {
            return Err("queue capacities start at 1".into());
        }
        Ok(SweepSpec {
            variable: variable.to_string(),
            from,
            to,
        })
    }
}

fn read(project: &Project, p: &std::path::Path) -> Result<String, CliError> {
    Ok(config::read(&project.resolve(p))?)
}

/// Build the network described by a project file.
pub fn build(project: &Project) -> Result<ComposedSystem, CliError> {
    let c = &project.config;
    let src_path = project.resolve(&c.source);
    let model = parse_model(&read(project, &c.source)?)
        .map_err(|e| CliError::Input(format!("{}:{e}", src_path.display())))?;
    let class = model.class(&c.class).ok_or_else(|| {
        CliError::Input(format!(
            "{} declares no class `{}`",
            src_path.display(),
            c.class
        ))
    })?;
    let ranges: BTreeMap<String, (i64, i64)> = c
        .abstraction
        .ranges
        .iter()
        .map(|(n, &[lo, hi])| (n.clone(), (lo, hi)))
        .collect();
    let drop: BTreeSet<String> = c.abstraction.drop.iter().cloned().collect();
    let policy = AbstractionPolicy::for_class(class, &ranges, &drop)?;
    let mut spec = SystemSpec::new(c.class.clone(), policy);
    for iface in &c.interfaces {
        let file = parse_xta(&read(project, iface)?)
            .map_err(|e| CliError::Input(format!("{}:{e}", project.resolve(iface).display())))?;
        spec = spec.with_environment(file);
    }
    for (name, &value) in &c.constants {
        spec.set_constant(name, value)?;
    }
    spec.strategy = match c.scheduler.strategy {
        StrategyName::Edf => Strategy::Edf,
        StrategyName::Fps => Strategy::Fps(c.scheduler.priorities.clone()),
        StrategyName::Fcfs => Strategy::Fcfs,
    };
    spec.max_queue = c.scheduler.max_queue;
    if let Some(cap) = c.scheduler.queue_cap {
        spec.queue_cap = cap;
    }
    if let Some(d) = c.deadlines {
        spec.deadline = Some(DeadlineRange::new(d.min, d.max, d.initial)?);
    }
    spec.object_ids = c.objects.clone();
    Ok(build_system(&model, &spec)?)
}

fn parse_queries(c: &ProjectConfig) -> Result<Vec<(Query, bool)>, CliError> {
    c.queries
        .iter()
        .map(|q| {
            let parsed = q.text.parse().map_err(|source| CliError::Query {
                text: q.text.clone(),
                source,
            })?;
            Ok((parsed, q.expect))
        })
        .collect()
}

/// The verifier formula for a query.
pub fn formula(sys: &ComposedSystem, q: &Query) -> Result<String, CliError> {
    let e = target_expr(&q.target, sys)?;
    Ok(match q.kind {
        QueryKind::Reach => format!("E<> ({e})"),
        QueryKind::InvariantNot => format!("A[] not ({e})"),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskRow {
    pub id: usize,
    pub name: String,
    pub method: String,
    pub guard: Option<String>,
    pub enabler: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocationRow {
    pub template: String,
    pub location: String,
    pub line: u32,
    pub col: u32,
}

/// Task and location tables accompanying an export.
#[derive(Debug, Clone, Serialize)]
pub struct Tables {
    pub class: String,
    pub tasks: Vec<TaskRow>,
    pub labels: Vec<String>,
    pub remote_methods: Vec<String>,
    pub queue_capacity: usize,
    pub locations: Vec<LocationRow>,
    pub warnings: Vec<String>,
}

pub struct Translation {
    pub system: ComposedSystem,
    pub xml: String,
    pub tables: Tables,
}

/// Export the network and its queries for the UPPAAL verifier.
pub fn translate(project: &Project) -> Result<Translation, CliError> {
    let sys = build(project)?;
    let error = Query {
        kind: QueryKind::InvariantNot,
        target: Target::Error,
    };
    let mut formulas = vec![Formula {
        formula: formula(&sys, &error)?,
        comment: "schedulability".into(),
    }];
    for (q, expect) in parse_queries(&project.config)? {
        formulas.push(Formula {
            formula: formula(&sys, &q)?,
            comment: format!("{q} (expected to {})", if expect { "hold" } else { "fail" }),
        });
    }
    let xml = uppaal::to_xml(&sys.model, &formulas);
    let table = &sys.translation.table;
    let tables = Tables {
        class: table.class.clone(),
        tasks: table
            .tasks
            .iter()
            .enumerate()
            .map(|(id, t)| TaskRow {
                id,
                name: t.name.clone(),
                method: t.method.clone(),
                guard: t.guard.as_ref().map(|g| g.to_string()),
                enabler: t.enabler.to_string(),
            })
            .collect(),
        labels: table.labels.clone(),
        remote_methods: table.remote_methods.clone(),
        queue_capacity: sys.max_queue,
        locations: sys
            .translation
            .locmap
            .iter()
            .map(|((template, location), span)| LocationRow {
                template: template.clone(),
                location: location.clone(),
                line: span.start.line,
                col: span.start.col,
            })
            .collect(),
        warnings: sys.warnings.clone(),
    };
    Ok(Translation {
        system: sys,
        xml,
        tables,
    })
}

fn options(c: &ProjectConfig) -> ExploreOptions {
    let mut o = ExploreOptions::default();
    if let Some(b) = c.budget {
        o.budget = b;
    }
    o
}

fn witness(
    sys: &ComposedSystem,
    concrete: &Result<ConcreteTrace, String>,
) -> Result<Witness, CliError> {
    Ok(match concrete {
        Ok(trace) => {
            let compiled = compile_composed(sys)?;
            match trace_to_source(sys, &compiled, trace) {
                Ok(steps) => Witness::Trace(steps.iter().map(Step::from).collect()),
                Err(e) => Witness::Unavailable(e),
            }
        }
        Err(e) => Witness::Unavailable(e.clone()),
    })
}

fn system_info(sys: &ComposedSystem, c: &ProjectConfig) -> SystemInfo {
    SystemInfo {
        class: c.class.clone(),
        strategy: format!("{:?}", c.scheduler.strategy).to_lowercase(),
        queue_capacity: sys.max_queue,
        computed_queue_bound: sys.computed_queue_bound,
        d_max: sys.bounds.d_max,
        b_min: sys.bounds.b_min,
        warnings: sys.warnings.clone(),
    }
}

fn cause_of(r: &SchedulabilityReport) -> Option<Cause> {
    match &r.verdict {
        Schedulability::NonSchedulable { cause, .. } => Some(Cause::from(cause)),
        _ => None,
    }
}

fn schedulability(
    sys: &ComposedSystem,
    c: &ProjectConfig,
) -> Result<SchedulabilityEntry, CliError> {
    let r = check_schedulability(sys, options(c), &mut |_, _, _| {})?;
    let verdict = r.verdict.name().to_string();
    let as_expected = match &r.verdict {
        Schedulability::Schedulable => c.expect_schedulable,
        Schedulability::NonSchedulable { .. } => !c.expect_schedulable,
        _ => false,
    };
    let (error, witness) = match &r.verdict {
        Schedulability::NonSchedulable { concrete, .. } => (None, Some(witness(sys, concrete)?)),
        Schedulability::ModelingError { error, .. } => (Some(error.clone()), None),
        _ => (None, None),
    };
    Ok(SchedulabilityEntry {
        verdict,
        expected_schedulable: c.expect_schedulable,
        as_expected,
        max_occupancy: r.max_occupancy,
        queue_capacity: r.queue_capacity,
        cause: cause_of(&r),
        error,
        witness,
        stats: StatsEntry::from(&r.stats),
    })
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Reachable(_) => "reachable",
        Verdict::Unreachable => "unreachable",
        Verdict::BudgetExhausted => "budget-exhausted",
        Verdict::ModelingError { .. } => "modeling-error",
    }
}

/// Check schedulability and answer every query of the project.
pub fn check(project: &Project) -> Result<Report, CliError> {
    let c = &project.config;
    let queries = parse_queries(c)?;
    let sys = build(project)?;
    let sched = schedulability(&sys, c)?;
    let mut entries = Vec::new();
    for (q, expected) in queries {
        let out = run_query(&sys, &q, options(c))?;
        let witness = match &out.concrete {
            Some(concrete) => Some(witness(&sys, concrete)?),
            None => None,
        };
        entries.push(QueryEntry {
            query: q.to_string(),
            verdict: verdict_name(&out.verdict).to_string(),
            expected,
            holds: out.holds,
            as_expected: out.holds == Some(expected),
            witness,
            stats: StatsEntry::from(&out.stats),
        });
    }
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        tool: Tool::current(),
        config: c.clone(),
        system: system_info(&sys, c),
        schedulability: Some(sched),
        queries: entries,
        sweep: None,
    })
}

/// Schedulability for each value of one parameter; no traces, no queries.
pub fn sweep(project: &Project, spec: &SweepSpec) -> Result<Report, CliError> {
    let mut rows = Vec::new();
    let mut info = None;
    for value in spec.from..=spec.to {
        let mut p = project.clone();
        if spec.variable == QUEUE_VARIABLE {
            p.config.scheduler.max_queue = Some(value as usize);
        } else {
            p.config.constants.insert(spec.variable.clone(), value);
        }
        let sys = build(&p)?;
        let r = check_schedulability(&sys, options(&p.config), &mut |_, _, _| {})?;
        info.get_or_insert_with(|| system_info(&sys, &p.config));
        rows.push(SweepRow {
            value,
            verdict: r.verdict.name().to_string(),
            max_occupancy: r.max_occupancy,
            cause: cause_of(&r),
            stats: StatsEntry::from(&r.stats),
        });
    }
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        tool: Tool::current(),
        config: project.config.clone(),
        system: info.expect("a sweep has at least one value"),
        schedulability: None,
        queries: Vec::new(),
        sweep: Some(Sweep {
            variable: spec.variable.clone(),
            rows,
        }),
    })
}

pub fn exit_code(r: &Report) -> i32 {
    if r.incomplete() {
        exit::BUDGET
    } else if !r.all_as_expected() {
        exit::MISMATCH
    } else {
        exit::OK
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_specs() {
        let s: SweepSpec = "SPEED=15..25".parse().unwrap();
        assert_eq!((s.variable.as_str(), s.from, s.to), ("SPEED", 15, 25));
        assert!("SPEED=25..15".parse::<SweepSpec>().is_err());
        assert!("SPEED=1-3".parse::<SweepSpec>().is_err());
        assert!("=1..3".parse::<SweepSpec>().is_err());
        assert!("max_queue=0..3".parse::<SweepSpec>().is_err());
    }
}
