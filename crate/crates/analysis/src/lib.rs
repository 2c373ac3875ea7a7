//! Reachability analysis of timed-automata networks: a zone-graph explorer,
//! an integer-time oracle, concrete trace construction and replay, and the
//! schedulability check for translated objects.

pub mod engine;
pub mod explore;
pub mod oracle;
pub mod query;
pub mod schedulability;
pub mod trace;

pub use engine::{Engine, State, StepError, Transition, ZoneMode};
pub use explore::{
    explore, Exploration, ExploreOptions, Stats, Trace, TraceStep, Verdict, DEFAULT_BUDGET,
};
pub use oracle::{discrete_oracle, OracleError, OracleOptions, OracleVerdict};
pub use query::{Query, QueryError, QueryKind, Target};
pub use schedulability::{
    check_schedulability, compile_composed, render_trace, resolve_target, run_query, target_expr,
    trace_to_source, AnalysisError, AnnotatedStep, ErrorCause, QueryOutcome, QueueEntry,
    QueueLayout, Schedulability, SchedulabilityReport, SourceRef,
};
pub use trace::{
    concretize, replay, replay_to, Action, ConcreteState, ConcreteTrace, ReplayError, Time,
};
