//! Putting an object together: method automata, its scheduler and the
//! behavioral interfaces of its environment.

use std::collections::BTreeSet;
use std::fmt::Write;

use creol_syntax::{Diagnostic, SourceModel};
use ta_model::{
    xta::print_template, Decl, Declarations, Direction, Expr, Initializer, SystemBuilder,
    SystemModel, Template, XtaFile,
};

use crate::abs::AbstractionPolicy;
use crate::bounds::{extract_timing_bounds, queue_bound, TimingBounds};
use crate::class::{translate_class, ClassTranslation, DeadlineRange};
use crate::error::TranslateError;
use crate::interface::{const_eval, constants, load_interface, BehavioralInterface};
use crate::scheduler::{build_scheduler, SchedulerConfig, SchedulerTemplate, Strategy};

pub const SCHEDULER_INSTANCE: &str = "sched";

/// Queue capacity used when none is given and the computed bound is larger.
pub const DEFAULT_QUEUE_CAP: usize = 10;

#[derive(Debug, Clone)]
pub struct InterfaceSpec {
    pub template: Template,
    /// Empty: read off the interface's inputs.
    pub provides: BTreeSet<String>,
    /// Empty: `{0}`.
    pub known: BTreeSet<i64>,
}

#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub class: String,
    pub policy: AbstractionPolicy,
    pub strategy: Strategy,
    /// Fixed queue capacity; otherwise the timing bound, capped.
    pub max_queue: Option<usize>,
    pub queue_cap: usize,
    pub deadline: Option<DeadlineRange>,
    /// Declarations shared by the interfaces.
    pub env_declarations: Declarations,
    pub interfaces: Vec<InterfaceSpec>,
    /// Object id of `self` followed by the ids of the class parameters;
    /// default `0, 1, 2, ...`.
    pub object_ids: Option<Vec<i64>>,
}

impl SystemSpec {
    pub fn new(class: impl Into<String>, policy: AbstractionPolicy) -> SystemSpec {
        SystemSpec {
            class: class.into(),
            policy,
            strategy: Strategy::Edf,
            max_queue: None,
            queue_cap: DEFAULT_QUEUE_CAP,
            deadline: None,
            env_declarations: Declarations::new(),
            interfaces: Vec::new(),
            object_ids: None,
        }
    }

    /// Take the declarations and every template of an interface file as
    /// the environment, each interface providing what it sends.
    pub fn with_environment(mut self, file: XtaFile) -> SystemSpec {
        self.env_declarations.extend(file.declarations);
        self.interfaces
            .extend(file.templates.into_iter().map(|template| InterfaceSpec {
                template,
                provides: BTreeSet::new(),
                known: BTreeSet::new(),
            }));
        self
    }

    /// Replace the value of an integer constant of the environment.
    pub fn set_constant(&mut self, name: &str, value: i64) -> Result<(), TranslateError> {
        for d in &mut self.env_declarations.items {
            if let Decl::Var(v) = d {
                if v.name == name && v.ty.is_const() && v.dims.is_empty() {
                    v.init = Some(Initializer::Expr(Expr::Int(value)));
                    return Ok(());
                }
            }
        }
        Err(TranslateError::Bounds(format!(
            "the environment declares no constant `{name}`"
        )))
    }
}

#[derive(Debug, Clone)]
pub struct MethodInstance {
    pub instance: String,
    pub template: String,
    pub method: String,
}

#[derive(Debug, Clone)]
pub struct ComposedSystem {
    pub model: SystemModel,
    pub translation: ClassTranslation,
    pub scheduler: SchedulerTemplate,
    pub methods: Vec<MethodInstance>,
    pub interfaces: Vec<(String, BehavioralInterface)>,
    pub bounds: TimingBounds,
    /// `ceil(d_max / b_min)`, before capping.
    pub computed_queue_bound: Option<usize>,
    pub max_queue: usize,
    pub self_id: i64,
    pub warnings: Vec<String>,
}

impl ComposedSystem {
    pub fn method_instance(&self, method: &str) -> Option<&MethodInstance> {
        self.methods.iter().find(|m| m.method == method)
    }
}

pub fn method_instance_name(method: &str) -> String {
    format!("proc_{method}")
}

pub fn interface_instance_name(template: &str) -> String {
    format!("env_{template}")
}

/// Deadlines that inputs of the given interface automata assign, where
/// they are constant.
fn interface_deadlines(templates: &[&Template], decls: &Declarations) -> Vec<i64> {
    let consts = constants(decls);
    let mut out = Vec::new();
    for t in templates {
        for e in &t.edges {
            let sends = e
                .sync
                .as_ref()
                .is_some_and(|s| s.channel == "invoke" && s.dir == Direction::Send);
            if !sends {
                continue;
            }
            for u in &e.updates {
                if let Expr::Assign(_, lhs, rhs) = u {
                    if **lhs == Expr::ident("deadline") {
                        out.extend(const_eval(rhs, &consts));
                    }
                }
            }
        }
    }
    out
}

/// Translate, schedule and close a class with its environment.
pub fn build_system(
    model: &SourceModel,
    spec: &SystemSpec,
) -> Result<ComposedSystem, TranslateError> {
    let class = model
        .class(&spec.class)
        .ok_or_else(|| TranslateError::UnknownClass(spec.class.clone()))?;
    let env_templates: Vec<&Template> = spec.interfaces.iter().map(|i| &i.template).collect();
    let env_deadlines = interface_deadlines(&env_templates, &spec.env_declarations);
    let deadline = match spec.deadline {
        Some(d) => d,
        None => DeadlineRange::covering(
            class,
            env_deadlines
                .iter()
                .map(|&d| d.clamp(0, u32::MAX as i64) as u32),
        ),
    };
    let tr = translate_class(model, &spec.class, &spec.policy, Some(deadline))?;
    let mut warnings: Vec<String> = tr.warnings.iter().map(Diagnostic::to_string).collect();

    let mut globals = tr.declarations.clone();
    globals.extend(spec.env_declarations.clone());
    let mut interfaces = Vec::new();
    for i in &spec.interfaces {
        let b = load_interface(
            &globals,
            i.template.clone(),
            i.provides.clone(),
            i.known.clone(),
            &tr.table,
        )?;
        for &d in &b.deadlines {
            if d < deadline.min as i64 || d > deadline.max as i64 {
                return Err(TranslateError::Bounds(format!(
                    "interface `{}` assigns deadline {d} outside [{}, {}]",
                    b.template.name, deadline.min, deadline.max
                )));
            }
        }
        interfaces.push((interface_instance_name(&b.template.name), b));
    }

    let bounds = extract_timing_bounds(&tr.templates, &env_deadlines)?;
    for t in &bounds.zero_paths {
        warnings.push(format!(
            "`{t}` has a start-to-finish path without execution time; it is ignored for the queue bound"
        ));
    }
    let computed = queue_bound(bounds.d_max, bounds.b_min).ok();
    let max_queue = match (spec.max_queue, computed) {
        (Some(n), _) => n,
        (None, Some(b)) => {
            if b > spec.queue_cap {
                warnings.push(format!("queue bound {b} capped at {}", spec.queue_cap));
            }
            b.min(spec.queue_cap).max(1)
        }
        (None, None) => {
            warnings.push(format!(
                "no positive execution time found; queue capacity {}",
                spec.queue_cap
            ));
            spec.queue_cap
        }
    };
    let cfg = SchedulerConfig {
        strategy: spec.strategy.clone(),
        max_queue,
    };
    let scheduler = build_scheduler(&tr.table, &cfg, deadline)?;

    let n_obj = tr.table.n_obj();
    let ids = match &spec.object_ids {
        Some(ids) => ids.clone(),
        None => (0..n_obj as i64).collect(),
    };
    if ids.len() != n_obj {
        return Err(TranslateError::Bounds(format!(
            "expected {n_obj} object ids (self and {} parameters), got {}",
            n_obj - 1,
            ids.len()
        )));
    }
    if let Some(bad) = ids.iter().find(|&&i| i < 0 || i >= n_obj as i64) {
        return Err(TranslateError::Bounds(format!(
            "object id {bad} is outside 0..{n_obj}"
        )));
    }
    let self_id = ids[0];
    let mut args: Vec<Expr> = ids[1..].iter().map(|&i| Expr::Int(i)).collect();
    args.push(Expr::Int(self_id));

    let mut sb = SystemBuilder::new();
    sb.declare_all(globals)?;
    let mut methods = Vec::new();
    for (t, m) in tr.templates.iter().zip(&class.methods) {
        sb.add_template(t.clone())?;
        let inst = method_instance_name(&m.name);
        sb.instantiate(inst.clone(), t.name.clone(), args.clone())?;
        methods.push(MethodInstance {
            instance: inst,
            template: t.name.clone(),
            method: m.name.clone(),
        });
    }
    sb.add_template(scheduler.template.clone())?;
    sb.instantiate(
        SCHEDULER_INSTANCE,
        scheduler.template.name.clone(),
        vec![Expr::Int(self_id)],
    )?;
    for (inst, b) in &interfaces {
        sb.add_template(b.template.clone())?;
        sb.instantiate(
            inst.clone(),
            b.template.name.clone(),
            vec![Expr::Int(self_id)],
        )?;
    }
    let model = sb.finish()?;
    Ok(ComposedSystem {
        model,
        translation: tr,
        scheduler,
        methods,
        interfaces,
        bounds,
        computed_queue_bound: computed,
        max_queue,
        self_id,
        warnings,
    })
}

/// Copy of `t` with locations sorted by id and edges by their text.
pub fn normalized(t: &Template) -> Template {
    let mut t = t.clone();
    t.locations.sort_by(|a, b| a.id.cmp(&b.id));
    let key = |e: &ta_model::Edge| {
        let mut k = format!("{} -> {}", e.src, e.dst);
        if let Some(g) = &e.guard {
            let _ = write!(k, " {g}");
        }
        if let Some(s) = &e.sync {
            let _ = write!(k, " {s}");
        }
        for u in &e.updates {
            let _ = write!(k, " {u}");
        }
        k
    };
    t.edges.sort_by_key(key);
    t
}

/// Stable text form of a class translation: declarations, task table,
/// source map and normalized templates.
pub fn golden_text(tr: &ClassTranslation) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "// declarations");
    out.push_str(&tr.declarations.to_string());
    let _ = writeln!(out, "\n// tasks");
    for (id, t) in tr.table.tasks.iter().enumerate() {
        let guard = t
            .guard
            .as_ref()
            .map(|g| format!(" guard {g}"))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "// {id} {} of {}: {}{guard}",
            t.name, t.method, t.enabler
        );
    }
    for (k, l) in tr.table.labels.iter().enumerate() {
        let _ = writeln!(out, "// label {} = {l}", k + 1);
    }
    for (k, m) in tr.table.remote_methods.iter().enumerate() {
        let _ = writeln!(out, "// remote {k} = {m}");
    }
    let _ = writeln!(out, "\n// source map");
    for ((t, l), span) in &tr.locmap {
        let _ = writeln!(out, "// {t}.{l} -> line {}", span.start.line);
    }
    for t in &tr.templates {
        out.push('\n');
        out.push_str(&print_template(&normalized(t)));
    }
    out
}
