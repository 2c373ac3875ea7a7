//! Class-level translation: task table, generated global declarations and
//! the source map from automaton locations back to statements.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use creol_syntax::{validate, ClassDecl, Diagnostic, Guard, SourceModel, Span, VarType};
use ta_model::{parse_declarations, Declarations, Expr as TExpr, Template};

use crate::abs::{AbstractionPolicy, Domain};
use crate::error::TranslateError;
use crate::method::{labels_of, methods_of, op_const, translate_method};

/// Global names of generated declarations, plus the template parameter
/// `self`.
pub const GENERATED_NAMES: &[&str] = &[
    "MSG",
    "nObj",
    "LBL",
    "c",
    "deadline",
    "labels",
    "complete",
    "delegate",
    "invoke",
    "start",
    "finish",
    "wait",
    "resume",
    "reply",
    "isEnabled",
    "self",
];

/// Keywords of the automaton language plus common reserved words of the
/// external tool.
pub const RESERVED: &[&str] = &[
    "int",
    "bool",
    "clock",
    "chan",
    "const",
    "urgent",
    "broadcast",
    "meta",
    "select",
    "true",
    "false",
    "for",
    "while",
    "do",
    "if",
    "else",
    "return",
    "void",
    "typedef",
    "struct",
    "imply",
    "and",
    "or",
    "not",
    "forall",
    "exists",
    "sum",
    "priority",
    "default",
    "scalar",
    "double",
    "string",
    "switch",
    "case",
    "break",
    "continue",
    "goto",
    "rate",
    "before_update",
    "after_update",
    "progress",
    "IO",
    "hybrid",
    "deadlock",
    "A",
    "E",
    "M",
    "Pr",
];

/// Range and initial value of the `deadline` carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeadlineRange {
    pub min: u32,
    pub max: u32,
    pub initial: u32,
}

impl DeadlineRange {
    pub fn new(min: u32, max: u32, initial: u32) -> Result<DeadlineRange, TranslateError> {
        if min > max || initial < min || initial > max {
            return Err(TranslateError::Bounds(format!(
                "deadline range [{min}, {max}] with initial value {initial} is inconsistent"
            )));
        }
        Ok(DeadlineRange { min, max, initial })
    }

    /// `[0, max]` starting at `max`, covering every deadline of `class`
    /// and the extra values given.
    pub fn covering(class: &ClassDecl, extra: impl IntoIterator<Item = u32>) -> DeadlineRange {
        let mut max = 0;
        for m in &class.methods {
            for s in m.statements() {
                max = max.max(s.ann.deadline.unwrap_or(0));
            }
        }
        let max = extra.into_iter().fold(max, u32::max);
        DeadlineRange {
            min: 0,
            max,
            initial: max,
        }
    }
}

/// Task kinds: declared methods and the subtasks created at release points.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskInfo {
    pub name: String,
    /// The declared method this task belongs to (itself for a method).
    pub method: String,
    /// Source guard of the release point; `None` for methods and `release`.
    pub guard: Option<Guard>,
    /// Abstracted enabling condition.
    pub enabler: TExpr,
}

impl TaskInfo {
    pub fn is_method(&self) -> bool {
        self.name == self.method
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskTable {
    pub class: String,
    /// Ordered by id: each method in declaration order, followed by its
    /// subtasks.
    pub tasks: Vec<TaskInfo>,
    /// Label ids start at 1; index `k` holds the label with id `k + 1`.
    pub labels: Vec<String>,
    /// Called methods that are not tasks of this class, id = position.
    pub remote_methods: Vec<String>,
    /// Object parameters of the class, in declaration order.
    pub params: Vec<String>,
}

impl TaskTable {
    pub fn task_id(&self, name: &str) -> Option<usize> {
        self.tasks.iter().position(|t| t.name == name)
    }

    pub fn task(&self, name: &str) -> Option<&TaskInfo> {
        self.tasks.iter().find(|t| t.name == name)
    }

    pub fn label_id(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name).map(|k| k + 1)
    }

    pub fn remote_id(&self, name: &str) -> Option<usize> {
        self.remote_methods.iter().position(|m| m == name)
    }

    pub fn methods(&self) -> impl Iterator<Item = &TaskInfo> {
        self.tasks.iter().filter(|t| t.is_method())
    }

    pub fn subtasks(&self) -> impl Iterator<Item = &TaskInfo> {
        self.tasks.iter().filter(|t| !t.is_method())
    }

    /// `MSG = max(#remote methods, #tasks)`
    pub fn msg(&self) -> usize {
        self.remote_methods.len().max(self.tasks.len())
    }

    pub fn n_obj(&self) -> usize {
        self.params.len() + 1
    }

    /// Id of a method name as used in `invoke[..][m]`: task id for own
    /// methods, remote id otherwise.
    pub fn message_id(&self, name: &str) -> Option<usize> {
        self.task_id(name).or_else(|| self.remote_id(name))
    }
}

/// Location id to source span, per template.
pub type LocMap = BTreeMap<(String, String), Span>;

#[derive(Debug, Clone)]
pub struct ClassTranslation {
    pub declarations: Declarations,
    pub templates: Vec<Template>,
    pub table: TaskTable,
    pub locmap: LocMap,
    pub deadline: DeadlineRange,
    pub warnings: Vec<Diagnostic>,
}

impl ClassTranslation {
    /// Source span a location stands for.
    pub fn source_of(&self, template: &str, location: &str) -> Option<Span> {
        self.locmap
            .get(&(template.to_string(), location.to_string()))
            .copied()
    }
}

/// Validate `model` and translate class `class_name`.
pub fn translate_class(
    model: &SourceModel,
    class_name: &str,
    policy: &AbstractionPolicy,
    deadline: Option<DeadlineRange>,
) -> Result<ClassTranslation, TranslateError> {
    let diags = validate(model);
    let (errors, warnings): (Vec<_>, Vec<_>) = diags.into_iter().partition(|d| d.is_error());
    if !errors.is_empty() {
        return Err(TranslateError::Invalid(errors));
    }
    let class = model
        .class(class_name)
        .ok_or_else(|| TranslateError::UnknownClass(class_name.to_string()))?;
    policy.check(class)?;
    let deadline = deadline.unwrap_or_else(|| DeadlineRange::covering(class, []));
    for m in &class.methods {
        for s in m.statements() {
            if let Some(d) = s.ann.deadline {
                if d < deadline.min || d > deadline.max {
                    return Err(TranslateError::Bounds(format!(
                        "deadline {d} at {} is outside [{}, {}]",
                        s.span.start, deadline.min, deadline.max
                    )));
                }
            }
        }
    }

    let mut templates = Vec::new();
    let mut tasks = Vec::new();
    let mut locmap = LocMap::new();
    for m in &class.methods {
        let tr = translate_method(class, m, policy)?;
        tasks.push(TaskInfo {
            name: m.name.clone(),
            method: m.name.clone(),
            guard: None,
            enabler: TExpr::Bool(true),
        });
        for e in tr.enablers {
            if class.method(&e.task).is_some() {
                return Err(TranslateError::NameClash(format!(
                    "subtask name `{}` of method `{}` is also a declared method",
                    e.task, m.name
                )));
            }
            tasks.push(TaskInfo {
                name: e.task,
                method: m.name.clone(),
                guard: e.guard,
                enabler: e.condition,
            });
        }
        for (loc, span) in tr.loc {
            locmap.insert((tr.template.name.clone(), loc), span);
        }
        templates.push(tr.template);
    }

    let mut labels: Vec<String> = Vec::new();
    let mut called: Vec<String> = Vec::new();
    for m in &class.methods {
        for l in labels_of(&m.body) {
            if !labels.contains(&l) {
                labels.push(l);
            }
        }
        for c in methods_of(&m.body) {
            if !called.contains(&c) {
                called.push(c);
            }
        }
    }
    let remote_methods = called
        .into_iter()
        .filter(|c| !tasks.iter().any(|t: &TaskInfo| &t.name == c))
        .collect();
    let table = TaskTable {
        class: class.name.clone(),
        tasks,
        labels,
        remote_methods,
        params: class.params.iter().map(|p| p.name.clone()).collect(),
    };
    check_names(class, &table, &templates)?;
    let declarations = gen_declarations(class, &table, policy, deadline)?;
    Ok(ClassTranslation {
        declarations,
        templates,
        table,
        locmap,
        deadline,
        warnings,
    })
}

fn check_names(
    class: &ClassDecl,
    table: &TaskTable,
    templates: &[Template],
) -> Result<(), TranslateError> {
    let mut seen: BTreeSet<String> = GENERATED_NAMES.iter().map(|s| s.to_string()).collect();
    let user = class
        .vars
        .iter()
        .map(|v| &v.name)
        .chain(&table.labels)
        .chain(&table.params)
        .cloned()
        .chain(table.tasks.iter().map(|t| op_const(&t.name)))
        .chain(table.remote_methods.iter().map(|m| op_const(m)))
        .chain(templates.iter().map(|t| t.name.clone()));
    for name in user {
        if RESERVED.contains(&name.as_str()) {
            return Err(TranslateError::Reserved(name));
        }
        if !seen.insert(name.clone()) {
            return Err(TranslateError::NameClash(name));
        }
    }
    Ok(())
}

/// Global declarations of a translated class, as text in the automaton
/// language.
pub fn declarations_text(
    class: &ClassDecl,
    table: &TaskTable,
    policy: &AbstractionPolicy,
    deadline: DeadlineRange,
) -> String {
    let mut out = String::new();
    let n_obj = table.n_obj();
    let _ = writeln!(out, "const int MSG = {};", table.msg());
    let _ = writeln!(out, "const int nObj = {n_obj};");
    let _ = writeln!(out, "const int LBL = {};", table.labels.len());
    let _ = writeln!(out, "clock c;");
    let _ = writeln!(
        out,
        "meta int[{},{}] deadline = {};",
        deadline.min, deadline.max, deadline.initial
    );
    for (id, t) in table.tasks.iter().enumerate() {
        let _ = writeln!(out, "const int {} = {id};", op_const(&t.name));
    }
    for (k, l) in table.labels.iter().enumerate() {
        let _ = writeln!(out, "const int {l} = {};", k + 1);
    }
    let _ = writeln!(out, "bool labels[LBL+1][nObj];");
    for v in &class.vars {
        match policy.keep.get(&v.name) {
            Some(Domain::Bool) => {
                let _ = writeln!(out, "bool {}[nObj];", v.name);
            }
            Some(Domain::Int { lo, hi }) => {
                let _ = writeln!(out, "int[{lo},{hi}] {}[nObj];", v.name);
            }
            None => {}
        }
        debug_assert!(
            v.ty == VarType::Bool || !matches!(policy.keep.get(&v.name), Some(Domain::Bool))
        );
    }
    let all_true = vec!["true"; n_obj].join(", ");
    let _ = writeln!(out, "bool complete[nObj] = {{ {all_true} }};");
    for (id, m) in table.remote_methods.iter().enumerate() {
        let _ = writeln!(out, "const int {} = {id};", op_const(m));
    }
    out.push_str(
        "chan delegate[MSG+1][nObj];
chan invoke[LBL+1][MSG+1][nObj][nObj];
urgent chan start[MSG+1][nObj];
chan finish[nObj];
chan wait[LBL+1][nObj];
urgent chan resume[LBL+1][nObj];
chan reply[LBL+1][nObj];
",
    );
    out.push_str("bool isEnabled(int msg, int self) {\n");
    for t in table.subtasks() {
        let _ = writeln!(
            out,
            "    if (msg == {}) return {};",
            op_const(&t.name),
            t.enabler
        );
    }
    out.push_str("    return true;\n}\n");
    out
}

/// Generated global declarations of a class.
pub fn gen_declarations(
    class: &ClassDecl,
    table: &TaskTable,
    policy: &AbstractionPolicy,
    deadline: DeadlineRange,
) -> Result<Declarations, TranslateError> {
    let text = declarations_text(class, table, policy, deadline);
    parse_declarations(&text)
        .map_err(|e| TranslateError::NameClash(format!("generated declarations do not parse: {e}")))
}
