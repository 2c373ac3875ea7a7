//! The scheduler automaton of one object: a bounded queue of pending tasks
//! with per-task deadline clocks, the start-up sequence, synchronous self
//! calls, and an `Error` location for overflow and deadline misses.
//!
//! Transition numbering follows the usual presentation of this model:
//!
//! | role | location(s) | action |
//! |------|-------------|--------|
//! | t1   | Running -> Running | `resume[t][self]!` |
//! | t2   | Running -> Running / Starting | `wait[t][self]?` |
//! | t3   | Starting -> Running | `start[q[run]][self]!` |
//! | t4   | Running -> Running | `delegate[x][self]?` |
//! | t5   | Running / Idle -> Running / Select | `invoke[t][m][self][k]?` |
//! | t6   | Running / Idle -> Running / Select / Idle | `reply[t][self]?` |
//! | t7   | Init -> Starting | enqueue `init` and `run` |
//! | t8   | the first t3 after t7 | |
//! | t9   | Running -> Error | some `x[ca[i]] > d[ca[i]]` |
//! | t10  | Running -> Error | insertion into a full queue |
//! | t11  | Select -> Running | nothing enabled, `run = MAX` |
//! | t12  | Select -> Starting | strategy picks `i` |
//! | t13  | Select -> Idle | queue empty |
//!
//! `finish[self]?` always leads to `Select` after the queue shift, except
//! when the finished task was called synchronously; then control returns
//! to its caller directly.

use std::collections::BTreeMap;
use std::fmt::Write;

use ta_model::{
    parse_declarations, parse_expr, Decl, Edge, Expr as TExpr, Location, Sync, Template,
    TemplateBuilder, Type, Urgency,
};

use crate::class::{DeadlineRange, TaskTable};
use crate::error::TranslateError;
use crate::method::op_const;

pub const TEMPLATE: &str = "Scheduler";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    /// Earliest deadline first; ties go to the entry enqueued first.
    Edf,
    /// Fixed priorities by task name; smaller values are more urgent.
    Fps(BTreeMap<String, u32>),
    /// First enabled entry in queue order.
    Fcfs,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Edf => "edf",
            Strategy::Fps(_) => "fps",
            Strategy::Fcfs => "fcfs",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchedulerConfig {
    pub strategy: Strategy,
    /// Queue capacity `MAX`.
    pub max_queue: usize,
}

/// What a scheduler edge stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Resume,
    Wait,
    Start,
    Delegate,
    Invoke,
    Reply,
    Startup,
    DeadlineMiss,
    Overflow,
    Finish,
    Block,
    Select,
    Idle,
}

impl Role {
    /// Number of the transition in the table above.
    pub fn number(self) -> u8 {
        match self {
            Role::Resume => 1,
            Role::Wait => 2,
            Role::Start => 3,
            Role::Delegate => 4,
            Role::Invoke => 5,
            Role::Reply => 6,
            Role::Startup => 7,
            Role::DeadlineMiss => 9,
            Role::Overflow => 10,
            Role::Block => 11,
            Role::Select | Role::Finish => 12,
            Role::Idle => 13,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SchedulerTemplate {
    pub template: Template,
    /// Role of each edge, parallel to `template.edges`.
    pub roles: Vec<Role>,
    /// For deadline-miss edges, the queue slot they test.
    pub slots: Vec<Option<usize>>,
    pub max_queue: usize,
}

impl SchedulerTemplate {
    /// Clock liveness for the analyzer: `(clock, index variable, predicate)`
    /// with names resolved in the scheduler instance `instance`.
    pub fn liveness(&self, instance: &str) -> Vec<(String, String, TExpr)> {
        vec![
            ("x".to_string(), "k".to_string(), expr("counter[k] > 0")),
            (
                "c".to_string(),
                "k".to_string(),
                expr(&format!(
                    "{instance}.Running && run < MAX && waitl[run] == 0"
                )),
            ),
        ]
    }
}

fn expr(src: &str) -> TExpr {
    parse_expr(src).unwrap_or_else(|e| panic!("generated expression `{src}` does not parse: {e}"))
}

fn local_declarations(table: &TaskTable, cfg: &SchedulerConfig, deadline: DeadlineRange) -> String {
    let max = cfg.max_queue;
    let list = |v: &str| vec![v; max].join(", ");
    let mut out = String::new();
    let _ = writeln!(out, "const int MAX = {max};");
    out.push_str("const int NONE = -1;\nconst int EMPTY = -1;\nclock x[MAX];\n");
    let _ = writeln!(out, "int[0,{}] d[MAX];", deadline.max);
    let _ = writeln!(out, "int[-1,MSG] q[MAX] = {{ {} }};", list("-1"));
    out.push_str(
        "int[0,nObj-1] s[MAX];
int[0,LBL] lbl[MAX];
int[0,MAX-1] ca[MAX];
",
    );
    let _ = writeln!(out, "int[-1,MAX-1] caller[MAX] = {{ {} }};", list("-1"));
    out.push_str(
        "int[0,LBL] waitl[MAX];
int[0,MAX] counter[MAX];
int[0,MAX] tail = 0;
int[0,MAX] run = 0;
",
    );
    if let Strategy::Fps(prio) = &cfg.strategy {
        let mut values: Vec<String> = table
            .tasks
            .iter()
            .map(|t| prio.get(&t.name).copied().unwrap_or(0).to_string())
            .collect();
        values.resize(table.msg() + 1, "0".to_string());
        let _ = writeln!(out, "const int prio[MSG+1] = {{ {} }};", values.join(", "));
    }
    out.push_str(
        "int freeClock() {
    for (k : int[0,MAX-1]) {
        if (counter[k] == 0) return k;
    }
    return 0;
}
void clearSlot(int i) {
    q[i] = EMPTY;
    s[i] = 0;
    lbl[i] = 0;
    ca[i] = 0;
    caller[i] = NONE;
    waitl[i] = 0;
}
void insert(int m, int snd, int l, int dl) {
    int k = freeClock();
    q[tail] = m;
    s[tail] = snd;
    lbl[tail] = l;
    ca[tail] = k;
    caller[tail] = NONE;
    waitl[tail] = 0;
    counter[k] = 1;
    d[k] = dl;
    x[k] = 0;
    tail++;
}
void delegateTask(int m) {
    q[tail] = m;
    s[tail] = s[run];
    lbl[tail] = lbl[run];
    ca[tail] = ca[run];
    caller[tail] = caller[run];
    waitl[tail] = 0;
    counter[ca[run]]++;
    caller[run] = NONE;
    tail++;
}
void shift() {
    int r = run;
    int k = ca[r];
    if (complete[self] && lbl[r] > 0 && s[r] == self) labels[lbl[r]][self] = true;
    complete[self] = true;
    counter[k]--;
    if (counter[k] == 0) d[k] = 0;
    for (i : int[0,MAX-1]) {
        if (i >= r && i + 1 < tail) {
            q[i] = q[i+1];
            s[i] = s[i+1];
            lbl[i] = lbl[i+1];
            ca[i] = ca[i+1];
            caller[i] = caller[i+1];
            waitl[i] = waitl[i+1];
        }
    }
    tail--;
    clearSlot(tail);
    for (i : int[0,MAX-1]) {
        if (caller[i] > r) caller[i]--;
    }
}
void returnToCaller() {
    int back = caller[run];
    int r = run;
    shift();
    if (back > r) run = back - 1; else run = back;
}
bool selectable(int i) {
    return i < tail && waitl[i] == 0 && isEnabled(q[i], self);
}
bool callee(int j, int l) {
    return j < tail && lbl[j] == l && s[j] == self && waitl[j] == 0 && isEnabled(q[j], self);
}
",
    );
    out
}

fn strategy_guard(cfg: &SchedulerConfig, i: usize) -> String {
    let mut parts = vec![format!("selectable({i})")];
    for m in (0..cfg.max_queue).filter(|&m| m != i) {
        // ties go to the lower index
        let rel = if m > i { "<=" } else { "<" };
        match &cfg.strategy {
            Strategy::Edf => parts.push(format!(
                "(!selectable({m}) || x[ca[{m}]] - x[ca[{i}]] {rel} d[ca[{m}]] - d[ca[{i}]])"
            )),
            Strategy::Fps(_) => parts.push(format!(
                "(!selectable({m}) || prio[q[{i}]] {rel} prio[q[{m}]])"
            )),
            Strategy::Fcfs if m < i => parts.push(format!("!selectable({m})")),
            Strategy::Fcfs => {}
        }
    }
    parts.join(" && ")
}

/// Build the scheduler template for a translated class.
pub fn build_scheduler(
    table: &TaskTable,
    cfg: &SchedulerConfig,
    deadline: DeadlineRange,
) -> Result<SchedulerTemplate, TranslateError> {
    if cfg.max_queue == 0 {
        return Err(TranslateError::Scheduler(
            "queue capacity must be at least 1".into(),
        ));
    }
    if let Strategy::Fps(prio) = &cfg.strategy {
        for t in &table.tasks {
            if !prio.contains_key(&t.name) {
                return Err(TranslateError::Scheduler(format!(
                    "no priority for task `{}`",
                    t.name
                )));
            }
        }
        if let Some(extra) = prio.keys().find(|k| table.task_id(k).is_none()) {
            return Err(TranslateError::Scheduler(format!(
                "priority given for unknown task `{extra}`"
            )));
        }
    }
    let decls = parse_declarations(&local_declarations(table, cfg, deadline))
        .map_err(|e| TranslateError::Scheduler(format!("local declarations: {e}")))?;

    let mut tb = TemplateBuilder::new(TEMPLATE);
    tb.param(Type::const_int(), "self")?;
    for d in decls.items {
        match d {
            Decl::Var(v) => tb.declare(v)?,
            Decl::Func(f) => tb.declare_fn(f)?,
        };
    }
    for (id, urgency) in [
        ("Init", Urgency::Committed),
        ("Starting", Urgency::Normal),
        ("Running", Urgency::Normal),
        ("Select", Urgency::Committed),
        ("Idle", Urgency::Normal),
        ("Error", Urgency::Normal),
    ] {
        tb.add_location(Location::new(id).urgency(urgency))?;
    }
    tb.set_init("Init")?;

    let mut roles = Vec::new();
    let mut slots = Vec::new();
    let mut add = |tb: &mut TemplateBuilder, role: Role, slot: Option<usize>, e: Edge| {
        roles.push(role);
        slots.push(slot);
        tb.add_edge(e).map(|_| ())
    };
    let label = |l: usize| {
        if l == 0 {
            "0".to_string()
        } else {
            table.labels[l - 1].clone()
        }
    };
    let n_labels = table.labels.len();

    // t7: start-up
    let boot: Vec<String> = ["init", "run"]
        .into_iter()
        .filter(|m| table.task(m).is_some_and(|t| t.is_method()))
        .map(|m| format!("insert({}, self, 0, {})", op_const(m), deadline.initial))
        .collect();
    if boot.is_empty() {
        add(&mut tb, Role::Startup, None, Edge::new("Init", "Idle"))?;
    } else {
        let mut e = Edge::new("Init", "Starting");
        for u in &boot {
            e = e.update(expr(u));
        }
        add(&mut tb, Role::Startup, None, e.update(expr("run = 0")))?;
    }
    // t3 / t8
    add(
        &mut tb,
        Role::Start,
        None,
        Edge::new("Starting", "Running")
            .sync(Sync::send("start", vec![expr("q[run]"), expr("self")])),
    )?;

    // t5 / t10
    for l in 0..=n_labels {
        for m in table.methods() {
            for snd in 0..table.n_obj() {
                let sync = Sync::recv(
                    "invoke",
                    vec![
                        expr(&label(l)),
                        expr(&op_const(&m.name)),
                        expr("self"),
                        TExpr::Int(snd as i64),
                    ],
                );
                let ins = expr(&format!(
                    "insert({}, {snd}, {}, deadline)",
                    op_const(&m.name),
                    label(l)
                ));
                add(
                    &mut tb,
                    Role::Invoke,
                    None,
                    Edge::new("Running", "Running")
                        .guard(expr("tail < MAX && run < MAX"))
                        .sync(sync.clone())
                        .update(ins.clone()),
                )?;
                add(
                    &mut tb,
                    Role::Invoke,
                    None,
                    Edge::new("Running", "Select")
                        .guard(expr("tail < MAX && run == MAX"))
                        .sync(sync.clone())
                        .update(ins.clone()),
                )?;
                add(
                    &mut tb,
                    Role::Overflow,
                    None,
                    Edge::new("Running", "Error")
                        .guard(expr("tail == MAX"))
                        .sync(sync.clone()),
                )?;
                add(
                    &mut tb,
                    Role::Invoke,
                    None,
                    Edge::new("Idle", "Select").sync(sync).update(ins),
                )?;
            }
        }
    }

    // t4 / t10
    for t in table.subtasks() {
        let sync = Sync::recv("delegate", vec![expr(&op_const(&t.name)), expr("self")]);
        add(
            &mut tb,
            Role::Delegate,
            None,
            Edge::new("Running", "Running")
                .guard(expr("tail < MAX"))
                .sync(sync.clone())
                .update(expr(&format!("delegateTask({})", op_const(&t.name)))),
        )?;
        add(
            &mut tb,
            Role::Overflow,
            None,
            Edge::new("Running", "Error")
                .guard(expr("tail == MAX"))
                .sync(sync),
        )?;
    }

    for l in 1..=n_labels {
        let t = label(l);
        // t6
        let sync = Sync::recv("reply", vec![expr(&t), expr("self")]);
        let set = expr(&format!("labels[{t}][self] = true"));
        add(
            &mut tb,
            Role::Reply,
            None,
            Edge::new("Running", "Running")
                .guard(expr("run < MAX"))
                .sync(sync.clone())
                .update(set.clone()),
        )?;
        add(
            &mut tb,
            Role::Reply,
            None,
            Edge::new("Running", "Select")
                .guard(expr("run == MAX"))
                .sync(sync.clone())
                .update(set.clone()),
        )?;
        add(
            &mut tb,
            Role::Reply,
            None,
            Edge::new("Idle", "Idle").sync(sync).update(set),
        )?;

        // t2: a pending self call under this label is started synchronously
        let sync = Sync::recv("wait", vec![expr(&t), expr("self")]);
        for j in 0..cfg.max_queue {
            let mut g = format!("!labels[{t}][self] && callee({j}, {t})");
            for m in 0..j {
                let _ = write!(g, " && !callee({m}, {t})");
            }
            add(
                &mut tb,
                Role::Wait,
                None,
                Edge::new("Running", "Starting")
                    .guard(expr(&g))
                    .sync(sync.clone())
                    .update(expr(&format!("caller[{j}] = run")))
                    .update(expr(&format!("waitl[run] = {t}")))
                    .update(expr(&format!("run = {j}"))),
            )?;
        }
        add(
            &mut tb,
            Role::Wait,
            None,
            Edge::new("Running", "Running")
                .guard(expr(&format!(
                    "labels[{t}][self] || !(exists (j : int[0,MAX-1]) callee(j, {t}))"
                )))
                .sync(sync)
                .update(expr(&format!("waitl[run] = {t}"))),
        )?;

        // t1
        add(
            &mut tb,
            Role::Resume,
            None,
            Edge::new("Running", "Running")
                .guard(expr(&format!(
                    "run < MAX && waitl[run] == {t} && labels[{t}][self]"
                )))
                .sync(Sync::send("resume", vec![expr(&t), expr("self")]))
                .update(expr("waitl[run] = 0")),
        )?;
    }

    // finish, then shift
    let fin = Sync::recv("finish", vec![expr("self")]);
    add(
        &mut tb,
        Role::Finish,
        None,
        Edge::new("Running", "Running")
            .guard(expr("complete[self] && caller[run] != NONE"))
            .sync(fin.clone())
            .update(expr("returnToCaller()")),
    )?;
    add(
        &mut tb,
        Role::Finish,
        None,
        Edge::new("Running", "Select")
            .guard(expr("!complete[self] || caller[run] == NONE"))
            .sync(fin)
            .updates([expr("shift()"), expr("run = 0")]),
    )?;

    // t13, t11, t12
    add(
        &mut tb,
        Role::Idle,
        None,
        Edge::new("Select", "Idle")
            .guard(expr("tail == 0"))
            .update(expr("run = 0")),
    )?;
    add(
        &mut tb,
        Role::Block,
        None,
        Edge::new("Select", "Running")
            .guard(expr(
                "tail > 0 && !(exists (i : int[0,MAX-1]) selectable(i))",
            ))
            .update(expr("run = MAX")),
    )?;
    for i in 0..cfg.max_queue {
        add(
            &mut tb,
            Role::Select,
            None,
            Edge::new("Select", "Starting")
                .guard(expr(&strategy_guard(cfg, i)))
                .update(expr(&format!("run = {i}"))),
        )?;
    }

    // t9
    for i in 0..cfg.max_queue {
        add(
            &mut tb,
            Role::DeadlineMiss,
            Some(i),
            Edge::new("Running", "Error")
                .guard(expr(&format!("{i} < tail && x[ca[{i}]] > d[ca[{i}]]"))),
        )?;
    }

    Ok(SchedulerTemplate {
        template: tb.finish()?,
        roles,
        slots,
        max_queue: cfg.max_queue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abs::AbstractionPolicy;
    use crate::class::translate_class;
    use creol_syntax::parse_model;

    fn table() -> (TaskTable, DeadlineRange) {
        let model = parse_model(
            "class C begin var a : bool
               op init == a := true /*@b1*/
               op run == t!self.w() /*@d5*/; t? /*@b1*/; await a /*@b1*/; !run() /*@d9*/
               op w == skip /*@b1*/
             end",
        )
        .unwrap();
        let p = AbstractionPolicy::for_class(
            &model.classes[0],
            &Default::default(),
            &Default::default(),
        )
        .unwrap();
        let t = translate_class(&model, "C", &p, None).unwrap();
        (t.table, t.deadline)
    }

    #[test]
    fn roles_cover_every_edge() {
        let (table, dl) = table();
        let cfg = SchedulerConfig {
            strategy: Strategy::Edf,
            max_queue: 3,
        };
        let s = build_scheduler(&table, &cfg, dl).unwrap();
        assert_eq!(s.roles.len(), s.template.edges.len());
        assert_eq!(s.roles.iter().filter(|r| **r == Role::Select).count(), 3);
        assert_eq!(
            s.roles.iter().filter(|r| **r == Role::DeadlineMiss).count(),
            3
        );
        // invoke: 2 labels x 3 methods x 1 sender x 4 variants
        assert_eq!(
            s.roles
                .iter()
                .filter(|r| matches!(r, Role::Invoke | Role::Overflow))
                .count(),
            2 * 3 * 4 + 1
        );
        assert_eq!(
            s.template.location("Init").unwrap().urgency,
            Urgency::Committed
        );
        let boot = &s.template.edges[0];
        assert_eq!(boot.updates[0].to_string(), "insert(op_init, self, 0, 9)");
    }

    #[test]
    fn edf_breaks_ties_towards_lower_index() {
        let cfg = SchedulerConfig {
            strategy: Strategy::Edf,
            max_queue: 3,
        };
        let g = strategy_guard(&cfg, 1);
        assert_eq!(
            g,
            "selectable(1) && (!selectable(0) || x[ca[0]] - x[ca[1]] < d[ca[0]] - d[ca[1]]) \
             && (!selectable(2) || x[ca[2]] - x[ca[1]] <= d[ca[2]] - d[ca[1]])"
        );
        let fcfs = SchedulerConfig {
            strategy: Strategy::Fcfs,
            max_queue: 3,
        };
        assert_eq!(
            strategy_guard(&fcfs, 2),
            "selectable(2) && !selectable(0) && !selectable(1)"
        );
    }

    #[test]
    fn fps_needs_total_priorities() {
        let (table, dl) = table();
        let cfg = SchedulerConfig {
            strategy: Strategy::Fps(BTreeMap::from([("init".to_string(), 1)])),
            max_queue: 2,
        };
        assert!(matches!(
            build_scheduler(&table, &cfg, dl),
            Err(TranslateError::Scheduler(_))
        ));
    }
}
