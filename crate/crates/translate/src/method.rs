//! One automaton per method. Statements are translated between an entry
//! location `a` and an exit location `e`; release points add entry edges
//! from the initial location for the subtasks they create.

use std::collections::{BTreeMap, HashSet};

use creol_syntax::{ClassDecl, Guard, MethodDecl, Span, Stmt, StmtKind, Target};
use ta_model::{
    BinOp as TBinOp, Edge, Expr as TExpr, Location, Sync, Template, TemplateBuilder, Type, Urgency,
};

use crate::abs::{abstract_assign, abstract_guard, label_reset, AbstractionPolicy};
use crate::error::TranslateError;

pub const INITIAL: &str = "l0";
pub const FINAL: &str = "u";

/// Name of the integer constant identifying a task or a called method.
pub fn op_const(name: &str) -> String {
    format!("op_{name}")
}

/// Name of the template generated for a method.
pub fn template_name(class: &str, method: &str) -> String {
    format!("{class}_{method}")
}

/// Enabling condition of a subtask created at a release point.
#[derive(Debug, Clone, PartialEq)]
pub struct Enabler {
    pub task: String,
    /// Source guard; `None` for an unconditional `release`.
    pub guard: Option<Guard>,
    pub condition: TExpr,
}

/// The piece of automaton produced for a statement.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Fragment {
    pub edges: Vec<Edge>,
    /// Locations introduced, with the statement each one stands for.
    pub locations: Vec<(String, Span)>,
    /// `(location, worst case)`: the location invariant is `c <= w`.
    pub invariants: Vec<(String, u32)>,
    pub enablers: Vec<Enabler>,
}

impl Fragment {
    fn union(&mut self, other: Fragment) {
        self.edges.extend(other.edges);
        self.locations.extend(other.locations);
        self.invariants.extend(other.invariants);
        self.enablers.extend(other.enablers);
    }
}

#[derive(Debug, Clone)]
pub struct MethodTranslation {
    pub template: Template,
    pub enablers: Vec<Enabler>,
    /// Location id to the statement it stands for (not defined for l0 and u).
    pub loc: BTreeMap<String, Span>,
}

fn clock() -> TExpr {
    TExpr::ident("c")
}

fn this() -> TExpr {
    TExpr::ident("self")
}

fn reset_c() -> TExpr {
    TExpr::assign(clock(), TExpr::Int(0))
}

fn at_least(b: u32, cond: TExpr) -> TExpr {
    let g = TExpr::bin(TBinOp::Ge, clock(), TExpr::Int(b as i64));
    match cond {
        TExpr::Bool(true) => g,
        other => g.and(other),
    }
}

struct MethodCx<'a> {
    method: &'a str,
    policy: &'a AbstractionPolicy,
    used_ids: HashSet<String>,
    next_subtask: usize,
}

impl MethodCx<'_> {
    fn location_for(&mut self, s: &Stmt) -> String {
        let (line, col) = (s.span.start.line, s.span.start.col);
        let mut id = format!("L{line}");
        if !self.used_ids.insert(id.clone()) {
            id = format!("L{line}c{col}");
            let mut k = 2;
            while !self.used_ids.insert(id.clone()) {
                id = format!("L{line}c{col}n{k}");
                k += 1;
            }
        }
        id
    }

    fn fresh_subtask(&mut self) -> String {
        self.next_subtask += 1;
        format!("{}{}", self.method, self.next_subtask)
    }

    fn seq(&mut self, body: &[Stmt], a: &str, e: &str) -> Result<Fragment, TranslateError> {
        let mut frag = Fragment::default();
        let mut cur = a.to_string();
        for (k, s) in body.iter().enumerate() {
            let next = match body.get(k + 1) {
                None => e.to_string(),
                Some(s2) => {
                    let l = self.location_for(s2);
                    frag.locations.push((l.clone(), s2.span));
                    l
                }
            };
            frag.union(self.stmt(s, &cur, &next)?);
            cur = next;
        }
        Ok(frag)
    }

    /// Entry of a nested sequence: a new location standing for its first
    /// statement, or `e` itself when the sequence is empty.
    fn branch(&mut self, body: &[Stmt], e: &str, frag: &mut Fragment) -> String {
        match body.first() {
            None => e.to_string(),
            Some(s) => {
                let l = self.location_for(s);
                frag.locations.push((l.clone(), s.span));
                l
            }
        }
    }

    fn stmt(&mut self, s: &Stmt, a: &str, e: &str) -> Result<Fragment, TranslateError> {
        let (b, w) = (s.ann.best, s.ann.worst);
        let mut frag = Fragment::default();
        match &s.kind {
            StmtKind::Skip => {
                frag.edges.push(
                    Edge::new(a, e)
                        .guard(at_least(b, TExpr::Bool(true)))
                        .update(reset_c()),
                );
                frag.invariants.push((a.to_string(), w));
            }
            StmtKind::Assign(v, value) => {
                let mut edge = Edge::new(a, e)
                    .guard(at_least(b, TExpr::Bool(true)))
                    .update(reset_c());
                if let Some(u) = abstract_assign(v, value, self.policy)? {
                    edge = edge.update(u);
                }
                frag.edges.push(edge);
                frag.invariants.push((a.to_string(), w));
            }
            StmtKind::AsyncCall {
                label,
                target,
                method,
            } => {
                let label = label.as_deref().map_or(TExpr::Int(0), TExpr::ident);
                let rec = match target {
                    Target::SelfRef => this(),
                    Target::Object(x) => TExpr::ident(x.as_str()),
                };
                let d = s.ann.deadline.unwrap_or(0);
                frag.edges.push(
                    Edge::new(a, e)
                        .guard(at_least(b, TExpr::Bool(true)))
                        .sync(Sync::send(
                            "invoke",
                            vec![label, TExpr::ident(op_const(method)), rec, this()],
                        ))
                        .update(reset_c())
                        .update(TExpr::assign(
                            TExpr::ident("deadline"),
                            TExpr::Int(d as i64),
                        )),
                );
                frag.invariants.push((a.to_string(), w));
            }
            StmtKind::BlockingReply(t) => {
                frag.edges.push(
                    Edge::new(a, INITIAL)
                        .guard(at_least(b, TExpr::Bool(true)))
                        .sync(Sync::send("wait", vec![TExpr::ident(t.as_str()), this()])),
                );
                frag.edges.push(
                    Edge::new(INITIAL, e)
                        .sync(Sync::recv("resume", vec![TExpr::ident(t.as_str()), this()]))
                        .updates(label_reset(&Guard::Reply(t.clone())))
                        .update(reset_c()),
                );
                // only a lower bound: the worst case is ignored
                frag.invariants.push((a.to_string(), b));
            }
            StmtKind::Release => {
                let x = self.fresh_subtask();
                frag.edges
                    .push(self.delegate(a, &x, at_least(b, TExpr::Bool(true))));
                frag.edges.push(self.entry(&x, e));
                frag.invariants.push((a.to_string(), w));
                frag.enablers.push(Enabler {
                    task: x,
                    guard: None,
                    condition: TExpr::Bool(true),
                });
            }
            StmtKind::Await(g) => {
                let x = self.fresh_subtask();
                let pos = abstract_guard(g, false, self.policy);
                let neg = abstract_guard(g, true, self.policy);
                frag.edges.push(self.delegate(a, &x, at_least(b, neg)));
                frag.edges.push(self.entry(&x, e));
                frag.edges.push(
                    Edge::new(a, e)
                        .guard(at_least(b, pos.clone()))
                        .update(reset_c())
                        .updates(label_reset(g)),
                );
                frag.invariants.push((a.to_string(), w));
                frag.enablers.push(Enabler {
                    task: x,
                    guard: Some(g.clone()),
                    condition: pos,
                });
            }
            StmtKind::If(g, then, other) => {
                let l1 = self.branch(then, e, &mut frag);
                let l2 = self.branch(other, e, &mut frag);
                frag.edges.push(
                    Edge::new(a, l1.as_str())
                        .guard(at_least(b, abstract_guard(g, false, self.policy)))
                        .update(reset_c()),
                );
                frag.edges.push(
                    Edge::new(a, l2.as_str())
                        .guard(at_least(b, abstract_guard(g, true, self.policy)))
                        .update(reset_c()),
                );
                frag.invariants.push((a.to_string(), w));
                frag.union(self.seq(then, &l1, e)?);
                frag.union(self.seq(other, &l2, e)?);
            }
            StmtKind::While(g, body) => {
                let l = self.branch(body, a, &mut frag);
                frag.edges.push(
                    Edge::new(a, l.as_str())
                        .guard(at_least(b, abstract_guard(g, false, self.policy)))
                        .update(reset_c()),
                );
                frag.edges.push(
                    Edge::new(a, e)
                        .guard(at_least(b, abstract_guard(g, true, self.policy)))
                        .update(reset_c()),
                );
                frag.invariants.push((a.to_string(), w));
                frag.union(self.seq(body, &l, a)?);
            }
        }
        Ok(frag)
    }

    fn delegate(&self, a: &str, task: &str, guard: TExpr) -> Edge {
        Edge::new(a, FINAL)
            .guard(guard)
            .sync(Sync::send(
                "delegate",
                vec![TExpr::ident(op_const(task)), this()],
            ))
            .update(TExpr::assign(
                TExpr::ident("complete").index(this()),
                TExpr::Bool(false),
            ))
    }

    fn entry(&self, task: &str, to: &str) -> Edge {
        Edge::new(INITIAL, to)
            .sync(Sync::recv(
                "start",
                vec![TExpr::ident(op_const(task)), this()],
            ))
            .update(reset_c())
    }
}

/// Translate one method of `class` into its template.
pub fn translate_method(
    class: &ClassDecl,
    m: &MethodDecl,
    policy: &AbstractionPolicy,
) -> Result<MethodTranslation, TranslateError> {
    let mut cx = MethodCx {
        method: &m.name,
        policy,
        used_ids: [INITIAL.to_string(), FINAL.to_string()]
            .into_iter()
            .collect(),
        next_subtask: 0,
    };
    let first = m.body.first().expect("method bodies are never empty");
    let a = cx.location_for(first);
    let mut frag = Fragment::default();
    frag.locations.push((a.clone(), first.span));
    frag.union(cx.seq(&m.body, &a, FINAL)?);

    let name = template_name(&class.name, &m.name);
    let mut tb = TemplateBuilder::new(name);
    for p in &class.params {
        tb.param(Type::const_int(), p.name.as_str())?;
    }
    tb.param(Type::const_int(), "self")?;

    let mut invariants: BTreeMap<&str, u32> = BTreeMap::new();
    for (l, w) in &frag.invariants {
        let slot = invariants.entry(l.as_str()).or_insert(*w);
        *slot = (*slot).min(*w);
    }
    let with_invariant = |id: &str| {
        let loc = Location::new(id);
        match invariants.get(id) {
            Some(&w) => loc.invariant(TExpr::bin(TBinOp::Le, clock(), TExpr::Int(w as i64))),
            None => loc,
        }
    };
    tb.add_location(Location::new(INITIAL))?;
    for (l, _) in &frag.locations {
        tb.add_location(with_invariant(l))?;
    }
    tb.add_location(Location::new(FINAL).urgency(Urgency::Urgent))?;
    tb.set_init(INITIAL)?;
    tb.add_edge(
        Edge::new(INITIAL, a.as_str())
            .sync(Sync::recv(
                "start",
                vec![TExpr::ident(op_const(&m.name)), this()],
            ))
            .update(reset_c()),
    )?;
    tb.add_edge(Edge::new(FINAL, INITIAL).sync(Sync::send("finish", vec![this()])))?;
    for e in frag.edges {
        tb.add_edge(e)?;
    }
    Ok(MethodTranslation {
        template: tb.finish()?,
        enablers: frag.enablers,
        loc: frag.locations.into_iter().collect(),
    })
}

/// `labels(S)`: labels of calls in a body, first occurrence order.
pub fn labels_of(body: &[Stmt]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for s in body {
        s.walk(&mut |s| {
            if let StmtKind::AsyncCall { label: Some(t), .. } = &s.kind {
                if !out.contains(t) {
                    out.push(t.clone());
                }
            }
        });
    }
    out
}

/// `mthds(S)`: methods called in a body, labeled or not.
pub fn methods_of(body: &[Stmt]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for s in body {
        s.walk(&mut |s| {
            if let StmtKind::AsyncCall { method, .. } = &s.kind {
                if !out.contains(method) {
                    out.push(method.clone());
                }
            }
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abs::Domain;
    use creol_syntax::parse_model;

    fn translate(src: &str, method: &str) -> MethodTranslation {
        let model = parse_model(src).unwrap();
        let class = &model.classes[0];
        let policy = AbstractionPolicy {
            keep: class
                .vars
                .iter()
                .map(|v| (v.name.clone(), Domain::Bool))
                .collect(),
            drop: Default::default(),
        };
        translate_method(class, class.method(method).unwrap(), &policy).unwrap()
    }

    fn edges(t: &Template) -> Vec<String> {
        t.edges
            .iter()
            .map(|e| {
                let mut s = format!("{}->{}", e.src, e.dst);
                if let Some(g) = &e.guard {
                    s += &format!(" [{g}]");
                }
                if let Some(y) = &e.sync {
                    s += &format!(" {y}");
                }
                if !e.updates.is_empty() {
                    let u: Vec<String> = e.updates.iter().map(|u| u.to_string()).collect();
                    s += &format!(" {{{}}}", u.join(", "));
                }
                s
            })
            .collect()
    }

    #[test]
    fn single_skip() {
        let t = translate("class C begin op m == skip /*@b1 @w2*/ end", "m");
        assert_eq!(
            edges(&t.template),
            vec![
                "l0->L1 start[op_m][self]? {c = 0}",
                "u->l0 finish[self]!",
                "L1->u [c >= 1] {c = 0}",
            ]
        );
        let a = t.template.location("L1").unwrap();
        assert_eq!(a.invariant.as_ref().unwrap().to_string(), "c <= 2");
        assert_eq!(t.template.location("u").unwrap().urgency, Urgency::Urgent);
        assert_eq!(t.template.init, "l0");
        assert_eq!(t.loc.keys().collect::<Vec<_>>(), vec!["L1"]);
    }

    #[test]
    fn await_and_blocking_reply() {
        let src = "class C begin var s : bool
  op m ==
    await s /*@b1 @w2*/;
    t!self.m() /*@b1 @w1 @d10*/;
    t? /*@b1*/;
    s := false
end";
        let t = translate(src, "m");
        assert_eq!(
            edges(&t.template),
            vec![
                "l0->L3 start[op_m][self]? {c = 0}",
                "u->l0 finish[self]!",
                "L3->u [c >= 1 && !s[self]] delegate[op_m1][self]! {complete[self] = false}",
                "l0->L4 start[op_m1][self]? {c = 0}",
                "L3->L4 [c >= 1 && s[self]] {c = 0}",
                "L4->L5 [c >= 1] invoke[t][op_m][self][self]! {c = 0, deadline = 10}",
                "L5->l0 [c >= 1] wait[t][self]!",
                "l0->L6 resume[t][self]? {labels[t][self] = false, c = 0}",
                "L6->u [c >= 0] {c = 0, s[self] = false}",
            ]
        );
        assert_eq!(
            t.template
                .location("L5")
                .unwrap()
                .invariant
                .as_ref()
                .unwrap()
                .to_string(),
            "c <= 1"
        );
        assert_eq!(t.enablers.len(), 1);
        assert_eq!(t.enablers[0].task, "m1");
        assert_eq!(t.enablers[0].condition.to_string(), "s[self]");
    }

    #[test]
    fn branches_and_loops() {
        let src = "class C begin var s : bool
  op m ==
    if s then skip /*@b1*/ else release fi;
    while ~s do s := true od /*@b2 @w3*/
end";
        let t = translate(src, "m");
        let es = edges(&t.template);
        assert!(
            es.contains(&"L3->L3c15 [c >= 0 && s[self]] {c = 0}".to_string()),
            "{es:#?}"
        );
        assert!(es.contains(&"L3->L3c33 [c >= 0 && !s[self]] {c = 0}".to_string()));
        assert!(es.contains(&"L4->L4c17 [c >= 2 && !s[self]] {c = 0}".to_string()));
        assert!(es.contains(&"L4->u [c >= 2 && s[self]] {c = 0}".to_string()));
        assert!(es.contains(&"L4c17->L4 [c >= 0] {c = 0, s[self] = true}".to_string()));
        assert_eq!(t.enablers[0].task, "m1");
        assert_eq!(t.enablers[0].condition, TExpr::Bool(true));
    }

    #[test]
    fn helper_sets() {
        let m = parse_model(
            "class C(x: I) begin op run == b!x.body() /*@d10*/; b?; !run() /*@d50*/; b!x.p() /*@d1*/ end",
        )
        .unwrap();
        let body = &m.classes[0].methods[0].body;
        assert_eq!(labels_of(body), vec!["b"]);
        assert_eq!(methods_of(body), vec!["body", "run", "p"]);
    }
}
