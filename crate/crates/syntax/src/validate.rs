//! Static checks on a parsed model. All problems are collected; nothing
//! aborts early.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::ast::*;
use crate::error::Diagnostic;

pub fn validate(model: &SourceModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut iface_names = HashSet::new();
    for i in &model.interfaces {
        if !iface_names.insert(i.name.as_str()) {
            out.push(Diagnostic::error(
                i.span,
                format!("interface `{}` declared twice", i.name),
            ));
        }
        let mut ops = HashSet::new();
        for op in &i.ops {
            if !ops.insert(op.name.as_str()) {
                out.push(Diagnostic::error(
                    op.span,
                    format!("operation `{}` declared twice in `{}`", op.name, i.name),
                ));
            }
        }
    }
    let mut class_names = HashSet::new();
    for c in &model.classes {
        if !class_names.insert(c.name.as_str()) {
            out.push(Diagnostic::error(
                c.span,
                format!("class `{}` declared twice", c.name),
            ));
        }
        validate_class(model, c, &mut out);
    }
    out
}

fn validate_class(model: &SourceModel, c: &ClassDecl, out: &mut Vec<Diagnostic>) {
    let mut names: HashSet<&str> = HashSet::new();
    for p in &c.params {
        if !names.insert(&p.name) {
            out.push(Diagnostic::error(
                c.span,
                format!("parameter `{}` declared twice", p.name),
            ));
        }
    }
    for v in &c.vars {
        if !names.insert(&v.name) {
            out.push(Diagnostic::error(
                v.span,
                format!(
                    "variable `{}` clashes with another parameter or variable",
                    v.name
                ),
            ));
        }
    }
    let mut methods = HashSet::new();
    for m in &c.methods {
        if !methods.insert(m.name.as_str()) {
            out.push(Diagnostic::error(
                m.span,
                format!("method `{}` defined twice", m.name),
            ));
        }
    }
    for r in &c.implements {
        match model.interface(&r.name) {
            None => out.push(Diagnostic::error(
                c.span,
                format!(
                    "class `{}` implements unknown interface `{}`",
                    c.name, r.name
                ),
            )),
            Some(i) => {
                let ops: BTreeSet<&str> = i.ops.iter().map(|o| o.name.as_str()).collect();
                for op in ops {
                    if !methods.contains(op) {
                        out.push(Diagnostic::error(
                            c.span,
                            format!(
                                "method `{}` of interface `{}` is not defined in `{}`",
                                op, i.name, c.name
                            ),
                        ));
                    }
                }
            }
        }
    }

    // labels: each may be attached to one call only
    let mut label_sites: HashMap<&str, Vec<Span>> = HashMap::new();
    for m in &c.methods {
        for s in m.statements() {
            if let StmtKind::AsyncCall { label: Some(t), .. } = &s.kind {
                label_sites.entry(t).or_default().push(s.span);
            }
        }
    }
    let mut sorted: Vec<_> = label_sites.iter().collect();
    sorted.sort();
    for (t, sites) in sorted {
        if sites.len() > 1 {
            out.push(Diagnostic::error(
                sites[1],
                format!("label `{t}` is used by more than one call"),
            ));
        }
    }

    let vars: HashSet<&str> = c.vars.iter().map(|v| v.name.as_str()).collect();
    let params: HashSet<&str> = c.params.iter().map(|p| p.name.as_str()).collect();
    let check_expr_vars = |e_vars: Vec<&str>, span: Span, out: &mut Vec<Diagnostic>| {
        for v in e_vars {
            if !vars.contains(v) && !params.contains(v) {
                out.push(Diagnostic::error(span, format!("unknown identifier `{v}`")));
            }
        }
    };
    for m in &c.methods {
        for s in m.statements() {
            if s.ann.deadline.is_some() && !s.is_call() {
                out.push(Diagnostic::error(
                    s.span,
                    "deadline given on a statement that is not a call",
                ));
            }
            match &s.kind {
                StmtKind::AsyncCall { target, method, .. } => {
                    if s.ann.deadline.is_none() {
                        out.push(Diagnostic::error(s.span, "call missing deadline"));
                    }
                    match target {
                        Target::Object(x) if !params.contains(x.as_str()) => {
                            out.push(Diagnostic::error(s.span, format!("unknown object `{x}`")))
                        }
                        Target::SelfRef if !methods.contains(method.as_str()) => {
                            out.push(Diagnostic::error(
                                s.span,
                                format!("self call to undefined method `{method}`"),
                            ))
                        }
                        _ => {}
                    }
                }
                StmtKind::BlockingReply(t) => {
                    if !label_sites.contains_key(t.as_str()) {
                        out.push(Diagnostic::error(s.span, format!("undeclared label `{t}`")));
                    }
                    if s.ann.worst > s.ann.best {
                        out.push(Diagnostic::warning(
                            s.span,
                            "worst-case time of a blocking reply is ignored",
                        ));
                    }
                }
                StmtKind::Assign(v, e) => {
                    if !vars.contains(v.as_str()) {
                        out.push(Diagnostic::error(
                            s.span,
                            format!("assignment to unknown variable `{v}`"),
                        ));
                    }
                    check_expr_vars(e.vars(), s.span, out);
                }
                StmtKind::Await(g) | StmtKind::While(g, _) | StmtKind::If(g, _, _) => {
                    for t in g.labels() {
                        if !label_sites.contains_key(t) {
                            out.push(Diagnostic::error(s.span, format!("undeclared label `{t}`")));
                        }
                    }
                    check_expr_vars(g.vars(), s.span, out);
                }
                StmtKind::Release | StmtKind::Skip => {}
            }
        }
        for span in zero_time_releases(&m.body) {
            out.push(Diagnostic::warning(
                span,
                "no execution time before the processor is released",
            ));
        }
    }
}

/// Release points reachable from the start of a process (the method start or
/// the continuation after an earlier release) along a path on which every
/// statement, the release point included, has best-case time 0.
pub fn zero_time_releases(body: &[Stmt]) -> Vec<Span> {
    let mut found = BTreeSet::new();
    seq_zero(body, true, &mut found);
    found.into_iter().collect()
}

/// `zero_in`: some path from a process start reaches this point in zero time.
/// Returns the same for the point after the sequence.
fn seq_zero(body: &[Stmt], zero_in: bool, found: &mut BTreeSet<Span>) -> bool {
    body.iter().fold(zero_in, |z, s| stmt_zero(s, z, found))
}

fn stmt_zero(s: &Stmt, zero_in: bool, found: &mut BTreeSet<Span>) -> bool {
    let free = s.ann.best == 0;
    match &s.kind {
        StmtKind::Await(_) | StmtKind::Release => {
            if zero_in && free {
                found.insert(s.span);
            }
            // the continuation after a release starts a new process
            true
        }
        StmtKind::If(_, then, other) => {
            let z = zero_in && free;
            let a = seq_zero(then, z, found);
            let b = seq_zero(other, z, found);
            a || b
        }
        StmtKind::While(_, body) => {
            let mut at_head = zero_in;
            loop {
                let after_body = seq_zero(body, at_head && free, found);
                let next = at_head || after_body;
                if next == at_head {
                    break;
                }
                at_head = next;
            }
            at_head && free
        }
        _ => zero_in && free,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Severity;
    use crate::parser::parse_model;

    fn diags(src: &str) -> Vec<Diagnostic> {
        validate(&parse_model(src).unwrap())
    }

    #[test]
    fn call_without_deadline() {
        let d = diags("class C(x: P) begin op m == !x.p() end");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].message, "call missing deadline");
        assert!(d[0].is_error());
    }

    #[test]
    fn zero_time_before_release() {
        let d = diags("class C begin var b : bool op m == await b; skip /*@b1 @w1*/ end");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].severity, Severity::Warning);
        assert_eq!(d[0].span.start, Pos::new(1, 36));
        let d = diags("class C begin var b : bool op m == skip /*@b1*/; await b end");
        assert!(d.is_empty(), "{d:?}");
    }

    #[test]
    fn release_restarts_the_process() {
        let d = diags("class C begin op m == release /*@b1*/; release end");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].span.start.col, 40);
    }

    #[test]
    fn loops_carry_zero_paths_around() {
        // the second iteration reaches the await after `release` with no time
        let d = diags(
            "class C begin var b : bool op m == skip /*@b1*/; while b do await b; release /*@b1*/ od end",
        );
        assert_eq!(d.len(), 1, "{d:?}");
        assert_eq!(d[0].span.start.col, 61);
    }

    #[test]
    fn labels_and_identifiers() {
        let d = diags(
            "class C(x: P) begin var n : int op m == t!x.p() /*@d5*/; u?; n := k + 1; await t? /*@b1*/ end",
        );
        let msgs: Vec<&str> = d.iter().map(|d| d.message.as_str()).collect();
        assert_eq!(msgs, vec!["undeclared label `u`", "unknown identifier `k`"]);
    }

    #[test]
    fn blocking_reply_worst_case_is_flagged() {
        let d = diags("class C(x: P) begin op m == t!x.p() /*@d5*/; t? /*@b1 @w4*/ end");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].severity, Severity::Warning);
    }

    #[test]
    fn interface_obligations() {
        let d =
            diags("interface I begin op a op a end class C implements I, J begin op b == skip end");
        let msgs: Vec<&str> = d.iter().map(|d| d.message.as_str()).collect();
        assert_eq!(
            msgs,
            vec![
                "operation `a` declared twice in `I`",
                "method `a` of interface `I` is not defined in `C`",
                "class `C` implements unknown interface `J`",
            ]
        );
    }
}
