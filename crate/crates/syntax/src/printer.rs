//! Pretty printer; its output parses back to the same syntax tree.

use std::fmt::Write;

use crate::ast::*;

pub fn print_model(m: &SourceModel) -> String {
    let mut out = String::new();
    for i in &m.interfaces {
        print_interface(&mut out, i);
    }
    for c in &m.classes {
        print_class(&mut out, c);
    }
    out
}

fn params(out: &mut String, ps: &[Param]) {
    if ps.is_empty() {
        return;
    }
    let items: Vec<String> = ps.iter().map(|p| format!("{}: {}", p.name, p.ty)).collect();
    let _ = write!(out, "({})", items.join(", "));
}

fn refs(rs: &[InterfaceRef]) -> String {
    rs.iter()
        .map(|r| {
            if r.args.is_empty() {
                r.name.clone()
            } else {
                let args: Vec<String> = r.args.iter().map(|a| a.to_string()).collect();
                format!("{}({})", r.name, args.join(", "))
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn print_interface(out: &mut String, i: &InterfaceDecl) {
    let _ = write!(out, "interface {}", i.name);
    params(out, &i.params);
    if !i.inherits.is_empty() {
        let _ = write!(out, " inherits {}", refs(&i.inherits));
    }
    out.push_str(" begin\n");
    for op in &i.ops {
        out.push_str("  ");
        if let Some(co) = &op.cointerface {
            let _ = write!(out, "with {co} ");
        }
        let _ = writeln!(out, "op {}", op.name);
    }
    out.push_str("end\n");
}

fn print_class(out: &mut String, c: &ClassDecl) {
    let _ = write!(out, "class {}", c.name);
    params(out, &c.params);
    if !c.implements.is_empty() {
        let _ = write!(out, " implements {}", refs(&c.implements));
    }
    out.push_str(" begin\n");
    for v in &c.vars {
        let _ = writeln!(out, "  var {} : {}", v.name, v.ty);
    }
    for m in &c.methods {
        if let Some(co) = &m.cointerface {
            let _ = writeln!(out, "  with {co}");
        }
        let _ = writeln!(out, "  op {} ==", m.name);
        print_seq(out, &m.body, 4);
        out.push('\n');
    }
    out.push_str("end\n");
}

fn print_seq(out: &mut String, body: &[Stmt], indent: usize) {
    for (k, s) in body.iter().enumerate() {
        if k > 0 {
            out.push_str(";\n");
        }
        print_stmt(out, s, indent);
    }
}

fn print_stmt(out: &mut String, s: &Stmt, indent: usize) {
    let pad = " ".repeat(indent);
    out.push_str(&pad);
    match &s.kind {
        StmtKind::Skip => out.push_str("skip"),
        StmtKind::Release => out.push_str("release"),
        StmtKind::Assign(v, e) => {
            let _ = write!(out, "{v} := {e}");
        }
        StmtKind::AsyncCall {
            label,
            target,
            method,
        } => {
            if let Some(t) = label {
                out.push_str(t);
            }
            out.push('!');
            if let Target::Object(x) = target {
                let _ = write!(out, "{x}.");
            }
            let _ = write!(out, "{method}()");
        }
        StmtKind::BlockingReply(t) => {
            let _ = write!(out, "{t}?");
        }
        StmtKind::Await(g) => {
            let _ = write!(out, "await {g}");
        }
        StmtKind::While(g, body) => {
            let _ = writeln!(out, "while {g} do");
            print_seq(out, body, indent + 2);
            let _ = write!(out, "\n{pad}od");
        }
        StmtKind::If(g, then, other) => {
            let _ = writeln!(out, "if {g} then");
            print_seq(out, then, indent + 2);
            let _ = writeln!(out, "\n{pad}else");
            print_seq(out, other, indent + 2);
            let _ = write!(out, "\n{pad}fi");
        }
    }
    if !s.ann.is_default() {
        let _ = write!(out, " {}", s.ann);
    }
}
