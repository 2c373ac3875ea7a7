//! Printer for the XTA-style textual format read by [`crate::parser::parse_xta`].

use std::fmt::Write;

use crate::model::{SystemModel, Template, Urgency};

fn indent(text: &str, pad: &str) -> String {
    let mut out = String::new();
    for line in text.lines() {
        if line.is_empty() {
            out.push('\n');
        } else {
            out.push_str(pad);
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}

pub fn print_template(t: &Template) -> String {
    let mut out = String::new();
    let params: Vec<String> = t.params.iter().map(|p| p.to_string()).collect();
    let _ = writeln!(out, "process {}({}) {{", t.name, params.join(", "));
    out.push_str(&indent(&t.declarations.to_string(), "    "));
    let states: Vec<String> = t
        .locations
        .iter()
        .map(|l| match &l.invariant {
            Some(inv) => format!("{} {{ {} }}", l.id, inv),
            None => l.id.clone(),
        })
        .collect();
    let _ = writeln!(out, "    state {};", states.join(", "));
    for (kw, u) in [("commit", Urgency::Committed), ("urgent", Urgency::Urgent)] {
        let ids: Vec<&str> = t
            .locations
            .iter()
            .filter(|l| l.urgency == u)
            .map(|l| l.id.as_str())
            .collect();
        if !ids.is_empty() {
            let _ = writeln!(out, "    {kw} {};", ids.join(", "));
        }
    }
    let _ = writeln!(out, "    init {};", t.init);
    if !t.edges.is_empty() {
        out.push_str("    trans\n");
        for (k, e) in t.edges.iter().enumerate() {
            let mut body = String::new();
            if let Some(g) = &e.guard {
                let _ = write!(body, " guard {g};");
            }
            if let Some(s) = &e.sync {
                let _ = write!(body, " sync {s};");
            }
            if !e.updates.is_empty() {
                let us: Vec<String> = e.updates.iter().map(|u| u.to_string()).collect();
                let _ = write!(body, " assign {};", us.join(", "));
            }
            let sep = if k + 1 == t.edges.len() { ";" } else { "," };
            let _ = writeln!(out, "        {} -> {} {{{} }}{}", e.src, e.dst, body, sep);
        }
    }
    out.push_str("}\n");
    out
}

/// Print a whole system, including instantiations and the `system` line.
pub fn print_system(m: &SystemModel) -> String {
    let mut out = m.globals.to_string();
    for t in &m.templates {
        out.push('\n');
        out.push_str(&print_template(t));
    }
    if !m.instances.is_empty() {
        out.push('\n');
        for i in &m.instances {
            let args: Vec<String> = i.args.iter().map(|a| a.to_string()).collect();
            let _ = writeln!(out, "{} = {}({});", i.name, i.template, args.join(", "));
        }
        let names: Vec<&str> = m.instances.iter().map(|i| i.name.as_str()).collect();
        let _ = writeln!(out, "system {};", names.join(", "));
    }
    out
}
