//! UPPAAL 4.x XML export. Layout coordinates are a plain grid so the
//! output is deterministic; the tool's own layout can be applied on load.

use std::io::Cursor;

use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, BytesText, Event};
use quick_xml::Writer;
use ta_model::xta::print_system;
use ta_model::{SystemModel, Template, Urgency};

pub const DOCTYPE: &str =
    "nta PUBLIC '-//Uppaal Team//DTD Flat System 1.1//EN' 'http://www.it.uu.se/research/group/darts/uppaal/flat-1_2.dtd'";

/// A verifier query with an optional comment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    pub formula: String,
    pub comment: String,
}

type W = Writer<Cursor<Vec<u8>>>;

fn text(w: &mut W, tag: &str, body: &str) {
    w.create_element(tag)
        .write_text_content(BytesText::new(body))
        .expect("writing to memory");
}

fn label(w: &mut W, kind: &str, x: i32, y: i32, body: &str) {
    w.create_element("label")
        .with_attributes([("kind", kind), ("x", &x.to_string()), ("y", &y.to_string())])
        .write_text_content(BytesText::new(body))
        .expect("writing to memory");
}

fn start(w: &mut W, e: BytesStart) {
    w.write_event(Event::Start(e)).expect("writing to memory");
}

fn end(w: &mut W, tag: &str) {
    w.write_event(Event::End(BytesEnd::new(tag)))
        .expect("writing to memory");
}

fn position(k: usize) -> (i32, i32) {
    ((k % 5) as i32 * 200, (k / 5) as i32 * 160)
}

fn template(w: &mut W, t: &Template, first_id: usize) {
    start(w, BytesStart::new("template"));
    text(w, "name", &t.name);
    if !t.params.is_empty() {
        let ps: Vec<String> = t.params.iter().map(|p| p.to_string()).collect();
        text(w, "parameter", &ps.join(", "));
    }
    text(w, "declaration", &t.declarations.to_string());
    let id = |k: usize| format!("id{}", first_id + k);
    for (k, l) in t.locations.iter().enumerate() {
        let (x, y) = position(k);
        let mut e = BytesStart::new("location");
        e.push_attribute(("id", id(k).as_str()));
        e.push_attribute(("x", x.to_string().as_str()));
        e.push_attribute(("y", y.to_string().as_str()));
        start(w, e);
        w.create_element("name")
            .with_attributes([
                ("x", (x - 10).to_string().as_str()),
                ("y", (y - 30).to_string().as_str()),
            ])
            .write_text_content(BytesText::new(&l.id))
            .expect("writing to memory");
        if let Some(inv) = &l.invariant {
            label(w, "invariant", x - 10, y + 15, &inv.to_string());
        }
        match l.urgency {
            Urgency::Urgent => {
                w.create_element("urgent")
                    .write_empty()
                    .expect("writing to memory");
            }
            Urgency::Committed => {
                w.create_element("committed")
                    .write_empty()
                    .expect("writing to memory");
            }
            Urgency::Normal => {}
        }
        end(w, "location");
    }
    let index = |loc: &str| t.location_index(loc).expect("edge endpoints are locations");
    w.create_element("init")
        .with_attribute(("ref", id(index(&t.init)).as_str()))
        .write_empty()
        .expect("writing to memory");
    for e in &t.edges {
        let (s, d) = (index(&e.src), index(&e.dst));
        start(w, BytesStart::new("transition"));
        w.create_element("source")
            .with_attribute(("ref", id(s).as_str()))
            .write_empty()
            .expect("writing to memory");
        w.create_element("target")
            .with_attribute(("ref", id(d).as_str()))
            .write_empty()
            .expect("writing to memory");
        let ((x1, y1), (x2, y2)) = (position(s), position(d));
        let (mx, my) = ((x1 + x2) / 2, (y1 + y2) / 2);
        let mut row = 0;
        let mut put = |w: &mut W, kind: &str, body: String| {
            label(w, kind, mx, my + 15 * row, &body);
            row += 1;
        };
        if let Some(g) = &e.guard {
            put(w, "guard", g.to_string());
        }
        if let Some(sy) = &e.sync {
            put(w, "synchronisation", sy.to_string());
        }
        if !e.updates.is_empty() {
            let us: Vec<String> = e.updates.iter().map(|u| u.to_string()).collect();
            put(w, "assignment", us.join(", "));
        }
        end(w, "transition");
    }
    end(w, "template");
}

/// The system section: instantiations and the `system` line.
fn system_section(m: &SystemModel) -> String {
    let bare = SystemModel {
        globals: Default::default(),
        templates: Vec::new(),
        instances: m.instances.clone(),
    };
    print_system(&bare).trim_start().to_string()
}

/// Render `m` as an UPPAAL XML document.
pub fn to_xml(m: &SystemModel, queries: &[Formula]) -> String {
    let mut w = Writer::new_with_indent(Cursor::new(Vec::new()), b'\t', 1);
    w.write_event(Event::Decl(BytesDecl::new("1.0", Some("utf-8"), None)))
        .expect("writing to memory");
    w.write_event(Event::DocType(BytesText::from_escaped(DOCTYPE)))
        .expect("writing to memory");
    start(&mut w, BytesStart::new("nta"));
    text(&mut w, "declaration", &m.globals.to_string());
    let mut next_id = 0;
    for t in &m.templates {
        template(&mut w, t, next_id);
        next_id += t.locations.len();
    }
    text(&mut w, "system", &system_section(m));
    start(&mut w, BytesStart::new("queries"));
    for q in queries {
        start(&mut w, BytesStart::new("query"));
        text(&mut w, "formula", &q.formula);
        text(&mut w, "comment", &q.comment);
        end(&mut w, "query");
    }
    end(&mut w, "queries");
    end(&mut w, "nta");
    let mut out = String::from_utf8(w.into_inner().into_inner()).expect("utf-8 output");
    out.push('\n');
    out
}
