//! Templates, locations, edges and whole systems.

use std::fmt;

use crate::expr::{BinOp, Declarations, Expr, Param};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Urgency {
    #[default]
    Normal,
    Urgent,
    Committed,
}

/// Relation of a clock atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Relation {
    pub fn as_binop(self) -> BinOp {
        match self {
            Relation::Lt => BinOp::Lt,
            Relation::Le => BinOp::Le,
            Relation::Eq => BinOp::Eq,
            Relation::Ge => BinOp::Ge,
            Relation::Gt => BinOp::Gt,
        }
    }
}

/// `clock ~ bound` with an integer bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClockAtom {
    pub clock: String,
    pub rel: Relation,
    pub bound: i64,
}

impl ClockAtom {
    pub fn new(clock: impl Into<String>, rel: Relation, bound: i64) -> ClockAtom {
        ClockAtom {
            clock: clock.into(),
            rel,
            bound,
        }
    }
}

/// Conjunction of clock atoms; empty means `true`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ClockConstraint(pub Vec<ClockAtom>);

impl ClockConstraint {
    pub fn tt() -> ClockConstraint {
        ClockConstraint(Vec::new())
    }

    pub fn atom(clock: impl Into<String>, rel: Relation, bound: i64) -> ClockConstraint {
        ClockConstraint(vec![ClockAtom::new(clock, rel, bound)])
    }

    pub fn and(mut self, clock: impl Into<String>, rel: Relation, bound: i64) -> ClockConstraint {
        self.0.push(ClockAtom::new(clock, rel, bound));
        self
    }

    pub fn to_expr(&self) -> Option<Expr> {
        if self.0.is_empty() {
            return None;
        }
        Some(Expr::conj(self.0.iter().map(|a| {
            Expr::bin(a.rel.as_binop(), Expr::ident(&a.clock), Expr::Int(a.bound))
        })))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Location {
    pub id: String,
    pub name: Option<String>,
    pub urgency: Urgency,
    pub invariant: Option<Expr>,
}

impl Location {
    pub fn new(id: impl Into<String>) -> Location {
        Location {
            id: id.into(),
            name: None,
            urgency: Urgency::Normal,
            invariant: None,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Location {
        self.name = Some(name.into());
        self
    }

    pub fn urgency(mut self, u: Urgency) -> Location {
        self.urgency = u;
        self
    }

    pub fn invariant(mut self, inv: Expr) -> Location {
        self.invariant = Some(inv);
        self
    }

    /// Display name: the explicit name if any, else the id.
    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or(&self.id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Send,
    Receive,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sync {
    pub channel: String,
    pub indices: Vec<Expr>,
    pub dir: Direction,
}

impl Sync {
    pub fn send(channel: impl Into<String>, indices: Vec<Expr>) -> Sync {
        Sync {
            channel: channel.into(),
            indices,
            dir: Direction::Send,
        }
    }

    pub fn recv(channel: impl Into<String>, indices: Vec<Expr>) -> Sync {
        Sync {
            channel: channel.into(),
            indices,
            dir: Direction::Receive,
        }
    }
}

impl fmt::Display for Sync {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.channel)?;
        for i in &self.indices {
            write!(f, "[{i}]")?;
        }
        f.write_str(match self.dir {
            Direction::Send => "!",
            Direction::Receive => "?",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: String,
    pub dst: String,
    pub guard: Option<Expr>,
    pub sync: Option<Sync>,
    pub updates: Vec<Expr>,
}

impl Edge {
    pub fn new(src: impl Into<String>, dst: impl Into<String>) -> Edge {
        Edge {
            src: src.into(),
            dst: dst.into(),
            guard: None,
            sync: None,
            updates: Vec::new(),
        }
    }

    pub fn guard(mut self, g: Expr) -> Edge {
        self.guard = Some(g);
        self
    }

    pub fn guard_opt(mut self, g: Option<Expr>) -> Edge {
        self.guard = g;
        self
    }

    pub fn sync(mut self, s: Sync) -> Edge {
        self.sync = Some(s);
        self
    }

    pub fn update(mut self, u: Expr) -> Edge {
        self.updates.push(u);
        self
    }

    pub fn updates(mut self, us: impl IntoIterator<Item = Expr>) -> Edge {
        self.updates.extend(us);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Template {
    pub name: String,
    pub params: Vec<Param>,
    pub declarations: Declarations,
    pub locations: Vec<Location>,
    pub init: String,
    pub edges: Vec<Edge>,
}

impl Template {
    pub fn location(&self, id: &str) -> Option<&Location> {
        self.locations.iter().find(|l| l.id == id)
    }

    pub fn location_index(&self, id: &str) -> Option<usize> {
        self.locations.iter().position(|l| l.id == id)
    }

    pub fn outgoing<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.src == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    pub name: String,
    pub template: String,
    pub args: Vec<Expr>,
}

impl Instance {
    pub fn new(name: impl Into<String>, template: impl Into<String>, args: Vec<Expr>) -> Instance {
        Instance {
            name: name.into(),
            template: template.into(),
            args,
        }
    }
}

/// A complete network: global declarations, templates and the instances
/// making up the system declaration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SystemModel {
    pub globals: Declarations,
    pub templates: Vec<Template>,
    pub instances: Vec<Instance>,
}

impl SystemModel {
    pub fn template(&self, name: &str) -> Option<&Template> {
        self.templates.iter().find(|t| t.name == name)
    }

    pub fn instance(&self, name: &str) -> Option<&Instance> {
        self.instances.iter().find(|i| i.name == name)
    }
}
