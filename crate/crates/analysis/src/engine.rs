//! Symbolic states and the successor relation of a compiled network.

use std::fmt;
use std::rc::Rc;

use ta_model::compile::{CEdge, CExpr, CompiledSystem};
use ta_model::eval::{Evaluator, GuardVal};
use ta_model::{Dbm, Direction, EvalError, Urgency};

/// One discrete step of the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transition {
    Internal {
        instance: u32,
        edge: u32,
    },
    /// Binary handshake; the sender's updates run first.
    Sync {
        sender: (u32, u32),
        receiver: (u32, u32),
    },
}

impl Transition {
    /// `(instance, edge)` pairs taking part, sender first.
    pub fn parts(&self) -> impl Iterator<Item = (u32, u32)> {
        let (a, b) = match *self {
            Transition::Internal { instance, edge } => ((instance, edge), None),
            Transition::Sync { sender, receiver } => (sender, Some(receiver)),
        };
        std::iter::once(a).chain(b)
    }
}

/// Location vector and variables, shared between states with the same
/// discrete part.
pub type Discrete = Rc<[i32]>;

#[derive(Clone, PartialEq, Eq)]
pub struct State {
    /// Locations (one per instance) followed by variable values.
    pub discrete: Discrete,
    pub zone: Dbm,
}

impl State {
    pub fn new(locs: &[u32], vars: &[i32], zone: Dbm) -> State {
        let discrete: Vec<i32> = locs
            .iter()
            .map(|&l| l as i32)
            .chain(vars.iter().copied())
            .collect();
        State {
            discrete: discrete.into(),
            zone,
        }
    }

    pub fn loc(&self, instance: usize) -> u32 {
        self.discrete[instance] as u32
    }

    pub fn locs(&self, n_instances: usize) -> Vec<u32> {
        self.discrete[..n_instances]
            .iter()
            .map(|&l| l as u32)
            .collect()
    }

    pub fn vars(&self, n_instances: usize) -> &[i32] {
        &self.discrete[n_instances..]
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("State")
            .field("discrete", &&self.discrete[..])
            .field("zone", &self.zone)
            .finish()
    }
}

/// What went wrong while taking a transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepError {
    pub transition: Option<Transition>,
    pub error: String,
}

impl fmt::Display for StepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.error)
    }
}

/// How zones are post-processed after each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZoneMode {
    /// Free clocks whose liveness predicate is false.
    pub free_dead_clocks: bool,
    pub extrapolate: bool,
}

impl ZoneMode {
    pub const ABSTRACT: ZoneMode = ZoneMode {
        free_dead_clocks: true,
        extrapolate: true,
    };
    /// Exact zones, as needed for building concrete traces.
    pub const EXACT: ZoneMode = ZoneMode {
        free_dead_clocks: false,
        extrapolate: false,
    };
}

/// Result of the discrete part of a step, before time passes.
#[derive(Debug, Clone)]
pub struct Fired {
    pub locs: Vec<u32>,
    pub vars: Vec<i32>,
    /// Zone right after the step (guards, resets and target invariants applied).
    pub entry: Dbm,
    /// Clock resets of the step, in order.
    pub resets: Vec<(u32, i32)>,
    /// Conjunction of the participating guards' clock constraints.
    pub guard: Vec<ta_model::Constraint>,
    pub delay_allowed: bool,
}

pub struct Engine<'s> {
    sys: &'s CompiledSystem,
    eval: Evaluator<'s>,
    n: usize,
    /// Per instance, the edges sending on urgent channels.
    urgent_senders: Vec<Vec<u32>>,
}

fn err(t: Option<Transition>, e: impl ToString) -> StepError {
    StepError {
        transition: t,
        error: e.to_string(),
    }
}

impl<'s> Engine<'s> {
    pub fn new(sys: &'s CompiledSystem) -> Engine<'s> {
        let urgent_senders = sys
            .instances
            .iter()
            .map(|inst| {
                inst.edges
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| {
                        e.sync
                            .as_ref()
                            .is_some_and(|s| s.urgent && s.dir == Direction::Send)
                    })
                    .map(|(k, _)| k as u32)
                    .collect()
            })
            .collect();
        Engine {
            sys,
            eval: Evaluator::new(sys),
            n: sys.instances.len(),
            urgent_senders,
        }
    }

    pub fn system(&self) -> &'s CompiledSystem {
        self.sys
    }

    pub fn n_instances(&self) -> usize {
        self.n
    }

    fn edge(&self, instance: u32, edge: u32) -> &'s CEdge {
        &self.sys.instances[instance as usize].edges[edge as usize]
    }

    fn urgency(&self, instance: usize, loc: u32) -> Urgency {
        self.sys.instances[instance].locations[loc as usize].urgency
    }

    /// Evaluate a guard or predicate; location tests see `locs`.
    pub fn guard(&mut self, e: &CExpr, locs: &[u32], vars: &[i32]) -> Result<GuardVal, EvalError> {
        self.eval.locations.clear();
        self.eval.locations.extend_from_slice(locs);
        self.eval.guard(e, vars)
    }

    fn edge_guard(&mut self, e: &CEdge, locs: &[u32], vars: &[i32]) -> Result<GuardVal, EvalError> {
        match &e.guard {
            None => Ok(GuardVal::tt()),
            Some(g) => self.guard(g, locs, vars),
        }
    }

    /// Intersect `zone` with the invariants of `locs`. False when the result
    /// is empty or some invariant is false.
    pub fn apply_invariants(
        &mut self,
        locs: &[u32],
        vars: &[i32],
        zone: &mut Dbm,
    ) -> Result<bool, EvalError> {
        for (i, inst) in self.sys.instances.iter().enumerate() {
            let Some(inv) = &inst.locations[locs[i] as usize].invariant else {
                continue;
            };
            match self.guard(inv, locs, vars)? {
                GuardVal::False => return Ok(false),
                GuardVal::Clocks(cs) => {
                    for c in cs {
                        if !zone.apply(c) {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(!zone.is_empty())
    }

    pub fn any_committed(&self, locs: &[u32]) -> bool {
        (0..self.n).any(|i| self.urgency(i, locs[i]) == Urgency::Committed)
    }

    /// Time may pass unless some instance is urgent or committed or an
    /// urgent handshake is enabled.
    pub fn delay_allowed(&mut self, locs: &[u32], vars: &[i32]) -> Result<bool, EvalError> {
        if (0..self.n).any(|i| self.urgency(i, locs[i]) != Urgency::Normal) {
            return Ok(false);
        }
        for i in 0..self.n {
            for idx in 0..self.urgent_senders[i].len() {
                let k = self.urgent_senders[i][idx];
                let e = self.edge(i as u32, k);
                if e.src != locs[i] {
                    continue;
                }
                if !self.discrete_guard(e, locs, vars)? {
                    continue;
                }
                let ch = self.eval.channel(e.sync.as_ref().expect("sync"), vars)?;
                for j in (0..self.n).filter(|&j| j != i) {
                    for &r in &self.sys.instances[j].outgoing[locs[j] as usize] {
                        let re = self.edge(j as u32, r);
                        let Some(rs) = &re.sync else { continue };
                        if rs.dir != Direction::Receive || self.eval.channel(rs, vars)? != ch {
                            continue;
                        }
                        if self.discrete_guard(re, locs, vars)? {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    fn discrete_guard(&mut self, e: &CEdge, locs: &[u32], vars: &[i32]) -> Result<bool, EvalError> {
        match self.edge_guard(e, locs, vars)? {
            GuardVal::False => Ok(false),
            GuardVal::Clocks(cs) if cs.is_empty() => Ok(true),
            GuardVal::Clocks(_) => Err(EvalError::NonConvex(
                "clock guard on an edge synchronising on an urgent channel".to_string(),
            )),
        }
    }

    fn free_dead(&mut self, locs: &[u32], vars: &[i32], zone: &mut Dbm) -> Result<(), EvalError> {
        for (c, live) in self.sys.clock_liveness.iter().enumerate() {
            let Some((_, pred)) = live else { continue };
            self.eval.locations.clear();
            self.eval.locations.extend_from_slice(locs);
            if self.eval.eval(pred, vars)? == 0 {
                zone.free(c);
            }
        }
        Ok(())
    }

    /// Let time pass where allowed, then post-process the zone.
    fn close_state(
        &mut self,
        locs: &[u32],
        vars: &[i32],
        mut zone: Dbm,
        delay: bool,
        mode: ZoneMode,
    ) -> Result<Option<Dbm>, EvalError> {
        if mode.free_dead_clocks {
            self.free_dead(locs, vars, &mut zone)?;
        }
        if delay {
            zone.up();
            if !self.apply_invariants(locs, vars, &mut zone)? {
                return Ok(None);
            }
        }
        if mode.extrapolate {
            zone.extrapolate(&self.sys.max_constants);
        }
        Ok(Some(zone))
    }

    /// The initial state, or `None` when the initial invariants are unsatisfiable.
    pub fn initial(&mut self, mode: ZoneMode) -> Result<Option<State>, StepError> {
        let locs: Vec<u32> = self.sys.instances.iter().map(|i| i.init).collect();
        let vars = self.sys.init_vars.clone();
        let mut zone = Dbm::zero(self.sys.num_clocks());
        let ok = self
            .apply_invariants(&locs, &vars, &mut zone)
            .map_err(|e| err(None, e))?;
        if !ok {
            return Ok(None);
        }
        let delay = self.delay_allowed(&locs, &vars).map_err(|e| err(None, e))?;
        let zone = self
            .close_state(&locs, &vars, zone, delay, mode)
            .map_err(|e| err(None, e))?;
        Ok(zone.map(|z| State::new(&locs, &vars, z)))
    }

    /// Transitions whose discrete guards hold in `s`, in a fixed order:
    /// instances in order, edges in template order, receivers after senders.
    pub fn candidates(&mut self, s: &State) -> Result<Vec<Transition>, StepError> {
        let locs = s.locs(self.n);
        let vars = s.vars(self.n);
        let committed = self.any_committed(&locs);
        let mut out = Vec::new();
        for i in 0..self.n {
            let ci = self.urgency(i, locs[i]) == Urgency::Committed;
            for &k in &self.sys.instances[i].outgoing[locs[i] as usize] {
                let e = self.edge(i as u32, k);
                let t = Transition::Internal {
                    instance: i as u32,
                    edge: k,
                };
                match &e.sync {
                    None => {
                        if !committed || ci {
                            out.push(t);
                        }
                    }
                    Some(snd) if snd.dir == Direction::Send => {
                        let ch = self.eval.channel(snd, vars).map_err(|x| err(Some(t), x))?;
                        for j in (0..self.n).filter(|&j| j != i) {
                            let cj = self.urgency(j, locs[j]) == Urgency::Committed;
                            if committed && !ci && !cj {
                                continue;
                            }
                            for &r in &self.sys.instances[j].outgoing[locs[j] as usize] {
                                let re = self.edge(j as u32, r);
                                let Some(rs) = &re.sync else { continue };
                                if rs.dir != Direction::Receive {
                                    continue;
                                }
                                let t = Transition::Sync {
                                    sender: (i as u32, k),
                                    receiver: (j as u32, r),
                                };
                                if self.eval.channel(rs, vars).map_err(|x| err(Some(t), x))? == ch {
                                    out.push(t);
                                }
                            }
                        }
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(out)
    }

    /// The discrete part of taking `t` from `s`: `None` when a guard or a
    /// target invariant fails.
    pub fn fire(&mut self, s: &State, t: Transition) -> Result<Option<Fired>, StepError> {
        let mut locs = s.locs(self.n);
        let pre_vars = s.vars(self.n);
        let mut zone = s.zone.clone();
        let mut guard = Vec::new();
        for (i, k) in t.parts() {
            let e = self.edge(i, k);
            match self
                .edge_guard(e, &locs, pre_vars)
                .map_err(|x| err(Some(t), x))?
            {
                GuardVal::False => return Ok(None),
                GuardVal::Clocks(cs) => {
                    for c in cs {
                        guard.push(c);
                        if !zone.apply(c) {
                            return Ok(None);
                        }
                    }
                }
            }
        }
        let mut vars = pre_vars.to_vec();
        self.eval.resets.clear();
        for (i, k) in t.parts() {
            let e = self.edge(i, k);
            for u in &e.updates {
                self.eval
                    .update(u, &mut vars)
                    .map_err(|x| err(Some(t), x))?;
            }
        }
        let resets = std::mem::take(&mut self.eval.resets);
        for &(c, v) in &resets {
            zone.reset(c as usize, v);
        }
        for &m in &self.sys.meta_slots {
            vars[m] = self.sys.init_vars[m];
        }
        for (i, k) in t.parts() {
            locs[i as usize] = self.edge(i, k).dst;
        }
        if !self
            .apply_invariants(&locs, &vars, &mut zone)
            .map_err(|x| err(Some(t), x))?
        {
            return Ok(None);
        }
        let delay_allowed = self
            .delay_allowed(&locs, &vars)
            .map_err(|x| err(Some(t), x))?;
        Ok(Some(Fired {
            locs,
            vars,
            entry: zone,
            resets,
            guard,
            delay_allowed,
        }))
    }

    /// Full successor: the discrete step followed by delay.
    pub fn step(
        &mut self,
        s: &State,
        t: Transition,
        mode: ZoneMode,
    ) -> Result<Option<State>, StepError> {
        let Some(f) = self.fire(s, t)? else {
            return Ok(None);
        };
        let zone = self
            .close_state(&f.locs, &f.vars, f.entry, f.delay_allowed, mode)
            .map_err(|x| err(Some(t), x))?;
        Ok(zone.map(|z| State::new(&f.locs, &f.vars, z)))
    }

    /// All successors of `s`.
    pub fn successors(
        &mut self,
        s: &State,
        mode: ZoneMode,
    ) -> Result<Vec<(Transition, State)>, StepError> {
        let mut out = Vec::new();
        for t in self.candidates(s)? {
            if let Some(next) = self.step(s, t, mode)? {
                out.push((t, next));
            }
        }
        Ok(out)
    }

    /// Does some valuation of `s` satisfy `pred`? Returns the zone part
    /// that does.
    pub fn satisfies(&mut self, s: &State, pred: &CExpr) -> Result<Option<Dbm>, EvalError> {
        let locs = s.locs(self.n);
        match self.guard(pred, &locs, s.vars(self.n))? {
            GuardVal::False => Ok(None),
            GuardVal::Clocks(cs) => {
                let mut z = s.zone.clone();
                for c in cs {
                    if !z.apply(c) {
                        return Ok(None);
                    }
                }
                Ok(Some(z))
            }
        }
    }

    /// Readable form of a transition.
    pub fn describe(&self, t: Transition) -> String {
        let part = |(i, k): (u32, u32)| {
            let inst = &self.sys.instances[i as usize];
            let e = &inst.edges[k as usize];
            format!(
                "{}: {} -> {}",
                inst.name, inst.locations[e.src as usize].id, inst.locations[e.dst as usize].id
            )
        };
        match t {
            Transition::Internal { instance, edge } => part((instance, edge)),
            Transition::Sync { sender, receiver } => {
                let inst = &self.sys.instances[sender.0 as usize];
                let chan = inst.edges[sender.1 as usize]
                    .sync
                    .as_ref()
                    .map(|s| s.channel.clone())
                    .unwrap_or_default();
                format!("{} | {} on {chan}", part(sender), part(receiver))
            }
        }
    }

    /// Location id of every instance, `inst.loc` style.
    pub fn describe_locations(&self, s: &State) -> Vec<String> {
        self.sys
            .instances
            .iter()
            .enumerate()
            .map(|(i, inst)| format!("{}.{}", inst.name, inst.locations[s.loc(i) as usize].id))
            .collect()
    }
}
