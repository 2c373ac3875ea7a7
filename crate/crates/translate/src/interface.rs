//! Behavioral interfaces: deterministic automata describing the timed
//! inputs an object receives from its environment, the calls it makes to
//! the environment, and the replies it gets back.

use std::collections::{BTreeSet, HashMap};

use ta_model::{
    check_deterministic, AssignOp, BinOp, Declarations, Direction, Edge, Expr, Initializer,
    Template, UnOp, Witness,
};
use thiserror::Error;

use crate::class::TaskTable;
use crate::method::op_const;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterfaceError {
    #[error("interface `{template}` is not deterministic at `{}`: edges {} and {} overlap{}", .witness.location, .witness.first, .witness.second, if .witness.inconclusive { " (not excluded)" } else { "" })]
    Nondeterministic { template: String, witness: Witness },
    #[error("interface `{template}`, edge {edge}: input without deadline")]
    MissingDeadline { template: String, edge: usize },
    #[error("interface `{template}`, edge {edge}: {reason}")]
    Alphabet {
        template: String,
        edge: usize,
        reason: String,
    },
    #[error("interface `{template}`: {message}")]
    Invalid { template: String, message: String },
}

/// Values of the constant integers declared in `decls`, in order, so later
/// constants may use earlier ones.
pub fn constants(decls: &Declarations) -> HashMap<String, i64> {
    let mut out = HashMap::new();
    for v in decls.vars() {
        if !v.ty.is_const() || !v.dims.is_empty() {
            continue;
        }
        if let Some(Initializer::Expr(e)) = &v.init {
            if let Some(val) = const_eval(e, &out) {
                out.insert(v.name.clone(), val);
            }
        }
    }
    out
}

/// Fold an integer expression over known constants.
pub fn const_eval(e: &Expr, consts: &HashMap<String, i64>) -> Option<i64> {
    Some(match e {
        Expr::Int(v) => *v,
        Expr::Bool(b) => *b as i64,
        Expr::Ident(n) => *consts.get(n)?,
        Expr::Unary(UnOp::Neg, a) => -const_eval(a, consts)?,
        Expr::Unary(UnOp::Not, a) => (const_eval(a, consts)? == 0) as i64,
        Expr::Binary(op, a, b) => {
            let (a, b) = (const_eval(a, consts)?, const_eval(b, consts)?);
            match op {
                BinOp::Add => a.checked_add(b)?,
                BinOp::Sub => a.checked_sub(b)?,
                BinOp::Mul => a.checked_mul(b)?,
                BinOp::Div => a.checked_div(b)?,
                BinOp::Mod => a.checked_rem(b)?,
                BinOp::Lt => (a < b) as i64,
                BinOp::Le => (a <= b) as i64,
                BinOp::Gt => (a > b) as i64,
                BinOp::Ge => (a >= b) as i64,
                BinOp::Eq => (a == b) as i64,
                BinOp::Ne => (a != b) as i64,
                BinOp::And => (a != 0 && b != 0) as i64,
                BinOp::Or => (a != 0 || b != 0) as i64,
                _ => return None,
            }
        }
        Expr::Cond(c, a, b) => {
            if const_eval(c, consts)? != 0 {
                const_eval(a, consts)?
            } else {
                const_eval(b, consts)?
            }
        }
        _ => return None,
    })
}

#[derive(Debug, Clone)]
pub struct BehavioralInterface {
    pub template: Template,
    /// Methods of the object the environment may call.
    pub provides: BTreeSet<String>,
    /// Ids of the environment objects.
    pub known: BTreeSet<i64>,
    /// Deadlines the interface assigns to its inputs, when constant.
    pub deadlines: Vec<i64>,
}

fn is_self(e: &Expr) -> bool {
    *e == Expr::ident("self")
}

fn deadline_update(e: &Edge) -> Option<&Expr> {
    e.updates.iter().find_map(|u| match u {
        Expr::Assign(AssignOp::Set, lhs, rhs) if **lhs == Expr::ident("deadline") => Some(&**rhs),
        _ => None,
    })
}

/// Check `template` against the rules for behavioral interfaces of the
/// class described by `table`. `globals` must declare everything the
/// template mentions (class declarations plus the interface file's own).
/// With `provides` empty, the provided methods are read off the inputs.
pub fn load_interface(
    globals: &Declarations,
    template: Template,
    provides: BTreeSet<String>,
    known: BTreeSet<i64>,
    table: &TaskTable,
) -> Result<BehavioralInterface, InterfaceError> {
    let name = template.name.clone();
    let invalid = |message: String| InterfaceError::Invalid {
        template: name.clone(),
        message,
    };
    let alphabet = |edge: usize, reason: String| InterfaceError::Alphabet {
        template: name.clone(),
        edge,
        reason,
    };
    if template.params.len() != 1 || template.params[0].name != "self" {
        return Err(invalid(
            "an interface takes exactly one parameter, `const int self`".into(),
        ));
    }
    let known = if known.is_empty() {
        BTreeSet::from([0])
    } else {
        known
    };
    let consts = constants(globals);
    for p in &provides {
        if table.task(p).is_none_or(|t| !t.is_method()) {
            return Err(invalid(format!(
                "provided method `{p}` is not a method of `{}`",
                table.class
            )));
        }
    }
    let mut provided = provides.clone();
    let mut deadlines = Vec::new();
    let method_of = |e: &Expr| -> Option<String> {
        match e {
            Expr::Ident(n) => n.strip_prefix("op_").map(str::to_string),
            _ => None,
        }
    };
    let label_ok = |e: &Expr| -> bool {
        match const_eval(e, &consts) {
            Some(0) => true,
            Some(v) => v > 0 && (v as usize) <= table.labels.len(),
            None => false,
        }
    };
    let known_ok = |e: &Expr| const_eval(e, &consts).is_some_and(|k| known.contains(&k));

    for (k, e) in template.edges.iter().enumerate() {
        let Some(s) = &e.sync else { continue };
        let ix = &s.indices;
        match (s.channel.as_str(), s.dir) {
            ("invoke", Direction::Send) => {
                if ix.len() != 4 {
                    return Err(alphabet(k, "invoke takes four indices".into()));
                }
                if const_eval(&ix[0], &consts) != Some(0) {
                    return Err(alphabet(k, "inputs to the object carry label 0".into()));
                }
                let Some(m) =
                    method_of(&ix[1]).filter(|m| table.task(m).is_some_and(|t| t.is_method()))
                else {
                    return Err(alphabet(
                        k,
                        format!("`{}` is not a method of the object", ix[1]),
                    ));
                };
                if !provides.is_empty() && !provides.contains(&m) {
                    return Err(alphabet(
                        k,
                        format!("`{m}` is not provided by this interface"),
                    ));
                }
                if !is_self(&ix[2]) {
                    return Err(alphabet(k, "inputs must be sent to `self`".into()));
                }
                if !known_ok(&ix[3]) {
                    return Err(alphabet(
                        k,
                        format!("sender `{}` is not a known object", ix[3]),
                    ));
                }
                let Some(d) = deadline_update(e) else {
                    return Err(InterfaceError::MissingDeadline {
                        template: name.clone(),
                        edge: k,
                    });
                };
                if let Some(v) = const_eval(d, &consts) {
                    deadlines.push(v);
                }
                provided.insert(m);
            }
            ("invoke", Direction::Receive) => {
                if ix.len() != 4 {
                    return Err(alphabet(k, "invoke takes four indices".into()));
                }
                if !label_ok(&ix[0]) {
                    return Err(alphabet(
                        k,
                        format!("`{}` is not a label of the object", ix[0]),
                    ));
                }
                let m = method_of(&ix[1]);
                if m.as_ref()
                    .is_some_and(|m| provided.contains(m) || provides.contains(m))
                {
                    return Err(alphabet(
                        k,
                        format!("`{}` is provided and cannot be an output", ix[1]),
                    ));
                }
                if m.is_none_or(|m| table.remote_id(&m).is_none()) {
                    return Err(alphabet(
                        k,
                        format!("`{}` is not called by the object", ix[1]),
                    ));
                }
                if !known_ok(&ix[2]) {
                    return Err(alphabet(
                        k,
                        format!("receiver `{}` is not a known object", ix[2]),
                    ));
                }
                if !is_self(&ix[3]) {
                    return Err(alphabet(k, "outputs must come from `self`".into()));
                }
            }
            ("reply", Direction::Send) => {
                if ix.len() != 2 || !is_self(&ix[1]) {
                    return Err(alphabet(k, "replies have the form reply[t][self]!".into()));
                }
                if !label_ok(&ix[0]) || const_eval(&ix[0], &consts) == Some(0) {
                    return Err(alphabet(
                        k,
                        format!("`{}` is not a label of the object", ix[0]),
                    ));
                }
            }
            (ch, dir) => {
                let d = if dir == Direction::Send { "!" } else { "?" };
                return Err(alphabet(
                    k,
                    format!("action `{ch}{d}` is not allowed in an interface"),
                ));
            }
        }
    }
    // receiving a provided method found only later in the edge list
    for (k, e) in template.edges.iter().enumerate() {
        if let Some(s) = &e.sync {
            if s.channel == "invoke" && s.dir == Direction::Receive {
                if let Some(m) = method_of(&s.indices[1]) {
                    if provided.contains(&m) {
                        return Err(alphabet(
                            k,
                            format!("`op_{m}` is provided and cannot be an output"),
                        ));
                    }
                }
            }
        }
    }

    match check_deterministic(globals, &template, &[Expr::Int(0)]) {
        Err(e) => return Err(invalid(e.to_string())),
        Ok(Some(witness)) => {
            return Err(InterfaceError::Nondeterministic {
                template: name,
                witness,
            })
        }
        Ok(None) => {}
    }
    Ok(BehavioralInterface {
        template,
        provides: provided,
        known,
        deadlines,
    })
}

/// Name of the channel constant for method `m`, as interfaces write it.
pub fn method_constant(m: &str) -> String {
    op_const(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abs::AbstractionPolicy;
    use crate::class::translate_class;
    use creol_syntax::parse_model;
    use ta_model::parse_xta;

    const CLASS: &str = "class K(x: P) begin var b : bool
        op m1 == t!x.p() /*@b1 @d4*/; await t? /*@b1*/
        op m2 == b := true /*@b1*/
    end";

    fn load(xta: &str, provides: &[&str]) -> Result<BehavioralInterface, InterfaceError> {
        let model = parse_model(CLASS).unwrap();
        let p = AbstractionPolicy::for_class(
            &model.classes[0],
            &Default::default(),
            &Default::default(),
        )
        .unwrap();
        let t = translate_class(&model, "K", &p, None).unwrap();
        let f = parse_xta(xta).unwrap();
        let mut globals = t.declarations.clone();
        globals.extend(f.declarations);
        load_interface(
            &globals,
            f.templates[0].clone(),
            provides.iter().map(|s| s.to_string()).collect(),
            BTreeSet::from([1]),
            &t.table,
        )
    }

    const PERIODIC: &str = "const int P = 4;
        process E(const int self) {
            clock y;
            state A { y <= P };
            init A;
            trans A -> A { guard y == P; sync invoke[0][op_m1][self][1]!; assign deadline = P, y = 0; };
        }";

    #[test]
    fn periodic_interface_is_valid() {
        let b = load(PERIODIC, &[]).unwrap();
        assert_eq!(b.provides, BTreeSet::from(["m1".to_string()]));
        assert_eq!(b.deadlines, vec![4]);
    }

    #[test]
    fn missing_deadline_is_reported() {
        let src = PERIODIC.replace("deadline = P, ", "");
        let e = load(&src, &[]).unwrap_err();
        assert_eq!(
            e.to_string(),
            "interface `E`, edge 0: input without deadline"
        );
    }

    #[test]
    fn provided_methods_cannot_be_outputs() {
        let src = "process E(const int self) {
            state A, B;
            init A;
            trans A -> B { sync invoke[0][op_m1][self][1]!; assign deadline = 2; },
                  B -> A { sync invoke[t][op_m1][1][self]?; };
        }";
        assert!(matches!(
            load(src, &[]),
            Err(InterfaceError::Alphabet { edge: 1, .. })
        ));
        let ok = "process E(const int self) {
            state A, B;
            init A;
            trans A -> B { sync invoke[t][op_p][1][self]?; },
                  B -> A { sync reply[t][self]!; };
        }";
        assert!(load(ok, &["m1"]).is_ok());
    }

    #[test]
    fn nondeterminism_is_caught() {
        let src = "process E(const int self) {
            clock y;
            state A;
            init A;
            trans A -> A { guard y < 5; sync invoke[0][op_m2][self][1]!; assign deadline = 2; },
                  A -> A { guard y < 7; sync invoke[0][op_m2][self][1]!; assign deadline = 2; };
        }";
        assert!(matches!(
            load(src, &[]),
            Err(InterfaceError::Nondeterministic { .. })
        ));
    }
}
