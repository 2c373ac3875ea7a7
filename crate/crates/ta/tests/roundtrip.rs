use proptest::prelude::*;
use ta_model::{parse_expr, parse_xta, xta, BinOp, Expr, SystemModel, UnOp};

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0i64..20).prop_map(Expr::Int),
        any::<bool>().prop_map(Expr::Bool),
        prop_oneof![Just("a"), Just("b"), Just("n")].prop_map(Expr::ident),
    ];
    leaf.prop_recursive(5, 40, 3, |inner| {
        let ops = prop_oneof![
            Just(BinOp::Add),
            Just(BinOp::Sub),
            Just(BinOp::Mul),
            Just(BinOp::Div),
            Just(BinOp::Mod),
            Just(BinOp::Lt),
            Just(BinOp::Le),
            Just(BinOp::Eq),
            Just(BinOp::Ne),
            Just(BinOp::Ge),
            Just(BinOp::Gt),
            Just(BinOp::And),
            Just(BinOp::Or),
            Just(BinOp::Imply),
        ];
        prop_oneof![
            (ops, inner.clone(), inner.clone()).prop_map(|(op, a, b)| Expr::bin(op, a, b)),
            inner
                .clone()
                .prop_map(|a| Expr::Unary(UnOp::Not, Box::new(a))),
            inner
                .clone()
                .prop_map(|a| Expr::Unary(UnOp::Neg, Box::new(a))),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(|(c, a, b)| Expr::Cond(
                Box::new(c),
                Box::new(a),
                Box::new(b)
            )),
            inner.prop_map(|i| Expr::ident("arr").index(i)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn print_parse_is_stable(e in expr()) {
        let printed = e.to_string();
        let parsed = parse_expr(&printed).map_err(|err| TestCaseError::fail(format!("{printed}: {err}")))?;
        let reprinted = parsed.to_string();
        let reparsed = parse_expr(&reprinted).unwrap();
        prop_assert_eq!(&reparsed, &parsed);
        prop_assert_eq!(reprinted, parsed.to_string());
    }
}

#[test]
fn double_negation_is_not_a_decrement() {
    let e = Expr::Unary(
        UnOp::Neg,
        Box::new(Expr::Unary(UnOp::Neg, Box::new(Expr::ident("a")))),
    );
    let parsed = parse_expr(&e.to_string()).unwrap();
    assert_eq!(parsed, e);
}

#[test]
fn system_text_round_trips() {
    let src = r#"
        const int N = 2;
        int[0,N] q[N];
        meta int[1,50] deadline = 10;
        urgent chan go[N];
        chan done;
        bool enabled(int k) { return q[k] > 0; }
        process Worker(const int self) {
            clock c;
            state idle, busy { c <= 4 }, fin;
            urgent fin;
            init idle;
            trans
                idle -> busy { guard enabled(self); sync go[self]?; assign c = 0; },
                busy -> fin { guard c >= 1; assign q[self] = 0, deadline = 5; },
                fin -> idle { sync done!; };
        }
        w0 = Worker(0);
        w1 = Worker(1);
        system w0, w1;
    "#;
    let f = parse_xta(src).unwrap();
    let m = SystemModel {
        globals: f.declarations,
        templates: f.templates,
        instances: f.instances,
    };
    let text = xta::print_system(&m);
    let g = parse_xta(&text).unwrap();
    let m2 = SystemModel {
        globals: g.declarations,
        templates: g.templates,
        instances: g.instances,
    };
    assert_eq!(m2, m);
    assert_eq!(xta::print_system(&m2), text);
}
