//! Abstraction only ever weakens guards: whenever a concrete guard (or its
//! negation) holds, so does its abstraction, and dropping more variables
//! keeps that true.

mod common;

use common::guards::{check_over_approximation, Valuation};
use creol_syntax::{BinOp, Expr, Guard, UnOp};
use proptest::prelude::*;

fn int_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-3i64..4).prop_map(Expr::Int),
        Just(Expr::var("n")),
        Just(Expr::var("m")),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (
                inner.clone(),
                inner.clone(),
                prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul)]
            )
                .prop_map(|(a, b, op)| Expr::bin(op, a, b)),
            inner.prop_map(|a| Expr::Unary(UnOp::Neg, Box::new(a))),
        ]
    })
}

fn bool_expr() -> impl Strategy<Value = Expr> {
    let cmp = prop_oneof![
        Just(BinOp::Eq),
        Just(BinOp::Ne),
        Just(BinOp::Lt),
        Just(BinOp::Le),
        Just(BinOp::Gt),
        Just(BinOp::Ge)
    ];
    let leaf = prop_oneof![
        Just(Expr::var("a")),
        Just(Expr::var("b")),
        any::<bool>().prop_map(Expr::Bool),
        (int_expr(), int_expr(), cmp).prop_map(|(x, y, op)| Expr::bin(op, x, y)),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (
                inner.clone(),
                inner.clone(),
                prop_oneof![Just(BinOp::And), Just(BinOp::Or)]
            )
                .prop_map(|(a, b, op)| Expr::bin(op, a, b)),
            inner.prop_map(Expr::not),
        ]
    })
}

fn guard() -> impl Strategy<Value = Guard> {
    let leaf = prop_oneof![
        bool_expr().prop_map(Guard::Bool),
        Just(Guard::Reply("t".into()))
    ];
    leaf.prop_recursive(3, 10, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Guard::And(Box::new(a), Box::new(b))),
            inner.prop_map(Guard::not),
        ]
    })
}

fn valuation() -> impl Strategy<Value = Valuation> {
    (
        any::<bool>(),
        any::<bool>(),
        -4i64..5,
        -4i64..5,
        any::<bool>(),
    )
        .prop_map(|(a, b, n, m, t)| Valuation { a, b, n, m, t })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn abstraction_over_approximates(g in guard(), v in valuation()) {
        let checked = check_over_approximation(&g, &v);
        prop_assert!(checked.is_ok(), "{}", checked.unwrap_err());
    }
}
