use ta_model::{
    parse_expr, parse_sync, BuildError, ClockConstraint, Edge, Expr, Location, Relation,
    SystemBuilder, TemplateBuilder, Type, Urgency, VarDecl,
};

fn e(s: &str) -> Expr {
    parse_expr(s).unwrap()
}

#[test]
fn duplicate_location_is_rejected() {
    let mut t = TemplateBuilder::new("T");
    t.add_location(Location::new("l0")).unwrap();
    let err = t.add_location(Location::new("l0")).unwrap_err();
    assert_eq!(err, BuildError::DuplicateLocation("l0".into()));
}

#[test]
fn empty_template_has_no_initial_location() {
    let err = TemplateBuilder::new("T").finish().unwrap_err();
    assert_eq!(err, BuildError::NoInitialLocation("T".into()));
    assert!(err.to_string().contains("no initial location"));
}

#[test]
fn dangling_edge_is_rejected() {
    let mut t = TemplateBuilder::new("T");
    t.add_location(Location::new("l0")).unwrap();
    let err = t.add_edge(Edge::new("l0", "nowhere")).unwrap_err();
    assert_eq!(err, BuildError::DanglingLocation("nowhere".into()));
}

/// The three-location automaton of a method whose body is one `skip`.
#[test]
fn skip_method_automaton_is_well_formed() {
    let mut g = SystemBuilder::new();
    g.declare(VarDecl::new("MSG", Type::const_int()).init(Expr::int(0)))
        .unwrap()
        .declare(VarDecl::new("nObj", Type::const_int()).init(Expr::int(1)))
        .unwrap()
        .declare(VarDecl::new("op_m", Type::const_int()).init(Expr::int(0)))
        .unwrap()
        .declare(VarDecl::new("c", Type::clock()))
        .unwrap()
        .declare(VarDecl::new("start", Type::chan(true)).dims(vec![e("MSG+1"), e("nObj")]))
        .unwrap()
        .declare(VarDecl::new("finish", Type::chan(false)).dims(vec![e("nObj")]))
        .unwrap();
    let mut t = TemplateBuilder::new("C_m");
    t.param(Type::const_int(), "self").unwrap();
    t.add_location(Location::new("l0"))
        .unwrap()
        .add_location(
            Location::new("a").invariant(
                ClockConstraint::atom("c", Relation::Le, 2)
                    .to_expr()
                    .unwrap(),
            ),
        )
        .unwrap()
        .add_location(Location::new("u").urgency(Urgency::Urgent))
        .unwrap()
        .set_init("l0")
        .unwrap()
        .add_edge(
            Edge::new("l0", "a")
                .sync(parse_sync("start[op_m][self]?").unwrap())
                .update(e("c = 0")),
        )
        .unwrap()
        .add_edge(Edge::new("a", "u").guard(e("c >= 1")).update(e("c = 0")))
        .unwrap()
        .add_edge(Edge::new("u", "l0").sync(parse_sync("finish[self]!").unwrap()))
        .unwrap();
    g.add_template(t.finish().unwrap()).unwrap();
    g.instantiate("m", "C_m", vec![Expr::int(0)]).unwrap();
    let sys = g.finish().unwrap();
    assert_eq!(sys.templates[0].locations.len(), 3);
}

#[test]
fn ill_formed_system_reports_diagnostics() {
    let mut g = SystemBuilder::new();
    let mut t = TemplateBuilder::new("T");
    t.add_location(Location::new("l0"))
        .unwrap()
        .set_init("l0")
        .unwrap();
    t.add_edge(Edge::new("l0", "l0").guard(e("y >= 1")))
        .unwrap();
    g.add_template(t.finish().unwrap()).unwrap();
    g.instantiate("t", "T", vec![]).unwrap();
    let BuildError::IllFormed(diags) = g.finish().unwrap_err() else {
        panic!("expected diagnostics")
    };
    assert!(diags.iter().any(|d| d.message.contains("`y`")), "{diags:?}");
}
