use proptest::prelude::*;
use ta_model::dbm::{le, lt, Constraint, Dbm, Raw};

/// A non-empty zone built by constraining the universe with random bounds.
fn zone() -> impl Strategy<Value = Dbm> {
    (2usize..6).prop_flat_map(zone_of)
}

fn zone_of(dim: usize) -> impl Strategy<Value = Dbm> {
    proptest::collection::vec((0..dim, 0..dim, -6i32..12, any::<bool>()), 0..10).prop_map(
        move |cs| {
            let mut z = Dbm::universe(dim);
            for (i, j, c, strict) in cs {
                if i == j {
                    continue;
                }
                let mut t = z.clone();
                if t.constrain(i, j, if strict { lt(c) } else { le(c) }) {
                    z = t;
                }
            }
            z
        },
    )
}

fn points(dim: usize, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![0i64]];
    for _ in 1..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=hi).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

fn closed_from_scratch(z: &Dbm) -> bool {
    let mut c = Dbm::from_raw(z.dim(), z.raw().to_vec());
    c.close();
    c == *z
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn closure_is_idempotent(z in zone()) {
        prop_assert!(!z.is_empty());
        prop_assert!(z.is_closed());
        let mut again = z.clone();
        again.close();
        prop_assert_eq!(again, z);
    }

    #[test]
    fn up_keeps_points_and_canonical_form(z in zone(), delay in 0i64..5) {
        let mut u = z.clone();
        u.up();
        prop_assert!(closed_from_scratch(&u));
        prop_assert!(u.includes(&z));
        for p in points(z.dim(), 6) {
            if z.contains_point(&p) {
                let q: Vec<i64> = p.iter().enumerate().map(|(i, v)| if i == 0 { 0 } else { v + delay }).collect();
                prop_assert!(u.contains_point(&q));
            }
        }
    }

    #[test]
    fn down_adds_exactly_the_past(z in zone(), delay in 0i64..5) {
        let mut d = z.clone();
        d.down();
        prop_assert!(closed_from_scratch(&d));
        prop_assert!(d.includes(&z));
        for p in points(z.dim(), 6) {
            let later: Vec<i64> = p.iter().enumerate().map(|(i, v)| if i == 0 { 0 } else { v + delay }).collect();
            if z.contains_point(&later) {
                prop_assert!(d.contains_point(&p));
            }
            if d.contains_point(&p) {
                // some half-unit delay leads into z
                let reaches = (0..=60).any(|k| {
                    let q: Vec<i64> = p.iter().enumerate().map(|(i, v)| if i == 0 { 0 } else { 2 * v + k }).collect();
                    z.contains_scaled(&q, 2)
                });
                prop_assert!(reaches, "{:?} in the past of {:?} but no delay leads back", p, z);
            }
        }
    }

    #[test]
    fn reset_maps_points(z in zone(), x in 1usize..6, v in 0i32..4) {
        let x = 1 + x % (z.dim() - 1);
        let mut r = z.clone();
        r.reset(x, v);
        prop_assert!(closed_from_scratch(&r));
        for p in points(z.dim(), 6) {
            let mut q = p.clone();
            q[x] = v as i64;
            if z.contains_point(&p) {
                prop_assert!(r.contains_point(&q));
            }
            if r.contains_point(&p) {
                prop_assert_eq!(p[x], v as i64);
            }
        }
    }

    #[test]
    fn constrain_is_intersection(z in zone(), i in 0usize..6, j in 0usize..6, c in -4i32..8, strict in any::<bool>()) {
        let (i, j) = (i % z.dim(), j % z.dim());
        prop_assume!(i != j);
        let raw: Raw = if strict { lt(c) } else { le(c) };
        let mut k = z.clone();
        let nonempty = k.constrain(i, j, raw);
        prop_assert_eq!(nonempty, !k.is_empty());
        if nonempty {
            prop_assert!(closed_from_scratch(&k));
            prop_assert!(z.includes(&k));
        }
        for p in points(z.dim(), 6) {
            let sat = {
                let d = p[i] - p[j];
                if strict { d < c as i64 } else { d <= c as i64 }
            };
            prop_assert_eq!(k.contains_point(&p), z.contains_point(&p) && sat);
        }
        // applying the same constraint twice changes nothing
        let mut twice = k.clone();
        twice.apply(Constraint::new(i, j, raw));
        prop_assert_eq!(twice.is_empty(), k.is_empty());
        if !k.is_empty() {
            prop_assert_eq!(twice, k);
        }
    }

    #[test]
    fn free_and_extrapolate_only_grow(z in zone(), x in 1usize..6, m in 0i32..6) {
        let x = 1 + x % (z.dim() - 1);
        let mut f = z.clone();
        f.free(x);
        prop_assert!(closed_from_scratch(&f));
        prop_assert!(f.includes(&z));
        let max = vec![m; z.dim()];
        let mut e = z.clone();
        e.extrapolate(&max);
        prop_assert!(closed_from_scratch(&e));
        prop_assert!(e.includes(&z));
    }

    #[test]
    fn intersection_matches_points((a, b) in (2usize..6).prop_flat_map(|d| (zone_of(d), zone_of(d)))) {
        let mut c = a.clone();
        let nonempty = c.intersect(&b);
        for p in points(a.dim(), 6) {
            prop_assert_eq!(c.contains_point(&p), a.contains_point(&p) && b.contains_point(&p));
        }
        if nonempty {
            prop_assert!(a.includes(&c) && b.includes(&c));
        }
    }
}
