use galilean::expr::{self, parse_expr, Expr, Func};
use galilean::verify::{check_roundtrip, random_data};
use galilean::{
    build_connection, dz_at, parse_scenario, ConnectionData, ObserverField, Scenario,
    SpacetimeStructure, VectorField,
};
use nalgebra::DVector;
use proptest::prelude::*;

fn names() -> Vec<String> {
    ["t", "x", "y"].iter().map(|s| s.to_string()).collect()
}

// Unfolded trees built from the raw variants, so printing sees every shape.
fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-5.0f64..5.0).prop_map(Expr::Const),
        (0usize..3).prop_map(Expr::Coord),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            (inner.clone(), 0u32..4)
                .prop_map(|(a, k)| Expr::Pow(Box::new(a), Box::new(Expr::Const(k as f64)))),
            (inner, 0usize..Func::ALL.len())
                .prop_map(|(a, f)| Expr::Apply(Func::ALL[f], Box::new(a))),
        ]
    })
}

fn arb_point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 3)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

const WAVY: &str = "
[spacetime]
dim = 3
coords = t, x, y
[omega]
O = 1, 0, 0.3*sin(x)
[observer]
z = 1 - 0.03*sin(x)*exp(t/4), 0.2*cos(y), 0.1*exp(t/4)
[frame]
E1 = 0, 1, 0
E2 = -0.3*sin(x), 0, 1
[metric]
h11 = 2 + sin(t*y)
h12 = 0.3*x
h22 = -exp(x/5)
[domain]
box = -1 1, -1 1, -1 1
samples = 6
seed = 3
";

fn wavy() -> Scenario {
    parse_scenario(WAVY, "wavy").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printing_then_parsing_preserves_values(e in arb_expr(), p in arb_point()) {
        let names = names();
        let text = e.display(&names).to_string();
        let back = parse_expr(&text, &names).unwrap();
        if let Ok(v) = e.evaluate(&p) {
            let w = back.evaluate(&p).unwrap();
            prop_assert!(close(v, w, 1e-12) || (v.is_infinite() && v == w), "{text}: {v} vs {w}");
        }
    }

    #[test]
    fn differentiation_is_linear(
        f in arb_expr(), g in arb_expr(), a in -3.0f64..3.0, b in -3.0f64..3.0,
        i in 0usize..3, p in arb_point(),
    ) {
        let combo = expr::add(expr::mul(expr::constant(a), f.clone()), expr::mul(expr::constant(b), g.clone()));
        let lhs = combo.differentiate(i).evaluate(&p);
        let df = f.differentiate(i).evaluate(&p);
        let dg = g.differentiate(i).evaluate(&p);
        if let (Ok(l), Ok(df), Ok(dg)) = (lhs, df, dg) {
            let r = a * df + b * dg;
            prop_assume!(l.is_finite() && r.is_finite() && l.abs() < 1e8);
            prop_assert!(close(l, r, 1e-9), "{l} vs {r}");
        }
    }

    #[test]
    fn constants_have_zero_derivative(c in -10.0f64..10.0, i in 0usize..3) {
        prop_assert!(expr::constant(c).differentiate(i).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projector_is_idempotent_and_spatial(v in prop::collection::vec(-3.0f64..3.0, 3), p in arb_point()) {
        let sc = wavy();
        let s = &sc.structure;
        let v = DVector::from_vec(v);
        let once = s.project_spatial(&sc.observer, &v, &p).unwrap();
        let twice = s.project_spatial(&sc.observer, &once, &p).unwrap();
        prop_assert!((&once - &twice).amax() < 1e-12);
        prop_assert!(s.omega_apply(&once, &p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn frame_coordinates_recompose(c in prop::collection::vec(-3.0f64..3.0, 2), p in arb_point()) {
        let s = wavy().structure;
        let frame = s.frame_matrix(&p).unwrap();
        let v = &frame * DVector::from_vec(c.clone());
        let back = s.frame_decompose(&v, &p).unwrap();
        prop_assert!((back - DVector::from_vec(c)).amax() < 1e-12);
    }

    #[test]
    fn inner_product_is_symmetric(a in prop::collection::vec(-3.0f64..3.0, 2), b in prop::collection::vec(-3.0f64..3.0, 2), p in arb_point()) {
        let s = wavy().structure;
        let frame = s.frame_matrix(&p).unwrap();
        let u = &frame * DVector::from_vec(a);
        let w = &frame * DVector::from_vec(b);
        let uw = s.inner(&u, &w, &p).unwrap();
        let wu = s.inner(&w, &u, &p).unwrap();
        prop_assert!(close(uw, wu, 1e-13));
    }

    #[test]
    fn constant_data_round_trips_on_indefinite_metric(
        g in prop::collection::vec(-5.0f64..5.0, 2), w in -2.0f64..2.0,
        theta in prop::collection::vec(-2.0f64..2.0, 6),
    ) {
        let sc = wavy();
        let mut d = ConnectionData::zero(3);
        d.set_gravity(g.into_iter().map(expr::constant).collect()).unwrap();
        d.set_coriolis(0, 1, expr::constant(w)).unwrap();
        let mut k = 0;
        for a in 0..2 {
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                d.set_theta(a, i, j, expr::constant(theta[k])).unwrap();
                k += 1;
            }
        }
        let entry = check_roundtrip(&sc.structure, &sc.observer, &d);
        prop_assert!(entry.pass, "{}", entry.max);
        prop_assert!(entry.max >= entry.mean && entry.mean >= 0.0);
    }

    #[test]
    fn observer_map_separates_data(seed in 0u64..1000, shift in 0.1f64..2.0, p in arb_point()) {
        // Injectivity witness: shifting one gravity slot by `shift` moves
        // ∇_z z by exactly `shift`·E_1 and leaves ω and Θ alone.
        let sc = wavy();
        let base = random_data(3, seed);
        let mut moved = base.clone();
        let mut g = base.gravity().to_vec();
        g[0] = expr::add(g[0].clone(), expr::constant(shift));
        moved.set_gravity(g).unwrap();
        let a = dz_at(&build_connection(&sc.structure, &sc.observer, &base).unwrap(), &sc.observer, &p).unwrap();
        let b = dz_at(&build_connection(&sc.structure, &sc.observer, &moved).unwrap(), &sc.observer, &p).unwrap();
        prop_assert!((b.gravity[0] - a.gravity[0] - shift).abs() < 1e-9);
        prop_assert!((b.gravity[1] - a.gravity[1]).abs() < 1e-9);
        prop_assert!((&b.coriolis - &a.coriolis).amax() < 1e-9);
        for (tb, ta) in b.theta.iter().zip(&a.theta) {
            prop_assert!((tb - ta).amax() < 1e-9);
        }
    }
}

#[test]
fn observer_normalization_is_required_for_building() {
    let sc = wavy();
    let doubled = ObserverField::new(sc.observer.z.scaled(&expr::constant(2.0)));
    let c = build_connection(&sc.structure, &doubled, &ConnectionData::zero(3)).unwrap();
    assert!(c.christoffel(&[0.0, 0.5, 0.5]).is_err());
}

#[test]
fn two_dimensional_chart_has_no_coriolis_slot() {
    let s = SpacetimeStructure::new(
        vec!["t".into(), "x".into()],
        vec![Expr::one(), Expr::zero()],
        vec![VectorField::coordinate(2, 1)],
        vec![vec![Expr::one()]],
        vec![(0.0, 1.0); 2],
        4,
        0,
    )
    .unwrap();
    let d = ConnectionData::zero(2);
    assert_eq!(d.values_at(&[0.5, 0.5]).unwrap().coriolis.len(), 1);
    assert!(check_roundtrip(&s, &ObserverField::new(VectorField::coordinate(2, 0)), &d).pass);
}
