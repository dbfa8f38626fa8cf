use proptest::prelude::*;
use shadow_transport::json;
use shadow_transport::measures::UpDown;
use shadow_transport::{order_check, DiscreteMeasure, OrderRelation, Side};

/// Atoms on a quarter grid, so that coincident positions actually occur.
fn measure(max_atoms: usize) -> impl Strategy<Value = DiscreteMeasure> {
    prop::collection::vec((-20i32..=20, 0.05f64..1.0), 1..=max_atoms).prop_map(|raw| {
        DiscreteMeasure::new(raw.into_iter().map(|(k, w)| (k as f64 / 4.0, w))).unwrap()
    })
}

fn probability(max_atoms: usize) -> impl Strategy<Value = DiscreteMeasure> {
    measure(max_atoms).prop_map(|m| {
        let s = 1.0 / m.mass();
        m.scaled(s)
    })
}

proptest! {
    #[test]
    fn put_call_parity(m in measure(6), k in -6.0f64..6.0) {
        let lhs = m.call().eval(k) - m.put().eval(k);
        let rhs = m.mean() - m.mass() * k;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * m.position_scale() * m.mass().max(1.0) * 10.0);
    }

    #[test]
    fn quantile_is_the_inverse_of_the_cdf(m in measure(6), frac in 0.001f64..0.999) {
        let u = frac * m.mass();
        let g = m.quantile(u, Side::Left).unwrap();
        // F(G(u)) ≥ u and nothing strictly below G(u) reaches u.
        prop_assert!(m.cdf(g) >= u - 1e-12);
        let below: f64 = m.atoms().iter().filter(|a| a.x < g).map(|a| a.w).sum();
        prop_assert!(below < u + 1e-12);
        let g_right = m.quantile(u, Side::Right).unwrap();
        prop_assert!(g <= g_right);
    }

    #[test]
    fn wasserstein_is_a_metric(a in probability(5), b in probability(5), c in probability(5)) {
        let ab = a.wasserstein1(&b).unwrap();
        let ba = b.wasserstein1(&a).unwrap();
        let ac = a.wasserstein1(&c).unwrap();
        let bc = b.wasserstein1(&c).unwrap();
        prop_assert_eq!(a.wasserstein1(&a).unwrap(), 0.0);
        prop_assert!((ab - ba).abs() <= 1e-12);
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    #[test]
    fn up_down_bracket_both(a in probability(5), b in probability(5)) {
        let down = a.up_down(&b, UpDown::Down).unwrap();
        let up = a.up_down(&b, UpDown::Up).unwrap();
        prop_assert!(order_check(OrderRelation::Sto, &down, &a));
        prop_assert!(order_check(OrderRelation::Sto, &down, &b));
        prop_assert!(order_check(OrderRelation::Sto, &a, &up));
        prop_assert!(order_check(OrderRelation::Sto, &b, &up));
        let w = a.wasserstein1(&b).unwrap();
        let split = a.wasserstein1(&down).unwrap() + b.wasserstein1(&down).unwrap();
        prop_assert!((w - split).abs() <= 1e-9);
        // Down and Up together carry the same atoms as the two inputs.
        prop_assert!((down.mean() + up.mean() - a.mean() - b.mean()).abs() <= 1e-12);
    }

    #[test]
    fn orders_are_reflexive_and_nested(a in measure(6)) {
        for rel in [OrderRelation::Sto, OrderRelation::C, OrderRelation::Cd, OrderRelation::Pc, OrderRelation::Pcd, OrderRelation::Leq] {
            prop_assert!(order_check(rel, &a, &a), "{:?}", rel);
        }
    }

    #[test]
    fn smaller_copy_is_pcd_below(a in measure(6), f in 0.05f64..1.0) {
        prop_assert!(order_check(OrderRelation::Pcd, &a.scaled(f), &a));
        prop_assert!(order_check(OrderRelation::Leq, &a.scaled(f), &a));
    }

    #[test]
    fn json_round_trip(a in measure(6)) {
        let text = json::measure(&a).to_string();
        let back = json::parse_measure(&text).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(json::measure(&back).to_string(), text);
    }
}
