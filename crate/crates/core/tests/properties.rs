use juniward::costmap::relative_error;
use juniward::{compute_costmap, window_bounds, CostParams, DctContainer, QuantTable, WindowMode};
use proptest::prelude::*;

fn container() -> impl Strategy<Value = DctContainer> {
    (1usize..4, 1usize..4, 1u16..=255).prop_flat_map(|(bh, bw, step)| {
        let n = bh * bw * 64;
        proptest::collection::vec(-40i32..=40, n)
            .prop_map(move |coeffs| DctContainer::from_parts(bh * 8, bw * 8, QuantTable::flat(step), coeffs).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn container_json_round_trips(c in container()) {
        let text = c.to_json();
        let back = DctContainer::from_json(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn original_window_is_fixed_shifted_by_one(br in 0usize..64, bc in 0usize..64) {
        let f = window_bounds(br, bc, WindowMode::Fixed);
        let o = window_bounds(br, bc, WindowMode::Original);
        prop_assert_eq!((o.row0, o.col0), (f.row0 + 1, f.col0 + 1));
        prop_assert_eq!(f.rows(), 8 * br + 8..=8 * br + 30);
    }

    #[test]
    fn costs_commute_with_transpose(c in container()) {
        let p = CostParams::default();
        for mode in WindowMode::BOTH {
            let a = compute_costmap(&c, mode, &p).unwrap().to_grid().transpose();
            let b = compute_costmap(&c.transpose(), mode, &p).unwrap().to_grid();
            for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                prop_assert!(relative_error(*x, *y) <= 1e-9, "{} vs {}", x, y);
            }
        }
    }

    #[test]
    fn costs_are_positive_and_finite(c in container()) {
        let cm = compute_costmap(&c, WindowMode::Fixed, &CostParams::default()).unwrap();
        prop_assert!(cm.rho().iter().all(|r| r.is_finite() && *r > 0.0));
    }
}
