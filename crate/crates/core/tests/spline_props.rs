use fkcheb_core::{normalize, SplineModel};
use proptest::prelude::*;

/// Degree, domain, sorted distinct knots and coefficient blocks.
fn model_strategy() -> impl Strategy<Value = SplineModel> {
    (1usize..=3, 1usize..=4, -2.0f64..0.0, 0.5f64..3.0).prop_flat_map(|(m, n, lo, w)| {
        let hi = lo + w;
        (
            Just((m, lo, hi)),
            prop::collection::vec(0.05f64..0.95, n - 1),
            prop::collection::vec(prop::collection::vec(-2.0f64..2.0, m), n),
            -2.0f64..2.0,
        )
            .prop_filter_map("distinct knots", move |((m, lo, hi), fr, blocks, a00)| {
                let mut knots: Vec<f64> = fr.iter().map(|f| lo + f * (hi - lo)).collect();
                knots.sort_by(f64::total_cmp);
                if knots.windows(2).any(|w| w[1] - w[0] < 1e-3) {
                    return None;
                }
                SplineModel::new(m, lo, hi, knots, a00, blocks).ok()
            })
    })
}

fn grid(model: &SplineModel, n: usize) -> Vec<f64> {
    let (lo, hi) = model.domain();
    (0..=n)
        .map(|i| {
            if i == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / n as f64
            }
        })
        .collect()
}

fn scale(model: &SplineModel) -> f64 {
    grid(model, 200)
        .iter()
        .fold(1.0_f64, |a, &t| a.max(model.eval(t).unwrap().abs()))
}

proptest! {
    #[test]
    fn continuous_at_every_knot(s in model_strategy()) {
        for l in 1..s.num_pieces() {
            let t = s.knot(l);
            let left = s.piece_poly(l).unwrap().eval(t);
            let right = s.piece_poly(l + 1).unwrap().eval(t);
            prop_assert!((left - right).abs() <= 1e-12 * scale(&s));
        }
    }

    #[test]
    fn pieces_agree_with_truncated_powers(s in model_strategy()) {
        let sc = scale(&s);
        for t in grid(&s, 300) {
            let l = s.piece_index(t);
            let a = s.eval(t).unwrap();
            prop_assert!((a - s.eval_truncated(t)).abs() <= 1e-11 * sc);
            prop_assert!((a - s.piece_poly(l).unwrap().eval(t)).abs() <= 1e-12 * sc);
        }
    }

    #[test]
    fn slope_jump_equals_alm(s in model_strategy()) {
        for c in s.classify_knots(s.default_tau_zero()) {
            let t = s.knot(c.knot_index);
            let h = 1e-6;
            let right = (s.eval(t + h).unwrap() - s.eval(t).unwrap()) / h;
            let left = (s.eval(t).unwrap() - s.eval(t - h).unwrap()) / h;
            prop_assert!((right - left - c.alm).abs() <= 1e-4 * scale(&s).max(1.0));
            let exact = s.piece_poly(c.knot_index + 1).unwrap().eval_derivative(t)
                - s.piece_poly(c.knot_index).unwrap().eval_derivative(t);
            prop_assert!((exact - c.alm).abs() <= 1e-10 * scale(&s));
        }
    }

    #[test]
    fn normalize_is_idempotent(s in model_strategy()) {
        let once = normalize(&s);
        prop_assert_eq!(&once, &s);
        prop_assert_eq!(normalize(&once), once);
    }

    #[test]
    fn normalize_preserves_values(
        s in model_strategy(),
        rot in 0usize..4,
        extra in prop::collection::vec(-1.0f64..1.0, 1..=3),
        left in any::<bool>(),
    ) {
        // Rotate the knot blocks out of order and add one knot outside the domain.
        let m = s.degree();
        let (lo, hi) = s.domain();
        let mut knots = s.internal_knots().to_vec();
        let mut blocks: Vec<Vec<f64>> = (1..s.num_pieces()).map(|i| s.block(i).to_vec()).collect();
        if !knots.is_empty() {
            let r = rot % knots.len();
            knots.rotate_left(r);
            blocks.rotate_left(r);
        }
        knots.push(if left { lo - 0.3 } else { hi + 0.3 });
        let mut b = extra.clone();
        b.resize(m, 0.5);
        blocks.push(b);
        blocks.insert(0, s.block(0).to_vec());
        let messy = SplineModel::new(m, lo, hi, knots, s.a00(), blocks).unwrap();
        let clean = normalize(&messy);
        prop_assert!(clean.is_sorted());
        let sc = scale(&clean);
        for t in grid(&s, 100) {
            prop_assert!((messy.eval(t).unwrap() - clean.eval(t).unwrap()).abs() <= 1e-11 * sc.max(scale(&s)));
        }
        prop_assert_eq!(normalize(&clean), clean);
    }
}
