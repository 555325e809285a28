use proptest::prelude::*;
use relreward_core::analysis::*;

fn series(values: &[f64]) -> MetricSeries {
    MetricSeries::from_values("y", values)
}

#[test]
fn ema_hand_values_for_window_50() {
    let a = 2.0 / 51.0;
    let out = ema_smooth(&series(&[0.0, 1.0, 1.0, -2.0]), 50).unwrap().values();
    let e1 = a;
    let e2 = (1.0 - a) * e1 + a;
    let e3 = (1.0 - a) * e2 - 2.0 * a;
    for (got, want) in out.iter().zip([0.0, e1, e2, e3]) {
        assert!((got - want).abs() < 1e-12);
    }
    assert!((out[1] - 0.0392156862745098).abs() < 1e-12);
}

#[test]
fn ema_keeps_steps_and_skips_gaps() {
    let s = MetricSeries::new("y", 7, vec![(3, 1.0), (10, f64::NAN), (12, 3.0)]).unwrap();
    let out = ema_smooth(&s, 3).unwrap();
    assert_eq!(out.points.iter().map(|p| p.0).collect::<Vec<_>>(), vec![3, 10, 12]);
    assert_eq!(out.values(), vec![1.0, 1.0, 2.0]);
    assert_eq!(out.seed, 7);
}

#[test]
fn rolling_std_uses_sample_normalization() {
    let out = rolling_std(&series(&[1.0, 3.0, 5.0, 5.0]), 3).unwrap().values();
    assert_eq!(out[0], 0.0);
    assert!((out[1] - 2f64.sqrt()).abs() < 1e-12);
    assert!((out[2] - 2.0).abs() < 1e-12);
    assert!((out[3] - (4.0f64 / 3.0).sqrt()).abs() < 1e-12);
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3..1e3f64, 1..80)
}

fn pairs() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (3usize..60).prop_flat_map(|n| (prop::collection::vec(-1e3..1e3f64, n), prop::collection::vec(-1e3..1e3f64, n)))
}

proptest! {
    #[test]
    fn ema_is_bounded_by_its_input(ys in values(), window in 1usize..100) {
        let (lo, hi) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), y| (l.min(*y), h.max(*y)));
        for e in ema_smooth(&series(&ys), window).unwrap().values() {
            prop_assert!(e >= lo - 1e-9 && e <= hi + 1e-9);
        }
    }

    #[test]
    fn ema_is_shift_equivariant(ys in values(), c in -100.0..100.0f64, window in 1usize..100) {
        let shifted: Vec<f64> = ys.iter().map(|y| y + c).collect();
        let a = ema_smooth(&series(&ys), window).unwrap().values();
        let b = ema_smooth(&series(&shifted), window).unwrap().values();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x + c - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn pearson_is_affine_invariant((xs, ys) in pairs(), k in 0.01..100.0f64, c in -100.0..100.0f64) {
        let Ok(base) = correlate_values(&xs, &ys) else { return Ok(()) };
        let scaled: Vec<f64> = xs.iter().map(|x| k * x + c).collect();
        let moved = correlate_values(&scaled, &ys).unwrap();
        prop_assert!((moved.pearson - base.pearson).abs() < 1e-12);
        prop_assert_eq!(moved.n, base.n);
    }

    #[test]
    fn correlation_is_symmetric((xs, ys) in pairs()) {
        let (Ok(a), Ok(b)) = (correlate_values(&xs, &ys), correlate_values(&ys, &xs)) else { return Ok(()) };
        prop_assert!((a.pearson - b.pearson).abs() < 1e-15);
        prop_assert!((a.spearman - b.spearman).abs() < 1e-15);
    }

    #[test]
    fn csv_round_trips(vals in prop::collection::vec(-1e6..1e6f64, 1..30)) {
        let rows: Vec<MetricRow> = vals.iter().enumerate()
            .map(|(i, v)| MetricRow { step: i as u64 * 7, metric: "true_score".into(), value: *v, seed: 42 })
            .collect();
        let mut buf = Vec::new();
        write_metrics_csv(&rows, &mut buf).unwrap();
        prop_assert!(buf.starts_with(b"step,metric,value,seed\n"));
        prop_assert_eq!(read_metrics_csv(buf.as_slice()).unwrap(), rows);
    }
}
