use proptest::prelude::*;

use chebarch::adc::{build_timeline, split_samples, Converter, SplitPolicy};
use chebarch::bench::{measure_error, Scheme};
use chebarch::repro::min_sar_spacing;
use chebarch::systolic::{compute_metrics, simulate_stream, simulate_window, SystolicConfig};
use chebarch::{cheb_eval, cheb_nodes, compute_coeffs, ctif, interpolate_ctif, Interval, SignalSpec};

fn interval() -> impl Strategy<Value = Interval> {
    (-5.0f64..5.0, 0.1f64..6.0).prop_map(|(lo, w)| Interval::new(lo, lo + w).unwrap())
}

fn policy() -> impl Strategy<Value = SplitPolicy> {
    prop_oneof![
        Just(SplitPolicy::BothAdjacent),
        Just(SplitPolicy::PrecedingGapOnly),
        Just(SplitPolicy::GreedyNonoverlap),
    ]
}

proptest! {
    #[test]
    fn trig_identity(n in 0usize..=30, x in -1.0f64..=1.0) {
        prop_assert!((cheb_eval(n, x) - (n as f64 * x.acos()).cos()).abs() <= 1e-11);
    }

    #[test]
    fn nodes_ascending_inside_interval(degree in 0usize..40, iv in interval()) {
        let w = cheb_nodes(degree, iv);
        prop_assert_eq!(w.len(), degree + 1);
        prop_assert!(w.nodes().windows(2).all(|p| p[0] < p[1]));
        prop_assert!(w.nodes().iter().all(|&x| x > iv.lo() && x < iv.hi()));
    }

    #[test]
    fn interpolates_samples_at_nodes(
        degree in 0usize..=16,
        iv in interval(),
        seed in proptest::collection::vec(-10.0f64..10.0, 17),
    ) {
        let w = cheb_nodes(degree, iv);
        let samples = &seed[..=degree];
        let set = compute_coeffs(samples, &w).unwrap();
        let scale = samples.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (&x, &y) in w.nodes().iter().zip(samples) {
            prop_assert!((set.interpolate(x) - y).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn reproduces_polynomials_of_lower_degree(
        coeffs in proptest::collection::vec(-3.0f64..3.0, 1..8),
        extra in 0usize..4,
        x in -1.0f64..1.0,
    ) {
        let degree = coeffs.len() - 1 + extra;
        let signal = SignalSpec::Polynomial { coeffs };
        let w = cheb_nodes(degree, Interval::UNIT);
        let set = compute_coeffs(&w.sample(|t| signal.eval(t)), &w).unwrap();
        prop_assert!((set.interpolate(x) - signal.eval(x)).abs() <= 1e-9 * signal.eval(x).abs().max(1.0));
    }

    #[test]
    fn ctif_matches_transform_route(
        degree in 0usize..=12,
        iv in interval(),
        u in 0.0f64..=1.0,
        seed in proptest::collection::vec(-5.0f64..5.0, 13),
    ) {
        let w = cheb_nodes(degree, iv);
        let samples = &seed[..=degree];
        let x = iv.from_unit(2.0 * u - 1.0);
        let a = compute_coeffs(samples, &w).unwrap().interpolate(x);
        let b = interpolate_ctif(&w, samples, x).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * samples.iter().fold(1.0f64, |m, v| m.max(v.abs())) * (degree as f64 + 1.0));
    }

    #[test]
    fn ctif_partition_of_unity(degree in 0usize..=20, t in -1.0f64..=1.0) {
        let sum: f64 = (0..=degree).map(|i| ctif(i, t, degree).unwrap()).sum();
        prop_assert!((sum - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn gaps_symmetric_and_positive(degree in 1usize..40) {
        let gaps = build_timeline(degree).unwrap().gaps().to_vec();
        prop_assert_eq!(gaps.len(), degree);
        prop_assert!(gaps.iter().all(|&g| g >= 1.0 - 1e-12));
        for (a, b) in gaps.iter().zip(gaps.iter().rev()) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn split_edges_flash_and_counts_add_up(degree in 1usize..30, t_sar in 0.0f64..6.0, policy in policy()) {
        let tl = build_timeline(degree).unwrap();
        let split = split_samples(&tl, t_sar, policy).unwrap();
        prop_assert_eq!(split.a_flash + split.a_sar, degree + 1);
        prop_assert_eq!(split.assignments[0], Converter::Flash);
        prop_assert_eq!(split.assignments[degree], Converter::Flash);
    }

    #[test]
    fn sar_conversions_never_overlap(degree in 1usize..30, t_sar in 0.5f64..6.0, policy in policy()) {
        let tl = build_timeline(degree).unwrap();
        let split = split_samples(&tl, t_sar, policy).unwrap();
        if let Some(gap) = min_sar_spacing(&split, &tl.instants()) {
            prop_assert!(gap + 1e-9 >= t_sar, "{policy}: spacing {gap} < {t_sar}");
        }
    }

    #[test]
    fn sar_count_monotone_in_t_sar(degree in 1usize..30, a in 0.0f64..6.0, b in 0.0f64..6.0) {
        let tl = build_timeline(degree).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        for policy in [SplitPolicy::BothAdjacent, SplitPolicy::PrecedingGapOnly] {
            let fast = split_samples(&tl, lo, policy).unwrap().a_sar;
            let slow = split_samples(&tl, hi, policy).unwrap().a_sar;
            prop_assert!(slow <= fast);
        }
    }

    #[test]
    fn systolic_matches_reference(
        w in 1usize..=12,
        iv in interval(),
        seed in proptest::collection::vec(-4.0f64..4.0, 12),
        q in proptest::collection::vec(0.0f64..=1.0, 1..20),
    ) {
        let samples = &seed[..w];
        let config = SystolicConfig::proposed(w).with_interval(iv);
        let queries: Vec<f64> = q.iter().map(|u| iv.from_unit(2.0 * u - 1.0)).collect();
        let trace = simulate_window(samples, &queries, &config).unwrap();
        let reference = compute_coeffs(samples, &cheb_nodes(w - 1, iv)).unwrap();
        let outs = trace.output_values();
        prop_assert_eq!(outs.len(), queries.len());
        for (x, y) in outs {
            prop_assert_eq!(y, reference.interpolate(x));
        }
        prop_assert_eq!(trace.latency_cycles, 2 * w as u64);
    }

    #[test]
    fn word_serial_input_and_ops_ceiling(w in 1usize..=10, windows in 1usize..4) {
        let data: Vec<Vec<f64>> = (0..windows).map(|k| (0..w).map(|i| (i + k) as f64).collect()).collect();
        let queries: Vec<Vec<f64>> = (0..windows).map(|_| Interval::UNIT.linspace(w.max(2)).into_iter().take(w).collect()).collect();
        let config = SystolicConfig::proposed(w);
        let trace = simulate_stream(&data, &queries, &config).unwrap();
        let mut cycles: Vec<u64> = trace.inputs.iter().map(|e| e.cycle).collect();
        let n = cycles.len();
        cycles.dedup();
        prop_assert_eq!(cycles.len(), n, "one sample per cycle");
        prop_assert_eq!(n, w * windows);
        for rec in &trace.cycles {
            for stage in &rec.stages {
                prop_assert!(stage.ops() <= w);
            }
        }
        for d in &trace.dependences {
            prop_assert!(d.consumer_cycle > d.producer_cycle);
        }
        prop_assert_eq!(compute_metrics(&trace, &config).hue_percent, 100.0);
    }
}

#[test]
fn chebyshev_never_worse_than_equispaced() {
    for signal in [SignalSpec::harmonic(), SignalSpec::damped()] {
        for n in 6..=16 {
            let c = measure_error(&signal, Scheme::Chebyshev, n, Interval::UNIT, 2001).unwrap();
            let e = measure_error(&signal, Scheme::Equispaced, n, Interval::UNIT, 2001).unwrap();
            assert!(c.relative_error_percent <= e.relative_error_percent, "{signal} n={n}");
        }
    }
}

#[test]
fn error_stable_across_grid_density() {
    for signal in [SignalSpec::harmonic(), SignalSpec::damped()] {
        for scheme in Scheme::ALL {
            let a = measure_error(&signal, scheme, 8, Interval::UNIT, 2001).unwrap();
            let b = measure_error(&signal, scheme, 8, Interval::UNIT, 8001).unwrap();
            let rel = (a.relative_error_percent - b.relative_error_percent).abs() / b.relative_error_percent;
            assert!(rel < 0.01, "{signal} {scheme}: {rel}");
        }
    }
}

#[test]
fn constant_signal_has_zero_error() {
    let signal = SignalSpec::Constant { value: 2.5 };
    for scheme in Scheme::ALL {
        let r = measure_error(&signal, scheme, 8, Interval::UNIT, 2001).unwrap();
        assert!(r.relative_error_percent < 1e-12);
    }
}

#[test]
fn steady_stream_keeps_interior_fully_busy() {
    let w = 8;
    let windows = 6;
    let data: Vec<Vec<f64>> = (0..windows)
        .map(|k| cheb_nodes(w - 1, Interval::UNIT).sample(|x| (x * (k + 1) as f64).sin()))
        .collect();
    let queries: Vec<Vec<f64>> = (0..windows).map(|_| Interval::UNIT.linspace(w)).collect();
    let trace = simulate_stream(&data, &queries, &SystolicConfig::proposed(w)).unwrap();
    // Between fill and drain every unit of every stage works each cycle.
    let fill = 2 * w as u64 - 1;
    let drain_start = (windows * w) as u64;
    assert_eq!(trace.utilization(fill..drain_start), 100.0);
    let full: Vec<u64> = trace
        .cycles
        .iter()
        .filter(|c| c.ops_issued() == 3 * w)
        .map(|c| c.cycle)
        .collect();
    assert!(full.windows(2).all(|p| p[1] == p[0] + 1), "steady span is contiguous");
    assert_eq!((full[0], *full.last().unwrap()), (fill, drain_start - 1));
}
