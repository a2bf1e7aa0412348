//! Acceptance checks for the whole toolkit.
//!
//! Each criterion is a function returning a [`CriterionResult`] with the
//! expected and observed values rendered as text. Thresholds live in
//! [`Tolerances`] so a harness can tamper with one and watch the matching row
//! fail. Randomized checks use fixed seeds.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::adc::{build_timeline, power_report, split_samples, AdcSplit, SplitPolicy};
use crate::bench::{measure_error, min_points_for_error, Scheme, DEFAULT_GRID_DENSITY};
use crate::cheb::{cheb_eval, cheb_nodes, compute_coeffs, ctif, Interval};
use crate::error::{Error, Result};
use crate::signal::SignalSpec;
use crate::systolic::{
    analytic_metrics, compute_metrics, simulate_window, Architecture, Buffering, IoType, PeakOps, SystolicConfig,
};

const SEED: u64 = 0x5eed_c4eb;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub node_residual: f64,
    pub oracle_relative: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub harmonic_target_percent: f64,
    pub damped_target_percent: f64,
    pub cheb_points_harmonic: f64,
    pub cheb_points_damped: f64,
    pub equi_points_harmonic: f64,
    pub equi_points_damped: f64,
    pub equi_points_slack: f64,
    pub window: f64,
    pub latency: f64,
    pub peak_ops: f64,
    pub hue_percent: f64,
    pub functional_relative: f64,
    pub hybrid_total_au: f64,
    pub savings_harmonic_percent: f64,
    pub savings_damped_percent: f64,
    pub savings_slack: f64,
    pub ctif: f64,
    pub trig: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            node_residual: 1e-10,
            oracle_relative: 1e-8,
            ratio_min: 3.0,
            ratio_max: 5.0,
            harmonic_target_percent: 1.1,
            damped_target_percent: 4.1,
            cheb_points_harmonic: 8.0,
            cheb_points_damped: 8.0,
            equi_points_harmonic: 10.0,
            equi_points_damped: 11.0,
            equi_points_slack: 1.0,
            window: 8.0,
            latency: 16.0,
            peak_ops: 8.0,
            hue_percent: 100.0,
            functional_relative: 1e-9,
            hybrid_total_au: 1552.0,
            savings_harmonic_percent: 39.375,
            savings_damped_percent: 44.886,
            savings_slack: 0.1,
            ctif: 1e-10,
            trig: 1e-11,
        }
    }
}

impl Tolerances {
    /// Overrides one threshold by field name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match name {
            "node_residual" => &mut self.node_residual,
            "oracle_relative" => &mut self.oracle_relative,
            "ratio_min" => &mut self.ratio_min,
            "ratio_max" => &mut self.ratio_max,
            "harmonic_target_percent" => &mut self.harmonic_target_percent,
            "damped_target_percent" => &mut self.damped_target_percent,
            "cheb_points_harmonic" => &mut self.cheb_points_harmonic,
            "cheb_points_damped" => &mut self.cheb_points_damped,
            "equi_points_harmonic" => &mut self.equi_points_harmonic,
            "equi_points_damped" => &mut self.equi_points_damped,
            "equi_points_slack" => &mut self.equi_points_slack,
            "window" => &mut self.window,
            "latency" => &mut self.latency,
            "peak_ops" => &mut self.peak_ops,
            "hue_percent" => &mut self.hue_percent,
            "functional_relative" => &mut self.functional_relative,
            "hybrid_total_au" => &mut self.hybrid_total_au,
            "savings_harmonic_percent" => &mut self.savings_harmonic_percent,
            "savings_damped_percent" => &mut self.savings_damped_percent,
            "savings_slack" => &mut self.savings_slack,
            "ctif" => &mut self.ctif,
            "trig" => &mut self.trig,
            _ => {
                return Err(Error::UnknownTag {
                    kind: "tolerance",
                    value: name.to_string(),
                })
            }
        };
        *slot = value;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub expected: String,
    pub actual: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {}. {}: expected {}; actual {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.expected,
            self.actual
        )
    }
}

fn result(id: u32, name: &'static str, passed: bool, expected: String, actual: String) -> CriterionResult {
    CriterionResult {
        id,
        name,
        passed,
        expected,
        actual,
    }
}

fn preset_signals() -> [(&'static str, SignalSpec); 2] {
    [("harmonic", SignalSpec::harmonic()), ("damped", SignalSpec::damped())]
}

/// Interpolant reproduces every sample at its node.
pub fn interpolation_exactness(tol: &Tolerances) -> CriterionResult {
    let mut worst: f64 = 0.0;
    let mut worst_at = String::new();
    for (name, signal) in preset_signals() {
        for degree in 3..=16 {
            let window = cheb_nodes(degree, Interval::UNIT);
            let samples = window.sample(|x| signal.eval(x));
            let coeffs = compute_coeffs(&samples, &window).expect("lengths agree");
            let scale = samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
            for (x, f) in window.nodes().iter().zip(&samples) {
                let r = (coeffs.interpolate(*x) - f).abs() / scale;
                if r > worst {
                    worst = r;
                    worst_at = format!(" ({name}, N={degree})");
                }
            }
        }
    }
    result(
        1,
        "interpolation exactness at nodes, N in 3..=16",
        worst <= tol.node_residual,
        format!("max residual / max|f| <= {:e}", tol.node_residual),
        format!("{worst:.3e}{worst_at}"),
    )
}

/// Power-basis coefficients of the interpolant by direct Vandermonde solve,
/// highest power first, on the normalized variable.
pub fn vandermonde_solve(unit_nodes: &[f64], samples: &[f64]) -> Option<Vec<f64>> {
    let n = unit_nodes.len();
    let v = DMatrix::from_fn(n, n, |r, c| unit_nodes[r].powi((n - 1 - c) as i32));
    let rhs = DVector::from_column_slice(samples);
    v.lu().solve(&rhs).map(|a| a.iter().copied().collect())
}

/// DCT-route coefficients agree with the brute-force power-basis solve.
pub fn oracle_equivalence(tol: &Tolerances) -> CriterionResult {
    let mut signals = preset_signals().map(|(_, s)| s).to_vec();
    signals.push(SignalSpec::Polynomial {
        coeffs: vec![0.3, -1.2, 0.0, 2.5, 0.7],
    });
    let mut worst: f64 = 0.0;
    let mut failed_solve = false;
    for signal in &signals {
        for degree in 0..=10 {
            let window = cheb_nodes(degree, Interval::UNIT);
            let samples = window.sample(|x| signal.eval(x));
            let via_dct = compute_coeffs(&samples, &window).expect("lengths agree").power_coefficients();
            let Some(via_solve) = vandermonde_solve(&window.unit_nodes(), &samples) else {
                failed_solve = true;
                continue;
            };
            let scale = via_solve.iter().fold(0.0f64, |m, a| m.max(a.abs())).max(f64::MIN_POSITIVE);
            for (a, b) in via_dct.iter().zip(&via_solve) {
                worst = worst.max((a - b).abs() / scale);
            }
        }
    }
    result(
        2,
        "DCT coefficients vs Vandermonde oracle, N <= 10",
        !failed_solve && worst <= tol.oracle_relative,
        format!("relative deviation <= {:e}", tol.oracle_relative),
        if failed_solve {
            "singular Vandermonde system".into()
        } else {
            format!("{worst:.3e}")
        },
    )
}

/// Equispaced error over Chebyshev error at 8 points on the harmonic signal.
pub fn error_ratio(tol: &Tolerances) -> CriterionResult {
    let n = tol.window as usize;
    let signal = SignalSpec::harmonic();
    let err = |scheme| {
        measure_error(&signal, scheme, n, Interval::UNIT, DEFAULT_GRID_DENSITY)
            .expect("valid parameters")
            .relative_error_percent
    };
    let (cheb, equi) = (err(Scheme::Chebyshev), err(Scheme::Equispaced));
    let ratio = equi / cheb;
    result(
        3,
        "equispaced/Chebyshev error ratio at 8 points",
        (tol.ratio_min..=tol.ratio_max).contains(&ratio),
        format!("ratio in [{}, {}]", tol.ratio_min, tol.ratio_max),
        format!("{ratio:.3} (chebyshev {cheb:.3}%, equispaced {equi:.3}%)"),
    )
}

/// Minimum point counts reaching the error targets.
pub fn point_counts(tol: &Tolerances) -> CriterionResult {
    let n_max = 24;
    let find = |signal: &SignalSpec, scheme, target| {
        min_points_for_error(signal, scheme, target, Interval::UNIT, n_max).expect("valid parameters")
    };
    let cases = [
        (
            "harmonic",
            SignalSpec::harmonic(),
            tol.harmonic_target_percent,
            tol.cheb_points_harmonic,
            tol.equi_points_harmonic,
        ),
        (
            "damped",
            SignalSpec::damped(),
            tol.damped_target_percent,
            tol.cheb_points_damped,
            tol.equi_points_damped,
        ),
    ];
    let mut passed = true;
    let mut expected = Vec::new();
    let mut actual = Vec::new();
    for (name, signal, target, cheb_want, equi_want) in cases {
        let cheb = find(&signal, Scheme::Chebyshev, target);
        let equi = find(&signal, Scheme::Equispaced, target);
        let cheb_ok = cheb.points().map(|p| p as f64) == Some(cheb_want);
        let equi_ok = equi
            .points()
            .is_some_and(|p| (p as f64 - equi_want).abs() <= tol.equi_points_slack);
        passed &= cheb_ok && equi_ok;
        expected.push(format!(
            "{name} <{target}%: chebyshev {cheb_want}, equispaced {equi_want}±{}",
            tol.equi_points_slack
        ));
        actual.push(format!("{name}: chebyshev {cheb}, equispaced {equi}"));
    }
    result(
        4,
        "minimum points for the error targets",
        passed,
        expected.join("; "),
        actual.join("; "),
    )
}

/// Simulated datapath metrics at window 8 and the analytic reference columns.
pub fn architecture_metrics(tol: &Tolerances) -> CriterionResult {
    let w = tol.window as usize;
    let config = SystolicConfig::proposed(w);
    let window = cheb_nodes(w - 1, Interval::UNIT);
    let samples = window.sample(|x| SignalSpec::harmonic().eval(x));
    let queries = Interval::UNIT.linspace(w);
    let trace = simulate_window(&samples, &queries, &config).expect("valid window");
    let m = compute_metrics(&trace, &config);
    let peak = PeakOps::Count(tol.peak_ops as usize);
    let proposed_ok = m.latency as f64 == tol.latency
        && m.peak_ops_coeff == peak
        && m.peak_ops_poly == peak
        && m.peak_ops_fir == peak
        && m.hue_percent == tol.hue_percent
        && m.buffering == Buffering::None
        && m.io_type == IoType::WordSerial;

    let zt = analytic_metrics(Architecture::ZhuTime, w).expect("known architecture");
    let zf = analytic_metrics(Architecture::ZhuTransform, w).expect("known architecture");
    let zhu_ok = zt.buffering == Buffering::SamplesAndT
        && zt.io_type == IoType::WordParallel
        && zt.peak_ops_coeff == PeakOps::ExceedsStored(w)
        && zt.peak_ops_poly == PeakOps::Count(0)
        && zt.peak_ops_fir == PeakOps::Count(w)
        && zf.buffering == Buffering::TOnly
        && zf.io_type == IoType::WordParallel
        && zf.peak_ops_coeff == PeakOps::Count(w)
        && zf.peak_ops_poly == PeakOps::Stored
        && zf.peak_ops_fir == PeakOps::Count(w)
        && [&zt, &zf]
            .iter()
            .all(|z| z.latency as f64 == tol.latency && z.hue_percent == 100.0);

    let show = |m: &crate::systolic::ArchMetrics| {
        format!(
            "{}: buffering {}, io {}, ops {}/{}/{}, latency {}, hue {}",
            m.architecture, m.buffering.as_str(), m.io_type.as_str(), m.peak_ops_coeff, m.peak_ops_poly, m.peak_ops_fir, m.latency, m.hue_percent
        )
    };
    result(
        5,
        "datapath metrics at window 8",
        proposed_ok && zhu_ok,
        format!(
            "proposed: buffering none, io word_serial, ops {0}/{0}/{0}, latency {1}, hue {2}; zhu_time >{3},stored/0/{3}; zhu_transform {3}/stored/{3}",
            tol.peak_ops, tol.latency, tol.hue_percent, w
        ),
        [show(&m), show(&zt), show(&zf)].join("; "),
    )
}

fn random_signal(rng: &mut StdRng) -> SignalSpec {
    match rng.gen_range(0..4) {
        0 => SignalSpec::HarmonicSum {
            terms: (0..rng.gen_range(1..4))
                .map(|_| (rng.gen_range(-2.0..2.0), rng.gen_range(0.5..10.0)))
                .collect(),
        },
        1 => SignalSpec::DampedSine {
            decay: rng.gen_range(-1.5..1.5),
            omega: rng.gen_range(0.5..10.0),
        },
        2 => SignalSpec::Polynomial {
            coeffs: (0..rng.gen_range(1..9)).map(|_| rng.gen_range(-3.0..3.0)).collect(),
        },
        _ => SignalSpec::Constant {
            value: rng.gen_range(-5.0..5.0),
        },
    }
}

/// Systolic outputs match the reference interpolation on random cases.
pub fn functional_equivalence(tol: &Tolerances) -> CriterionResult {
    let w = tol.window as usize;
    let config = SystolicConfig::proposed(w);
    let window = cheb_nodes(w - 1, Interval::UNIT);
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    let cases = 100;
    for _ in 0..cases {
        let signal = random_signal(&mut rng);
        let x = rng.gen_range(-1.0..=1.0);
        let samples = window.sample(|x| signal.eval(x));
        let reference = compute_coeffs(&samples, &window).expect("lengths agree").interpolate(x);
        let trace = simulate_window(&samples, &[x], &config).expect("valid window");
        let got = trace.outputs[0].value;
        worst = worst.max((got - reference).abs() / reference.abs().max(1.0));
    }
    result(
        6,
        "systolic output vs reference interpolation, 100 random cases",
        worst <= tol.functional_relative,
        format!("|sim - ref| / max(1, |ref|) <= {:e}", tol.functional_relative),
        format!("{worst:.3e}"),
    )
}

/// Split and comparator energy for the two reference baselines.
pub fn power_accounting(tol: &Tolerances) -> CriterionResult {
    let timeline = build_timeline(tol.window as usize - 1).expect("window has gaps");
    let split = split_samples(&timeline, 2.0, SplitPolicy::BothAdjacent).expect("valid t_sar");
    let harmonic = power_report(&split, 8, 10).expect("valid parameters");
    let damped = power_report(&split, 8, 11).expect("valid parameters");
    let passed = (split.a_flash, split.a_sar) == (6, 2)
        && harmonic.total_au as f64 == tol.hybrid_total_au
        && harmonic.baseline_au == 2560
        && damped.baseline_au == 2816
        && (harmonic.savings_percent - tol.savings_harmonic_percent).abs() <= tol.savings_slack
        && (damped.savings_percent - tol.savings_damped_percent).abs() <= tol.savings_slack;
    result(
        7,
        "hybrid ADC split and power at N=7, t_sar=2",
        passed,
        format!(
            "split (6, 2); {} au vs 2560 au ({}% ± {}) and vs 2816 au ({}% ± {})",
            tol.hybrid_total_au, tol.savings_harmonic_percent, tol.savings_slack, tol.savings_damped_percent, tol.savings_slack
        ),
        format!(
            "split ({}, {}); {} au vs {} au ({:.3}%) and vs {} au ({:.3}%)",
            split.a_flash,
            split.a_sar,
            harmonic.total_au,
            harmonic.baseline_au,
            harmonic.savings_percent,
            damped.baseline_au,
            damped.savings_percent
        ),
    )
}

/// Smallest time between consecutive SAR sampling instants, if any pair exists.
pub fn min_sar_spacing(split: &AdcSplit, instants: &[f64]) -> Option<f64> {
    split
        .sar_indices()
        .windows(2)
        .map(|p| instants[p[1]] - instants[p[0]])
        .reduce(f64::min)
}

/// Cardinal functions, the trig identity, the ADC split properties and
/// determinism of every output.
pub fn property_suite(tol: &Tolerances) -> CriterionResult {
    let mut rng = StdRng::seed_from_u64(SEED ^ 0xa5a5);
    let mut failures = Vec::new();

    // partition of unity and cardinality, N = 7
    let degree = 7;
    let mut pou: f64 = 0.0;
    for _ in 0..50 {
        let t = rng.gen_range(-1.0..=1.0);
        let sum: f64 = (0..=degree).map(|i| ctif(i, t, degree).expect("index in range")).sum();
        pou = pou.max((sum - 1.0).abs());
    }
    let mut card: f64 = 0.0;
    for (j, &x) in cheb_nodes(degree, Interval::UNIT).nodes().iter().enumerate() {
        for i in 0..=degree {
            let want = if i == j { 1.0 } else { 0.0 };
            card = card.max((ctif(i, x, degree).expect("index in range") - want).abs());
        }
    }
    if pou > tol.ctif {
        failures.push(format!("partition of unity {pou:.2e}"));
    }
    if card > tol.ctif {
        failures.push(format!("cardinality {card:.2e}"));
    }

    // T_n(cos θ) = cos(nθ)
    let mut trig: f64 = 0.0;
    for _ in 0..100 {
        let theta = rng.gen_range(0.0..=PI);
        for n in 0..=30 {
            trig = trig.max((cheb_eval(n, theta.cos()) - (n as f64 * theta).cos()).abs());
        }
    }
    if trig > tol.trig {
        failures.push(format!("trig identity {trig:.2e}"));
    }

    // gap symmetry, SAR spacing, monotonicity
    let policies = [SplitPolicy::BothAdjacent, SplitPolicy::PrecedingGapOnly, SplitPolicy::GreedyNonoverlap];
    let t_sars = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0, 10.0];
    for degree in 1..=20 {
        let tl = build_timeline(degree).expect("degree >= 1");
        let gaps = tl.gaps();
        if gaps.iter().zip(gaps.iter().rev()).any(|(a, b)| (a - b).abs() > 1e-12) {
            failures.push(format!("gap asymmetry at N={degree}"));
        }
        let instants = tl.instants();
        for policy in policies {
            let mut last_sar = usize::MAX;
            for &t_sar in &t_sars {
                let split = split_samples(&tl, t_sar, policy).expect("valid t_sar");
                if let Some(gap) = min_sar_spacing(&split, &instants) {
                    if gap + 1e-9 < t_sar {
                        failures.push(format!("SAR overlap N={degree} {policy} t_sar={t_sar}"));
                    }
                }
                if policy != SplitPolicy::GreedyNonoverlap && split.a_sar > last_sar {
                    failures.push(format!("non-monotone a_sar N={degree} {policy} t_sar={t_sar}"));
                }
                if policy == SplitPolicy::BothAdjacent {
                    let a = &split.assignments;
                    if a.iter().ne(a.iter().rev()) {
                        failures.push(format!("asymmetric split N={degree} t_sar={t_sar}"));
                    }
                }
                last_sar = split.a_sar;
            }
        }
    }

    // determinism: identical inputs, bit-identical outputs
    let run = || {
        let reports: Vec<_> = preset_signals()
            .iter()
            .flat_map(|(_, s)| {
                Scheme::ALL.map(|scheme| measure_error(s, scheme, 9, Interval::UNIT, DEFAULT_GRID_DENSITY))
            })
            .collect::<Result<Vec<_>>>()
            .expect("valid parameters");
        let window = cheb_nodes(7, Interval::UNIT);
        let trace = simulate_window(
            &window.sample(|x| SignalSpec::damped().eval(x)),
            &Interval::UNIT.linspace(8),
            &SystolicConfig::proposed(8),
        )
        .expect("valid window");
        let split = split_samples(&build_timeline(7).expect("gaps"), 2.0, SplitPolicy::BothAdjacent).expect("split");
        let power = power_report(&split, 8, 10).expect("power");
        (
            serde_json::to_string(&reports).expect("serializable"),
            trace.to_csv(),
            serde_json::to_string(&trace.outputs).expect("serializable"),
            serde_json::to_string(&power).expect("serializable"),
        )
    };
    if run() != run() {
        failures.push("non-deterministic output".into());
    }

    result(
        8,
        "property suite",
        failures.is_empty(),
        format!("ctif <= {:e}, trig <= {:e}, ADC properties hold, deterministic", tol.ctif, tol.trig),
        if failures.is_empty() {
            format!("ctif {:.2e}, trig {trig:.2e}, ADC properties hold, deterministic", pou.max(card))
        } else {
            failures.join("; ")
        },
    )
}

/// Runs every criterion in order.
pub fn run_all(tol: &Tolerances) -> Vec<CriterionResult> {
    vec![
        interpolation_exactness(tol),
        oracle_equivalence(tol),
        error_ratio(tol),
        point_counts(tol),
        architecture_metrics(tol),
        functional_equivalence(tol),
        power_accounting(tol),
        property_suite(tol),
    ]
}
