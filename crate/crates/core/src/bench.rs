//! Equispaced baseline and reconstruction-error experiments.
//!
//! Errors are reported as a percentage of the peak signal magnitude on a
//! uniform evaluation grid. The equispaced scheme is a single full-degree
//! polynomial through all points, evaluated in barycentric form.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::cheb::{cheb_nodes, compute_coeffs, Interval};
use crate::error::{Error, Result};
use crate::signal::SignalSpec;

/// Evaluation grid used when the caller does not pick one.
pub const DEFAULT_GRID_DENSITY: usize = 2001;
pub const MIN_GRID_DENSITY: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Chebyshev,
    Equispaced,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Chebyshev, Scheme::Equispaced];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Chebyshev => "chebyshev",
            Scheme::Equispaced => "equispaced",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "chebyshev" | "cheb" => Ok(Scheme::Chebyshev),
            "equispaced" | "uniform" => Ok(Scheme::Equispaced),
            other => Err(Error::UnknownTag {
                kind: "scheme",
                value: other.to_string(),
            }),
        }
    }
}

/// Evenly spaced nodes including both interval endpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquispacedWindow {
    nodes: Vec<f64>,
    interval: Interval,
}

impl EquispacedWindow {
    pub fn new(count: usize, interval: Interval) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidParameter {
                field: "n_points",
                reason: "need at least one node".into(),
            });
        }
        Ok(EquispacedWindow {
            nodes: interval.linspace(count),
            interval,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn count(&self) -> usize {
        self.nodes.len()
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }
}

/// Barycentric weights `w_j = 1 / Π_{k≠j} (x_j − x_k)`.
fn barycentric_weights(nodes: &[f64]) -> Result<Vec<f64>> {
    let mut weights = Vec::with_capacity(nodes.len());
    for (j, &xj) in nodes.iter().enumerate() {
        let mut prod = 1.0;
        for (k, &xk) in nodes.iter().enumerate() {
            if k != j {
                let d = xj - xk;
                if d == 0.0 {
                    return Err(Error::DuplicateNode(xj));
                }
                prod *= d;
            }
        }
        weights.push(1.0 / prod);
    }
    Ok(weights)
}

fn barycentric_eval(nodes: &[f64], samples: &[f64], weights: &[f64], x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&xj, &yj), &wj) in nodes.iter().zip(samples).zip(weights) {
        let d = x - xj;
        if d == 0.0 {
            return yj;
        }
        let t = wj / d;
        num += t * yj;
        den += t;
    }
    num / den
}

/// A Lagrange interpolant prepared once and evaluated many times.
#[derive(Debug, Clone)]
pub struct Lagrange {
    nodes: Vec<f64>,
    samples: Vec<f64>,
    weights: Vec<f64>,
}

impl Lagrange {
    pub fn new(nodes: &[f64], samples: &[f64]) -> Result<Self> {
        if nodes.len() != samples.len() {
            return Err(Error::LengthMismatch {
                expected: nodes.len(),
                actual: samples.len(),
            });
        }
        if nodes.is_empty() {
            return Err(Error::InvalidParameter {
                field: "nodes",
                reason: "need at least one node".into(),
            });
        }
        Ok(Lagrange {
            weights: barycentric_weights(nodes)?,
            nodes: nodes.to_vec(),
            samples: samples.to_vec(),
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        barycentric_eval(&self.nodes, &self.samples, &self.weights, x)
    }
}

/// Value at `x` of the unique degree-`(n−1)` polynomial through the points.
/// Exact at the nodes.
pub fn lagrange_interpolate(nodes: &[f64], samples: &[f64], x: f64) -> Result<f64> {
    Ok(Lagrange::new(nodes, samples)?.eval(x))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub scheme: Scheme,
    pub n_points: usize,
    pub max_abs_error: f64,
    pub normalizer: f64,
    pub relative_error_percent: f64,
    pub grid_density: usize,
}

impl ErrorReport {
    pub const CSV_HEADER: &'static str =
        "signal,scheme,n_points,max_abs_error,relative_error_percent";

    pub fn csv_row(&self, signal: &SignalSpec) -> String {
        format!(
            "{},{},{},{:e},{}",
            csv_field(&signal.label()),
            self.scheme,
            self.n_points,
            self.max_abs_error,
            self.relative_error_percent
        )
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// An interpolant built by either scheme from `n_points` samples of `signal`.
pub fn build_interpolant(
    signal: &SignalSpec,
    scheme: Scheme,
    n_points: usize,
    interval: Interval,
) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
    if n_points == 0 {
        return Err(Error::InvalidParameter {
            field: "n_points",
            reason: "need at least one point".into(),
        });
    }
    match scheme {
        Scheme::Chebyshev => {
            let window = cheb_nodes(n_points - 1, interval);
            let coeffs = compute_coeffs(&window.sample(|x| signal.eval(x)), &window)?;
            Ok(Box::new(move |x| coeffs.interpolate(x)))
        }
        Scheme::Equispaced => {
            let window = EquispacedWindow::new(n_points, interval)?;
            let samples: Vec<f64> = window.nodes().iter().map(|&x| signal.eval(x)).collect();
            let lag = Lagrange::new(window.nodes(), &samples)?;
            Ok(Box::new(move |x| lag.eval(x)))
        }
    }
}

/// Peak deviation between `signal` and its interpolant on a uniform grid.
pub fn measure_error(
    signal: &SignalSpec,
    scheme: Scheme,
    n_points: usize,
    interval: Interval,
    grid_density: usize,
) -> Result<ErrorReport> {
    if n_points < 2 {
        return Err(Error::InvalidParameter {
            field: "n_points",
            reason: format!("must be at least 2, got {n_points}"),
        });
    }
    if grid_density < MIN_GRID_DENSITY {
        return Err(Error::InvalidParameter {
            field: "grid_density",
            reason: format!("must be at least {MIN_GRID_DENSITY}, got {grid_density}"),
        });
    }
    let interp = build_interpolant(signal, scheme, n_points, interval)?;
    let mut max_abs_error: f64 = 0.0;
    let mut normalizer: f64 = 0.0;
    for x in interval.linspace(grid_density) {
        let y = signal.eval(x);
        max_abs_error = max_abs_error.max((interp(x) - y).abs());
        normalizer = normalizer.max(y.abs());
    }
    let relative_error_percent = if max_abs_error == 0.0 {
        0.0
    } else {
        100.0 * max_abs_error / normalizer
    };
    Ok(ErrorReport {
        scheme,
        n_points,
        max_abs_error,
        normalizer,
        relative_error_percent,
        grid_density,
    })
}

/// Outcome of a point-count search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MinPoints {
    Reached { n_points: usize },
    NotReached { n_max: usize },
}

impl MinPoints {
    pub fn points(&self) -> Option<usize> {
        match self {
            MinPoints::Reached { n_points } => Some(*n_points),
            MinPoints::NotReached { .. } => None,
        }
    }
}

impl fmt::Display for MinPoints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinPoints::Reached { n_points } => write!(f, "{n_points}"),
            MinPoints::NotReached { n_max } => write!(f, "not reached within {n_max} points"),
        }
    }
}

/// Smallest point count in `2..=n_max` whose error is strictly below
/// `target_percent`. Scans linearly since equispaced errors are not monotone
/// in the point count.
pub fn min_points_for_error(
    signal: &SignalSpec,
    scheme: Scheme,
    target_percent: f64,
    interval: Interval,
    n_max: usize,
) -> Result<MinPoints> {
    if target_percent.is_nan() || target_percent <= 0.0 {
        return Err(Error::InvalidParameter {
            field: "error_target_percent",
            reason: format!("must be positive, got {target_percent}"),
        });
    }
    if n_max < 2 {
        return Err(Error::InvalidParameter {
            field: "n_max",
            reason: format!("must be at least 2, got {n_max}"),
        });
    }
    for n in 2..=n_max {
        let report = measure_error(signal, scheme, n, interval, DEFAULT_GRID_DENSITY)?;
        if report.relative_error_percent < target_percent {
            return Ok(MinPoints::Reached { n_points: n });
        }
    }
    Ok(MinPoints::NotReached { n_max })
}
