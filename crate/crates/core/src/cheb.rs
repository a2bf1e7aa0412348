//! Chebyshev nodes, polynomials and the DCT route to expansion coefficients.
//!
//! All internal arithmetic happens on the canonical interval `[-1, 1]`. An
//! [`Interval`] carries the affine map to and from the user's domain, so a
//! [`ChebyshevWindow`] on `[lo, hi]` holds the mapped node positions while the
//! coefficient and polynomial machinery only ever sees normalized arguments.
//!
//! Sample ordering: windows list their nodes in ascending order and every
//! routine that consumes samples expects them in that same order. The sign
//! factor `(-1)^j` in the coefficient matrix is what makes the ascending
//! convention produce the expansion of the sampled function (a descending
//! order would flip the sign of every odd coefficient).

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[derive(Deserialize)]
struct RawInterval {
    lo: f64,
    hi: f64,
}

impl TryFrom<RawInterval> for Interval {
    type Error = Error;

    fn try_from(raw: RawInterval) -> Result<Self> {
        Interval::new(raw.lo, raw.hi)
    }
}

impl Interval {
    /// The canonical interval `[-1, 1]`.
    pub const UNIT: Interval = Interval { lo: -1.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        // NaN fails the comparison as well.
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Maps `x` in `[lo, hi]` to `t = (2x - lo - hi) / (hi - lo)` in `[-1, 1]`.
    pub fn to_unit(&self, x: f64) -> f64 {
        (2.0 * x - self.lo - self.hi) / (self.hi - self.lo)
    }

    /// Inverse of [`Interval::to_unit`].
    pub fn from_unit(&self, t: f64) -> f64 {
        0.5 * (self.lo + self.hi) + 0.5 * (self.hi - self.lo) * t
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `count` evenly spaced points including both endpoints. A single point
    /// sits at the midpoint.
    pub fn linspace(&self, count: usize) -> Vec<f64> {
        match count {
            0 => Vec::new(),
            1 => vec![0.5 * (self.lo + self.hi)],
            _ => {
                let step = self.width() / (count - 1) as f64;
                (0..count)
                    .map(|i| {
                        if i == count - 1 {
                            self.hi
                        } else {
                            self.lo + i as f64 * step
                        }
                    })
                    .collect()
            }
        }
    }
}

impl Default for Interval {
    fn default() -> Self {
        Interval::UNIT
    }
}

/// The roots of `T_{N+1}` on [-1, 1], ascending. Index `m` holds the root with
/// `k = N + 1 - m` in the usual descending enumeration.
fn unit_nodes(degree: usize) -> Vec<f64> {
    let n = (degree + 1) as f64;
    (1..=degree + 1)
        .rev()
        .map(|k| {
            let x = ((2 * k - 1) as f64 * PI / (2.0 * n)).cos();
            // cos(pi/2) is 6e-17 in floating point; the middle node of an odd
            // window is exactly zero.
            if 2 * k - 1 == degree + 1 {
                0.0
            } else {
                x
            }
        })
        .collect()
}

/// One block of `N + 1` Chebyshev nodes mapped onto an interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChebyshevWindow {
    degree: usize,
    nodes: Vec<f64>,
    interval: Interval,
}

impl ChebyshevWindow {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of samples in the window (`N + 1`).
    pub fn len(&self) -> usize {
        self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node positions in the window's interval, ascending.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Node positions on [-1, 1], ascending.
    pub fn unit_nodes(&self) -> Vec<f64> {
        unit_nodes(self.degree)
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    /// Evaluates `f` at every node, in node order.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }
}

/// Builds the window of `degree + 1` Chebyshev nodes on `interval`.
pub fn cheb_nodes(degree: usize, interval: Interval) -> ChebyshevWindow {
    let nodes = unit_nodes(degree)
        .into_iter()
        .map(|t| interval.from_unit(t))
        .collect();
    ChebyshevWindow {
        degree,
        nodes,
        interval,
    }
}

/// `T_n(x)` by the three-term recurrence. Defined for any real `x`.
pub fn cheb_eval(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    match n {
        0 => prev,
        1 => cur,
        _ => {
            for _ in 1..n {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `T̄_n(x)`: `T_0` scaled by `1/√2`, every other degree unchanged.
///
/// The recurrence always runs on the unnormalized values; only the `n = 0`
/// output is scaled. Feeding `T̄_0` back into the recurrence would give the
/// wrong `T̄_2`.
pub fn cheb_eval_normalized(n: usize, x: f64) -> f64 {
    if n == 0 {
        FRAC_1_SQRT_2 * cheb_eval(0, x)
    } else {
        cheb_eval(n, x)
    }
}

/// Weight `μ_j` of row `j` of the coefficient matrix for a window of `N + 1`
/// samples.
pub fn dct_weight(j: usize, degree: usize) -> f64 {
    let n1 = (degree + 1) as f64;
    if j == 0 {
        SQRT_2 / n1
    } else if j % 2 == 0 {
        2.0 / n1
    } else {
        -2.0 / n1
    }
}

/// `cos(jπ(2k+1) / (2(N+1)))`, the DCT-II kernel.
fn dct_kernel(j: usize, k: usize, degree: usize) -> f64 {
    (j as f64 * PI * (2 * k + 1) as f64 / (2.0 * (degree + 1) as f64)).cos()
}

/// The `(N+1) × (N+1)` matrix taking ascending-node samples to the
/// coefficients `c_0..c_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    degree: usize,
    entries: Vec<f64>,
}

impl CoefficientMatrix {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn size(&self) -> usize {
        self.degree + 1
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.entries[j * self.size() + k]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let n = self.size();
        &self.entries[j * n..(j + 1) * n]
    }

    /// `C · samples`, accumulated in sample order.
    pub fn apply(&self, samples: &[f64]) -> Result<Vec<f64>> {
        if samples.len() != self.size() {
            return Err(Error::LengthMismatch {
                expected: self.size(),
                actual: samples.len(),
            });
        }
        Ok((0..self.size())
            .map(|j| {
                self.row(j)
                    .iter()
                    .zip(samples)
                    .fold(0.0, |acc, (c, f)| acc + c * f)
            })
            .collect())
    }
}

pub fn dct_matrix(degree: usize) -> CoefficientMatrix {
    let n = degree + 1;
    let mut entries = Vec::with_capacity(n * n);
    for j in 0..n {
        let mu = dct_weight(j, degree);
        for k in 0..n {
            entries.push(mu * dct_kernel(j, k, degree));
        }
    }
    CoefficientMatrix { degree, entries }
}

/// Expansion coefficients `c_0..c_N` of the interpolant over one window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientSet {
    coeffs: Vec<f64>,
    #[serde(flatten)]
    window: ChebyshevWindow,
}

impl CoefficientSet {
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn window(&self) -> &ChebyshevWindow {
        &self.window
    }

    pub fn degree(&self) -> usize {
        self.window.degree
    }

    /// `Σ c_i T̄_i(t)` with `t` the normalized image of `x`. The polynomial
    /// values come from a running recurrence rather than Clenshaw summation.
    /// Points outside the window interval are extrapolated; check
    /// [`Interval::contains`] first if that matters.
    pub fn interpolate(&self, x: f64) -> f64 {
        let t = self.window.interval.to_unit(x);
        let mut acc = self.coeffs[0] * FRAC_1_SQRT_2;
        let (mut prev, mut cur) = (1.0, t);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            if i > 1 {
                let next = 2.0 * t * cur - prev;
                prev = cur;
                cur = next;
            }
            acc += c * cur;
        }
        acc
    }

    /// Coefficients of the same polynomial in the power basis of the
    /// normalized variable, highest power first.
    pub fn power_coefficients(&self) -> Vec<f64> {
        let basis = power_basis_matrix(self.degree());
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        for (i, c) in self.coeffs.iter().enumerate() {
            let scale = if i == 0 { c * FRAC_1_SQRT_2 } else { *c };
            for (o, b) in out.iter_mut().zip(basis.row(i)) {
                *o += scale * b;
            }
        }
        out
    }
}

/// `c = C · samples` for samples taken at the window's nodes in ascending
/// order.
pub fn compute_coeffs(samples: &[f64], window: &ChebyshevWindow) -> Result<CoefficientSet> {
    let coeffs = dct_matrix(window.degree).apply(samples)?;
    Ok(CoefficientSet {
        coeffs,
        window: window.clone(),
    })
}

/// Cardinal function `φ_i(t) = Σ_k μ_k T̄_k(t) cos(kπ(2i+1)/(2(N+1)))` on
/// [-1, 1]. `i` follows the ascending node order.
pub fn ctif(i: usize, t: f64, degree: usize) -> Result<f64> {
    if i > degree {
        return Err(Error::IndexOutOfRange { index: i, degree });
    }
    let mut acc = dct_weight(0, degree) * FRAC_1_SQRT_2;
    let (mut prev, mut cur) = (1.0, t);
    for k in 1..=degree {
        if k > 1 {
            let next = 2.0 * t * cur - prev;
            prev = cur;
            cur = next;
        }
        acc += dct_weight(k, degree) * cur * dct_kernel(k, i, degree);
    }
    Ok(acc)
}

/// Time-domain interpolation `Σ f(x_i) φ_i(x)`, skipping the explicit
/// coefficient step.
pub fn interpolate_ctif(window: &ChebyshevWindow, samples: &[f64], x: f64) -> Result<f64> {
    if samples.len() != window.len() {
        return Err(Error::LengthMismatch {
            expected: window.len(),
            actual: samples.len(),
        });
    }
    let t = window.interval.to_unit(x);
    samples
        .iter()
        .enumerate()
        .try_fold(0.0, |acc, (i, f)| Ok(acc + f * ctif(i, t, window.degree)?))
}

/// Coefficients of `T_0..T_N` on the powers `x^N..x^0`.
///
/// Intended for small-degree cross-checks; the power basis is badly
/// conditioned as `N` grows.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerBasisMatrix {
    degree: usize,
    rows: Vec<Vec<f64>>,
}

impl PowerBasisMatrix {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Horner evaluation of row `i` as a polynomial in `x`.
    pub fn eval_row(&self, i: usize, x: f64) -> f64 {
        self.rows[i].iter().fold(0.0, |acc, c| acc * x + c)
    }
}

pub fn power_basis_matrix(degree: usize) -> PowerBasisMatrix {
    let n = degree + 1;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    // Column p holds the coefficient of x^(N - p).
    let mut t0 = vec![0.0; n];
    t0[n - 1] = 1.0;
    rows.push(t0);
    if n > 1 {
        let mut t1 = vec![0.0; n];
        t1[n - 2] = 1.0;
        rows.push(t1);
    }
    for i in 2..n {
        let (r1, r0) = (&rows[i - 1], &rows[i - 2]);
        let mut next = vec![0.0; n];
        for p in 0..n {
            let shifted = if p + 1 < n { r1[p + 1] } else { 0.0 };
            next[p] = 2.0 * shifted - r0[p];
        }
        rows.push(next);
    }
    PowerBasisMatrix { degree, rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn nodes_small_degrees() {
        let w = cheb_nodes(0, Interval::UNIT);
        assert_eq!(w.nodes(), &[0.0]);

        let w = cheb_nodes(1, Interval::UNIT);
        let h = SQRT_2 / 2.0;
        assert!(close(w.nodes()[0], -h, 1e-15));
        assert!(close(w.nodes()[1], h, 1e-15));
    }

    #[test]
    fn largest_node_degree_seven() {
        let w = cheb_nodes(7, Interval::UNIT);
        assert_eq!(w.len(), 8);
        assert!(close(w.nodes()[7], (PI / 16.0).cos(), 1e-15));
        assert!(close(w.nodes()[7], 0.980785, 1e-6));
    }

    #[test]
    fn nodes_mapped_into_interval() {
        let iv = Interval::new(0.0, 2.0).unwrap();
        let w = cheb_nodes(7, iv);
        let unit = cheb_nodes(7, Interval::UNIT);
        for (x, t) in w.nodes().iter().zip(unit.nodes()) {
            assert!(close(*x, t + 1.0, 1e-15));
            assert!(*x > 0.0 && *x < 2.0);
        }
        assert!(w.nodes().windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn invalid_interval_rejected() {
        assert!(matches!(
            Interval::new(1.0, 1.0),
            Err(Error::InvalidInterval { .. })
        ));
        assert!(Interval::new(2.0, -1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        let bad: std::result::Result<Interval, _> = serde_json::from_str(r#"{"lo":3,"hi":1}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn eval_values() {
        assert_eq!(cheb_eval(0, 0.3), 1.0);
        assert_eq!(cheb_eval(2, 0.5), -0.5);
        // oracle: cos(5 acos 0.3)
        let expected = (5.0 * 0.3f64.acos()).cos();
        assert!(close(cheb_eval(5, 0.3), expected, 1e-14));
        assert!(close(cheb_eval(5, 0.3), 0.998880, 1e-6));
        // outside [-1, 1]: T_3(2) = 4*8 - 3*2
        assert_eq!(cheb_eval(3, 2.0), 26.0);
    }

    #[test]
    fn normalized_eval() {
        assert!(close(cheb_eval_normalized(0, 0.42), FRAC_1_SQRT_2, 1e-16));
        assert_eq!(cheb_eval_normalized(1, 0.9), 0.9);
        // not 2 * 0.5 * 0.5 - 1/sqrt(2)
        assert_eq!(cheb_eval_normalized(2, 0.5), -0.5);
    }

    #[test]
    fn dct_matrix_small() {
        let c = dct_matrix(0);
        assert!(close(c.get(0, 0), SQRT_2, 1e-15));

        let c = dct_matrix(1);
        let h = SQRT_2 / 2.0;
        assert!(close(c.get(0, 0), h, 1e-15));
        assert!(close(c.get(0, 1), h, 1e-15));
        assert!(close(c.get(1, 0), -h, 1e-15));
        assert!(close(c.get(1, 1), h, 1e-15));
    }

    #[test]
    fn dct_row_zero_constant() {
        for n in 0..12 {
            let c = dct_matrix(n);
            let expected = SQRT_2 / (n + 1) as f64;
            assert!(c.row(0).iter().all(|&v| close(v, expected, 1e-15)));
        }
    }

    #[test]
    fn constant_samples_give_single_coefficient() {
        for n in 0..10 {
            let w = cheb_nodes(n, Interval::UNIT);
            let cs = compute_coeffs(&vec![1.0; n + 1], &w).unwrap();
            assert!(close(cs.coeffs()[0], SQRT_2, 1e-14));
            assert!(cs.coeffs()[1..].iter().all(|c| c.abs() < 1e-14));
            assert!(close(cs.interpolate(0.3), 1.0, 1e-14));
        }
    }

    #[test]
    fn identity_signal_degree_one() {
        let w = cheb_nodes(1, Interval::UNIT);
        let cs = compute_coeffs(&w.sample(|x| x), &w).unwrap();
        assert!(close(cs.coeffs()[0], 0.0, 1e-15));
        assert!(close(cs.coeffs()[1], 1.0, 1e-15));
        assert!(close(cs.interpolate(0.25), 0.25, 1e-15));
    }

    #[test]
    fn descending_order_flips_odd_coefficients() {
        let w = cheb_nodes(1, Interval::UNIT);
        let mut samples = w.sample(|x| x);
        samples.reverse();
        let cs = compute_coeffs(&samples, &w).unwrap();
        assert!(close(cs.coeffs()[1], -1.0, 1e-15));
    }

    #[test]
    fn degree_zero_is_constant() {
        let w = cheb_nodes(0, Interval::UNIT);
        let cs = compute_coeffs(&[4.5], &w).unwrap();
        for x in [-1.0, -0.2, 0.7, 1.0] {
            assert!(close(cs.interpolate(x), 4.5, 1e-14));
        }
    }

    #[test]
    fn length_mismatch() {
        let w = cheb_nodes(3, Interval::UNIT);
        assert_eq!(
            compute_coeffs(&[1.0, 2.0], &w),
            Err(Error::LengthMismatch {
                expected: 4,
                actual: 2
            })
        );
        assert!(interpolate_ctif(&w, &[1.0; 5], 0.0).is_err());
    }

    #[test]
    fn ctif_matches_matrix_column() {
        let c = dct_matrix(7);
        let expected: f64 = (0..8).map(|k| c.get(k, 3) * cheb_eval_normalized(k, 0.2)).sum();
        assert!(close(ctif(3, 0.2, 7).unwrap(), expected, 1e-14));
        assert!(matches!(
            ctif(8, 0.2, 7),
            Err(Error::IndexOutOfRange { index: 8, degree: 7 })
        ));
    }

    #[test]
    fn ctif_cardinal_at_nodes() {
        let w = cheb_nodes(7, Interval::UNIT);
        for (j, &x) in w.nodes().iter().enumerate() {
            for i in 0..8 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(close(ctif(i, x, 7).unwrap(), expect, 1e-12));
            }
        }
    }

    #[test]
    fn ctif_identity_signal() {
        let w = cheb_nodes(1, Interval::UNIT);
        let v = interpolate_ctif(&w, &w.sample(|x| x), -0.4).unwrap();
        assert!(close(v, -0.4, 1e-15));
        let v = interpolate_ctif(&w, &[2.5, 2.5], 0.8).unwrap();
        assert!(close(v, 2.5, 1e-14));
    }

    #[test]
    fn power_basis_rows() {
        let t = power_basis_matrix(4);
        assert_eq!(t.row(0), &[0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(t.row(1), &[0.0, 0.0, 0.0, 1.0, 0.0]);
        assert_eq!(t.row(2), &[0.0, 0.0, 2.0, 0.0, -1.0]);
        assert_eq!(t.row(3), &[0.0, 4.0, 0.0, -3.0, 0.0]);
        assert_eq!(t.row(4), &[8.0, 0.0, -8.0, 0.0, 1.0]);
        assert_eq!(power_basis_matrix(0).rows(), &[vec![1.0]]);
    }

    #[test]
    fn power_basis_leading_coefficient() {
        let t = power_basis_matrix(10);
        for i in 1..=10 {
            let lead = t.row(i).iter().find(|v| **v != 0.0).copied().unwrap();
            assert_eq!(lead, 2f64.powi(i as i32 - 1));
        }
    }

    #[test]
    fn power_basis_matches_recurrence() {
        let t = power_basis_matrix(8);
        for i in 0..=8 {
            assert!(close(t.eval_row(i, 0.37), cheb_eval(i, 0.37), 1e-12));
        }
    }

    #[test]
    fn linspace_endpoints() {
        let iv = Interval::new(-2.0, 3.0).unwrap();
        let xs = iv.linspace(6);
        assert_eq!(xs, vec![-2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        assert_eq!(iv.linspace(1), vec![0.5]);
    }

    #[test]
    fn window_json_fields() {
        let w = cheb_nodes(1, Interval::UNIT);
        let cs = compute_coeffs(&[1.0, 1.0], &w).unwrap();
        let v: serde_json::Value = serde_json::to_value(&cs).unwrap();
        for key in ["degree", "nodes", "coeffs", "interval"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["interval"]["lo"], -1.0);
        assert_eq!(v["interval"]["hi"], 1.0);
    }
}
