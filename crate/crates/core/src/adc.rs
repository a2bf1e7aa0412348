//! Flash/SAR hybrid sampling front end.
//!
//! Chebyshev sampling instants are irregular: the gap between neighbouring
//! nodes grows towards the middle of the window. The hybrid unit hands the
//! samples that sit between two long gaps to a slow low-power SAR converter
//! and keeps the rest on the flash converter. Power is counted in comparator
//! firings (1 au each): a thermometric flash fires `2^b` comparators per
//! sample, a SAR performs `b` sequential comparisons.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::cheb::{cheb_nodes, ChebyshevWindow, Interval};
use crate::error::{Error, Result};

/// Slack added before flooring a gap ratio, so ratios that are integers in
/// exact arithmetic (e.g. `sin(π/2)/sin(π/6) = 2`) are not rounded down.
const FLOOR_SLACK: f64 = 1e-9;

/// Inter-sample gaps of one window, in units of the smallest gap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingTimeline {
    window: ChebyshevWindow,
    gaps: Vec<f64>,
}

impl SamplingTimeline {
    pub fn window(&self) -> &ChebyshevWindow {
        &self.window
    }

    /// `gap[k-1] = sin(kc)/sin(c)` with `c = π/(N+1)`, `k = 1..N`.
    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    /// Sampling instants in flash-period units, first sample at 0.
    pub fn instants(&self) -> Vec<f64> {
        let mut t = 0.0;
        std::iter::once(0.0)
            .chain(self.gaps.iter().map(|g| {
                t += g;
                t
            }))
            .collect()
    }

    pub fn sample_count(&self) -> usize {
        self.gaps.len() + 1
    }

    /// Gap preceding sample `i`; zero for the first sample.
    fn gap_before(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.gaps[i - 1]
        }
    }

    /// Gap following sample `i`; zero for the last sample.
    fn gap_after(&self, i: usize) -> f64 {
        self.gaps.get(i).copied().unwrap_or(0.0)
    }
}

/// Builds the gap list for a window of `N + 1` Chebyshev samples.
///
/// Adjacent nodes differ by `2 sin(kc) sin(c/2)`, so normalizing by the
/// outermost gap leaves `sin(kc)/sin(c)`.
pub fn build_timeline(degree: usize) -> Result<SamplingTimeline> {
    if degree == 0 {
        return Err(Error::InvalidParameter {
            field: "degree",
            reason: "a single-sample window has no gaps".into(),
        });
    }
    let c = PI / (degree + 1) as f64;
    let gaps = (1..=degree)
        .map(|k| (k as f64 * c).sin() / c.sin())
        .collect();
    Ok(SamplingTimeline {
        window: cheb_nodes(degree, Interval::UNIT),
        gaps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Converter {
    Flash,
    Sar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitPolicy {
    /// SAR only when the floored gaps on both sides reach `t_sar`.
    #[default]
    BothAdjacent,
    /// SAR when the floored gap before the sample reaches `t_sar`.
    PrecedingGapOnly,
    /// Walks the timeline and hands a sample to the SAR whenever the SAR has
    /// finished its previous conversion and the new one ends inside the window.
    GreedyNonoverlap,
}

impl SplitPolicy {
    pub fn as_str(&self) -> &'static str {
        match self {
            SplitPolicy::BothAdjacent => "both_adjacent",
            SplitPolicy::PrecedingGapOnly => "preceding_gap_only",
            SplitPolicy::GreedyNonoverlap => "greedy_nonoverlap",
        }
    }
}

impl fmt::Display for SplitPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SplitPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "both_adjacent" => Ok(SplitPolicy::BothAdjacent),
            "preceding_gap_only" => Ok(SplitPolicy::PrecedingGapOnly),
            "greedy_nonoverlap" => Ok(SplitPolicy::GreedyNonoverlap),
            other => Err(Error::UnknownTag {
                kind: "split policy",
                value: other.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdcSplit {
    pub assignments: Vec<Converter>,
    pub a_flash: usize,
    pub a_sar: usize,
    pub t_sar: f64,
    pub policy: SplitPolicy,
}

impl AdcSplit {
    /// A split with the given counts and no timeline behind it.
    pub fn from_counts(a_flash: usize, a_sar: usize) -> Self {
        let mut assignments = vec![Converter::Flash; a_flash];
        assignments.extend(std::iter::repeat_n(Converter::Sar, a_sar));
        AdcSplit {
            assignments,
            a_flash,
            a_sar,
            t_sar: 0.0,
            policy: SplitPolicy::default(),
        }
    }

    pub fn sar_indices(&self) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == Converter::Sar)
            .map(|(i, _)| i)
            .collect()
    }
}

fn floored(gap: f64) -> f64 {
    (gap + FLOOR_SLACK).floor()
}

/// Assigns every sample of the window to a converter. The first and last
/// samples always go to the flash converter.
pub fn split_samples(timeline: &SamplingTimeline, t_sar: f64, policy: SplitPolicy) -> Result<AdcSplit> {
    if t_sar.is_nan() || t_sar < 0.0 {
        return Err(Error::InvalidParameter {
            field: "t_sar",
            reason: format!("must be non-negative, got {t_sar}"),
        });
    }
    let n = timeline.sample_count();
    let mut assignments = vec![Converter::Flash; n];
    let interior = 1..n.saturating_sub(1);
    match policy {
        SplitPolicy::BothAdjacent => {
            for i in interior {
                if floored(timeline.gap_before(i)) >= t_sar && floored(timeline.gap_after(i)) >= t_sar {
                    assignments[i] = Converter::Sar;
                }
            }
        }
        SplitPolicy::PrecedingGapOnly => {
            for i in interior {
                if floored(timeline.gap_before(i)) >= t_sar {
                    assignments[i] = Converter::Sar;
                }
            }
        }
        SplitPolicy::GreedyNonoverlap => {
            let instants = timeline.instants();
            let window_end = instants[n - 1];
            let mut sar_free_at = f64::NEG_INFINITY;
            for i in interior {
                let fits = instants[i] + t_sar <= window_end + FLOOR_SLACK;
                if fits && instants[i] + FLOOR_SLACK >= sar_free_at {
                    assignments[i] = Converter::Sar;
                    sar_free_at = instants[i] + t_sar;
                }
            }
        }
    }
    let a_sar = assignments.iter().filter(|c| **c == Converter::Sar).count();
    Ok(AdcSplit {
        assignments,
        a_flash: n - a_sar,
        a_sar,
        t_sar,
        policy,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerReport {
    pub bits: u32,
    pub flash_comparisons_per_sample: u64,
    pub sar_comparisons_per_sample: u64,
    pub total_au: u64,
    pub baseline_au: u64,
    pub savings_percent: f64,
}

/// Comparator-count energy of the hybrid split against a flash-only
/// equispaced front end taking `baseline_points` samples.
pub fn power_report(split: &AdcSplit, bits: u32, baseline_points: usize) -> Result<PowerReport> {
    if !(1..=62).contains(&bits) {
        return Err(Error::InvalidParameter {
            field: "bits",
            reason: format!("must be in 1..=62, got {bits}"),
        });
    }
    if baseline_points == 0 {
        return Err(Error::InvalidParameter {
            field: "baseline_points",
            reason: "must be at least 1".into(),
        });
    }
    let flash = 1u64 << bits;
    let sar = u64::from(bits);
    let total_au = split.a_flash as u64 * flash + split.a_sar as u64 * sar;
    let baseline_au = baseline_points as u64 * flash;
    let savings_percent = 100.0 * (baseline_au as f64 - total_au as f64) / baseline_au as f64;
    Ok(PowerReport {
        bits,
        flash_comparisons_per_sample: flash,
        sar_comparisons_per_sample: sar,
        total_au,
        baseline_au,
        savings_percent,
    })
}
