//! Cycle-accurate model of the word-serial Chebyshev interpolation datapath.
//!
//! Three stages share one clock. `W = N + 1` is the window size.
//!
//! * **Coefficient array**: `W` MAC cells in a line. Sample `k` enters cell 0
//!   on cycle `k` and moves one cell per cycle, so cell `j` performs
//!   `c_j += C[j][k]·f_k` on cycle `j + k`. This is the dependence graph
//!   `(j, k)` projected with `[1 0]` (cell = `j`) and scheduled with `[1 1]`
//!   (cycle = `j + k`). Cell `j` holds a finished `c_j` from cycle `j + W`.
//! * **Evaluator**: `W` multiply-add units. A query occupies one unit for `W`
//!   consecutive cycles and produces `T̄_0(x)..T̄_N(x)`, one per cycle. The
//!   unit's multiplexers select the operands per step: the `1/√2` scale of
//!   `T_0` on the first cycle, `x·T_0 − 0` on the second, and the recurrence
//!   `2x·T_{i−1} − T_{i−2}` (IIR mode) afterwards.
//! * **FIR**: `W` MAC units, one paired with each evaluator unit. The FIR
//!   unit consumes the evaluator value one cycle after it is produced and
//!   accumulates `c_i·T̄_i(x)`. The finished sum is registered and appears on
//!   the output port on the following cycle.
//!
//! Queries for a window are dispatched one per cycle starting on the cycle
//! the last sample arrives, which makes every coefficient available exactly
//! when the FIR stage first needs it. The first output therefore appears
//! `2W` cycles after the first sample.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::ser::{Serialize, Serializer};
use serde::Serialize as DeriveSerialize;

use crate::cheb::{dct_matrix, Interval};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct SystolicConfig {
    pub window_size: usize,
    /// Processing elements per stage.
    pub mac_count: usize,
    pub schedule_vector: [i64; 2],
    pub projection_vector: [i64; 2],
    /// Domain of the window; query points are mapped to [-1, 1] at the port.
    pub interval: Interval,
}

impl SystolicConfig {
    pub fn proposed(window_size: usize) -> Self {
        SystolicConfig {
            window_size,
            mac_count: window_size,
            schedule_vector: [1, 1],
            projection_vector: [1, 0],
            interval: Interval::UNIT,
        }
    }

    pub fn with_interval(mut self, interval: Interval) -> Self {
        self.interval = interval;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_size == 0 {
            return Err(Error::InvalidParameter {
                field: "window_size",
                reason: "must be at least 1".into(),
            });
        }
        if self.mac_count != self.window_size {
            return Err(Error::InvalidParameter {
                field: "mac_count",
                reason: format!("must equal window_size {}, got {}", self.window_size, self.mac_count),
            });
        }
        if self.schedule_vector != [1, 1] {
            return Err(Error::InvalidParameter {
                field: "schedule_vector",
                reason: format!("only [1, 1] is supported, got {:?}", self.schedule_vector),
            });
        }
        if self.projection_vector != [1, 0] {
            return Err(Error::InvalidParameter {
                field: "projection_vector",
                reason: format!("only [1, 0] is supported, got {:?}", self.projection_vector),
            });
        }
        Ok(())
    }

    /// Cell that handles dependence-graph node `(j, k)`.
    pub fn processor(&self, j: usize, k: usize) -> usize {
        (self.projection_vector[0] * j as i64 + self.projection_vector[1] * k as i64) as usize
    }

    /// Cycle, relative to the window start, at which node `(j, k)` fires.
    pub fn schedule(&self, j: usize, k: usize) -> u64 {
        (self.schedule_vector[0] * j as i64 + self.schedule_vector[1] * k as i64) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, DeriveSerialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Coefficient,
    Evaluator,
    Fir,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Stage::Coefficient, Stage::Evaluator, Stage::Fir];

    fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Coefficient => "coefficient",
            Stage::Evaluator => "evaluator",
            Stage::Fir => "fir",
        }
    }
}

/// Operand selection of a unit on a given cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, DeriveSerialize)]
#[serde(rename_all = "snake_case")]
pub enum MuxState {
    Idle,
    /// Accumulator reset: `acc = a·b`.
    Load,
    /// `acc += a·b`.
    Accumulate,
    /// Evaluator emits `(1/√2)·T_0`.
    InjectT0,
    /// Evaluator emits `x·T_0 − 0`.
    InjectX,
    /// Evaluator runs the recurrence.
    Iir,
}

impl MuxState {
    pub fn as_str(&self) -> &'static str {
        match self {
            MuxState::Idle => "idle",
            MuxState::Load => "load",
            MuxState::Accumulate => "accumulate",
            MuxState::InjectT0 => "inject_t0",
            MuxState::InjectX => "inject_x",
            MuxState::Iir => "iir",
        }
    }
}

/// A processing element holding one accumulator.
#[derive(Debug, Clone, PartialEq)]
pub struct MacUnit {
    pub id: usize,
    pub state: f64,
    pub busy_this_cycle: bool,
}

impl MacUnit {
    fn new(id: usize) -> Self {
        MacUnit {
            id,
            state: 0.0,
            busy_this_cycle: false,
        }
    }

    /// One multiply-accumulate. A unit fires at most once per cycle.
    fn mac(&mut self, a: f64, b: f64, clear: bool) -> Result<f64> {
        if self.busy_this_cycle {
            return Err(Error::ScheduleViolation(format!("unit {} issued twice in one cycle", self.id)));
        }
        self.busy_this_cycle = true;
        self.state = if clear { a * b } else { self.state + a * b };
        Ok(self.state)
    }
}

/// Activity of one stage on one cycle.
#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct StageActivity {
    pub busy: Vec<bool>,
    pub mux: Vec<MuxState>,
}

impl StageActivity {
    fn idle(units: usize) -> Self {
        StageActivity {
            busy: vec![false; units],
            mux: vec![MuxState::Idle; units],
        }
    }

    fn mark(&mut self, unit: usize, mux: MuxState) {
        self.busy[unit] = true;
        self.mux[unit] = mux;
    }

    pub fn ops(&self) -> usize {
        self.busy.iter().filter(|b| **b).count()
    }
}

#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct CycleRecord {
    pub cycle: u64,
    pub stages: [StageActivity; 3],
}

impl CycleRecord {
    /// Multiply-accumulates issued across all stages.
    pub fn ops_issued(&self) -> usize {
        self.stages.iter().map(StageActivity::ops).sum()
    }

    pub fn stage(&self, stage: Stage) -> &StageActivity {
        &self.stages[stage.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, DeriveSerialize)]
#[serde(rename_all = "snake_case")]
pub enum DepKind {
    /// A sample moving from one coefficient cell to the next.
    SampleForward,
    /// A coefficient cell's accumulator feeding its next MAC.
    CoefficientAccumulate,
    /// A finished coefficient read by the FIR stage.
    CoefficientToFir,
    /// The evaluator's own feedback from one step to the next.
    Recurrence,
    EvaluatorToFir,
    FirAccumulate,
    FirToOutput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, DeriveSerialize)]
pub struct Dependence {
    pub producer_cycle: u64,
    pub consumer_cycle: u64,
    pub kind: DepKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, DeriveSerialize)]
pub struct InputEvent {
    pub cycle: u64,
    pub window: usize,
    pub sample_index: usize,
}

/// A coefficient cell reading a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, DeriveSerialize)]
pub struct SampleRead {
    pub cycle: u64,
    pub window: usize,
    pub sample_index: usize,
    pub unit: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, DeriveSerialize)]
pub struct OutputEvent {
    pub cycle: u64,
    pub window: usize,
    pub query_index: usize,
    pub query_x: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct SystolicTrace {
    pub window_size: usize,
    pub windows: usize,
    /// Queries served per window, in window order.
    pub queries_per_window: Vec<usize>,
    pub cycles: Vec<CycleRecord>,
    pub inputs: Vec<InputEvent>,
    pub sample_reads: Vec<SampleRead>,
    pub outputs: Vec<OutputEvent>,
    pub dependences: Vec<Dependence>,
    pub latency_cycles: u64,
}

impl SystolicTrace {
    /// `(query_x, value)` pairs in output order.
    pub fn output_values(&self) -> Vec<(f64, f64)> {
        self.outputs.iter().map(|o| (o.query_x, o.value)).collect()
    }

    pub fn peak_ops(&self, stage: Stage) -> usize {
        self.cycles.iter().map(|c| c.stage(stage).ops()).max().unwrap_or(0)
    }

    pub fn total_ops(&self, stage: Stage) -> usize {
        self.cycles.iter().map(|c| c.stage(stage).ops()).sum()
    }

    /// Busy fraction of all units of all stages over `cycles`, in percent.
    pub fn utilization(&self, cycles: std::ops::Range<u64>) -> f64 {
        let span: Vec<&CycleRecord> = self.cycles.iter().filter(|c| cycles.contains(&c.cycle)).collect();
        if span.is_empty() {
            return 0.0;
        }
        let busy: usize = span.iter().map(|c| c.ops_issued()).sum();
        100.0 * busy as f64 / (span.len() * 3 * self.window_size) as f64
    }

    pub const CSV_HEADER: &'static str = "cycle,stage,unit_id,busy,op_count,mux_state";

    /// One row per cycle, stage and unit.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for rec in &self.cycles {
            for stage in Stage::ALL {
                let act = rec.stage(stage);
                for (unit, (&busy, mux)) in act.busy.iter().zip(&act.mux).enumerate() {
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        rec.cycle,
                        stage.as_str(),
                        unit,
                        busy,
                        u8::from(busy),
                        mux.as_str()
                    ));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct SampleToken {
    window: usize,
    k: usize,
    value: f64,
}

#[derive(Debug, Clone, Copy)]
struct Coefficient {
    window: usize,
    value: f64,
    /// Cycle of the MAC that completed it.
    finished: u64,
}

#[derive(Debug, Clone, Copy)]
struct Query {
    window: usize,
    index: usize,
    x: f64,
    t: f64,
    eligible: u64,
}

#[derive(Debug, Clone, Copy)]
struct EvalJob {
    query: Query,
    step: usize,
    prev: f64,
    cur: f64,
}

/// A value on the evaluator→FIR register.
#[derive(Debug, Clone, Copy)]
struct PolyValue {
    query: Query,
    index: usize,
    value: f64,
    produced: u64,
}

#[derive(Debug, Clone, Copy)]
struct FinishedSum {
    query: Query,
    value: f64,
    produced: u64,
}

/// Simulates a single window. See [`simulate_stream`].
pub fn simulate_window(samples: &[f64], query_points: &[f64], config: &SystolicConfig) -> Result<SystolicTrace> {
    simulate_stream(&[samples.to_vec()], &[query_points.to_vec()], config)
}

/// Simulates back-to-back windows: window `w`'s samples arrive on cycles
/// `wW..wW+W−1` and its queries are served in order.
///
/// With more than one window every window may carry at most `W` queries,
/// since a window's coefficients are overwritten `W` cycles after they become
/// available.
pub fn simulate_stream(
    windows: &[Vec<f64>],
    queries: &[Vec<f64>],
    config: &SystolicConfig,
) -> Result<SystolicTrace> {
    config.validate()?;
    let w = config.window_size;
    if windows.len() != queries.len() {
        return Err(Error::LengthMismatch {
            expected: windows.len(),
            actual: queries.len(),
        });
    }
    if windows.is_empty() {
        return Err(Error::InvalidParameter {
            field: "windows",
            reason: "need at least one window".into(),
        });
    }
    for samples in windows {
        if samples.len() != w {
            return Err(Error::LengthMismatch {
                expected: w,
                actual: samples.len(),
            });
        }
    }
    if queries.iter().any(Vec::is_empty) {
        return Err(Error::EmptyQuerySet);
    }
    if windows.len() > 1 {
        if let Some(q) = queries.iter().find(|q| q.len() > w) {
            return Err(Error::InvalidParameter {
                field: "query_points",
                reason: format!("streamed windows take at most {w} queries each, got {}", q.len()),
            });
        }
    }

    let matrix = dct_matrix(w - 1);
    let mut pending: std::collections::VecDeque<Query> = queries
        .iter()
        .enumerate()
        .flat_map(|(win, qs)| {
            qs.iter().enumerate().map(move |(index, &x)| Query {
                window: win,
                index,
                x,
                t: config.interval.to_unit(x),
                eligible: (win * w + w - 1) as u64,
            })
        })
        .collect();
    let total_queries = pending.len();
    let total_samples = windows.len() * w;

    let mut coeff_cells: Vec<MacUnit> = (0..w).map(MacUnit::new).collect();
    let mut coeff_last_mac: Vec<Option<u64>> = vec![None; w];
    let mut pipe: Vec<Option<SampleToken>> = vec![None; w];
    let mut coeff_regs: Vec<Option<Coefficient>> = vec![None; w];

    let mut eval_units: Vec<Option<EvalJob>> = vec![None; w];
    let mut eval_regs: Vec<Option<PolyValue>> = vec![None; w];
    let mut fir_units: Vec<MacUnit> = (0..w).map(MacUnit::new).collect();
    let mut out_reg: Option<FinishedSum> = None;
    let mut next_unit = 0usize;

    let mut trace = SystolicTrace {
        window_size: w,
        windows: windows.len(),
        queries_per_window: queries.iter().map(Vec::len).collect(),
        cycles: Vec::new(),
        inputs: Vec::new(),
        sample_reads: Vec::new(),
        outputs: Vec::new(),
        dependences: Vec::new(),
        latency_cycles: 0,
    };

    let mut cycle: u64 = 0;
    while trace.outputs.len() < total_queries {
        let mut stages = [StageActivity::idle(w), StageActivity::idle(w), StageActivity::idle(w)];
        for unit in coeff_cells.iter_mut().chain(fir_units.iter_mut()) {
            unit.busy_this_cycle = false;
        }

        // Output port: the sum registered last cycle.
        if let Some(sum) = out_reg.take() {
            trace.dependences.push(Dependence {
                producer_cycle: sum.produced,
                consumer_cycle: cycle,
                kind: DepKind::FirToOutput,
            });
            trace.outputs.push(OutputEvent {
                cycle,
                window: sum.query.window,
                query_index: sum.query.index,
                query_x: sum.query.x,
                value: sum.value,
            });
        }

        // Coefficient array: shift the sample line, then every occupied cell fires.
        pipe.rotate_right(1);
        pipe[0] = None;
        let s = cycle as usize;
        if s < total_samples {
            let (win, k) = (s / w, s % w);
            pipe[0] = Some(SampleToken {
                window: win,
                k,
                value: windows[win][k],
            });
            trace.inputs.push(InputEvent {
                cycle,
                window: win,
                sample_index: k,
            });
        }
        let mut finished_coeffs = Vec::new();
        for (j, slot) in pipe.iter().enumerate() {
            let Some(tok) = slot else { continue };
            let j_cell = config.processor(j, tok.k);
            let due = (tok.window * w) as u64 + config.schedule(j, tok.k);
            if j_cell != j || due != cycle {
                return Err(Error::ScheduleViolation(format!(
                    "node ({j}, {}) fired on cell {j} cycle {cycle}, scheduled for cell {j_cell} cycle {due}",
                    tok.k
                )));
            }
            let clear = tok.k == 0;
            let acc = coeff_cells[j].mac(matrix.get(j, tok.k), tok.value, clear)?;
            stages[Stage::Coefficient.index()].mark(j, if clear { MuxState::Load } else { MuxState::Accumulate });
            trace.sample_reads.push(SampleRead {
                cycle,
                window: tok.window,
                sample_index: tok.k,
                unit: j,
            });
            if j > 0 {
                trace.dependences.push(Dependence {
                    producer_cycle: cycle - 1,
                    consumer_cycle: cycle,
                    kind: DepKind::SampleForward,
                });
            }
            if !clear {
                if let Some(p) = coeff_last_mac[j] {
                    trace.dependences.push(Dependence {
                        producer_cycle: p,
                        consumer_cycle: cycle,
                        kind: DepKind::CoefficientAccumulate,
                    });
                }
            }
            coeff_last_mac[j] = Some(cycle);
            if tok.k == w - 1 {
                finished_coeffs.push((
                    j,
                    Coefficient {
                        window: tok.window,
                        value: acc,
                        finished: cycle,
                    },
                ));
            }
        }

        // FIR: consume what the evaluator registered last cycle.
        let mut next_out = None;
        for (u, slot) in eval_regs.iter_mut().enumerate() {
            let Some(pv) = slot.take() else { continue };
            let coeff = match coeff_regs[pv.index] {
                Some(c) if c.window == pv.query.window => c,
                _ => {
                    return Err(Error::ScheduleViolation(format!(
                        "coefficient {} of window {} not available on cycle {cycle}",
                        pv.index, pv.query.window
                    )))
                }
            };
            let clear = pv.index == 0;
            let acc = fir_units[u].mac(coeff.value, pv.value, clear)?;
            stages[Stage::Fir.index()].mark(u, if clear { MuxState::Load } else { MuxState::Accumulate });
            trace.dependences.push(Dependence {
                producer_cycle: pv.produced,
                consumer_cycle: cycle,
                kind: DepKind::EvaluatorToFir,
            });
            trace.dependences.push(Dependence {
                producer_cycle: coeff.finished,
                consumer_cycle: cycle,
                kind: DepKind::CoefficientToFir,
            });
            if !clear {
                trace.dependences.push(Dependence {
                    producer_cycle: cycle - 1,
                    consumer_cycle: cycle,
                    kind: DepKind::FirAccumulate,
                });
            }
            if pv.index == w - 1 {
                if next_out.is_some() {
                    return Err(Error::ScheduleViolation(format!("two sums finished on cycle {cycle}")));
                }
                next_out = Some(FinishedSum {
                    query: pv.query,
                    value: acc,
                    produced: cycle,
                });
            }
        }
        out_reg = next_out;

        // Dispatch at most one query per cycle, round robin over units.
        if let Some(q) = pending.front() {
            if q.eligible <= cycle && eval_units[next_unit].is_none() {
                let q = pending.pop_front().expect("front exists");
                eval_units[next_unit] = Some(EvalJob {
                    query: q,
                    step: 0,
                    prev: 0.0,
                    cur: 1.0,
                });
                next_unit = (next_unit + 1) % w;
            }
        }

        // Evaluator: every active unit advances one step.
        for (u, slot) in eval_units.iter_mut().enumerate() {
            let Some(job) = slot.as_mut() else { continue };
            let x = job.query.t;
            let (value, mux) = match job.step {
                0 => (FRAC_1_SQRT_2 * job.cur, MuxState::InjectT0),
                1 => {
                    let t1 = x * job.cur - 0.0;
                    job.prev = job.cur;
                    job.cur = t1;
                    (t1, MuxState::InjectX)
                }
                _ => {
                    let next = 2.0 * x * job.cur - job.prev;
                    job.prev = job.cur;
                    job.cur = next;
                    (next, MuxState::Iir)
                }
            };
            stages[Stage::Evaluator.index()].mark(u, mux);
            if job.step > 0 {
                trace.dependences.push(Dependence {
                    producer_cycle: cycle - 1,
                    consumer_cycle: cycle,
                    kind: DepKind::Recurrence,
                });
            }
            eval_regs[u] = Some(PolyValue {
                query: job.query,
                index: job.step,
                value,
                produced: cycle,
            });
            job.step += 1;
            if job.step == w {
                *slot = None;
            }
        }

        // Registers latch at the clock edge.
        for (j, c) in finished_coeffs {
            coeff_regs[j] = Some(c);
        }

        trace.cycles.push(CycleRecord { cycle, stages });
        cycle += 1;
    }

    let first_in = trace.inputs.first().map(|e| e.cycle).unwrap_or(0);
    let first_out = trace.outputs.first().map(|e| e.cycle).unwrap_or(0);
    trace.latency_cycles = first_out - first_in;
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, DeriveSerialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    Proposed,
    ZhuTime,
    ZhuTransform,
}

impl Architecture {
    pub fn as_str(&self) -> &'static str {
        match self {
            Architecture::Proposed => "proposed",
            Architecture::ZhuTime => "zhu_time",
            Architecture::ZhuTransform => "zhu_transform",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "proposed" => Ok(Architecture::Proposed),
            "zhu_time" => Ok(Architecture::ZhuTime),
            "zhu_transform" => Ok(Architecture::ZhuTransform),
            other => Err(Error::UnknownTag {
                kind: "architecture",
                value: other.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, DeriveSerialize)]
#[serde(rename_all = "snake_case")]
pub enum Buffering {
    None,
    #[serde(rename = "samples_and_T")]
    SamplesAndT,
    #[serde(rename = "T_only")]
    TOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, DeriveSerialize)]
#[serde(rename_all = "snake_case")]
pub enum IoType {
    WordSerial,
    WordParallel,
}

impl Buffering {
    pub fn as_str(&self) -> &'static str {
        match self {
            Buffering::None => "none",
            Buffering::SamplesAndT => "samples_and_T",
            Buffering::TOnly => "T_only",
        }
    }
}

impl IoType {
    pub fn as_str(&self) -> &'static str {
        match self {
            IoType::WordSerial => "word_serial",
            IoType::WordParallel => "word_parallel",
        }
    }
}

/// Peak operations per cycle of one stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeakOps {
    Count(usize),
    /// Values are precomputed and read from memory.
    Stored,
    /// More than the given count, plus stored values.
    ExceedsStored(usize),
}

impl fmt::Display for PeakOps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PeakOps::Count(n) => write!(f, "{n}"),
            PeakOps::Stored => f.write_str("stored"),
            PeakOps::ExceedsStored(n) => write!(f, ">{n},stored"),
        }
    }
}

impl Serialize for PeakOps {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PeakOps::Count(n) => serializer.serialize_u64(*n as u64),
            other => serializer.serialize_str(&other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct ArchMetrics {
    pub architecture: Architecture,
    pub buffering: Buffering,
    pub io_type: IoType,
    pub peak_ops_coeff: PeakOps,
    pub peak_ops_poly: PeakOps,
    pub peak_ops_fir: PeakOps,
    pub latency: u64,
    pub hue_percent: f64,
}

/// Table-style metrics of a simulated run of the proposed datapath.
///
/// Utilization is taken over steady-state streaming, where every window
/// occupies each stage for `max(W, queries)` cycles: the input port accepts
/// one sample per cycle and the evaluator one query per cycle. Pipeline fill
/// and drain are excluded.
pub fn compute_metrics(trace: &SystolicTrace, config: &SystolicConfig) -> ArchMetrics {
    let w = config.window_size;
    let period: usize = trace.queries_per_window.iter().map(|&q| q.max(w)).sum();
    let busy: usize = Stage::ALL.iter().map(|&s| trace.total_ops(s)).sum();
    let available = 3 * config.mac_count * period;
    let hue_percent = if available == 0 {
        0.0
    } else {
        100.0 * busy as f64 / available as f64
    };
    ArchMetrics {
        architecture: Architecture::Proposed,
        buffering: Buffering::None,
        io_type: IoType::WordSerial,
        peak_ops_coeff: PeakOps::Count(trace.peak_ops(Stage::Coefficient)),
        peak_ops_poly: PeakOps::Count(trace.peak_ops(Stage::Evaluator)),
        peak_ops_fir: PeakOps::Count(trace.peak_ops(Stage::Fir)),
        latency: trace.latency_cycles,
        hue_percent,
    }
}

/// Closed-form figures for the two word-parallel reference architectures.
///
/// The time-domain array forms the cardinal functions from stored `T_i(x)`
/// and buffers the samples as well; the transform-domain array computes the
/// coefficients with one MAC per coefficient and reads stored `T_i(x)`.
/// Both accumulate the output with `W` MACs, take `2W` cycles and keep every
/// unit busy when all samples arrive at once.
pub fn analytic_metrics(architecture: Architecture, window_size: usize) -> Result<ArchMetrics> {
    if window_size == 0 {
        return Err(Error::InvalidParameter {
            field: "window_size",
            reason: "must be at least 1".into(),
        });
    }
    let w = window_size;
    let (buffering, peak_ops_coeff, peak_ops_poly) = match architecture {
        Architecture::ZhuTime => (Buffering::SamplesAndT, PeakOps::ExceedsStored(w), PeakOps::Count(0)),
        Architecture::ZhuTransform => (Buffering::TOnly, PeakOps::Count(w), PeakOps::Stored),
        Architecture::Proposed => {
            return Err(Error::InvalidParameter {
                field: "architecture",
                reason: "the proposed datapath is measured by simulation, not a closed form".into(),
            })
        }
    };
    Ok(ArchMetrics {
        architecture,
        buffering,
        io_type: IoType::WordParallel,
        peak_ops_coeff,
        peak_ops_poly,
        peak_ops_fir: PeakOps::Count(w),
        latency: 2 * w as u64,
        hue_percent: 100.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheb::{cheb_nodes, compute_coeffs};

    fn run(samples: &[f64], queries: &[f64]) -> SystolicTrace {
        simulate_window(samples, queries, &SystolicConfig::proposed(samples.len())).unwrap()
    }

    #[test]
    fn constant_window() {
        let trace = run(&[3.0; 8], &[0.5]);
        assert_eq!(trace.outputs.len(), 1);
        assert!((trace.outputs[0].value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn identity_signal() {
        let w = cheb_nodes(7, Interval::UNIT);
        let trace = run(&w.sample(|x| x), &[0.5]);
        assert!((trace.outputs[0].value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn latency_is_twice_window() {
        for n in 1..=12 {
            let trace = run(&vec![1.0; n], &[0.1, 0.2]);
            assert_eq!(trace.latency_cycles, 2 * n as u64, "window {n}");
        }
    }

    #[test]
    fn single_sample_window() {
        let trace = run(&[2.0], &[0.3]);
        let m = compute_metrics(&trace, &SystolicConfig::proposed(1));
        assert_eq!(m.latency, 2);
        assert_eq!(m.peak_ops_coeff, PeakOps::Count(1));
        assert_eq!(m.peak_ops_poly, PeakOps::Count(1));
        assert_eq!(m.peak_ops_fir, PeakOps::Count(1));
        assert!((trace.outputs[0].value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn bit_identical_to_reference() {
        let w = cheb_nodes(7, Interval::UNIT);
        let samples = w.sample(|x| (4.0 * x).sin() + 0.5 * (8.0 * x).sin());
        let cs = compute_coeffs(&samples, &w).unwrap();
        let queries: Vec<f64> = (0..8).map(|i| -0.9 + 0.25 * i as f64).collect();
        let trace = run(&samples, &queries);
        for (x, v) in trace.output_values() {
            assert_eq!(v, cs.interpolate(x));
        }
    }

    #[test]
    fn errors() {
        let cfg = SystolicConfig::proposed(4);
        assert_eq!(
            simulate_window(&[1.0; 3], &[0.0], &cfg).unwrap_err(),
            Error::LengthMismatch { expected: 4, actual: 3 }
        );
        assert_eq!(simulate_window(&[1.0; 4], &[], &cfg).unwrap_err(), Error::EmptyQuerySet);
        let mut bad = cfg.clone();
        bad.schedule_vector = [1, 2];
        assert!(simulate_window(&[1.0; 4], &[0.0], &bad).is_err());
        let mut bad = cfg.clone();
        bad.mac_count = 3;
        assert!(bad.validate().is_err());
        assert!(simulate_stream(&[vec![1.0; 4], vec![1.0; 4]], &[vec![0.0; 5], vec![0.0]], &cfg).is_err());
    }

    #[test]
    fn many_queries_single_window() {
        let queries: Vec<f64> = (0..20).map(|i| -1.0 + 0.1 * i as f64).collect();
        let trace = run(&[1.5; 8], &queries);
        assert_eq!(trace.outputs.len(), 20);
        assert!(trace.outputs.iter().all(|o| (o.value - 1.5).abs() < 1e-12));
        // one output per cycle, in query order
        for pair in trace.outputs.windows(2) {
            assert_eq!(pair[1].cycle, pair[0].cycle + 1);
            assert_eq!(pair[1].query_index, pair[0].query_index + 1);
        }
        let m = compute_metrics(&trace, &SystolicConfig::proposed(8));
        assert!(m.hue_percent < 100.0);
    }

    #[test]
    fn mux_sequence_per_query() {
        let trace = run(&[1.0; 4], &[0.2]);
        let muxes: Vec<MuxState> = trace
            .cycles
            .iter()
            .map(|c| c.stage(Stage::Evaluator).mux[0])
            .filter(|m| *m != MuxState::Idle)
            .collect();
        assert_eq!(muxes, vec![MuxState::InjectT0, MuxState::InjectX, MuxState::Iir, MuxState::Iir]);
    }

    #[test]
    fn analytic_columns() {
        let t = analytic_metrics(Architecture::ZhuTime, 8).unwrap();
        assert_eq!(t.io_type, IoType::WordParallel);
        assert_eq!(t.buffering, Buffering::SamplesAndT);
        assert_eq!(t.peak_ops_coeff.to_string(), ">8,stored");
        assert_eq!(t.peak_ops_poly, PeakOps::Count(0));
        assert_eq!(t.peak_ops_fir, PeakOps::Count(8));
        assert_eq!(t.latency, 16);

        let z = analytic_metrics(Architecture::ZhuTransform, 8).unwrap();
        assert_eq!(z.buffering, Buffering::TOnly);
        assert_eq!(z.peak_ops_coeff, PeakOps::Count(8));
        assert_eq!(z.peak_ops_poly, PeakOps::Stored);
        assert!(analytic_metrics(Architecture::Proposed, 8).is_err());
        assert!("wang".parse::<Architecture>().is_err());
    }

    #[test]
    fn metrics_json_shape() {
        let m = analytic_metrics(Architecture::ZhuTime, 8).unwrap();
        let v = serde_json::to_value(&m).unwrap();
        assert_eq!(v["architecture"], "zhu_time");
        assert_eq!(v["buffering"], "samples_and_T");
        assert_eq!(v["io_type"], "word_parallel");
        assert_eq!(v["peak_ops_coeff"], ">8,stored");
        assert_eq!(v["peak_ops_fir"], 8);
        assert_eq!(v["hue_percent"], 100.0);
    }

    #[test]
    fn trace_csv_rows() {
        let trace = run(&[1.0; 2], &[0.0]);
        let csv = trace.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), SystolicTrace::CSV_HEADER);
        assert_eq!(csv.lines().count(), 1 + trace.cycles.len() * 3 * 2);
        assert!(csv.contains("0,coefficient,0,true,1,load"));
    }
}
