//! Fixed-step RK4 integration of the closed-loop consensus dynamics.
//!
//! The stacked state is `ξ = [x⁽⁰⁾; x⁽¹⁾; …; x⁽ⁿ⁻¹⁾]`, one length-`N` block per
//! derivative order, with `ẋ⁽ᵏ⁾ = x⁽ᵏ⁺¹⁾` and
//! `ẋ⁽ⁿ⁻¹⁾ = −L (a₀x⁽⁰⁾ + … + a_{n−1}x⁽ⁿ⁻¹⁾)`.
//! Laplacian products go through the sparse edge list.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::stability::{Gains, Mode, StabilityReport};

/// State norm beyond which integration stops and the run counts as diverging.
pub const OVERFLOW: f64 = 1e12;
/// Consensus threshold relative to the initial metric.
pub const CONSENSUS_FACTOR: f64 = 1e-6;
/// Divergence threshold relative to the initial metric.
pub const DIVERGENCE_FACTOR: f64 = 10.0;
/// Smallest exponential rate of the metric envelope that counts as a trend.
pub const RATE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// Zero positions and lower derivatives; the highest randomized order
    /// (acceleration, or the top order when `n < 3`) uniform in
    /// `[−amplitude, amplitude]`.
    RandomAcceleration { seed: u64, amplitude: f64 },
    /// Full stacked state, `n·N` values in block order.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub gains: Gains,
    pub graph: Graph,
    pub mode: Mode,
    pub h: f64,
    pub horizon: f64,
    pub initial: InitialCondition,
    /// Keep every `record_stride`-th step in the trace.
    pub record_stride: usize,
}

impl SimConfig {
    pub fn new(gains: Gains, graph: Graph, seed: u64) -> Self {
        SimConfig {
            gains,
            graph,
            mode: Mode::Leaderless,
            h: 0.01,
            horizon: 200.0,
            initial: InitialCondition::RandomAcceleration {
                seed,
                amplitude: 1.0,
            },
            record_stride: 10,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::domain("time step h must be positive"));
        }
        if !(self.horizon >= self.h && self.horizon.is_finite()) {
            return Err(Error::domain("horizon T must be at least h"));
        }
        if self.record_stride == 0 {
            return Err(Error::domain("record stride must be >= 1"));
        }
        let dim = self.gains.order() * self.graph.node_count();
        if let Mode::Leader { index } = self.mode {
            if index >= self.graph.node_count() {
                return Err(Error::domain(format!(
                    "leader index {} out of range",
                    index
                )));
            }
        }
        match &self.initial {
            InitialCondition::Explicit(x) if x.len() != dim => Err(Error::domain(format!(
                "initial state has {} entries, expected n*N = {}",
                x.len(),
                dim
            ))),
            InitialCondition::Explicit(x) if x.iter().any(|v| !v.is_finite()) => {
                Err(Error::domain("initial state must be finite"))
            }
            InitialCondition::RandomAcceleration { amplitude, .. } if !amplitude.is_finite() => {
                Err(Error::domain("amplitude must be finite"))
            }
            _ => Ok(()),
        }
    }

    fn initial_state(&self) -> Vec<f64> {
        let n = self.gains.order();
        let nodes = self.graph.node_count();
        let mut x = match &self.initial {
            InitialCondition::Explicit(x) => x.clone(),
            InitialCondition::RandomAcceleration { seed, amplitude } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let order = 2.min(n - 1);
                let mut x = vec![0.0; n * nodes];
                for v in &mut x[order * nodes..(order + 1) * nodes] {
                    *v = amplitude * rng.gen_range(-1.0..=1.0);
                }
                x
            }
        };
        if let Mode::Leader { index } = self.mode {
            for k in 0..n {
                x[k * nodes + index] = 0.0;
            }
        }
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Consensus,
    Diverging,
    Undecided,
}

impl Classification {
    pub fn tag(&self) -> &'static str {
        match self {
            Classification::Consensus => "consensus",
            Classification::Diverging => "diverging",
            Classification::Undecided => "undecided",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub gains: Gains,
    pub mode: Mode,
    pub node_count: usize,
    pub h: f64,
    /// Recorded times.
    pub times: Vec<f64>,
    /// Stacked state at each recorded time.
    pub states: Vec<Vec<f64>>,
    /// Consensus metric at each recorded time.
    pub metric: Vec<f64>,
    pub classification: Classification,
    /// Fitted exponential rate of the metric envelope over the second half.
    pub growth_rate: f64,
    pub stopped_early: bool,
}

impl SimTrace {
    pub fn order(&self) -> usize {
        self.gains.order()
    }

    pub fn final_metric(&self) -> f64 {
        *self.metric.last().expect("trace has at least one sample")
    }

    /// `x_agent⁽ᵏ⁾` at recorded sample `idx`.
    pub fn value(&self, idx: usize, agent: usize, order: usize) -> f64 {
        self.states[idx][order * self.node_count + agent]
    }
}

/// `max_{i,k} |x_i⁽ᵏ⁾ − x_ref⁽ᵏ⁾|`, with agent 0 as reference leaderless and
/// the zero state with a leader.
pub fn consensus_metric(x: &[f64], n: usize, nodes: usize, mode: Mode) -> f64 {
    let mut m = 0.0f64;
    for k in 0..n {
        let block = &x[k * nodes..(k + 1) * nodes];
        let reference = match mode {
            Mode::Leaderless => block[0],
            Mode::Leader { .. } => 0.0,
        };
        for &v in block {
            m = m.max((v - reference).abs());
        }
    }
    m
}

struct Rhs<'a> {
    graph: &'a Graph,
    gains: &'a [f64],
    leader: Option<usize>,
    nodes: usize,
    mix: Vec<f64>,
}

impl Rhs<'_> {
    fn eval(&mut self, x: &[f64], dx: &mut [f64]) {
        let nodes = self.nodes;
        let n = self.gains.len();
        dx[..(n - 1) * nodes].copy_from_slice(&x[nodes..]);
        self.mix.iter_mut().for_each(|v| *v = 0.0);
        for (k, &a) in self.gains.iter().enumerate() {
            for (m, &v) in self.mix.iter_mut().zip(&x[k * nodes..(k + 1) * nodes]) {
                *m += a * v;
            }
        }
        let top = &mut dx[(n - 1) * nodes..];
        self.graph.laplacian_apply(&self.mix, top);
        top.iter_mut().for_each(|v| *v = -*v);
        if let Some(leader) = self.leader {
            for k in 0..n {
                dx[k * nodes + leader] = 0.0;
            }
        }
    }
}

/// Integrates the closed loop over `[0, T]` with classical RK4.
pub fn integrate(cfg: &SimConfig) -> Result<SimTrace> {
    cfg.validate()?;
    let n = cfg.gains.order();
    let nodes = cfg.graph.node_count();
    let dim = n * nodes;
    let steps = (cfg.horizon / cfg.h).round().max(1.0) as usize;
    let leader = match cfg.mode {
        Mode::Leaderless => None,
        Mode::Leader { index } => Some(index),
    };
    let mut rhs = Rhs {
        graph: &cfg.graph,
        gains: cfg.gains.a(),
        leader,
        nodes,
        mix: vec![0.0; nodes],
    };

    let mut x = cfg.initial_state();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![0.0; dim],
        vec![0.0; dim],
        vec![0.0; dim],
        vec![0.0; dim],
        vec![0.0; dim],
    );

    let mut full_times = Vec::with_capacity(steps + 1);
    let mut full_metric = Vec::with_capacity(steps + 1);
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut metric = Vec::new();
    let m0 = consensus_metric(&x, n, nodes, cfg.mode);
    full_times.push(0.0);
    full_metric.push(m0);
    times.push(0.0);
    states.push(x.clone());
    metric.push(m0);

    let h = cfg.h;
    let mut stopped_early = false;
    for step in 1..=steps {
        rhs.eval(&x, &mut k1);
        axpy(&x, 0.5 * h, &k1, &mut tmp);
        rhs.eval(&tmp, &mut k2);
        axpy(&x, 0.5 * h, &k2, &mut tmp);
        rhs.eval(&tmp, &mut k3);
        axpy(&x, h, &k3, &mut tmp);
        rhs.eval(&tmp, &mut k4);
        for i in 0..dim {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }

        let t = step as f64 * h;
        let m = consensus_metric(&x, n, nodes, cfg.mode);
        full_times.push(t);
        full_metric.push(m);
        let overflow = x.iter().any(|v| !(v.abs() <= OVERFLOW));
        if step % cfg.record_stride == 0 || step == steps || overflow {
            times.push(t);
            states.push(x.clone());
            metric.push(m);
        }
        if overflow {
            stopped_early = true;
            break;
        }
    }

    let growth_rate = envelope_rate(&full_times, &full_metric);
    let classification = if stopped_early {
        Classification::Diverging
    } else {
        classify(&full_metric, growth_rate)
    };
    Ok(SimTrace {
        gains: cfg.gains.clone(),
        mode: cfg.mode,
        node_count: nodes,
        h,
        times,
        states,
        metric,
        classification,
        growth_rate,
        stopped_early,
    })
}

fn axpy(x: &[f64], alpha: f64, k: &[f64], out: &mut [f64]) {
    for ((o, &xi), &ki) in out.iter_mut().zip(x).zip(k) {
        *o = xi + alpha * ki;
    }
}

/// Least-squares slope of `ln(window peak)` against window centre over the
/// second half of the run, using five windows. Oscillating metrics are
/// handled through the window peaks.
fn envelope_rate(times: &[f64], metric: &[f64]) -> f64 {
    const WINDOWS: usize = 5;
    let start = metric.len() / 2;
    let len = metric.len() - start;
    if len < WINDOWS {
        return 0.0;
    }
    let mut pts = Vec::with_capacity(WINDOWS);
    for w in 0..WINDOWS {
        let lo = start + w * len / WINDOWS;
        let hi = start + (w + 1) * len / WINDOWS;
        let peak = metric[lo..hi].iter().cloned().fold(0.0, f64::max);
        if peak <= 0.0 || !peak.is_finite() {
            return 0.0;
        }
        pts.push((0.5 * (times[lo] + times[hi - 1]), peak.ln()));
    }
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / WINDOWS as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / WINDOWS as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

fn classify(metric: &[f64], rate: f64) -> Classification {
    let m0 = metric[0];
    let peak = metric.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return Classification::Consensus;
    }
    let last = *metric.last().expect("non-empty metric");
    // Final 10% of the horizon, compared through the peaks of its two halves.
    let tail = &metric[metric.len() - (metric.len() / 10).max(2)..];
    let (a, b) = tail.split_at(tail.len() / 2);
    let peak_a = a.iter().cloned().fold(0.0, f64::max);
    let peak_b = b.iter().cloned().fold(0.0, f64::max);

    let reference = if m0 > 0.0 { m0 } else { peak };
    let eps_c = CONSENSUS_FACTOR * reference;
    let eps_d = DIVERGENCE_FACTOR * reference;
    // Once the metric reaches rounding level it jitters instead of decaying, so
    // staying below the threshold over the whole final stretch also counts.
    let settled = peak_b <= peak_a || peak_a.max(peak_b) < eps_c;
    if last < eps_c && settled {
        Classification::Consensus
    } else if last > eps_d && peak_b > peak_a {
        Classification::Diverging
    } else if rate < -RATE_TOL {
        Classification::Consensus
    } else if rate > RATE_TOL {
        Classification::Diverging
    } else {
        Classification::Undecided
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Agreement {
    pub classification: Classification,
    pub system_stable: bool,
    /// `None` when the trace is undecided.
    pub agreement: Option<bool>,
}

/// Compares a simulated run with the analytic verdict for the same setup.
pub fn classify_against_report(trace: &SimTrace, report: &StabilityReport) -> Result<Agreement> {
    if trace.gains != report.gains
        || trace.mode != report.mode
        || trace.node_count != report.node_count
    {
        return Err(Error::domain(
            "trace and stability report describe different configurations",
        ));
    }
    let agreement = match trace.classification {
        Classification::Undecided => None,
        Classification::Consensus => Some(report.system_stable),
        Classification::Diverging => Some(!report.system_stable),
    };
    Ok(Agreement {
        classification: trace.classification,
        system_stable: report.system_stable,
        agreement,
    })
}

/// Long-format trace CSV `t,agent,deriv_order,value` (agents 1-based) followed
/// by a `# classification=…` summary line.
pub fn write_trace_csv<W: Write>(trace: &SimTrace, mut out: W) -> Result<()> {
    writeln!(out, "t,agent,deriv_order,value")?;
    let n = trace.order();
    for (idx, &t) in trace.times.iter().enumerate() {
        for agent in 0..trace.node_count {
            for k in 0..n {
                writeln!(
                    out,
                    "{:.16e},{},{},{:.16e}",
                    t,
                    agent + 1,
                    k,
                    trace.value(idx, agent, k)
                )?;
            }
        }
    }
    writeln!(
        out,
        "# classification={} final_metric={:.16e} growth_rate={:.16e} stopped_early={}",
        trace.classification.tag(),
        trace.final_metric(),
        trace.growth_rate,
        trace.stopped_early
    )?;
    Ok(())
}

/// Binary dump: the 8 bytes `CLTRACE1`, then `u64` sample count, `u64` N and
/// `u64` n, then per sample `t` followed by the `n·N` stacked state values.
/// Every number is little-endian; floats are IEEE-754 binary64.
pub fn write_trace_binary<W: Write>(trace: &SimTrace, mut out: W) -> Result<()> {
    out.write_all(b"CLTRACE1")?;
    for v in [trace.times.len(), trace.node_count, trace.order()] {
        out.write_all(&(v as u64).to_le_bytes())?;
    }
    for (t, state) in trace.times.iter().zip(&trace.states) {
        out.write_all(&t.to_le_bytes())?;
        for v in state {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}
