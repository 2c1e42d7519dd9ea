//! Network-size sweeps: find the critical size `N̄` at which fixed gains stop
//! stabilizing a growing graph family.

use std::thread;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Family;
use crate::spectral::spectrum;
use crate::stability::{assess, eigen_oracle, loop_laplacian, Gains, Mode, MARGIN};

/// Which computation decides stability at each sampled size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decider {
    /// Determinant chain per Laplacian mode (oracle fallback for non-normal `L`).
    Assess,
    /// Dense closed-loop eigenvalues only.
    Oracle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: Family,
    pub gains: Gains,
    pub n_min: usize,
    pub n_max: usize,
    pub step: usize,
    pub mode: Mode,
    /// Resolve the first stable→unstable bracket with unit steps.
    pub refine: bool,
    pub decider: Decider,
    /// Worker threads; results do not depend on this.
    pub jobs: usize,
}

impl SweepSpec {
    pub fn new(family: Family, gains: Gains, n_min: usize, n_max: usize) -> Self {
        SweepSpec {
            family,
            gains,
            n_min,
            n_max,
            step: 1,
            mode: Mode::Leaderless,
            refine: true,
            decider: Decider::Assess,
            jobs: 1,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_step(mut self, step: usize) -> Self {
        self.step = step;
        self
    }

    pub fn with_decider(mut self, decider: Decider) -> Self {
        self.decider = decider;
        self
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_min < 2 {
            return Err(Error::domain("sweep needs N_min >= 2"));
        }
        if self.step == 0 {
            return Err(Error::domain("sweep step must be >= 1"));
        }
        if self.n_max < self.n_min {
            return Err(Error::domain("sweep needs N_max >= N_min"));
        }
        Ok(())
    }

    /// Sizes sampled before refinement. Toric lattices only exist at perfect
    /// powers `M^d`, so there the side `M` advances by one instead.
    pub fn sizes(&self) -> Vec<usize> {
        match self.family {
            Family::ToricLattice { d, .. } => (2..)
                .map(|m: usize| m.pow(d as u32))
                .skip_while(|&n| n < self.n_min)
                .take_while(|&n| n <= self.n_max)
                .collect(),
            _ => (self.n_min..=self.n_max).step_by(self.step).collect(),
        }
    }

    fn every_size_valid(&self) -> bool {
        !matches!(self.family, Family::ToricLattice { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingRecord {
    #[serde(rename = "N")]
    pub n: usize,
    /// `Re{λ₂}` leaderless, `λ̄₁` with a leader.
    pub lambda2_real: f64,
    pub system_stable: bool,
    pub marginal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingResult {
    pub records: Vec<ScalingRecord>,
    /// Smallest sampled size whose closed loop is unstable.
    pub critical_n: Option<usize>,
    /// No sampled size after `critical_n` is stable again.
    pub monotone: bool,
    /// Smallest sampled size from which every later sample is unstable, when
    /// preceded by at least one stable sample.
    pub sustained_instability_n: Option<usize>,
}

/// Stability at one network size.
pub fn evaluate_size(spec: &SweepSpec, n: usize) -> Result<ScalingRecord> {
    let g = spec.family.generate(n)?;
    let l = loop_laplacian(&g, spec.mode)?;
    let spec_l = spectrum(&l)?;
    let lambda2_real = match spec.mode {
        Mode::Leaderless => spec_l.lambda2_real(),
        Mode::Leader { .. } => spec_l.min_real(),
    };
    let (system_stable, marginal) = match spec.decider {
        Decider::Assess => {
            let r = assess(&spec.gains, &g, spec.mode)?;
            (r.system_stable, r.marginal)
        }
        Decider::Oracle => {
            let o = eigen_oracle(&spec.gains, &l)?;
            (o.max_real_nonzero < 0.0, o.max_real_nonzero.abs() <= MARGIN)
        }
    };
    Ok(ScalingRecord {
        n,
        lambda2_real,
        system_stable,
        marginal,
    })
}

fn evaluate_all(spec: &SweepSpec, sizes: &[usize]) -> Result<Vec<ScalingRecord>> {
    let jobs = spec.jobs.max(1).min(sizes.len().max(1));
    if jobs == 1 {
        return sizes.iter().map(|&n| evaluate_size(spec, n)).collect();
    }
    let chunk = sizes.len().div_ceil(jobs);
    let parts: Vec<Result<Vec<ScalingRecord>>> = thread::scope(|s| {
        let handles: Vec<_> = sizes
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|&n| evaluate_size(spec, n)).collect()))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(sizes.len());
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

/// Sweeps the family over the requested sizes and locates `N̄`.
pub fn find_critical_n(spec: &SweepSpec) -> Result<ScalingResult> {
    spec.validate()?;
    let sizes = spec.sizes();
    let mut records = evaluate_all(spec, &sizes)?;

    if spec.refine && spec.every_size_valid() {
        if let Some(k) = records.iter().position(|r| !r.system_stable) {
            if k > 0 {
                let (lo, hi) = (records[k - 1].n, records[k].n);
                if hi - lo > 1 {
                    let gap: Vec<usize> = (lo + 1..hi).collect();
                    let extra = evaluate_all(spec, &gap)?;
                    records.extend(extra);
                    records.sort_by_key(|r| r.n);
                }
            }
        }
    }
    Ok(summarize(records))
}

fn summarize(records: Vec<ScalingRecord>) -> ScalingResult {
    let first_unstable = records.iter().position(|r| !r.system_stable);
    let critical_n = first_unstable.map(|k| records[k].n);
    let monotone = match first_unstable {
        Some(k) => records[k..].iter().all(|r| !r.system_stable),
        None => true,
    };
    let last_stable = records.iter().rposition(|r| r.system_stable);
    let sustained_instability_n = match last_stable {
        Some(k) if k + 1 < records.len() => Some(records[k + 1].n),
        _ => None,
    };
    ScalingResult {
        records,
        critical_n,
        monotone,
        sustained_instability_n,
    }
}

/// One cell of the `N̄(q, n)` table on the `q`-fuzz path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalEntry {
    pub q: usize,
    pub n: usize,
    pub critical_n: Option<usize>,
    pub monotone: bool,
    pub sustained_instability_n: Option<usize>,
}

/// `N̄` over neighborhood sizes `qs` and orders `orders` on the unit-weight
/// `q`-fuzz path. `gains` must hold at least `max(orders)` entries; order `n`
/// uses the first `n`.
pub fn critical_n_vs_q(
    qs: &[usize],
    orders: &[usize],
    gains: &Gains,
    n_max: usize,
    jobs: usize,
) -> Result<Vec<CriticalEntry>> {
    let mut table = Vec::with_capacity(qs.len() * orders.len());
    for &q in qs {
        for &n in orders {
            let spec = SweepSpec::new(
                Family::PathFuzz { q, w: 1.0 },
                gains.truncated(n)?,
                2,
                n_max,
            )
            .with_jobs(jobs);
            let res = find_critical_n(&spec)?;
            table.push(CriticalEntry {
                q,
                n,
                critical_n: res.critical_n,
                monotone: res.monotone,
                sustained_instability_n: res.sustained_instability_n,
            });
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gains(a: &[f64]) -> Gains {
        Gains::new(a.to_vec()).unwrap()
    }

    #[test]
    fn path_q2_fig1_gains() {
        // λ₂ = 2(1 − cos(π/N)) drops below a₀/(a₁a₂) = 0.125 first at N = 9.
        let spec = SweepSpec::new(
            Family::PathFuzz { q: 2, w: 1.0 },
            gains(&[0.1, 0.8, 1.0]),
            2,
            40,
        );
        let res = find_critical_n(&spec).unwrap();
        assert_eq!(res.critical_n, Some(9));
        assert!(res.monotone);
        assert_eq!(res.sustained_instability_n, Some(9));
    }

    #[test]
    fn cycle_fig2_gains() {
        let spec = SweepSpec::new(Family::Cycle { w: 1.0 }, gains(&[0.5, 1.0, 1.0]), 3, 30);
        let res = find_critical_n(&spec).unwrap();
        assert_eq!(res.critical_n, Some(9));
        assert!(res.monotone);
    }

    #[test]
    fn coarse_steps_are_refined() {
        let spec =
            SweepSpec::new(Family::Cycle { w: 1.0 }, gains(&[0.5, 1.0, 1.0]), 3, 30).with_step(5);
        let res = find_critical_n(&spec).unwrap();
        assert_eq!(res.critical_n, Some(9));
        let ns: Vec<usize> = res.records.iter().map(|r| r.n).collect();
        assert!(ns.windows(2).all(|w| w[0] < w[1]));
        assert!(ns.contains(&9) && ns.contains(&13));
    }

    #[test]
    fn complete_graph_never_destabilizes() {
        let spec = SweepSpec::new(Family::Complete { w: 1.0 }, gains(&[0.5, 1.0, 1.0]), 2, 60)
            .with_step(7);
        let res = find_critical_n(&spec).unwrap();
        assert_eq!(res.critical_n, None);
        assert!(res.monotone);
    }

    #[test]
    fn oracle_decider_agrees() {
        let base = SweepSpec::new(
            Family::PathFuzz { q: 2, w: 1.0 },
            gains(&[0.1, 0.8, 1.0]),
            2,
            20,
        );
        let a = find_critical_n(&base).unwrap();
        let b = find_critical_n(&base.clone().with_decider(Decider::Oracle)).unwrap();
        assert_eq!(a.critical_n, b.critical_n);
    }

    #[test]
    fn jobs_do_not_change_results() {
        let base = SweepSpec::new(Family::Cycle { w: 1.0 }, gains(&[0.5, 1.0, 1.0]), 3, 40);
        let a = find_critical_n(&base).unwrap();
        let b = find_critical_n(&base.clone().with_jobs(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn toric_sizes_are_perfect_powers() {
        let spec = SweepSpec::new(
            Family::ToricLattice { d: 2, r: 1, w: 1.0 },
            gains(&[1.0, 1.0]),
            4,
            100,
        );
        assert_eq!(spec.sizes(), vec![4, 9, 16, 25, 36, 49, 64, 81, 100]);
    }

    #[test]
    fn invalid_specs() {
        let mut spec = SweepSpec::new(Family::Cycle { w: 1.0 }, gains(&[1.0]), 1, 10);
        assert!(find_critical_n(&spec).is_err());
        spec.n_min = 3;
        spec.step = 0;
        assert!(find_critical_n(&spec).is_err());
    }

    #[test]
    fn non_monotone_is_flagged() {
        // With these gains the fifth-order loop is stable only for λ above ~9.02;
        // the 20-fuzz path clears that for N = 10..=14 and nowhere else.
        let spec = SweepSpec::new(
            Family::PathFuzz { q: 20, w: 1.0 },
            gains(&[0.1, 0.8, 1.0, 1.0, 1.0]),
            2,
            40,
        );
        let res = find_critical_n(&spec).unwrap();
        assert_eq!(res.critical_n, Some(2));
        assert!(!res.monotone);
        assert_eq!(res.sustained_instability_n, Some(15));
        assert!(res
            .records
            .iter()
            .filter(|r| r.system_stable)
            .map(|r| r.n)
            .eq(10..=14));
    }
}
