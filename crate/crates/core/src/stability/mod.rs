//! Stability of the n-th order consensus loop.
//!
//! With a normal Laplacian the closed loop splits into one companion block
//! per Laplacian eigenvalue `λ_l`, with characteristic polynomial
//! `sⁿ + a_{n−1}λ_l s^{n−1} + … + a₀λ_l`. Each block is tested with the
//! complex Routh–Hurwitz determinant chain after the substitution `μ = −js`.
//! Non-normal Laplacians skip the decomposition and go straight to the dense
//! eigenvalue oracle.

mod hurwitz;
mod oracle;
mod poly;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{build_laplacian, Graph, Laplacian, LaplacianKind, STRUCT_TOL};
use crate::linalg;
use crate::spectral::spectrum;

pub use hurwitz::{hurwitz_chain, hurwitz_matrix, second_hurwitz_condition, undirected_condition};
pub use oracle::{
    closed_loop_matrix, eigen_oracle, mode_matrix, zero_cluster_radius, OracleSpectrum,
    MAX_ORACLE_DIM,
};
pub use poly::{mode_char_poly, to_mu_polynomial, MonicPoly};

/// Absolute band around zero where determinant and root signs are not trusted.
pub const MARGIN: f64 = 1e-7;

/// Gains `a₀ … a_{n−1}` of the relative-feedback law; `n` is their count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Gains {
    a: Vec<f64>,
}

impl Gains {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::domain("need at least one gain (n >= 1)"));
        }
        if let Some(bad) = a.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::domain(format!(
                "gains must be finite and >= 0, got {}",
                bad
            )));
        }
        Ok(Gains { a })
    }

    /// Integrator order `n`.
    pub fn order(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn a_max(&self) -> f64 {
        self.a.iter().copied().fold(0.0, f64::max)
    }

    /// First `n` gains of a longer list.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.order() {
            return Err(Error::domain(format!(
                "cannot take order {} from {} gains",
                n,
                self.order()
            )));
        }
        Gains::new(self.a[..n].to_vec())
    }
}

impl TryFrom<Vec<f64>> for Gains {
    type Error = Error;
    fn try_from(a: Vec<f64>) -> Result<Self> {
        Gains::new(a)
    }
}

impl From<Gains> for Vec<f64> {
    fn from(g: Gains) -> Self {
        g.a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Mode {
    Leaderless,
    /// Agent `index` (0-based) holds all of its states at zero.
    Leader {
        index: usize,
    },
}

impl Mode {
    pub fn tag(&self) -> &'static str {
        match self {
            Mode::Leaderless => "leaderless",
            Mode::Leader { .. } => "leader",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Per-mode determinant chain on the Laplacian eigenvalues.
    DeterminantChain,
    /// Dense closed-loop eigenvalues (Laplacian not normal).
    Oracle,
}

/// Verdict for a single decoupled mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeVerdict {
    /// 1-based mode index (`2..=N` leaderless, `1..=N−1` with a leader).
    pub l: usize,
    pub lambda: Complex64,
    /// `(−1)^k Δ_{2k}`, `k = 1..n`.
    pub det_signed: Vec<f64>,
    pub hurwitz_stable: bool,
    /// Some determinant lies inside the margin band and none is clearly negative.
    pub marginal: bool,
    /// Largest real part among the roots of this mode's polynomial.
    pub oracle_max_real_part: f64,
}

impl ModeVerdict {
    pub fn evaluate(gains: &Gains, l: usize, lambda: Complex64) -> Result<Self> {
        let p = mode_char_poly(gains, lambda);
        let det_signed = hurwitz_chain(&to_mu_polynomial(&p))?;
        let hurwitz_stable = det_signed.iter().all(|&d| d > 0.0);
        let clearly_unstable = det_signed.iter().any(|&d| d < -MARGIN);
        let clearly_stable = det_signed.iter().all(|&d| d > MARGIN);
        let roots = linalg::monic_roots(p.tail())?;
        let oracle_max_real_part = roots.iter().map(|r| r.re).fold(f64::NEG_INFINITY, f64::max);
        Ok(ModeVerdict {
            l,
            lambda,
            det_signed,
            hurwitz_stable,
            marginal: !clearly_unstable && !clearly_stable,
            oracle_max_real_part,
        })
    }

    /// The determinant verdict agrees with the root-location verdict, or one of
    /// them is too close to the boundary to count.
    pub fn agrees_with_roots(&self) -> bool {
        self.marginal
            || self.oracle_max_real_part.abs() <= MARGIN
            || self.hurwitz_stable == (self.oracle_max_real_part < 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub gains: Gains,
    pub n: usize,
    pub node_count: usize,
    pub mode: Mode,
    pub method: Method,
    pub per_mode: Vec<ModeVerdict>,
    pub system_stable: bool,
    pub marginal: bool,
    /// Closed-loop zero eigenvalues attributed to consensus drift.
    pub zero_mode_count: usize,
    /// Filled when the dense oracle decided the verdict.
    pub oracle_max_real_part: Option<f64>,
}

impl StabilityReport {
    /// Smallest signed determinant over all modes.
    pub fn min_signed_det(&self) -> Option<f64> {
        self.per_mode
            .iter()
            .flat_map(|m| m.det_signed.iter().copied())
            .min_by(f64::total_cmp)
    }

    /// JSON wire form:
    /// `{gains, n, N, mode, per_mode: [{l, lambda_re, lambda_im, det_signed, stable, marginal}], system_stable}`
    /// plus `method`, `marginal`, `zero_mode_count` and `oracle_max_real_part`.
    pub fn to_json(&self) -> serde_json::Value {
        let per_mode: Vec<_> = self
            .per_mode
            .iter()
            .map(|m| {
                json!({
                    "l": m.l,
                    "lambda_re": m.lambda.re,
                    "lambda_im": m.lambda.im,
                    "det_signed": m.det_signed,
                    "stable": m.hurwitz_stable,
                    "marginal": m.marginal,
                })
            })
            .collect();
        let mode = match self.mode {
            Mode::Leaderless => json!("leaderless"),
            Mode::Leader { index } => json!({ "leader": index + 1 }),
        };
        json!({
            "gains": self.gains.a(),
            "n": self.n,
            "N": self.node_count,
            "mode": mode,
            "method": self.method,
            "per_mode": per_mode,
            "system_stable": self.system_stable,
            "marginal": self.marginal,
            "zero_mode_count": self.zero_mode_count,
            "oracle_max_real_part": self.oracle_max_real_part,
        })
    }

    /// Mode with the smallest `Re λ`.
    pub fn slowest_mode(&self) -> Option<&ModeVerdict> {
        self.per_mode
            .iter()
            .min_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re))
    }
}

fn is_normal(m: &nalgebra::DMatrix<f64>) -> bool {
    let mt = m.transpose();
    (&mt * m - m * &mt).amax() <= STRUCT_TOL
}

/// Laplacian the closed loop is built on for the given mode.
pub fn loop_laplacian(g: &Graph, mode: Mode) -> Result<Laplacian> {
    match mode {
        Mode::Leaderless => build_laplacian(g, LaplacianKind::Full),
        Mode::Leader { index } => build_laplacian(g, LaplacianKind::Grounded { leader: index }),
    }
}

/// Decides whether the closed loop reaches consensus.
pub fn assess(gains: &Gains, g: &Graph, mode: Mode) -> Result<StabilityReport> {
    let n = gains.order();
    let node_count = g.node_count();
    match mode {
        Mode::Leaderless => {
            if !(0..node_count).any(|r| g.is_root(r)) {
                return Err(Error::domain(
                    "graph has no spanning tree, so zero is not a simple Laplacian eigenvalue \
                     and consensus is impossible",
                ));
            }
        }
        Mode::Leader { index } => {
            if index >= node_count {
                return Err(Error::domain(format!(
                    "leader index {} out of range",
                    index
                )));
            }
            if !g.is_root(index) {
                return Err(Error::domain(format!(
                    "some agents have no path to the leader {}",
                    index
                )));
            }
        }
    }

    let l = loop_laplacian(g, mode)?;
    let base = StabilityReport {
        gains: gains.clone(),
        n,
        node_count,
        mode,
        method: Method::DeterminantChain,
        per_mode: Vec::new(),
        system_stable: false,
        marginal: false,
        zero_mode_count: 0,
        oracle_max_real_part: None,
    };

    if !is_normal(&l.matrix) {
        let o = eigen_oracle(gains, &l)?;
        let max = o.max_real_nonzero;
        return Ok(StabilityReport {
            method: Method::Oracle,
            system_stable: max < 0.0,
            marginal: max.abs() <= MARGIN,
            zero_mode_count: o.zero_mode_count,
            oracle_max_real_part: Some(max),
            ..base
        });
    }

    let spec = spectrum(&l)?;
    let (skip, first_index) = match mode {
        Mode::Leaderless => (1, 2),
        Mode::Leader { .. } => (0, 1),
    };
    let per_mode = spec.eigenvalues[skip..]
        .iter()
        .enumerate()
        .map(|(k, &lambda)| ModeVerdict::evaluate(gains, first_index + k, lambda))
        .collect::<Result<Vec<_>>>()?;

    let system_stable = per_mode.iter().all(|m| m.hurwitz_stable);
    let any_clear_failure = per_mode.iter().any(|m| !m.hurwitz_stable && !m.marginal);
    let marginal = !any_clear_failure && per_mode.iter().any(|m| m.marginal);
    Ok(StabilityReport {
        per_mode,
        system_stable,
        marginal,
        zero_mode_count: spec.multiplicity_of_zero * n,
        ..base
    })
}
