//! Laplacian spectra, algebraic connectivity and the upper bounds on it that
//! hold for lattices, planar graphs, bounded-genus graphs, trees and grounded
//! (leader-follower) Laplacians.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    build_laplacian, is_tree, mirror_graph, structural_facts, Graph, Laplacian, LaplacianKind,
};
use crate::linalg;

/// Relative threshold below which an eigenvalue is treated as an exact zero.
pub const ZERO_SNAP: f64 = 1e-8;

/// Slack allowed when comparing a computed eigenvalue with a bound.
pub const BOUND_TOL: f64 = 1e-9;

/// Eigenvalues ordered by nondecreasing real part (ties by imaginary part).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub multiplicity_of_zero: usize,
}

impl Spectrum {
    /// `Re{λ₂}`, or 0 for a one-node matrix.
    pub fn lambda2_real(&self) -> f64 {
        self.eigenvalues.get(1).map_or(0.0, |v| v.re)
    }

    /// Smallest real part; for grounded Laplacians this is `λ̄₁`.
    pub fn min_real(&self) -> f64 {
        self.eigenvalues.first().map_or(0.0, |v| v.re)
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Spectrum of a Laplacian. Symmetric inputs go through the symmetric solver.
pub fn spectrum(l: &Laplacian) -> Result<Spectrum> {
    let context = format!("{:?} Laplacian ({}x{})", l.kind, l.dim(), l.dim());
    let mut eigenvalues: Vec<Complex64> = if l.is_symmetric() {
        linalg::symmetric_eigenvalues(&l.matrix, &context)?
            .into_iter()
            .map(|v| Complex64::new(v, 0.0))
            .collect()
    } else {
        linalg::general_eigenvalues(&l.matrix, &context)?
    };

    let snap = ZERO_SNAP * l.norm_inf();
    let mut multiplicity_of_zero = 0;
    for v in &mut eigenvalues {
        if v.norm() <= snap {
            *v = Complex64::new(0.0, 0.0);
            multiplicity_of_zero += 1;
        }
    }
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(Spectrum {
        eigenvalues,
        multiplicity_of_zero,
    })
}

/// `Re{λ₂}` of the full Laplacian of `g`.
pub fn algebraic_connectivity(g: &Graph) -> Result<f64> {
    Ok(spectrum(&build_laplacian(g, LaplacianKind::Full)?)?.lambda2_real())
}

/// Algebraic connectivity of the unit-weight `q`-fuzz path, scaled by `w`:
/// `w · Σ_{k=1}^{q/2} 2(1 − cos(πk/N))`.
///
/// This is exact for `q = 2`. For wider neighborhoods it is the value of the
/// `q`-fuzz ring on `2N` nodes and sits slightly above the true path value,
/// converging to it as `N` grows.
pub fn path_fuzz_lambda2_closed_form(n: usize, q: usize, w: f64) -> Result<f64> {
    if q == 0 || !q.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "q must be even and positive, got {}",
            q
        )));
    }
    if n < 2 || q >= 2 * n {
        return Err(Error::domain(format!(
            "need 2 <= N and q < 2N, got N={}, q={}",
            n, q
        )));
    }
    if !(w > 0.0) {
        return Err(Error::domain(format!("weight must be positive, got {}", w)));
    }
    let sum: f64 = (1..=q / 2)
        .map(|k| 2.0 * (1.0 - (PI * k as f64 / n as f64).cos()))
        .sum();
    Ok(w * sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundKind {
    /// `λ₂ ≤ c / N^{2/d}` on a `d`-dimensional `r`-fuzz lattice.
    Fuzz { d: usize, r: usize },
    /// `λ₂ ≤ 8 q w_max / N`; planarity is asserted by the caller.
    Planar,
    /// `λ₂ ≤ c₂ / N` with a caller-supplied constant.
    Genus { c2: f64 },
    /// `λ₂ ≤ π² w_max / (diam + 1)²`.
    Tree,
    /// `λ̄₁ ≤ q w_max / (N − 1)` for the Laplacian grounded at `leader`.
    LeaderGrounded { leader: usize },
}

impl BoundKind {
    pub fn tag(&self) -> &'static str {
        match self {
            BoundKind::Fuzz { .. } => "fuzz",
            BoundKind::Planar => "planar",
            BoundKind::Genus { .. } => "genus",
            BoundKind::Tree => "tree",
            BoundKind::LeaderGrounded { .. } => "leader_grounded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub kind: BoundKind,
    pub bound: f64,
    pub computed: f64,
    pub satisfied: bool,
}

/// `c = d · 4π² w r(r+1)(2r+1)/6`, from `1 − cos x ≤ x²/2` applied to the
/// lowest torus mode.
pub fn fuzz_constant(d: usize, r: usize, w_max: f64) -> f64 {
    let r = r as f64;
    d as f64 * 4.0 * PI * PI * w_max * r * (r + 1.0) * (2.0 * r + 1.0) / 6.0
}

/// Evaluates the requested bound on `g` and compares it with the spectrum.
pub fn connectivity_bound(g: &Graph, kind: BoundKind) -> Result<BoundCertificate> {
    let n = g.node_count();
    let nf = n as f64;
    let w_max = g.w_max();
    let facts = structural_facts(g);

    let (bound, computed) = match kind {
        BoundKind::Fuzz { d, r } => {
            if d == 0 || r == 0 {
                return Err(Error::domain("fuzz bound needs d >= 1 and r >= 1"));
            }
            let bound = fuzz_constant(d, r, w_max) / nf.powf(2.0 / d as f64);
            (bound, algebraic_connectivity(g)?)
        }
        BoundKind::Planar => {
            if n >= 3 && mirror_graph(g).unique_edges().count() > 3 * n - 6 {
                return Err(Error::domain(
                    "more than 3N - 6 edges: graph cannot be planar",
                ));
            }
            let q = facts.max_neighborhood as f64;
            (8.0 * q * w_max / nf, algebraic_connectivity(g)?)
        }
        BoundKind::Genus { c2 } => {
            if !(c2 > 0.0) {
                return Err(Error::domain("genus bound needs a positive constant c2"));
            }
            (c2 / nf, algebraic_connectivity(g)?)
        }
        BoundKind::Tree => {
            if !is_tree(g) {
                return Err(Error::domain(
                    "tree bound requires an acyclic connected graph",
                ));
            }
            let diam = facts.diameter.expect("trees are connected") as f64;
            (
                PI * PI * w_max / ((diam + 1.0) * (diam + 1.0)),
                algebraic_connectivity(g)?,
            )
        }
        BoundKind::LeaderGrounded { leader } => {
            if g.is_directed() {
                return Err(Error::domain("grounded bound requires an undirected graph"));
            }
            if n < 2 {
                return Err(Error::domain("grounded bound needs at least two nodes"));
            }
            let grounded = build_laplacian(g, LaplacianKind::Grounded { leader })?;
            let q = facts.max_neighborhood as f64;
            (q * w_max / (nf - 1.0), spectrum(&grounded)?.min_real())
        }
    };
    Ok(BoundCertificate {
        kind,
        bound,
        computed,
        satisfied: computed <= bound + BOUND_TOL,
    })
}

/// `λ₂` of the mirror graph, which equals `Re{λ₂}` whenever `L` is normal.
pub fn lambda2_real_via_mirror(g: &Graph) -> Result<f64> {
    if !structural_facts(g).normal {
        return Err(Error::domain(
            "Laplacian is not normal; Re{λ₂} need not match the mirror graph",
        ));
    }
    let lm = build_laplacian(&mirror_graph(g), LaplacianKind::Full)?;
    Ok(spectrum(&lm)?.lambda2_real())
}
