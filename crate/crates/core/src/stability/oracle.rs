//! Direct eigenvalue computation on the stacked closed-loop matrix.
//!
//! This path never looks at the Laplacian eigenvalues; it is the reference
//! the determinant chain is checked against.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::Gains;
use crate::error::{Error, Result};
use crate::graph::{Laplacian, LaplacianKind};
use crate::linalg;

/// Largest closed-loop dimension `N·n` the dense oracle accepts.
pub const MAX_ORACLE_DIM: usize = 5000;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSpectrum {
    /// All `N·n` eigenvalues, sorted by real part.
    pub eigenvalues: Vec<Complex64>,
    /// Largest real part once the consensus (drift) modes are set aside.
    pub max_real_nonzero: f64,
    /// Eigenvalues inside the zero cluster radius.
    pub zero_mode_count: usize,
}

/// Block companion matrix with identity blocks on the superdiagonal and
/// `−a_k L` along the last block row.
pub fn closed_loop_matrix(gains: &Gains, l: &DMatrix<f64>) -> DMatrix<f64> {
    let n = gains.order();
    let m = l.nrows();
    let mut big = DMatrix::zeros(n * m, n * m);
    for block in 0..n.saturating_sub(1) {
        for i in 0..m {
            big[(block * m + i, (block + 1) * m + i)] = 1.0;
        }
    }
    let last = (n - 1) * m;
    for (k, &ak) in gains.a().iter().enumerate() {
        if ak == 0.0 {
            continue;
        }
        let mut view = big.view_mut((last, k * m), (m, m));
        view -= l * ak;
    }
    big
}

/// Companion matrix of a single decoupled mode with Laplacian eigenvalue `λ`.
pub fn mode_matrix(gains: &Gains, lambda: Complex64) -> DMatrix<Complex64> {
    let n = gains.order();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n - 1 {
        m[(i, i + 1)] = Complex64::new(1.0, 0.0);
    }
    for (k, &ak) in gains.a().iter().enumerate() {
        m[(n - 1, k)] = -lambda * ak;
    }
    m
}

/// Radius inside which closed-loop eigenvalues are counted as zero modes.
///
/// A zero Laplacian eigenvalue produces an `n × n` Jordan block, whose
/// computed eigenvalues scatter by about `(ε‖𝒜‖)^{1/n}`.
pub fn zero_cluster_radius(n: usize, scale: f64) -> f64 {
    10.0 * (f64::EPSILON * scale.max(1.0)).powf(1.0 / n as f64)
}

/// Full spectrum of the closed loop built on `l`.
///
/// For a full Laplacian the consensus direction `1/√N` is split off with a
/// Householder reflection first. `L 1 = 0` makes that split exact, so the
/// `n` drift modes come out as exact zeros instead of a rounding-sized
/// Jordan cluster, while the remaining `(N−1)·n` eigenvalues are those of the
/// closed loop on the reduced Laplacian.
pub fn eigen_oracle(gains: &Gains, l: &Laplacian) -> Result<OracleSpectrum> {
    let n = gains.order();
    let m = l.dim();
    if n * m > MAX_ORACLE_DIM {
        return Err(Error::Resource(format!(
            "closed-loop dimension {} exceeds the dense limit {}",
            n * m,
            MAX_ORACLE_DIM
        )));
    }

    let deflate = l.kind == LaplacianKind::Full && m >= 1;
    let (reduced, drift) = if deflate {
        (deflate_consensus(&l.matrix), n)
    } else {
        (l.matrix.clone(), 0)
    };

    let a = closed_loop_matrix(gains, &reduced);
    let context = format!("closed-loop matrix ({}x{})", a.nrows(), a.ncols());
    let rest = linalg::general_eigenvalues(&a, &context)?;

    let radius = zero_cluster_radius(n, a.norm());
    let max_real_nonzero = rest.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
    let zero_mode_count = drift + rest.iter().filter(|v| v.norm() <= radius).count();

    let mut eigenvalues = vec![Complex64::new(0.0, 0.0); drift];
    eigenvalues.extend(rest);
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(OracleSpectrum {
        eigenvalues,
        max_real_nonzero,
        zero_mode_count,
    })
}

/// `(H L H)[1.., 1..]` for the reflection `H` that maps `e₁` to `1/√N`.
fn deflate_consensus(l: &DMatrix<f64>) -> DMatrix<f64> {
    let m = l.nrows();
    if m <= 1 {
        return DMatrix::zeros(0, 0);
    }
    let mut v = DVector::from_element(m, 1.0 / (m as f64).sqrt());
    v[0] -= 1.0;
    let vv = v.dot(&v);
    let h = DMatrix::identity(m, m) - (&v * v.transpose()) * (2.0 / vv);
    let t = &h * l * &h;
    t.view((1, 1), (m - 1, m - 1)).into_owned()
}
