//! Thin wrappers over the dense eigen-solvers used throughout the crate.

mod hqr;

use nalgebra::{DMatrix, DVector, Hessenberg, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;
/// Extra attempts on orthogonally similar matrices after a stalled iteration.
const RETRIES: usize = 3;

// nalgebra treats an iteration limit of 0 as unbounded, and its shifted QR
// can cycle on some inputs, so the limit is always finite.
fn iteration_limit(n: usize) -> usize {
    100 * n.max(1)
}

/// Householder reflection `I − 2vvᵀ/vᵀv` for a fixed, attempt-dependent `v`.
fn reflector(n: usize, attempt: usize) -> DMatrix<f64> {
    let v = DVector::from_fn(n, |k, _| {
        ((k + 1) as f64 * 0.618_034 * attempt as f64).fract() + 0.5
    });
    DMatrix::identity(n, n) - (&v * v.transpose()) * (2.0 / v.dot(&v))
}

/// Runs `solve` on `m`, then on `H m H` for a few reflections `H` until it
/// converges. Similar matrices share eigenvalues but take different paths
/// through the iteration.
fn with_retries<T, R>(
    m: &DMatrix<T>,
    context: &str,
    what: &str,
    solve: impl Fn(DMatrix<T>, usize) -> Option<R>,
) -> Result<R>
where
    T: nalgebra::ComplexField<RealField = f64> + Copy,
{
    let n = m.nrows();
    for attempt in 0..=RETRIES {
        let a = if attempt == 0 {
            m.clone()
        } else {
            let h = reflector(n, attempt).map(T::from_real);
            &h * m * &h
        };
        if let Some(r) = solve(a, iteration_limit(n)) {
            return Ok(r);
        }
    }
    Err(Error::numeric(
        context,
        format!("{} did not converge", what),
    ))
}

/// Eigenvalues of a general real matrix.
pub fn general_eigenvalues(m: &DMatrix<f64>, context: &str) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    with_retries(
        m,
        context,
        "real Schur iteration",
        |a, limit| match Schur::try_new(a.clone(), EPS, limit) {
            Some(s) => Some(s.complex_eigenvalues().iter().copied().collect()),
            None => hqr::hessenberg_eigenvalues(Hessenberg::new(a).h()),
        },
    )
}

/// Eigenvalues of a symmetric real matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>, context: &str) -> Result<Vec<f64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut values: Vec<f64> = with_retries(m, context, "symmetric eigen-solver", |a, limit| {
        SymmetricEigen::try_new(a, EPS, limit).map(|e| e.eigenvalues.iter().copied().collect())
    })?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Eigenvalues of a general complex matrix.
pub fn complex_eigenvalues(m: &DMatrix<Complex64>, context: &str) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    with_retries(m, context, "complex Schur iteration", |a, limit| {
        Schur::try_new(a, EPS, limit).map(|s| s.unpack().1.diagonal().iter().copied().collect())
    })
}

/// Roots of the monic polynomial `x^n + c[0] x^{n-1} + … + c[n-1]`,
/// computed as eigenvalues of its companion matrix.
pub fn monic_roots(tail: &[Complex64]) -> Result<Vec<Complex64>> {
    // Exactly vanishing trailing coefficients are exact roots at zero; keeping
    // them in the companion matrix would only blur them into an ε^{1/k} cluster.
    let zeros = tail
        .iter()
        .rev()
        .take_while(|c| **c == Complex64::new(0.0, 0.0))
        .count();
    let n = tail.len() - zeros;
    let mut comp = DMatrix::<Complex64>::zeros(n, n);
    for (k, c) in tail[..n].iter().enumerate() {
        comp[(0, k)] = -c;
    }
    for i in 1..n {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    let mut roots = complex_eigenvalues(&comp, "polynomial companion matrix")?;
    roots.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), zeros));
    Ok(roots)
}

/// Determinant through LU with partial pivoting.
pub fn determinant(m: DMatrix<f64>) -> f64 {
    m.lu().determinant()
}
