//! Routh–Hurwitz test for polynomials with complex coefficients.
//!
//! For a monic `p(μ) = μⁿ + (f_{n−1} + j g_{n−1}) μ^{n−1} + … + (f₀ + j g₀)`
//! all roots satisfy `Im μ > 0` iff `(−1)^k Δ_{2k} > 0` for `k = 1..n`, where
//! `Δ_{2k}` is the leading `2k × 2k` minor of the interleaved array
//!
//! ```text
//! 1  f_{n−1}  f_{n−2}  …  f₀   0   …
//! 0  g_{n−1}  g_{n−2}  …  g₀   0   …
//! 0  1        f_{n−1}  …  f₁   f₀  …
//! 0  0        g_{n−1}  …  g₁   g₀  …
//! …
//! ```
//!
//! Each successive row pair is shifted right by one column.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::poly::MonicPoly;
use super::Gains;
use crate::error::{Error, Result};
use crate::linalg;

/// The `2k × 2k` Hurwitz array of `p`.
pub fn hurwitz_matrix(p: &MonicPoly, k: usize) -> DMatrix<f64> {
    let n = p.degree() as isize;
    let size = 2 * k;
    let mut m = DMatrix::zeros(size, size);
    for pair in 0..k {
        for t in 0..=n as usize {
            let col = pair + t;
            if col >= size {
                break;
            }
            let power = n - t as isize;
            m[(2 * pair, col)] = p.f(power);
            m[(2 * pair + 1, col)] = p.g(power);
        }
    }
    m
}

/// Signed determinants `(−1)^k Δ_{2k}` for `k = 1..=n`.
pub fn hurwitz_chain(p: &MonicPoly) -> Result<Vec<f64>> {
    let n = p.degree();
    if n == 0 {
        return Err(Error::domain(
            "Hurwitz chain needs a polynomial of degree >= 1",
        ));
    }
    Ok((1..=n)
        .map(|k| {
            let det = linalg::determinant(hurwitz_matrix(p, k));
            if k % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect())
}

/// Closed form of the `k = 2` signed determinant for a mode with eigenvalue `λ`:
///
/// `a_{n−1}(Re λ)²(a_{n−1}a_{n−2} Re λ − a_{n−3}) + a_{n−2}(Im λ)²(a_{n−1}² Re λ − a_{n−2})`.
pub fn second_hurwitz_condition(gains: &Gains, lambda: Complex64) -> Result<f64> {
    let (a1, a2, a3) = top_three(gains)?;
    let (re, im) = (lambda.re, lambda.im);
    Ok(a1 * re * re * (a1 * a2 * re - a3) + a2 * im * im * (a1 * a1 * re - a2))
}

/// Real-eigenvalue form `a_{n−1} a_{n−2} λ − a_{n−3}`.
pub fn undirected_condition(gains: &Gains, lambda: f64) -> Result<f64> {
    let (a1, a2, a3) = top_three(gains)?;
    Ok(a1 * a2 * lambda - a3)
}

/// `(a_{n−1}, a_{n−2}, a_{n−3})`.
fn top_three(gains: &Gains) -> Result<(f64, f64, f64)> {
    let n = gains.order();
    if n < 3 {
        return Err(Error::domain(format!(
            "condition needs order n >= 3, got {}",
            n
        )));
    }
    let a = gains.a();
    Ok((a[n - 1], a[n - 2], a[n - 3]))
}
