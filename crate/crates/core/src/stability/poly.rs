use num_complex::Complex64;

use super::Gains;

/// Monic polynomial `x^n + c₁ x^{n-1} + … + c_n`, stored as `[c₁, …, c_n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonicPoly {
    tail: Vec<Complex64>,
}

impl MonicPoly {
    pub fn new(tail: Vec<Complex64>) -> Self {
        MonicPoly { tail }
    }

    pub fn degree(&self) -> usize {
        self.tail.len()
    }

    /// Coefficients below the leading one, highest power first.
    pub fn tail(&self) -> &[Complex64] {
        &self.tail
    }

    /// Coefficient of `x^power`; the leading coefficient is exactly 1.
    pub fn coeff(&self, power: usize) -> Complex64 {
        let n = self.degree();
        match power {
            p if p == n => Complex64::new(1.0, 0.0),
            p if p < n => self.tail[n - 1 - p],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Real part `f_k` of the coefficient of `x^k` (zero outside `0..=n`).
    pub fn f(&self, power: isize) -> f64 {
        if power < 0 {
            0.0
        } else {
            self.coeff(power as usize).re
        }
    }

    /// Imaginary part `g_k` of the coefficient of `x^k`.
    pub fn g(&self, power: isize) -> f64 {
        if power < 0 {
            0.0
        } else {
            self.coeff(power as usize).im
        }
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.tail
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, c| acc * x + c)
    }
}

/// Characteristic polynomial of one decoupled mode:
/// `sⁿ + a_{n−1}λ s^{n−1} + … + a₁λ s + a₀λ`.
pub fn mode_char_poly(gains: &Gains, lambda: Complex64) -> MonicPoly {
    let n = gains.order();
    let tail = (1..=n).map(|k| gains.a()[n - k] * lambda).collect();
    MonicPoly::new(tail)
}

/// Rewrites `p(s)` in the variable `μ = −j s` and renormalizes to a monic
/// polynomial, so that `Re s < 0` exactly when `Im μ > 0`.
///
/// The coefficient of `μ^{n−k}` is the `s^{n−k}` coefficient times `(−j)^k`.
pub fn to_mu_polynomial(p: &MonicPoly) -> MonicPoly {
    let minus_j = Complex64::new(0.0, -1.0);
    let mut factor = Complex64::new(1.0, 0.0);
    let tail = p
        .tail()
        .iter()
        .map(|c| {
            factor *= minus_j;
            c * factor
        })
        .collect();
    MonicPoly::new(tail)
}
