//! Stability of the linearized fluctuation dynamics.
//!
//! The homogeneous part of the fluctuation equations is written for the real
//! quadratures `v = (x_a, p_a, x_c, p_c, x_B, p_B)` with
//! `x = (δo + δo†)/√2`, `p = -i(δo - δo†)/√2`, as `dv/dt = A v`. The system
//! is stable iff every eigenvalue of `A` has negative real part. Two
//! independent verdicts are produced: the Routh–Hurwitz test on the
//! characteristic polynomial, and the sign of the spectral abscissa from its
//! roots.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::numerics::{poly_roots, NumericsError, RealPolynomial};
use crate::operating_point::OperatingPoint;

pub type QuadratureMatrix = [[f64; 6]; 6];

/// Spectral abscissae closer to zero than this (THz) are marginal.
pub const BORDERLINE_BAND: f64 = 1e-9;

/// Stand-in for a vanishing first-column Routh entry.
pub const ROUTH_EPSILON: f64 = 1e-30;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StabilityError {
    #[error("Routh array has a vanishing row: marginal case")]
    InconclusiveBorderline,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RouthVerdict {
    Stable,
    Unstable,
    Borderline,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub quadrature_matrix: QuadratureMatrix,
    pub char_poly: RealPolynomial,
    pub routh: RouthVerdict,
    pub routh_stable: bool,
    pub eigenvalues: Vec<Complex64>,
    /// Largest eigenvalue real part, THz.
    pub spectral_abscissa: f64,
    pub methods_agree: bool,
    /// `|spectral_abscissa|` inside the borderline band.
    pub margin_note: bool,
}

impl StabilityReport {
    /// Routh verdict, falling back to the spectral abscissa when Routh is inconclusive.
    pub fn is_stable(&self) -> bool {
        match self.routh {
            RouthVerdict::Stable => true,
            RouthVerdict::Unstable => false,
            RouthVerdict::Borderline => self.spectral_abscissa < 0.0,
        }
    }
}

/// Drift matrix of the quadratures.
pub fn drift_matrix(op: &OperatingPoint) -> QuadratureMatrix {
    let (gr, gi) = (op.cal_ga.re, op.cal_ga.im);
    let gc = op.g_c;
    let d = op.delta;
    let mut a = [[0.0; 6]; 6];
    // x_a, p_a
    a[0] = [-op.kappa_a, d, 0.0, 0.0, 2.0 * gi, 0.0];
    a[1] = [-d, -op.kappa_a, 0.0, 0.0, -2.0 * gr, 0.0];
    // x_c, p_c
    a[2] = [0.0, 0.0, -op.kappa_c, op.nu_c, 0.0, 0.0];
    a[3] = [0.0, 0.0, -op.nu_c, -op.kappa_c, -2.0 * gc, 0.0];
    // x_B, p_B
    a[4] = [0.0, 0.0, 0.0, 0.0, -op.gamma_b, op.nu_b];
    a[5] = [-2.0 * gr, -2.0 * gi, -2.0 * gc, 0.0, -op.nu_b, -op.gamma_b];
    a
}

fn mat_mul(a: &QuadratureMatrix, b: &QuadratureMatrix) -> QuadratureMatrix {
    let mut out = [[0.0; 6]; 6];
    for i in 0..6 {
        for k in 0..6 {
            let aik = a[i][k];
            for j in 0..6 {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

/// `det(λI - A)` by the Faddeev–LeVerrier recursion.
pub fn char_poly(a: &QuadratureMatrix) -> RealPolynomial {
    const N: usize = 6;
    let mut coeffs = [0.0; N + 1];
    coeffs[N] = 1.0;
    let mut m = [[0.0; N]; N];
    for k in 1..=N {
        let mut next = mat_mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += coeffs[N - k + 1];
        }
        m = next;
        let am = mat_mul(a, &m);
        let tr: f64 = (0..N).map(|i| am[i][i]).sum();
        coeffs[N - k] = -tr / k as f64;
    }
    RealPolynomial::new(coeffs.to_vec()).expect("monic polynomial is never all zero")
}

/// Routh–Hurwitz test: true iff every root lies in the open left half-plane.
///
/// A vanishing first-column entry is replaced by a tiny positive number; a
/// row that vanishes entirely is reported as
/// [`StabilityError::InconclusiveBorderline`].
pub fn routh_stable(p: &RealPolynomial) -> Result<bool, StabilityError> {
    let c = p.coeffs();
    let n = p.degree();
    if n == 0 {
        return Ok(true);
    }
    // Rescale λ → ρμ with ρ = |c_0|^{1/n} so the coefficients are balanced;
    // a positive scaling leaves the half-plane of every root unchanged.
    let rho = if c[0] != 0.0 { (c[0].abs() / c[n].abs()).powf(1.0 / n as f64) } else { 1.0 };
    let balanced: Vec<f64> = c.iter().enumerate().map(|(k, v)| v * rho.powi(k as i32 - n as i32)).collect();
    let desc: Vec<f64> = balanced.iter().rev().copied().collect();
    let width = n / 2 + 1;
    let mut prev: Vec<f64> = (0..width).map(|i| desc.get(2 * i).copied().unwrap_or(0.0)).collect();
    let mut cur: Vec<f64> = (0..width).map(|i| desc.get(2 * i + 1).copied().unwrap_or(0.0)).collect();
    let coeff_scale = balanced.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let zero_tol = 64.0 * f64::EPSILON * coeff_scale;

    let mut first_col = vec![prev[0]];
    for row in 1..=n {
        let row_scale = cur.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if row_scale <= zero_tol {
            return Err(StabilityError::InconclusiveBorderline);
        }
        if cur[0].abs() <= zero_tol {
            cur[0] = ROUTH_EPSILON * coeff_scale;
        }
        first_col.push(cur[0]);
        if row == n {
            break;
        }
        let next: Vec<f64> = (0..width)
            .map(|i| {
                let p1 = prev.get(i + 1).copied().unwrap_or(0.0);
                let c1 = cur.get(i + 1).copied().unwrap_or(0.0);
                (cur[0] * p1 - prev[0] * c1) / cur[0]
            })
            .collect();
        prev = cur;
        cur = next;
    }
    let sign_changes = first_col.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count();
    Ok(sign_changes == 0 && first_col[0] > 0.0)
}

pub fn stability_report(op: &OperatingPoint) -> Result<StabilityReport, StabilityError> {
    let a = drift_matrix(op);
    let poly = char_poly(&a);
    let routh = match routh_stable(&poly) {
        Ok(true) => RouthVerdict::Stable,
        Ok(false) => RouthVerdict::Unstable,
        Err(StabilityError::InconclusiveBorderline) => RouthVerdict::Borderline,
        Err(e) => return Err(e),
    };
    let eigenvalues = poly_roots(&poly)?;
    let abscissa = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let margin_note = abscissa.abs() < BORDERLINE_BAND;
    let methods_agree = match routh {
        RouthVerdict::Borderline => margin_note,
        v => margin_note || (v == RouthVerdict::Stable) == (abscissa < 0.0),
    };
    if !methods_agree {
        log::warn!("Routh verdict {routh:?} disagrees with spectral abscissa {abscissa:e}");
    }
    Ok(StabilityReport {
        quadrature_matrix: a,
        char_poly: poly,
        routh,
        routh_stable: routh == RouthVerdict::Stable,
        eigenvalues,
        spectral_abscissa: abscissa,
        methods_agree,
        margin_note,
    })
}
