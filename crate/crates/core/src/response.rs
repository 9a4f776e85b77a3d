//! Linear response of the fluctuations to a weak IR signal.
//!
//! Each fluctuation is written as `⟨δo⟩ = o₊ e^{-iωt} + o₋ e^{+iωt}`. Matching
//! the `e^{-iωt}` coefficients of the linearized equations and of their
//! conjugates gives a closed 6×6 system in
//! `u = (a₊, a₋*, c₊, c₋*, B₊, B₋*)`. No rotating-wave approximation is made.
//! The closed-form Stokes amplitude and the fully resonant conversion
//! coefficient are provided as independent cross-checks.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::numerics::{solve_complex_linear, ComplexMatrix, NumericsError};
use crate::operating_point::OperatingPoint;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Index of each amplitude in the unknown vector.
pub mod idx {
    pub const A_PLUS: usize = 0;
    pub const A_MINUS_CONJ: usize = 1;
    pub const C_PLUS: usize = 2;
    pub const C_MINUS_CONJ: usize = 3;
    pub const B_PLUS: usize = 4;
    pub const B_MINUS_CONJ: usize = 5;
}

/// Relative size of the closed-form denominator treated as a pole.
pub const CLOSED_FORM_POLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ResponseError {
    #[error("response diverges at omega_ir = {omega_ir} THz (gain pole)")]
    Diverges { omega_ir: f64 },
    #[error("signal amplitude eps_ir must be positive")]
    ZeroSignal,
    #[error(transparent)]
    Numerics(NumericsError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseComponents {
    pub omega_ir: f64,
    pub a_plus: Complex64,
    pub a_minus: Complex64,
    pub c_plus: Complex64,
    pub c_minus: Complex64,
    pub b_plus: Complex64,
    pub b_minus: Complex64,
    /// Anti-Stokes output amplitude `√(2κ_a) a₊`.
    pub a_out_plus: Complex64,
    /// Stokes output amplitude `√(2κ_a) a₋`.
    pub a_out_minus: Complex64,
    /// Conversion coefficient at the Stokes line.
    pub t_ac: Complex64,
    /// `|t_ac|^2`.
    pub tac: f64,
    /// Same normalization applied to the anti-Stokes line.
    pub tac_antistokes: f64,
}

/// Coefficient matrix and drive of the ansatz-reduced linear system.
///
/// Rows read `[i(ω-Δ) - κ_a] a₊ - i𝒢_a (B₊ + B₋*) = 0` and so on; the
/// signal enters the `c₊` row only.
pub fn assemble_response_system(op: &OperatingPoint, omega_ir: f64) -> (ComplexMatrix, Vec<Complex64>) {
    use idx::*;
    let w = omega_ir;
    let ga = op.cal_ga;
    let ga_c = ga.conj();
    let gc = Complex64::new(op.g_c, 0.0);
    let mut m = ComplexMatrix::zeros(6, 6);

    m[(A_PLUS, A_PLUS)] = I * (w - op.delta) - op.kappa_a;
    m[(A_PLUS, B_PLUS)] = -I * ga;
    m[(A_PLUS, B_MINUS_CONJ)] = -I * ga;

    m[(A_MINUS_CONJ, A_MINUS_CONJ)] = I * (w + op.delta) - op.kappa_a;
    m[(A_MINUS_CONJ, B_PLUS)] = I * ga_c;
    m[(A_MINUS_CONJ, B_MINUS_CONJ)] = I * ga_c;

    m[(C_PLUS, C_PLUS)] = I * (w - op.nu_c) - op.kappa_c;
    m[(C_PLUS, B_PLUS)] = -I * gc;
    m[(C_PLUS, B_MINUS_CONJ)] = -I * gc;

    m[(C_MINUS_CONJ, C_MINUS_CONJ)] = I * (w + op.nu_c) - op.kappa_c;
    m[(C_MINUS_CONJ, B_PLUS)] = I * gc;
    m[(C_MINUS_CONJ, B_MINUS_CONJ)] = I * gc;

    m[(B_PLUS, B_PLUS)] = I * (w - op.nu_b) - op.gamma_b;
    m[(B_PLUS, A_PLUS)] = -I * ga_c;
    m[(B_PLUS, A_MINUS_CONJ)] = -I * ga;
    m[(B_PLUS, C_PLUS)] = -I * gc;
    m[(B_PLUS, C_MINUS_CONJ)] = -I * gc;

    m[(B_MINUS_CONJ, B_MINUS_CONJ)] = I * (w + op.nu_b) - op.gamma_b;
    m[(B_MINUS_CONJ, A_PLUS)] = I * ga_c;
    m[(B_MINUS_CONJ, A_MINUS_CONJ)] = I * ga;
    m[(B_MINUS_CONJ, C_PLUS)] = I * gc;
    m[(B_MINUS_CONJ, C_MINUS_CONJ)] = I * gc;

    let mut drive = vec![Complex64::new(0.0, 0.0); 6];
    drive[C_PLUS] = Complex64::new(-op.eps_ir, 0.0);
    (m, drive)
}

/// Exact linear response at probe frequency `omega_ir` (THz).
pub fn solve_response(op: &OperatingPoint, omega_ir: f64) -> Result<ResponseComponents, ResponseError> {
    use idx::*;
    if !(op.eps_ir > 0.0) {
        return Err(ResponseError::ZeroSignal);
    }
    let (m, drive) = assemble_response_system(op, omega_ir);
    let u = solve_complex_linear(&m, &drive).map_err(|e| match e {
        NumericsError::SingularMatrix { .. } => ResponseError::Diverges { omega_ir },
        other => ResponseError::Numerics(other),
    })?;

    let out_scale = (2.0 * op.kappa_a).sqrt();
    let norm = 2.0 * (op.kappa_a * op.kappa_c).sqrt() / op.eps_ir;
    let a_plus = u[A_PLUS];
    let a_minus = u[A_MINUS_CONJ].conj();
    let t_ac = norm * a_minus;
    let comps = ResponseComponents {
        omega_ir,
        a_plus,
        a_minus,
        c_plus: u[C_PLUS],
        c_minus: u[C_MINUS_CONJ].conj(),
        b_plus: u[B_PLUS],
        b_minus: u[B_MINUS_CONJ].conj(),
        a_out_plus: out_scale * a_plus,
        a_out_minus: out_scale * a_minus,
        t_ac,
        tac: t_ac.norm_sqr(),
        tac_antistokes: (norm * a_plus).norm_sqr(),
    };
    if !comps.tac.is_finite() {
        return Err(ResponseError::Diverges { omega_ir });
    }
    Ok(comps)
}

/// Denominator `𝒜(ω)` of the closed-form Stokes amplitude, with the largest
/// magnitude among its terms (used to judge whether it vanishes).
pub fn stokes_denominator(op: &OperatingPoint, omega_ir: f64) -> (Complex64, f64) {
    let d2 = Complex64::new(op.delta * op.delta, 0.0);
    let w = Complex64::new(omega_ir, 0.0);
    let sq = |rate: f64| d2 - (w - I * rate) * (w - I * rate);
    let (pc, pb, pa) = (sq(op.kappa_c), sq(op.gamma_b), sq(op.kappa_a));
    let gc_term = 4.0 * op.g_c * op.g_c * op.delta * op.delta;
    let ga_term = 4.0 * op.cal_ga.norm_sqr() * op.delta * op.delta * pc;
    let t1 = pc * pb * pa;
    let t2 = gc_term * pa;
    let scale = t1.norm().max(t2.norm()).max(ga_term.norm());
    (t1 - t2 + ga_term, scale)
}

/// Closed-form Stokes amplitude `a₋` near resonance.
pub fn stokes_closed_form(op: &OperatingPoint, omega_ir: f64) -> Result<Complex64, ResponseError> {
    let (den, scale) = stokes_denominator(op, omega_ir);
    if !(den.norm() >= CLOSED_FORM_POLE_TOL * scale) || scale == 0.0 {
        return Err(ResponseError::Diverges { omega_ir });
    }
    let d = op.delta;
    let num = 2.0
        * I
        * op.eps_ir
        * op.cal_ga
        * op.g_c
        * d
        * (d - omega_ir + I * op.kappa_a)
        * (d - omega_ir + I * op.kappa_c);
    Ok(num / den)
}

/// `T_ac` from the closed-form Stokes amplitude.
pub fn tac_closed_form(op: &OperatingPoint, omega_ir: f64) -> Result<f64, ResponseError> {
    if !(op.eps_ir > 0.0) {
        return Err(ResponseError::ZeroSignal);
    }
    let a_minus = stokes_closed_form(op, omega_ir)?;
    Ok((2.0 * (op.kappa_a * op.kappa_c).sqrt() * a_minus / op.eps_ir).norm_sqr())
}

/// Detuning-dependent factors `(η_a, η_c, η_B)`.
pub fn eta_factors(op: &OperatingPoint) -> (Complex64, Complex64, Complex64) {
    let eta = |rate: f64| Complex64::new(1.0, rate / (2.0 * op.delta));
    (eta(op.kappa_a), eta(op.kappa_c), eta(op.gamma_b))
}

/// Conversion coefficient for a signal exactly resonant with the vibration
/// and the IR mode (`ω_ir = ν_b = ν_c = -Δ`).
pub fn resonant_tac(op: &OperatingPoint) -> Result<Complex64, ResponseError> {
    let (eta_a, eta_c, eta_b) = eta_factors(op);
    let (ka, kc) = (op.kappa_a, op.kappa_c);
    let den = op.g_c * op.g_c * ka / eta_c - op.cal_ga.norm_sqr() * kc / eta_a
        + ka * kc * op.gamma_b * eta_b;
    if den.norm() == 0.0 {
        return Err(ResponseError::Diverges { omega_ir: -op.delta });
    }
    Ok(2.0 * (ka * kc).sqrt() * op.cal_ga * op.g_c / den)
}

/// Coupling magnitude `|𝒢_a^(*)|` that approximately maximizes the resonant
/// conversion efficiency, THz.
pub fn optimal_coupling(op: &OperatingPoint) -> f64 {
    let (eta_a, eta_c, eta_b) = eta_factors(op);
    let inner = op.g_c * op.g_c * eta_c.inv().norm() + op.kappa_c * op.gamma_b * eta_b.norm();
    (inner * op.kappa_a * eta_a.norm() / op.kappa_c).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SystemParams;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn reference_at(ga: f64) -> OperatingPoint {
        let p = SystemParams::reference()
            .with_prescribed_ga(ga, -30.0)
            .validate()
            .unwrap();
        OperatingPoint::from_params(&p).unwrap()
    }

    #[test]
    fn uncoupled_system_is_block_diagonal() {
        let op = OperatingPoint { g_c: 0.0, ..reference_at(0.0) };
        let (m, _) = assemble_response_system(&op, 29.0);
        for i in 0..6 {
            for j in 0..6 {
                if i != j {
                    assert_eq!(m[(i, j)], Complex64::new(0.0, 0.0), "({i},{j})");
                }
            }
        }
    }

    #[test]
    fn a_plus_row_matches_hand_substitution() {
        let op = reference_at(1.7).with_cal_ga(Complex64::from_polar(1.7, 0.4));
        let w = 30.3;
        let (m, drive) = assemble_response_system(&op, w);
        let row = m.row(idx::A_PLUS);
        let ga = Complex64::from_polar(1.7, 0.4);
        let want = [
            I * (w - op.delta) - op.kappa_a,
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            -I * ga,
            -I * ga,
        ];
        for (a, b) in row.iter().zip(&want) {
            assert!((a - b).norm() < 1e-15);
        }
        assert_eq!(drive.iter().filter(|z| z.norm() > 0.0).count(), 1);
        assert_ne!(drive[idx::C_PLUS], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn conjugate_pairing_symmetry() {
        // Swapping (a₊,a₋*), (c₊,c₋*), (B₊,B₋*) and conjugating maps M(ω) to M(-ω).
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let op = OperatingPoint {
            delta: rng.random_range(-40.0..40.0),
            cal_ga: Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
            g_c: rng.random_range(0.0..1.0),
            kappa_a: rng.random_range(0.1..30.0),
            kappa_c: rng.random_range(0.1..3.0),
            gamma_b: rng.random_range(0.01..1.0),
            nu_b: rng.random_range(10.0..40.0),
            nu_c: rng.random_range(10.0..40.0),
            eps_ir: 1e-3,
            steady: None,
        };
        let w = rng.random_range(0.0..60.0);
        let (m, _) = assemble_response_system(&op, w);
        let (m_neg, _) = assemble_response_system(&op, -w);
        let swap = |k: usize| k ^ 1;
        for i in 0..6 {
            for j in 0..6 {
                assert!((m[(swap(i), swap(j))].conj() - m_neg[(i, j)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_coupling_gives_zero_efficiency() {
        let r = solve_response(&reference_at(0.0), 30.0).unwrap();
        assert_eq!(r.tac, 0.0);
        assert_eq!(stokes_closed_form(&reference_at(0.0), 30.0).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(resonant_tac(&reference_at(0.0)).unwrap(), Complex64::new(0.0, 0.0));
        let no_gc = OperatingPoint { g_c: 0.0, ..reference_at(3.0) };
        assert_eq!(stokes_closed_form(&no_gc, 30.0).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn peak_efficiency_near_twelve() {
        let r = solve_response(&reference_at(3.48), 30.0).unwrap();
        assert!((r.tac - 12.0).abs() < 0.5, "{}", r.tac);
        assert!((r.tac - r.t_ac.norm_sqr()).abs() < 1e-12 * r.tac);
        let out = (2.0 * 30.0f64).sqrt() * r.a_minus;
        assert!((r.a_out_minus - out).norm() < 1e-15 * out.norm().max(1e-300));
    }

    #[test]
    fn resonant_formula_hand_value() {
        let t = resonant_tac(&reference_at(3.475)).unwrap();
        assert!((t.norm_sqr() - 11.94).abs() < 0.01, "{}", t.norm_sqr());
    }

    #[test]
    fn optimal_coupling_values() {
        assert!((optimal_coupling(&reference_at(0.0)) - 3.475).abs() < 1e-3);
        let narrow = OperatingPoint { kappa_a: 2.0, ..reference_at(0.0) };
        assert!((optimal_coupling(&narrow) - 0.849).abs() < 1e-3);
        let limit = OperatingPoint { gamma_b: 1e-300, g_c: 0.0, ..reference_at(0.0) };
        assert!(optimal_coupling(&limit) < 1e-140);
    }

    #[test]
    fn independent_of_signal_amplitude() {
        let op = reference_at(3.2);
        let base = solve_response(&op, 30.1).unwrap().tac;
        for k in 0..7 {
            let eps = 10f64.powi(-k) * 1e-3;
            let r = solve_response(&OperatingPoint { eps_ir: eps, ..op.clone() }, 30.1).unwrap();
            assert!((r.tac - base).abs() <= 1e-9 * base);
        }
    }

    #[test]
    fn closed_forms_agree_with_exact_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let nu = rng.random_range(10.0..50.0);
            let op = OperatingPoint {
                delta: -nu,
                cal_ga: Complex64::from_polar(rng.random_range(0.05..2.0), rng.random_range(0.0..6.3)),
                g_c: rng.random_range(0.05..0.6),
                kappa_a: rng.random_range(1.0..40.0),
                kappa_c: rng.random_range(0.1..2.0),
                gamma_b: rng.random_range(0.05..0.5),
                nu_b: nu,
                nu_c: nu,
                eps_ir: 1e-3,
                steady: None,
            };
            let exact = solve_response(&op, nu).unwrap().tac;
            let res = resonant_tac(&op).unwrap().norm_sqr();
            assert!((res - exact).abs() <= 1e-8 * exact, "{res} vs {exact}");
            for dw in [-0.5, -0.1, 0.0, 0.2, 0.5] {
                let exact = solve_response(&op, nu + dw).unwrap().tac;
                let cf = tac_closed_form(&op, nu + dw).unwrap();
                assert!((cf - exact).abs() <= 1e-8 * exact, "{cf} vs {exact}");
            }
        }
    }

    #[test]
    fn zero_signal_rejected() {
        let op = OperatingPoint { eps_ir: 0.0, ..reference_at(1.0) };
        assert_eq!(solve_response(&op, 30.0), Err(ResponseError::ZeroSignal));
    }
}
