//! Self-consistent mean fields of the driven cavity–molecule system.
//!
//! With `X_B = ⟨B⟩ + ⟨B⟩*` the whole steady-state network collapses to one
//! real scalar equation: `⟨c⟩` and `Im⟨B⟩` follow linearly from `X_B` and the
//! cavity intensity, and the intensity depends on `X_B` only through the
//! effective detuning `Δ = Δ0 + G_a X_B`. Clearing denominators gives a real
//! cubic in `X_B`; the damped fixed-point iteration solves the same equation
//! and is used as the default route for a given bare detuning.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::model::{CollectiveCouplings, DetuningMode, ValidatedParams};
use crate::numerics::{real_cubic_roots, NumericsError};

pub const FIXED_POINT_DAMPING: f64 = 0.5;
pub const FIXED_POINT_MAX_ITER: usize = 10_000;
pub const FIXED_POINT_TOL: f64 = 1e-12;
const MIN_DAMPING: f64 = 1.0 / 64.0;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadyState {
    pub a_ss: Complex64,
    pub b_ss: Complex64,
    pub c_ss: Complex64,
    /// Effective detuning `Δ`, THz.
    pub delta_eff: f64,
    /// Bare detuning `Δ0`, THz.
    pub delta0: f64,
    /// `⟨B⟩ + ⟨B⟩*`.
    pub x_b: f64,
    /// Linearized coupling `𝒢_a = G_a ⟨a⟩`, THz.
    pub cal_ga: Complex64,
    /// Index of the cubic root (ascending in `x_b`); 0 for the single-valued routes.
    pub branch_id: usize,
    pub converged: bool,
    pub iterations: usize,
    /// Relative residuals of the `⟨a⟩`, `⟨B⟩`, `⟨c⟩` relations.
    pub residuals: [f64; 3],
}

impl SteadyState {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SteadyStateError {
    #[error("fixed-point iteration did not converge in {iterations} iterations (x_B = {last_x_b})")]
    NoConvergence { iterations: usize, last_x_b: f64 },
    #[error("steady state is not defined for a prescribed linearized coupling")]
    PrescribedCoupling,
    #[error("cubic branches require a fixed bare detuning")]
    NeedsBareDetuning,
    #[error("static response of the vibration is singular (bilinear coupling too strong)")]
    SingularStaticResponse,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// `⟨a⟩ = ε_p / (iΔ + κ_a)`.
pub fn cavity_amplitude(delta: f64, eps_p: f64, kappa_a: f64) -> Complex64 {
    Complex64::new(eps_p, 0.0) / Complex64::new(kappa_a, delta)
}

/// Linear-response constants of the reduced scalar problem.
struct Reduced {
    g: CollectiveCouplings,
    /// `X_B = -k_b (G_a |a|^2 + G_c X_c)`.
    k_b: f64,
    /// `1 - k_b G_c k_c`: static stiffness left after the IR mode responds.
    stiffness: f64,
}

impl Reduced {
    fn new(p: &ValidatedParams) -> Self {
        let g = p.couplings();
        // X_c = -k_c X_B
        let k_c = 2.0 * g.g_c * p.nu_c / (p.kappa_c * p.kappa_c + p.nu_c * p.nu_c);
        let k_b = 2.0 * p.nu_b / (p.gamma_b * p.gamma_b + p.nu_b * p.nu_b);
        Self { g, k_b, stiffness: 1.0 - k_b * g.g_c * k_c }
    }

    /// `F(X_B)` whose fixed point is the steady state.
    fn map(&self, p: &ValidatedParams, delta0: f64, x_b: f64) -> f64 {
        let delta = delta0 + self.g.g_a * x_b;
        let intensity = cavity_amplitude(delta, p.eps_p, p.kappa_a).norm_sqr();
        -self.k_b * self.g.g_a * intensity / self.stiffness
    }

    /// Newton refinement of `x = F(x)` to working precision; keeps `x` if no step improves it.
    fn polish(&self, p: &ValidatedParams, delta0: f64, mut x: f64) -> f64 {
        let ga = self.g.g_a;
        let mut r = (x - self.map(p, delta0, x)).abs();
        for _ in 0..8 {
            let f = self.map(p, delta0, x);
            let d = delta0 + ga * x;
            let df = -f * 2.0 * ga * d / (d * d + p.kappa_a * p.kappa_a);
            let next = x - (x - f) / (1.0 - df);
            let rn = (next - self.map(p, delta0, next)).abs();
            if !(rn < r) {
                break;
            }
            x = next;
            r = rn;
        }
        x
    }
}

fn assemble(
    p: &ValidatedParams,
    red: &Reduced,
    delta: f64,
    delta0: f64,
    x_b: f64,
    branch_id: usize,
    iterations: usize,
) -> SteadyState {
    let g = red.g;
    let a_ss = cavity_amplitude(delta, p.eps_p, p.kappa_a);
    let c_ss = -I * g.g_c * x_b / Complex64::new(p.kappa_c, p.nu_c);
    let x_c = 2.0 * c_ss.re;
    let b_ss = -I * (g.g_a * a_ss.norm_sqr() + g.g_c * x_c) / Complex64::new(p.gamma_b, p.nu_b);
    let mut state = SteadyState {
        a_ss,
        b_ss,
        c_ss,
        delta_eff: delta,
        delta0,
        x_b,
        cal_ga: g.g_a * a_ss,
        branch_id,
        converged: true,
        iterations,
        residuals: [0.0; 3],
    };
    state.residuals = relation_residuals(p, &state);
    state
}

fn rel_diff(lhs: Complex64, rhs: Complex64) -> f64 {
    let scale = lhs.norm().max(rhs.norm());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).norm() / scale
    }
}

/// Relative residuals of the three steady-state relations evaluated on the
/// stored amplitudes, in the order `⟨a⟩`, `⟨B⟩`, `⟨c⟩`.
pub fn relation_residuals(p: &ValidatedParams, s: &SteadyState) -> [f64; 3] {
    let g = p.couplings();
    let x_b = 2.0 * s.b_ss.re;
    let x_c = 2.0 * s.c_ss.re;
    let delta = s.delta0 + g.g_a * x_b;
    let a_rhs = cavity_amplitude(delta, p.eps_p, p.kappa_a);
    let b_rhs = -I * (g.g_a * s.a_ss.norm_sqr() + g.g_c * x_c) / Complex64::new(p.gamma_b, p.nu_b);
    let c_rhs = -I * g.g_c * x_b / Complex64::new(p.kappa_c, p.nu_c);
    [rel_diff(s.a_ss, a_rhs), rel_diff(s.b_ss, b_rhs), rel_diff(s.c_ss, c_rhs)]
}

/// Steady state for a fixed effective or bare detuning.
///
/// A fixed `Δ` is evaluated directly. A fixed `Δ0` runs the damped
/// fixed-point iteration on `X_B` from zero, halving the damping whenever a
/// step fails to contract, then polishes the result with Newton steps.
pub fn solve_self_consistent(p: &ValidatedParams) -> Result<SteadyState, SteadyStateError> {
    let red = Reduced::new(p);
    if red.stiffness == 0.0 {
        return Err(SteadyStateError::SingularStaticResponse);
    }
    match p.detuning_mode {
        DetuningMode::PrescribedGa { .. } => Err(SteadyStateError::PrescribedCoupling),
        DetuningMode::FixedDelta { delta_thz } => {
            let intensity = cavity_amplitude(delta_thz, p.eps_p, p.kappa_a).norm_sqr();
            let x_b = -red.k_b * red.g.g_a * intensity / red.stiffness;
            let delta0 = delta_thz - red.g.g_a * x_b;
            Ok(assemble(p, &red, delta_thz, delta0, x_b, 0, 0))
        }
        DetuningMode::FixedDelta0 { delta0_thz } => {
            let mut x = 0.0;
            let mut damping = FIXED_POINT_DAMPING;
            let mut prev_step = f64::INFINITY;
            for it in 1..=FIXED_POINT_MAX_ITER {
                let next = (1.0 - damping) * x + damping * red.map(p, delta0_thz, x);
                let step = (next - x).abs();
                x = next;
                if step < FIXED_POINT_TOL * (1.0 + x.abs()) {
                    let x = red.polish(p, delta0_thz, x);
                    let delta = delta0_thz + red.g.g_a * x;
                    return Ok(assemble(p, &red, delta, delta0_thz, x, 0, it));
                }
                // Steep negative slopes make the 0.5-damped map oscillate.
                if step >= prev_step && damping > MIN_DAMPING {
                    damping *= 0.5;
                }
                prev_step = step;
            }
            Err(SteadyStateError::NoConvergence {
                iterations: FIXED_POINT_MAX_ITER,
                last_x_b: x,
            })
        }
    }
}

/// All steady states for a fixed bare detuning, one per real root of the
/// cubic in `X_B`, ordered by ascending `X_B`.
pub fn solve_cubic_branches(p: &ValidatedParams) -> Result<Vec<SteadyState>, SteadyStateError> {
    let DetuningMode::FixedDelta0 { delta0_thz: d0 } = p.detuning_mode else {
        return Err(SteadyStateError::NeedsBareDetuning);
    };
    let red = Reduced::new(p);
    let s = red.stiffness;
    let ga = red.g.g_a;
    // s X ((Δ0 + G_a X)^2 + κ_a^2) + k_b G_a ε_p^2 = 0
    let c3 = s * ga * ga;
    let c2 = 2.0 * s * d0 * ga;
    let c1 = s * (d0 * d0 + p.kappa_a * p.kappa_a);
    let c0 = red.k_b * ga * p.eps_p * p.eps_p;
    let roots = real_cubic_roots(c0, c1, c2, c3)?;
    Ok(roots
        .into_iter()
        .enumerate()
        .map(|(i, x)| assemble(p, &red, d0 + ga * x, d0, x, i, 0))
        .collect())
}

/// Default steady state: the direct route, or for a fixed bare detuning the
/// fixed-point solution (connected to `X_B = 0`), falling back to the
/// smallest-`|X_B|` cubic branch if the iteration stalls.
pub fn default_steady_state(p: &ValidatedParams) -> Result<SteadyState, SteadyStateError> {
    match solve_self_consistent(p) {
        Err(SteadyStateError::NoConvergence { iterations, .. }) => {
            log::warn!("fixed-point iteration stalled after {iterations} steps; using cubic branch");
            let branches = solve_cubic_branches(p)?;
            let mut best = branches
                .into_iter()
                .min_by(|a, b| a.x_b.abs().total_cmp(&b.x_b.abs()))
                .ok_or(SteadyStateError::Numerics(NumericsError::DegenerateAllZero))?;
            best.iterations = iterations;
            Ok(best)
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SystemParams;

    fn fixed_delta0(delta0: f64, eps_p: f64) -> ValidatedParams {
        SystemParams {
            eps_p,
            detuning_mode: DetuningMode::FixedDelta0 { delta0_thz: delta0 },
            ..SystemParams::reference()
        }
        .validate()
        .unwrap()
    }

    #[test]
    fn cavity_amplitude_examples() {
        let a = cavity_amplitude(0.0, 500.0, 30.0);
        assert!((a - Complex64::new(500.0 / 30.0, 0.0)).norm() < 1e-12);
        assert_eq!(cavity_amplitude(-30.0, 0.0, 30.0), Complex64::new(0.0, 0.0));
        let b = cavity_amplitude(-30.0, 500.0, 30.0);
        assert!((b.norm() - 500.0 / (1800f64).sqrt()).abs() < 1e-12);
        assert!((b.norm() - 11.785).abs() < 1e-3);
    }

    #[test]
    fn undriven_is_trivial() {
        let p = fixed_delta0(-30.0, 0.0);
        let s = solve_self_consistent(&p).unwrap();
        assert_eq!(s.a_ss, Complex64::new(0.0, 0.0));
        assert_eq!(s.b_ss, Complex64::new(0.0, 0.0));
        assert_eq!(s.c_ss, Complex64::new(0.0, 0.0));
        assert_eq!(s.delta_eff, -30.0);
        let branches = solve_cubic_branches(&p).unwrap();
        assert_eq!(branches.len(), 1);
        assert_eq!(branches[0].x_b, 0.0);
    }

    #[test]
    fn decoupled_vis_mode() {
        let p = SystemParams {
            g_a: 0.0,
            detuning_mode: DetuningMode::FixedDelta0 { delta0_thz: -12.0 },
            ..SystemParams::reference()
        }
        .validate()
        .unwrap();
        let s = solve_self_consistent(&p).unwrap();
        assert_eq!(s.delta_eff, -12.0);
        assert_eq!(s.a_ss, cavity_amplitude(-12.0, 500.0, 30.0));
        assert_eq!(s.b_ss, Complex64::new(0.0, 0.0));
        assert_eq!(s.c_ss, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn fixed_delta_reference_coupling() {
        let p = SystemParams::reference().validate().unwrap();
        let s = solve_self_consistent(&p).unwrap();
        assert_eq!(s.delta_eff, -30.0);
        assert_eq!(s.a_ss, cavity_amplitude(-30.0, 500.0, 30.0));
        // G_a ≈ 0.25298 THz times |a| ≈ 11.785
        assert!((s.cal_ga.norm() - 2.98).abs() < 5e-3, "{}", s.cal_ga.norm());
        assert!(s.max_residual() <= 1e-10, "{:?}", s.residuals);
    }

    #[test]
    fn weak_pump_cubic_matches_fixed_point() {
        let p = fixed_delta0(-30.0, 1.0);
        let fp = solve_self_consistent(&p).unwrap();
        let branches = solve_cubic_branches(&p).unwrap();
        assert_eq!(branches.len(), 1);
        assert!((branches[0].x_b - fp.x_b).abs() <= 1e-8 * (1.0 + fp.x_b.abs()));
    }

    #[test]
    fn fixed_delta_and_fixed_delta0_agree() {
        let direct = solve_self_consistent(&SystemParams::reference().validate().unwrap()).unwrap();
        let p = fixed_delta0(direct.delta0, 500.0);
        let fp = solve_self_consistent(&p).unwrap();
        assert!((fp.delta_eff - direct.delta_eff).abs() < 1e-9);
        assert!((fp.a_ss - direct.a_ss).norm() < 1e-9 * direct.a_ss.norm());
        assert!((fp.b_ss - direct.b_ss).norm() < 1e-9 * direct.b_ss.norm());
    }

    #[test]
    fn bistable_lowest_branch_matches_fixed_point() {
        // Red-side bare detuning, strong optomechanical coupling: raise the
        // pump until the cubic develops three real roots.
        let base = SystemParams {
            g_a: 2.0,
            n_molecules: 1e7,
            ..SystemParams::reference()
        };
        let mut found = None;
        let mut eps = 10.0;
        while eps < 1e6 {
            let p = SystemParams {
                eps_p: eps,
                detuning_mode: DetuningMode::FixedDelta0 { delta0_thz: 200.0 },
                ..base.clone()
            }
            .validate()
            .unwrap();
            let branches = solve_cubic_branches(&p).unwrap();
            if branches.len() == 3 {
                found = Some((p, branches));
                break;
            }
            eps *= 1.1;
        }
        let (p, branches) = found.expect("no bistable pump found");
        for b in &branches {
            assert!(b.max_residual() <= 1e-10, "{:?}", b.residuals);
        }
        let lowest = branches
            .iter()
            .min_by(|a, b| a.x_b.abs().total_cmp(&b.x_b.abs()))
            .unwrap();
        let fp = solve_self_consistent(&p).unwrap();
        assert!(
            (lowest.x_b - fp.x_b).abs() <= 1e-8 * (1.0 + fp.x_b.abs()),
            "{} vs {}",
            lowest.x_b,
            fp.x_b
        );
    }

    #[test]
    fn prescribed_mode_has_no_steady_state() {
        let p = SystemParams::reference()
            .with_prescribed_ga(3.0, -30.0)
            .validate()
            .unwrap();
        assert_eq!(solve_self_consistent(&p), Err(SteadyStateError::PrescribedCoupling));
        assert_eq!(solve_cubic_branches(&p), Err(SteadyStateError::NeedsBareDetuning));
    }
}
