use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::NumericsError;

pub const MAX_POLY_DEGREE: usize = 6;
pub const DK_MAX_ITERATIONS: usize = 500;

/// Real polynomial with coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    /// Trailing (highest-degree) zeros are dropped.
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self, NumericsError> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(NumericsError::NonFinite);
        }
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() || (coeffs.len() == 1 && coeffs[0] == 0.0) {
            return Err(NumericsError::DegenerateAllZero);
        }
        if coeffs.len() - 1 > MAX_POLY_DEGREE {
            return Err(NumericsError::DegreeTooHigh { degree: coeffs.len() - 1 });
        }
        Ok(Self { coeffs })
    }

    /// Monic polynomial with the given complex roots; imaginary parts of the
    /// expanded coefficients are discarded, so roots should come in
    /// conjugate pairs.
    pub fn from_roots(roots: &[Complex64]) -> Result<Self, NumericsError> {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (k, ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= ck * r;
            }
            c = next;
        }
        Self::new(c.into_iter().map(|z| z.re).collect())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn monic(&self) -> Self {
        let lead = self.leading();
        Self {
            coeffs: self.coeffs.iter().map(|c| c / lead).collect(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Magnitude scale for residual tests at `z`: sum of |c_k| |z|^k.
    pub fn scale_at(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.abs())
    }
}

/// All complex roots by Durand–Kerner (Weierstrass) iteration.
///
/// Starts from a rotated circle whose radius is the Fujiwara bound, updates
/// in place, and stops when every step is below `1e-12 (1 + |z|)` or every
/// residual sits at rounding level.
pub fn poly_roots(p: &RealPolynomial) -> Result<Vec<Complex64>, NumericsError> {
    let n = p.degree();
    if n == 0 {
        return Err(NumericsError::DegreeTooLow);
    }
    let monic = p.monic();
    let c = monic.coeffs();

    if n == 1 {
        return Ok(vec![Complex64::new(-c[0], 0.0)]);
    }

    let radius = (1..=n)
        .map(|k| {
            let ck = c[n - k].abs();
            if k == n {
                (ck / 2.0).powf(1.0 / k as f64)
            } else {
                ck.powf(1.0 / k as f64)
            }
        })
        .fold(0.0, f64::max)
        * 2.0;
    let radius = if radius > 0.0 { radius } else { 1.0 };

    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    let mut iterations = 0;
    let converged = loop {
        if iterations == DK_MAX_ITERATIONS {
            break false;
        }
        iterations += 1;
        let mut max_step_ratio: f64 = 0.0;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                // Coincident iterates: nudge apart.
                let nudge = 1e-8 * (1.0 + z[i].norm());
                z[i] += Complex64::new(nudge, 1e-8);
                max_step_ratio = f64::INFINITY;
                continue;
            }
            let step = monic.eval_complex(z[i]) / denom;
            z[i] -= step;
            max_step_ratio = max_step_ratio.max(step.norm() / (1.0 + z[i].norm()));
        }
        if max_step_ratio < 1e-12 {
            break true;
        }
        let at_rounding = z
            .iter()
            .all(|&zi| monic.eval_complex(zi).norm() <= 8.0 * f64::EPSILON * monic.scale_at(zi));
        if at_rounding {
            break true;
        }
    };

    let residual = z
        .iter()
        .map(|&zi| monic.eval_complex(zi).norm() / monic.scale_at(zi).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    if !converged || residual > 1e-8 {
        return Err(NumericsError::NoConvergence {
            iterations,
            best: z,
            residual,
        });
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matrix::{solve_complex_linear, ComplexMatrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn contains(roots: &[Complex64], target: Complex64, tol: f64) -> bool {
        roots.iter().any(|r| (r - target).norm() < tol)
    }

    #[test]
    fn imaginary_pair() {
        let p = RealPolynomial::new(vec![1.0, 0.0, 1.0]).unwrap();
        let r = poly_roots(&p).unwrap();
        assert_eq!(r.len(), 2);
        assert!(contains(&r, c(0.0, 1.0), 1e-12));
        assert!(contains(&r, c(0.0, -1.0), 1e-12));
    }

    #[test]
    fn factored_real_roots() {
        // (x+1)(x+2)(x+3)
        let p = RealPolynomial::new(vec![6.0, 11.0, 6.0, 1.0]).unwrap();
        let r = poly_roots(&p).unwrap();
        for k in 1..=3 {
            assert!(contains(&r, c(-(k as f64), 0.0), 1e-10));
        }
    }

    #[test]
    fn trailing_zero_coefficients_are_trimmed() {
        let p = RealPolynomial::new(vec![-2.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.degree(), 1);
        assert!(contains(&poly_roots(&p).unwrap(), c(2.0, 0.0), 1e-15));
    }

    #[test]
    fn constant_has_no_roots() {
        let p = RealPolynomial::new(vec![3.0]).unwrap();
        assert!(matches!(poly_roots(&p), Err(NumericsError::DegreeTooLow)));
        assert!(matches!(
            RealPolynomial::new(vec![0.0, 0.0]),
            Err(NumericsError::DegenerateAllZero)
        ));
    }

    /// Companion matrix of a monic polynomial (last column holds -c_k).
    fn companion(p: &RealPolynomial) -> ComplexMatrix {
        let m = p.monic();
        let n = m.degree();
        let mut a = ComplexMatrix::zeros(n, n);
        for i in 1..n {
            a[(i, i - 1)] = c(1.0, 0.0);
        }
        for i in 0..n {
            a[(i, n - 1)] = c(-m.coeffs()[i], 0.0);
        }
        a
    }

    /// Shifted inverse power iteration on the companion matrix.
    fn inverse_iteration(a: &ComplexMatrix, shift: Complex64) -> Complex64 {
        let n = a.rows();
        let mut shifted = a.clone();
        for i in 0..n {
            shifted[(i, i)] -= shift;
        }
        let mut v = vec![c(1.0, 0.3); n];
        let mut lambda = shift;
        for _ in 0..200 {
            let w = solve_complex_linear(&shifted, &v).unwrap();
            let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            v = w.iter().map(|x| x / norm).collect();
            let av = a.mul_vec(&v);
            let num: Complex64 = v.iter().zip(&av).map(|(x, y)| x.conj() * y).sum();
            lambda = num;
        }
        lambda
    }

    #[test]
    fn matches_companion_matrix_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            // Stable pairs -s ± i w.
            let mut eig = Vec::new();
            for _ in 0..3 {
                let s = rng.random_range(0.1..2.0);
                let w = rng.random_range(0.5..5.0);
                eig.push(c(-s, w));
                eig.push(c(-s, -w));
            }
            let p = RealPolynomial::from_roots(&eig).unwrap();
            let roots = poly_roots(&p).unwrap();
            let comp = companion(&p);
            for e in &eig {
                let oracle = inverse_iteration(&comp, e + c(1e-3, -1e-3));
                assert!(contains(&roots, oracle, 1e-6), "oracle {oracle} not in {roots:?}");
            }
        }
    }

    #[test]
    fn vieta_relations_on_random_degree_six() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let coeffs: Vec<f64> = (0..7)
                .map(|k| {
                    let v: f64 = rng.random_range(-10.0..10.0);
                    if k == 6 && v.abs() < 0.5 { 1.0 } else { v }
                })
                .collect();
            let p = RealPolynomial::new(coeffs.clone()).unwrap();
            let roots = poly_roots(&p).unwrap();
            let sum: Complex64 = roots.iter().sum();
            let prod: Complex64 = roots.iter().product();
            let want_sum = -coeffs[5] / coeffs[6];
            let want_prod = coeffs[0] / coeffs[6];
            let tol_sum = 1e-6 * want_sum.abs().max(1.0);
            let tol_prod = 1e-6 * want_prod.abs().max(1.0);
            assert!((sum - want_sum).norm() < tol_sum, "sum {sum} vs {want_sum}");
            assert!((prod - want_prod).norm() < tol_prod, "prod {prod} vs {want_prod}");
            for r in &roots {
                assert!(p.eval_complex(*r).norm() <= 1e-8 * p.scale_at(*r));
            }
        }
    }
}
