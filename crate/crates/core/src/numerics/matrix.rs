use num_complex::Complex64;

use super::NumericsError;

/// Small dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        assert_eq!(rows * cols, data.len(), "entry count does not match shape");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Largest system the dense solver accepts.
pub const MAX_SOLVE_DIM: usize = 12;

/// Relative pivot threshold below which a matrix is treated as singular.
pub const PIVOT_REL_TOL: f64 = 1e-14;

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
///
/// The pivot at each step is the entry of largest modulus in the remaining
/// column. A pivot smaller than `PIVOT_REL_TOL` times the largest initial
/// entry reports [`NumericsError::SingularMatrix`].
pub fn solve_complex_linear(
    a: &ComplexMatrix,
    b: &[Complex64],
) -> Result<Vec<Complex64>, NumericsError> {
    let n = a.rows();
    if !a.is_square() || b.len() != n {
        return Err(NumericsError::DimensionMismatch {
            rows: a.rows(),
            cols: a.cols(),
            rhs: b.len(),
        });
    }
    if n > MAX_SOLVE_DIM {
        return Err(NumericsError::TooLarge { n, max: MAX_SOLVE_DIM });
    }

    let scale = a.max_abs();
    let threshold = PIVOT_REL_TOL * scale;
    let mut m = a.data.clone();
    let mut x = b.to_vec();

    for col in 0..n {
        let (pivot_row, pivot_mod) = (col..n)
            .map(|r| (r, m[r * n + col].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pivot_mod > threshold) {
            return Err(NumericsError::SingularMatrix {
                column: col,
                pivot: pivot_mod.max(0.0),
                scale,
            });
        }
        if pivot_row != col {
            for j in 0..n {
                m.swap(col * n + j, pivot_row * n + j);
            }
            x.swap(col, pivot_row);
        }
        let pivot = m[col * n + col];
        for r in col + 1..n {
            let factor = m[r * n + col] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            m[r * n + col] = Complex64::new(0.0, 0.0);
            for j in col + 1..n {
                let upper = m[col * n + j];
                m[r * n + j] -= factor * upper;
            }
            let upper_rhs = x[col];
            x[r] -= factor * upper_rhs;
        }
    }

    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in i + 1..n {
            acc -= m[i * n + j] * x[j];
        }
        x[i] = acc / m[i * n + i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn inf_norm(v: &[Complex64]) -> f64 {
        v.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn random_well_conditioned(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        // Diagonally dominant: condition number stays modest.
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
            m[(i, i)] += c(2.0 * n as f64, 0.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        }
        m
    }

    #[test]
    fn identity_returns_rhs() {
        let b = [c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0)];
        let x = solve_complex_linear(&ComplexMatrix::identity(3), &b).unwrap();
        assert_eq!(x, b.to_vec());
    }

    #[test]
    fn diagonal_inverse() {
        let a = ComplexMatrix::from_diagonal(&[c(2.0, 0.0), c(0.0, 1.0)]);
        let x = solve_complex_linear(&a, &[c(4.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!((x[0] - c(2.0, 0.0)).norm() < 1e-15);
        assert!((x[1] - c(0.0, -2.0)).norm() < 1e-15);
    }

    #[test]
    fn recovers_known_solution_6x6() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_well_conditioned(&mut rng, 6);
        let x0: Vec<_> = (0..6)
            .map(|_| c(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)))
            .collect();
        let b = a.mul_vec(&x0);
        let x = solve_complex_linear(&a, &b).unwrap();
        for (xi, x0i) in x.iter().zip(&x0) {
            assert!((xi - x0i).norm() < 1e-10);
        }
    }

    #[test]
    fn residual_bound_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..1000 {
            let n = 1 + trial % MAX_SOLVE_DIM;
            let a = random_well_conditioned(&mut rng, n);
            let b: Vec<_> = (0..n)
                .map(|_| c(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)))
                .collect();
            let x = solve_complex_linear(&a, &b).unwrap();
            let r: Vec<_> = a.mul_vec(&x).iter().zip(&b).map(|(ax, bi)| ax - bi).collect();
            assert!(inf_norm(&r) / inf_norm(&b).max(1.0) <= 1e-10, "trial {trial}");
        }
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a = ComplexMatrix::from_row_major(
            2,
            2,
            vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        );
        let x = solve_complex_linear(&a, &[c(3.0, 0.0), c(5.0, 0.0)]).unwrap();
        assert_eq!(x, vec![c(5.0, 0.0), c(3.0, 0.0)]);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = ComplexMatrix::from_row_major(
            2,
            2,
            vec![c(1.0, 1.0), c(2.0, 2.0), c(2.0, 2.0), c(4.0, 4.0)],
        );
        let err = solve_complex_linear(&a, &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, NumericsError::SingularMatrix { column: 1, .. }));
    }

    #[test]
    fn rejects_non_square_and_oversized() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            solve_complex_linear(&a, &[c(0.0, 0.0); 2]),
            Err(NumericsError::DimensionMismatch { .. })
        ));
        let big = ComplexMatrix::identity(13);
        assert!(matches!(
            solve_complex_linear(&big, &[c(1.0, 0.0); 13]),
            Err(NumericsError::TooLarge { n: 13, .. })
        ));
    }
}
