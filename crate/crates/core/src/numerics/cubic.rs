use super::NumericsError;

/// Real roots of `c0 + c1 x + c2 x^2 + c3 x^3`, ascending.
///
/// Closed form from the depressed cubic (trigonometric branch for three real
/// roots, Cardano otherwise) followed by one Newton step per root on the
/// original polynomial. Repeated roots are reported once. Exactly-zero
/// leading coefficients reduce the degree.
pub fn real_cubic_roots(c0: f64, c1: f64, c2: f64, c3: f64) -> Result<Vec<f64>, NumericsError> {
    if c0 == 0.0 && c1 == 0.0 && c2 == 0.0 && c3 == 0.0 {
        return Err(NumericsError::DegenerateAllZero);
    }
    let mut roots = if c0 == 0.0 {
        // x = 0 is exact; the rest comes from the quotient.
        let mut r = match (c3 != 0.0, c2 != 0.0) {
            (true, _) => quadratic_roots(c1, c2, c3),
            (false, true) => vec![-c1 / c2],
            (false, false) => Vec::new(),
        };
        r.push(0.0);
        r
    } else if c3 != 0.0 {
        depressed_cubic_roots(c2 / c3, c1 / c3, c0 / c3)
    } else if c2 != 0.0 {
        quadratic_roots(c0, c1, c2)
    } else if c1 != 0.0 {
        vec![-c0 / c1]
    } else {
        Vec::new()
    };

    for r in roots.iter_mut().filter(|r| **r != 0.0) {
        *r = newton_polish(*r, [c0, c1, c2, c3]);
    }
    roots.sort_by(f64::total_cmp);

    let scale = c0.abs().max(c1.abs()).max(c2.abs()).max(c3.abs());
    let mut out: Vec<f64> = Vec::with_capacity(roots.len());
    for r in roots {
        match out.last() {
            Some(&prev) if (r - prev).abs() <= 1e-7 * (1.0 + r.abs().max(prev.abs())) => {
                // Keep whichever copy of a collapsed root has smaller residual.
                if eval_cubic([c0, c1, c2, c3], r).abs() < eval_cubic([c0, c1, c2, c3], prev).abs() {
                    *out.last_mut().unwrap() = r;
                }
            }
            _ => out.push(r),
        }
    }
    debug_assert!(out.iter().all(|&r| {
        eval_cubic([c0, c1, c2, c3], r).abs() <= 1e-9 * scale * r.abs().max(1.0).powi(3)
    }));
    Ok(out)
}

/// Discriminant of the cubic; positive means three distinct real roots,
/// negative one real root and a complex pair.
pub fn cubic_discriminant(c0: f64, c1: f64, c2: f64, c3: f64) -> f64 {
    let (a, b, c, d) = (c3, c2, c1, c0);
    18.0 * a * b * c * d - 4.0 * b.powi(3) * d + b * b * c * c - 4.0 * a * c.powi(3)
        - 27.0 * a * a * d * d
}

fn eval_cubic(c: [f64; 4], x: f64) -> f64 {
    ((c[3] * x + c[2]) * x + c[1]) * x + c[0]
}

fn newton_polish(x: f64, c: [f64; 4]) -> f64 {
    let f = eval_cubic(c, x);
    let df = (3.0 * c[3] * x + 2.0 * c[2]) * x + c[1];
    if df == 0.0 || !df.is_finite() {
        return x;
    }
    let next = x - f / df;
    if next.is_finite() && eval_cubic(c, next).abs() <= f.abs() {
        next
    } else {
        x
    }
}

fn quadratic_roots(c0: f64, c1: f64, c2: f64) -> Vec<f64> {
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return Vec::new();
    }
    if disc == 0.0 {
        return vec![-c1 / (2.0 * c2)];
    }
    let sign = if c1 >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (c1 + sign * disc.sqrt());
    vec![q / c2, c0 / q]
}

/// Roots of the monic cubic `x^3 + a x^2 + b x + c`.
fn depressed_cubic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;

    // Discriminant of t^3 + p t + q, with a relative band for the repeated-root case.
    let d = -(4.0 * p * p * p + 27.0 * q * q);
    let d_scale = 4.0 * (p * p * p).abs() + 27.0 * q * q;

    if d_scale == 0.0 {
        return vec![-shift];
    }
    if d.abs() <= 1e-12 * d_scale {
        // One simple and one double root.
        if p == 0.0 {
            return vec![-shift];
        }
        return vec![3.0 * q / p - shift, -1.5 * q / p - shift];
    }
    if d > 0.0 {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - shift)
            .collect()
    } else {
        let s = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        let big = if q == 0.0 { s.cbrt() } else { -q.signum() * (q.abs() / 2.0 + s).cbrt() };
        let small = if big != 0.0 { -p / (3.0 * big) } else { 0.0 };
        vec![big + small - shift]
    }
}
