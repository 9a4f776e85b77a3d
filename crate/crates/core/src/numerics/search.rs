use super::NumericsError;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
///
/// Assumes `f` is unimodal on the bracket; nothing checks that.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64), NumericsError>
where
    F: FnMut(f64) -> f64,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(NumericsError::InvalidBracket { lo, hi });
    }
    let tol = tol.max(f64::EPSILON * (lo.abs() + hi.abs()));
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)))
}

/// Full width at half maximum of a sampled curve.
///
/// The half-maximum crossings are the outermost ones on either side of the
/// global maximum, each located by linear interpolation between the two
/// bracketing samples.
pub fn fwhm(xs: &[f64], ys: &[f64]) -> Result<f64, NumericsError> {
    half_max_crossings(xs, ys).map(|(l, r)| r - l)
}

/// Left and right half-maximum crossings used by [`fwhm`].
pub fn half_max_crossings(xs: &[f64], ys: &[f64]) -> Result<(f64, f64), NumericsError> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(NumericsError::InvalidGrid("need at least 3 samples of equal length"));
    }
    if xs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(NumericsError::InvalidGrid("abscissae must be strictly ascending"));
    }
    if ys.iter().any(|y| !y.is_finite() || *y < 0.0) {
        return Err(NumericsError::InvalidGrid("values must be finite and nonnegative"));
    }
    let (imax, ymax) = ys
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    if ymax <= 0.0 {
        return Err(NumericsError::NoPeak);
    }
    let half = 0.5 * ymax;

    let first = ys.iter().position(|&y| y >= half).unwrap_or(imax);
    let last = ys.iter().rposition(|&y| y >= half).unwrap_or(imax);
    let n = xs.len();

    let left = if first == 0 {
        None
    } else {
        Some(interpolate_crossing(xs[first - 1], ys[first - 1], xs[first], ys[first], half))
    };
    let right = if last == n - 1 {
        None
    } else {
        Some(interpolate_crossing(xs[last], ys[last], xs[last + 1], ys[last + 1], half))
    };

    match (left, right) {
        (Some(l), Some(r)) => Ok((l, r)),
        (l, r) => Err(NumericsError::HalfMaxNotBracketed {
            truncated_width: r.unwrap_or(xs[n - 1]) - l.unwrap_or(xs[0]),
            left_truncated: l.is_none(),
            right_truncated: r.is_none(),
        }),
    }
}

fn interpolate_crossing(x0: f64, y0: f64, x1: f64, y1: f64, level: f64) -> f64 {
    if y1 == y0 {
        return 0.5 * (x0 + x1);
    }
    x0 + (level - y0) * (x1 - x0) / (y1 - y0)
}
