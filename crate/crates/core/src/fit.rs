//! Small least-squares fits used to extract slopes from kick series.

/// Least-squares line `y = a + b x`; returns `(intercept, slope)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need at least two points");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

/// Least-squares parabola `y = a + b x + c x^2`; returns `(a, b, c)`.
/// Solves the 3x3 normal equations with centered x for conditioning.
pub fn quadratic_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 3, "need at least three points");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let xs: Vec<f64> = x.iter().map(|v| v - mx).collect();

    let s = |p: u32| xs.iter().map(|v| v.powi(p as i32)).sum::<f64>();
    let sy = |p: u32| xs.iter().zip(y).map(|(v, yi)| v.powi(p as i32) * yi).sum::<f64>();
    let (s0, s1, s2, s3, s4) = (n, s(1), s(2), s(3), s(4));
    let (b0, b1, b2) = (sy(0), sy(1), sy(2));

    // Cramer on the symmetric system [[s0,s1,s2],[s1,s2,s3],[s2,s3,s4]].
    let det = s0 * (s2 * s4 - s3 * s3) - s1 * (s1 * s4 - s2 * s3) + s2 * (s1 * s3 - s2 * s2);
    let da = b0 * (s2 * s4 - s3 * s3) - s1 * (b1 * s4 - b2 * s3) + s2 * (b1 * s3 - b2 * s2);
    let db = s0 * (b1 * s4 - b2 * s3) - b0 * (s1 * s4 - s2 * s3) + s2 * (s1 * b2 - s2 * b1);
    let dc = s0 * (s2 * b2 - s3 * b1) - s1 * (s1 * b2 - s3 * b0) + b0 * (s1 * s3 - s2 * s2);
    let (a_c, b_c, c) = (da / det, db / det, dc / det);

    // Undo the centering: y = a_c + b_c (x - mx) + c (x - mx)^2.
    let b = b_c - 2.0 * c * mx;
    let a = a_c - b_c * mx + c * mx * mx;
    (a, b, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_line() {
        let x: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.5 - 2.0 * v).collect();
        let (a, b) = linear_fit(&x, &y);
        assert!((a - 3.5).abs() < 1e-12);
        assert!((b + 2.0).abs() < 1e-12);
    }

    #[test]
    fn recovers_exact_parabola() {
        let x: Vec<f64> = (0..60).map(|i| i as f64 * 0.5).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.0 + 0.25 * v - 0.125 * v * v).collect();
        let (a, b, c) = quadratic_fit(&x, &y);
        assert!((a - 1.0).abs() < 1e-9);
        assert!((b - 0.25).abs() < 1e-9);
        assert!((c + 0.125).abs() < 1e-10);
    }
}
