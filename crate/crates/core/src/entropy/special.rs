use std::f64::consts::PI;

use crate::error::{Error, Result};

// Below this the recurrence is applied before the asymptotic series.
const ASYMPTOTIC_THRESHOLD: f64 = 10.0;

// B_{2k} / (2k) for k = 1..=7.
const SERIES: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

/// The digamma function ψ(x) for x > 0.
///
/// Shifts x upward with ψ(x) = ψ(x+1) − 1/x until x ≥ 10, then sums
/// ln x − 1/(2x) − Σ B₂ₖ/(2k·x²ᵏ). Absolute error is below 1e-13 for x ≥ 1.
pub fn digamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(Error::Domain(format!(
            "digamma requires finite x > 0, got {x}"
        )));
    }
    let mut x = x;
    let mut shift = 0.0;
    while x < ASYMPTOTIC_THRESHOLD {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // Horner over powers of 1/x².
    let tail = SERIES.iter().rev().fold(0.0, |acc, c| acc * inv2 + c) * inv2;
    Ok(shift + x.ln() - 0.5 / x - tail)
}

/// ln of the volume of the unit Euclidean ball in `d` dimensions,
/// ln(π^{d/2} / Γ(d/2 + 1)).
///
/// `d/2 + 1` is an integer or half-integer, so ln Γ is summed exactly from
/// Γ(1) = 1 or Γ(1/2) = √π.
pub fn unit_ball_log_volume(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::Domain("unit ball dimension must be >= 1".into()));
    }
    Ok(0.5 * d as f64 * PI.ln() - ln_gamma_half_integer(d + 2))
}

/// ln Γ(m / 2) for integer m ≥ 1.
fn ln_gamma_half_integer(m: usize) -> f64 {
    if m.is_multiple_of(2) {
        // Γ(j) = (j-1)!
        (2..m / 2).map(|i| (i as f64).ln()).sum()
    } else {
        // Γ(j + 1/2) = √π · Π_{i=1..j} (i − 1/2)
        let j = m / 2;
        0.5 * PI.ln() + (1..=j).map(|i| (i as f64 - 0.5).ln()).sum::<f64>()
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision, clippy::inconsistent_digit_grouping)]
mod tests {
    use super::*;

    // 40-digit references computed with mpmath.
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

    #[test]
    fn digamma_closed_forms() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-13);
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-13);
        assert!((digamma(0.5).unwrap() - (-1.963_510_026_021_423_479_4)).abs() < 1e-12);
    }

    #[test]
    fn digamma_high_precision_references() {
        let cases = [
            (10.5f64, 2.303_001_034_297_686_375_272_6),
            (3.25, 1.016_990_911_068_179_036_354_9),
            (100.0, 4.600_161_852_738_087_400_198_6),
            (1e-3, -1000.575_571_931_810_279_654_76),
        ];
        for (x, want) in cases {
            let want: f64 = want;
            let got = digamma(x).unwrap();
            let tol = 1e-10 * want.abs().max(1.0);
            assert!(
                (got - want).abs() < tol,
                "digamma({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn digamma_recurrence() {
        for i in 1..200 {
            let x = 0.37 * i as f64;
            let lhs = digamma(x + 1.0).unwrap();
            let rhs = digamma(x).unwrap() + 1.0 / x;
            assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0), "x={x}");
        }
    }

    #[test]
    fn digamma_domain() {
        assert!(digamma(0.0).is_err());
        assert!(digamma(-1.5).is_err());
        assert!(digamma(f64::NAN).is_err());
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_log_volume(1).unwrap() - 2f64.ln()).abs() < 1e-14);
        assert!((unit_ball_log_volume(2).unwrap() - PI.ln()).abs() < 1e-14);
        let seven = (16.0 * PI.powi(3) / 105.0).ln();
        assert!((unit_ball_log_volume(7).unwrap() - seven).abs() < 1e-12);
        assert!((unit_ball_log_volume(3).unwrap() - (4.0 * PI / 3.0).ln()).abs() < 1e-12);
        let refs = [
            (10, 0.936_157_686_464_954_876_469_4),
            (64, -44.926_603_108_934_231_605_913),
        ];
        for (d, want) in refs {
            assert!(
                (unit_ball_log_volume(d).unwrap() - want).abs() < 1e-10,
                "d={d}"
            );
        }
        assert!(unit_ball_log_volume(0).is_err());
    }
}
