//! Shapiro-Wilk W test, Royston's AS R94 approximation.
//!
//! Coefficients come from Royston's polynomial approximation to the expected
//! normal order statistics; the p-value from his normalizing transformation
//! of `ln(1 - W)`. For n = 3 both are exact.

use alloc::vec::Vec;

use super::normal;
use super::{StatsError, TestMethod, TestResult};
use crate::math::{asin, exp, ln, sqrt};

pub const MIN_N: usize = 3;
pub const MAX_N: usize = 5000;

const SMALL: f64 = 1e-19;

const G: [f64; 2] = [-2.273, 0.459];
const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.544, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Antisymmetric weights `a[0..n/2]`, largest first; `a[i]` pairs with the
/// i-th largest and (negated) the i-th smallest order statistic.
fn coefficients(n: usize) -> Vec<f64> {
    let half = n / 2;
    if n == 3 {
        return alloc::vec![core::f64::consts::FRAC_1_SQRT_2];
    }
    let an = n as f64;
    let an25 = an + 0.25;
    // m[i] is the approximate expected value of the (i+1)-th smallest order statistic.
    let m: Vec<f64> = (1..=half)
        .map(|i| normal::quantile((i as f64 - 0.375) / an25))
        .collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = sqrt(summ2);
    let rsn = 1.0 / sqrt(an);
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;

    let mut a: Vec<f64> = m.iter().map(|v| -v).collect();
    let (first_scaled, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        let fac = sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
        a[1] = a2;
        (2, fac)
    } else {
        let fac = sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
        (1, fac)
    };
    a[0] = a1;
    for v in &mut a[first_scaled..] {
        *v /= fac;
    }
    a
}

/// Shapiro-Wilk test of normality for `3 <= n <= 5000` non-constant values.
pub fn shapiro_wilk(sample: &[f64]) -> Result<TestResult, StatsError> {
    let n = sample.len();
    if n < MIN_N {
        return Err(StatsError::SampleTooSmall { n, min: MIN_N });
    }
    if n > MAX_N {
        return Err(StatsError::SampleTooLarge { n, max: MAX_N });
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    let range = x[n - 1] - x[0];
    if range < SMALL {
        return Err(StatsError::ZeroVariance);
    }

    let a = coefficients(n);
    let half = n / 2;
    // Signed weight of the i-th order statistic (0-based).
    let weight = |i: usize| -> f64 {
        let j = n - 1 - i;
        if i < j {
            -a[i]
        } else if i > j {
            a[j]
        } else {
            0.0
        }
    };
    debug_assert_eq!(a.len(), half);

    // W as the squared correlation between the scaled data and the weights.
    let scaled: Vec<f64> = x.iter().map(|v| v / range).collect();
    let sx = scaled.iter().sum::<f64>() / n as f64;
    let sa = (0..n).map(weight).sum::<f64>() / n as f64;
    let (mut ssa, mut ssx, mut sax) = (0.0, 0.0, 0.0);
    for (i, xi) in scaled.iter().enumerate() {
        let asa = weight(i) - sa;
        let xsx = xi - sx;
        ssa += asa * asa;
        ssx += xsx * xsx;
        sax += asa * xsx;
    }
    let ssassx = sqrt(ssa * ssx);
    // 1 - W, computed without cancellation for W close to 1.
    let w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
    let w = 1.0 - w1;

    let p = if n == 3 {
        const SIX_OVER_PI: f64 = 6.0 / core::f64::consts::PI;
        const ASIN_SQRT_3_4: f64 = core::f64::consts::FRAC_PI_3;
        SIX_OVER_PI * (asin(sqrt(w.min(1.0))) - ASIN_SQRT_3_4)
    } else {
        let an = n as f64;
        let mut y = ln(w1);
        let (m, s) = if n <= 11 {
            let gamma = poly(&G, an);
            if y >= gamma {
                return Ok(result(w, f64::MIN_POSITIVE, n));
            }
            y = -ln(gamma - y);
            (poly(&C3, an), exp(poly(&C4, an)))
        } else {
            let lx = ln(an);
            (poly(&C5, lx), exp(poly(&C6, lx)))
        };
        normal::sf((y - m) / s)
    };
    Ok(result(w, p, n))
}

fn result(w: f64, p: f64, n: usize) -> TestResult {
    TestResult {
        method: TestMethod::ShapiroWilk,
        statistic: w.min(1.0),
        p_value: p.clamp(f64::MIN_POSITIVE, 1.0),
        n_effective: n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_equally_spaced_points_give_w_one() {
        let r = shapiro_wilk(&[1.0, 2.0, 3.0]).unwrap();
        assert!((r.statistic - 1.0).abs() < 1e-9);
        assert!((r.p_value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn coefficients_are_normalized() {
        for n in [4, 5, 6, 11, 12, 50, 501] {
            let a = coefficients(n);
            let ss: f64 = 2.0 * a.iter().map(|v| v * v).sum::<f64>();
            assert!((ss - 1.0).abs() < 1e-12, "n = {n}: {ss}");
            assert!(a.windows(2).all(|w| w[0] >= w[1]), "n = {n}");
        }
    }

    #[test]
    fn input_errors() {
        assert_eq!(
            shapiro_wilk(&[1.0, 2.0]),
            Err(StatsError::SampleTooSmall { n: 2, min: 3 })
        );
        assert_eq!(shapiro_wilk(&[4.0; 10]), Err(StatsError::ZeroVariance));
        assert_eq!(shapiro_wilk(&[1.0, f64::NAN, 2.0]), Err(StatsError::NonFinite));
        let big = alloc::vec![0.0; 5001];
        assert_eq!(
            shapiro_wilk(&big),
            Err(StatsError::SampleTooLarge { n: 5001, max: 5000 })
        );
    }

    #[test]
    fn order_does_not_matter() {
        let a = shapiro_wilk(&[3.1, 0.2, 5.5, 1.0, 2.2, 9.0]).unwrap();
        let b = shapiro_wilk(&[9.0, 5.5, 3.1, 2.2, 1.0, 0.2]).unwrap();
        assert_eq!(a, b);
    }
}
