//! Standard normal distribution function.
//!
//! `Φ(x) = erfc(-x / √2) / 2`. The complementary error function is evaluated
//! with two convergent expansions that need no fitted coefficients:
//!
//! * `t < 2.5`: the positive-term series
//!   `erf(t) = 2/√π · e^{-t²} · Σ 2ⁿ t^{2n+1} / (1·3·…·(2n+1))`
//! * `t ≥ 2.5`: the Laplace continued fraction
//!   `erfc(t) = e^{-t²}/√π · 1/(t + ½/(t + 1/(t + 3/2/(t + …))))`
//!
//! Both are accurate to a few ulps of 1 over the range we need.

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const SERIES_CUTOFF: f64 = 2.5;

/// Beyond this magnitude `Φ` is returned as exactly 0 or 1.
pub const CLAMP_ABS: f64 = 8.0;

fn erf_series(t: f64) -> f64 {
    let t2 = t * t;
    let mut term = t;
    let mut sum = t;
    let mut n = 0u32;
    loop {
        n += 1;
        term *= 2.0 * t2 / f64::from(2 * n + 1);
        sum += term;
        if term < sum * 1e-17 || n > 200 {
            break;
        }
    }
    2.0 * FRAC_1_SQRT_PI * (-t2).exp() * sum
}

fn erfc_continued_fraction(t: f64) -> f64 {
    // Modified Lentz evaluation of b0 + a1/(b1 + a2/(b2 + ...)) with
    // b_n = t and a_n = n/2.
    const TINY: f64 = 1e-300;
    let mut f = t;
    let mut c = f;
    let mut d = 0.0;
    for n in 1..2000 {
        let a = f64::from(n) * 0.5;
        d = t + a * d;
        if d == 0.0 {
            d = TINY;
        }
        c = t + a / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-t * t).exp() * FRAC_1_SQRT_PI / f
}

/// Complementary error function for `t ≥ 0`.
fn erfc_nonneg(t: f64) -> f64 {
    if t < SERIES_CUTOFF {
        1.0 - erf_series(t)
    } else {
        erfc_continued_fraction(t)
    }
}

/// Standard normal CDF. Exact 0/1 outside `[-8, 8]`; NaN propagates.
pub fn standard_normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x > CLAMP_ABS {
        return 1.0;
    }
    if x < -CLAMP_ABS {
        return 0.0;
    }
    let tail = 0.5 * erfc_nonneg(x.abs() * std::f64::consts::FRAC_1_SQRT_2);
    if x >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centre_and_symmetry() {
        assert_eq!(standard_normal_cdf(0.0), 0.5);
        for &x in &[0.1, 0.7, 1.3, 2.0, 2.5, 3.6, 5.0, 7.9] {
            let s = standard_normal_cdf(x) + standard_normal_cdf(-x);
            assert!((s - 1.0).abs() < 1e-15, "x={x}");
        }
    }

    #[test]
    fn clamps_outside_range() {
        assert_eq!(standard_normal_cdf(8.5), 1.0);
        assert_eq!(standard_normal_cdf(-8.5), 0.0);
        assert_eq!(standard_normal_cdf(f64::INFINITY), 1.0);
        assert_eq!(standard_normal_cdf(f64::NEG_INFINITY), 0.0);
    }

    #[test]
    fn branches_agree_at_the_cutoff() {
        let t = SERIES_CUTOFF;
        let a = 1.0 - erf_series(t);
        let b = erfc_continued_fraction(t);
        assert!((a - b).abs() < 1e-15, "{a} vs {b}");
    }

    #[test]
    fn monotone() {
        let mut prev = 0.0;
        for i in -800..=800 {
            let v = standard_normal_cdf(f64::from(i) / 100.0);
            assert!(v >= prev);
            prev = v;
        }
    }
}
