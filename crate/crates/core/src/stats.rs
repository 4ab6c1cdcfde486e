//! Small summation and moment helpers shared by the estimators.

/// Neumaier-compensated running sum. Accumulation order is the caller's
/// iteration order, so results are reproducible bit for bit.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.carry += (self.sum - t) + value;
        } else {
            self.carry += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    compensated_sum(values.iter().copied()) / values.len() as f64
}

/// Unbiased (n - 1) sample variance, computed in two passes.
pub fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    compensated_sum(values.iter().map(|v| (v - m) * (v - m))) / (n - 1) as f64
}

/// Standard error of the mean, `sd / sqrt(n)`, using the (n - 1) variance.
pub fn standard_error(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    (sample_variance(values) / values.len() as f64).sqrt()
}

/// Unbiased sample covariance.
pub fn sample_covariance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    if n < 2 {
        return 0.0;
    }
    let ma = mean(&a[..n]);
    let mb = mean(&b[..n]);
    compensated_sum(a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb))) / (n - 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut values = vec![1e16, 1.0, -1e16];
        values.extend(std::iter::repeat(1.0).take(10));
        assert_eq!(compensated_sum(values), 11.0);
    }

    #[test]
    fn moments() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&v), 2.5);
        assert!((sample_variance(&v) - 5.0 / 3.0).abs() < 1e-15);
        assert!((sample_covariance(&v, &v) - sample_variance(&v)).abs() < 1e-15);
        assert_eq!(sample_variance(&[3.0]), 0.0);
    }
}
