//! Summary statistics for Monte Carlo tables.

/// Nearest-rank quantile: the smallest value with at least `q·n` values at
/// or below it. `q = 0` gives the minimum.
pub fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let n = sorted.len();
    let rank = (q * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

/// Quantile summary used in every experiment table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub q05: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q95: f64,
    pub mean: f64,
    pub sd: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let (mean, sd) = mean_sd(values);
        Self {
            q05: nearest_rank(&sorted, 0.05),
            q25: nearest_rank(&sorted, 0.25),
            median: nearest_rank(&sorted, 0.5),
            q75: nearest_rank(&sorted, 0.75),
            q95: nearest_rank(&sorted, 0.95),
            mean,
            sd,
        }
    }
}

/// Sample mean and (n−1) standard deviation; sd is 0 for a single value.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    assert!(n > 0, "mean of an empty sample");
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Sample mean and its standard error.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let (mean, sd) = mean_sd(values);
    (mean, sd / (values.len() as f64).sqrt())
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (mx, _) = mean_sd(x);
    let (my, _) = mean_sd(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
