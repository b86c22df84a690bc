//! Small statistics helpers for plateau and descent checks.

/// Mean and least-squares slope (per sample) of the last `window` entries.
///
/// A window of one has slope 0 by convention. Panics on an empty series or
/// a zero window; windows longer than the series use the whole series.
pub fn trailing_window_stats(series: &[f64], window: usize) -> (f64, f64) {
    assert!(!series.is_empty(), "trailing_window_stats needs a nonempty series");
    assert!(window > 0, "window must be positive");
    let tail = &series[series.len().saturating_sub(window)..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    (mean, linear_fit(tail).0)
}

/// Least-squares slope of `ys` against `0, 1, 2, ...` and the slope's
/// standard error (NaN with fewer than three points).
pub fn linear_fit(ys: &[f64]) -> (f64, f64) {
    let n = ys.len();
    if n < 2 {
        return (0.0, f64::NAN);
    }
    let nf = n as f64;
    let x_mean = (nf - 1.0) / 2.0;
    let y_mean = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (i, y) in ys.iter().enumerate() {
        let dx = i as f64 - x_mean;
        sxx += dx * dx;
        sxy += dx * (y - y_mean);
    }
    let slope = sxy / sxx;
    if n < 3 {
        return (slope, f64::NAN);
    }
    let rss: f64 = ys
        .iter()
        .enumerate()
        .map(|(i, y)| (y - y_mean - slope * (i as f64 - x_mean)).powi(2))
        .sum();
    (slope, (rss / (nf - 2.0) / sxx).sqrt())
}

/// Means of `batches` consecutive equal-size batches; leading samples that
/// do not fill a batch are dropped.
pub fn batch_means(series: &[f64], batches: usize) -> Vec<f64> {
    assert!(batches > 0 && series.len() >= batches, "need at least one sample per batch");
    let size = series.len() / batches;
    let skip = series.len() - size * batches;
    series[skip..]
        .chunks(size)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect()
}
