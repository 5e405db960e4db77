//! Small statistical helpers: moments, batched standard errors, histograms,
//! the error function, and Kolmogorov-Smirnov distances.

/// Sample mean.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance around the sample mean.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

/// Root-mean-square of the samples.
pub fn rms(xs: &[f64]) -> f64 {
    (xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Standard error of the mean of `f(x)` estimated by batched means:
/// splits the series into `batches` contiguous blocks, so serial
/// correlation inside a block does not bias the error estimate.
pub fn batched_standard_error(xs: &[f64], batches: usize) -> f64 {
    assert!(batches >= 2 && xs.len() >= batches);
    let size = xs.len() / batches;
    let batch_means: Vec<f64> = (0..batches)
        .map(|b| mean(&xs[b * size..(b + 1) * size]))
        .collect();
    let m = mean(&batch_means);
    let var = batch_means.iter().map(|x| (x - m) * (x - m)).sum::<f64>()
        / (batches as f64 - 1.0);
    (var / batches as f64).sqrt()
}

/// Equal-width histogram over [lo, hi]; out-of-range samples are clamped
/// into the edge bins. Returns (bin centers, counts, bin width).
pub fn histogram(xs: &[f64], lo: f64, hi: f64, bins: usize) -> (Vec<f64>, Vec<u64>, f64) {
    assert!(bins >= 1 && hi > lo);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &x in xs {
        let i = (((x - lo) / width) as isize).clamp(0, bins as isize - 1) as usize;
        counts[i] += 1;
    }
    let centers = (0..bins).map(|i| lo + (i as f64 + 0.5) * width).collect();
    (centers, counts, width)
}

/// Error function, Abramowitz & Stegun 7.1.26 rational approximation
/// (|error| < 1.5e-7, ample for distribution tests).
pub fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    sign * (1.0 - poly * (-x * x).exp())
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64, mean: f64, sd: f64) -> f64 {
    0.5 * (1.0 + erf((x - mean) / (sd * std::f64::consts::SQRT_2)))
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples`
/// and the model CDF `cdf`. Sorts a copy of the samples.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Asymptotic KS critical value at significance `alpha` (supported: 0.01,
/// 0.05) for sample size `n`.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    let c = if (alpha - 0.01).abs() < 1e-12 {
        1.62762
    } else if (alpha - 0.05).abs() < 1e-12 {
        1.35810
    } else {
        panic!("unsupported KS significance level {alpha}");
    };
    c / (n as f64).sqrt()
}
