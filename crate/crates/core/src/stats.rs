//! Jackknife error estimates.

/// Mean and standard error of `xs`.
pub fn mean_err(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (m, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Splits `n` samples into `n_bins` contiguous blocks and returns the
/// half-open ranges. Trailing samples that do not fill a block are dropped.
fn blocks(n: usize, n_bins: usize) -> Vec<std::ops::Range<usize>> {
    let size = n / n_bins;
    (0..n_bins).map(|b| b * size..(b + 1) * size).collect()
}

/// Blocked jackknife of a derived quantity.
///
/// `samples[i]` is the i-th measurement vector; `f` maps a mean vector to
/// the estimate. Returns the full-sample estimate and its jackknife error.
/// `None` if `f` fails on the full sample or on any leave-one-out mean.
pub fn jackknife<F>(samples: &[Vec<f64>], n_bins: usize, f: F) -> Option<(f64, f64)>
where
    F: Fn(&[f64]) -> Option<f64>,
{
    let n_bins = n_bins.min(samples.len());
    if n_bins < 2 {
        return None;
    }
    let dim = samples[0].len();
    let bins = blocks(samples.len(), n_bins);
    let used = bins.last()?.end;
    let mut total = vec![0.0; dim];
    let mut bin_sums = Vec::with_capacity(n_bins);
    for r in &bins {
        let mut s = vec![0.0; dim];
        for row in &samples[r.clone()] {
            for (a, x) in s.iter_mut().zip(row) {
                *a += x;
            }
        }
        for (t, x) in total.iter_mut().zip(&s) {
            *t += x;
        }
        bin_sums.push((s, r.len()));
    }
    let full: Vec<f64> = total.iter().map(|t| t / used as f64).collect();
    let est = f(&full)?;
    let mut loo = Vec::with_capacity(n_bins);
    for (s, len) in &bin_sums {
        let m: Vec<f64> = total.iter().zip(s).map(|(t, x)| (t - x) / (used - len) as f64).collect();
        loo.push(f(&m)?);
    }
    let nb = n_bins as f64;
    let mean = loo.iter().sum::<f64>() / nb;
    let var = loo.iter().map(|x| (x - mean).powi(2)).sum::<f64>() * (nb - 1.0) / nb;
    Some((est, var.sqrt()))
}
