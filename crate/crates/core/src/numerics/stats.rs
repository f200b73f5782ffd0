//! Running moments, sharded Monte Carlo drivers and Kolmogorov–Smirnov tests.

use rayon::prelude::*;

use super::rng::RngStream;

/// Samples per Monte Carlo shard. Shard boundaries depend only on the sample
/// count, so pooled results do not depend on how many workers run them.
pub const SHARD_SIZE: usize = 2048;

/// Mean and sum of squared deviations (Welford), mergeable across shards.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.count as f64, other.count as f64);
        self.mean += delta * nb / n;
        self.m2 += other.m2 + delta * delta * na * nb / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = RunningStats::default();
        for x in iter {
            s.push(x);
        }
        s
    }
}

/// Runs `n` draws split into shards; shard `i` uses `stream.substream(i)` and
/// receives its own sample count. Results are returned in shard order.
pub fn sharded<T, F>(n: usize, stream: &RngStream, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut RngStream) -> T + Sync,
{
    let shards = n.div_ceil(SHARD_SIZE);
    (0..shards)
        .into_par_iter()
        .map(|i| {
            let count = SHARD_SIZE.min(n - i * SHARD_SIZE);
            let mut rng = stream.substream(i as u64);
            f(count, &mut rng)
        })
        .collect()
}

/// Monte Carlo mean of a scalar statistic over `n` independent draws.
pub fn mc_scalar<F>(n: usize, stream: &RngStream, draw: F) -> RunningStats
where
    F: Fn(&mut RngStream) -> f64 + Sync,
{
    let parts = sharded(n, stream, |count, rng| {
        (0..count).map(|_| draw(rng)).collect::<RunningStats>()
    });
    parts.iter().fold(RunningStats::default(), |mut acc, s| {
        acc.merge(s);
        acc
    })
}

/// Monte Carlo means of a fixed-length vector of statistics; `draw` writes one
/// draw into the provided buffer.
pub fn mc_vector<F>(n: usize, len: usize, stream: &RngStream, draw: F) -> Vec<RunningStats>
where
    F: Fn(&mut RngStream, &mut [f64]) + Sync,
{
    let parts = sharded(n, stream, |count, rng| {
        let mut stats = vec![RunningStats::default(); len];
        let mut buf = vec![0.0; len];
        for _ in 0..count {
            draw(rng, &mut buf);
            for (s, &x) in stats.iter_mut().zip(&buf) {
                s.push(x);
            }
        }
        stats
    });
    let mut total = vec![RunningStats::default(); len];
    for part in &parts {
        for (t, s) in total.iter_mut().zip(part) {
            t.merge(s);
        }
    }
    total
}

/// Collects one value per draw, in deterministic order.
pub fn mc_collect<F>(n: usize, stream: &RngStream, draw: F) -> Vec<f64>
where
    F: Fn(&mut RngStream) -> f64 + Sync,
{
    sharded(n, stream, |count, rng| (0..count).map(|_| draw(rng)).collect::<Vec<_>>())
        .into_iter()
        .flatten()
        .collect()
}

/// Kolmogorov survival function `Q(λ) = 2 Σ (-1)^{k-1} exp(-2k²λ²)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = sign * (-2.0 * kf * kf * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Result of a Kolmogorov–Smirnov test.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Two-sample KS test with the asymptotic Kolmogorov p-value (with the usual
/// small-sample correction to λ).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    assert!(!a.is_empty() && !b.is_empty(), "KS test needs non-empty samples");
    let a = sorted(a);
    let b = sorted(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let en = (na * nb / (na + nb)).sqrt();
    KsResult {
        statistic: d,
        p_value: kolmogorov_survival((en + 0.12 + 0.11 / en) * d),
    }
}

/// One-sample KS test against a continuous CDF.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    assert!(!xs.is_empty(), "KS test needs a non-empty sample");
    let v = sorted(xs);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let en = n.sqrt();
    KsResult {
        statistic: d,
        p_value: kolmogorov_survival((en + 0.12 + 0.11 / en) * d),
    }
}

/// Pearson correlation coefficient; zero when either sample is constant.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

/// Binomial standard error of an empirical proportion.
pub fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}
