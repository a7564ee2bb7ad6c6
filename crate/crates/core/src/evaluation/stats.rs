//! One-sided two-sample Z-test and histogram binning.

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Upper tail `1 - Phi(x)`, computed without cancellation.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZTest {
    pub z: f64,
    pub p: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    pub n_a: usize,
    pub n_b: usize,
}

fn mean_and_sample_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
    (mean, ss / (n - 1.0))
}

/// Tests `mean(a) > mean(b)`:
/// `z = (mean_a - mean_b) / sqrt(s_a^2 / n_a + s_b^2 / n_b)`, `p = 1 - Phi(z)`.
pub fn z_test_one_sided(a: &[f64], b: &[f64]) -> Result<ZTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::invalid("each sample needs at least two values"));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::invalid("samples must be finite"));
    }
    let (mean_a, var_a) = mean_and_sample_variance(a);
    let (mean_b, var_b) = mean_and_sample_variance(b);
    let se = (var_a / a.len() as f64 + var_b / b.len() as f64).sqrt();
    if se == 0.0 {
        return Err(Error::invalid("both samples are constant; the standard error is zero"));
    }
    let z = (mean_a - mean_b) / se;
    Ok(ZTest {
        z,
        p: normal_sf(z),
        mean_a,
        mean_b,
        n_a: a.len(),
        n_b: b.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    /// `bin_low,bin_high,count` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("bin_low,bin_high,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            s.push_str(&format!("{},{},{}\n", self.edges[i], self.edges[i + 1], c));
        }
        s
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Counts values in `[e_i, e_{i+1})`, with the last bin closed on the right.
/// Values outside the edges (and NaNs) are not counted.
pub fn histogram(values: &[f64], edges: &[f64]) -> Result<Histogram> {
    if edges.len() < 2 {
        return Err(Error::invalid("a histogram needs at least two bin edges"));
    }
    if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("bin edges must be finite and strictly ascending"));
    }
    let last = edges.len() - 2;
    let mut counts = vec![0; edges.len() - 1];
    for &v in values {
        if !(v >= edges[0] && v <= edges[last + 1]) {
            continue;
        }
        // index of the first edge strictly greater than v, minus one
        let bin = edges.partition_point(|&e| e <= v).saturating_sub(1).min(last);
        counts[bin] += 1;
    }
    Ok(Histogram {
        edges: edges.to_vec(),
        counts,
    })
}

/// `n + 1` equally spaced edges from `low` to `high`.
pub fn uniform_edges(low: f64, high: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 || !(low < high) {
        return Err(Error::invalid("need at least one bin and low < high"));
    }
    let width = (high - low) / n as f64;
    Ok((0..=n)
        .map(|i| if i == n { high } else { low + width * i as f64 })
        .collect())
}
