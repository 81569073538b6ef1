//! Monte Carlo tail estimates with a Hoeffding confidence radius.

use anyhow::{ensure, Result};
use cubeconc::hamming::{mean_hamming, TIE_TOL};
use cubeconc::{CubeDistribution, CubePoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub samples: u64,
    pub hits: u64,
    pub c: f64,
    /// Exact `E d_H(x, y)`, from the marginals.
    pub mean: f64,
    /// Fraction of samples with `|d_H(x, y) - mean| >= c`.
    pub estimate: f64,
    pub delta: f64,
    /// `sqrt(ln(2/delta) / (2 samples))`: the estimate is within this radius
    /// of the true tail with probability at least `1 - delta`.
    pub radius: f64,
}

impl MonteCarloEstimate {
    pub fn covers(&self, exact: f64) -> bool {
        (self.estimate - exact).abs() <= self.radius
    }
}

pub fn hoeffding_radius(samples: u64, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * samples as f64)).sqrt()
}

/// Estimates `mu{|d_H(x, y) - E d_H| >= c}` by sequential sampling from the
/// conditionals. Deterministic in `seed`.
pub fn mc_estimate_tail(
    mu: &CubeDistribution,
    y: &CubePoint,
    c: f64,
    samples: u64,
    seed: u64,
    delta: f64,
) -> Result<MonteCarloEstimate> {
    ensure!(samples >= 1, "need at least one sample");
    ensure!(
        delta > 0.0 && delta < 1.0,
        "delta = {delta} must lie in (0, 1)"
    );
    ensure!(c.is_finite() && c > 0.0, "c = {c}; need c > 0");
    let mean = mean_hamming(mu, y)?;
    let sampler = mu.sampler()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let yi = y.index();
    let mut hits = 0u64;
    for _ in 0..samples {
        let x = sampler.sample(&mut rng);
        let d = (x.index() ^ yi).count_ones() as f64;
        if (d - mean).abs() >= c - TIE_TOL {
            hits += 1;
        }
    }
    Ok(MonteCarloEstimate {
        samples,
        hits,
        c,
        mean,
        estimate: hits as f64 / samples as f64,
        delta,
        radius: hoeffding_radius(samples, delta),
    })
}
