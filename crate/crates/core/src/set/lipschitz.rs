//! The uniform Lipschitz bound on `int e^{t d(x, A)} dmu_n` when every
//! conditional is bounded by `c_k`:
//!
//! ```text
//! int e^{t d(x,A)} dmu_n
//!   <= (1/mu_n(A)) (1/2 + (e^t + e^-t)/4) (prod_{k=2}^n c_k^2) (2 + e^t + e^-t)^{n-1}
//!   <= (1/mu_n(A)) 4^{n-1} (prod_{k=2}^n c_k^2) e^{t^2 n/4}
//! ```
//!
//! valid when `mu^(1)(0) = 1/2`.

use super::{distance_map, CubeSet};
use crate::dist::CubeDistribution;
use crate::error::{check_positive_t, Error, Result};
use crate::report::REL_TOL;

/// Tolerance on `mu^(1)(0) = 1/2`.
const FIRST_MARGINAL_TOL: f64 = 1e-9;

/// `c_2 .. c_n`: the largest conditional probability of either value at
/// coordinate `k`, over positive-mass prefixes.
pub fn conditional_sup_bounds(mu: &CubeDistribution) -> Result<Vec<f64>> {
    (2..=mu.n())
        .map(|k| {
            Ok(mu
                .conditional_rows(k)?
                .iter()
                .filter(|r| r.defined)
                .map(|r| r.p0.max(r.p1))
                .fold(0.5, f64::max))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetDistanceBound {
    pub t: f64,
    pub mu_a: f64,
    /// `c_2 .. c_n`.
    pub c: Vec<f64>,
    /// `prod c_k^2`.
    pub c_prod: f64,
    /// `int e^{t d(x, A)} dmu_n`.
    pub lhs: f64,
    pub mid: f64,
    pub outer: f64,
    pub first_marginal_p0: f64,
    /// `mu^(1)(0) = 1/2` within 1e-9.
    pub hypothesis_holds: bool,
    /// `c_k` non-increasing in `k`.
    pub c_monotone: bool,
}

impl SetDistanceBound {
    /// `lhs <= mid <= outer` within relative tolerance.
    pub fn chain_holds(&self) -> bool {
        self.lhs <= self.mid * (1.0 + REL_TOL) && self.mid <= self.outer * (1.0 + REL_TOL)
    }

    /// The chain failed although the hypothesis holds.
    pub fn violated(&self) -> bool {
        self.hypothesis_holds && !self.chain_holds()
    }
}

fn check_dims(mu: &CubeDistribution, a: &CubeSet) -> Result<()> {
    if mu.n() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.n(),
            found: a.dim(),
        });
    }
    a.ensure_nonempty()
}

/// `int e^{t d(x, A)} dmu_n` by enumeration.
fn exp_distance_integral(mu: &CubeDistribution, a: &CubeSet, t: f64) -> Result<f64> {
    let dist = distance_map(a)?;
    let joint = mu.joint()?;
    Ok(joint
        .iter()
        .zip(&dist)
        .map(|(m, &d)| m * (t * d as f64).exp())
        .sum())
}

/// Evaluates all three quantities. The chain is only asserted (see
/// [`SetDistanceBound::violated`]) when the first marginal is uniform.
pub fn lipschitz_set_bound(mu: &CubeDistribution, a: &CubeSet, t: f64) -> Result<SetDistanceBound> {
    check_positive_t(t)?;
    check_dims(mu, a)?;
    let n = mu.n();
    let mu_a = a.measure(mu)?;
    let lhs = exp_distance_integral(mu, a, t)?;
    let c = conditional_sup_bounds(mu)?;
    let c_prod: f64 = c.iter().map(|ck| ck * ck).product();
    let cosh_sum = t.exp() + (-t).exp();
    let levels = (n - 1) as i32;
    let mid = (0.5 + cosh_sum / 4.0) * c_prod * (2.0 + cosh_sum).powi(levels) / mu_a;
    let outer = 4f64.powi(levels) * c_prod * (t * t * n as f64 / 4.0).exp() / mu_a;
    let first_marginal_p0 = mu.marginal(1)?.p0;
    Ok(SetDistanceBound {
        t,
        mu_a,
        c_monotone: c.windows(2).all(|w| w[1] <= w[0]),
        c,
        c_prod,
        lhs,
        mid,
        outer,
        first_marginal_p0,
        hypothesis_holds: (first_marginal_p0 - 0.5).abs() <= FIRST_MARGINAL_TOL,
    })
}

/// `c min{1/a0, e^t/a1} + c min{1/a1, e^t/a0}`, with `1/0 = inf`.
pub fn minmax_value(a0: f64, a1: f64, c: f64, t: f64) -> f64 {
    let inv = |a: f64| if a > 0.0 { 1.0 / a } else { f64::INFINITY };
    let growth = t.exp();
    c * (inv(a0)).min(growth * inv(a1)) + c * (inv(a1)).min(growth * inv(a0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinMaxPoint {
    pub a0: f64,
    pub a1: f64,
    pub value: f64,
}

/// Maximizer of [`minmax_value`] on `a0 + a1 = 1/c`, `a0 >= a1 >= 0`:
/// `a0 = e^t / (c (1 + e^t))`, `a1 = 1 / (c (1 + e^t))`, value
/// `c^2 (2 + e^t + e^-t)`.
pub fn minmax_maximizer(c: f64, t: f64) -> Result<MinMaxPoint> {
    check_positive_t(t)?;
    if !(0.5..=1.0).contains(&c) {
        return Err(Error::InvalidParameter(format!(
            "conditional bound c = {c} must lie in [1/2, 1]"
        )));
    }
    let growth = t.exp();
    Ok(MinMaxPoint {
        a0: growth / (c * (1.0 + growth)),
        a1: 1.0 / (c * (1.0 + growth)),
        value: c * c * (2.0 + growth + 1.0 / growth),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TalagrandBaseline {
    pub t: f64,
    pub mu_a: f64,
    pub lhs: f64,
    /// `e^{t^2 n/4} / mu_n(A)`.
    pub bound: f64,
}

impl TalagrandBaseline {
    pub fn holds(&self) -> bool {
        self.lhs <= self.bound * (1.0 + REL_TOL)
    }
}

/// The product-measure bound `int e^{t d(x,A)} dmu <= e^{t^2 n/4} / mu(A)`.
pub fn talagrand_product_baseline(
    mu: &CubeDistribution,
    a: &CubeSet,
    t: f64,
) -> Result<TalagrandBaseline> {
    if !mu.is_product() {
        return Err(Error::NotApplicable(format!(
            "the product baseline needs a product distribution, got {}",
            mu.kind().as_str()
        )));
    }
    check_positive_t(t)?;
    check_dims(mu, a)?;
    let mu_a = a.measure(mu)?;
    let lhs = exp_distance_integral(mu, a, t)?;
    Ok(TalagrandBaseline {
        t,
        mu_a,
        lhs,
        bound: (t * t * mu.n() as f64 / 4.0).exp() / mu_a,
    })
}
