//! The product bound for distributions whose conditionals stay close to
//! their marginals:
//!
//! ```text
//! E exp(t (d_H - E d_H)) <= e^{t^2/2} prod_{j=2}^{n} (b_j + e^{t^2/2})
//! b_j = e^{-t mu^(j)(x_j != y_j)} (e^t - 1) sup_{x'} |eps_{x', y_j}|
//! ```

use super::error_bound::{check_level, inductive_bound, prefix_integral};
use super::PrefixCtx;
use crate::dist::CubeDistribution;
use crate::error::{check_positive_t, Error, Result};
use crate::point::CubePoint;
use crate::report::{BoundReport, Check, REL_TOL};

/// Both sides of the expansion
/// `prod_{j=2}^{n} (b_j + s) = s^{n-1} + sum_{k=1}^{n-1} s^{n-k-1} b_{k+1} prod_{j=2}^{k} (b_j + s)`
/// with `s = e^{t^2/2}`, valid for any real `b_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductFormula {
    /// The product.
    pub lhs: f64,
    /// The expanded sum.
    pub rhs: f64,
    /// Sum of the absolute values of the terms of `rhs`; the scale against
    /// which cancellation is measured when some `b_j < 0`.
    pub magnitude: f64,
}

impl ProductFormula {
    /// Equality within 1e-12 relative to the magnitude of the expansion.
    pub fn agrees(&self) -> bool {
        (self.lhs - self.rhs).abs() <= 1e-12 * self.magnitude.max(f64::MIN_POSITIVE)
    }
}

/// `b` holds `b_2 .. b_n`, so `b.len() == n - 1`.
pub fn product_formula(b: &[f64], t: f64, n: usize) -> Result<ProductFormula> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "product formula needs n >= 2, got {n}"
        )));
    }
    if b.len() != n - 1 {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            found: b.len(),
        });
    }
    if let Some(bad) = b.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "coefficients must be finite, got {bad}"
        )));
    }
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "t must be finite, got {t}"
        )));
    }
    let s = (t * t / 2.0).exp();
    let lhs = b.iter().map(|bj| bj + s).product();
    let mut rhs = ((n - 1) as f64 * t * t / 2.0).exp();
    let mut magnitude = rhs;
    // partial = prod_{j=2}^{k} (b_j + s)
    let mut partial = 1.0;
    for k in 1..n {
        let term = ((n - k - 1) as f64 * t * t / 2.0).exp() * b[k - 1] * partial;
        rhs += term;
        magnitude += term.abs();
        partial *= b[k - 1] + s;
    }
    Ok(ProductFormula {
        lhs,
        rhs,
        magnitude,
    })
}

/// `b_2 .. b_n` for `(mu, y, t)`.
pub fn b_coefficients(mu: &CubeDistribution, y: &CubePoint, t: f64) -> Result<Vec<f64>> {
    let ctx = PrefixCtx::new(mu, y, t)?;
    coefficients(mu, &ctx)
}

fn coefficients(mu: &CubeDistribution, ctx: &PrefixCtx) -> Result<Vec<f64>> {
    let growth = ctx.t.exp() - 1.0;
    (2..=ctx.n)
        .map(|j| Ok(ctx.prefactor(j) * growth * mu.epsilon_table(j)?.sup_norm()))
        .collect()
}

/// `e^{t^2/2} prod_{j=2}^{k} (b_j + e^{t^2/2})`, the bound on the
/// level-`k` prefix MGF.
fn prefix_product(b: &[f64], t: f64, k: usize) -> f64 {
    let s = (t * t / 2.0).exp();
    s * b[..k - 1].iter().map(|bj| bj + s).product::<f64>()
}

/// `(|E_k|, b_{k+1} e^{t^2/2} prod_{j=2}^{k} (b_j + e^{t^2/2}))`.
pub fn error_abs_bound(
    mu: &CubeDistribution,
    y: &CubePoint,
    k: usize,
    t: f64,
) -> Result<(f64, f64)> {
    check_positive_t(t)?;
    let ctx = PrefixCtx::new(mu, y, t)?;
    check_level(k, mu.n())?;
    let (integral, _) = prefix_integral(mu, &ctx, k, ctx.y_bit(k + 1))?;
    let ek = ctx.prefactor(k + 1) * (1.0 - t.exp()) * integral;
    let b = coefficients(mu, &ctx)?;
    Ok((ek.abs(), b[k - 1] * prefix_product(&b, t, k)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallVarianceBound {
    pub y: CubePoint,
    pub t: f64,
    /// `b_2 .. b_n`.
    pub b: Vec<f64>,
    /// `e^{t^2/2} prod_j (b_j + e^{t^2/2})`.
    pub value: f64,
    /// `e^{n t^2/2} + sum_k e^{(n-k-1) t^2/2} |E_k|`, the intermediate link.
    pub abs_bound: f64,
}

impl SmallVarianceBound {
    /// `abs_bound <= value` within tolerance.
    pub fn chain_holds(&self) -> bool {
        self.abs_bound <= self.value * (1.0 + REL_TOL)
    }
}

/// Evaluates the product bound and checks the centered MGF against it.
pub fn small_variance_bound(
    mu: &CubeDistribution,
    y: &CubePoint,
    t: f64,
) -> Result<(SmallVarianceBound, BoundReport)> {
    let ctx = PrefixCtx::new(mu, y, t)?;
    let b = coefficients(mu, &ctx)?;
    let value = prefix_product(&b, t, mu.n());
    let (ledger, inductive) = inductive_bound(mu, y, t)?;
    let report = BoundReport::new(Check::SmallVariance, Some(*y), t, inductive.lhs, value);
    Ok((
        SmallVarianceBound {
            y: *y,
            t,
            b,
            value,
            abs_bound: ledger.absolute_bound(),
        },
        report,
    ))
}
