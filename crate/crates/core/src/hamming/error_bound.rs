//! The inductive error bound
//!
//! ```text
//! E exp(t (d_H - E d_H)) <= e^{n t^2/2} + sum_{k=1}^{n-1} e^{(n-k-1) t^2/2} E_k
//! E_k = e^{-t mu^(k+1)(x_{k+1} != y_{k+1})} (1 - e^t) * int_{I_k} a_k eps_{x', y_{k+1}} dmu_k
//! ```
//!
//! Each `E_k` is computed twice: once from the prefix tables and the
//! deviation variables, once by a single pass over the joint table in
//! covariance form, `E_{mu_n}[a_k (1{x_{k+1} = y_{k+1}} - mu^(k+1)(y_{k+1}))]`,
//! with every marginal and prefix mean re-derived from the joint.

use super::{centered_mgf, PrefixCtx};
use crate::dist::conditional::signed_eps;
use crate::dist::CubeDistribution;
use crate::error::{check_index, Error, Result};
use crate::point::CubePoint;
use crate::report::{BoundReport, Check, REL_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorLedger {
    pub y: CubePoint,
    pub t: f64,
    pub n: usize,
    /// `E_1 .. E_{n-1}` from the prefix recursion.
    pub terms: Vec<f64>,
    /// The same terms from full enumeration of the joint table.
    pub terms_enumerated: Vec<f64>,
    /// `e^{-t q_{k+1}} (e^t - 1) int a_k dmu_k`, the natural magnitude of `E_k`.
    pub term_scales: Vec<f64>,
    /// `sum_k e^{(n-k-1) t^2/2} E_k`.
    pub weighted_sum: f64,
    /// `e^{n t^2/2} + weighted_sum`.
    pub bound: f64,
}

impl ErrorLedger {
    /// `e^{(n-k-1) t^2/2}`, the weight of `E_k`.
    pub fn weight(&self, k: usize) -> f64 {
        ((self.n - k - 1) as f64 * self.t * self.t / 2.0).exp()
    }

    /// `E_k`, 1-based.
    pub fn term(&self, k: usize) -> f64 {
        self.terms[k - 1]
    }

    /// `e^{n t^2/2} + sum_k e^{(n-k-1) t^2/2} |E_k|`: the first link of the
    /// small-variance chain.
    pub fn absolute_bound(&self) -> f64 {
        let base = (self.n as f64 * self.t * self.t / 2.0).exp();
        base + (1..self.n)
            .map(|k| self.weight(k) * self.term(k).abs())
            .sum::<f64>()
    }

    /// Largest route disagreement relative to the term's natural magnitude.
    pub fn max_route_gap(&self) -> f64 {
        self.terms
            .iter()
            .zip(&self.terms_enumerated)
            .zip(&self.term_scales)
            .map(|((a, b), s)| {
                let scale = a.abs().max(b.abs()).max(*s).max(f64::MIN_POSITIVE);
                (a - b).abs() / scale
            })
            .fold(0.0, f64::max)
    }

    pub fn routes_agree(&self) -> bool {
        self.max_route_gap() <= REL_TOL
    }
}

/// `(int a_k eps_{., bit} dmu_k, int a_k dmu_k)` over positive-mass
/// prefixes of length `k`, with `eps` taken at coordinate `k + 1`.
pub(crate) fn prefix_integral(
    mu: &CubeDistribution,
    ctx: &PrefixCtx,
    k: usize,
    bit: u8,
) -> Result<(f64, f64)> {
    let table = mu.epsilon_table(k + 1)?;
    let mut integral = 0.0;
    let mut mass = 0.0;
    for (j, e) in table.entries.iter().enumerate() {
        if !e.defined {
            continue;
        }
        let a = ctx.a(k, j as u64);
        integral += a * signed_eps(e.eps0, bit) * e.weight;
        mass += a * e.weight;
    }
    Ok((integral, mass))
}

fn term_from_integral(ctx: &PrefixCtx, k: usize, integral: f64) -> f64 {
    ctx.prefactor(k + 1) * (1.0 - ctx.t.exp()) * integral
}

pub(crate) fn check_level(k: usize, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::IndexOutOfRange {
            index: k,
            lo: 1,
            hi: 0,
        });
    }
    check_index(k, 1, n - 1)
}

/// `E_k` for `1 <= k <= n - 1`.
pub fn error_term(mu: &CubeDistribution, y: &CubePoint, k: usize, t: f64) -> Result<f64> {
    let ctx = PrefixCtx::new(mu, y, t)?;
    check_level(k, mu.n())?;
    let (integral, _) = prefix_integral(mu, &ctx, k, ctx.y_bit(k + 1))?;
    Ok(term_from_integral(&ctx, k, integral))
}

/// All `E_k` in covariance form from one pass per level over the joint.
fn enumerated_terms(mu: &CubeDistribution, y: &CubePoint, t: f64) -> Result<Vec<f64>> {
    let n = mu.n();
    let joint = mu.joint()?;
    let yi = y.index();
    // Marginal agreement probabilities and prefix means, straight from the joint.
    let mut agree = vec![0.0; n];
    let mut prefix_mean = vec![0.0; n + 1];
    for (x, &m) in joint.iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let diff = (x as u64) ^ yi;
        for i in 1..=n {
            if (diff >> (n - i)) & 1 == 0 {
                agree[i - 1] += m;
            }
        }
        for (k, pm) in prefix_mean.iter_mut().enumerate().skip(1) {
            *pm += m * (diff >> (n - k)).count_ones() as f64;
        }
    }
    let mut terms = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        let agree_next = agree[k];
        let mut cov = 0.0;
        for (x, &m) in joint.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let diff = (x as u64) ^ yi;
            let d = (diff >> (n - k)).count_ones() as f64;
            let a = (t * (d - prefix_mean[k])).exp();
            let hit = if (diff >> (n - k - 1)) & 1 == 0 {
                1.0
            } else {
                0.0
            };
            cov += m * a * (hit - agree_next);
        }
        let q_next = 1.0 - agree_next;
        terms.push((-t * q_next).exp() * (1.0 - t.exp()) * cov);
    }
    Ok(terms)
}

/// Evaluates the inductive bound and checks the centered MGF against it.
pub fn inductive_bound(
    mu: &CubeDistribution,
    y: &CubePoint,
    t: f64,
) -> Result<(ErrorLedger, BoundReport)> {
    let ctx = PrefixCtx::new(mu, y, t)?;
    let n = mu.n();
    let mut terms = Vec::with_capacity(n.saturating_sub(1));
    let mut term_scales = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        let (integral, mass) = prefix_integral(mu, &ctx, k, ctx.y_bit(k + 1))?;
        terms.push(term_from_integral(&ctx, k, integral));
        term_scales.push(ctx.prefactor(k + 1) * (t.exp() - 1.0) * mass);
    }
    let terms_enumerated = enumerated_terms(mu, y, t)?;
    let mut ledger = ErrorLedger {
        y: *y,
        t,
        n,
        terms,
        terms_enumerated,
        term_scales,
        weighted_sum: 0.0,
        bound: 0.0,
    };
    ledger.weighted_sum = (1..n).map(|k| ledger.weight(k) * ledger.term(k)).sum();
    ledger.bound = (n as f64 * t * t / 2.0).exp() + ledger.weighted_sum;
    let mgf = centered_mgf(mu, y, t)?;
    let report = BoundReport::new(Check::Inductive, Some(*y), t, mgf.value, ledger.bound);
    Ok((ledger, report))
}
