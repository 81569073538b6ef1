//! Positive/negative correlation classification of the coordinates of `y`.

use super::error_bound::{inductive_bound, prefix_integral};
use super::{centered_mgf, PrefixCtx};
use crate::capacity::{self, Cap};
use crate::dist::CubeDistribution;
use crate::error::{check_index, Result};
use crate::point::CubePoint;
use crate::report::{BoundReport, Check, REL_TOL};

/// Integrals with `|value| <= ZERO_BAND` are classified as zero.
pub const ZERO_BAND: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Positive,
    Negative,
    Zero,
}

impl Verdict {
    fn classify(integral: f64) -> Self {
        if integral.abs() <= ZERO_BAND {
            Verdict::Zero
        } else if integral > 0.0 {
            Verdict::Positive
        } else {
            Verdict::Negative
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Verdict::Positive => '+',
            Verdict::Negative => '-',
            Verdict::Zero => '0',
        }
    }

    /// Zero counts as satisfying the (non-strict) positive condition.
    pub fn is_nonnegative(self) -> bool {
        !matches!(self, Verdict::Negative)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationVerdict {
    pub k: usize,
    pub y_k_value: u8,
    /// `int a_{k-1} eps_{x', y_k} dmu_{k-1}`.
    pub integral: f64,
    pub verdict: Verdict,
}

/// `int_{I_{k-1}} a_{k-1}(x', y', t) eps_{x', bit} dmu_{k-1}(x')` for
/// `2 <= k <= n`. `a_{k-1}` only sees `y_1..y_{k-1}`, so `bit` may differ
/// from `y_k`.
pub fn correlation_integral(
    mu: &CubeDistribution,
    y: &CubePoint,
    k: usize,
    t: f64,
    bit: u8,
) -> Result<f64> {
    let ctx = PrefixCtx::new(mu, y, t)?;
    check_index(k, 2, mu.n())?;
    Ok(prefix_integral(mu, &ctx, k - 1, bit)?.0)
}

pub fn correlation_verdict(
    mu: &CubeDistribution,
    y: &CubePoint,
    k: usize,
    t: f64,
) -> Result<CorrelationVerdict> {
    let ctx = PrefixCtx::new(mu, y, t)?;
    check_index(k, 2, mu.n())?;
    verdict_at(mu, &ctx, k)
}

fn verdict_at(mu: &CubeDistribution, ctx: &PrefixCtx, k: usize) -> Result<CorrelationVerdict> {
    let bit = ctx.y_bit(k);
    let integral = prefix_integral(mu, ctx, k - 1, bit)?.0;
    Ok(CorrelationVerdict {
        k,
        y_k_value: bit,
        integral,
        verdict: Verdict::classify(integral),
    })
}

/// Verdicts for `k = 2..=n`.
pub fn verdicts(mu: &CubeDistribution, y: &CubePoint, t: f64) -> Result<Vec<CorrelationVerdict>> {
    let ctx = PrefixCtx::new(mu, y, t)?;
    (2..=mu.n()).map(|k| verdict_at(mu, &ctx, k)).collect()
}

/// One `+`/`-`/`0` per level `k = 2..=n`.
pub fn verdict_string(verdicts: &[CorrelationVerdict]) -> String {
    verdicts.iter().map(|v| v.verdict.symbol()).collect()
}

/// When every level satisfies the positive correlation condition the
/// centered MGF obeys the independent-case bound `e^{n t^2/2}`; otherwise
/// the report is marked not applicable.
pub fn pc_theorem_check(mu: &CubeDistribution, y: &CubePoint, t: f64) -> Result<BoundReport> {
    let all = verdicts(mu, y, t)?;
    let lhs = centered_mgf(mu, y, t)?.value;
    let bound = (mu.n() as f64 * t * t / 2.0).exp();
    if all.iter().all(|v| v.verdict.is_nonnegative()) {
        Ok(BoundReport::new(
            Check::PositiveCorrelation,
            Some(*y),
            t,
            lhs,
            bound,
        ))
    } else {
        Ok(BoundReport::not_applicable(
            Check::PositiveCorrelation,
            Some(*y),
            t,
            lhs,
            bound,
        ))
    }
}

/// `2^{n - ceil((n-1)/2)} * C(n, ceil((n-1)/2))`.
pub fn good_y_formula(n: usize) -> u128 {
    let r = n / 2; // ceil((n - 1) / 2)
    let mut binom: u128 = 1;
    for i in 0..r {
        binom = binom * (n - i) as u128 / (i + 1) as u128;
    }
    (1u128 << (n - r)) * binom
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoodYEntry {
    pub y: CubePoint,
    pub mgf: f64,
    pub good: bool,
    /// `e^{(n-k-1) t^2} |E_k|` constant in `k` (weighting as written).
    pub constant_full_weight: bool,
    /// `e^{(n-k-1) t^2/2} |E_k|` constant in `k` (weighting of the bound).
    pub constant_half_weight: bool,
    /// Every `E_k` is zero, making the proportionality clause vacuous.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoodYCount {
    pub n: usize,
    pub t: f64,
    /// `#{y : centered MGF <= e^{n t^2/2} (1 + 1e-9)}`.
    pub count: u64,
    pub formula: u128,
    /// `mu^(i)(0) = 1/2` for every `i` within 1e-9.
    pub marginals_uniform: bool,
    /// Uniform marginals and the proportionality clause, with weights
    /// `e^{(n-k-1) t^2}`, at every `y` (non-degenerate).
    pub hypotheses_hold: bool,
    /// Same with weights `e^{(n-k-1) t^2/2}`.
    pub hypotheses_hold_half_weight: bool,
    pub per_y: Vec<GoodYEntry>,
}

/// Relative spread allowed for the "constant in k" clause.
const CONSTANCY_TOL: f64 = 1e-6;

fn constant_in_k(values: &[f64]) -> bool {
    let max = values.iter().copied().fold(0.0, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    values.is_empty() || max - min <= CONSTANCY_TOL * max
}

/// Enumerates every `y in I_n` and counts those for which the
/// independent-case MGF bound holds, next to the closed-form count and the
/// status of its hypotheses.
pub fn count_good_y(mu: &CubeDistribution, t: f64) -> Result<GoodYCount> {
    let n = mu.n();
    capacity::ensure(Cap::AllY, n)?;
    let marginals_uniform = mu.marginals()?.iter().all(|m| (m.p0 - 0.5).abs() <= 1e-9);
    let base = (n as f64 * t * t / 2.0).exp();
    let mut per_y = Vec::with_capacity(1 << n);
    for yi in 0..1u64 << n {
        let y = CubePoint::new_unchecked(n, yi);
        let (ledger, report) = inductive_bound(mu, &y, t)?;
        let scaled = |w: f64| -> Vec<f64> {
            (1..n)
                .map(|k| ((n - k - 1) as f64 * w * t * t).exp() * ledger.term(k).abs())
                .collect()
        };
        let degenerate = n >= 2
            && ledger
                .terms
                .iter()
                .zip(&ledger.term_scales)
                .all(|(e, s)| e.abs() <= ZERO_BAND.max(REL_TOL * s));
        per_y.push(GoodYEntry {
            y,
            mgf: report.lhs,
            good: report.lhs <= base * (1.0 + REL_TOL),
            constant_full_weight: !degenerate && constant_in_k(&scaled(1.0)),
            constant_half_weight: !degenerate && constant_in_k(&scaled(0.5)),
            degenerate,
        });
    }
    let count = per_y.iter().filter(|e| e.good).count() as u64;
    Ok(GoodYCount {
        n,
        t,
        count,
        formula: good_y_formula(n),
        marginals_uniform,
        hypotheses_hold: marginals_uniform && per_y.iter().all(|e| e.constant_full_weight),
        hypotheses_hold_half_weight: marginals_uniform
            && per_y.iter().all(|e| e.constant_half_weight),
        per_y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> CubePoint {
        s.parse().unwrap()
    }

    #[test]
    fn formula_values() {
        assert_eq!(good_y_formula(1), 2);
        assert_eq!(good_y_formula(2), 4); // ceil(1/2) = 1: 2^1 * C(2,1)
        assert_eq!(good_y_formula(3), 12); // ceil(1) = 1: 2^2 * C(3,1)
        assert_eq!(good_y_formula(4), 24); // ceil(3/2) = 2: 2^2 * C(4,2)
        assert_eq!(good_y_formula(5), 80); // ceil(2) = 2: 2^3 * C(5,2)
    }

    #[test]
    fn two_atom_verdicts() {
        let mu = CubeDistribution::make_delta_mix(2, 0.0).unwrap();
        let v = correlation_verdict(&mu, &p("00"), 2, 1.0).unwrap();
        let want = 0.25 * ((-0.5f64).exp() - 0.5f64.exp());
        assert!((v.integral - want).abs() < 1e-15);
        assert_eq!(v.verdict, Verdict::Negative);
        let v = correlation_verdict(&mu, &p("01"), 2, 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::Positive);

        let applicable = pc_theorem_check(&mu, &p("01"), 1.0).unwrap();
        assert!(applicable.applicable && applicable.holds);
        assert!((applicable.lhs - 1.0).abs() < 1e-15);
        let na = pc_theorem_check(&mu, &p("00"), 1.0).unwrap();
        assert!(!na.applicable);
    }

    #[test]
    fn product_verdicts_are_zero() {
        let mu = CubeDistribution::make_product(&[0.1, 0.7, 0.4]).unwrap();
        let v = verdicts(&mu, &p("101"), 0.5).unwrap();
        assert_eq!(verdict_string(&v), "00");
        for bit in 0..2 {
            assert_eq!(
                correlation_integral(&mu, &p("101"), 3, 0.5, bit).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn sign_flip_is_exact() {
        let mu = CubeDistribution::make_random_dense(5, 99).unwrap();
        for yi in 0..32 {
            let y = CubePoint::new(5, yi).unwrap();
            for k in 2..=5 {
                let a = correlation_integral(&mu, &y, k, 0.9, 0).unwrap();
                let b = correlation_integral(&mu, &y, k, 0.9, 1).unwrap();
                assert_eq!(a + b, 0.0);
            }
        }
    }

    #[test]
    fn count_examples() {
        let u = CubeDistribution::make_product(&[0.5; 4]).unwrap();
        let c = count_good_y(&u, 1.0).unwrap();
        assert_eq!(c.count, 16);
        assert_eq!(c.formula, 24);
        assert!(c.marginals_uniform);
        assert!(!c.hypotheses_hold);
        assert!(c.per_y.iter().all(|e| e.degenerate));

        for mu in [
            CubeDistribution::make_product(&[0.2]).unwrap(),
            CubeDistribution::make_delta_mix(1, 0.0).unwrap(),
        ] {
            let c = count_good_y(&mu, 1.7).unwrap();
            assert_eq!(c.count, 2);
            assert_eq!(c.formula, 2);
        }
    }

    #[test]
    fn verdict_index_checks() {
        let mu = CubeDistribution::make_product(&[0.5; 3]).unwrap();
        assert!(correlation_verdict(&mu, &p("000"), 1, 1.0).is_err());
        assert!(correlation_verdict(&mu, &p("000"), 4, 1.0).is_err());
    }
}
