//! Concentration of `x -> d_H(x, y)` about its mean for a fixed `y`.
//!
//! Everything here is exact: the centered moment generating function and the
//! error terms are computed by enumerating `I_n` (through the prefix pyramid
//! of the distribution), so `n` is bounded by the dense cap.

mod correlation;
mod error_bound;
mod small_variance;

use crate::dist::{CubeDistribution, Marginal};
use crate::error::{check_index, check_positive_t, Error, Result};
use crate::point::{mask, CubePoint};

pub use correlation::{
    correlation_integral, correlation_verdict, count_good_y, good_y_formula, pc_theorem_check,
    verdict_string, verdicts, CorrelationVerdict, GoodYCount, GoodYEntry, Verdict,
};
pub use error_bound::{error_term, inductive_bound, ErrorLedger};
pub use small_variance::{
    b_coefficients, error_abs_bound, product_formula, small_variance_bound, ProductFormula,
    SmallVarianceBound,
};

/// Tolerance used when deciding `|d - mean| >= c` for integer `d`.
pub const TIE_TOL: f64 = 1e-9;

pub fn hamming(x: &CubePoint, y: &CubePoint) -> Result<u32> {
    check_same_dim(x.dim(), y.dim())?;
    Ok((x.index() ^ y.index()).count_ones())
}

fn check_same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `mu^(i)(x_i != y_i)` for each coordinate.
fn disagreement_probs(marginals: &[Marginal], y: &CubePoint) -> Vec<f64> {
    marginals
        .iter()
        .enumerate()
        .map(|(i, m)| m.prob(1 - y.coord_unchecked(i + 1)))
        .collect()
}

/// `E d_H(x, y) = sum_i mu^(i)(x_i != y_i)`, from the marginals alone.
pub fn mean_hamming(mu: &CubeDistribution, y: &CubePoint) -> Result<f64> {
    check_same_dim(mu.n(), y.dim())?;
    Ok(disagreement_probs(&mu.marginals()?, y).iter().sum())
}

/// Law of `d_H(x, y)` under `mu`: entry `j` is `mu{d_H(x, y) = j}`.
pub fn distance_law(mu: &CubeDistribution, y: &CubePoint) -> Result<Vec<f64>> {
    check_same_dim(mu.n(), y.dim())?;
    let joint = mu.joint()?;
    let mut law = vec![0.0; mu.n() + 1];
    let yi = y.index();
    for (x, &m) in joint.iter().enumerate() {
        law[((x as u64) ^ yi).count_ones() as usize] += m;
    }
    Ok(law)
}

/// `E exp(t (d_H(x, y) - E d_H(x, y)))` for one `(y, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenteredMgf {
    pub y: CubePoint,
    pub t: f64,
    pub mean: f64,
    pub value: f64,
}

pub fn centered_mgf(mu: &CubeDistribution, y: &CubePoint, t: f64) -> Result<CenteredMgf> {
    check_positive_t(t)?;
    let mean = mean_hamming(mu, y)?;
    let law = distance_law(mu, y)?;
    Ok(CenteredMgf {
        y: *y,
        t,
        mean,
        value: mgf_from_law(&law, mean, t),
    })
}

pub(crate) fn mgf_from_law(law: &[f64], mean: f64, t: f64) -> f64 {
    law.iter()
        .enumerate()
        .filter(|(_, &m)| m > 0.0)
        .map(|(d, &m)| m * (t * (d as f64 - mean)).exp())
        .sum()
}

/// `a_k(x', y', t) = exp(t (d_H(x', y') - E_{mu_k} d_H(x', y')))` for a
/// prefix `x'` of length `k` and `y'` the first `k` coordinates of `y`.
pub fn a_factor(
    mu: &CubeDistribution,
    k: usize,
    x_prefix: &CubePoint,
    y: &CubePoint,
    t: f64,
) -> Result<f64> {
    check_positive_t(t)?;
    check_same_dim(mu.n(), y.dim())?;
    check_index(k, 1, mu.n())?;
    if x_prefix.dim() != k {
        return Err(Error::InvalidParameter(format!(
            "prefix {x_prefix} has length {}, expected {k}",
            x_prefix.dim()
        )));
    }
    let marginals = mu.marginals()?;
    let prefix_mean: f64 = disagreement_probs(&marginals[..k], y).iter().sum();
    let d = (x_prefix.index() ^ y.prefix_index(k)).count_ones() as f64;
    Ok((t * (d - prefix_mean)).exp())
}

/// Exact deviation probability next to the independent-case tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    pub c: f64,
    pub mean: f64,
    /// `mu{|d_H(x, y) - E d_H| >= c}`.
    pub exact_tail: f64,
    /// `2 exp(-c^2 / 2n)`.
    pub hoeffding_tail: f64,
}

impl TailBound {
    pub fn holds(&self) -> bool {
        self.exact_tail <= self.hoeffding_tail * (1.0 + crate::report::REL_TOL)
    }
}

pub fn tail_bound(mu: &CubeDistribution, y: &CubePoint, c: f64) -> Result<TailBound> {
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::InvalidParameter(format!("c = {c}; need c > 0")));
    }
    let mean = mean_hamming(mu, y)?;
    let law = distance_law(mu, y)?;
    let exact_tail = law
        .iter()
        .enumerate()
        .filter(|(d, _)| (*d as f64 - mean).abs() >= c - TIE_TOL)
        .map(|(_, &m)| m)
        .sum();
    let n = mu.n() as f64;
    Ok(TailBound {
        c,
        mean,
        exact_tail,
        hoeffding_tail: 2.0 * (-c * c / (2.0 * n)).exp(),
    })
}

/// Shared per-`(mu, y, t)` state for the prefix computations.
pub(crate) struct PrefixCtx {
    pub n: usize,
    pub y: CubePoint,
    pub t: f64,
    /// `q[i-1] = mu^(i)(x_i != y_i)`.
    pub q: Vec<f64>,
    /// `prefix_mean[k] = sum_{i <= k} q_i`, `prefix_mean[0] = 0`.
    pub prefix_mean: Vec<f64>,
}

impl PrefixCtx {
    pub fn new(mu: &CubeDistribution, y: &CubePoint, t: f64) -> Result<Self> {
        check_positive_t(t)?;
        check_same_dim(mu.n(), y.dim())?;
        let q = disagreement_probs(&mu.marginals()?, y);
        let mut prefix_mean = Vec::with_capacity(q.len() + 1);
        prefix_mean.push(0.0);
        for &qi in &q {
            prefix_mean.push(prefix_mean.last().unwrap() + qi);
        }
        Ok(PrefixCtx {
            n: mu.n(),
            y: *y,
            t,
            q,
            prefix_mean,
        })
    }

    /// `a_k` at prefix index `j` of `I_k`.
    #[inline]
    pub fn a(&self, k: usize, j: u64) -> f64 {
        let d = ((j ^ self.y.prefix_index(k)) & mask(k)).count_ones() as f64;
        (self.t * (d - self.prefix_mean[k])).exp()
    }

    /// `y_k` (1-based).
    #[inline]
    pub fn y_bit(&self, k: usize) -> u8 {
        self.y.coord_unchecked(k)
    }

    /// `exp(-t q_k)`, the prefactor of the level-(k-1) error term.
    #[inline]
    pub fn prefactor(&self, k: usize) -> f64 {
        (-self.t * self.q[k - 1]).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> CubePoint {
        s.parse().unwrap()
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(&p("011"), &p("011")).unwrap(), 0);
        assert_eq!(hamming(&p("011"), &p("110")).unwrap(), 2);
        let y = p("01101");
        assert_eq!(hamming(&y.complement(), &y).unwrap(), 5);
        assert!(matches!(
            hamming(&p("01"), &p("011")),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mean_of_two_atom_mixture_is_half_n() {
        for n in 1..=6 {
            let mu = CubeDistribution::make_delta_mix(n, 0.0).unwrap();
            for yi in 0..1u64 << n {
                let y = CubePoint::new(n, yi).unwrap();
                assert!((mean_hamming(&mu, &y).unwrap() - n as f64 / 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn point_mass_has_zero_mean() {
        let mu = CubeDistribution::make_product(&[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(mean_hamming(&mu, &p("010")).unwrap(), 0.0);
        let mgf = centered_mgf(&mu, &p("010"), 1.3).unwrap();
        assert_eq!(mgf.value, 1.0);
    }

    #[test]
    fn single_fair_coin_gives_cosh() {
        let mu = CubeDistribution::make_product(&[0.5]).unwrap();
        for t in [0.1, 1.0, 2.5] {
            let v = centered_mgf(&mu, &p("0"), t).unwrap().value;
            assert!((v - (t / 2.0).cosh()).abs() < 1e-14);
        }
    }

    #[test]
    fn two_atom_mgf_closed_form() {
        let mu = CubeDistribution::make_delta_mix(8, 0.0).unwrap();
        let v = centered_mgf(&mu, &CubePoint::zeros(8).unwrap(), 1.0)
            .unwrap()
            .value;
        let want = 0.5 * (-4f64).exp() + 0.5 * 4f64.exp();
        assert!((v - want).abs() < 1e-12 * want);
        // exceeds the independent-case bound e^{n t^2 / 2} = e^4? it does not
        assert!(v < 4f64.exp());
    }

    #[test]
    fn a_factor_examples() {
        let mu = CubeDistribution::make_product(&[0.5, 0.5]).unwrap();
        let t = 0.7;
        let y = p("01");
        let same = a_factor(&mu, 1, &p("0"), &y, t).unwrap();
        let diff = a_factor(&mu, 1, &p("1"), &y, t).unwrap();
        assert!((same - (-t / 2.0).exp()).abs() < 1e-15);
        assert!((diff - (t / 2.0).exp()).abs() < 1e-15);
        assert!(a_factor(&mu, 2, &p("0"), &y, t).is_err());
        assert!(a_factor(&mu, 1, &p("0"), &y, 0.0).is_err());
    }

    #[test]
    fn t_must_be_positive() {
        let mu = CubeDistribution::make_product(&[0.5, 0.5]).unwrap();
        for t in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                centered_mgf(&mu, &p("00"), t),
                Err(Error::InvalidParameter(_))
            ));
        }
    }

    #[test]
    fn tail_examples() {
        let u10 = CubeDistribution::make_product(&[0.5; 10]).unwrap();
        let tb = tail_bound(&u10, &CubePoint::zeros(10).unwrap(), 10.0).unwrap();
        assert_eq!(tb.exact_tail, 0.0);
        assert!(tb.holds());

        // |d - 2| >= 2 under Bin(4, 1/2): d in {0, 4}
        let u4 = CubeDistribution::make_product(&[0.5; 4]).unwrap();
        let tb = tail_bound(&u4, &CubePoint::zeros(4).unwrap(), 2.0).unwrap();
        assert!((tb.exact_tail - 2.0 / 16.0).abs() < 1e-15);
        assert!((tb.hoeffding_tail - 2.0 * (-0.5f64).exp()).abs() < 1e-15);
        assert!(tb.holds());

        let d10 = CubeDistribution::make_delta_mix(10, 0.0).unwrap();
        let tb = tail_bound(&d10, &CubePoint::zeros(10).unwrap(), 4.0).unwrap();
        assert!((tb.exact_tail - 1.0).abs() < 1e-15);
        assert!((tb.hoeffding_tail - 2.0 * (-0.8f64).exp()).abs() < 1e-15);
        assert!(!tb.holds());

        assert!(tail_bound(&u4, &CubePoint::zeros(4).unwrap(), 0.0).is_err());
    }
}
