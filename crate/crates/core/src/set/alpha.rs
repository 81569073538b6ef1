//! The concentration function
//! `alpha(eps) = sup {1 - mu(A_eps) : mu(A) >= 1/2}` and the median check
//! for the 1-Lipschitz map `x -> d_H(x, y)`.

use super::{enlargement, CubeSet};
use crate::capacity::{self, Cap};
use crate::dist::{CubeDistribution, PROB_TOL};
use crate::error::{Error, Result};
use crate::hamming::distance_law;
use crate::point::CubePoint;

/// Largest `n` whose subsets fit in a `u64` mask (`2^6 = 64` points).
const MASK_DIM: usize = 6;

fn half(mass: f64) -> bool {
    mass >= 0.5 - PROB_TOL
}

/// `dilate[b]` flips coordinate bit `b` of every member of a subset mask.
struct Dilation {
    n: usize,
    low: Vec<u64>,
}

impl Dilation {
    fn new(n: usize) -> Self {
        let points = 1u64 << n;
        let low = (0..n)
            .map(|b| {
                (0..points)
                    .filter(|i| (i >> b) & 1 == 0)
                    .fold(0u64, |m, i| m | 1 << i)
            })
            .collect();
        Dilation { n, low }
    }

    fn step(&self, set: u64) -> u64 {
        let mut out = set;
        for b in 0..self.n {
            let shift = 1u32 << b;
            out |= (set & self.low[b]) << shift;
            out |= (set & !self.low[b]) >> shift;
        }
        out
    }

    fn enlarge(&self, mut set: u64, eps: u32) -> u64 {
        for _ in 0..eps.min(self.n as u32) {
            set = self.step(set);
        }
        set
    }
}

fn mask_mass(mask: u64, joint: &[f64]) -> f64 {
    let mut m = mask;
    let mut total = 0.0;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        total += joint[i];
        m &= m - 1;
    }
    total
}

/// Exact `alpha(eps)` by enumerating every subset of the support of `mu`.
/// Dropping zero-mass points from `A` keeps `mu(A)` and can only shrink
/// `A_eps`, so subsets of the support suffice.
pub fn concentration_alpha(mu: &CubeDistribution, eps: u32) -> Result<f64> {
    let n = mu.n();
    capacity::ensure(Cap::ExactAlpha, n)?;
    if n > MASK_DIM {
        return Err(Error::Capacity {
            what: "exact concentration function (subset masks)",
            n,
            max: MASK_DIM,
        });
    }
    if eps as usize >= n {
        return Ok(0.0);
    }
    let joint = mu.joint()?;
    let support = joint
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0.0)
        .fold(0u64, |acc, (i, _)| acc | 1 << i);
    let dilation = Dilation::new(n);
    let mut best = f64::INFINITY;
    // Walk the non-empty submasks of the support.
    let mut sub = support;
    while sub != 0 {
        if half(mask_mass(sub, joint)) {
            best = best.min(mask_mass(dilation.enlarge(sub, eps), joint));
        }
        sub = (sub - 1) & support;
    }
    Ok((1.0 - best).max(0.0))
}

/// `1 - mu(W_eps)` for an explicit witness `W` with `mu(W) >= 1/2`: a lower
/// bound on `alpha(eps)`, never the value itself.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaLowerBound {
    pub eps: u32,
    pub value: f64,
    pub witness: CubeSet,
    pub witness_mass: f64,
}

/// Best witness among Hamming balls `{d_H(., c) <= r}` (smallest `r`
/// reaching mass 1/2, every center `c`) and the set of heaviest points
/// taken in decreasing mass order until mass 1/2 is reached.
pub fn concentration_alpha_lower_bound(mu: &CubeDistribution, eps: u32) -> Result<AlphaLowerBound> {
    let n = mu.n();
    capacity::ensure(Cap::GreedyAlpha, n)?;
    let joint = mu.joint()?;

    // (value, center, radius, mass) of the best ball so far.
    let mut best_ball: Option<(f64, u64, usize, f64)> = None;
    for center in 0..1u64 << n {
        let c = CubePoint::new(n, center)?;
        let law = distance_law(mu, &c)?;
        let mut cumulative = 0.0;
        let mut radius = n;
        for (r, mass) in law.iter().enumerate() {
            cumulative += mass;
            if half(cumulative) {
                radius = r;
                break;
            }
        }
        let ball_mass: f64 = law[..=radius].iter().sum();
        let grown: f64 = law[..=(radius + eps as usize).min(n)].iter().sum();
        let value = (1.0 - grown).max(0.0);
        if best_ball.is_none_or(|(v, ..)| value > v) {
            best_ball = Some((value, center, radius, ball_mass));
        }
    }
    let (ball_value, center, radius, ball_mass) = best_ball.expect("I_n is non-empty");

    let mut order: Vec<usize> = (0..joint.len()).collect();
    order.sort_by(|&a, &b| joint[b].total_cmp(&joint[a]).then(a.cmp(&b)));
    let mut heavy = CubeSet::empty(n)?;
    let mut mass = 0.0;
    for i in order {
        heavy.insert_index(i as u64);
        mass += joint[i];
        if half(mass) {
            break;
        }
    }
    let heavy_value = (1.0 - enlargement(&heavy, eps)?.measure(mu)?).max(0.0);

    let (value, witness, witness_mass) = if heavy_value > ball_value {
        (heavy_value, heavy, mass)
    } else {
        let ball = CubeSet::from_predicate(n, |i| (i ^ center).count_ones() as usize <= radius)?;
        (ball_value, ball, ball_mass)
    };
    Ok(AlphaLowerBound {
        eps,
        value,
        witness,
        witness_mass,
    })
}

/// The median concentration chain for `f = d_H(., y)`:
/// `mu{|f - M| <= eps} >= 1 - 2 alpha(eps)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MedianCheck {
    pub eps: u32,
    /// Smallest `m` with `mu(f <= m) >= 1/2`.
    pub median: u32,
    pub mass_below: f64,
    pub mass_above: f64,
    pub alpha: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl MedianCheck {
    pub fn is_median(&self) -> bool {
        half(self.mass_below) && half(self.mass_above)
    }

    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs - PROB_TOL
    }
}

pub fn median_concentration_check(
    mu: &CubeDistribution,
    y: &CubePoint,
    eps: u32,
) -> Result<MedianCheck> {
    let alpha = concentration_alpha(mu, eps)?;
    let law = distance_law(mu, y)?;
    let mut cumulative = 0.0;
    let mut median = law.len() - 1;
    for (m, p) in law.iter().enumerate() {
        cumulative += p;
        if half(cumulative) {
            median = m;
            break;
        }
    }
    let mass_below = law[..=median].iter().sum();
    let mass_above = law[median..].iter().sum();
    let lo = median.saturating_sub(eps as usize);
    let hi = (median + eps as usize).min(law.len() - 1);
    let lhs = law[lo..=hi].iter().sum();
    Ok(MedianCheck {
        eps,
        median: median as u32,
        mass_below,
        mass_above,
        alpha,
        lhs,
        rhs: 1.0 - 2.0 * alpha,
    })
}

/// `1 - mu(A_eps)` through the distance map.
#[cfg(test)]
fn deficit(mu: &CubeDistribution, a: &CubeSet, eps: u32) -> Result<f64> {
    let dist = super::distance_map(a)?;
    let joint = mu.joint()?;
    Ok(1.0
        - dist
            .iter()
            .zip(joint)
            .filter(|(d, _)| **d <= eps)
            .map(|(_, m)| m)
            .sum::<f64>())
}
