//! Brute-force reference computations straight from the joint table. None of
//! these go through the prefix pyramid or the closed-form generators.

#![allow(dead_code)]

use cubeconc::{CubeDistribution, CubePoint};

pub fn bit(x: usize, n: usize, i: usize) -> usize {
    (x >> (n - i)) & 1
}

pub fn joint(mu: &CubeDistribution) -> Vec<f64> {
    let n = mu.n();
    (0..1u64 << n)
        .map(|i| mu.mass(&CubePoint::new(n, i).unwrap()).unwrap())
        .collect()
}

/// `mu^(i)(b)`.
pub fn marginal(joint: &[f64], n: usize, i: usize, b: usize) -> f64 {
    (0..joint.len())
        .filter(|&x| bit(x, n, i) == b)
        .map(|x| joint[x])
        .sum()
}

/// `mu_k(prefix)`, prefix given as an index of `I_k`.
pub fn prefix_mass(joint: &[f64], n: usize, k: usize, prefix: usize) -> f64 {
    (0..joint.len())
        .filter(|&x| x >> (n - k) == prefix)
        .map(|x| joint[x])
        .sum()
}

/// `mu(x_k = b | x')`, `None` on zero-mass prefixes.
pub fn conditional(joint: &[f64], n: usize, k: usize, prefix: usize, b: usize) -> Option<f64> {
    let w = prefix_mass(joint, n, k - 1, prefix);
    if w == 0.0 {
        return None;
    }
    let hit: f64 = (0..joint.len())
        .filter(|&x| x >> (n - k + 1) == prefix && bit(x, n, k) == b)
        .map(|x| joint[x])
        .sum();
    Some(hit / w)
}

pub fn mgf(joint: &[f64], y: usize, t: f64) -> f64 {
    let mean: f64 = joint
        .iter()
        .enumerate()
        .map(|(x, m)| m * (x ^ y).count_ones() as f64)
        .sum();
    joint
        .iter()
        .enumerate()
        .map(|(x, m)| m * (t * ((x ^ y).count_ones() as f64 - mean)).exp())
        .sum()
}

/// `E_k` term by term from the definition.
pub fn error_term(joint: &[f64], n: usize, y: usize, k: usize, t: f64) -> f64 {
    let q: Vec<f64> = (1..=n)
        .map(|i| marginal(joint, n, i, 1 - bit(y, n, i)))
        .collect();
    let mean_k: f64 = q[..k].iter().sum();
    let y_next = bit(y, n, k + 1);
    let marg_next = marginal(joint, n, k + 1, y_next);
    let mut integral = 0.0;
    for prefix in 0..1usize << k {
        let w = prefix_mass(joint, n, k, prefix);
        let Some(c) = conditional(joint, n, k + 1, prefix, y_next) else {
            continue;
        };
        let d = (prefix ^ (y >> (n - k))).count_ones() as f64;
        integral += (t * (d - mean_k)).exp() * (c - marg_next) * w;
    }
    (-t * q[k]).exp() * (1.0 - t.exp()) * integral
}

/// `sup |eps|` at coordinate `k` over positive-mass prefixes.
pub fn eps_sup(joint: &[f64], n: usize, k: usize) -> f64 {
    let m0 = marginal(joint, n, k, 0);
    (0..1usize << (k - 1))
        .filter_map(|p| conditional(joint, n, k, p, 0))
        .map(|c| (c - m0).abs())
        .fold(0.0, f64::max)
}

/// `min_{a in A} d_H(x, a)`.
pub fn set_distance(members: &[usize], x: usize) -> u32 {
    members.iter().map(|&a| (a ^ x).count_ones()).min().unwrap()
}
