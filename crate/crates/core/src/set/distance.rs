use std::collections::VecDeque;

use super::CubeSet;
use crate::error::{Error, Result};
use crate::point::CubePoint;

fn check_point(x: &CubePoint, a: &CubeSet) -> Result<()> {
    if x.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: x.dim(),
        });
    }
    a.ensure_nonempty()
}

/// `d(x, A) = min_{a in A} d_H(x, a)`.
pub fn set_distance(x: &CubePoint, a: &CubeSet) -> Result<u32> {
    check_point(x, a)?;
    let xi = x.index();
    Ok(a.members().map(|m| (m ^ xi).count_ones()).min().unwrap())
}

/// `d(x, A)` through the last-coordinate decomposition
/// `d(x, A) = min{d(x', A_{x_n}), d(x', A_{1 - x_n}) + 1}`.
pub fn set_distance_recursive(x: &CubePoint, a: &CubeSet) -> Result<u32> {
    check_point(x, a)?;
    Ok(recurse(x.index(), a)?.unwrap())
}

/// `None` stands for the distance to the empty set.
fn recurse(x: u64, a: &CubeSet) -> Result<Option<u32>> {
    if a.is_empty() {
        return Ok(None);
    }
    if a.dim() == 1 {
        return Ok(Some(u32::from(!a.contains_index(x))));
    }
    let (a0, a1) = a.split_last()?;
    let (same, other) = if x & 1 == 0 { (a0, a1) } else { (a1, a0) };
    let rest = x >> 1;
    let d_same = recurse(rest, &same)?;
    let d_other = recurse(rest, &other)?.map(|d| d + 1);
    Ok(match (d_same, d_other) {
        (Some(s), Some(o)) => Some(s.min(o)),
        (s, o) => s.or(o),
    })
}

/// `d(x, A)` for every `x in I_n`, by breadth-first search from `A`.
pub fn distance_map(a: &CubeSet) -> Result<Vec<u32>> {
    a.ensure_nonempty()?;
    let n = a.dim();
    let mut dist = vec![u32::MAX; 1 << n];
    let mut queue = VecDeque::new();
    for m in a.members() {
        dist[m as usize] = 0;
        queue.push_back(m);
    }
    while let Some(x) = queue.pop_front() {
        let next = dist[x as usize] + 1;
        for b in 0..n {
            let y = x ^ (1 << b);
            if dist[y as usize] == u32::MAX {
                dist[y as usize] = next;
                queue.push_back(y);
            }
        }
    }
    Ok(dist)
}

/// `A_eps = {x : d(x, A) <= eps}`.
pub fn enlargement(a: &CubeSet, eps: u32) -> Result<CubeSet> {
    let dist = distance_map(a)?;
    CubeSet::from_predicate(a.dim(), |i| dist[i as usize] <= eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> CubePoint {
        s.parse().unwrap()
    }

    #[test]
    fn distance_examples() {
        let a = CubeSet::from_members(2, [0, 3]).unwrap();
        assert_eq!(set_distance(&p("01"), &a).unwrap(), 1);
        assert_eq!(set_distance(&p("11"), &a).unwrap(), 0);
        let origin = CubeSet::from_members(5, [0]).unwrap();
        assert_eq!(set_distance(&p("10110"), &origin).unwrap(), 3);
        assert_eq!(set_distance_recursive(&p("10110"), &origin).unwrap(), 3);
        assert_eq!(
            set_distance(&p("0"), &CubeSet::empty(1).unwrap()),
            Err(Error::EmptySet)
        );
        assert!(set_distance(&p("0"), &a).is_err());
    }

    #[test]
    fn paths_agree_on_small_cubes() {
        for mask in 1u64..1 << 8 {
            let a = CubeSet::from_predicate(3, |i| (mask >> i) & 1 == 1).unwrap();
            let map = distance_map(&a).unwrap();
            for xi in 0..8 {
                let x = CubePoint::new(3, xi).unwrap();
                let d = set_distance(&x, &a).unwrap();
                assert_eq!(set_distance_recursive(&x, &a).unwrap(), d);
                assert_eq!(map[xi as usize], d);
            }
        }
    }

    #[test]
    fn enlargement_examples() {
        let a = CubeSet::from_members(3, [2, 5]).unwrap();
        assert_eq!(enlargement(&a, 0).unwrap(), a);
        let origin = CubeSet::from_members(4, [0]).unwrap();
        assert_eq!(enlargement(&origin, 4).unwrap(), CubeSet::full(4).unwrap());
        assert_eq!(enlargement(&origin, 1).unwrap().len(), 5);
        let half = CubeSet::from_members(2, [0, 1]).unwrap();
        assert_eq!(enlargement(&half, 1).unwrap(), CubeSet::full(2).unwrap());
    }
}
