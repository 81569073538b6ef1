//! Subsets of the cube, Hamming distance to a set, enlargements, the
//! concentration function and the uniform Lipschitz set-distance bound.

mod alpha;
mod distance;
mod lipschitz;

use serde::Deserialize;

use crate::capacity::{self, Cap};
use crate::dist::CubeDistribution;
use crate::error::{Error, Result};
use crate::point::CubePoint;

pub use alpha::{
    concentration_alpha, concentration_alpha_lower_bound, median_concentration_check,
    AlphaLowerBound, MedianCheck,
};
pub use distance::{distance_map, enlargement, set_distance, set_distance_recursive};
pub use lipschitz::{
    conditional_sup_bounds, lipschitz_set_bound, minmax_maximizer, minmax_value,
    talagrand_product_baseline, MinMaxPoint, SetDistanceBound, TalagrandBaseline,
};

/// A subset of `I_n` stored as a bitset over the `2^n` indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CubeSet {
    n: usize,
    words: Vec<u64>,
}

fn word_count(n: usize) -> usize {
    (1usize << n).div_ceil(64)
}

impl CubeSet {
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        capacity::ensure(Cap::Dense, n)?;
        Ok(CubeSet {
            n,
            words: vec![0; word_count(n)],
        })
    }

    pub fn full(n: usize) -> Result<Self> {
        let mut set = Self::empty(n)?;
        for i in 0..1u64 << n {
            set.insert_index(i);
        }
        Ok(set)
    }

    pub fn from_members(n: usize, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut set = Self::empty(n)?;
        for i in members {
            if i >> n != 0 {
                return Err(Error::IndexOutOfRange {
                    index: i as usize,
                    lo: 0,
                    hi: (1usize << n) - 1,
                });
            }
            set.insert_index(i);
        }
        Ok(set)
    }

    pub fn from_points(n: usize, points: &[CubePoint]) -> Result<Self> {
        let mut set = Self::empty(n)?;
        for p in points {
            set.insert(p)?;
        }
        Ok(set)
    }

    pub fn from_predicate(n: usize, mut keep: impl FnMut(u64) -> bool) -> Result<Self> {
        let mut set = Self::empty(n)?;
        for i in 0..1u64 << n {
            if keep(i) {
                set.insert_index(i);
            }
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains_index(&self, i: u64) -> bool {
        (self.words[(i / 64) as usize] >> (i % 64)) & 1 == 1
    }

    pub fn contains(&self, x: &CubePoint) -> bool {
        x.dim() == self.n && self.contains_index(x.index())
    }

    #[inline]
    pub(crate) fn insert_index(&mut self, i: u64) {
        self.words[(i / 64) as usize] |= 1 << (i % 64);
    }

    pub fn insert(&mut self, x: &CubePoint) -> Result<()> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.dim(),
            });
        }
        self.insert_index(x.index());
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub(crate) fn ensure_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptySet)
        } else {
            Ok(())
        }
    }

    /// Member indices in increasing order.
    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        (0..1u64 << self.n).filter(|&i| self.contains_index(i))
    }

    pub fn is_subset(&self, other: &CubeSet) -> bool {
        self.n == other.n
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    /// `mu_n(A)`.
    pub fn measure(&self, mu: &CubeDistribution) -> Result<f64> {
        if mu.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: mu.n(),
                found: self.n,
            });
        }
        let joint = mu.joint()?;
        Ok(self.members().map(|i| joint[i as usize]).sum())
    }

    /// `(A_0, A_1)` in `I_{n-1}`: `A_b = {x' : (x', b) in A}`. Needs `n >= 2`.
    pub fn split_last(&self) -> Result<(CubeSet, CubeSet)> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(
                "cannot drop the last coordinate of I_1".into(),
            ));
        }
        let mut a0 = CubeSet::empty(self.n - 1)?;
        let mut a1 = CubeSet::empty(self.n - 1)?;
        for i in self.members() {
            if i & 1 == 0 {
                a0.insert_index(i >> 1);
            } else {
                a1.insert_index(i >> 1);
            }
        }
        Ok((a0, a1))
    }

    /// Bit `i` of the hex integer is membership of index `i`.
    pub fn to_bitmask_hex(&self) -> String {
        let digits = (1usize << self.n).div_ceil(4);
        let mut out = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let mut nibble = 0u32;
            for b in 0..4 {
                let i = (d * 4 + b) as u64;
                if i >> self.n == 0 && self.contains_index(i) {
                    nibble |= 1 << b;
                }
            }
            out.push(char::from_digit(nibble, 16).unwrap());
        }
        out
    }

    pub fn from_bitmask_hex(n: usize, hex: &str) -> Result<Self> {
        let mut set = Self::empty(n)?;
        let hex = hex.trim();
        let hex = hex
            .strip_prefix("0x")
            .or_else(|| hex.strip_prefix("0X"))
            .unwrap_or(hex);
        for (d, c) in hex.chars().rev().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::Format(format!("bad hex digit {c:?}")))?;
            for b in 0..4 {
                if (nibble >> b) & 1 == 1 {
                    let i = (d * 4 + b) as u64;
                    if i >> n != 0 {
                        return Err(Error::Format(format!(
                            "bitmask sets index {i}, outside I_{n}"
                        )));
                    }
                    set.insert_index(i);
                }
            }
        }
        Ok(set)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: SetFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        match (file.members, file.bitmask_hex) {
            (Some(m), None) => Self::from_members(file.n, m),
            (None, Some(h)) => Self::from_bitmask_hex(file.n, &h),
            _ => Err(Error::Format(
                "set file needs exactly one of \"members\" or \"bitmask_hex\"".into(),
            )),
        }
    }

    pub fn to_json_string(&self) -> String {
        let members: Vec<String> = self.members().map(|i| i.to_string()).collect();
        format!(
            "{{\"n\": {}, \"members\": [{}]}}\n",
            self.n,
            members.join(", ")
        )
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SetFile {
    n: usize,
    #[serde(default)]
    members: Option<Vec<u64>>,
    #[serde(default)]
    bitmask_hex: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_membership() {
        let a = CubeSet::from_members(3, [0, 5, 7]).unwrap();
        assert_eq!(a.len(), 3);
        assert!(a.contains(&"101".parse().unwrap()));
        assert!(!a.contains(&"100".parse().unwrap()));
        assert!(!a.contains(&"01".parse().unwrap()));
        assert!(CubeSet::from_members(2, [4]).is_err());
        assert!(CubeSet::empty(2).unwrap().is_empty());
        assert_eq!(CubeSet::full(7).unwrap().len(), 128);
    }

    #[test]
    fn split_drops_last_coordinate() {
        // {001, 010, 011} -> A_0 = {01}, A_1 = {00, 01}
        let a = CubeSet::from_members(3, [1, 2, 3]).unwrap();
        let (a0, a1) = a.split_last().unwrap();
        assert_eq!(a0.members().collect::<Vec<_>>(), vec![1]);
        assert_eq!(a1.members().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn measure_of_sets() {
        let mu = CubeDistribution::make_delta_mix(3, 0.1).unwrap();
        let a = CubeSet::from_members(3, [0, 1]).unwrap();
        assert!((a.measure(&mu).unwrap() - (0.4 + 0.1 / 6.0)).abs() < 1e-15);
    }

    #[test]
    fn json_forms() {
        let a = CubeSet::from_json_str(r#"{"n": 3, "members": [0, 7]}"#).unwrap();
        let b = CubeSet::from_json_str(r#"{"n": 3, "bitmask_hex": "81"}"#).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_bitmask_hex(), "81");
        assert_eq!(CubeSet::from_members(1, [1]).unwrap().to_bitmask_hex(), "2");
        assert!(CubeSet::from_json_str(r#"{"n": 3}"#).is_err());
        assert!(CubeSet::from_json_str(r#"{"n": 2, "bitmask_hex": "1f"}"#).is_err());
        assert!(CubeSet::from_json_str(r#"{"n": 2, "members": [1], "bitmask_hex": "2"}"#).is_err());
    }

    proptest! {
        #[test]
        fn json_round_trips(n in 1usize..=8, seed in any::<u64>()) {
            let a = CubeSet::from_predicate(n, |i| (seed.rotate_left(i as u32) ^ i) & 3 == 0).unwrap();
            prop_assert_eq!(CubeSet::from_json_str(&a.to_json_string()).unwrap(), a.clone());
            prop_assert_eq!(CubeSet::from_bitmask_hex(n, &a.to_bitmask_hex()).unwrap(), a.clone());
            prop_assert_eq!(a.len(), a.members().count());
        }
    }
}
