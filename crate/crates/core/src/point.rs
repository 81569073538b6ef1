use std::fmt;
use std::str::FromStr;

use crate::capacity::MAX_POINT_DIM;
use crate::error::{check_index, Error, Result};

/// A point of the Boolean cube `{0,1}^n`, bit-packed.
///
/// Coordinate `x_1` is the most significant bit of the index, so
/// `index = sum_k x_k 2^(n-k)` and the zero-padded binary form of the index
/// reads `x_1 x_2 ... x_n`. Prefixes `(x_1..x_k)` are therefore contiguous
/// index blocks of the full table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubePoint {
    n: u8,
    bits: u64,
}

impl CubePoint {
    pub fn new(n: usize, index: u64) -> Result<Self> {
        if n == 0 || n > MAX_POINT_DIM {
            return Err(Error::InvalidParameter(format!(
                "point dimension {n} outside 1..={MAX_POINT_DIM}"
            )));
        }
        if index >> n != 0 {
            return Err(Error::InvalidParameter(format!(
                "index {index} does not fit in {n} bits"
            )));
        }
        Ok(CubePoint {
            n: n as u8,
            bits: index,
        })
    }

    /// Caller guarantees `1 <= n <= 63` and `index < 2^n`.
    pub(crate) fn new_unchecked(n: usize, index: u64) -> Self {
        debug_assert!((1..=MAX_POINT_DIM).contains(&n) && index >> n == 0);
        CubePoint {
            n: n as u8,
            bits: index,
        }
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut index = 0u64;
        for (i, &b) in bits.iter().enumerate() {
            if b > 1 {
                return Err(Error::InvalidParameter(format!(
                    "coordinate {} has value {b}, expected 0 or 1",
                    i + 1
                )));
            }
            index = (index << 1) | b as u64;
        }
        if bits.len() > MAX_POINT_DIM {
            return Err(Error::InvalidParameter(format!(
                "point dimension {} outside 1..={MAX_POINT_DIM}",
                bits.len()
            )));
        }
        CubePoint::new(bits.len(), index)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        CubePoint::new(n, 0)
    }

    pub fn ones(n: usize) -> Result<Self> {
        CubePoint::new(n, 0).map(|p| p.complement())
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn index(&self) -> u64 {
        self.bits
    }

    /// Coordinate `x_i`, 1-based.
    pub fn coord(&self, i: usize) -> Result<u8> {
        check_index(i, 1, self.dim())?;
        Ok(self.coord_unchecked(i))
    }

    #[inline]
    pub(crate) fn coord_unchecked(&self, i: usize) -> u8 {
        ((self.bits >> (self.dim() - i)) & 1) as u8
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (1..=self.dim()).map(|i| self.coord_unchecked(i)).collect()
    }

    /// `(x_1, ..., x_k)` as a point of `I_k`.
    pub fn prefix(&self, k: usize) -> Result<Self> {
        check_index(k, 1, self.dim())?;
        Ok(CubePoint::new_unchecked(k, self.prefix_index(k)))
    }

    #[inline]
    pub(crate) fn prefix_index(&self, k: usize) -> u64 {
        self.bits >> (self.dim() - k)
    }

    pub fn complement(&self) -> Self {
        CubePoint {
            n: self.n,
            bits: !self.bits & mask(self.dim()),
        }
    }

    /// The point with coordinate `i` flipped.
    pub fn flip(&self, i: usize) -> Result<Self> {
        check_index(i, 1, self.dim())?;
        Ok(CubePoint {
            n: self.n,
            bits: self.bits ^ (1u64 << (self.dim() - i)),
        })
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }
}

#[inline]
pub(crate) fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl fmt::Display for CubePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.bits, width = self.dim())
    }
}

impl FromStr for CubePoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::InvalidParameter(format!(
                    "'{other}' in bit string {s:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        CubePoint::from_bits(&bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn msb_is_first_coordinate() {
        let p: CubePoint = "100".parse().unwrap();
        assert_eq!(p.index(), 4);
        assert_eq!(p.coord(1).unwrap(), 1);
        assert_eq!(p.coord(3).unwrap(), 0);
        assert_eq!(p.prefix(2).unwrap().to_string(), "10");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(CubePoint::new(0, 0).is_err());
        assert!(CubePoint::new(64, 0).is_err());
        assert!(CubePoint::new(3, 8).is_err());
        assert!("012".parse::<CubePoint>().is_err());
        assert!("".parse::<CubePoint>().is_err());
        assert!(CubePoint::zeros(3).unwrap().coord(4).is_err());
    }

    #[test]
    fn complement_and_flip() {
        let p: CubePoint = "0110".parse().unwrap();
        assert_eq!(p.complement().to_string(), "1001");
        assert_eq!(p.flip(1).unwrap().to_string(), "1110");
        assert_eq!(CubePoint::ones(63).unwrap().weight(), 63);
    }

    proptest! {
        #[test]
        fn bit_string_round_trip(n in 1usize..=63, raw in any::<u64>()) {
            let p = CubePoint::new(n, raw & mask(n)).unwrap();
            let q: CubePoint = p.to_string().parse().unwrap();
            prop_assert_eq!(p, q);
            prop_assert_eq!(CubePoint::from_bits(&p.to_bits()).unwrap(), p);
            prop_assert!((p.index() as u128) < (1u128 << n));
        }
    }
}
