use std::fmt;

use crate::{Error, Result};

/// A Slater determinant as α and β occupation bitmasks over ≤ 32 spatial
/// orbitals. Ordering is lexicographic by (alpha, beta).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Determinant {
    pub alpha: u32,
    pub beta: u32,
}

impl Determinant {
    pub const fn new(alpha: u32, beta: u32) -> Self {
        Self { alpha, beta }
    }

    /// Closed-shell reference with the lowest orbitals filled.
    pub fn hartree_fock(n_alpha: usize, n_beta: usize) -> Self {
        Self::new(low_bits(n_alpha), low_bits(n_beta))
    }

    pub fn n_alpha(&self) -> usize {
        self.alpha.count_ones() as usize
    }

    pub fn n_beta(&self) -> usize {
        self.beta.count_ones() as usize
    }

    /// Combined spin-orbital occupation: qubit p is α orbital p, qubit
    /// n_orb + p is β orbital p.
    pub fn to_index(&self, n_orb: usize) -> u64 {
        self.alpha as u64 | ((self.beta as u64) << n_orb)
    }

    pub fn from_index(x: u64, n_orb: usize) -> Self {
        let mask = (1u64 << n_orb) - 1;
        Self::new((x & mask) as u32, (x >> n_orb) as u32)
    }

    /// Measurement string of length 2·n_orb: the right half holds α
    /// occupations, the left half β; the rightmost character is qubit 0.
    pub fn to_bitstring(&self, n_orb: usize) -> String {
        let x = self.to_index(n_orb);
        (0..2 * n_orb)
            .rev()
            .map(|k| if (x >> k) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn from_bitstring(s: &str) -> Result<Self> {
        let n2 = s.len();
        if n2 == 0 || n2 % 2 != 0 || n2 > 64 {
            return Err(Error::Invalid(format!("bitstring length {n2} must be even and ≤ 64")));
        }
        let mut x = 0u64;
        for c in s.chars() {
            x <<= 1;
            match c {
                '0' => {}
                '1' => x |= 1,
                _ => return Err(Error::Invalid(format!("bad bitstring character `{c}`"))),
            }
        }
        Ok(Self::from_index(x, n2 / 2))
    }

    /// Number of spin orbitals by which two determinants differ (excitation rank).
    pub fn excitation_degree(&self, other: &Self) -> usize {
        (((self.alpha ^ other.alpha).count_ones() + (self.beta ^ other.beta).count_ones()) / 2) as usize
    }
}

impl fmt::Display for Determinant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{:b}/b{:b}", self.alpha, self.beta)
    }
}

pub fn low_bits(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Indices of set bits in ascending order.
pub fn bits(mut x: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if x == 0 {
            None
        } else {
            let k = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(k)
        }
    })
}

/// (−1)^(number of occupied orbitals strictly between i and a).
#[inline]
pub fn excitation_sign(occ: u32, i: usize, a: usize) -> f64 {
    let (lo, hi) = if i < a { (i, a) } else { (a, i) };
    let between = if hi - lo <= 1 {
        0
    } else {
        let mask = ((1u64 << hi) - 1) as u32 & !(((1u64 << (lo + 1)) - 1) as u32);
        (occ & mask).count_ones()
    };
    if between % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Apply a product of fermionic operators (rightmost first) to a
/// spin-orbital occupation in Jordan–Wigner order. Returns the sign and the
/// resulting occupation, or `None` if the state is annihilated.
pub fn apply_ops(mut occ: u64, ops: &[(usize, bool)]) -> Option<(f64, u64)> {
    let mut sign = 1.0;
    for &(k, create) in ops.iter().rev() {
        let bit = 1u64 << k;
        if create == (occ & bit != 0) {
            return None;
        }
        if (occ & (bit - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        occ ^= bit;
    }
    Some((sign, occ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstring_halves() {
        let d = Determinant::new(0b01, 0b10);
        assert_eq!(d.to_bitstring(2), "1001");
        assert_eq!(Determinant::from_bitstring("1001").unwrap(), d);
        assert!(Determinant::from_bitstring("10x1").is_err());
    }

    #[test]
    fn sign_matches_operator_algebra() {
        let occ = 0b1011_0110u32;
        for i in bits(occ) {
            for a in 0..8 {
                if occ >> a & 1 == 1 {
                    continue;
                }
                let (s, _) = apply_ops(occ as u64, &[(a, true), (i, false)]).unwrap();
                assert_eq!(s, excitation_sign(occ, i, a));
            }
        }
    }
}
