use super::det::{low_bits, Determinant};
use crate::{Error, Result};

/// Largest space accepted for full enumeration.
pub const MAX_SPACE: u128 = 10_000_000;

/// An ordered, duplicate-free set of determinants in one (N_α, N_β) sector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetSpace {
    pub n_orb: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
    pub dets: Vec<Determinant>,
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// All n-bit masks with k set bits, ascending (Gosper's hack).
pub fn combinations(n: usize, k: usize) -> Vec<u32> {
    assert!(n <= 32);
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::with_capacity(binomial(n, k) as usize);
    let limit = if n == 32 { u64::MAX } else { 1u64 << n };
    let mut x = low_bits(k) as u64;
    while x < limit {
        out.push(x as u32);
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

impl DetSpace {
    /// Build from arbitrary determinants: validates the sector, sorts and dedups.
    pub fn from_dets(n_orb: usize, n_alpha: usize, n_beta: usize, mut dets: Vec<Determinant>) -> Result<Self> {
        check_orb(n_orb, n_alpha, n_beta)?;
        let mask = low_bits(n_orb);
        for d in &dets {
            if d.n_alpha() != n_alpha || d.n_beta() != n_beta || d.alpha & !mask != 0 || d.beta & !mask != 0 {
                return Err(Error::Invalid(format!("determinant {d} outside the ({n_alpha}, {n_beta}) sector")));
            }
        }
        dets.sort_unstable();
        dets.dedup();
        Ok(Self {
            n_orb,
            n_alpha,
            n_beta,
            dets,
        })
    }

    /// Tensor product of α strings and β strings.
    pub fn from_product(n_orb: usize, n_alpha: usize, n_beta: usize, alphas: &[u32], betas: &[u32]) -> Result<Self> {
        let mut a = alphas.to_vec();
        let mut b = betas.to_vec();
        a.sort_unstable();
        a.dedup();
        b.sort_unstable();
        b.dedup();
        let dets = a
            .iter()
            .flat_map(|&x| b.iter().map(move |&y| Determinant::new(x, y)))
            .collect();
        Self::from_dets(n_orb, n_alpha, n_beta, dets)
    }

    pub fn len(&self) -> usize {
        self.dets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dets.is_empty()
    }

    /// Position of a determinant, if present.
    #[inline]
    pub fn position(&self, d: &Determinant) -> Option<usize> {
        self.dets.binary_search(d).ok()
    }

    /// Size of the full symmetry sector C(n, N_α)·C(n, N_β).
    pub fn sector_size(&self) -> u128 {
        binomial(self.n_orb, self.n_alpha) * binomial(self.n_orb, self.n_beta)
    }
}

fn check_orb(n_orb: usize, n_alpha: usize, n_beta: usize) -> Result<()> {
    if n_orb == 0 || n_orb > 32 || n_alpha > n_orb || n_beta > n_orb {
        return Err(Error::Invalid(format!(
            "invalid sector n_orb={n_orb}, n_alpha={n_alpha}, n_beta={n_beta}"
        )));
    }
    Ok(())
}

/// Every determinant with the given particle numbers, in (α, β) order.
pub fn enumerate_symmetry_space(n_orb: usize, n_alpha: usize, n_beta: usize) -> Result<DetSpace> {
    check_orb(n_orb, n_alpha, n_beta)?;
    let size = binomial(n_orb, n_alpha) * binomial(n_orb, n_beta);
    if size > MAX_SPACE {
        return Err(Error::SpaceTooLarge(size));
    }
    let a = combinations(n_orb, n_alpha);
    let b = combinations(n_orb, n_beta);
    let dets = a
        .iter()
        .flat_map(|&x| b.iter().map(move |&y| Determinant::new(x, y)))
        .collect();
    Ok(DetSpace {
        n_orb,
        n_alpha,
        n_beta,
        dets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_sizes() {
        assert_eq!(enumerate_symmetry_space(6, 2, 2).unwrap().len(), 225);
        assert_eq!(enumerate_symmetry_space(2, 1, 1).unwrap().len(), 4);
        assert_eq!(enumerate_symmetry_space(7, 3, 3).unwrap().len(), 1225);
    }

    #[test]
    fn product_dedups() {
        let s = DetSpace::from_product(2, 1, 1, &[1, 2, 1], &[2, 1]).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.dets.windows(2).all(|w| w[0] < w[1]));
    }
}
