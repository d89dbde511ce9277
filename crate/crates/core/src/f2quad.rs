//! Quadratic forms over F₂.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::finite_forms::two_elementary_invariants;
use crate::lattice::{discriminant_form, Lattice};

/// `q(x) = Σ_{i≤j} Qᵢⱼ xᵢxⱼ` on `F₂^dim`; vectors are bitmasks (bit `i` is
/// coordinate `i`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F2QuadraticSpace {
    dim: usize,
    /// `upper[i]` has bit `j` set iff `Qᵢⱼ = 1`, `j ≥ i`.
    upper: Vec<u64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct SubspaceCounts {
    /// `q|H = 0`.
    pub isotropic: u64,
    /// Polar form zero on `H`, `q|H ≠ 0` (like `x²`).
    pub rank1_kernel: u64,
    /// No nonzero zero of `q` (like `x² + xy + y²`).
    pub minus_line: u64,
    /// Exactly one nonzero zero (like `xy`).
    pub split: u64,
}

impl SubspaceCounts {
    pub fn total(&self) -> u64 {
        self.isotropic + self.rank1_kernel + self.minus_line + self.split
    }
}

impl F2QuadraticSpace {
    /// Builds from an upper-triangular 0/1 matrix; entries below the
    /// diagonal are ignored.
    pub fn new(q: &[Vec<u8>]) -> Result<Self> {
        let dim = q.len();
        if dim > 63 {
            return Err(Error::BadParams("F2 space dimension above 63".into()));
        }
        let mut upper = vec![0u64; dim];
        for (i, row) in q.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::ShapeMismatch("F2 form must be square".into()));
            }
            for (j, &v) in row.iter().enumerate().skip(i) {
                if v > 1 {
                    return Err(Error::BadParams(format!("entry {v} is not a bit")));
                }
                if v == 1 {
                    upper[i] |= 1 << j;
                }
            }
        }
        Ok(Self { dim, upper })
    }

    /// `d(L)` of an even lattice with 2-elementary discriminant and
    /// integral `q`, with `q` read mod 2.
    pub fn from_discriminant(l: &Lattice) -> Result<Self> {
        let form = discriminant_form(l);
        let (a, delta) = two_elementary_invariants(&form)?;
        if delta != 0 {
            return Err(Error::CoparityOne);
        }
        let q = form.quadratic_values().ok_or(Error::OddLattice)?;
        let b = form.bilinear_table();
        let bit = |x: num_rational::BigRational| -> u8 {
            let v = x.to_integer().mod_floor(&2.into());
            v.to_u8().expect("bit")
        };
        let rows: Vec<Vec<u8>> = (0..a)
            .map(|i| {
                (0..a)
                    .map(|j| match j.cmp(&i) {
                        std::cmp::Ordering::Less => 0,
                        std::cmp::Ordering::Equal => bit(q[i].clone()),
                        // q(x+y) = q(x) + q(y) + 2b(x,y)
                        std::cmp::Ordering::Greater => bit(&b[i][j] * num_rational::BigRational::from_integer(2.into())),
                    })
                    .collect()
            })
            .collect();
        Self::new(&rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn q(&self, x: u64) -> u8 {
        let mut acc = 0u32;
        for i in 0..self.dim {
            if x >> i & 1 == 1 {
                acc += (self.upper[i] & x).count_ones();
            }
        }
        (acc & 1) as u8
    }

    /// Polar form `q(x+y) + q(x) + q(y)`.
    pub fn b(&self, x: u64, y: u64) -> u8 {
        self.q(x ^ y) ^ self.q(x) ^ self.q(y)
    }

    pub fn is_nondegenerate(&self) -> bool {
        let n = self.dim;
        (1u64..1 << n).all(|x| (0..n).any(|i| self.b(x, 1 << i) == 1))
    }

    /// Nonzero vectors with `q = 0` and with `q = 1`.
    pub fn element_counts(&self) -> (u64, u64) {
        let ones = (1u64..1 << self.dim).filter(|&x| self.q(x) == 1).count() as u64;
        ((1u64 << self.dim) - 1 - ones, ones)
    }

    /// Classifies every 2-dimensional subspace by the restriction of `q`.
    /// Each plane `{0, x, y, x+y}` is visited once, as the pair with
    /// `x < y < x+y`.
    pub fn classify_2d_subspaces(&self) -> SubspaceCounts {
        let mut counts = SubspaceCounts::default();
        let top = 1u64 << self.dim;
        for x in 1..top {
            for y in x + 1..top {
                let z = x ^ y;
                if z <= y {
                    continue;
                }
                match self.q(x) + self.q(y) + self.q(z) {
                    0 => counts.isotropic += 1,
                    1 => counts.split += 1,
                    2 => counts.rank1_kernel += 1,
                    _ => counts.minus_line += 1,
                }
            }
        }
        counts
    }

    /// `q(Mx)` for an invertible `M` given by column bitmasks.
    pub fn pull_back(&self, columns: &[u64]) -> Self {
        let image = |x: u64| -> u64 {
            (0..self.dim)
                .filter(|i| x >> i & 1 == 1)
                .fold(0, |acc, i| acc ^ columns[i])
        };
        let mut upper = vec![0u64; self.dim];
        for i in 0..self.dim {
            let ei = image(1 << i);
            if self.q(ei) == 1 {
                upper[i] |= 1 << i;
            }
            for j in i + 1..self.dim {
                if self.b(ei, image(1 << j)) == 1 {
                    upper[i] |= 1 << j;
                }
            }
        }
        Self {
            dim: self.dim,
            upper,
        }
    }
}

/// Number of `k`-dimensional subspaces of `F₂^n`.
pub fn grassmannian_count(k: u32, n: u32) -> Result<BigUint> {
    if k > n {
        return Err(Error::BadParams(format!("k = {k} exceeds n = {n}")));
    }
    let two = BigUint::from(2u32);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= two.pow(n - i) - 1u32;
        den *= two.pow(k - i) - 1u32;
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::standard_lattice;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e8_space() -> F2QuadraticSpace {
        F2QuadraticSpace::from_discriminant(&Lattice::e8().rescale(-2).unwrap()).unwrap()
    }

    #[test]
    fn e8_counts() {
        let v = e8_space();
        assert_eq!(v.dim(), 8);
        assert!(v.is_nondegenerate());
        assert_eq!(v.element_counts(), (135, 120));
        let c = v.classify_2d_subspaces();
        assert_eq!(
            c,
            SubspaceCounts {
                isotropic: 1575,
                rank1_kernel: 3780,
                minus_line: 1120,
                split: 4320
            }
        );
        assert_eq!(BigUint::from(c.total()), grassmannian_count(2, 8).unwrap());
    }

    #[test]
    fn planes() {
        let split = F2QuadraticSpace::new(&[vec![0, 1], vec![0, 0]]).unwrap();
        assert_eq!(split.element_counts(), (2, 1));
        assert_eq!(split.classify_2d_subspaces().split, 1);
        let minus = F2QuadraticSpace::new(&[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(minus.element_counts(), (0, 3));
        assert_eq!(minus.classify_2d_subspaces().minus_line, 1);
        let sq = F2QuadraticSpace::new(&[vec![1, 0], vec![0, 0]]).unwrap();
        assert_eq!(sq.classify_2d_subspaces().rank1_kernel, 1);
        let u2 = F2QuadraticSpace::from_discriminant(&standard_lattice("U(2)").unwrap()).unwrap();
        assert_eq!(u2, split);
        assert_eq!(
            F2QuadraticSpace::from_discriminant(&Lattice::diagonal(2, 1).unwrap()),
            Err(Error::CoparityOne)
        );
    }

    #[test]
    fn gaussian_binomials() {
        assert_eq!(grassmannian_count(2, 8).unwrap(), BigUint::from(10795u32));
        assert_eq!(grassmannian_count(0, 5).unwrap(), BigUint::one());
        assert_eq!(grassmannian_count(1, 8).unwrap(), BigUint::from(255u32));
        assert_eq!(grassmannian_count(3, 3).unwrap(), BigUint::one());
    }

    fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> Vec<u64> {
        loop {
            let cols: Vec<u64> = (0..n).map(|_| rng.gen_range(0..1u64 << n)).collect();
            // rank over F₂ by elimination
            let mut rows = cols.clone();
            let mut rank = 0;
            for bit in 0..n {
                if let Some(p) = (rank..n).find(|&r| rows[r] >> bit & 1 == 1) {
                    rows.swap(rank, p);
                    for r in 0..n {
                        if r != rank && rows[r] >> bit & 1 == 1 {
                            rows[r] ^= rows[rank];
                        }
                    }
                    rank += 1;
                }
            }
            if rank == n {
                return cols;
            }
        }
    }

    #[test]
    fn classification_is_basis_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=6 {
            for _ in 0..10 {
                let rows: Vec<Vec<u8>> = (0..n)
                    .map(|i| (0..n).map(|j| if j >= i { rng.gen_range(0..2) } else { 0 }).collect())
                    .collect();
                let v = F2QuadraticSpace::new(&rows).unwrap();
                let w = v.pull_back(&random_invertible(&mut rng, n));
                assert_eq!(v.element_counts(), w.element_counts());
                assert_eq!(v.classify_2d_subspaces(), w.classify_2d_subspaces());
                assert_eq!(
                    BigUint::from(v.classify_2d_subspaces().total()),
                    grassmannian_count(2, n as u32).unwrap()
                );
            }
        }
    }
}
