//! Positive definite lattices: short vectors, theta prefixes and isometry
//! testing.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::IntMatrix;

/// Default node cap for [`definite_isomorphic`].
pub const DEFAULT_NODE_CAP: u64 = 10_000_000;

fn small_gram(g: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    g.to_i64_rows().ok_or(Error::Overflow)
}

fn pair(g: &[Vec<i64>], x: &[i64], y: &[i64]) -> i128 {
    let mut acc = 0i128;
    for (i, xi) in x.iter().enumerate() {
        if *xi == 0 {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            acc += (*xi as i128) * (g[i][j] as i128) * (*yj as i128);
        }
    }
    acc
}

/// Nonzero vectors of norm at most `bound`, one per `±` pair (first nonzero
/// coordinate positive), keyed by norm and sorted lexicographically.
///
/// Fincke–Pohst over an exact rational completion of squares
/// `Q(x) = Σ qᵢᵢ (xᵢ + Σ_{j>i} qᵢⱼ xⱼ)²`.
pub fn short_vectors(l: &Lattice, bound: u64) -> Result<BTreeMap<u64, Vec<Vec<i64>>>> {
    if !l.signature().is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let n = l.rank();
    let g = l.gram();
    let small = small_gram(g)?;
    // q[i][i] pivots, q[i][j] (j > i) multipliers.
    let mut q: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| BigRational::from_integer(g.get(i, j).clone())).collect())
        .collect();
    for i in 0..n {
        for j in i + 1..n {
            let t = &q[i][j] / &q[i][i];
            for k in j..n {
                let v = &t * &q[i][k];
                q[j][k] -= v;
            }
            q[i][j] = t;
        }
    }
    let diag: Vec<BigRational> = (0..n).map(|i| q[i][i].clone()).collect();

    let mut out: BTreeMap<u64, Vec<Vec<i64>>> = BTreeMap::new();
    let mut x = vec![0i64; n];
    let budget = BigRational::from_integer(BigInt::from(bound));

    #[allow(clippy::too_many_arguments)]
    fn descend(
        i: usize,
        budget: BigRational,
        q: &[Vec<BigRational>],
        diag: &[BigRational],
        x: &mut Vec<i64>,
        small: &[Vec<i64>],
        bound: u64,
        out: &mut BTreeMap<u64, Vec<Vec<i64>>>,
    ) -> Result<()> {
        let n = x.len();
        let mut center = BigRational::zero();
        for j in i + 1..n {
            center -= &q[i][j] * BigRational::from_integer(BigInt::from(x[j]));
        }
        let r = &budget / &diag[i];
        let start = center.floor().to_integer();
        let fits = |v: &BigInt| {
            let d = BigRational::from_integer(v.clone()) - &center;
            &d * &d <= r
        };
        let mut values = Vec::new();
        let mut v = start.clone();
        while fits(&v) {
            values.push(v.clone());
            v -= 1;
        }
        let mut v = start + 1;
        while fits(&v) {
            values.push(v.clone());
            v += 1;
        }
        for v in values {
            x[i] = v.to_i64().ok_or(Error::Overflow)?;
            let d = BigRational::from_integer(v) - &center;
            let rest = &budget - &diag[i] * &d * &d;
            if i == 0 {
                if let Some(first) = x.iter().find(|c| **c != 0) {
                    if *first > 0 {
                        let norm = pair(small, x, x);
                        debug_assert!(norm as u64 <= bound);
                        out.entry(norm as u64).or_default().push(x.clone());
                    }
                }
            } else {
                descend(i - 1, rest, q, diag, x, small, bound, out)?;
            }
        }
        x[i] = 0;
        Ok(())
    }

    if n > 0 {
        descend(n - 1, budget, &q, &diag, &mut x, &small, bound, &mut out)?;
    }
    for vs in out.values_mut() {
        vs.sort();
    }
    Ok(out)
}

/// Whether a negative definite lattice contains a vector of norm −2.
pub fn has_minus_two_class(l: &Lattice) -> Result<bool> {
    if !l.signature().is_negative_definite() {
        return Err(Error::NotNegativeDefinite);
    }
    let neg = l.rescale(-1)?;
    Ok(short_vectors(&neg, 2)?.contains_key(&2))
}

/// Number of vectors (both signs) of each norm `0..=bound`.
pub fn theta_prefix(l: &Lattice, bound: u64) -> Result<Vec<u64>> {
    let sv = short_vectors(l, bound)?;
    let mut counts = vec![0u64; bound as usize + 1];
    counts[0] = 1;
    for (norm, vs) in sv {
        counts[norm as usize] = 2 * vs.len() as u64;
    }
    Ok(counts)
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NonIsometryReason {
    Rank,
    Determinant,
    /// Theta coefficients first differ at this norm.
    Theta { norm: u64 },
    /// The backtracking search finished without a witness.
    SearchComplete,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsometryOutcome {
    /// `P` with `PᵀG₂P = G₁`.
    Isometric(IntMatrix),
    NotIsometric(NonIsometryReason),
    /// Node cap reached before the search finished.
    Inconclusive { nodes: u64 },
}

impl IsometryOutcome {
    pub fn is_isometric(&self) -> bool {
        matches!(self, IsometryOutcome::Isometric(_))
    }
}

/// Pairwise size reduction: returns a basis change `B` (rows) and `BGBᵀ`
/// with no `2|Gᵢⱼ| > Gⱼⱼ`.
fn size_reduce(g: &[Vec<i64>]) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let n = g.len();
    let mut basis: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut gram = g.to_vec();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if i == j || 2 * gram[i][j].abs() <= gram[j][j] {
                    continue;
                }
                let (gij, gjj, gii) = (gram[i][j], gram[j][j], gram[i][i]);
                let r = (2 * gij + gjj).div_euclid(2 * gjj);
                for k in 0..n {
                    basis[i][k] -= r * basis[j][k];
                }
                for k in 0..n {
                    if k != i {
                        gram[i][k] -= r * gram[j][k];
                        gram[k][i] = gram[i][k];
                    }
                }
                gram[i][i] = gii - 2 * r * gij + r * r * gjj;
                changed = true;
            }
        }
        if !changed {
            return (basis, gram);
        }
    }
}

/// Decides whether two positive definite lattices are isometric.
///
/// Cheap invariants are compared first (rank, determinant, theta series up
/// to the largest basis norm). The search then maps a size-reduced basis of
/// one lattice, ordered by ascending norm, onto short vectors of the other
/// with matching norms and inner products. A completed search without a
/// witness is a proof of non-isometry.
pub fn definite_isomorphic(l1: &Lattice, l2: &Lattice, node_cap: u64) -> Result<IsometryOutcome> {
    for l in [l1, l2] {
        if !l.signature().is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
    }
    if l1.rank() != l2.rank() {
        return Ok(IsometryOutcome::NotIsometric(NonIsometryReason::Rank));
    }
    if l1.det() != l2.det() {
        return Ok(IsometryOutcome::NotIsometric(NonIsometryReason::Determinant));
    }
    let n = l1.rank();
    let (b1, r1) = size_reduce(&small_gram(l1.gram())?);
    let (b2, r2) = size_reduce(&small_gram(l2.gram())?);
    let max1 = (0..n).map(|i| r1[i][i]).max().unwrap_or(0);
    let max2 = (0..n).map(|i| r2[i][i]).max().unwrap_or(0);
    // Map the basis with the smaller norms; invert at the end if swapped.
    let swapped = max2 < max1;
    let (src, dst, bound) = if swapped {
        (&r2, &r1, max2)
    } else {
        (&r1, &r2, max1)
    };
    let bound = bound as u64;
    let t1 = theta_prefix(&Lattice::new(IntMatrix::from_rows(src))?, bound)?;
    let t2 = theta_prefix(&Lattice::new(IntMatrix::from_rows(dst))?, bound)?;
    if let Some(norm) = (0..t1.len()).find(|&k| t1[k] != t2[k]) {
        return Ok(IsometryOutcome::NotIsometric(NonIsometryReason::Theta {
            norm: norm as u64,
        }));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (src[i][i], i));
    let dst_lattice = Lattice::new(IntMatrix::from_rows(dst))?;
    let mut by_norm: BTreeMap<i64, Vec<Vec<i64>>> = BTreeMap::new();
    for (norm, vs) in short_vectors(&dst_lattice, bound)? {
        let entry = by_norm.entry(norm as i64).or_default();
        for v in vs {
            let neg: Vec<i64> = v.iter().map(|c| -c).collect();
            entry.push(v);
            entry.push(neg);
        }
        entry.sort();
    }

    struct Search<'a> {
        src: &'a [Vec<i64>],
        dst: &'a [Vec<i64>],
        order: &'a [usize],
        by_norm: &'a BTreeMap<i64, Vec<Vec<i64>>>,
        images: Vec<Vec<i64>>,
        nodes: u64,
        cap: u64,
    }

    enum Step {
        Found,
        Exhausted,
        Capped,
    }

    impl Search<'_> {
        fn run(&mut self, depth: usize) -> Step {
            if depth == self.order.len() {
                return Step::Found;
            }
            let i = self.order[depth];
            let Some(cands) = self.by_norm.get(&self.src[i][i]) else {
                return Step::Exhausted;
            };
            for v in cands {
                self.nodes += 1;
                if self.nodes > self.cap {
                    return Step::Capped;
                }
                let ok = (0..depth).all(|k| {
                    pair(self.dst, v, &self.images[k]) == self.src[i][self.order[k]] as i128
                });
                if !ok {
                    continue;
                }
                self.images.push(v.clone());
                match self.run(depth + 1) {
                    Step::Exhausted => {
                        self.images.pop();
                    }
                    other => return other,
                }
            }
            Step::Exhausted
        }
    }

    let mut search = Search {
        src,
        dst,
        order: &order,
        by_norm: &by_norm,
        images: Vec::new(),
        nodes: 0,
        cap: node_cap,
    };
    match search.run(0) {
        Step::Capped => Ok(IsometryOutcome::Inconclusive {
            nodes: search.nodes - 1,
        }),
        Step::Exhausted => Ok(IsometryOutcome::NotIsometric(
            NonIsometryReason::SearchComplete,
        )),
        Step::Found => {
            // Columns: images of the reduced source basis in reduced target coordinates.
            let mut q = IntMatrix::zeros(n, n);
            for (k, &i) in order.iter().enumerate() {
                for (r, c) in search.images[k].iter().enumerate() {
                    q.set(r, i, BigInt::from(*c));
                }
            }
            // Back to the original bases: x_src = Bsrcᵀ y, so P = Bdstᵀ Q Bsrc⁻ᵀ.
            let (bs, bd) = if swapped { (&b2, &b1) } else { (&b1, &b2) };
            let bs_t_inv = IntMatrix::from_rows(bs)
                .transpose()
                .unimodular_inverse()
                .ok_or_else(|| Error::Precondition("basis change not unimodular".into()))?;
            let mut p = &(&IntMatrix::from_rows(bd).transpose() * &q) * &bs_t_inv;
            if swapped {
                p = p
                    .unimodular_inverse()
                    .ok_or_else(|| Error::Precondition("isometry not unimodular".into()))?;
            }
            let check = p.transpose().checked_mul(l2.gram())?.checked_mul(&p)?;
            debug_assert_eq!(&check, l1.gram());
            if &check != l1.gram() {
                return Err(Error::Precondition("isometry failed verification".into()));
            }
            Ok(IsometryOutcome::Isometric(p))
        }
    }
}

/// Brute-force oracle: vectors with coefficients in `[-r, r]` and norm at
/// most `bound`, one per `±` pair.
pub fn short_vectors_naive(l: &Lattice, bound: u64, r: i64) -> Result<BTreeMap<u64, Vec<Vec<i64>>>> {
    let g = small_gram(l.gram())?;
    let n = g.len();
    let mut out: BTreeMap<u64, Vec<Vec<i64>>> = BTreeMap::new();
    let mut x = vec![-r; n];
    if n == 0 {
        return Ok(out);
    }
    loop {
        if let Some(first) = x.iter().find(|c| **c != 0) {
            let norm = pair(&g, &x, &x);
            if *first > 0 && norm <= bound as i128 {
                out.entry(norm as u64).or_default().push(x.clone());
            }
        }
        let mut k = n;
        loop {
            if k == 0 {
                for vs in out.values_mut() {
                    vs.sort();
                }
                return Ok(out);
            }
            k -= 1;
            if x[k] < r {
                x[k] += 1;
                break;
            }
            x[k] = -r;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Signed};

    #[test]
    fn e8_roots() {
        let sv = short_vectors(&Lattice::e8(), 2).unwrap();
        assert_eq!(sv[&2].len(), 120);
        assert_eq!(theta_prefix(&Lattice::e8(), 4).unwrap(), vec![1, 0, 240, 0, 2160]);
    }

    #[test]
    fn small_examples() {
        let sv = short_vectors(&Lattice::diagonal(2, 1).unwrap(), 2).unwrap();
        assert_eq!(sv[&2], vec![vec![1]]);
        let l = Lattice::from_rows(&[[2, 1], [1, 4]]).unwrap();
        let sv = short_vectors(&l, 2).unwrap();
        assert_eq!(sv.len(), 1);
        assert_eq!(sv[&2], vec![vec![1, 0]]);
        assert_eq!(sv, short_vectors_naive(&l, 2, 3).unwrap());
        assert_eq!(theta_prefix(&Lattice::diagonal(2, 2).unwrap(), 2).unwrap()[2], 4);
        assert_eq!(
            short_vectors(&Lattice::hyperbolic(), 2),
            Err(Error::NotPositiveDefinite)
        );
    }

    #[test]
    fn agrees_with_naive() {
        for rows in [
            vec![vec![2, 1, 0], vec![1, 2, 1], vec![0, 1, 4]],
            vec![vec![4, 1], vec![1, 12]],
            vec![vec![6, 1], vec![1, 8]],
            vec![vec![2, -1, 0, 0], vec![-1, 2, -1, 0], vec![0, -1, 2, -1], vec![0, 0, -1, 2]],
        ] {
            let l = Lattice::new(IntMatrix::from_rows(&rows)).unwrap();
            assert_eq!(short_vectors(&l, 12).unwrap(), short_vectors_naive(&l, 12, 6).unwrap());
        }
    }

    #[test]
    fn minus_two_classes() {
        assert!(!has_minus_two_class(&Lattice::e8().rescale(-2).unwrap()).unwrap());
        assert!(has_minus_two_class(&Lattice::diagonal(-2, 1).unwrap()).unwrap());
        assert!(has_minus_two_class(&Lattice::e8().rescale(-1).unwrap()).unwrap());
        assert_eq!(has_minus_two_class(&Lattice::e8()), Err(Error::NotNegativeDefinite));
    }

    #[test]
    fn isometry_of_permuted_e8() {
        let p = IntMatrix::from_rows(&[
            [1, 1, 0, 0, 0, 0, 0, 0],
            [0, 1, 0, 0, 0, 0, 0, 1],
            [0, 0, 1, 0, 0, 0, 0, 0],
            [0, 0, 0, 0, 1, 0, 0, 0],
            [0, 0, 0, 1, 0, 0, 0, 0],
            [0, 0, 1, 0, 0, 1, 0, 0],
            [0, 0, 0, 0, 0, 0, 1, 0],
            [0, 0, 0, 0, 0, 0, 0, 1],
        ]);
        assert_eq!(p.det().abs(), BigInt::one());
        let e8 = Lattice::e8();
        let g2 = &(&p.transpose() * e8.gram()) * &p;
        let l2 = Lattice::new(g2).unwrap();
        match definite_isomorphic(&e8, &l2, DEFAULT_NODE_CAP).unwrap() {
            IsometryOutcome::Isometric(q) => {
                assert_eq!(&(&(&q.transpose() * l2.gram()) * &q), e8.gram());
            }
            other => panic!("{other:?}"),
        }
        match definite_isomorphic(&l2, &e8, DEFAULT_NODE_CAP).unwrap() {
            IsometryOutcome::Isometric(q) => {
                assert_eq!(&(&(&q.transpose() * e8.gram()) * &q), l2.gram());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn binary_pair_not_isometric() {
        let a1 = Lattice::from_rows(&[[4, 1], [1, 12]]).unwrap();
        let a2 = Lattice::from_rows(&[[6, 1], [1, 8]]).unwrap();
        let out = definite_isomorphic(&a1, &a2, DEFAULT_NODE_CAP).unwrap();
        assert!(matches!(out, IsometryOutcome::NotIsometric(_)));
    }

    #[test]
    fn node_cap_is_reported() {
        let e8 = Lattice::e8();
        assert!(matches!(
            definite_isomorphic(&e8, &e8, 3).unwrap(),
            IsometryOutcome::Inconclusive { .. }
        ));
    }
}
