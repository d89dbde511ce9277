//! Stable equivalence and Nikulin-type criteria.
//!
//! Every `*_criterion` function checks a sufficient condition only. `false`
//! means the criterion is inconclusive, not that the property fails.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::finite_forms::{forms_isomorphic, has_z2_cubed_summand, FormIsomorphism};
use crate::lattice::{discriminant_form, min_generators, Lattice, Sublattice};

/// Prime divisors of `n` by trial division, ascending.
pub fn prime_divisors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if let Some(mut m) = n.to_u64() {
        let mut p = 2u64;
        while p * p <= m {
            if m % p == 0 {
                out.push(BigInt::from(p));
                while m % p == 0 {
                    m /= p;
                }
            }
            p += if p == 2 { 1 } else { 2 };
        }
        if m > 1 {
            out.push(BigInt::from(m));
        }
        return out;
    }
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if n.is_multiple_of(&p) {
            out.push(p.clone());
            while n.is_multiple_of(&p) {
                n /= &p;
            }
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push(n);
    }
    out
}

/// Whether `L1 ⊕ U ≅ L2 ⊕ U`, decided by signature and discriminant form.
/// Returns the form isomorphism as a witness.
pub fn stable_isomorphism(l1: &Lattice, l2: &Lattice) -> Result<Option<FormIsomorphism>> {
    if !l1.is_even() || !l2.is_even() {
        return Err(Error::OddLattice);
    }
    if l1.rank() != l2.rank() {
        return Err(Error::RankMismatch(l1.rank(), l2.rank()));
    }
    if l1.signature() != l2.signature() || l1.det().abs() != l2.det().abs() {
        return Ok(None);
    }
    forms_isomorphic(&discriminant_form(l1), &discriminant_form(l2))
}

pub fn stably_equivalent(l1: &Lattice, l2: &Lattice) -> Result<bool> {
    Ok(stable_isomorphism(l1, l2)?.is_some())
}

/// Sufficient condition for an even indefinite lattice to be unique in its
/// genus (with `O(L) -> O(q_L)` surjective).
///
/// Odd primes need `rank ≥ ℓ(d(L_p)) + 2`. At 2 the condition only bites when
/// `rank = ℓ(d(L_2))`; there a `(Z/2)³` summand is accepted in place of an
/// explicit `u(2)` or `v(2)` summand.
pub fn unique_in_genus_criterion(l: &Lattice) -> Result<bool> {
    if !l.is_even() {
        return Err(Error::OddLattice);
    }
    if !l.signature().is_indefinite() {
        return Err(Error::DefiniteLattice);
    }
    let q = discriminant_form(l);
    let rank = l.rank();
    let two = BigInt::from(2);
    for p in prime_divisors(&l.det()) {
        let ell = min_generators(&q, Some(&p));
        if p == two {
            if rank == ell && !has_z2_cubed_summand(&q) {
                return Ok(false);
            }
        } else if rank < ell + 2 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of [`primitive_embedding_criterion`]. Both flags are sufficient
/// conditions; `false` is inconclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct EmbeddingCriterion {
    pub exists: bool,
    pub unique: bool,
}

/// Sufficient conditions for a primitive embedding of the even lattice `L`
/// into an even unimodular lattice of signature `target`, and for its
/// uniqueness up to isometry.
pub fn primitive_embedding_criterion(
    l: &Lattice,
    target: (usize, usize),
) -> Result<EmbeddingCriterion> {
    if !l.is_even() {
        return Err(Error::OddLattice);
    }
    let (lp, lm) = target;
    if lp + lm == 0 {
        return Err(Error::Precondition("target signature is empty".into()));
    }
    let sig = l.signature();
    let (tp, tm) = (sig.plus, sig.minus);
    let ell = min_generators(&discriminant_form(l), None);
    let fits = lp >= tp && lm >= tm;
    let corank = (lp + lm) as i64 - (tp + tm) as i64;
    let exists = (lp as i64 - lm as i64).rem_euclid(8) == 0 && fits && corank > ell as i64;
    let unique = exists && lp > tp && lm > tm && corank >= ell as i64 + 2;
    Ok(EmbeddingCriterion { exists, unique })
}

/// Whether `-G/2` is the Gram matrix of E8, i.e. `G` is the Gram matrix of
/// `E8(-2)` in some basis.
pub fn is_e8_minus_2(gram: &crate::linalg::IntMatrix) -> bool {
    if gram.rows() != 8 || !gram.is_symmetric() {
        return false;
    }
    let two = BigInt::from(2);
    let mut half = gram.clone();
    for i in 0..8 {
        for j in 0..8 {
            let v = gram.get(i, j);
            if !v.is_multiple_of(&two) {
                return false;
            }
            half.set(i, j, -(v / &two));
        }
    }
    let Ok(l) = Lattice::new(half) else {
        return false;
    };
    l.is_even() && l.is_unimodular() && l.signature().is_positive_definite()
}

/// Uniqueness in the genus for a hyperbolic lattice containing `E8(-2)`:
/// the copy must be saturated and `d(L)` generated by at most 11 elements.
pub fn e8_saturated_uniqueness(l: &Lattice, e8: &Sublattice) -> Result<bool> {
    let sig = l.signature();
    if sig.plus != 1 || sig.zero != 0 {
        return Err(Error::NotHyperbolic);
    }
    if !is_e8_minus_2(&e8.induced_gram()) {
        return Err(Error::NotE8Minus2);
    }
    if !l.is_even() {
        return Err(Error::OddLattice);
    }
    Ok(e8.is_saturated() && min_generators(&discriminant_form(l), None) <= 11)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::standard_lattice;
    use crate::linalg::IntMatrix;
    use num_traits::Zero;

    fn lat(rows: &[[i64; 2]]) -> Lattice {
        Lattice::from_rows(rows).unwrap()
    }

    #[test]
    fn primes() {
        let p: Vec<i64> = prime_divisors(&BigInt::from(-1504))
            .iter()
            .map(|x| x.to_i64().unwrap())
            .collect();
        assert_eq!(p, vec![2, 47]);
        assert!(prime_divisors(&BigInt::one()).is_empty());
    }

    #[test]
    fn stable_equivalence_examples() {
        assert!(stably_equivalent(&lat(&[[2, 13], [13, 12]]), &lat(&[[8, 15], [15, 10]])).unwrap());
        assert!(stably_equivalent(&lat(&[[4, 1], [1, 12]]), &lat(&[[6, 1], [1, 8]])).unwrap());
        let two = Lattice::diagonal(2, 1).unwrap();
        let four = Lattice::diagonal(4, 1).unwrap();
        assert!(!stably_equivalent(&two, &four).unwrap());
        let u = Lattice::hyperbolic();
        assert_eq!(
            stably_equivalent(&two, &two.direct_sum(&u)),
            Err(Error::RankMismatch(1, 3))
        );
        assert_eq!(
            stably_equivalent(&Lattice::diagonal(1, 1).unwrap(), &two),
            Err(Error::OddLattice)
        );
    }

    #[test]
    fn uniqueness_criterion() {
        let m2 = standard_lattice("M(2)").unwrap();
        assert!(unique_in_genus_criterion(&m2).unwrap());
        let l = Lattice::diagonal(2, 1)
            .unwrap()
            .direct_sum(&Lattice::e8().rescale(-2).unwrap());
        assert!(unique_in_genus_criterion(&l).unwrap());
        assert!(unique_in_genus_criterion(&Lattice::hyperbolic()).unwrap());
        assert_eq!(
            unique_in_genus_criterion(&Lattice::e8()),
            Err(Error::DefiniteLattice)
        );
        // Rank 2, cyclic of order 145: odd primes need rank ≥ 3.
        let a = lat(&[[2, 13], [13, 12]]);
        assert!(!unique_in_genus_criterion(&a).unwrap());
        assert!(unique_in_genus_criterion(&a.direct_sum(&Lattice::hyperbolic())).unwrap());
    }

    #[test]
    fn embedding_criterion() {
        let l = Lattice::diagonal(2, 1)
            .unwrap()
            .direct_sum(&Lattice::e8().rescale(-2).unwrap());
        assert_eq!(l.signature().minus, 8);
        let r = primitive_embedding_criterion(&l, (3, 19)).unwrap();
        assert_eq!(r, EmbeddingCriterion { exists: true, unique: true });
        let e = Lattice::e8().rescale(-2).unwrap();
        assert_eq!(
            primitive_embedding_criterion(&e, (3, 19)).unwrap(),
            EmbeddingCriterion { exists: true, unique: true }
        );
        assert_eq!(
            primitive_embedding_criterion(&Lattice::hyperbolic(), (1, 1)).unwrap(),
            EmbeddingCriterion { exists: false, unique: false }
        );
    }

    #[test]
    fn e8_uniqueness() {
        let lam = Lattice::diagonal(12, 1)
            .unwrap()
            .direct_sum(&Lattice::e8().rescale(-2).unwrap());
        let rows: Vec<Vec<i64>> = (1..9)
            .map(|i| (0..9).map(|j| i64::from(i == j)).collect())
            .collect();
        let sub = Sublattice::new(lam.clone(), IntMatrix::from_rows(&rows)).unwrap();
        assert!(e8_saturated_uniqueness(&lam, &sub).unwrap());
        let doubled: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| r.iter().map(|x| 2 * x).collect())
            .collect();
        let bad = Sublattice::new(lam.clone(), IntMatrix::from_rows(&doubled)).unwrap();
        assert_eq!(e8_saturated_uniqueness(&lam, &bad), Err(Error::NotE8Minus2));
        assert_eq!(
            e8_saturated_uniqueness(&Lattice::e8().rescale(-1).unwrap(), &sub),
            Err(Error::NotHyperbolic)
        );
    }

    #[test]
    fn non_saturated_e8_copy() {
        // Simple roots of E8 in doubled R^8 coordinates.
        let mut roots = vec![vec![1, -1, -1, -1, -1, -1, -1, 1], vec![2, 2, 0, 0, 0, 0, 0, 0]];
        for i in 0..6 {
            let mut r = vec![0i64; 8];
            r[i] = -2;
            r[i + 1] = 2;
            roots.push(r);
        }
        let r = IntMatrix::from_rows(&roots);
        let dots = &r * &r.transpose();
        let gram = IntMatrix::from_big_rows(
            (0..8)
                .map(|i| (0..8).map(|j| dots.get(i, j) / 4).collect())
                .collect(),
        )
        .unwrap();
        let e8 = Lattice::new(gram).unwrap();
        assert!(e8.is_unimodular() && e8.is_even());
        // x ↦ (x1-x2, x1+x2, x3-x4, ...) maps E8 into itself, doubling norms.
        let phi = |x: &[i64]| -> Vec<i64> {
            (0..4)
                .flat_map(|k| [x[2 * k] - x[2 * k + 1], x[2 * k] + x[2 * k + 1]])
                .collect()
        };
        let (_, inv) = crate::linalg::rational_inverse(&r.transpose().to_rational()).unwrap();
        let mut sub_rows = Vec::new();
        for root in &roots {
            let w: Vec<_> = phi(root)
                .into_iter()
                .map(|v| num_rational::BigRational::from_integer(BigInt::from(v)))
                .collect();
            let c = inv.mul_vec(&w);
            let mut row = vec![BigInt::zero()];
            row.extend(c.iter().map(|x| {
                assert!(x.is_integer());
                x.to_integer()
            }));
            sub_rows.push(row);
        }
        let amb = Lattice::diagonal(2, 1).unwrap().direct_sum(&e8.rescale(-1).unwrap());
        let sub = Sublattice::new(amb.clone(), IntMatrix::from_big_rows(sub_rows).unwrap()).unwrap();
        assert!(is_e8_minus_2(&sub.induced_gram()));
        assert!(!sub.is_saturated());
        assert!(!e8_saturated_uniqueness(&amb, &sub).unwrap());
    }
}
