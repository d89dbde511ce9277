//! Isomorphism testing and invariants of finite quadratic forms.
//!
//! The search works on a machine-word table: every value of `b` lies in
//! `(1/den)Z/Z` and every value of `q` in `(1/den)Z/2Z` for a common
//! denominator `den` dividing the exponent of the group, so values are kept
//! as integer numerators.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::FiniteQuadraticForm;

/// Default cap on the group order for [`forms_isomorphic`].
pub const DEFAULT_ORDER_BOUND: u64 = 1 << 16;

/// Images of the generators of the first form, as coefficient vectors on the
/// generators of the second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormIsomorphism {
    pub images: Vec<Vec<BigInt>>,
}

struct Table {
    orders: Vec<u64>,
    den: u128,
    q: Option<Vec<u128>>,
    b: Vec<Vec<u128>>,
}

impl Table {
    fn new(form: &FiniteQuadraticForm, bound: u64) -> Result<Self> {
        let order = form.order();
        if order > BigInt::from(bound) {
            return Err(Error::TooLarge {
                order: order.to_string(),
                bound,
            });
        }
        let orders: Vec<u64> = form
            .orders()
            .iter()
            .map(|o| o.to_u64().expect("bounded order"))
            .collect();
        let mut den = BigInt::one();
        for r in form.bilinear_table().iter().flatten() {
            den = den.lcm(r.denom());
        }
        for r in form.quadratic_values().into_iter().flatten() {
            den = den.lcm(r.denom());
        }
        let num = |x: &BigRational| -> u128 {
            (x * BigRational::from_integer(den.clone()))
                .to_integer()
                .to_u128()
                .expect("reduced value")
        };
        let b = form
            .bilinear_table()
            .iter()
            .map(|row| row.iter().map(num).collect())
            .collect();
        let q = form.quadratic_values().map(|qs| qs.iter().map(num).collect());
        Ok(Self {
            orders,
            den: den.to_u128().expect("bounded denominator"),
            q,
            b,
        })
    }

    fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for &o in self.orders.iter().rev() {
            out = (0..o)
                .flat_map(|k| {
                    out.iter().map(move |tail| {
                        let mut v = vec![k];
                        v.extend_from_slice(tail);
                        v
                    })
                })
                .collect();
        }
        out.sort();
        out
    }

    fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter()
            .zip(y)
            .zip(&self.orders)
            .map(|((a, b), o)| (a + b) % o)
            .collect()
    }

    fn scale(&self, x: &[u64], k: u64) -> Vec<u64> {
        x.iter()
            .zip(&self.orders)
            .map(|(a, o)| (a * (k % o)) % o)
            .collect()
    }

    fn order_of(&self, x: &[u64]) -> u64 {
        x.iter()
            .zip(&self.orders)
            .fold(1u64, |acc, (&a, &o)| acc.lcm(&(o / a.gcd(&o))))
    }

    fn b_of(&self, x: &[u64], y: &[u64]) -> u128 {
        let mut acc = 0u128;
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj != 0 {
                    acc = (acc + self.b[i][j] * (xi as u128 % self.den) % self.den * yj as u128)
                        % self.den;
                }
            }
        }
        acc
    }

    /// `q` numerator mod `2·den`, or the `b(x,x)` numerator when `q` is absent.
    fn norm_of(&self, x: &[u64]) -> u128 {
        let Some(q) = &self.q else {
            return self.b_of(x, x);
        };
        let m = 2 * self.den;
        let mut acc = 0u128;
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            let xi = xi as u128;
            acc = (acc + q[i] * (xi * xi % m)) % m;
            for (j, &xj) in x.iter().enumerate().skip(i + 1) {
                if xj != 0 {
                    acc = (acc + 2 * self.b[i][j] % m * (xi * xj as u128 % m)) % m;
                }
            }
        }
        acc
    }

    fn fingerprint(&self) -> BTreeMap<(u64, u128), usize> {
        let mut fp = BTreeMap::new();
        for x in self.elements() {
            *fp.entry((self.order_of(&x), self.norm_of(&x))).or_insert(0) += 1;
        }
        fp
    }

    fn unit(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0; self.orders.len()];
        v[i] = 1;
        v
    }
}

/// Isomorphism search with the default order bound.
pub fn forms_isomorphic(
    q1: &FiniteQuadraticForm,
    q2: &FiniteQuadraticForm,
) -> Result<Option<FormIsomorphism>> {
    forms_isomorphic_bounded(q1, q2, DEFAULT_ORDER_BOUND)
}

/// Finds a group isomorphism carrying `q1` to `q2` (values of `q` mod 2Z and
/// `b` mod Z), or proves none exists.
///
/// Generators of `q1` are processed by decreasing order, then by `q`-value;
/// candidate images range over elements of `q2` with the same order and
/// value, consistent in `b` with the images already chosen, and independent
/// of them. Candidates are tried in lexicographic order, so the returned
/// witness is the least one in that order.
pub fn forms_isomorphic_bounded(
    q1: &FiniteQuadraticForm,
    q2: &FiniteQuadraticForm,
    bound: u64,
) -> Result<Option<FormIsomorphism>> {
    if q1.has_quadratic() != q2.has_quadratic() {
        return Err(Error::Precondition(
            "cannot compare a quadratic form with a bilinear-only form".into(),
        ));
    }
    let t1 = Table::new(q1, bound)?;
    let t2 = Table::new(q2, bound)?;
    if q1.invariant_factors() != q2.invariant_factors() {
        return Ok(None);
    }
    // Values must be compared on a common scale.
    let den = t1.den.lcm(&t2.den);
    let rescale = |t: &Table| den / t.den;
    let (s1, s2) = (rescale(&t1), rescale(&t2));
    let fp1: BTreeMap<_, _> = t1
        .fingerprint()
        .into_iter()
        .map(|((o, v), c)| ((o, v * s1), c))
        .collect();
    let fp2: BTreeMap<_, _> = t2
        .fingerprint()
        .into_iter()
        .map(|((o, v), c)| ((o, v * s2), c))
        .collect();
    if fp1 != fp2 {
        return Ok(None);
    }

    let n = t1.orders.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let gens: Vec<Vec<u64>> = (0..n).map(|i| t1.unit(i)).collect();
    perm.sort_by_key(|&i| (std::cmp::Reverse(t1.orders[i]), t1.norm_of(&gens[i]) * s1));

    let elems2: Vec<(Vec<u64>, u64, u128)> = t2
        .elements()
        .into_iter()
        .map(|x| {
            let o = t2.order_of(&x);
            let v = t2.norm_of(&x) * s2;
            (x, o, v)
        })
        .collect();

    struct Search<'a> {
        t1: &'a Table,
        t2: &'a Table,
        s1: u128,
        s2: u128,
        gens: &'a [Vec<u64>],
        perm: &'a [usize],
        elems2: &'a [(Vec<u64>, u64, u128)],
        images: Vec<Vec<u64>>,
        spans: Vec<HashSet<Vec<u64>>>,
    }

    impl Search<'_> {
        fn run(&mut self, depth: usize) -> bool {
            if depth == self.perm.len() {
                return true;
            }
            let g = self.perm[depth];
            let order = self.t1.orders[g];
            let value = self.t1.norm_of(&self.gens[g]) * self.s1;
            for (x, o, v) in self.elems2 {
                if *o != order || *v != value {
                    continue;
                }
                let consistent = (0..depth).all(|k| {
                    let h = self.perm[k];
                    self.t2.b_of(x, &self.images[k]) * self.s2
                        == self.t1.b_of(&self.gens[g], &self.gens[h]) * self.s1
                });
                if !consistent {
                    continue;
                }
                let span = self.spans.last().expect("root span");
                let mut next = HashSet::with_capacity(span.len() * order as usize);
                for h in span {
                    for k in 0..order {
                        next.insert(self.t2.add(h, &self.t2.scale(x, k)));
                    }
                }
                if next.len() != span.len() * order as usize {
                    continue;
                }
                self.images.push(x.clone());
                self.spans.push(next);
                if self.run(depth + 1) {
                    return true;
                }
                self.images.pop();
                self.spans.pop();
            }
            false
        }
    }

    let mut root = HashSet::new();
    root.insert(vec![0u64; t2.orders.len()]);
    let mut search = Search {
        t1: &t1,
        t2: &t2,
        s1,
        s2,
        gens: &gens,
        perm: &perm,
        elems2: &elems2,
        images: Vec::new(),
        spans: vec![root],
    };
    if !search.run(0) {
        return Ok(None);
    }
    let mut images = vec![vec![]; n];
    for (k, &g) in perm.iter().enumerate() {
        images[g] = search.images[k].iter().map(|&c| BigInt::from(c)).collect();
    }
    let iso = FormIsomorphism { images };
    debug_assert!(verify_isomorphism(q1, q2, &iso));
    Ok(Some(iso))
}

/// Checks a claimed isomorphism on every element: bijectivity, `q` on all
/// elements, and `b` on all generator pairs (hence everywhere by bilinearity).
pub fn verify_isomorphism(
    q1: &FiniteQuadraticForm,
    q2: &FiniteQuadraticForm,
    iso: &FormIsomorphism,
) -> bool {
    if iso.images.len() != q1.num_generators()
        || iso.images.iter().any(|v| v.len() != q2.num_generators())
        || q1.order() != q2.order()
    {
        return false;
    }
    let apply = |x: &[BigInt]| -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); q2.num_generators()];
        for (c, img) in x.iter().zip(&iso.images) {
            for (o, v) in out.iter_mut().zip(img) {
                *o += c * v;
            }
        }
        out.iter().zip(q2.orders()).map(|(v, o)| v.mod_floor(o)).collect()
    };
    // Each image must be killed by its generator's order.
    for (img, o) in iso.images.iter().zip(q1.orders()) {
        let scaled: Vec<BigInt> = img.iter().map(|v| v * o).collect();
        if apply_identity(q2, &scaled).iter().any(|v| !v.is_zero()) {
            return false;
        }
    }
    let mut seen = HashSet::new();
    for x in q1.elements() {
        let y = apply(&x);
        if q1.q(&x) != q2.q(&y) {
            return false;
        }
        if !seen.insert(y) {
            return false;
        }
    }
    let n = q1.num_generators();
    let unit = |i: usize| -> Vec<BigInt> {
        (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()
    };
    for i in 0..n {
        for j in 0..n {
            if q1.b(&unit(i), &unit(j)) != q2.b(&iso.images[i], &iso.images[j]) {
                return false;
            }
        }
    }
    true
}

fn apply_identity(q: &FiniteQuadraticForm, x: &[BigInt]) -> Vec<BigInt> {
    x.iter().zip(q.orders()).map(|(v, o)| v.mod_floor(o)).collect()
}

/// `(a, δ)` of a 2-elementary form: `a` generators, `δ = 0` iff every value
/// of `q` is integral.
pub fn two_elementary_invariants(q: &FiniteQuadraticForm) -> Result<(usize, u8)> {
    let factors = q.invariant_factors();
    if factors.iter().any(|d| d != &BigInt::from(2)) {
        return Err(Error::NotTwoElementary);
    }
    let values = q.quadratic_values().ok_or(Error::OddLattice)?;
    // q(x+y) = q(x) + q(y) + 2b(x,y) and 2b is integral on a 2-elementary
    // group, so integrality on generators decides every element.
    let delta = u8::from(values.iter().any(|v| !v.is_integer()));
    Ok((factors.len(), delta))
}

/// Whether the group has `(Z/2)³` as a direct summand, i.e. at least three
/// cyclic factors of 2-adic valuation exactly one.
pub fn has_z2_cubed_summand(q: &FiniteQuadraticForm) -> bool {
    let four = BigInt::from(4);
    q.invariant_factors()
        .iter()
        .filter(|d| d.is_even() && !d.is_multiple_of(&four))
        .count()
        >= 3
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{discriminant_form, standard_lattice, Lattice};

    fn disc(rows: &[[i64; 2]]) -> FiniteQuadraticForm {
        discriminant_form(&Lattice::from_rows(rows).unwrap())
    }

    #[test]
    fn form_is_isomorphic_to_itself() {
        let q = discriminant_form(&Lattice::e8().rescale(-2).unwrap());
        let iso = forms_isomorphic(&q, &q).unwrap().unwrap();
        assert!(verify_isomorphism(&q, &q, &iso));
    }

    #[test]
    fn a1_a2_discriminants_are_isomorphic() {
        let q1 = disc(&[[2, 13], [13, 12]]);
        let q2 = disc(&[[8, 15], [15, 10]]);
        assert_eq!(q1.order(), BigInt::from(145));
        let iso = forms_isomorphic(&q1, &q2).unwrap().expect("isomorphic");
        assert!(verify_isomorphism(&q1, &q2, &iso));
        // Exhaustive oracle over the cyclic group: some unit u with q2(u·g) = q1(g).
        let g1 = q1.q(&[BigInt::one()]).unwrap();
        let hits: Vec<i64> = (1..145)
            .filter(|u| u % 5 != 0 && u % 29 != 0)
            .filter(|&u| q2.q(&[BigInt::from(u)]).unwrap() == g1)
            .collect();
        assert!(!hits.is_empty());
        assert_eq!(iso.images[0][0], BigInt::from(hits[0]));
    }

    #[test]
    fn sign_changes_the_form() {
        let q1 = discriminant_form(&Lattice::diagonal(2, 1).unwrap());
        let q2 = discriminant_form(&Lattice::diagonal(-2, 1).unwrap());
        assert_eq!(forms_isomorphic(&q1, &q2).unwrap(), None);
    }

    #[test]
    fn order_bound_is_enforced() {
        let q = discriminant_form(&Lattice::diagonal(2, 1).unwrap());
        assert!(matches!(
            forms_isomorphic_bounded(&q, &q, 1),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn two_elementary_examples() {
        let e = discriminant_form(&Lattice::e8().rescale(-2).unwrap());
        assert_eq!(two_elementary_invariants(&e).unwrap(), (8, 0));
        let t = discriminant_form(&Lattice::diagonal(2, 1).unwrap());
        assert_eq!(two_elementary_invariants(&t).unwrap(), (1, 1));
        let u = discriminant_form(&standard_lattice("U(2)").unwrap());
        assert_eq!(two_elementary_invariants(&u).unwrap(), (2, 0));
        let c = discriminant_form(&Lattice::diagonal(4, 1).unwrap());
        assert_eq!(two_elementary_invariants(&c), Err(Error::NotTwoElementary));
    }

    #[test]
    fn delta_matches_full_enumeration() {
        for name in ["<2>", "U(2)", "E8(-2)", "M(2)", "<-2>^3", "V2"] {
            let Ok(l) = standard_lattice(name) else { continue };
            let q = discriminant_form(&l);
            let Ok((_, delta)) = two_elementary_invariants(&q) else { continue };
            let all_integral = q.elements().iter().all(|x| q.q(x).unwrap().is_integer());
            assert_eq!(delta == 0, all_integral, "{name}");
        }
    }

    #[test]
    fn invariants_add_under_direct_sum() {
        let a = discriminant_form(&Lattice::diagonal(2, 1).unwrap());
        let b = discriminant_form(&standard_lattice("U(2)").unwrap());
        let (a1, d1) = two_elementary_invariants(&a).unwrap();
        let (a2, d2) = two_elementary_invariants(&b).unwrap();
        let (a3, d3) = two_elementary_invariants(&a.direct_sum(&b)).unwrap();
        assert_eq!(a3, a1 + a2);
        assert_eq!(d3, d1.max(d2));
    }

    #[test]
    fn z2_cubed_summands() {
        assert!(has_z2_cubed_summand(&discriminant_form(
            &Lattice::e8().rescale(-2).unwrap()
        )));
        let two = discriminant_form(&Lattice::diagonal(2, 2).unwrap());
        assert!(!has_z2_cubed_summand(&two));
        assert!(!has_z2_cubed_summand(&FiniteQuadraticForm::trivial()));
        // (Z/4)³ has no Z/2 summand.
        assert!(!has_z2_cubed_summand(&discriminant_form(&Lattice::diagonal(4, 3).unwrap())));
    }

    #[test]
    fn direct_sum_of_discriminants() {
        let l = Lattice::from_rows(&[[2, 1], [1, 2]]).unwrap();
        let m = Lattice::diagonal(4, 1).unwrap();
        let lhs = discriminant_form(&l.direct_sum(&m));
        let rhs = discriminant_form(&l).direct_sum(&discriminant_form(&m));
        let iso = forms_isomorphic(&lhs, &rhs).unwrap().expect("d(L+M) = d(L)+d(M)");
        assert!(verify_isomorphism(&lhs, &rhs, &iso));
    }

    #[test]
    fn inverse_witness_exists() {
        let q1 = disc(&[[4, 1], [1, 12]]);
        let q2 = disc(&[[6, 1], [1, 8]]);
        assert!(forms_isomorphic(&q1, &q2).unwrap().is_some());
        assert!(forms_isomorphic(&q2, &q1).unwrap().is_some());
    }
}
