//! Lattices with an involution, Nikulin invariants, the Nikulin-involution
//! lattices `Λ`, `Λ̃` and the quotient maps, Enriques existence tests and
//! stable-isometry certificates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::binary_forms::{reduce_definite, BinaryForm};
use crate::definite::{has_minus_two_class, short_vectors};
use crate::error::{Error, Result};
use crate::finite_forms::two_elementary_invariants;
use crate::lattice::{discriminant_form, discriminant_group, overlattice, Lattice, Sublattice};
use crate::linalg::{integer_kernel, IntMatrix};

/// A lattice with an isometric involution acting on column coordinate vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvolutiveLattice {
    lattice: Lattice,
    action: IntMatrix,
}

impl InvolutiveLattice {
    pub fn new(lattice: Lattice, action: IntMatrix) -> Result<Self> {
        let n = lattice.rank();
        if action.rows() != n || action.cols() != n {
            return Err(Error::ShapeMismatch(format!(
                "action is {}x{}, lattice rank is {n}",
                action.rows(),
                action.cols()
            )));
        }
        if !(&action * &action).is_identity() {
            return Err(Error::NotInvolution("action does not square to the identity".into()));
        }
        let pulled = &(&action.transpose() * lattice.gram()) * &action;
        if &pulled != lattice.gram() {
            return Err(Error::NotInvolution("action does not preserve the form".into()));
        }
        Ok(Self { lattice, action })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn action(&self) -> &IntMatrix {
        &self.action
    }

    /// Invariant and anti-invariant sublattices (both saturated).
    pub fn eigenlattices(&self) -> (Sublattice, Sublattice) {
        let id = IntMatrix::identity(self.lattice.rank());
        let plus = integer_kernel(&(&self.action - &id));
        let minus = integer_kernel(&(&self.action + &id));
        (
            Sublattice::new(self.lattice.clone(), plus).expect("kernel rows are independent"),
            Sublattice::new(self.lattice.clone(), minus).expect("kernel rows are independent"),
        )
    }
}

/// The involution swapping the two summands of `L ⊕ L`.
pub fn swap_involution(l: &Lattice) -> InvolutiveLattice {
    let n = l.rank();
    let mut a = IntMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        a.set(i, n + i, BigInt::one());
        a.set(n + i, i, BigInt::one());
    }
    InvolutiveLattice::new(l.direct_sum(l), a).expect("swap is an involution")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct NikulinTriple {
    pub r: usize,
    pub a: usize,
    pub delta: u8,
    pub g: i64,
    pub k: i64,
    /// `(r, a, δ) = (10, 10, 0)`, the fixed-point-free case.
    pub enriques: bool,
}

/// `(r, a, δ)` of a 2-elementary invariant lattice `S`, with
/// `g = ambient/2 − (r+a)/2` and `k = (r−a)/2`.
pub fn nikulin_triple(s: &Lattice, ambient_rank: usize) -> Result<NikulinTriple> {
    if !s.is_even() {
        return Err(Error::OddLattice);
    }
    let r = s.rank();
    if r > 1 && s.signature().plus != 1 {
        return Err(Error::NotHyperbolic);
    }
    let (a, delta) = two_elementary_invariants(&discriminant_form(s))?;
    if (r + a) % 2 != 0 {
        return Err(Error::NonIntegralGK);
    }
    let g = (ambient_rank as i64) / 2 - ((r + a) / 2) as i64;
    let k = (r as i64 - a as i64) / 2;
    Ok(NikulinTriple {
        r,
        a,
        delta,
        g,
        k,
        enriques: (r, a, delta) == (10, 10, 0),
    })
}

/// `Λ = ⟨2d⟩ ⊕ E8(−2)` with basis `f, e₁..e₈`.
pub fn nikulin_lambda(d: u64) -> Result<Lattice> {
    if d == 0 {
        return Err(Error::BadParams("d must be positive".into()));
    }
    let two_d = i64::try_from(2 * d).map_err(|_| Error::Overflow)?;
    Ok(Lattice::diagonal(two_d, 1)?.direct_sum(&Lattice::e8().rescale(-2)?))
}

/// `Λ` for odd `d`; for even `d` the index-two overlattice `Λ̃` generated by
/// `(f + e)/2`, where `e ∈ E8(−2)` is the first short vector of E8 of norm
/// 2 (`d ≡ 2 mod 4`) or 4 (`d ≡ 0 mod 4`), so `(e,e) = −4` or `−8`.
///
/// Also returns the E8(−2) copy in the basis of the returned lattice.
pub fn nikulin_invariant_overlattice(d: u64) -> Result<(Lattice, Sublattice)> {
    let lambda = nikulin_lambda(d)?;
    let e8_rows = IntMatrix::from_rows(
        &(1..9)
            .map(|i| (0..9).map(|j| i64::from(i == j)).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    );
    if d % 2 == 1 {
        let sub = Sublattice::new(lambda.clone(), e8_rows)?;
        return Ok((lambda, sub));
    }
    let target = if d % 4 == 2 { 2 } else { 4 };
    let sv = short_vectors(&Lattice::e8(), target)?;
    let e = sv
        .get(&target)
        .and_then(|vs| vs.first())
        .ok_or(Error::NoSuitableVector(-2 * target as i64))?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut v = vec![half.clone()];
    v.extend(e.iter().map(|c| BigRational::from_integer(BigInt::from(*c)) * &half));
    let dg = discriminant_group(&lambda);
    let coeffs = dg.coordinates_of(&v)?;
    let over = overlattice(&lambda, &[coeffs])?;
    let new_rows: Vec<Vec<BigInt>> = (0..8)
        .map(|i| over.coordinates_of(e8_rows.row(i)))
        .collect();
    let sub = Sublattice::new(over.lattice.clone(), IntMatrix::from_big_rows(new_rows)?)?;
    Ok((over.lattice, sub))
}

/// Matrices of `π_*` and `π^*` on column coordinates.
///
/// Domain `U³ ⊕ E8(−1) ⊕ E8(−1) ⊕ ⟨−1⟩⁸` (coordinates `u, x, y, z`, rank
/// 30); codomain `U(2)³ ⊕ N ⊕ E8(−1)` (coordinates `u, n, x`, rank 22) with
/// `N` in the basis `N₁..N₇, N̂`, so `N₈ = 2N̂ − N₁ − … − N₇`.
#[derive(Clone, Debug)]
pub struct QuotientMaps {
    pub domain: Lattice,
    pub codomain: Lattice,
    /// `π_*`, 22×30: `(u,x,y,z) ↦ (u, z, x+y)`.
    pub push: IntMatrix,
    /// `π^*`, 30×22: `(u,n,x) ↦ (2u, x, x, 2ñ)`.
    pub pull: IntMatrix,
}

pub fn quotient_maps() -> QuotientMaps {
    let e8m = Lattice::e8().rescale(-1).expect("nonzero scale");
    let domain = Lattice::hyperbolic()
        .power(3)
        .direct_sum(&e8m)
        .direct_sum(&e8m)
        .direct_sum(&Lattice::diagonal(-1, 8).expect("k > 0"));
    let codomain = Lattice::hyperbolic()
        .rescale(2)
        .expect("nonzero scale")
        .power(3)
        .direct_sum(&Lattice::nikulin())
        .direct_sum(&e8m);
    let one = BigInt::one;
    let mut push = IntMatrix::zeros(22, 30);
    let mut pull = IntMatrix::zeros(30, 22);
    for i in 0..6 {
        push.set(i, i, one());
        pull.set(i, i, BigInt::from(2));
    }
    // z ↦ Σ zᵢNᵢ = Σ_{i<8} (zᵢ − z₈)Nᵢ + 2z₈N̂
    for k in 0..7 {
        push.set(6 + k, 22 + k, one());
        push.set(6 + k, 29, -one());
    }
    push.set(13, 29, BigInt::from(2));
    for k in 0..8 {
        push.set(14 + k, 6 + k, one());
        push.set(14 + k, 14 + k, one());
        pull.set(6 + k, 14 + k, one());
        pull.set(14 + k, 14 + k, one());
    }
    // n = Σ cᵢNᵢ + ĉN̂ ↦ 2ñ = (2c₁+ĉ, …, 2c₇+ĉ, ĉ)
    for k in 0..7 {
        pull.set(22 + k, 6 + k, BigInt::from(2));
        pull.set(22 + k, 13, one());
    }
    pull.set(29, 13, one());
    QuotientMaps {
        domain,
        codomain,
        push,
        pull,
    }
}

/// Existence test for an Enriques involution given the embedding
/// `T ⊂ N = U ⊕ U(2) ⊕ E8(−2)`: true iff `T^⊥` has no `(−2)`-vectors.
/// Only negative definite complements are handled.
pub fn enriques_exists_embedding(t: &Sublattice) -> Result<bool> {
    if !t.is_saturated() {
        return Err(Error::NotPrimitive);
    }
    let perp = t.orthogonal_complement();
    if perp.rank() == 0 {
        return Ok(true);
    }
    let c = perp.lattice()?;
    if !c.signature().is_negative_definite() {
        return Err(Error::ComplementNotDefinite);
    }
    Ok(!has_minus_two_class(&c)?)
}

/// Existence of an Enriques involution on a singular K3 surface with
/// transcendental lattice `T`: false iff `det T ≡ 3 mod 8` or `T` is one of
/// `[[2,0],[0,2]]`, `[[2,0],[0,4]]`, `[[2,0],[0,8]]`.
pub fn enriques_exists_singular(t: &IntMatrix) -> Result<bool> {
    let l = Lattice::new(t.clone()).map_err(|_| Error::NotEvenDefinite)?;
    if l.rank() != 2 || !l.is_even() || !l.signature().is_positive_definite() {
        return Err(Error::NotEvenDefinite);
    }
    if l.det().mod_floor(&BigInt::from(8)) == BigInt::from(3) {
        return Ok(false);
    }
    let (r, _) = reduce_definite(&BinaryForm::from_gram(t)?, true)?;
    let exceptions = [2, 4, 8].map(|c| BinaryForm::new(2, 0, c).expect("nondegenerate"));
    Ok(!exceptions.contains(&r))
}

/// Default coefficient bound for [`skew_pair_certificate`].
pub const DEFAULT_SKEW_BOUND: u32 = 20;

const MAX_BOX: u128 = 50_000_000;

/// Searches for `P` with `PᵀG₂P = G₁`, `Gᵢ = Aᵢ ⊕ U`, all coefficients in
/// `[−bound, bound]`.
///
/// Basis vectors of `A₁ ⊕ U` are mapped in order of increasing `|norm|`, so
/// the isotropic pair is placed first and the definite part is matched in
/// its complement. Candidates are tried by increasing max-norm, then
/// lexicographically.
pub fn skew_pair_certificate(a1: &Lattice, a2: &Lattice, bound: u32) -> Result<IntMatrix> {
    for a in [a1, a2] {
        if !a.is_even() || !a.signature().is_positive_definite() {
            return Err(Error::Precondition(
                "skew pair needs even positive definite lattices".into(),
            ));
        }
    }
    if a1.rank() != a2.rank() {
        return Err(Error::RankMismatch(a1.rank(), a2.rank()));
    }
    if a1.det() != a2.det() {
        return Err(Error::Precondition(format!(
            "determinants differ ({} vs {})",
            a1.det(),
            a2.det()
        )));
    }
    let u = Lattice::hyperbolic();
    let l1 = a1.direct_sum(&u);
    let l2 = a2.direct_sum(&u);
    let n = l1.rank();
    if l1.gram() == l2.gram() {
        return Ok(IntMatrix::identity(n));
    }
    let g1 = l1.gram().to_i64_rows().ok_or(Error::Overflow)?;
    let g2 = l2.gram().to_i64_rows().ok_or(Error::Overflow)?;
    let b = bound as i64;
    let side = (2 * bound as u128) + 1;
    if side.pow(n as u32) > MAX_BOX {
        return Err(Error::Precondition(format!(
            "coefficient box {side}^{n} is too large"
        )));
    }

    let norm2 = |x: &[i64]| -> i64 {
        let mut acc = 0i64;
        for i in 0..n {
            for j in 0..n {
                acc += x[i] * g2[i][j] * x[j];
            }
        }
        acc
    };
    let pair2 = |x: &[i64], y: &[i64]| -> i64 {
        let mut acc = 0i64;
        for i in 0..n {
            for j in 0..n {
                acc += x[i] * g2[i][j] * y[j];
            }
        }
        acc
    };
    let wanted: Vec<i64> = (0..n).map(|i| g1[i][i]).collect();
    let mut buckets: std::collections::BTreeMap<i64, Vec<Vec<i64>>> =
        wanted.iter().map(|w| (*w, Vec::new())).collect();
    let mut x = vec![-b; n];
    'outer: loop {
        let nx = norm2(&x);
        if let Some(v) = buckets.get_mut(&nx) {
            v.push(x.clone());
        }
        let mut k = n;
        loop {
            if k == 0 {
                break 'outer;
            }
            k -= 1;
            if x[k] < b {
                x[k] += 1;
                break;
            }
            x[k] = -b;
        }
    }
    for v in buckets.values_mut() {
        v.sort_by_key(|x| (x.iter().map(|c| c.abs()).max().unwrap_or(0), x.clone()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (g1[i][i].abs(), i));

    fn dfs(
        depth: usize,
        order: &[usize],
        g1: &[Vec<i64>],
        buckets: &std::collections::BTreeMap<i64, Vec<Vec<i64>>>,
        pair2: &dyn Fn(&[i64], &[i64]) -> i64,
        images: &mut Vec<Vec<i64>>,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let i = order[depth];
        for v in &buckets[&g1[i][i]] {
            if (0..depth).all(|k| pair2(v, &images[k]) == g1[i][order[k]]) {
                images.push(v.clone());
                if dfs(depth + 1, order, g1, buckets, pair2, images) {
                    return true;
                }
                images.pop();
            }
        }
        false
    }

    let mut images = Vec::new();
    if !dfs(0, &order, &g1, &buckets, &pair2, &mut images) {
        return Err(Error::SearchExhausted { bound });
    }
    let mut p = IntMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        for (r, c) in images[k].iter().enumerate() {
            p.set(r, i, BigInt::from(*c));
        }
    }
    if !verify_isometry(&p, l2.gram(), l1.gram()) {
        return Err(Error::Precondition("certificate failed verification".into()));
    }
    Ok(p)
}

/// `PᵀG₂P = G₁`.
pub fn verify_isometry(p: &IntMatrix, g2: &IntMatrix, g1: &IntMatrix) -> bool {
    if p.rows() != g2.rows() || p.cols() != g1.rows() {
        return false;
    }
    &(&p.transpose() * g2) * p == *g1
}

/// Largest absolute coefficient of a matrix.
pub fn max_abs_entry(p: &IntMatrix) -> BigInt {
    p.to_rows()
        .into_iter()
        .flatten()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(BigInt::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genus::{e8_saturated_uniqueness, is_e8_minus_2};
    use crate::lattice::standard_lattice;

    #[test]
    fn swap_on_e8_pair() {
        let il = swap_involution(&Lattice::e8().rescale(-1).unwrap());
        let (plus, minus) = il.eigenlattices();
        assert_eq!((plus.rank(), minus.rank()), (8, 8));
        assert!(is_e8_minus_2(&plus.induced_gram()));
        assert!(is_e8_minus_2(&minus.induced_gram()));
        assert!(plus.is_saturated() && minus.is_saturated());
        let cross = &(plus.basis() * il.lattice().gram()) * &minus.basis().transpose();
        assert!(cross.is_zero());
    }

    #[test]
    fn trivial_involutions() {
        let u = Lattice::hyperbolic();
        let id = InvolutiveLattice::new(u.clone(), IntMatrix::identity(2)).unwrap();
        let (p, m) = id.eigenlattices();
        assert_eq!((p.rank(), m.rank()), (2, 0));
        let neg = InvolutiveLattice::new(u.clone(), IntMatrix::identity(2).scale(&BigInt::from(-1)))
            .unwrap();
        let (p, m) = neg.eigenlattices();
        assert_eq!((p.rank(), m.rank()), (0, 2));
        assert!(matches!(
            InvolutiveLattice::new(u, IntMatrix::from_rows(&[[1, 1], [0, 1]])),
            Err(Error::NotInvolution(_))
        ));
    }

    #[test]
    fn triples() {
        let t = nikulin_triple(&Lattice::diagonal(2, 1).unwrap(), 22).unwrap();
        assert_eq!((t.r, t.a, t.delta, t.g, t.k), (1, 1, 1, 10, 0));
        let s = Lattice::hyperbolic()
            .direct_sum(&Lattice::e8().rescale(-1).unwrap().power(2))
            .direct_sum(&Lattice::diagonal(-2, 2).unwrap());
        let t = nikulin_triple(&s, 22).unwrap();
        assert_eq!((t.r, t.a, t.g, t.k), (20, 2, 0, 9));
        let t = nikulin_triple(&standard_lattice("M(2)").unwrap(), 22).unwrap();
        assert_eq!((t.r, t.a, t.delta), (10, 10, 0));
        assert!(t.enriques);
        assert_eq!(
            nikulin_triple(&Lattice::diagonal(4, 1).unwrap(), 22),
            Err(Error::NotTwoElementary)
        );
    }

    #[test]
    fn lambda_tilde() {
        for d in [2u64, 4, 6, 8, 10] {
            let (l, e8) = nikulin_invariant_overlattice(d).unwrap();
            assert!(l.is_even());
            assert_eq!(l.rank(), 9);
            assert_eq!(l.det().abs(), BigInt::from(2 * d * 256 / 4));
            assert!(e8.is_saturated());
            assert!(is_e8_minus_2(&e8.induced_gram()));
            assert!(e8_saturated_uniqueness(&l, &e8).unwrap());
        }
        let (l, _) = nikulin_invariant_overlattice(3).unwrap();
        assert_eq!(l.det().abs(), BigInt::from(6 * 256));
    }

    #[test]
    fn quotient_map_identities() {
        let m = quotient_maps();
        assert_eq!((m.push.rows(), m.push.cols()), (22, 30));
        assert_eq!(&m.push * &m.pull, IntMatrix::identity(22).scale(&BigInt::from(2)));
        let gx = m.domain.gram();
        let gy = m.codomain.gram();
        assert_eq!(
            &(&m.pull.transpose() * gx) * &m.pull,
            gy.scale(&BigInt::from(2))
        );
        assert_eq!(&m.pull.transpose() * gx, gy * &m.push);
    }

    fn enriques_n() -> Lattice {
        standard_lattice("N_enriques").unwrap()
    }

    fn sub(rows: &[[i64; 12]]) -> Sublattice {
        Sublattice::new(enriques_n(), IntMatrix::from_rows(rows)).unwrap()
    }

    #[test]
    fn enriques_embeddings() {
        let mut a = [0i64; 12];
        a[0] = 1;
        a[1] = 1;
        let mut b = [0i64; 12];
        b[1] = 1;
        b[2] = 1;
        b[3] = 1;
        let t = sub(&[a, b]);
        assert_eq!(t.induced_gram(), IntMatrix::from_rows(&[[2, 1], [1, 4]]));
        assert!(enriques_exists_embedding(&t).unwrap());
        let mut c = [0i64; 12];
        c[2] = 1;
        c[3] = 1;
        let planted = sub(&[a, c]);
        assert!(!enriques_exists_embedding(&planted).unwrap());
        let full = Sublattice::new(enriques_n(), IntMatrix::identity(12)).unwrap();
        assert!(enriques_exists_embedding(&full).unwrap());
        let mut d = [0i64; 12];
        d[0] = 2;
        assert_eq!(enriques_exists_embedding(&sub(&[d])), Err(Error::NotPrimitive));
        assert_eq!(
            enriques_exists_embedding(&sub(&[a])),
            Err(Error::ComplementNotDefinite)
        );
    }

    #[test]
    fn singular_enriques() {
        let g = |r: [[i64; 2]; 2]| IntMatrix::from_rows(&r);
        assert!(!enriques_exists_singular(&g([[2, 0], [0, 4]])).unwrap());
        assert!(enriques_exists_singular(&g([[2, 1], [1, 4]])).unwrap());
        assert!(!enriques_exists_singular(&g([[2, 1], [1, 2]])).unwrap());
        assert!(!enriques_exists_singular(&g([[8, 0], [0, 2]])).unwrap());
        assert!(enriques_exists_singular(&g([[4, 0], [0, 4]])).unwrap());
        assert_eq!(
            enriques_exists_singular(&g([[1, 0], [0, 2]])),
            Err(Error::NotEvenDefinite)
        );
    }

    #[test]
    fn skew_certificate() {
        let a1 = Lattice::from_rows(&[[4, 1], [1, 12]]).unwrap();
        let a2 = Lattice::from_rows(&[[6, 1], [1, 8]]).unwrap();
        let g1 = a1.direct_sum(&Lattice::hyperbolic());
        let g2 = a2.direct_sum(&Lattice::hyperbolic());
        // Columns: images of p₁, q₁, u₁, v₁ in the basis p₂, q₂, u₂, v₂.
        let known = IntMatrix::from_rows(&[
            [1, 5, -1, 1],
            [0, -5, 1, -1],
            [1, 12, -2, 3],
            [-1, -12, 3, -2],
        ]);
        assert!(verify_isometry(&known, g2.gram(), g1.gram()));
        let p = skew_pair_certificate(&a1, &a2, DEFAULT_SKEW_BOUND).unwrap();
        assert!(verify_isometry(&p, g2.gram(), g1.gram()));
        assert!(skew_pair_certificate(&a1, &a1, 3).unwrap().is_identity());
        let a3 = Lattice::from_rows(&[[2, 1], [1, 4]]).unwrap();
        assert!(matches!(
            skew_pair_certificate(&a1, &a3, 5),
            Err(Error::Precondition(_))
        ));
    }
}
