//! Cohomological Fourier–Mukai matrices on the slice spanned by
//! `(1,0,0), (0,f,0), (0,0,1)`, with pairing
//! `⟨(r,D,s),(r',D',s')⟩ = 2d·DD' − rs' − r's` and `2d = f²`.

use std::ops::Range;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::linalg::{integer_kernel, IntMatrix};

/// `(r₀, s, d₀, d₁, ℓ)` with `gcd(r₀, s) = 1` and `s·d₀·d₁ − r₀·ℓ = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FMParameters {
    pub r0: i64,
    pub s: i64,
    pub d0: i64,
    pub d1: i64,
    pub l: i64,
}

impl FMParameters {
    pub fn new(r0: i64, s: i64, d0: i64, d1: i64, l: i64) -> Result<Self> {
        if r0 <= 0 || s <= 0 {
            return Err(Error::BadParameters("r0 and s must be positive".into()));
        }
        if r0.gcd(&s) != 1 {
            return Err(Error::BadParameters(format!("gcd({r0}, {s}) != 1")));
        }
        let lhs = (s as i128) * (d0 as i128) * (d1 as i128) - (r0 as i128) * (l as i128);
        if lhs != 1 {
            return Err(Error::BadParameters(format!(
                "s*d0*d1 - r0*l = {lhs}, expected 1"
            )));
        }
        Ok(Self { r0, s, d0, d1, l })
    }

    /// Completes `(r₀, s, d₀)` with the solution `(d₁, ℓ)` of least `|d₁|`
    /// (ties to positive).
    pub fn solve(r0: i64, s: i64, d0: i64) -> Result<Self> {
        let a = s.checked_mul(d0).ok_or(Error::Overflow)?;
        let e = a.extended_gcd(&r0);
        if e.gcd.abs() != 1 {
            return Err(Error::BadParameters(format!(
                "gcd(s*d0, r0) = {} so s*d0*d1 - r0*l = 1 has no solution",
                e.gcd.abs()
            )));
        }
        // a·x + r0·y = ±1
        let sign = e.gcd.signum();
        let (mut d1, mut l) = (e.x * sign, -e.y * sign);
        // shift along (r0, a) to minimise |d1|
        let k = Integer::div_floor(&d1, &r0);
        d1 -= k * r0;
        l -= k * a;
        if d1 > r0 - d1 {
            d1 -= r0;
            l -= a;
        }
        Self::new(r0, s, d0, d1, l)
    }

    /// `2d = 2r₀s`.
    pub fn two_d(&self) -> i64 {
        2 * self.r0 * self.s
    }
}

fn m3(rows: [[i128; 3]; 3]) -> IntMatrix {
    IntMatrix::from_big_rows(
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect(),
    )
    .expect("3x3")
}

/// Slice Gram `[[0,0,−1],[0,2d,0],[−1,0,0]]`.
pub fn slice_gram(two_d: i64) -> IntMatrix {
    m3([[0, 0, -1], [0, two_d as i128, 0], [-1, 0, 0]])
}

pub fn yoshioka_matrix(p: &FMParameters) -> IntMatrix {
    let (r0, s, d0, d1, l) = (p.r0 as i128, p.s as i128, p.d0 as i128, p.d1 as i128, p.l as i128);
    m3([
        [d0 * d0 * s, 2 * d0 * s * r0, r0],
        [d0 * l, 2 * d0 * d1 * s - 1, d1],
        [l * l * r0, 2 * d1 * s * l * r0, d1 * d1 * s],
    ])
}

/// The inverse: middle basis vector negated, `d₀` and `d₁` interchanged.
pub fn yoshioka_inverse(p: &FMParameters) -> IntMatrix {
    let (r0, s, d0, d1, l) = (p.r0 as i128, p.s as i128, p.d0 as i128, p.d1 as i128, p.l as i128);
    m3([
        [d1 * d1 * s, -2 * d1 * s * r0, r0],
        [-d1 * l, 2 * d0 * d1 * s - 1, -d0],
        [l * l * r0, -2 * d0 * s * l * r0, d0 * d0 * s],
    ])
}

/// Tensoring by `O(Nf)`.
pub fn twist_matrix(n: i64, r0: i64, s: i64) -> IntMatrix {
    let (n, r0, s) = (n as i128, r0 as i128, s as i128);
    m3([[1, 0, 0], [n, 1, 0], [n * n * r0 * s, 2 * n * r0 * s, 1]])
}

/// Whether `MᵀGM = G`.
pub fn preserves_pairing(m: &IntMatrix, gram: &IntMatrix) -> bool {
    &(&m.transpose() * gram) * m == *gram
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientationSliceReport {
    pub det: BigInt,
    /// Rows: basis of `ker(M − I)`.
    pub fixed: IntMatrix,
}

pub fn orientation_slice_report(m: &IntMatrix) -> Result<OrientationSliceReport> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch("matrix must be square".into()));
    }
    let shifted = m - &IntMatrix::identity(m.rows());
    Ok(OrientationSliceReport {
        det: m.det(),
        fixed: integer_kernel(&shifted),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SkewCheck {
    pub holds: bool,
    pub holds_for_negative: bool,
}

fn duality(n: usize, block: &Range<usize>) -> IntMatrix {
    let mut d = IntMatrix::identity(n);
    for i in block.clone() {
        d.set(i, i, BigInt::from(-1));
    }
    d
}

/// Checks `φ·ι₁·D₁ = D₂·ι₂·φ`, where `Dₖ` is `−1` on the degree-2 block and
/// `+1` elsewhere.
pub fn verify_skew_functional(
    phi: &IntMatrix,
    iota1: &IntMatrix,
    iota2: &IntMatrix,
    block: Range<usize>,
) -> Result<SkewCheck> {
    let n = phi.rows();
    if !phi.is_square()
        || [iota1, iota2].iter().any(|m| m.rows() != n || m.cols() != n)
        || block.end > n
    {
        return Err(Error::ShapeMismatch(
            "phi and both involutions must be square of equal size, block inside".into(),
        ));
    }
    let d = duality(n, &block);
    let check = |p: &IntMatrix| &(p * iota1) * &d == &(&d * iota2) * p;
    Ok(SkewCheck {
        holds: check(phi),
        holds_for_negative: check(&-phi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn degree12() -> FMParameters {
        FMParameters::new(2, 3, 1, 1, 1).unwrap()
    }

    #[test]
    fn degree_twelve() {
        let m = yoshioka_matrix(&degree12());
        assert_eq!(m, IntMatrix::from_rows(&[[3, 12, 2], [1, 5, 1], [2, 12, 3]]));
        assert_eq!(m.det(), BigInt::one());
        assert!(preserves_pairing(&m, &slice_gram(12)));
        let rep = orientation_slice_report(&m).unwrap();
        assert_eq!(rep.fixed.rows(), 1);
        let v: Vec<i64> = rep.fixed.to_i64_rows().unwrap()[0].clone();
        assert!(v == vec![1, 0, -1] || v == vec![-1, 0, 1]);
        // (2,-f,3) ↦ (0,0,1)
        let img = m.mul_vec(&[2, -1, 3].map(BigInt::from));
        assert_eq!(img, [0, 0, 1].map(BigInt::from).to_vec());
    }

    #[test]
    fn inverse_identity() {
        let p = degree12();
        assert!((&yoshioka_matrix(&p) * &yoshioka_inverse(&p)).is_identity());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut done = 0;
        while done < 100 {
            let (r0, s, d0) = (rng.gen_range(1..=50), rng.gen_range(1..=50), rng.gen_range(-50..=50));
            let Ok(p) = FMParameters::solve(r0, s, d0) else { continue };
            let m = yoshioka_matrix(&p);
            assert!((&m * &yoshioka_inverse(&p)).is_identity());
            assert!((&yoshioka_inverse(&p) * &m).is_identity());
            assert!(preserves_pairing(&m, &slice_gram(p.two_d())));
            assert_eq!(m.det(), BigInt::one());
            done += 1;
        }
    }

    #[test]
    fn twists() {
        assert!(twist_matrix(0, 2, 3).is_identity());
        assert_eq!(
            &twist_matrix(2, 2, 3) * &twist_matrix(-5, 2, 3),
            twist_matrix(-3, 2, 3)
        );
        let p = degree12();
        for n in -4..=4 {
            let q = FMParameters::new(p.r0, p.s, p.d0, p.d1 + n * p.r0, p.l + n * p.s * p.d0).unwrap();
            assert_eq!(&twist_matrix(n, p.r0, p.s) * &yoshioka_matrix(&p), yoshioka_matrix(&q));
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(FMParameters::new(2, 4, 1, 1, 1), Err(Error::BadParameters(_))));
        assert!(matches!(FMParameters::new(2, 3, 1, 1, 2), Err(Error::BadParameters(_))));
        assert!(matches!(FMParameters::new(0, 3, 1, 1, 1), Err(Error::BadParameters(_))));
        assert_eq!(FMParameters::solve(2, 3, 1).unwrap(), degree12());
    }

    #[test]
    fn orientation_examples() {
        let id = orientation_slice_report(&IntMatrix::identity(3)).unwrap();
        assert_eq!((id.det, id.fixed.rows()), (BigInt::one(), 3));
        let r = orientation_slice_report(&IntMatrix::diagonal(&[1, -1, 1].map(BigInt::from))).unwrap();
        assert_eq!(r.det, BigInt::from(-1));
        assert_eq!(r.fixed.rows(), 2);
    }

    #[test]
    fn skew_functional() {
        let id = IntMatrix::identity(3);
        let r = verify_skew_functional(&id, &id, &id, 1..2).unwrap();
        assert_eq!(r, SkewCheck { holds: true, holds_for_negative: true });
        let m = yoshioka_matrix(&degree12());
        let r = verify_skew_functional(&m, &id, &id, 1..2).unwrap();
        assert!(!r.holds && !r.holds_for_negative);
        assert!(verify_skew_functional(&m, &id, &IntMatrix::identity(2), 0..1).is_err());
    }
}
