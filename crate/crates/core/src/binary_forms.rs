//! Integral binary quadratic forms `ax² + bxy + cy²`.
//!
//! A transform `P` acts by substitution, `(f∘P)(v) = f(Pv)`, so on Gram
//! matrices it is `PᵀGP`. Indefinite reduction uses the Gauss convention
//! `0 < b < √D`, `|√D − 2|a|| < b`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::genus::prime_divisors;
use crate::linalg::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct BinaryForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

fn int2(rows: [[BigInt; 2]; 2]) -> IntMatrix {
    IntMatrix::from_big_rows(rows.into_iter().map(|r| r.to_vec()).collect()).expect("2x2")
}

fn t_matrix(t: &BigInt) -> IntMatrix {
    int2([[BigInt::one(), t.clone()], [BigInt::zero(), BigInt::one()]])
}

fn s_matrix() -> IntMatrix {
    IntMatrix::from_rows(&[[0, -1], [1, 0]])
}

fn rho_matrix(t: &BigInt) -> IntMatrix {
    int2([[BigInt::zero(), -BigInt::one()], [BigInt::one(), t.clone()]])
}

/// Inverse of a 2×2 matrix of determinant ±1.
fn inverse2(p: &IntMatrix) -> IntMatrix {
    let det = p.det();
    let (a, b, c, d) = (p.get(0, 0), p.get(0, 1), p.get(1, 0), p.get(1, 1));
    int2([[d * &det, -b * &det], [-c * &det, a * &det]])
}

impl BinaryForm {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Result<Self> {
        let f = Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        };
        if f.discriminant().is_zero() {
            return Err(Error::DegenerateForm);
        }
        Ok(f)
    }

    /// `(G11, 2·G12, G22)`.
    pub fn from_gram(g: &IntMatrix) -> Result<Self> {
        if g.rows() != 2 || g.cols() != 2 {
            return Err(Error::ShapeMismatch(format!(
                "binary form needs a 2x2 Gram matrix, got {}x{}",
                g.rows(),
                g.cols()
            )));
        }
        if !g.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Self::new(g.get(0, 0).clone(), g.get(0, 1) * 2, g.get(1, 1).clone())
    }

    /// Gram matrix `[[a, b/2], [b/2, c]]`, when `b` is even.
    pub fn to_gram(&self) -> Option<IntMatrix> {
        if self.b.is_odd() {
            return None;
        }
        let h: BigInt = &self.b / BigInt::from(2);
        Some(int2([[self.a.clone(), h.clone()], [h, self.c.clone()]]))
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    pub fn is_definite(&self) -> bool {
        self.discriminant().is_negative()
    }

    /// `f∘P`.
    pub fn act(&self, p: &IntMatrix) -> BinaryForm {
        let (p0, q0, r0, s0) = (p.get(0, 0), p.get(0, 1), p.get(1, 0), p.get(1, 1));
        let two = BigInt::from(2);
        BinaryForm {
            a: self.eval(p0, r0),
            b: &two * &self.a * p0 * q0 + &self.b * (p0 * s0 + q0 * r0) + &two * &self.c * r0 * s0,
            c: self.eval(q0, s0),
        }
    }

    fn negated(&self) -> BinaryForm {
        BinaryForm {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
        }
    }

    fn check_indefinite(&self) -> Result<BigInt> {
        let d = self.discriminant();
        if !d.is_positive() {
            return Err(Error::NotIndefinite);
        }
        let s = d.sqrt();
        if &s * &s == d {
            return Err(Error::SquareDiscriminant(d.to_string()));
        }
        Ok(s)
    }

    /// Reduced in the Gauss sense, given `s = ⌊√D⌋` with `D` nonsquare.
    fn is_reduced_indefinite(&self, s: &BigInt) -> bool {
        let two_a = BigInt::from(2) * self.a.abs();
        self.b.is_positive() && &self.b <= s && two_a > s - &self.b && two_a <= s + &self.b
    }

    /// One reduction step `(a,b,c) ↦ (c, b', *)`, returning the step matrix.
    fn rho(&self, s: &BigInt) -> (BinaryForm, IntMatrix) {
        let c_abs = self.c.abs();
        let m = BigInt::from(2) * &c_abs;
        // b' ≡ -b (mod 2|c|) in the window (√D − 2|c|, √D), or (−|c|, |c|] for large |c|.
        let lo: BigInt = if &c_abs > s {
            -&c_abs + 1
        } else {
            s - &m + 1
        };
        let diff: BigInt = -&self.b - &lo;
        let b_new = &lo + diff.mod_floor(&m);
        // b' = -b + 2ct
        let t = (&b_new + &self.b) / (BigInt::from(2) * &self.c);
        let p = rho_matrix(&t);
        let g = self.act(&p);
        debug_assert_eq!(g.b, b_new);
        (g, p)
    }
}

/// Gauss reduction of a definite form. Negative definite forms are reduced
/// through `-f`. Proper mode gives the SL₂ representative
/// `|b| ≤ a ≤ c` with `b ≥ 0` when `|b| = a` or `a = c`; improper mode also
/// flips the sign of `b` (a GL₂ canonical form).
pub fn reduce_definite(f: &BinaryForm, improper: bool) -> Result<(BinaryForm, IntMatrix)> {
    if !f.is_definite() {
        return Err(Error::NotDefinite);
    }
    if f.a.is_negative() {
        let (g, p) = reduce_definite(&f.negated(), improper)?;
        return Ok((g.negated(), p));
    }
    let mut g = f.clone();
    let mut p = IntMatrix::identity(2);
    loop {
        // b into (-a, a]
        let two_a = BigInt::from(2) * &g.a;
        let shifted: BigInt = (&g.b + &g.a - 1u32).mod_floor(&two_a) - &g.a + 1;
        if shifted != g.b {
            let t = (&shifted - &g.b) / &two_a;
            let m = t_matrix(&t);
            g = g.act(&m);
            p = &p * &m;
        }
        if g.a > g.c {
            let m = s_matrix();
            g = g.act(&m);
            p = &p * &m;
            continue;
        }
        break;
    }
    if g.a == g.c && g.b.is_negative() {
        let m = s_matrix();
        g = g.act(&m);
        p = &p * &m;
    }
    if improper && g.b.is_negative() {
        let m = IntMatrix::from_rows(&[[1, 0], [0, -1]]);
        g = g.act(&m);
        p = &p * &m;
    }
    debug_assert_eq!(f.act(&p), g);
    Ok((g, p))
}

/// Reduces an indefinite form to a Gauss-reduced one.
pub fn reduce_indefinite(f: &BinaryForm) -> Result<(BinaryForm, IntMatrix)> {
    let s = f.check_indefinite()?;
    let mut g = f.clone();
    let mut p = IntMatrix::identity(2);
    while !g.is_reduced_indefinite(&s) {
        let (h, m) = g.rho(&s);
        g = h;
        p = &p * &m;
    }
    Ok((g, p))
}

/// A reduced cycle with the transforms from its first member.
#[derive(Clone, Debug)]
pub struct GaussCycle {
    pub forms: Vec<BinaryForm>,
    /// `transforms[i]` carries `forms[0]` to `forms[i]`.
    pub transforms: Vec<IntMatrix>,
}

fn raw_cycle(start: &BinaryForm, s: &BigInt) -> (Vec<BinaryForm>, Vec<IntMatrix>) {
    let mut forms = vec![start.clone()];
    let mut transforms = vec![IntMatrix::identity(2)];
    loop {
        let (h, m) = forms.last().expect("nonempty").rho(s);
        if &h == start {
            break;
        }
        let acc = transforms.last().expect("nonempty") * &m;
        forms.push(h);
        transforms.push(acc);
    }
    (forms, transforms)
}

/// The cycle of reduced forms properly equivalent to `f`, rotated to start
/// at its lexicographically least member.
pub fn gauss_cycle(f: &BinaryForm) -> Result<GaussCycle> {
    let s = f.check_indefinite()?;
    let (r, _) = reduce_indefinite(f)?;
    let (forms, _) = raw_cycle(&r, &s);
    let least = forms.iter().min().expect("nonempty").clone();
    let (forms, transforms) = raw_cycle(&least, &s);
    Ok(GaussCycle { forms, transforms })
}

/// A transform `P` with `f1∘P = f2`. Proper (det +1) unless `improper` is
/// set, in which case det −1 transforms are also allowed.
pub fn equivalent(f1: &BinaryForm, f2: &BinaryForm, improper: bool) -> Result<Option<IntMatrix>> {
    let (d1, d2) = (f1.discriminant(), f2.discriminant());
    if d1 != d2 {
        return Err(Error::DiscriminantMismatch(d1.to_string(), d2.to_string()));
    }
    let found = if d1.is_negative() {
        let (r1, t1) = reduce_definite(f1, false)?;
        let (r2, t2) = reduce_definite(f2, false)?;
        (r1 == r2).then(|| &t1 * &inverse2(&t2))
    } else {
        let s = f1.check_indefinite()?;
        let (r1, t1) = reduce_indefinite(f1)?;
        let (r2, t2) = reduce_indefinite(f2)?;
        let (forms, transforms) = raw_cycle(&r1, &s);
        forms
            .iter()
            .position(|g| g == &r2)
            .map(|i| &(&t1 * &transforms[i]) * &inverse2(&t2))
    };
    if let Some(p) = found {
        debug_assert_eq!(&f1.act(&p), f2);
        return Ok(Some(p));
    }
    if improper {
        let flip = IntMatrix::from_rows(&[[1, 0], [0, -1]]);
        if let Some(p) = equivalent(f1, &f2.act(&flip), false)? {
            return Ok(Some(&p * &flip));
        }
    }
    Ok(None)
}

/// A vector `(x, y)` with `f(x, y) = m`, or `None`.
///
/// Definite forms are searched exactly over the ellipse. Indefinite forms use
/// the cycle: for `|m| < √D/2`, `m` is primitively represented iff it occurs
/// as a leading coefficient of a reduced form in the cycle.
pub fn representation(f: &BinaryForm, m: &BigInt) -> Result<Option<(BigInt, BigInt)>> {
    let (one, zero) = (BigInt::one(), BigInt::zero());
    if &f.a == m && !m.is_zero() {
        return Ok(Some((one, zero)));
    }
    if &f.c == m && !m.is_zero() {
        return Ok(Some((zero, one)));
    }
    if m.is_zero() {
        // Only the zero vector for definite or nonsquare-discriminant forms.
        return Ok(None);
    }
    let d = f.discriminant();
    if d.is_negative() {
        let (f, m) = if f.a.is_negative() {
            (f.negated(), -m)
        } else {
            (f.clone(), m.clone())
        };
        if !m.is_positive() {
            return Ok(None);
        }
        // 4a·f(x,y) = (2ax + by)² + |D|y²
        let nd = -&d;
        let four_am = BigInt::from(4) * &f.a * &m;
        let ymax = (&four_am / &nd).sqrt();
        let mut y = -ymax.clone();
        while y <= ymax {
            let rest = &four_am - &nd * &y * &y;
            let t = rest.sqrt();
            if &t * &t == rest {
                for t in [t.clone(), -t] {
                    let num = &t - &f.b * &y;
                    let den = BigInt::from(2) * &f.a;
                    if num.is_multiple_of(&den) {
                        let x = num / den;
                        debug_assert_eq!(f.eval(&x, &y), m);
                        return Ok(Some((x, y)));
                    }
                }
            }
            y += 1;
        }
        return Ok(None);
    }
    let s = f.check_indefinite()?;
    if BigInt::from(4) * m * m >= d {
        return Err(Error::OutOfMethodRange {
            m: m.abs().to_string(),
            disc: d.to_string(),
        });
    }
    let (r, t) = reduce_indefinite(f)?;
    let (forms, transforms) = raw_cycle(&r, &s);
    let mut g = BigInt::one();
    while &g * &g <= m.abs() {
        let gg = &g * &g;
        if m.is_multiple_of(&gg) {
            let target = m / &gg;
            if let Some(i) = forms.iter().position(|h| h.a == target) {
                let p = &t * &transforms[i];
                let (x, y) = (p.get(0, 0) * &g, p.get(1, 0) * &g);
                debug_assert_eq!(&f.eval(&x, &y), m);
                return Ok(Some((x, y)));
            }
        }
        g += 1;
    }
    Ok(None)
}

pub fn represents(f: &BinaryForm, m: &BigInt) -> Result<bool> {
    Ok(representation(f, m)?.is_some())
}

/// `2^(τ(d)−1)` for `d > 1`, where `τ` counts distinct prime factors; 1 for `d = 1`.
pub fn fm_partner_count(d: u64) -> u64 {
    if d <= 1 {
        return 1;
    }
    1 << (prime_divisors(&BigInt::from(d)).len() - 1)
}

/// Solutions of `x² ≡ 1 (mod n)` taken modulo `±1`, represented by
/// `min(x, n − x)`, sorted.
pub fn square_roots_of_unity(n: u64) -> Vec<u64> {
    if n == 1 {
        return vec![0];
    }
    let mut out: Vec<u64> = (1..n)
        .filter(|&x| (x as u128 * x as u128) % n as u128 == 1)
        .map(|x| x.min(n - x))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}
