//! Exact integer and rational matrices.
//!
//! Everything here works over arbitrary-precision integers; Gram matrices of
//! rank 22+ lattices overflow machine words during elimination. The Smith
//! normal form is the workhorse: kernels, saturations and row bases are all
//! read off from its transforms.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn diagonal<T: Into<BigInt> + Clone>(entries: &[T]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone().into();
        }
        m
    }

    /// Builds a matrix from rows of machine integers. Panics on ragged input;
    /// use [`IntMatrix::try_from_rows`] for untrusted data.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        Self::try_from_rows(rows).expect("ragged rows")
    }

    pub fn try_from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let big: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::from_big_rows(big)
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Machine-integer copy, or `None` if some entry does not fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(ToPrimitive::to_i64).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn checked_mul(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `xᵀ · self · y`.
    pub fn bilinear(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        x.iter().zip(self.mul_vec(y)).map(|(a, b)| a * b).sum()
    }

    /// `Bᵀ`-congruence: returns `basis · self · basisᵀ` (rows of `basis` are vectors).
    pub fn congruence_rows(&self, basis: &IntMatrix) -> IntMatrix {
        &(basis * self) * &basis.transpose()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn block_diag(&self, other: &IntMatrix) -> IntMatrix {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        let rows = idx.iter().map(|&i| self.row(i).to_vec()).collect();
        Self::from_big_rows(rows).unwrap_or_else(|_| Self::zeros(0, self.cols))
    }

    /// Stacks the rows of `other` below the rows of `self`.
    pub fn vstack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.rows > 0 && other.rows > 0 && self.cols != other.cols {
            return Err(Error::ShapeMismatch("vstack column mismatch".into()));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Self {
            rows: self.rows + other.rows,
            cols,
            data,
        })
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    pub fn to_rational(&self) -> RationalMatrix {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect(),
        }
    }

    /// Inverse of a unimodular matrix, `None` if `self` is not unimodular.
    pub fn unimodular_inverse(&self) -> Option<IntMatrix> {
        if !self.is_square() || self.det().abs() != BigInt::one() {
            return None;
        }
        let (_, inv) = rational_inverse(&self.to_rational()).ok()?;
        inv.to_integer()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.to_rows())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_mul(rhs).expect("matrix shape mismatch")
    }
}

impl Add for &IntMatrix {
    type Output = IntMatrix;
    fn add(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &IntMatrix {
    type Output = IntMatrix;
    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &IntMatrix {
    type Output = IntMatrix;
    fn neg(self) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }
}

/// Dense rational matrix with canonical (reduced, positive-denominator) entries.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigRational) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, rhs: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch("rational product".into()));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Integer copy if every entry is integral.
    pub fn to_integer(&self) -> Option<IntMatrix> {
        let data = self
            .data
            .iter()
            .map(|x| x.is_integer().then(|| x.to_integer()))
            .collect::<Option<Vec<_>>>()?;
        Some(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }
}

/// Smith normal form `U · M · V = D`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    v_inv: IntMatrix,
}

impl SmithForm {
    /// Diagonal entries `d_1 | d_2 | …`, zeros included, length `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }

    /// `V⁻¹`, maintained alongside `V` during the reduction.
    pub fn v_inverse(&self) -> &IntMatrix {
        &self.v_inv
    }
}

/// Smith normal form by elementary row/column operations with a
/// minimal-absolute-value pivot. Deterministic.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (nr, nc) = (m.rows(), m.cols());
    let mut a = m.to_rows();
    let mut u = IntMatrix::identity(nr).to_rows();
    let mut v = IntMatrix::identity(nc).to_rows();
    let mut v_inv = IntMatrix::identity(nc).to_rows();

    // Row op: row_i += k * row_j (on A and U).
    fn row_add(a: &mut [Vec<BigInt>], i: usize, j: usize, k: &BigInt) {
        let src = a[j].clone();
        for (x, y) in a[i].iter_mut().zip(&src) {
            *x += k * y;
        }
    }
    // Column op on A and V: col_i += k * col_j; V⁻¹ gets row_j -= k * row_i.
    fn col_add(
        a: &mut [Vec<BigInt>],
        v: &mut [Vec<BigInt>],
        v_inv: &mut [Vec<BigInt>],
        i: usize,
        j: usize,
        k: &BigInt,
    ) {
        for row in a.iter_mut().chain(v.iter_mut()) {
            let t = k * &row[j];
            row[i] += t;
        }
        let neg = -k;
        row_add(v_inv, j, i, &neg);
    }
    fn col_swap(
        a: &mut [Vec<BigInt>],
        v: &mut [Vec<BigInt>],
        v_inv: &mut [Vec<BigInt>],
        i: usize,
        j: usize,
    ) {
        if i == j {
            return;
        }
        for row in a.iter_mut().chain(v.iter_mut()) {
            row.swap(i, j);
        }
        v_inv.swap(i, j);
    }

    let mut t = 0;
    while t < nr.min(nc) {
        // Minimal nonzero pivot in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                if !a[i][j].is_zero()
                    && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        col_swap(&mut a, &mut v, &mut v_inv, t, pj);

        loop {
            let p = a[t][t].clone();
            let mut clean = true;
            for i in t + 1..nr {
                if !a[i][t].is_zero() {
                    let q = -a[i][t].div_floor(&p);
                    row_add(&mut a, i, t, &q);
                    row_add(&mut u, i, t, &q);
                    clean &= a[i][t].is_zero();
                }
            }
            for j in t + 1..nc {
                if !a[t][j].is_zero() {
                    let q = -a[t][j].div_floor(&p);
                    col_add(&mut a, &mut v, &mut v_inv, j, t, &q);
                    clean &= a[t][j].is_zero();
                }
            }
            if !clean {
                // A smaller remainder appeared in the pivot row or column.
                let mut best = (t, t);
                for i in t + 1..nr {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..nc {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    a.swap(t, best.0);
                    u.swap(t, best.0);
                } else if best.1 != t {
                    col_swap(&mut a, &mut v, &mut v_inv, t, best.1);
                }
                continue;
            }
            // Enforce divisibility of the trailing block by the pivot.
            let offender = (t + 1..nr).find(|&i| {
                (t + 1..nc).any(|j| !(&a[i][j] % &p).is_zero())
            });
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    row_add(&mut a, t, i, &one);
                    row_add(&mut u, t, i, &one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut().chain(u[t].iter_mut()) {
                *x = -&*x;
            }
        }
        t += 1;
    }

    let to_m = |rows: Vec<Vec<BigInt>>, r: usize, c: usize| {
        if r == 0 || c == 0 {
            IntMatrix::zeros(r, c)
        } else {
            IntMatrix::from_big_rows(rows).expect("rectangular")
        }
    };
    SmithForm {
        u: to_m(u, nr, nr),
        d: to_m(a, nr, nc),
        v: to_m(v, nc, nc),
        v_inv: to_m(v_inv, nc, nc),
    }
}

/// Inertia of a symmetric matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Signature {
    pub plus: usize,
    pub minus: usize,
    pub zero: usize,
}

impl Signature {
    pub fn new(plus: usize, minus: usize, zero: usize) -> Self {
        Self { plus, minus, zero }
    }

    pub fn rank(&self) -> usize {
        self.plus + self.minus + self.zero
    }

    pub fn is_positive_definite(&self) -> bool {
        self.minus == 0 && self.zero == 0 && self.plus > 0
    }

    pub fn is_negative_definite(&self) -> bool {
        self.plus == 0 && self.zero == 0 && self.minus > 0
    }

    pub fn is_indefinite(&self) -> bool {
        self.plus > 0 && self.minus > 0
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero == 0 {
            write!(f, "({},{})", self.plus, self.minus)
        } else {
            write!(f, "({},{},{})", self.plus, self.minus, self.zero)
        }
    }
}

/// Exact inertia by symmetric rational elimination. When every remaining
/// diagonal entry vanishes, a 2×2 block `[[0,b],[b,0]]` with `b ≠ 0` is
/// eliminated and contributes one positive and one negative direction.
pub fn signature(g: &IntMatrix) -> Result<Signature> {
    if !g.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let mut a: Vec<Vec<BigRational>> = g
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(BigRational::from_integer).collect())
        .collect();
    let mut active: Vec<usize> = (0..g.rows()).collect();
    let mut sig = Signature::new(0, 0, 0);

    while !active.is_empty() {
        if let Some(pos) = active.iter().position(|&k| !a[k][k].is_zero()) {
            let k = active.remove(pos);
            let p = a[k][k].clone();
            if p.is_positive() {
                sig.plus += 1;
            } else {
                sig.minus += 1;
            }
            for &i in &active {
                if a[i][k].is_zero() {
                    continue;
                }
                let f = &a[i][k] / &p;
                for &j in &active {
                    let t = &f * &a[k][j];
                    a[i][j] -= t;
                }
            }
            continue;
        }
        let pair = active.iter().enumerate().find_map(|(x, &i)| {
            active[x + 1..]
                .iter()
                .find(|&&j| !a[i][j].is_zero())
                .map(|&j| (i, j))
        });
        let Some((i, j)) = pair else {
            sig.zero += active.len();
            break;
        };
        active.retain(|&x| x != i && x != j);
        sig.plus += 1;
        sig.minus += 1;
        // Block [[0,b],[b,0]] has inverse [[0,1/b],[1/b,0]]; Schur complement update.
        let b = a[i][j].clone();
        for &r in &active {
            for &c in &active {
                let t = (&a[r][i] * &a[j][c] + &a[r][j] * &a[i][c]) / &b;
                a[r][c] -= t;
            }
        }
    }
    Ok(sig)
}

/// Gauss–Jordan inverse over the rationals; returns the determinant too.
pub fn rational_inverse(m: &RationalMatrix) -> Result<(BigRational, RationalMatrix)> {
    let n = m.rows();
    if n != m.cols() {
        return Err(Error::ShapeMismatch("inverse of non-square matrix".into()));
    }
    let mut a: Vec<Vec<BigRational>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| RationalMatrix::identity(n).row(i).to_vec())
        .collect();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Err(Error::DegenerateForm);
        };
        if p != k {
            a.swap(p, k);
            inv.swap(p, k);
            det = -det;
        }
        let piv = a[k][k].clone();
        det *= &piv;
        for x in a[k].iter_mut().chain(inv[k].iter_mut()) {
            *x /= &piv;
        }
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone();
            let (ak, ik) = (a[k].clone(), inv[k].clone());
            for (x, y) in a[i].iter_mut().zip(&ak) {
                *x -= &f * y;
            }
            for (x, y) in inv[i].iter_mut().zip(&ik) {
                *x -= &f * y;
            }
        }
    }
    let data = inv.into_iter().flatten().collect();
    Ok((det, RationalMatrix { rows: n, cols: n, data }))
}

/// Exact determinant and rational inverse of a nondegenerate Gram matrix.
pub fn det_and_inverse(g: &IntMatrix) -> Result<(BigInt, RationalMatrix)> {
    if !g.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let det = g.det();
    if det.is_zero() {
        return Err(Error::DegenerateForm);
    }
    let (_, inv) = rational_inverse(&g.to_rational())?;
    Ok((det, inv))
}

/// Saturated basis (as rows) of the right kernel `{x ∈ Zⁿ : M x = 0}`.
pub fn integer_kernel(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    let r = snf.rank();
    let n = m.cols();
    let rows: Vec<Vec<BigInt>> = (r..n).map(|j| snf.v.column(j)).collect();
    if rows.is_empty() {
        IntMatrix::zeros(0, n)
    } else {
        IntMatrix::from_big_rows(rows).expect("rectangular")
    }
}

/// Basis (as rows) of `(Q-span of rows) ∩ Zⁿ`.
pub fn saturation(rows: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(rows);
    let r = snf.rank();
    if r == 0 {
        return IntMatrix::zeros(0, rows.cols());
    }
    snf.v_inverse().select_rows(&(0..r).collect::<Vec<_>>())
}

/// A Z-basis (as rows) of the module spanned by the rows of `m`.
pub fn row_basis(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    let diag = snf.diagonal();
    let r = snf.rank();
    if r == 0 {
        return IntMatrix::zeros(0, m.cols());
    }
    let rows = (0..r)
        .map(|i| snf.v_inverse().row(i).iter().map(|x| x * &diag[i]).collect())
        .collect();
    IntMatrix::from_big_rows(rows).expect("rectangular")
}

/// Rank over the rationals.
pub fn rank(m: &IntMatrix) -> usize {
    smith_normal_form(m).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e8() -> IntMatrix {
        crate::lattice::Lattice::e8().gram().clone()
    }

    /// Independent oracle: invariant factors via gcds of k×k minors.
    fn minors_oracle(m: &IntMatrix) -> Vec<BigInt> {
        fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = combos(n - 1, k);
            for mut c in combos(n - 1, k - 1) {
                c.push(n - 1);
                out.push(c);
            }
            out
        }
        let mut dets = vec![BigInt::one()];
        for k in 1..=m.rows().min(m.cols()) {
            let mut g = BigInt::zero();
            for r in combos(m.rows(), k) {
                for c in combos(m.cols(), k) {
                    let sub: Vec<Vec<BigInt>> = r
                        .iter()
                        .map(|&i| c.iter().map(|&j| m.get(i, j).clone()).collect())
                        .collect();
                    g = g.gcd(&IntMatrix::from_big_rows(sub).unwrap().det());
                }
            }
            dets.push(g);
        }
        (1..dets.len())
            .map(|k| {
                if dets[k].is_zero() {
                    BigInt::zero()
                } else {
                    &dets[k] / &dets[k - 1]
                }
            })
            .collect()
    }

    #[test]
    fn snf_of_hyperbolic_plane() {
        let s = smith_normal_form(&IntMatrix::from_rows(&[[0, 1], [1, 0]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(1)]);
    }

    #[test]
    fn snf_of_e8_minus_two_matches_minor_oracle() {
        let g = e8().scale(&BigInt::from(-2));
        let s = smith_normal_form(&g);
        assert_eq!(s.diagonal(), vec![BigInt::from(2); 8]);
        // Oracle on a smaller piece (minors are exponential in size).
        let sub = g.select_rows(&[0, 1, 2, 3]);
        assert_eq!(smith_normal_form(&sub).diagonal(), minors_oracle(&sub));
    }

    #[test]
    fn snf_of_rank_one() {
        let s = smith_normal_form(&IntMatrix::from_rows(&[[12]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(12)]);
    }

    #[test]
    fn snf_reconstructs_and_divides() {
        let m = IntMatrix::from_rows(&[[2, 4, 4], [-6, 6, 12], [10, -4, -16]]);
        let s = smith_normal_form(&m);
        assert_eq!(&(&s.u * &m) * &s.v, s.d);
        assert_eq!(s.diagonal(), minors_oracle(&m));
        assert!((&s.v * s.v_inverse()).is_identity());
    }

    #[test]
    fn snf_rectangular_and_zero() {
        let m = IntMatrix::from_rows(&[[0, 0, 0], [0, 0, 0]]);
        assert_eq!(smith_normal_form(&m).rank(), 0);
        let m = IntMatrix::from_rows(&[[2, 3, 5], [4, 6, 10]]);
        let s = smith_normal_form(&m);
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::zero()]);
        assert_eq!(&(&s.u * &m) * &s.v, s.d);
    }

    #[test]
    fn signatures_of_named_forms() {
        assert_eq!(
            signature(&IntMatrix::from_rows(&[[0, 1], [1, 0]])).unwrap(),
            Signature::new(1, 1, 0)
        );
        let k3 = crate::lattice::StandardLattice::K3.build().unwrap();
        assert_eq!(signature(k3.gram()).unwrap(), Signature::new(3, 19, 0));
        let mukai = crate::lattice::StandardLattice::Mukai.build().unwrap();
        assert_eq!(signature(mukai.gram()).unwrap(), Signature::new(4, 20, 0));
        assert_eq!(
            signature(&IntMatrix::from_rows(&[[0, 0], [0, 0]])).unwrap(),
            Signature::new(0, 0, 2)
        );
        assert_eq!(
            signature(&IntMatrix::from_rows(&[[1, 2], [3, 4]])),
            Err(Error::NotSymmetric)
        );
    }

    #[test]
    fn determinants_and_inverses() {
        let (d, _) = det_and_inverse(&IntMatrix::from_rows(&[[2, 1], [1, 4]])).unwrap();
        assert_eq!(d, BigInt::from(7));
        // Cofactor expansion for a 2×2: 2·12 − 13·13.
        let g = IntMatrix::from_rows(&[[2, 13], [13, 12]]);
        let (d, inv) = det_and_inverse(&g).unwrap();
        assert_eq!(d, BigInt::from(2 * 12 - 13 * 13));
        assert_eq!(g.to_rational().mul(&inv).unwrap(), RationalMatrix::identity(2));
        let (d, inv) = det_and_inverse(&IntMatrix::identity(3)).unwrap();
        assert_eq!(d, BigInt::one());
        assert_eq!(inv, RationalMatrix::identity(3));
        assert_eq!(
            det_and_inverse(&IntMatrix::from_rows(&[[1, 1], [1, 1]])),
            Err(Error::DegenerateForm)
        );
    }

    #[test]
    fn kernel_is_saturated() {
        let m = IntMatrix::from_rows(&[[2, 4, 6]]);
        let k = integer_kernel(&m);
        assert_eq!(k.rows(), 2);
        for i in 0..k.rows() {
            assert!(m.mul_vec(k.row(i)).iter().all(Zero::is_zero));
        }
        assert_eq!(smith_normal_form(&k).diagonal(), vec![BigInt::one(); 2]);
    }

    #[test]
    fn saturation_and_row_basis() {
        let rows = IntMatrix::from_rows(&[[2, 0, 0], [0, 4, 2]]);
        let sat = saturation(&rows);
        assert_eq!(sat.rows(), 2);
        assert_eq!(smith_normal_form(&sat).diagonal(), vec![BigInt::one(); 2]);
        let b = row_basis(&IntMatrix::from_rows(&[[2, 0], [0, 2], [1, 1]]));
        assert_eq!(b.det().abs(), BigInt::from(2));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_matrix() -> impl Strategy<Value = IntMatrix> {
            (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
                proptest::collection::vec(-9i64..10, r * c).prop_map(move |v| {
                    IntMatrix::new(r, c, v.into_iter().map(BigInt::from).collect()).unwrap()
                })
            })
        }

        /// Random unimodular matrix as a product of elementary operations.
        pub(crate) fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> IntMatrix {
            let mut p = IntMatrix::identity(n);
            for &(i, j, k) in ops {
                let (i, j) = (i % n, j % n);
                if i == j {
                    continue;
                }
                let mut e = IntMatrix::identity(n);
                e.set(i, j, BigInt::from(k));
                p = &p * &e;
            }
            p
        }

        proptest! {
            #[test]
            fn snf_invariants(m in small_matrix()) {
                let s = smith_normal_form(&m);
                prop_assert_eq!(&(&s.u * &m) * &s.v, s.d.clone());
                prop_assert_eq!(s.u.det().abs(), BigInt::one());
                prop_assert_eq!(s.v.det().abs(), BigInt::one());
                let diag = s.diagonal();
                for w in diag.windows(2) {
                    if !w[1].is_zero() {
                        prop_assert!((&w[1] % &w[0]).is_zero());
                    } else {
                        prop_assert!(w[1].is_zero());
                    }
                    prop_assert!(!(w[0].is_zero() && !w[1].is_zero()));
                }
                prop_assert!(diag.iter().all(|x| !x.is_negative()));
                prop_assert_eq!(diag, minors_oracle(&m));
            }

            #[test]
            fn signature_and_det_are_unimodular_invariants(
                v in proptest::collection::vec(-5i64..6, 9),
                ops in proptest::collection::vec((0usize..3, 0usize..3, -3i64..4), 0..8),
            ) {
                let mut g = IntMatrix::zeros(3, 3);
                for i in 0..3 {
                    for j in 0..3 {
                        let x = v[3 * i.min(j) + i.max(j)];
                        g.set(i, j, BigInt::from(x));
                    }
                }
                let p = unimodular(3, &ops);
                let h = &(&p.transpose() * &g) * &p;
                let s = signature(&g).unwrap();
                prop_assert_eq!(s.rank(), 3);
                prop_assert_eq!(s, signature(&h).unwrap());
                prop_assert_eq!(g.det(), h.det());
            }
        }
    }
}
