//! Lattices given by Gram matrices, their sublattices, and discriminant forms.
//!
//! Conventions: vectors are coordinate rows in the lattice basis; the Gram
//! matrix pairs them as `xᵀ G y`. A dual vector `x ∈ L*` is stored by its
//! rational coordinates in the same basis, so `G x` is integral.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{
    self, integer_kernel, smith_normal_form, IntMatrix, RationalMatrix,
    Signature,
};

/// A nondegenerate integral symmetric bilinear form. Odd forms are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    gram: IntMatrix,
    label: Option<String>,
}

impl Lattice {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if gram.det().is_zero() {
            return Err(Error::DegenerateForm);
        }
        Ok(Self { gram, label: None })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::new(IntMatrix::try_from_rows(rows)?)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn det(&self) -> BigInt {
        self.gram.det()
    }

    pub fn signature(&self) -> Signature {
        linalg::signature(&self.gram).expect("gram is symmetric")
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram.get(i, i).is_even())
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    /// `(x, y)` for coordinate vectors.
    pub fn pair(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        self.gram.bilinear(x, y)
    }

    pub fn norm(&self, x: &[BigInt]) -> BigInt {
        self.pair(x, x)
    }

    /// `L(n)`: the form multiplied by `n`.
    pub fn rescale(&self, n: i64) -> Result<Lattice> {
        if n == 0 {
            return Err(Error::ZeroScale);
        }
        let label = self.label.as_ref().map(|l| format!("{l}({n})"));
        Ok(Lattice {
            gram: self.gram.scale(&BigInt::from(n)),
            label,
        })
    }

    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        let label = match (&self.label, &other.label) {
            (Some(a), Some(b)) => Some(format!("{a}+{b}")),
            _ => None,
        };
        Lattice {
            gram: self.gram.block_diag(&other.gram),
            label,
        }
    }

    /// Direct sum of `k` copies.
    pub fn power(&self, k: usize) -> Lattice {
        assert!(k >= 1, "empty direct sum");
        (1..k).fold(self.clone(), |acc, _| acc.direct_sum(self))
    }

    /// Lattice spanned by a new basis, given as integral rows in `self`'s coordinates.
    pub fn change_basis(&self, basis: &IntMatrix) -> Result<Lattice> {
        Lattice::new(self.gram.congruence_rows(basis))
    }

    pub fn hyperbolic() -> Lattice {
        Lattice::from_rows(&[[0, 1], [1, 0]]).unwrap().with_label("U")
    }

    /// Positive definite E8 (Cartan matrix; node 8 attached to node 3).
    pub fn e8() -> Lattice {
        Lattice::from_rows(&[
            [2, -1, 0, 0, 0, 0, 0, 0],
            [-1, 2, -1, 0, 0, 0, 0, 0],
            [0, -1, 2, -1, 0, 0, 0, -1],
            [0, 0, -1, 2, -1, 0, 0, 0],
            [0, 0, 0, -1, 2, -1, 0, 0],
            [0, 0, 0, 0, -1, 2, -1, 0],
            [0, 0, 0, 0, 0, -1, 2, 0],
            [0, 0, -1, 0, 0, 0, 0, 2],
        ])
        .unwrap()
        .with_label("E8")
    }

    pub fn a_n(n: usize) -> Result<Lattice> {
        if n < 1 {
            return Err(Error::BadParams(format!("A_{n} needs n >= 1")));
        }
        let mut g = IntMatrix::zeros(n, n);
        for i in 0..n {
            g.set(i, i, BigInt::from(2));
            if i + 1 < n {
                g.set(i, i + 1, BigInt::from(-1));
                g.set(i + 1, i, BigInt::from(-1));
            }
        }
        Ok(Lattice::new(g)?.with_label(format!("A{n}")))
    }

    pub fn d_n(n: usize) -> Result<Lattice> {
        if n < 2 {
            return Err(Error::BadParams(format!("D_{n} needs n >= 2")));
        }
        // Roots e1-e2, …, e_{n-1}-e_n, e_{n-1}+e_n in Zⁿ.
        let mut roots = vec![vec![0i64; n]; n];
        for (i, r) in roots.iter_mut().enumerate().take(n - 1) {
            r[i] = 1;
            r[i + 1] = -1;
        }
        roots[n - 1][n - 2] = 1;
        roots[n - 1][n - 1] = 1;
        let b = IntMatrix::from_rows(&roots);
        Ok(Lattice::new(&b * &b.transpose())?.with_label(format!("D{n}")))
    }

    /// Diagonal form `⟨v⟩^k`.
    pub fn diagonal(value: i64, k: usize) -> Result<Lattice> {
        if value == 0 || k == 0 {
            return Err(Error::BadParams("diagonal form needs nonzero value and rank".into()));
        }
        let label = if k == 1 {
            format!("<{value}>")
        } else {
            format!("<{value}>^{k}")
        };
        Ok(Lattice::new(IntMatrix::diagonal(&vec![value; k]))?.with_label(label))
    }

    /// The Nikulin lattice: the index-2 overlattice of `⟨−2⟩⁸` adjoining
    /// `N̂ = (N₁+⋯+N₈)/2`, in the basis `N₁,…,N₇,N̂`.
    pub fn nikulin() -> Lattice {
        let mut g = IntMatrix::diagonal(&[-2i64; 8]);
        for i in 0..7 {
            g.set(i, 7, BigInt::from(-1));
            g.set(7, i, BigInt::from(-1));
        }
        g.set(7, 7, BigInt::from(-4));
        Lattice::new(g).unwrap().with_label("Nikulin")
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = &self.label {
            writeln!(f, "{l}")?;
        }
        write!(f, "{}", self.gram)
    }
}

/// Named lattices. Dynkin lattices are positive definite; sign changes are
/// explicit through [`StandardLattice::Scaled`] (so `E8(-1)` and `E8` are
/// distinct names).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StandardLattice {
    /// Hyperbolic plane.
    U,
    /// `[[4,2],[2,4]]`.
    V2,
    A(usize),
    D(usize),
    E8,
    /// Rank-one form `⟨n⟩`.
    Rank1(i64),
    /// `⟨−1⟩^k`.
    MinusOnes(usize),
    Nikulin,
    /// `M = U ⊕ E8(−1)`.
    EnriquesM,
    /// `N = U ⊕ U(2) ⊕ E8(−2)`.
    EnriquesN,
    /// `U³ ⊕ E8(−1)²`.
    K3,
    /// `U⁴ ⊕ E8(−1)²`.
    Mukai,
    Scaled(Box<StandardLattice>, i64),
}

impl StandardLattice {
    pub fn scaled(self, n: i64) -> Self {
        StandardLattice::Scaled(Box::new(self), n)
    }

    pub fn build(&self) -> Result<Lattice> {
        let e8m1 = || Lattice::e8().rescale(-1);
        let lat = match self {
            StandardLattice::U => Lattice::hyperbolic(),
            StandardLattice::V2 => Lattice::from_rows(&[[4, 2], [2, 4]])?,
            StandardLattice::A(n) => Lattice::a_n(*n)?,
            StandardLattice::D(n) => Lattice::d_n(*n)?,
            StandardLattice::E8 => Lattice::e8(),
            StandardLattice::Rank1(v) => Lattice::diagonal(*v, 1)?,
            StandardLattice::MinusOnes(k) => Lattice::diagonal(-1, *k)?,
            StandardLattice::Nikulin => Lattice::nikulin(),
            StandardLattice::EnriquesM => Lattice::hyperbolic().direct_sum(&e8m1()?),
            StandardLattice::EnriquesN => Lattice::hyperbolic()
                .direct_sum(&Lattice::hyperbolic().rescale(2)?)
                .direct_sum(&Lattice::e8().rescale(-2)?),
            StandardLattice::K3 => Lattice::hyperbolic().power(3).direct_sum(&e8m1()?.power(2)),
            StandardLattice::Mukai => {
                Lattice::hyperbolic().power(4).direct_sum(&e8m1()?.power(2))
            }
            StandardLattice::Scaled(base, n) => base.build()?.rescale(*n)?,
        };
        Ok(lat.with_label(self.to_string()))
    }
}

impl fmt::Display for StandardLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StandardLattice::U => write!(f, "U"),
            StandardLattice::V2 => write!(f, "V2"),
            StandardLattice::A(n) => write!(f, "A{n}"),
            StandardLattice::D(n) => write!(f, "D{n}"),
            StandardLattice::E8 => write!(f, "E8"),
            StandardLattice::Rank1(v) => write!(f, "<{v}>"),
            StandardLattice::MinusOnes(k) => write!(f, "<-1>^{k}"),
            StandardLattice::Nikulin => write!(f, "Nikulin"),
            StandardLattice::EnriquesM => write!(f, "M"),
            StandardLattice::EnriquesN => write!(f, "N_enriques"),
            StandardLattice::K3 => write!(f, "K3"),
            StandardLattice::Mukai => write!(f, "Mukai"),
            StandardLattice::Scaled(b, n) => write!(f, "{b}({n})"),
        }
    }
}

impl FromStr for StandardLattice {
    type Err = Error;

    /// Accepts the names printed by `Display`, e.g. `U(2)`, `E8(-2)`, `<6>`,
    /// `<-1>^8`, `A2`, `M(2)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let unknown = || Error::UnknownName(s.to_string());
        if let Some(stripped) = s.strip_suffix(')') {
            if let Some(open) = stripped.rfind('(') {
                let base = &stripped[..open];
                if !base.is_empty() && !base.ends_with('<') {
                    let n: i64 = stripped[open + 1..].trim().parse().map_err(|_| unknown())?;
                    return Ok(base.parse::<StandardLattice>()?.scaled(n));
                }
            }
        }
        if let Some(rest) = s.strip_prefix('<') {
            let (inner, power) = match rest.split_once(">^") {
                Some((i, p)) => (i, Some(p)),
                None => (rest.strip_suffix('>').ok_or_else(unknown)?, None),
            };
            let v: i64 = inner.trim().parse().map_err(|_| unknown())?;
            return match power {
                None => Ok(StandardLattice::Rank1(v)),
                Some(p) if v == -1 => Ok(StandardLattice::MinusOnes(
                    p.trim().parse().map_err(|_| unknown())?,
                )),
                Some(_) => Err(unknown()),
            };
        }
        match s {
            "U" => return Ok(StandardLattice::U),
            "V2" => return Ok(StandardLattice::V2),
            "E8" => return Ok(StandardLattice::E8),
            "Nikulin" => return Ok(StandardLattice::Nikulin),
            "M" => return Ok(StandardLattice::EnriquesM),
            "N" | "N_enriques" => return Ok(StandardLattice::EnriquesN),
            "K3" => return Ok(StandardLattice::K3),
            "Mukai" => return Ok(StandardLattice::Mukai),
            _ => {}
        }
        let dynkin = |prefix: &str| -> Option<usize> {
            s.strip_prefix(prefix)
                .map(|r| r.trim_start_matches('_'))
                .and_then(|r| r.parse().ok())
        };
        if let Some(n) = dynkin("A") {
            return Ok(StandardLattice::A(n));
        }
        if let Some(n) = dynkin("D") {
            return Ok(StandardLattice::D(n));
        }
        Err(unknown())
    }
}

/// Looks up a named lattice, e.g. `standard_lattice("E8(-2)")`.
pub fn standard_lattice(name: &str) -> Result<Lattice> {
    name.parse::<StandardLattice>()?.build()
}

/// A sublattice spanned by independent rows in ambient coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    ambient: Lattice,
    basis: IntMatrix,
}

impl Sublattice {
    pub fn new(ambient: Lattice, basis: IntMatrix) -> Result<Self> {
        if basis.rows() > 0 && basis.cols() != ambient.rank() {
            return Err(Error::ShapeMismatch(format!(
                "basis vectors have length {}, ambient rank is {}",
                basis.cols(),
                ambient.rank()
            )));
        }
        let basis = if basis.rows() == 0 {
            IntMatrix::zeros(0, ambient.rank())
        } else {
            basis
        };
        if linalg::rank(&basis) != basis.rows() {
            return Err(Error::Precondition("sublattice basis rows are dependent".into()));
        }
        Ok(Self { ambient, basis })
    }

    pub fn ambient(&self) -> &Lattice {
        &self.ambient
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    /// `basis · G · basisᵀ`.
    pub fn induced_gram(&self) -> IntMatrix {
        self.ambient.gram().congruence_rows(&self.basis)
    }

    /// The induced form as a lattice; fails if it is degenerate.
    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.induced_gram())
    }

    /// True iff the ambient quotient by the span is torsion-free.
    pub fn is_saturated(&self) -> bool {
        smith_normal_form(&self.basis)
            .diagonal()
            .iter()
            .all(|d| d.is_one())
    }

    pub fn saturate(&self) -> Sublattice {
        Sublattice {
            ambient: self.ambient.clone(),
            basis: linalg::saturation(&self.basis),
        }
    }

    /// All ambient vectors orthogonal to the span; always saturated.
    pub fn orthogonal_complement(&self) -> Sublattice {
        let n = self.ambient.rank();
        let basis = if self.rank() == 0 {
            IntMatrix::identity(n)
        } else {
            integer_kernel(&(&self.basis * self.ambient.gram()))
        };
        Sublattice {
            ambient: self.ambient.clone(),
            basis,
        }
    }
}

/// Reduces a rational into `[0, m)`.
pub(crate) fn reduce_mod(x: &BigRational, m: i64) -> BigRational {
    let m = BigRational::from_integer(BigInt::from(m));
    let q = (x / &m).floor();
    x - q * m
}

/// A finite abelian group `⊕ Z/nᵢ` with a `Q/Z`-valued bilinear form and,
/// for even sources, a `Q/2Z`-valued quadratic refinement.
///
/// Orders produced from a lattice form a divisibility chain; forms built by
/// [`FiniteQuadraticForm::direct_sum`] keep the concatenated cyclic orders.
/// Values are stored reduced: bilinear in `[0,1)`, quadratic in `[0,2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteQuadraticForm {
    orders: Vec<BigInt>,
    bilinear: Vec<Vec<BigRational>>,
    quadratic: Option<Vec<BigRational>>,
}

impl FiniteQuadraticForm {
    pub fn new(
        orders: Vec<BigInt>,
        bilinear: Vec<Vec<BigRational>>,
        quadratic: Option<Vec<BigRational>>,
    ) -> Result<Self> {
        let n = orders.len();
        if bilinear.len() != n || bilinear.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch("bilinear table".into()));
        }
        if quadratic.as_ref().is_some_and(|q| q.len() != n) {
            return Err(Error::ShapeMismatch("quadratic values".into()));
        }
        if orders.iter().any(|o| o <= &BigInt::one()) {
            return Err(Error::Precondition("cyclic orders must exceed 1".into()));
        }
        let bilinear: Vec<Vec<BigRational>> = bilinear
            .iter()
            .map(|r| r.iter().map(|x| reduce_mod(x, 1)).collect())
            .collect();
        for i in 0..n {
            for j in 0..n {
                if bilinear[i][j] != bilinear[j][i] {
                    return Err(Error::Precondition("bilinear table not symmetric".into()));
                }
                let scaled = &bilinear[i][j] * BigRational::from_integer(orders[i].clone());
                if !scaled.is_integer() {
                    return Err(Error::Precondition("bilinear value incompatible with order".into()));
                }
            }
        }
        let quadratic = match quadratic {
            None => None,
            Some(q) => {
                let q: Vec<BigRational> = q.iter().map(|x| reduce_mod(x, 2)).collect();
                for i in 0..n {
                    if reduce_mod(&q[i], 1) != bilinear[i][i] {
                        return Err(Error::Precondition(
                            "quadratic value does not refine the bilinear form".into(),
                        ));
                    }
                    let o = BigRational::from_integer(orders[i].clone());
                    if !reduce_mod(&(&q[i] * &o * &o), 2).is_zero() {
                        return Err(Error::Precondition("q(n·g) must vanish".into()));
                    }
                }
                Some(q)
            }
        };
        Ok(Self {
            orders,
            bilinear,
            quadratic,
        })
    }

    pub fn trivial() -> Self {
        Self {
            orders: vec![],
            bilinear: vec![],
            quadratic: Some(vec![]),
        }
    }

    pub fn orders(&self) -> &[BigInt] {
        &self.orders
    }

    pub fn num_generators(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> BigInt {
        self.orders.iter().product()
    }

    pub fn bilinear_table(&self) -> &[Vec<BigRational>] {
        &self.bilinear
    }

    pub fn quadratic_values(&self) -> Option<&[BigRational]> {
        self.quadratic.as_deref()
    }

    /// False for discriminant forms of odd lattices (only `b` is defined).
    pub fn has_quadratic(&self) -> bool {
        self.quadratic.is_some()
    }

    /// Invariant factors `d₁ | d₂ | …` (all > 1) of the underlying group.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        if self.orders.is_empty() {
            return vec![];
        }
        smith_normal_form(&IntMatrix::diagonal(&self.orders))
            .diagonal()
            .into_iter()
            .filter(|d| !d.is_one())
            .collect()
    }

    pub fn exponent(&self) -> BigInt {
        self.orders.iter().fold(BigInt::one(), |acc, o| acc.lcm(o))
    }

    /// `b(x, y) mod 1` for coefficient vectors on the generators.
    pub fn b(&self, x: &[BigInt], y: &[BigInt]) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() {
                    acc += &self.bilinear[i][j] * BigRational::from_integer(xi * yj);
                }
            }
        }
        reduce_mod(&acc, 1)
    }

    /// `q(x) mod 2`, or `None` when no quadratic refinement exists.
    pub fn q(&self, x: &[BigInt]) -> Option<BigRational> {
        let qv = self.quadratic.as_ref()?;
        let mut acc = BigRational::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            acc += &qv[i] * BigRational::from_integer(xi * xi);
            for (j, xj) in x.iter().enumerate().skip(i + 1) {
                if !xj.is_zero() {
                    acc += &self.bilinear[i][j] * BigRational::from_integer(BigInt::from(2) * xi * xj);
                }
            }
        }
        Some(reduce_mod(&acc, 2))
    }

    /// Orthogonal direct sum.
    pub fn direct_sum(&self, other: &FiniteQuadraticForm) -> FiniteQuadraticForm {
        let (n, m) = (self.orders.len(), other.orders.len());
        let mut bilinear = vec![vec![BigRational::zero(); n + m]; n + m];
        for i in 0..n {
            for j in 0..n {
                bilinear[i][j] = self.bilinear[i][j].clone();
            }
        }
        for i in 0..m {
            for j in 0..m {
                bilinear[n + i][n + j] = other.bilinear[i][j].clone();
            }
        }
        let quadratic = match (&self.quadratic, &other.quadratic) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
            _ => None,
        };
        FiniteQuadraticForm {
            orders: self.orders.iter().chain(&other.orders).cloned().collect(),
            bilinear,
            quadratic,
        }
    }

    /// The form with all values negated (discriminant form of `L(−1)`).
    pub fn negated(&self) -> FiniteQuadraticForm {
        FiniteQuadraticForm {
            orders: self.orders.clone(),
            bilinear: self
                .bilinear
                .iter()
                .map(|r| r.iter().map(|x| reduce_mod(&-x, 1)).collect())
                .collect(),
            quadratic: self
                .quadratic
                .as_ref()
                .map(|q| q.iter().map(|x| reduce_mod(&-x, 2)).collect()),
        }
    }

    /// Every element as a coefficient vector, in lexicographic order.
    /// Intended for small groups only.
    pub fn elements(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![vec![]];
        for o in self.orders.iter().rev() {
            let mut next = Vec::new();
            let mut k = BigInt::zero();
            while &k < o {
                for tail in &out {
                    let mut v = vec![k.clone()];
                    v.extend(tail.iter().cloned());
                    next.push(v);
                }
                k += 1;
            }
            out = next;
        }
        out.sort();
        out
    }
}

/// `d(L) = L*/L` together with generator lifts in `L ⊗ Q`.
#[derive(Clone, Debug)]
pub struct DiscriminantGroup {
    pub form: FiniteQuadraticForm,
    /// Rational coordinates (in the lattice basis) of each generator's lift.
    pub generators: Vec<Vec<BigRational>>,
    /// Rows of the SNF transform `U` belonging to the nontrivial factors.
    coord_rows: Vec<Vec<BigInt>>,
    gram: IntMatrix,
}

impl DiscriminantGroup {
    /// Coefficients on the generators of the class of a dual vector.
    pub fn coordinates_of(&self, x: &[BigRational]) -> Result<Vec<BigInt>> {
        let gx = self.gram.to_rational().mul_vec(x);
        if gx.iter().any(|v| !v.is_integer()) {
            return Err(Error::Precondition("vector is not in the dual lattice".into()));
        }
        let y: Vec<BigInt> = gx.iter().map(|v| v.to_integer()).collect();
        Ok(self
            .coord_rows
            .iter()
            .zip(self.form.orders())
            .map(|(row, o)| row.iter().zip(&y).map(|(a, b)| a * b).sum::<BigInt>().mod_floor(o))
            .collect())
    }

    /// A lift of the element with the given generator coefficients.
    pub fn lift(&self, coeffs: &[BigInt]) -> Vec<BigRational> {
        let n = self.gram.rows();
        let mut v = vec![BigRational::zero(); n];
        for (c, g) in coeffs.iter().zip(&self.generators) {
            if c.is_zero() {
                continue;
            }
            let c = BigRational::from_integer(c.clone());
            for (vi, gi) in v.iter_mut().zip(g) {
                *vi += &c * gi;
            }
        }
        v
    }
}

/// Computes `d(L)` from the Smith form `U G V = D`: the generator of order
/// `dᵢ` lifts to column `i` of `V` divided by `dᵢ`.
pub fn discriminant_group(l: &Lattice) -> DiscriminantGroup {
    let g = l.gram();
    let snf = smith_normal_form(g);
    let diag = snf.diagonal();
    let grat = g.to_rational();
    let even = l.is_even();
    let mut orders = Vec::new();
    let mut generators = Vec::new();
    let mut coord_rows = Vec::new();
    for (i, d) in diag.iter().enumerate() {
        if d.is_one() {
            continue;
        }
        orders.push(d.clone());
        let denom = BigRational::from_integer(d.clone());
        generators.push(
            snf.v
                .column(i)
                .into_iter()
                .map(|x| BigRational::from_integer(x) / &denom)
                .collect::<Vec<_>>(),
        );
        coord_rows.push(snf.u.row(i).to_vec());
    }
    let pair = |x: &[BigRational], y: &[BigRational]| -> BigRational {
        x.iter()
            .zip(grat.mul_vec(y))
            .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
    };
    let k = generators.len();
    let bilinear: Vec<Vec<BigRational>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| reduce_mod(&pair(&generators[i], &generators[j]), 1))
                .collect()
        })
        .collect();
    let quadratic = even.then(|| {
        generators
            .iter()
            .map(|x| reduce_mod(&pair(x, x), 2))
            .collect()
    });
    DiscriminantGroup {
        form: FiniteQuadraticForm {
            orders,
            bilinear,
            quadratic,
        },
        generators,
        coord_rows,
        gram: g.clone(),
    }
}

/// `(d(L), b_L, q_L)`; the quadratic part is absent for odd `L`.
pub fn discriminant_form(l: &Lattice) -> FiniteQuadraticForm {
    discriminant_group(l).form
}

/// `ℓ`: the number of cyclic factors divisible by `p`, or all of them.
pub fn min_generators(q: &FiniteQuadraticForm, p: Option<&BigInt>) -> usize {
    q.invariant_factors()
        .iter()
        .filter(|d| p.map_or(true, |p| d.is_multiple_of(p)))
        .count()
}

/// An overlattice together with its basis expressed in the old coordinates.
#[derive(Clone, Debug)]
pub struct Overlattice {
    pub lattice: Lattice,
    /// Rows: new basis vectors in rational coordinates of the original lattice.
    pub basis: RationalMatrix,
}

impl Overlattice {
    /// Coordinates in the new basis of a vector of the original lattice.
    pub fn coordinates_of(&self, v: &[BigInt]) -> Vec<BigInt> {
        let (_, inv) = linalg::rational_inverse(&self.basis).expect("basis is invertible");
        let vr: Vec<BigRational> = v.iter().cloned().map(BigRational::from_integer).collect();
        // v = c · basis  ⇒  c = v · basis⁻¹.
        (0..inv.cols())
            .map(|j| {
                let c = (0..inv.rows()).fold(BigRational::zero(), |acc, i| {
                    acc + &vr[i] * inv.get(i, j)
                });
                debug_assert!(c.is_integer());
                c.to_integer()
            })
            .collect()
    }
}

/// Overlattice generated by `L` and lifts of the subgroup `H ⊂ d(L)`
/// (elements given as generator coefficients). `q` and `b` must vanish on `H`.
pub fn overlattice(l: &Lattice, h: &[Vec<BigInt>]) -> Result<Overlattice> {
    if !l.is_even() {
        return Err(Error::OddLattice);
    }
    let dg = discriminant_group(l);
    let form = &dg.form;
    for x in h {
        if x.len() != form.num_generators() {
            return Err(Error::ShapeMismatch("element of d(L) has wrong length".into()));
        }
    }
    for (i, x) in h.iter().enumerate() {
        let qx = form.q(x).expect("even lattice");
        if !qx.is_zero() {
            return Err(Error::NotIsotropic(format!("q = {qx} on element {i}")));
        }
        for (j, y) in h.iter().enumerate().skip(i + 1) {
            let bxy = form.b(x, y);
            if !bxy.is_zero() {
                return Err(Error::NotIsotropic(format!("b = {bxy} on elements {i},{j}")));
            }
        }
    }
    let n = l.rank();
    let lifts: Vec<Vec<BigRational>> = h.iter().map(|x| dg.lift(x)).collect();
    let denom = lifts
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scale = BigRational::from_integer(denom.clone());
    let mut rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { denom.clone() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    rows.extend(
        lifts
            .iter()
            .map(|v| v.iter().map(|x| (x * &scale).to_integer()).collect()),
    );
    let scaled_basis = linalg::row_basis(&IntMatrix::from_big_rows(rows)?);
    let g2 = l.gram().congruence_rows(&scaled_basis);
    let d2 = &denom * &denom;
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let (q, r) = g2.get(i, j).div_rem(&d2);
            if !r.is_zero() {
                return Err(Error::NotIsotropic("overlattice is not integral".into()));
            }
            data.push(q);
        }
    }
    let lattice = Lattice::new(IntMatrix::new(n, n, data)?)?;
    let mut basis = RationalMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            basis.set(
                i,
                j,
                BigRational::new(scaled_basis.get(i, j).clone(), denom.clone()),
            );
        }
    }
    Ok(Overlattice { lattice, basis })
}

/// The lattice part of [`overlattice`].
pub fn overlattice_from_isotropic(l: &Lattice, h: &[Vec<BigInt>]) -> Result<Lattice> {
    overlattice(l, h).map(|o| o.lattice)
}

/// `xᵀ G⁻¹ y`-style pairing of two rational vectors under an integral Gram.
pub fn rational_pair(g: &IntMatrix, x: &[BigRational], y: &[BigRational]) -> BigRational {
    x.iter()
        .zip(g.to_rational().mul_vec(y))
        .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
}
