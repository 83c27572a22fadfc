//! Concrete operator spaces, tensors over their bases, and maps between them.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, operator_norm, singular_values};
use crate::matrix::{combine, ComplexMatrix, C64, ONE, ZERO};

/// Smallest admissible ratio `σ_min/σ_max` of the vectorized basis.
pub const INDEPENDENCE_RTOL: f64 = 1e-9;

/// Named spaces with a fixed realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardKind {
    /// `span{e_{1j}}` in `M_{1×n}`.
    Row(usize),
    /// `span{e_{i1}}` in `M_{n×1}`.
    Column(usize),
    /// Row ∩ column: `diag(e_{1i}, e_{i1})` in `M_{2n}`.
    RowCap(usize),
    Full(usize, usize),
    Scalar,
}

impl fmt::Display for StandardKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StandardKind::Row(n) => write!(f, "row:{n}"),
            StandardKind::Column(n) => write!(f, "column:{n}"),
            StandardKind::RowCap(n) => write!(f, "rowcap:{n}"),
            StandardKind::Full(p, q) => write!(f, "full:{p}x{q}"),
            StandardKind::Scalar => write!(f, "scalar"),
        }
    }
}

impl FromStr for StandardKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidKind(s.to_string());
        let positive = |t: &str| t.trim().parse::<usize>().ok().filter(|&n| n >= 1).ok_or_else(bad);
        if s.trim() == "scalar" {
            return Ok(StandardKind::Scalar);
        }
        let (name, arg) = s.split_once(':').ok_or_else(bad)?;
        match name.trim() {
            "row" => Ok(StandardKind::Row(positive(arg)?)),
            "column" | "col" => Ok(StandardKind::Column(positive(arg)?)),
            "rowcap" | "row∩column" => Ok(StandardKind::RowCap(positive(arg)?)),
            "full" => {
                let (p, q) = arg.split_once('x').ok_or_else(bad)?;
                Ok(StandardKind::Full(positive(p)?, positive(q)?))
            }
            _ => Err(bad()),
        }
    }
}

/// Which Hilbertian structure a space carries, when it sits in a single row
/// or a single column of its ambient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hilbertian {
    Row,
    Column,
}

impl Hilbertian {
    pub fn as_str(self) -> &'static str {
        match self {
            Hilbertian::Row => "row",
            Hilbertian::Column => "column",
        }
    }
}

/// A linearly independent family of `p×q` matrices and its span.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcreteOperatorSpace {
    label: String,
    rows: usize,
    cols: usize,
    basis: Vec<ComplexMatrix>,
}

impl ConcreteOperatorSpace {
    pub fn new(basis: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        let first = basis.first().ok_or(Error::EmptyBasis)?;
        let (rows, cols) = first.shape();
        for (i, b) in basis.iter().enumerate() {
            if b.shape() != (rows, cols) {
                return Err(Error::ShapeMismatch(format!(
                    "basis element {i} is {}x{}, expected {rows}x{cols}",
                    b.rows(),
                    b.cols()
                )));
            }
        }
        let vecs = ComplexMatrix::from_fn(rows * cols, basis.len(), |r, j| basis[j].data()[r]);
        let s = singular_values(&vecs);
        let top = s[0];
        let ratio = if basis.len() > rows * cols || top == 0.0 { 0.0 } else { s[basis.len() - 1] / top };
        if ratio <= INDEPENDENCE_RTOL {
            return Err(Error::DependentBasis { ratio });
        }
        Ok(Self { label: label.into(), rows, cols, basis })
    }

    /// A family used only as a coordinate system for evaluation; independence
    /// is not checked.
    pub(crate) fn unchecked(basis: Vec<ComplexMatrix>, label: impl Into<String>) -> Self {
        let (rows, cols) = basis[0].shape();
        Self { label: label.into(), rows, cols, basis }
    }

    pub fn standard(kind: StandardKind) -> Self {
        let basis: Vec<ComplexMatrix> = match kind {
            StandardKind::Row(n) => (0..n).map(|j| ComplexMatrix::unit(1, n, 0, j)).collect(),
            StandardKind::Column(n) => (0..n).map(|i| ComplexMatrix::unit(n, 1, i, 0)).collect(),
            StandardKind::RowCap(n) => (0..n)
                .map(|i| {
                    let mut m = ComplexMatrix::zeros(2 * n, 2 * n);
                    m[(0, i)] = ONE;
                    m[(n + i, n)] = ONE;
                    m
                })
                .collect(),
            StandardKind::Full(p, q) => {
                (0..p * q).map(|k| ComplexMatrix::unit(p, q, k / q, k % q)).collect()
            }
            StandardKind::Scalar => alloc::vec![ComplexMatrix::identity(1)],
        };
        Self { label: kind.to_string(), rows: basis[0].rows(), cols: basis[0].cols(), basis }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Ambient shape `(p, q)`.
    pub fn ambient(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    /// `Σ c_i b_i`.
    pub fn element(&self, coords: &[C64]) -> ComplexMatrix {
        combine(coords, &self.basis)
    }

    /// Gradient with respect to coordinates of a real function of the ambient
    /// element, given its ambient gradient `g`: entries `⟨b_i, g⟩`.
    pub fn pull_back(&self, g: &ComplexMatrix) -> Vec<C64> {
        self.basis.iter().map(|b| b.inner(g)).collect()
    }

    /// A space inside a single row (column) of its ambient is completely
    /// isometric to a row (column) Hilbert space.
    pub fn hilbertian(&self) -> Option<Hilbertian> {
        if self.rows == 1 {
            Some(Hilbertian::Row)
        } else if self.cols == 1 {
            Some(Hilbertian::Column)
        } else {
            None
        }
    }

    /// Gram matrix `G_{ij} = ⟨b_i, b_j⟩` (trace inner product).
    pub fn gram(&self) -> ComplexMatrix {
        let m = self.dim();
        ComplexMatrix::from_fn(m, m, |i, j| self.basis[i].inner(&self.basis[j]))
    }

    /// `Q = G^{-1/2}`: the elements `Σ_i Q_{ij} b_i` are orthonormal.
    pub fn orthonormalizer(&self) -> ComplexMatrix {
        let (vals, vecs) = hermitian_eigen(&self.gram());
        let m = self.dim();
        ComplexMatrix::from_fn(m, m, |i, j| {
            (0..m).map(|k| vecs[(i, k)] * vecs[(j, k)].conj() / libm::sqrt(vals[k])).sum()
        })
    }

    /// Matrices `K_j` in the span with `⟨K_j, b_i⟩ = δ_{ij}`; the coordinate
    /// functionals are `x ↦ ⟨K_j, x⟩`.
    pub fn dual_representers(&self) -> Vec<ComplexMatrix> {
        let ginv = crate::linalg::inverse(&self.gram()).expect("independent basis has invertible Gram matrix");
        (0..self.dim())
            .map(|j| {
                let coeffs: Vec<C64> = (0..self.dim()).map(|l| ginv[(l, j)]).collect();
                self.element(&coeffs)
            })
            .collect()
    }

    /// Coordinates of an ambient matrix lying in the span (least squares).
    pub fn coordinates(&self, x: &ComplexMatrix) -> Vec<C64> {
        self.dual_representers().iter().map(|k| k.inner(x)).collect()
    }

    /// Side of the square ambient obtained by zero padding.
    pub fn square_size(&self) -> usize {
        self.rows.max(self.cols)
    }

    pub fn square_basis(&self) -> Vec<ComplexMatrix> {
        let n = self.square_size();
        self.basis.iter().map(|b| b.padded(n, n)).collect()
    }
}

pub type SpaceRef = Arc<ConcreteOperatorSpace>;

/// `Σ c_{ij} e_i ⊗ f_j` over the bases of `left` and `right`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorElement {
    left: SpaceRef,
    right: SpaceRef,
    coeffs: ComplexMatrix,
}

impl TensorElement {
    pub fn new(left: SpaceRef, right: SpaceRef, coeffs: ComplexMatrix) -> Result<Self> {
        if coeffs.shape() != (left.dim(), right.dim()) {
            return Err(Error::ShapeMismatch(format!(
                "coefficients are {}x{} but spaces have dimensions {} and {}",
                coeffs.rows(),
                coeffs.cols(),
                left.dim(),
                right.dim()
            )));
        }
        Ok(Self { left, right, coeffs })
    }

    /// `Σ_i e_i ⊗ f_i` for spaces of equal dimension.
    pub fn diagonal(left: SpaceRef, right: SpaceRef) -> Result<Self> {
        let n = left.dim();
        Self::new(left, right, ComplexMatrix::identity(n))
    }

    pub fn left(&self) -> &SpaceRef {
        &self.left
    }

    pub fn right(&self) -> &SpaceRef {
        &self.right
    }

    pub fn coeffs(&self) -> &ComplexMatrix {
        &self.coeffs
    }

    pub fn with_coeffs(&self, coeffs: ComplexMatrix) -> Result<Self> {
        Self::new(self.left.clone(), self.right.clone(), coeffs)
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { left: self.left.clone(), right: self.right.clone(), coeffs: self.coeffs.scale(s) }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    /// `ᵗt = Σ c_{ij} f_j ⊗ e_i`.
    pub fn transpose(&self) -> Self {
        Self { left: self.right.clone(), right: self.left.clone(), coeffs: self.coeffs.transpose() }
    }

    /// Realization `Σ c_{ij} e_i ⊗ f_j` as a Kronecker-product matrix.
    pub fn ambient(&self) -> ComplexMatrix {
        let (p1, q1) = self.left.ambient();
        let (p2, q2) = self.right.ambient();
        let mut out = ComplexMatrix::zeros(p1 * p2, q1 * q2);
        for (i, e) in self.left.basis().iter().enumerate() {
            let f = self.right.element(&(0..self.right.dim()).map(|j| self.coeffs[(i, j)]).collect::<Vec<_>>());
            if f.is_zero() {
                continue;
            }
            out = &out + &e.kron(&f);
        }
        out
    }

    pub fn min_norm(&self) -> f64 {
        operator_norm(&self.ambient())
    }
}

/// Linear map between spaces, by its matrix on the bases:
/// `u(e_i) = Σ_j coeffs[j, i] f_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceMap {
    domain: SpaceRef,
    codomain: SpaceRef,
    coeffs: ComplexMatrix,
}

impl SpaceMap {
    pub fn new(domain: SpaceRef, codomain: SpaceRef, coeffs: ComplexMatrix) -> Result<Self> {
        if coeffs.shape() != (codomain.dim(), domain.dim()) {
            return Err(Error::ShapeMismatch(format!(
                "map coefficients are {}x{}, expected {}x{}",
                coeffs.rows(),
                coeffs.cols(),
                codomain.dim(),
                domain.dim()
            )));
        }
        Ok(Self { domain, codomain, coeffs })
    }

    pub fn identity(space: SpaceRef) -> Self {
        let n = space.dim();
        Self { domain: space.clone(), codomain: space, coeffs: ComplexMatrix::identity(n) }
    }

    pub fn domain(&self) -> &SpaceRef {
        &self.domain
    }

    pub fn codomain(&self) -> &SpaceRef {
        &self.codomain
    }

    pub fn coeffs(&self) -> &ComplexMatrix {
        &self.coeffs
    }

    pub fn with_coeffs(&self, coeffs: ComplexMatrix) -> Result<Self> {
        Self::new(self.domain.clone(), self.codomain.clone(), coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    /// Ambient images `u(e_i)` of the domain basis.
    pub fn images(&self) -> Vec<ComplexMatrix> {
        (0..self.domain.dim())
            .map(|i| {
                let c: Vec<C64> = (0..self.codomain.dim()).map(|j| self.coeffs[(j, i)]).collect();
                self.codomain.element(&c)
            })
            .collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SpaceMap) -> Result<SpaceMap> {
        if inner.codomain.as_ref() != self.domain.as_ref() {
            return Err(Error::ShapeMismatch("composition through different spaces".into()));
        }
        SpaceMap::new(inner.domain.clone(), self.codomain.clone(), &self.coeffs * &inner.coeffs)
    }
}

/// `Σ c_{ijl} e_i ⊗ f_j ⊗ g_l`, coefficients stored with `l` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    spaces: [SpaceRef; 3],
    coeffs: Vec<C64>,
}

impl Tensor3 {
    pub fn new(spaces: [SpaceRef; 3], coeffs: Vec<C64>) -> Result<Self> {
        let n: usize = spaces.iter().map(|s| s.dim()).product();
        if coeffs.len() != n {
            return Err(Error::ShapeMismatch(format!("{} coefficients for {n} basis triples", coeffs.len())));
        }
        Ok(Self { spaces, coeffs })
    }

    pub fn spaces(&self) -> &[SpaceRef; 3] {
        &self.spaces
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.spaces[0].dim(), self.spaces[1].dim(), self.spaces[2].dim()]
    }

    pub fn coeff(&self, i: usize, j: usize, l: usize) -> C64 {
        let [_, m2, m3] = self.dims();
        self.coeffs[(i * m2 + j) * m3 + l]
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { spaces: self.spaces.clone(), coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn ambient(&self) -> ComplexMatrix {
        let [m1, m2, m3] = self.dims();
        let mut out: Option<ComplexMatrix> = None;
        for i in 0..m1 {
            for j in 0..m2 {
                let g: Vec<C64> = (0..m3).map(|l| self.coeff(i, j, l)).collect();
                if g.iter().all(|c| *c == ZERO) {
                    continue;
                }
                let term = self.spaces[0].basis()[i].kron(&self.spaces[1].basis()[j]).kron(&self.spaces[2].element(&g));
                out = Some(match out {
                    Some(acc) => &acc + &term,
                    None => term,
                });
            }
        }
        out.unwrap_or_else(|| {
            let (shapes_r, shapes_c) = self
                .spaces
                .iter()
                .fold((1, 1), |(r, c), s| (r * s.ambient().0, c * s.ambient().1));
            ComplexMatrix::zeros(shapes_r, shapes_c)
        })
    }

    pub fn min_norm(&self) -> f64 {
        operator_norm(&self.ambient())
    }
}
