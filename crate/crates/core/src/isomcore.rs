//! Euclidean isometries `x ↦ A x + a`, linear conformal maps `λ A′`, and affine
//! subspaces of `R^n`.
//!
//! Composition follows `(A, a) ∘ (B, b) = (AB, A b + a)` and inversion
//! `(A, a)⁻¹ = (Aᵀ, −Aᵀ a)`. Everything is stored in dense `f64` matrices; the
//! dimensions in play are small (n ≲ 16).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Global comparison tolerance.
pub const TAU: f64 = 1e-9;

/// Singular values below this are treated as zero when solving for fixed points.
pub const SINGULAR_CUTOFF: f64 = 1e-8;

/// Residual above which a fixed-point system is declared inconsistent.
pub const FIXED_POINT_RESIDUAL: f64 = 1e-8;

/// `‖MᵀM − I‖_F`.
pub fn orthogonality_defect(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    (m.transpose() * m - DMatrix::<f64>::identity(n, n)).norm()
}

fn check_orthogonal(m: &DMatrix<f64>, tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::InvalidArgument(format!(
            "orthogonal part must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let residual = orthogonality_defect(m);
    if residual > tol {
        return Err(Error::NotOrthogonal { residual });
    }
    Ok(())
}

/// One element `(ort, tran)` of `E(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    ort: DMatrix<f64>,
    tran: DVector<f64>,
}

impl Isometry {
    /// Validates orthogonality with the global tolerance [`TAU`].
    pub fn new(ort: DMatrix<f64>, tran: DVector<f64>) -> Result<Self> {
        Self::with_tolerance(ort, tran, TAU)
    }

    pub fn with_tolerance(ort: DMatrix<f64>, tran: DVector<f64>, tol: f64) -> Result<Self> {
        if ort.nrows() == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        check_orthogonal(&ort, tol)?;
        if ort.nrows() != tran.len() {
            return Err(Error::DimensionMismatch {
                expected: ort.nrows(),
                got: tran.len(),
            });
        }
        Ok(Self { ort, tran })
    }

    /// Builds from row-major nested vectors, as used in config files.
    pub fn from_rows(ort: &[Vec<f64>], tran: &[f64], tol: f64) -> Result<Self> {
        let n = tran.len();
        if ort.len() != n || ort.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: ort.len(),
            });
        }
        let m = DMatrix::from_fn(n, n, |i, j| ort[i][j]);
        Self::with_tolerance(m, DVector::from_column_slice(tran), tol)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            ort: DMatrix::identity(n, n),
            tran: DVector::zeros(n),
        }
    }

    pub fn translation(v: DVector<f64>) -> Self {
        let n = v.len();
        Self {
            ort: DMatrix::identity(n, n),
            tran: v,
        }
    }

    pub fn linear(ort: DMatrix<f64>) -> Result<Self> {
        let n = ort.nrows();
        Self::new(ort, DVector::zeros(n))
    }

    pub(crate) fn from_parts_unchecked(ort: DMatrix<f64>, tran: DVector<f64>) -> Self {
        debug_assert_eq!(ort.nrows(), tran.len());
        Self { ort, tran }
    }

    pub fn dim(&self) -> usize {
        self.tran.len()
    }

    pub fn ort(&self) -> &DMatrix<f64> {
        &self.ort
    }

    pub fn tran(&self) -> &DVector<f64> {
        &self.tran
    }

    /// `|tran(g)|`.
    pub fn translation_norm(&self) -> f64 {
        self.tran.norm()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.ort * x + &self.tran
    }

    fn check_same_dim(&self, other: &Isometry) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        self.check_same_dim(other)?;
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Isometry) -> Isometry {
        Isometry {
            ort: &self.ort * &other.ort,
            tran: &self.ort * &other.tran + &self.tran,
        }
    }

    pub fn inverse(&self) -> Isometry {
        let ort_inv = self.ort.transpose();
        let tran = -(&ort_inv * &self.tran);
        Isometry { ort: ort_inv, tran }
    }

    /// `[self, other] = self · other · self⁻¹ · other⁻¹`.
    pub fn commutator(&self, other: &Isometry) -> Result<Isometry> {
        self.check_same_dim(other)?;
        let tail = self.inverse().compose_unchecked(&other.inverse());
        Ok(self.compose_unchecked(&other.compose_unchecked(&tail)))
    }

    /// `‖Δort‖_F + ‖Δtran‖`.
    pub fn distance(&self, other: &Isometry) -> f64 {
        (&self.ort - &other.ort).norm() + (&self.tran - &other.tran).norm()
    }

    pub fn approx_eq(&self, other: &Isometry, tol: f64) -> bool {
        self.dim() == other.dim() && self.distance(other) <= tol
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&Isometry::identity(self.dim()), tol)
    }

    /// Whether the orthogonal part is the identity within `tol`.
    pub fn is_translation(&self, tol: f64) -> bool {
        let n = self.dim();
        (&self.ort - DMatrix::<f64>::identity(n, n)).norm() < tol
    }

    pub fn pow(&self, k: i64) -> Isometry {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Isometry::identity(self.dim());
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose_unchecked(&base);
        }
        acc
    }

    /// Solution set of `g(x) = x`, i.e. `(ort − I) x = −tran`, or `None` when
    /// the system is inconsistent.
    pub fn fixed_point_space(&self) -> Option<AffineSubspace> {
        let n = self.dim();
        let m = &self.ort - DMatrix::<f64>::identity(n, n);
        let rhs = -&self.tran;
        let svd = m.clone().svd(true, true);
        let u = svd.u.as_ref().expect("u requested");
        let v_t = svd.v_t.as_ref().expect("v_t requested");
        let uty = u.transpose() * &rhs;
        let mut x = DVector::zeros(n);
        let mut null_basis = Vec::new();
        for (i, &sigma) in svd.singular_values.iter().enumerate() {
            let v_i: DVector<f64> = v_t.row(i).transpose();
            if sigma < SINGULAR_CUTOFF {
                null_basis.push(v_i);
            } else {
                x += v_i * (uty[i] / sigma);
            }
        }
        let residual = (&m * &x - &rhs).norm();
        if residual > FIXED_POINT_RESIDUAL {
            return None;
        }
        Some(AffineSubspace {
            base: x,
            basis: null_basis,
        })
    }
}

/// Smallest `m ∈ [1, m_max]` with `‖Qᵐ − I‖_F < eps`, or `None` if there is none.
pub fn power_near_identity(q: &DMatrix<f64>, eps: f64, m_max: u64) -> Result<Option<u64>> {
    check_orthogonal(q, TAU)?;
    if eps <= 0.0 || m_max == 0 {
        return Err(Error::InvalidArgument("eps must be positive and m_max >= 1".into()));
    }
    let n = q.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let mut power = q.clone();
    for m in 1..=m_max {
        if (&power - &id).norm() < eps {
            return Ok(Some(m));
        }
        power = &power * q;
    }
    Ok(None)
}

/// A linear conformal map `λ A′` with `λ > 0` and `A′ ∈ SO(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalMap {
    scale: f64,
    rot: DMatrix<f64>,
}

impl ConformalMap {
    pub fn new(scale: f64, rot: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(scale, rot, TAU)
    }

    pub fn with_tolerance(scale: f64, rot: DMatrix<f64>, tol: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidConformal(format!("scale must be positive, got {scale}")));
        }
        check_orthogonal(&rot, tol)?;
        let det = rot.determinant();
        if (det - 1.0).abs() > tol.max(1e-9) {
            return Err(Error::InvalidConformal(format!(
                "rotation must have determinant +1, got {det}"
            )));
        }
        Ok(Self { scale, rot })
    }

    pub fn scaling(n: usize, scale: f64) -> Result<Self> {
        Self::new(scale, DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.rot.nrows()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn rot(&self) -> &DMatrix<f64> {
        &self.rot
    }

    pub fn is_expanding(&self) -> bool {
        self.scale > 1.0
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        &self.rot * self.scale
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        (&self.rot * x) * self.scale
    }

    pub fn inverse(&self) -> ConformalMap {
        ConformalMap {
            scale: 1.0 / self.scale,
            rot: self.rot.transpose(),
        }
    }

    pub fn pow(&self, m: u32) -> ConformalMap {
        let n = self.dim();
        let mut rot = DMatrix::identity(n, n);
        for _ in 0..m {
            rot = &self.rot * rot;
        }
        ConformalMap {
            scale: self.scale.powi(m as i32),
            rot,
        }
    }

    /// `θ_A(g) = A g A⁻¹`, which is `(A′ ort A′ᵀ, λ A′ tran)`.
    pub fn conjugate(&self, g: &Isometry) -> Result<Isometry> {
        if g.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: g.dim(),
            });
        }
        let ort = &self.rot * g.ort() * self.rot.transpose();
        let tran = (&self.rot * g.tran()) * self.scale;
        Ok(Isometry::from_parts_unchecked(ort, tran))
    }
}

/// An affine subspace `base + span(basis)` with an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSubspace {
    base: DVector<f64>,
    basis: Vec<DVector<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineSubspaceRepr {
    pub base: Vec<f64>,
    #[serde(default)]
    pub basis: Vec<Vec<f64>>,
}

impl AffineSubspace {
    pub fn new(base: DVector<f64>, basis: Vec<DVector<f64>>) -> Result<Self> {
        Self::with_tolerance(base, basis, TAU)
    }

    pub fn with_tolerance(base: DVector<f64>, basis: Vec<DVector<f64>>, tol: f64) -> Result<Self> {
        let n = base.len();
        if basis.len() > n {
            return Err(Error::InvalidSubspace(format!(
                "{} basis vectors in R^{n}",
                basis.len()
            )));
        }
        for (i, b) in basis.iter().enumerate() {
            if b.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: b.len(),
                });
            }
            for (j, c) in basis.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                if (b.dot(c) - target).abs() > tol {
                    return Err(Error::InvalidSubspace(format!(
                        "basis vectors {i} and {j} are not orthonormal"
                    )));
                }
            }
        }
        Ok(Self { base, basis })
    }

    /// Orthonormalises `spanning` (Gram–Schmidt, dropping dependent vectors).
    pub fn spanned_by(base: DVector<f64>, spanning: &[DVector<f64>]) -> Self {
        let basis = gram_schmidt(spanning, 1e-10);
        Self { base, basis }
    }

    pub fn linear(basis: Vec<DVector<f64>>) -> Result<Self> {
        let n = basis.first().map(|b| b.len()).ok_or_else(|| {
            Error::InvalidSubspace("linear subspace needs an ambient dimension".into())
        })?;
        Self::new(DVector::zeros(n), basis)
    }

    pub fn whole_space(n: usize) -> Self {
        Self {
            base: DVector::zeros(n),
            basis: (0..n).map(|i| unit(n, i)).collect(),
        }
    }

    pub fn point(base: DVector<f64>) -> Self {
        Self { base, basis: Vec::new() }
    }

    pub fn from_repr(repr: &AffineSubspaceRepr, tol: f64) -> Result<Self> {
        Self::with_tolerance(
            DVector::from_column_slice(&repr.base),
            repr.basis.iter().map(|b| DVector::from_column_slice(b)).collect(),
            tol,
        )
    }

    pub fn to_repr(&self) -> AffineSubspaceRepr {
        AffineSubspaceRepr {
            base: self.base.iter().copied().collect(),
            basis: self.basis.iter().map(|b| b.iter().copied().collect()).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn base(&self) -> &DVector<f64> {
        &self.base
    }

    pub fn basis(&self) -> &[DVector<f64>] {
        &self.basis
    }

    /// Whether the subspace passes through the origin.
    pub fn is_linear(&self, tol: f64) -> bool {
        self.distance(&DVector::zeros(self.ambient_dim())) < tol
    }

    /// Orthogonal projection of a vector onto the direction space.
    pub fn project_direction(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(v.len());
        for b in &self.basis {
            out += b * b.dot(v);
        }
        out
    }

    /// Component of `v` orthogonal to the direction space.
    pub fn reject_direction(&self, v: &DVector<f64>) -> DVector<f64> {
        v - self.project_direction(v)
    }

    /// Closest point of the subspace to `x`.
    pub fn closest_point(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.base + self.project_direction(&(x - &self.base))
    }

    pub fn distance(&self, x: &DVector<f64>) -> f64 {
        self.reject_direction(&(x - &self.base)).norm()
    }

    /// The parallel linear subspace through the origin.
    pub fn direction_space(&self) -> AffineSubspace {
        AffineSubspace {
            base: DVector::zeros(self.ambient_dim()),
            basis: self.basis.clone(),
        }
    }

    /// Orthonormal basis of the orthogonal complement of the direction space.
    /// Built by projecting the standard basis, so coordinate-aligned inputs give
    /// coordinate-aligned outputs.
    pub fn complement_basis(&self) -> Vec<DVector<f64>> {
        let n = self.ambient_dim();
        let mut out: Vec<DVector<f64>> = Vec::with_capacity(n - self.dim());
        for i in 0..n {
            if out.len() == n - self.dim() {
                break;
            }
            let mut v = self.reject_direction(&unit(n, i));
            for b in &out {
                v -= b * b.dot(&v);
            }
            let norm = v.norm();
            if norm > 1e-6 {
                out.push(v / norm);
            }
        }
        out
    }

    /// `n × dim` matrix with the basis as columns.
    pub fn basis_matrix(&self) -> DMatrix<f64> {
        let n = self.ambient_dim();
        let mut m = DMatrix::zeros(n, self.dim());
        for (j, b) in self.basis.iter().enumerate() {
            m.set_column(j, b);
        }
        m
    }

    /// Same point set, possibly with a different base point or basis.
    pub fn same_set(&self, other: &AffineSubspace, tol: f64) -> bool {
        if self.dim() != other.dim() || self.ambient_dim() != other.ambient_dim() {
            return false;
        }
        other.distance(&self.base) < tol
            && self
                .basis
                .iter()
                .all(|b| other.reject_direction(b).norm() < tol)
    }
}

pub fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

/// Modified Gram–Schmidt; vectors whose residual norm falls below `tol` are dropped.
pub fn gram_schmidt(vectors: &[DVector<f64>], tol: f64) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for b in &out {
            w -= b * b.dot(&w);
        }
        let norm = w.norm();
        if norm > tol * v.norm().max(1.0) {
            out.push(w / norm);
        }
    }
    out
}

/// Rotation by `angle` in the `(i, j)` coordinate plane of `R^n`.
pub fn plane_rotation(n: usize, i: usize, j: usize, angle: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(n, n);
    let (s, c) = angle.sin_cos();
    m[(i, i)] = c;
    m[(j, j)] = c;
    m[(i, j)] = -s;
    m[(j, i)] = s;
    m
}
