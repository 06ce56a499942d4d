//! Orthogonal restriction `γ ↦ ort(γ)|_{V⊥}` and simultaneous block
//! decomposition of commuting orthogonal matrices into invariant lines and
//! rotation planes.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::approx_index::MatrixSet;
use crate::error::{Error, Result};
use crate::groupgen::GroupBall;
use crate::isomcore::{AffineSubspace, TAU};

/// `|sin θ|` below which a rotation is treated as the identity direction.
pub const ANGLE_TOL: f64 = 1e-8;

/// Eigenvalues closer than this are clustered together.
const CLUSTER_TOL: f64 = 1e-7;

/// Matrices of `ort(g)` restricted to `V⊥`, in the frame returned by
/// [`AffineSubspace::complement_basis`], deduplicated.
pub fn restrict_orthogonal(ball: &GroupBall, v: &AffineSubspace) -> Result<Vec<DMatrix<f64>>> {
    if !v.is_linear(ball.tol()) {
        return Err(Error::InvalidSubspace("V must pass through the origin".into()));
    }
    if v.ambient_dim() != ball.dim() {
        return Err(Error::DimensionMismatch {
            expected: ball.dim(),
            got: v.ambient_dim(),
        });
    }
    let frame = frame_matrix(&v.complement_basis(), ball.dim());
    let mut set = MatrixSet::new(ball.tol().max(TAU));
    let mut out = Vec::new();
    for g in ball.elements() {
        let m = frame.transpose() * g.ort() * &frame;
        if set.insert(&m).1 {
            out.push(m);
        }
    }
    Ok(out)
}

pub(crate) fn frame_matrix(vectors: &[DVector<f64>], n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockDecomposition {
    pub dim: usize,
    /// Linear blocks, one-dimensional ones first.
    #[serde(serialize_with = "serialize_blocks")]
    pub blocks: Vec<AffineSubspace>,
}

fn serialize_blocks<S: serde::Serializer>(
    blocks: &[AffineSubspace],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(blocks.len()))?;
    for b in blocks {
        seq.serialize_element(&b.to_repr())?;
    }
    seq.end()
}

impl BlockDecomposition {
    /// Largest `‖M q − proj_Q(M q)‖` over blocks, basis vectors, and matrices.
    pub fn invariance_defect(&self, mats: &[DMatrix<f64>]) -> f64 {
        let mut worst: f64 = 0.0;
        for block in &self.blocks {
            for q in block.basis() {
                for m in mats {
                    worst = worst.max(block.reject_direction(&(m * q)).norm());
                }
            }
        }
        worst
    }
}

/// Splits every subspace (columns of an orthonormal frame) into eigenspaces of
/// the symmetric operator `op`, clustering transformed eigenvalues.
fn split_by(
    frames: Vec<DMatrix<f64>>,
    op: &DMatrix<f64>,
    transform: impl Fn(f64) -> f64,
) -> Vec<DMatrix<f64>> {
    let mut out = Vec::new();
    for frame in frames {
        if frame.ncols() <= 1 {
            out.push(frame);
            continue;
        }
        let restricted = frame.transpose() * op * &frame;
        let sym = (&restricted + restricted.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        let vals: Vec<f64> = eig.eigenvalues.iter().map(|&x| transform(x)).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let mut start = 0;
        while start < order.len() {
            let mut end = start + 1;
            while end < order.len() && vals[order[end]] - vals[order[end - 1]] < CLUSTER_TOL {
                end += 1;
            }
            let cols: Vec<DVector<f64>> = order[start..end]
                .iter()
                .map(|&i| &frame * eig.eigenvectors.column(i))
                .collect();
            out.push(frame_matrix(&cols, frame.nrows()));
            start = end;
        }
    }
    out
}

fn antisymmetric(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m - m.transpose()) * 0.5
}

/// Invariant decomposition of `R^d` for a commuting family of orthogonal
/// matrices.
///
/// The family is refined matrix by matrix: first by the symmetric part
/// `(M + Mᵀ)/2` (eigenvalues `cos θ`), then by `AᵀA` for the antisymmetric part
/// `A` (eigenvalues `sin² θ`). Inside each remaining piece every rotating
/// matrix acts as `cos θ + sin θ J`; pieces are split once more by the
/// symmetric products `J₀ᵀ J` so that all complex structures agree up to sign,
/// and then cut into planes `span{u, J₀ u}`.
pub fn simultaneous_block_diagonalize(mats: &[DMatrix<f64>]) -> Result<BlockDecomposition> {
    let d = mats
        .first()
        .map(|m| m.nrows())
        .ok_or_else(|| Error::InvalidArgument("empty matrix family".into()))?;
    for m in mats {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: m.nrows(),
            });
        }
        let defect = crate::isomcore::orthogonality_defect(m);
        if defect > 1e-8 {
            return Err(Error::NotOrthogonal { residual: defect });
        }
    }
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            if (&mats[i] * &mats[j] - &mats[j] * &mats[i]).norm() > 1e-8 {
                return Err(Error::NonCommuting(i, j));
            }
        }
    }

    let mut frames = vec![DMatrix::<f64>::identity(d, d)];
    for m in mats {
        let sym = (m + m.transpose()) * 0.5;
        frames = split_by(frames, &sym, |x| x);
        let a = antisymmetric(m);
        frames = split_by(frames, &(a.transpose() * &a), |x| x.max(0.0).sqrt());
    }

    let mut lines: Vec<AffineSubspace> = Vec::new();
    let mut planes: Vec<AffineSubspace> = Vec::new();
    for frame in frames {
        let k = frame.ncols();
        // complex structures of the matrices that rotate this piece
        let mut structures: Vec<DMatrix<f64>> = Vec::new();
        for m in mats {
            let a = frame.transpose() * antisymmetric(m) * &frame;
            let s = (a.norm_squared() / k as f64).sqrt();
            if s > ANGLE_TOL {
                structures.push(a / s);
            }
        }
        if structures.is_empty() {
            for j in 0..k {
                lines.push(AffineSubspace::linear(vec![frame.column(j).into_owned()])?);
            }
            continue;
        }
        let j0 = structures[0].clone();
        let mut pieces = vec![DMatrix::<f64>::identity(k, k)];
        for j in &structures[1..] {
            let prod = j0.transpose() * j;
            pieces = split_by(pieces, &prod, |x| x);
        }
        for piece in pieces {
            let local_j = piece.transpose() * &j0 * &piece;
            let mut chosen: Vec<DVector<f64>> = Vec::new();
            for c in 0..piece.ncols() {
                if chosen.len() >= piece.ncols() {
                    break;
                }
                let mut u = DVector::<f64>::zeros(piece.ncols());
                u[c] = 1.0;
                for b in &chosen {
                    u -= b * b.dot(&u);
                }
                if u.norm() < 1e-6 {
                    continue;
                }
                u /= u.norm();
                let mut w = &local_j * &u;
                for b in &chosen {
                    w -= b * b.dot(&w);
                }
                w -= &u * u.dot(&w);
                let wn = w.norm();
                if wn < 1e-6 {
                    return Err(Error::Precondition(
                        "rotation piece has no invariant plane through the chosen vector".into(),
                    ));
                }
                w /= wn;
                let to_ambient = |x: &DVector<f64>| &frame * (&piece * x);
                planes.push(AffineSubspace::linear(vec![to_ambient(&u), to_ambient(&w)])?);
                chosen.push(u);
                chosen.push(w);
            }
        }
    }

    let mut blocks = lines;
    blocks.extend(planes);
    let decomp = BlockDecomposition { dim: d, blocks };
    let defect = decomp.invariance_defect(mats);
    if defect > TAU {
        return Err(Error::Precondition(format!(
            "block split is not invariant (defect {defect:.3e})"
        )));
    }
    Ok(decomp)
}
