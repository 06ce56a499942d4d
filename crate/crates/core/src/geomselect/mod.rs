//! Geometric selection: invariant block decomposition of the orthogonal parts
//! on `V⊥`, choice of mutually orthogonal half-lines, sphere avoidance points,
//! and the path-length bounds built from them.

mod blocks;
mod length;
mod sphere;

pub use blocks::{restrict_orthogonal, simultaneous_block_diagonalize, BlockDecomposition, ANGLE_TOL};
pub use length::{avoidance_length_bound, brute_force_min_connection, crossing_radius, length_lower_bound};
pub use sphere::{
    avoidance_score, fibonacci_sphere, sphere_avoidance_point, sphere_distance, sphere_grid, AvoidancePoint,
};

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groupgen::GroupBall;
use crate::isomcore::{AffineSubspace, TAU};

/// Ray `[0, ∞) · direction` from the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLine {
    direction: DVector<f64>,
}

impl HalfLine {
    /// Requires a unit vector (within `τ`).
    pub fn new(direction: DVector<f64>) -> Result<Self> {
        let n = direction.norm();
        if (n - 1.0).abs() > TAU {
            return Err(Error::InvalidArgument(format!("half-line direction must be a unit vector, norm {n}")));
        }
        Ok(Self { direction })
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    pub fn direction(&self) -> &DVector<f64> {
        &self.direction
    }

    pub fn point(&self, t: f64) -> DVector<f64> {
        &self.direction * t
    }

    /// Maps a half-line given in the coordinates of an orthonormal frame (for
    /// instance [`AffineSubspace::complement_basis`]) to ambient coordinates.
    pub fn embed(&self, frame: &[DVector<f64>]) -> Result<HalfLine> {
        if frame.len() != self.dim() || frame.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: frame.len(),
            });
        }
        let mut out = DVector::zeros(frame[0].len());
        for (c, f) in self.direction.iter().zip(frame) {
            out += f * *c;
        }
        let n = out.norm();
        HalfLine::new(out / n)
    }
}

impl Serialize for HalfLine {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.direction.iter())
    }
}

/// First basis vector of the first block and of the second block.
pub fn select_orthogonal_halflines(decomp: &BlockDecomposition) -> Result<(HalfLine, HalfLine)> {
    if decomp.blocks.len() < 2 {
        return Err(Error::Precondition(
            "only one invariant block: no pair of orthogonal half-lines (needs k < n - 2)".into(),
        ));
    }
    let l1 = HalfLine::new(decomp.blocks[0].basis()[0].clone())?;
    let l2 = HalfLine::new(decomp.blocks[1].basis()[0].clone())?;
    Ok((l1, l2))
}

/// Result of the selection pipeline on a ball and a linear `V`.
#[derive(Debug, Clone, Serialize)]
pub struct LineSelection {
    pub block_dims: Vec<usize>,
    pub distinct_orthogonal_parts: usize,
    /// Half-lines in ambient coordinates.
    pub l1: HalfLine,
    pub l2: HalfLine,
    /// `max_γ |⟨L1, ort(γ) L2⟩|` over the ball.
    pub max_inner_product: f64,
    pub invariance_defect: f64,
}

/// Restricts the ball to `V⊥`, splits it into invariant blocks and picks two
/// orthogonal half-lines.
pub fn select_lines(ball: &GroupBall, v: &AffineSubspace) -> Result<LineSelection> {
    let mats = restrict_orthogonal(ball, v)?;
    let decomp = simultaneous_block_diagonalize(&mats)?;
    let (local1, local2) = select_orthogonal_halflines(&decomp)?;
    let frame = v.complement_basis();
    let l1 = local1.embed(&frame)?;
    let l2 = local2.embed(&frame)?;
    let max_inner_product = ball
        .elements()
        .iter()
        .map(|g| l1.direction().dot(&(g.ort() * l2.direction())).abs())
        .fold(0.0, f64::max);
    Ok(LineSelection {
        block_dims: decomp.blocks.iter().map(AffineSubspace::dim).collect(),
        distinct_orthogonal_parts: mats.len(),
        invariance_defect: decomp.invariance_defect(&mats),
        l1,
        l2,
        max_inner_product,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::groupgen::{enumerate_ball, EnumerateOptions};
    use crate::isomcore::{plane_rotation, unit};
    use nalgebra::DMatrix;

    #[test]
    fn screw_r4_selects_axis_and_plane() {
        let ball = enumerate_ball(&fixtures::screw_r4(1.0), 12.0, &EnumerateOptions::default()).unwrap();
        let v = AffineSubspace::linear(vec![unit(4, 3)]).unwrap();
        let sel = select_lines(&ball, &v).unwrap();
        assert_eq!(sel.block_dims, vec![1, 2]);
        assert!((sel.l1.direction()[2].abs() - 1.0).abs() < 1e-12);
        assert!(sel.l2.direction()[2].abs() < 1e-12 && sel.l2.direction()[3].abs() < 1e-12);
        assert!(sel.max_inner_product < 1e-9);
    }

    #[test]
    fn identity_family_gives_coordinate_rays() {
        let d = simultaneous_block_diagonalize(&[DMatrix::identity(3, 3)]).unwrap();
        let (a, b) = select_orthogonal_halflines(&d).unwrap();
        assert!(a.direction().dot(b.direction()).abs() < 1e-12);
    }

    #[test]
    fn single_plane_has_no_selection() {
        let d = simultaneous_block_diagonalize(&[plane_rotation(2, 0, 1, 0.5)]).unwrap();
        assert!(matches!(select_orthogonal_halflines(&d), Err(Error::Precondition(_))));
    }

    #[test]
    fn halfline_requires_unit_direction() {
        assert!(HalfLine::new(DVector::from_vec(vec![1.0, 1.0])).is_err());
        let h = HalfLine::new(unit(2, 1)).unwrap();
        let frame = vec![unit(3, 0), unit(3, 2)];
        assert_eq!(h.embed(&frame).unwrap().direction(), &unit(3, 2));
    }
}
