use serde::Serialize;

use super::GroupBall;
use crate::error::{Error, Result};
use crate::isomcore::Isometry;

#[derive(Debug, Clone, Serialize)]
pub struct CosetIndex {
    pub index: usize,
    pub certified: bool,
    /// Largest translation norm among the chosen coset representatives.
    pub max_representative_norm: f64,
    #[serde(skip)]
    pub representatives: Vec<Isometry>,
}

/// Number of left cosets `g · Sub` met by the ambient ball.
///
/// Ambient elements are visited by increasing translation norm, so each coset
/// is represented by a shortest element. The count is certified when no new
/// coset appeared in the outer half of the ambient ball and every membership
/// test `rep⁻¹ g ∈ Sub` fell inside the sub ball.
pub fn coset_index(ambient: &GroupBall, sub: &GroupBall) -> Result<CosetIndex> {
    if ambient.dim() != sub.dim() {
        return Err(Error::DimensionMismatch {
            expected: ambient.dim(),
            got: sub.dim(),
        });
    }
    let tol = ambient.tol().max(sub.tol());
    for h in sub.elements() {
        if h.translation_norm() <= ambient.radius() && !ambient.contains(h) {
            return Err(Error::MembershipViolation);
        }
    }

    let mut order: Vec<usize> = (0..ambient.len()).collect();
    order.sort_by(|&a, &b| {
        let ga = &ambient.elements()[a];
        let gb = &ambient.elements()[b];
        ga.translation_norm()
            .total_cmp(&gb.translation_norm())
            .then(ambient.word_lengths()[a].cmp(&ambient.word_lengths()[b]))
    });

    let mut reps: Vec<Isometry> = Vec::new();
    let mut rep_inverses: Vec<Isometry> = Vec::new();
    let mut decided = true;
    let mut late_coset = false;
    for &i in &order {
        let g = &ambient.elements()[i];
        let mut placed = false;
        for inv in &rep_inverses {
            let h = inv.compose_unchecked(g);
            if h.translation_norm() > sub.radius() + tol {
                decided = false;
                continue;
            }
            if sub.contains(&h) {
                placed = true;
                break;
            }
        }
        if !placed {
            if g.translation_norm() > 0.5 * ambient.radius() {
                late_coset = true;
            }
            rep_inverses.push(g.inverse());
            reps.push(g.clone());
        }
    }

    let max_representative_norm = reps
        .iter()
        .map(Isometry::translation_norm)
        .fold(0.0, f64::max);
    Ok(CosetIndex {
        index: reps.len(),
        certified: decided && !late_coset && ambient.is_complete() && sub.is_complete(),
        max_representative_norm,
        representatives: reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::groupgen::{enumerate_ball, EnumerateOptions, GroupSpec};

    fn ball(spec: &GroupSpec, r: f64) -> GroupBall {
        enumerate_ball(spec, r, &EnumerateOptions::default()).unwrap()
    }

    #[test]
    fn even_sublattice_has_index_four() {
        let ambient = ball(&fixtures::z_lattice(2), 6.0);
        let sub = ball(&fixtures::scaled_lattice(2, 2.0), 14.0);
        let idx = coset_index(&ambient, &sub).unwrap();
        assert_eq!(idx.index, 4);
        assert!(idx.certified);
        assert!((idx.max_representative_norm - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn same_group_has_index_one() {
        let ambient = ball(&fixtures::wallpaper_p4(), 4.0);
        let sub = ball(&fixtures::wallpaper_p4(), 9.0);
        let idx = coset_index(&ambient, &sub).unwrap();
        assert_eq!(idx.index, 1);
        assert!(idx.certified);
    }

    #[test]
    fn glide_over_translations_has_index_two() {
        let ambient = ball(&fixtures::glide_r2(), 8.0);
        let t = GroupSpec::new(vec![fixtures::glide_element().pow(2)]).unwrap();
        let sub = ball(&t, 20.0);
        let idx = coset_index(&ambient, &sub).unwrap();
        assert_eq!(idx.index, 2);
        assert!(idx.certified);
    }

    #[test]
    fn foreign_subgroup_is_rejected() {
        let ambient = ball(&fixtures::scaled_lattice(2, 2.0), 6.0);
        let sub = ball(&fixtures::z_lattice(2), 6.0);
        assert!(matches!(coset_index(&ambient, &sub), Err(Error::MembershipViolation)));
    }
}
