use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{enumerate_ball, lattice_basis, EnumerateOptions, GroupSpec};
use crate::error::{Error, Result};
use crate::isomcore::{AffineSubspace, Isometry, TAU};

/// A subgroup `G` (by generators) together with an affine subspace `V` on which
/// `G` should act cocompactly by translations.
#[derive(Debug, Clone)]
pub struct TranslationPair {
    pub subgroup_generators: Vec<Isometry>,
    pub v: AffineSubspace,
}

impl TranslationPair {
    pub fn new(subgroup_generators: Vec<Isometry>, v: AffineSubspace) -> Result<Self> {
        if subgroup_generators.is_empty() {
            return Err(Error::InvalidArgument("pair needs at least one generator".into()));
        }
        if let Some(g) = subgroup_generators.iter().find(|g| g.dim() != v.ambient_dim()) {
            return Err(Error::DimensionMismatch {
                expected: v.ambient_dim(),
                got: g.dim(),
            });
        }
        Ok(Self { subgroup_generators, v })
    }

    pub fn subgroup_spec(&self) -> GroupSpec {
        GroupSpec::new(self.subgroup_generators.clone()).expect("validated in new")
    }
}

/// Translation vector of `g` on `V`: `g(base) − base`.
pub fn tran_v(g: &Isometry, v: &AffineSubspace) -> Result<DVector<f64>> {
    tran_v_with_tol(g, v, TAU)
}

pub fn tran_v_with_tol(g: &Isometry, v: &AffineSubspace, tol: f64) -> Result<DVector<f64>> {
    if g.dim() != v.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: v.ambient_dim(),
            got: g.dim(),
        });
    }
    let shift = g.apply(v.base()) - v.base();
    // ort(g) b − b for direction probes, and the part of the shift leaving V
    let mut defect = v.reject_direction(&shift).norm();
    for b in v.basis() {
        defect = defect.max((g.ort() * b - b).norm());
    }
    if defect > tol {
        return Err(Error::NotTranslationOnV { defect });
    }
    Ok(shift)
}

#[derive(Debug, Clone, Serialize)]
pub struct PairReport {
    /// Every enumerated element maps `V` into itself and acts on it by a translation.
    pub acts_by_translation: bool,
    /// `ort(g)` is the identity on the direction space of `V`.
    pub ort_identity_on_direction: bool,
    /// `d(x, V) = d(g x, V)` on random probes.
    pub preserves_distance_to_v: bool,
    /// Cocompactness proxy: rank of the `tran_V` lattice equals `dim V`.
    pub cocompact_proxy: bool,
    pub lattice_rank: usize,
    pub dim_v: usize,
    pub checked_elements: usize,
    pub ball_complete: bool,
    /// Whether each pair generator lies in the ambient group (checked on a ball).
    pub generators_in_group: bool,
    pub note: &'static str,
}

impl PairReport {
    pub fn all_pass(&self) -> bool {
        self.acts_by_translation
            && self.ort_identity_on_direction
            && self.preserves_distance_to_v
            && self.cocompact_proxy
    }
}

const PROBES: usize = 8;

/// Checks the cocompact-translation-pair conditions on the ball of radius `r`
/// of the pair's subgroup.
pub fn verify_translation_pair(
    spec: &GroupSpec,
    pair: &TranslationPair,
    r: f64,
    opts: &EnumerateOptions,
) -> Result<PairReport> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    if spec.dim() != pair.v.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: pair.v.ambient_dim(),
        });
    }
    let tol = opts.tol;
    let ball = enumerate_ball(&pair.subgroup_spec(), r, opts)?;

    let gen_radius = pair
        .subgroup_generators
        .iter()
        .map(Isometry::translation_norm)
        .fold(0.0, f64::max);
    let ambient = enumerate_ball(spec, gen_radius, opts)?;
    let generators_in_group = pair.subgroup_generators.iter().all(|g| ambient.contains(g));

    let v = &pair.v;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let probes: Vec<DVector<f64>> = (0..PROBES)
        .map(|_| DVector::from_fn(v.ambient_dim(), |_, _| rng.gen_range(-10.0..10.0)))
        .collect();

    let mut acts = true;
    let mut ort_id = true;
    let mut dist = true;
    let mut shifts = Vec::new();
    for g in ball.elements() {
        let shift = g.apply(v.base()) - v.base();
        let leaves = v.reject_direction(&shift).norm() > tol;
        let rotates = v.basis().iter().any(|b| (g.ort() * b - b).norm() > tol);
        if leaves || rotates {
            acts = false;
        } else {
            shifts.push(shift);
        }
        if rotates {
            ort_id = false;
        }
        for x in &probes {
            let gx = g.apply(x);
            let scale = 1.0 + gx.norm();
            if (v.distance(x) - v.distance(&gx)).abs() > tol * scale {
                dist = false;
            }
        }
    }
    let lattice_rank = lattice_basis(&shifts).map(|b| b.rank()).unwrap_or(0);

    Ok(PairReport {
        acts_by_translation: acts,
        ort_identity_on_direction: ort_id,
        preserves_distance_to_v: dist,
        cocompact_proxy: lattice_rank == v.dim(),
        lattice_rank,
        dim_v: v.dim(),
        checked_elements: ball.len(),
        ball_complete: ball.is_complete(),
        generators_in_group,
        note: "cocompactness is a proxy: lattice rank of tran_V equals dim V on a finite ball",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::isomcore::unit;
    use nalgebra::dvector;

    #[test]
    fn tran_v_examples() {
        let w = dvector![0.0, 0.0, 2.5];
        let z_axis = AffineSubspace::linear(vec![unit(3, 2)]).unwrap();
        let t = Isometry::translation(w.clone());
        assert!((tran_v(&t, &z_axis).unwrap() - &w).norm() < TAU);

        let screw = fixtures::screw_r3(1.0).generators()[0].clone();
        assert!((tran_v(&screw, &z_axis).unwrap() - unit(3, 2)).norm() < TAU);

        // rotation about the x-axis by pi maps the z-axis to itself but flips it
        let flip = Isometry::linear(crate::isomcore::plane_rotation(3, 1, 2, std::f64::consts::PI)).unwrap();
        assert!(matches!(
            tran_v(&flip, &z_axis),
            Err(Error::NotTranslationOnV { .. })
        ));
    }

    #[test]
    fn screw_pair_on_axis_passes() {
        let spec = fixtures::screw_r3(1.0);
        let pair = TranslationPair::new(
            spec.generators().to_vec(),
            AffineSubspace::linear(vec![unit(3, 2)]).unwrap(),
        )
        .unwrap();
        let rep = verify_translation_pair(&spec, &pair, 6.0, &EnumerateOptions::default()).unwrap();
        assert!(rep.all_pass(), "{rep:?}");
        assert!(rep.generators_in_group);
    }

    #[test]
    fn z2_on_plane_passes() {
        let spec = fixtures::z_lattice(2);
        let pair = TranslationPair::new(spec.generators().to_vec(), AffineSubspace::whole_space(2)).unwrap();
        let rep = verify_translation_pair(&spec, &pair, 4.0, &EnumerateOptions::default()).unwrap();
        assert!(rep.all_pass(), "{rep:?}");
    }

    #[test]
    fn screw_pair_on_x_axis_fails() {
        let spec = fixtures::screw_r3(1.0);
        let pair = TranslationPair::new(
            spec.generators().to_vec(),
            AffineSubspace::linear(vec![unit(3, 0)]).unwrap(),
        )
        .unwrap();
        let rep = verify_translation_pair(&spec, &pair, 6.0, &EnumerateOptions::default()).unwrap();
        assert!(!rep.acts_by_translation);
        assert!(!rep.all_pass());
    }
}
