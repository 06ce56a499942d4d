//! Conjugation of a discrete group by a linear conformal map `A = λ A′`.
//!
//! `θ_A(g) = A g A⁻¹` is a homomorphism, so `AΓA⁻¹ ⊂ Γ` holds as soon as the
//! conjugate of every generator lies in `Γ`. Membership is decided on a ball
//! of `Γ`; a miss on an incomplete ball is reported as inconclusive, never as
//! a failure.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groupgen::{
    coset_index, enumerate_ball, lattice_basis, translation_subgroup, tran_v_with_tol,
    verify_translation_pair, CosetIndex, EnumerateOptions, GroupSpec, TranslationPair,
};
use crate::growth::{estimate_dimension, growth_profile, CountKind, DimensionEstimate};
use crate::isomcore::{power_near_identity, AffineSubspace, ConformalMap, Isometry};

/// Residual below which an affine combination counts as hitting the origin.
pub const AFFINE_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConjugationStatus {
    Subset,
    Equal,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct ConjugationVerdict {
    pub status: ConjugationStatus,
    /// Generator whose conjugate was not found in the group.
    pub witness: Option<Isometry>,
    pub witness_index: Option<usize>,
    pub checked_radius: f64,
    pub ball_complete: bool,
}

impl ConjugationVerdict {
    pub fn is_invariant(&self) -> bool {
        matches!(self.status, ConjugationStatus::Subset | ConjugationStatus::Equal)
    }
}

fn check_dims(a: &ConformalMap, spec: &GroupSpec) -> Result<()> {
    if a.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: a.dim(),
        });
    }
    Ok(())
}

/// Generators conjugated by `a`.
pub fn conjugated_spec(a: &ConformalMap, spec: &GroupSpec) -> Result<GroupSpec> {
    check_dims(a, spec)?;
    GroupSpec::new(
        spec.generators()
            .iter()
            .map(|g| a.conjugate(g))
            .collect::<Result<_>>()?,
    )
}

/// Smallest radius that holds the conjugates of all generators.
pub fn required_radius(a: &ConformalMap, spec: &GroupSpec) -> f64 {
    let m = spec.max_generator_norm();
    (a.scale() * m).max(m / a.scale())
}

/// Decides `AΓA⁻¹ ⊂ Γ` and `AΓA⁻¹ = Γ` on the ball of radius `r`.
pub fn check_conjugation_invariance(
    a: &ConformalMap,
    spec: &GroupSpec,
    r: f64,
    opts: &EnumerateOptions,
) -> Result<ConjugationVerdict> {
    check_dims(a, spec)?;
    let forward_need = a.scale() * spec.max_generator_norm();
    if r + opts.tol < forward_need {
        return Err(Error::Precondition(format!(
            "radius {r} cannot hold conjugated generators (need {forward_need})"
        )));
    }
    let r = r.max(spec.max_generator_norm() / a.scale());
    let ball = enumerate_ball(spec, r, opts)?;

    let inv = a.inverse();
    let mut verdict = ConjugationVerdict {
        status: ConjugationStatus::Subset,
        witness: None,
        witness_index: None,
        checked_radius: r,
        ball_complete: ball.is_complete(),
    };
    for (i, g) in spec.generators().iter().enumerate() {
        if !ball.contains(&a.conjugate(g)?) {
            verdict.status = if ball.is_complete() {
                ConjugationStatus::Fails
            } else {
                ConjugationStatus::Inconclusive
            };
            verdict.witness = Some(g.clone());
            verdict.witness_index = Some(i);
            return Ok(verdict);
        }
    }
    let mut reverse = true;
    for g in spec.generators() {
        if !ball.contains(&inv.conjugate(g)?) {
            reverse = false;
            break;
        }
    }
    if reverse {
        verdict.status = ConjugationStatus::Equal;
    } else if !ball.is_complete() {
        verdict.status = ConjugationStatus::Inconclusive;
    }
    Ok(verdict)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugationIndex {
    pub index: usize,
    pub certified: bool,
    pub status: ConjugationStatus,
}

/// `[Γ : AΓA⁻¹]`, counted as cosets on the ball of radius `r`.
pub fn conjugation_index(
    a: &ConformalMap,
    spec: &GroupSpec,
    r: f64,
    opts: &EnumerateOptions,
) -> Result<ConjugationIndex> {
    let r = r.max(required_radius(a, spec));
    let verdict = check_conjugation_invariance(a, spec, r, opts)?;
    match verdict.status {
        ConjugationStatus::Equal => {
            return Ok(ConjugationIndex {
                index: 1,
                certified: verdict.ball_complete,
                status: verdict.status,
            })
        }
        ConjugationStatus::Subset => {}
        _ => {
            return Err(Error::Precondition(format!(
                "conjugation invariance does not hold ({:?})",
                verdict.status
            )))
        }
    }
    let idx = index_of_subgroup(spec, &conjugated_spec(a, spec)?, r, opts)?;
    Ok(ConjugationIndex {
        index: idx.index,
        certified: idx.certified,
        status: verdict.status,
    })
}

/// `[A⁻¹ΓA : Γ]`, which should agree with [`conjugation_index`].
pub fn reverse_conjugation_index(
    a: &ConformalMap,
    spec: &GroupSpec,
    r: f64,
    opts: &EnumerateOptions,
) -> Result<CosetIndex> {
    let r = r.max(required_radius(a, spec));
    let bigger = conjugated_spec(&a.inverse(), spec)?;
    index_of_subgroup(&bigger, spec, r, opts)
}

fn index_of_subgroup(
    ambient: &GroupSpec,
    sub: &GroupSpec,
    r: f64,
    opts: &EnumerateOptions,
) -> Result<CosetIndex> {
    let ambient_ball = enumerate_ball(ambient, r, opts)?;
    let sub_ball = enumerate_ball(sub, 2.0 * r, opts)?;
    coset_index(&ambient_ball, &sub_ball)
}

#[derive(Debug, Clone)]
pub enum Linearization {
    Linearized {
        pair: TranslationPair,
        /// Number of iterates `A^m v₀` used.
        m: usize,
        /// Affine coefficients with `Σ aᵢ = 1` and `Σ aᵢ A^i v₀ = 0`.
        coefficients: Vec<f64>,
        /// Generators of the intersected subgroup are a heuristic selection.
        heuristic_generators: bool,
    },
    Inconclusive {
        reason: String,
    },
}

/// Least-squares affine coefficients `a` with `Σ aᵢ = 1`, `Σ aᵢ pᵢ = 0`.
pub fn affine_zero_combination(points: &[DVector<f64>]) -> Option<(Vec<f64>, f64)> {
    let n = points.first()?.len();
    let k = points.len();
    let mut m = DMatrix::zeros(n + 1, k);
    for (j, p) in points.iter().enumerate() {
        for i in 0..n {
            m[(i, j)] = p[i];
        }
        m[(n, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(n + 1);
    rhs[n] = 1.0;
    let svd = m.clone().svd(true, true);
    let a = svd.solve(&rhs, 1e-12).ok()?;
    let residual = (&m * &a - &rhs).norm();
    Some((a.iter().copied().collect(), residual))
}

/// Replaces `(G, V)` by a pair with `V′` linear and `A V′ = V′`, following the
/// iterate construction `v_m = A^m v₀` on the orthogonal complement of `V`.
pub fn linearize_pair(
    a: &ConformalMap,
    pair: &TranslationPair,
    spec: &GroupSpec,
    m_max: usize,
    opts: &EnumerateOptions,
) -> Result<Linearization> {
    if !a.is_expanding() {
        return Err(Error::Precondition(format!(
            "linearization needs an expanding map, scale is {}",
            a.scale()
        )));
    }
    check_dims(a, spec)?;
    let tol = opts.tol;
    let verdict = check_conjugation_invariance(a, spec, required_radius(a, spec), opts)?;
    if !verdict.is_invariant() {
        return Err(Error::Precondition(format!(
            "conjugation invariance does not hold ({:?})",
            verdict.status
        )));
    }
    let gen_norm = pair
        .subgroup_generators
        .iter()
        .map(Isometry::translation_norm)
        .fold(0.0, f64::max);
    let pair_report = verify_translation_pair(spec, pair, (2.0 * gen_norm).max(1.0), opts)?;
    if !pair_report.acts_by_translation {
        return Err(Error::Precondition("pair does not act on V by translations".into()));
    }

    let v = &pair.v;
    let direction = v.direction_space();
    for b in v.basis() {
        let image = a.apply(b);
        if direction.reject_direction(&image).norm() > tol * a.scale().max(1.0) * 10.0 {
            return Ok(Linearization::Inconclusive {
                reason: "A does not preserve the direction space of V".into(),
            });
        }
    }

    let v0 = v.reject_direction(v.base());
    let mut points = vec![v0.clone()];
    let mut found = None;
    for m in 0..=m_max {
        if m > 0 {
            let next = a.apply(points.last().expect("non-empty"));
            points.push(next);
        }
        if let Some((coef, residual)) = affine_zero_combination(&points) {
            if residual < AFFINE_RESIDUAL {
                found = Some((m, coef));
                break;
            }
        }
    }
    let Some((m, coefficients)) = found else {
        return Ok(Linearization::Inconclusive {
            reason: format!("no affine combination of A^i v0 reaches 0 for m <= {m_max}"),
        });
    };

    let linear_v = direction;
    if m == 0 {
        return Ok(Linearization::Linearized {
            pair: TranslationPair::new(pair.subgroup_generators.clone(), linear_v)?,
            m,
            coefficients,
            heuristic_generators: false,
        });
    }

    // G ∩ AGA⁻¹ ∩ … ∩ A^m G A^{-m}: g survives when θ_{A^{-i}}(g) ∈ G for all i
    let radius = 2.0 * a.scale().powi(m as i32) * gen_norm + gen_norm;
    let ball = enumerate_ball(&pair.subgroup_spec(), radius, opts)?;
    let inverse_powers: Vec<ConformalMap> = (1..=m).map(|i| a.inverse().pow(i as u32)).collect();
    let mut survivors: Vec<(usize, usize)> = Vec::new();
    for (idx, g) in ball.elements().iter().enumerate() {
        if g.is_identity(tol) {
            continue;
        }
        let mut keep = true;
        for p in &inverse_powers {
            if !ball.contains(&p.conjugate(g)?) {
                keep = false;
                break;
            }
        }
        if keep && tran_v_with_tol(g, &linear_v, tol * (1.0 + g.translation_norm())).is_ok() {
            survivors.push((idx, ball.word_lengths()[idx]));
        }
    }
    survivors.sort_by_key(|&(idx, w)| (w, (ball.elements()[idx].translation_norm() * 1e6) as i64));

    // shortest words whose translation vectors span V
    let target = linear_v.dim();
    let mut cutoff = None;
    for &(_, w) in &survivors {
        let shifts: Vec<DVector<f64>> = survivors
            .iter()
            .filter(|&&(_, w2)| w2 <= w)
            .map(|&(i, _)| ball.elements()[i].tran().clone())
            .collect();
        if lattice_basis(&shifts).map(|b| b.rank()).unwrap_or(0) >= target {
            cutoff = Some(w);
            break;
        }
    }
    let Some(cutoff) = cutoff else {
        return Ok(Linearization::Inconclusive {
            reason: "intersected subgroup has too few elements in the explored ball".into(),
        });
    };
    let generators: Vec<Isometry> = survivors
        .iter()
        .filter(|&&(_, w)| w <= cutoff)
        .map(|&(i, _)| ball.elements()[i].clone())
        .collect();
    Ok(Linearization::Linearized {
        pair: TranslationPair::new(generators, linear_v)?,
        m,
        coefficients,
        heuristic_generators: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TheoremStatus {
    Verified,
    Refuted,
    NotApplicable,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub status: TheoremStatus,
    pub verdict: Option<ConjugationVerdict>,
    /// Rank of the translation lattice (`dim Γ_T`).
    pub translation_rank: Option<usize>,
    pub dimension: Option<DimensionEstimate>,
    pub ball_complete: bool,
    /// Smallest power with `‖A′^m − I‖_F < 0.1`, up to 10⁴.
    pub near_identity_power: Option<u64>,
}

/// Compares `dim Γ_T` with the growth dimension for an expanding `A` with
/// `AΓA⁻¹ ⊂ Γ`; the two are expected to agree.
pub fn verify_translation_dim_theorem(
    spec: &GroupSpec,
    a: &ConformalMap,
    radii: &[f64],
    opts: &EnumerateOptions,
) -> Result<TheoremReport> {
    check_dims(a, spec)?;
    let near_identity_power = power_near_identity(a.rot(), 0.1, 10_000)?;
    let mut report = TheoremReport {
        status: TheoremStatus::NotApplicable,
        verdict: None,
        translation_rank: None,
        dimension: None,
        ball_complete: false,
        near_identity_power,
    };
    if !a.is_expanding() {
        return Ok(report);
    }
    let verdict = check_conjugation_invariance(a, spec, required_radius(a, spec), opts)?;
    let status = verdict.status;
    report.verdict = Some(verdict);
    match status {
        ConjugationStatus::Fails => return Ok(report),
        ConjugationStatus::Inconclusive => {
            report.status = TheoremStatus::Inconclusive;
            return Ok(report);
        }
        _ => {}
    }

    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let ball = enumerate_ball(spec, r_max, opts)?;
    let profile = growth_profile(&ball, radii, None)?;
    let est = estimate_dimension(&profile, CountKind::N)?;
    let rank = lattice_basis(&translation_subgroup(&ball))?.rank();
    report.translation_rank = Some(rank);
    report.dimension = Some(est);
    report.ball_complete = ball.is_complete();
    report.status = if rank == est.k_hat {
        TheoremStatus::Verified
    } else if ball.is_complete() && !est.warning {
        TheoremStatus::Refuted
    } else {
        TheoremStatus::Inconclusive
    };
    Ok(report)
}

/// Basis probes for `A V = V`; returns the largest defect.
pub fn invariance_defect(a: &ConformalMap, v: &AffineSubspace) -> f64 {
    v.basis()
        .iter()
        .map(|b| v.reject_direction(&a.apply(b)).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::isomcore::{plane_rotation, unit};
    use nalgebra::dvector;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn opts() -> EnumerateOptions {
        EnumerateOptions::default()
    }

    #[test]
    fn z2_scaling_is_subset_only() {
        let a = ConformalMap::scaling(2, 2.0).unwrap();
        let v = check_conjugation_invariance(&a, &fixtures::z_lattice(2), 4.0, &opts()).unwrap();
        assert_eq!(v.status, ConjugationStatus::Subset);
    }

    #[test]
    fn z2_quarter_turn_is_equal() {
        let a = ConformalMap::new(1.0, plane_rotation(2, 0, 1, FRAC_PI_2)).unwrap();
        let v = check_conjugation_invariance(&a, &fixtures::z_lattice(2), 2.0, &opts()).unwrap();
        assert_eq!(v.status, ConjugationStatus::Equal);
        let idx = conjugation_index(&a, &fixtures::z_lattice(2), 4.0, &opts()).unwrap();
        assert_eq!(idx.index, 1);
    }

    #[test]
    fn screw_scaling_fails_with_generator_witness() {
        let spec = fixtures::screw_r3(1.0);
        let a = ConformalMap::scaling(3, 2.0).unwrap();
        let v = check_conjugation_invariance(&a, &spec, 4.0, &opts()).unwrap();
        assert_eq!(v.status, ConjugationStatus::Fails);
        assert_eq!(v.witness_index, Some(0));
        assert!(v.witness.unwrap().approx_eq(&spec.generators()[0], 1e-12));
    }

    #[test]
    fn radius_too_small_is_rejected() {
        let a = ConformalMap::scaling(2, 2.0).unwrap();
        assert!(check_conjugation_invariance(&a, &fixtures::z_lattice(2), 1.0, &opts()).is_err());
    }

    #[test]
    fn z2_indices() {
        let z2 = fixtures::z_lattice(2);
        let a = ConformalMap::scaling(2, 2.0).unwrap();
        let idx = conjugation_index(&a, &z2, 6.0, &opts()).unwrap();
        assert_eq!((idx.index, idx.certified), (4, true));

        let b = ConformalMap::new(2f64.sqrt(), plane_rotation(2, 0, 1, FRAC_PI_4)).unwrap();
        let idx = conjugation_index(&b, &z2, 6.0, &opts()).unwrap();
        assert_eq!(idx.index, 2);

        let rev = reverse_conjugation_index(&a, &z2, 6.0, &opts()).unwrap();
        assert_eq!(rev.index, 4);
    }

    #[test]
    fn index_requires_invariance() {
        let a = ConformalMap::scaling(3, 2.0).unwrap();
        assert!(conjugation_index(&a, &fixtures::screw_r3(1.0), 6.0, &opts()).is_err());
    }

    #[test]
    fn affine_combination_of_two_points() {
        let (a, res) = affine_zero_combination(&[dvector![1.0, 0.0], dvector![2.0, 0.0]]).unwrap();
        assert!(res < 1e-12);
        assert!((a[0] - 2.0).abs() < 1e-9 && (a[1] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn linear_pair_is_unchanged() {
        let spec = fixtures::z_axis_translations();
        let pair = TranslationPair::new(
            spec.generators().to_vec(),
            AffineSubspace::linear(vec![unit(3, 2)]).unwrap(),
        )
        .unwrap();
        let a = ConformalMap::scaling(3, 2.0).unwrap();
        match linearize_pair(&a, &pair, &spec, 6, &opts()).unwrap() {
            Linearization::Linearized { pair: out, m, coefficients, .. } => {
                assert_eq!(m, 0);
                assert!((coefficients[0] - 1.0).abs() < 1e-12);
                assert_eq!(out.subgroup_generators.len(), 1);
                assert!(out.v.same_set(&pair.v, 1e-12));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shifted_axis_linearizes_in_one_step() {
        let spec = fixtures::z_axis_translations();
        let v = AffineSubspace::new(unit(3, 0), vec![unit(3, 2)]).unwrap();
        let pair = TranslationPair::new(spec.generators().to_vec(), v).unwrap();
        let a = ConformalMap::scaling(3, 2.0).unwrap();
        match linearize_pair(&a, &pair, &spec, 6, &opts()).unwrap() {
            Linearization::Linearized { pair: out, m, coefficients, .. } => {
                assert_eq!(m, 1);
                assert!((coefficients[0] - 2.0).abs() < 1e-9);
                assert!((coefficients[1] + 1.0).abs() < 1e-9);
                assert!(out.v.is_linear(1e-12));
                assert!(invariance_defect(&a, &out.v) < 1e-9);
                for g in &out.subgroup_generators {
                    let t = tran_v_with_tol(g, &out.v, 1e-9).unwrap();
                    assert!((t.norm() - 2.0).abs() < 1e-9, "{t:?}");
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rotating_expansion_needs_more_iterates() {
        let spec = fixtures::z_axis_translations();
        let v = AffineSubspace::new(unit(3, 0), vec![unit(3, 2)]).unwrap();
        let pair = TranslationPair::new(spec.generators().to_vec(), v).unwrap();
        let a = ConformalMap::new(2.0, plane_rotation(3, 0, 1, FRAC_PI_2)).unwrap();
        match linearize_pair(&a, &pair, &spec, 6, &opts()).unwrap() {
            Linearization::Linearized { pair: out, m, coefficients, .. } => {
                assert!(m <= 4);
                assert_eq!(m, 2);
                assert!((coefficients[0] - 0.8).abs() < 1e-9);
                assert!((coefficients[2] - 0.2).abs() < 1e-9);
                assert!(out.v.is_linear(1e-12));
                assert!(out
                    .v
                    .same_set(&AffineSubspace::linear(vec![unit(3, 2)]).unwrap(), 1e-12));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn linearization_requires_expanding_map() {
        let spec = fixtures::z_axis_translations();
        let pair = TranslationPair::new(
            spec.generators().to_vec(),
            AffineSubspace::linear(vec![unit(3, 2)]).unwrap(),
        )
        .unwrap();
        let a = ConformalMap::scaling(3, 1.0).unwrap();
        assert!(linearize_pair(&a, &pair, &spec, 6, &opts()).is_err());
    }

    #[test]
    fn theorem_fixtures() {
        let radii = [8.0, 16.0, 32.0, 64.0];
        let a = ConformalMap::scaling(2, 2.0).unwrap();
        let rep = verify_translation_dim_theorem(&fixtures::z_lattice(2), &a, &radii, &opts()).unwrap();
        assert_eq!(rep.status, TheoremStatus::Verified);
        assert_eq!(rep.translation_rank, Some(2));

        let a3 = ConformalMap::scaling(3, 2.0).unwrap();
        let rep = verify_translation_dim_theorem(&fixtures::screw_r3(1.0), &a3, &radii, &opts()).unwrap();
        assert_eq!(rep.status, TheoremStatus::NotApplicable);
        assert_eq!(rep.verdict.unwrap().status, ConjugationStatus::Fails);

        let a = ConformalMap::scaling(2, 3.0).unwrap();
        let rep = verify_translation_dim_theorem(&fixtures::glide_r2(), &a, &radii, &opts()).unwrap();
        assert_eq!(rep.status, TheoremStatus::Verified);
        assert_eq!(rep.translation_rank, Some(1));
        assert_eq!(rep.dimension.unwrap().k_hat, 1);
    }
}
