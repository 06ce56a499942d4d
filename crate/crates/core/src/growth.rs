//! Growth functions of a group ball.
//!
//! * `N(r)`: elements with `|tran| ≤ r`
//! * `Λ(r)`: distinct orthogonal parts among them
//! * `N^V(r)`, `Λ^V(r)`: the same, measured with `|tran_V|` for a translation
//!   pair `(G, V)`
//!
//! Profiles keep the sorted norms behind each count, so they can be evaluated
//! at any radius up to the range the source ball supports.

use std::io::Write;

use serde::Serialize;

use crate::approx_index::MatrixSet;
use crate::error::{Error, Result};
use crate::groupgen::{tran_v_with_tol, GroupBall};
use crate::isomcore::AffineSubspace;

/// RMS log-log residual above which a dimension estimate is flagged.
pub const RESIDUAL_WARNING: f64 = 0.2;

/// Dyadic default grid.
pub const DEFAULT_RADII: [f64; 4] = [8.0, 16.0, 32.0, 64.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CountKind {
    N,
    NV,
    Lambda,
    LambdaV,
}

#[derive(Debug, Clone)]
struct StepCounts {
    n: Vec<f64>,
    lambda: Vec<f64>,
    translations: Vec<f64>,
    nv: Option<Vec<f64>>,
    lambda_v: Option<Vec<f64>>,
    valid_to: f64,
    valid_v_to: f64,
    tol: f64,
}

fn count_le(sorted: &[f64], r: f64, tol: f64) -> usize {
    sorted.partition_point(|&x| x <= r + tol)
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthProfile {
    pub dim: usize,
    pub radii: Vec<f64>,
    pub counts_n: Vec<usize>,
    pub counts_lambda: Vec<usize>,
    pub counts_nv: Option<Vec<usize>>,
    pub counts_lambda_v: Option<Vec<usize>>,
    /// Whether the source ball was complete; counts from an incomplete ball
    /// are lower bounds only.
    pub complete: bool,
    #[serde(skip)]
    steps: StepCounts,
}

impl GrowthProfile {
    fn check(&self, r: f64, limit: f64) -> Result<()> {
        if r > limit + self.steps.tol {
            return Err(Error::InsufficientHeadroom {
                needed: r,
                available: limit,
            });
        }
        Ok(())
    }

    /// Largest radius at which `N` and `Λ` are exact.
    pub fn valid_radius(&self) -> f64 {
        self.steps.valid_to
    }

    pub fn n_at(&self, r: f64) -> Result<usize> {
        self.check(r, self.steps.valid_to)?;
        Ok(count_le(&self.steps.n, r, self.steps.tol))
    }

    pub fn lambda_at(&self, r: f64) -> Result<usize> {
        self.check(r, self.steps.valid_to)?;
        Ok(count_le(&self.steps.lambda, r, self.steps.tol))
    }

    /// `N_{Γ_T}(r)`, counting the identity.
    pub fn translations_at(&self, r: f64) -> Result<usize> {
        self.check(r, self.steps.valid_to)?;
        Ok(count_le(&self.steps.translations, r, self.steps.tol))
    }

    pub fn nv_at(&self, r: f64) -> Result<Option<usize>> {
        let Some(nv) = &self.steps.nv else { return Ok(None) };
        self.check(r, self.steps.valid_v_to)?;
        Ok(Some(count_le(nv, r, self.steps.tol)))
    }

    pub fn lambda_v_at(&self, r: f64) -> Result<Option<usize>> {
        let Some(lv) = &self.steps.lambda_v else { return Ok(None) };
        self.check(r, self.steps.valid_v_to)?;
        Ok(Some(count_le(lv, r, self.steps.tol)))
    }

    pub fn counts(&self, kind: CountKind) -> Option<&[usize]> {
        match kind {
            CountKind::N => Some(&self.counts_n),
            CountKind::Lambda => Some(&self.counts_lambda),
            CountKind::NV => self.counts_nv.as_deref(),
            CountKind::LambdaV => self.counts_lambda_v.as_deref(),
        }
    }

    /// Takes the `N_V` and `Λ_V` columns from the profile of a subgroup
    /// evaluated at the same radii.
    pub fn merge_subspace_counts(&mut self, sub: &GrowthProfile) -> Result<()> {
        if sub.radii != self.radii {
            return Err(Error::InvalidArgument("profiles use different radii".into()));
        }
        if sub.counts_nv.is_none() {
            return Err(Error::Precondition("subgroup profile has no V counts".into()));
        }
        self.counts_nv = sub.counts_nv.clone();
        self.counts_lambda_v = sub.counts_lambda_v.clone();
        Ok(())
    }

    /// CSV with header `r,N,Lambda,NV,LambdaV`; the V columns are empty when no
    /// subspace was supplied.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["r", "N", "Lambda", "NV", "LambdaV"])?;
        for i in 0..self.radii.len() {
            let opt = |v: &Option<Vec<usize>>| v.as_ref().map(|c| c[i].to_string()).unwrap_or_default();
            out.write_record([
                self.radii[i].to_string(),
                self.counts_n[i].to_string(),
                self.counts_lambda[i].to_string(),
                opt(&self.counts_nv),
                opt(&self.counts_lambda_v),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// First-appearance norms of each distinct orthogonal part, ordered by `key`.
fn lambda_norms(ball: &GroupBall, keys: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
    let mut seen = MatrixSet::new(ball.tol());
    let mut out = Vec::new();
    for i in order {
        if seen.insert(ball.elements()[i].ort()).1 {
            out.push(keys[i]);
        }
    }
    out
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

pub fn growth_profile(
    ball: &GroupBall,
    radii: &[f64],
    v: Option<&AffineSubspace>,
) -> Result<GrowthProfile> {
    let tol = ball.tol();
    let norms: Vec<f64> = ball.elements().iter().map(|g| g.translation_norm()).collect();
    let translations = sorted(
        ball.elements()
            .iter()
            .filter(|g| g.is_translation(tol))
            .map(|g| g.translation_norm())
            .collect(),
    );
    let lambda = lambda_norms(ball, &norms);

    let (nv, lambda_v, valid_v_to) = match v {
        Some(v) => {
            let mut v_norms = Vec::with_capacity(ball.len());
            for g in ball.elements() {
                v_norms.push(tran_v_with_tol(g, v, tol)?.norm());
            }
            let slack = 2.0 * v.distance(&nalgebra::DVector::zeros(v.ambient_dim()));
            let lv = lambda_norms(ball, &v_norms);
            (Some(sorted(v_norms)), Some(lv), ball.radius() - slack)
        }
        None => (None, None, f64::NEG_INFINITY),
    };

    let steps = StepCounts {
        n: sorted(norms),
        lambda,
        translations,
        nv,
        lambda_v,
        valid_to: ball.radius(),
        valid_v_to,
        tol,
    };

    let mut profile = GrowthProfile {
        dim: ball.dim(),
        radii: radii.to_vec(),
        counts_n: Vec::with_capacity(radii.len()),
        counts_lambda: Vec::with_capacity(radii.len()),
        counts_nv: v.map(|_| Vec::with_capacity(radii.len())),
        counts_lambda_v: v.map(|_| Vec::with_capacity(radii.len())),
        complete: ball.is_complete(),
        steps,
    };
    for &r in radii {
        if r > ball.radius() + tol {
            return Err(Error::RadiusTooLarge {
                requested: r,
                available: ball.radius(),
            });
        }
        let n = profile.n_at(r)?;
        let l = profile.lambda_at(r)?;
        profile.counts_n.push(n);
        profile.counts_lambda.push(l);
        if v.is_some() {
            let nv = profile.nv_at(r).map_err(|_| Error::RadiusTooLarge {
                requested: r,
                available: profile.steps.valid_v_to,
            })?;
            let lv = profile.lambda_v_at(r)?;
            profile.counts_nv.as_mut().expect("set").push(nv.expect("v given"));
            profile.counts_lambda_v.as_mut().expect("set").push(lv.expect("v given"));
        }
    }
    Ok(profile)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub k_hat: usize,
    pub slope: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    pub warning: bool,
}

/// Least-squares slope of `log count` against `log r`.
pub fn loglog_slope(radii: &[f64], counts: &[usize]) -> Result<(f64, f64)> {
    if radii.len() != counts.len() {
        return Err(Error::InvalidArgument("radii and counts differ in length".into()));
    }
    for (&r, &c) in radii.iter().zip(counts) {
        if c == 0 || r <= 0.0 {
            return Err(Error::ZeroCount { radius: r });
        }
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok((slope, (rss / m).sqrt()))
}

pub fn estimate_dimension(profile: &GrowthProfile, kind: CountKind) -> Result<DimensionEstimate> {
    estimate_dimension_with_threshold(profile, kind, RESIDUAL_WARNING)
}

pub fn estimate_dimension_with_threshold(
    profile: &GrowthProfile,
    kind: CountKind,
    warn_above: f64,
) -> Result<DimensionEstimate> {
    let counts = profile
        .counts(kind)
        .ok_or_else(|| Error::Precondition(format!("profile has no {kind:?} counts")))?;
    let radii = &profile.radii;
    if radii.len() < 4 {
        return Err(Error::Precondition("need at least 4 radii".into()));
    }
    let lo = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = radii.iter().copied().fold(0.0, f64::max);
    if !(lo > 0.0 && hi >= 4.0 * lo) {
        return Err(Error::Precondition("radii must span at least a factor of 4".into()));
    }
    let (slope, residual) = loglog_slope(radii, counts)?;
    let k_hat = slope.round().clamp(0.0, profile.dim as f64) as usize;
    Ok(DimensionEstimate {
        k_hat,
        slope,
        residual,
        warning: residual > warn_above,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaCheck {
    pub holds: bool,
    pub first_violation: Option<f64>,
}

impl LemmaCheck {
    fn new() -> Self {
        Self {
            holds: true,
            first_violation: None,
        }
    }

    fn record(&mut self, ok: bool, r: f64) {
        if !ok && self.holds {
            self.holds = false;
            self.first_violation = Some(r);
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    /// `N_G(r) ≤ N_Γ(r) ≤ m N_G(r + C)`.
    pub index_sandwich: LemmaCheck,
    /// Whether `N_G(r) = N_Γ(r)` at every radius.
    pub index_sandwich_lower_equality: bool,
    /// `N_G^V(r − 2 d(0,V)) ≤ N_G(r) ≤ N_G^V(r)`; absent without V counts.
    pub subspace_sandwich: Option<LemmaCheck>,
    /// `Λ_G(r) · N_{Γ_T}(2r) ≥ N_G(r)`.
    pub lambda_lower: LemmaCheck,
    /// `Λ_G(r) · N_{Γ_T}(r) ≤ N_Γ(2r)`.
    pub lambda_upper: LemmaCheck,
}

impl LemmaReport {
    pub fn all_hold(&self) -> bool {
        self.index_sandwich.holds
            && self.subspace_sandwich.as_ref().is_none_or(|c| c.holds)
            && self.lambda_lower.holds
            && self.lambda_upper.holds
    }
}

/// Evaluates the finite-index and translation-part comparison inequalities at
/// every radius of the ambient grid. `ambient` profiles the group `Γ`, `sub` a
/// subgroup `G` of index `m` whose coset representatives have translation
/// norm at most `c`; `dv = d(0, V)` when `sub` carries V counts.
pub fn check_growth_lemmas(
    ambient: &GrowthProfile,
    sub: &GrowthProfile,
    m: usize,
    c: f64,
    dv: f64,
) -> Result<LemmaReport> {
    let mut index_sandwich = LemmaCheck::new();
    let mut equality = true;
    let mut subspace = sub.counts_nv.as_ref().map(|_| LemmaCheck::new());
    let mut lambda_lower = LemmaCheck::new();
    let mut lambda_upper = LemmaCheck::new();

    for &r in &ambient.radii {
        let n_gamma = ambient.n_at(r)?;
        let n_g = sub.n_at(r)?;
        let n_g_shift = sub.n_at(r + c)?;
        index_sandwich.record(n_g <= n_gamma && n_gamma <= m * n_g_shift, r);
        equality &= n_g == n_gamma;

        if let Some(check) = subspace.as_mut() {
            let lower = if r - 2.0 * dv >= 0.0 {
                sub.nv_at(r - 2.0 * dv)?.expect("V counts")
            } else {
                0
            };
            let upper = sub.nv_at(r)?.expect("V counts");
            check.record(lower <= n_g && n_g <= upper, r);
        }

        let lambda_g = sub.lambda_at(r)?;
        let nt_r = ambient.translations_at(r)?;
        let nt_2r = ambient.translations_at(2.0 * r)?;
        let n_gamma_2r = ambient.n_at(2.0 * r)?;
        lambda_lower.record(lambda_g * nt_2r >= n_g, r);
        lambda_upper.record(lambda_g * nt_r <= n_gamma_2r, r);
    }

    Ok(LemmaReport {
        index_sandwich,
        index_sandwich_lower_equality: equality,
        subspace_sandwich: subspace,
        lambda_lower,
        lambda_upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::groupgen::{enumerate_ball, EnumerateOptions};

    fn ball(spec: &crate::groupgen::GroupSpec, r: f64) -> GroupBall {
        enumerate_ball(spec, r, &EnumerateOptions::default()).unwrap()
    }

    #[test]
    fn z2_counts() {
        let p = growth_profile(&ball(&fixtures::z_lattice(2), 2.0), &[1.0, 2.0], None).unwrap();
        assert_eq!(p.counts_n, vec![5, 13]);
        assert_eq!(p.counts_lambda, vec![1, 1]);
        assert!(p.counts_nv.is_none());
    }

    #[test]
    fn screw_counts() {
        let p = growth_profile(&ball(&fixtures::screw_r3(1.0), 2.5), &[2.5], None).unwrap();
        assert_eq!(p.counts_n, vec![5]);
        assert_eq!(p.counts_lambda, vec![5]);
    }

    #[test]
    fn empty_radii_give_empty_profile() {
        let p = growth_profile(&ball(&fixtures::z_lattice(2), 2.0), &[], None).unwrap();
        assert!(p.radii.is_empty() && p.counts_n.is_empty());
    }

    #[test]
    fn radius_beyond_ball_is_rejected() {
        let b = ball(&fixtures::z_lattice(2), 2.0);
        assert!(matches!(
            growth_profile(&b, &[3.0], None),
            Err(Error::RadiusTooLarge { .. })
        ));
    }

    #[test]
    fn v_counts_need_headroom() {
        // V offset from the origin by 1: N^V(r) needs the ball out to r + 2
        let spec = fixtures::z_axis_translations();
        let v = AffineSubspace::new(
            nalgebra::dvector![1.0, 0.0, 0.0],
            vec![crate::isomcore::unit(3, 2)],
        )
        .unwrap();
        let b = ball(&spec, 10.0);
        assert!(growth_profile(&b, &[8.0], Some(&v)).is_ok());
        assert!(growth_profile(&b, &[9.0], Some(&v)).is_err());
    }

    #[test]
    fn dimension_estimates() {
        let radii = DEFAULT_RADII;
        let z2 = growth_profile(&ball(&fixtures::z_lattice(2), 64.0), &radii, None).unwrap();
        let est = estimate_dimension(&z2, CountKind::N).unwrap();
        assert_eq!(est.k_hat, 2);
        assert!(!est.warning);

        let screw = growth_profile(&ball(&fixtures::screw_r3(1.0), 64.0), &radii, None).unwrap();
        assert_eq!(screw.counts_n, vec![17, 33, 65, 129]);
        assert_eq!(estimate_dimension(&screw, CountKind::N).unwrap().k_hat, 1);

        let finite = growth_profile(&ball(&fixtures::cyclic_rotations(6), 64.0), &radii, None).unwrap();
        let est = estimate_dimension(&finite, CountKind::N).unwrap();
        assert_eq!(est.k_hat, 0);
        assert!(est.slope.abs() < 1e-12);
    }

    #[test]
    fn dimension_estimate_preconditions() {
        let b = ball(&fixtures::z_lattice(2), 8.0);
        let p = growth_profile(&b, &[1.0, 2.0, 3.0], None).unwrap();
        assert!(estimate_dimension(&p, CountKind::N).is_err());
        let p = growth_profile(&b, &[2.0, 3.0, 4.0, 5.0], None).unwrap();
        assert!(estimate_dimension(&p, CountKind::N).is_err());
        assert!(estimate_dimension(&p, CountKind::NV).is_err());
        assert!(matches!(loglog_slope(&[1.0, 2.0], &[0, 3]), Err(Error::ZeroCount { .. })));
    }

    #[test]
    fn trivial_pair_gives_equality() {
        let b = ball(&fixtures::wallpaper_p4(), 20.0);
        let radii = [1.0, 2.0, 5.0, 10.0];
        let p = growth_profile(&b, &radii, None).unwrap();
        let rep = check_growth_lemmas(&p, &p, 1, 0.0, 0.0).unwrap();
        assert!(rep.all_hold(), "{rep:?}");
        assert!(rep.index_sandwich_lower_equality);
        assert!(rep.subspace_sandwich.is_none());
    }

    #[test]
    fn screw_lambda_bounds() {
        let b = ball(&fixtures::screw_r3(1.0), 40.0);
        let radii = [1.0, 5.0, 10.0, 20.0];
        let p = growth_profile(&b, &radii, None).unwrap();
        assert_eq!(p.counts_lambda, p.counts_n);
        assert_eq!(p.translations_at(20.0).unwrap(), 1);
        let rep = check_growth_lemmas(&p, &p, 1, 0.0, 0.0).unwrap();
        assert!(rep.all_hold());
    }

    #[test]
    fn missing_headroom_is_an_error() {
        let b = ball(&fixtures::z_lattice(2), 10.0);
        let p = growth_profile(&b, &[4.0, 8.0], None).unwrap();
        assert!(matches!(
            check_growth_lemmas(&p, &p, 1, 0.0, 0.0),
            Err(Error::InsufficientHeadroom { .. })
        ));
    }

    #[test]
    fn csv_output() {
        let p = growth_profile(&ball(&fixtures::z_lattice(2), 2.0), &[1.0, 2.0], None).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "r,N,Lambda,NV,LambdaV\n1,5,1,,\n2,13,1,,\n");
    }
}
