use nalgebra::DVector;

use super::HalfLine;
use crate::error::{Error, Result};
use crate::groupgen::GroupBall;
use crate::isomcore::AffineSubspace;

fn check_length_domain(n: i64, k: i64, l: i64, eps: f64, s: f64, c: f64) -> Result<()> {
    if !(0 < k && k < n - 1) {
        return Err(Error::InvalidArgument(format!("need 0 < k < n-1, got n={n}, k={k}")));
    }
    if !(0 <= l && l <= k && l < n - 1) {
        return Err(Error::InvalidArgument(format!("need 0 <= l <= k and l < n-1, got l={l}")));
    }
    if !(s >= 1.0) {
        return Err(Error::InvalidArgument(format!("need s >= 1, got {s}")));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("need C > 0, got {c}")));
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!("need eps >= 0, got {eps}")));
    }
    Ok(())
}

/// `C · s^{(n−k−1)/(n−l−1) − eps}`.
pub fn length_lower_bound(n: i64, k: i64, l: i64, eps: f64, s: f64, c: f64) -> Result<f64> {
    check_length_domain(n, k, l, eps, s, c)?;
    let exponent = (n - k - 1) as f64 / (n - l - 1) as f64 - eps;
    Ok(c * s.powf(exponent))
}

fn trade_exponent(n: i64, k: i64, l: i64, eps: f64) -> f64 {
    (k - l) as f64 / (n - k - 1) as f64 + eps
}

/// Length bound obtained from the sphere-avoidance estimate when the path stays
/// within distance `r` of `V`: `s · C / r^{(k−l)/(n−k−1) + eps}`.
pub fn avoidance_length_bound(n: i64, k: i64, l: i64, eps: f64, s: f64, c: f64, r: f64) -> Result<f64> {
    check_length_domain(n, k, l, eps, s, c)?;
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("need r > 0, got {r}")));
    }
    Ok(s * c / r.powf(trade_exponent(n, k, l, eps)))
}

/// The radius `r*` where the escape bound `len ≥ r` meets the avoidance bound,
/// i.e. the solution of `s · C = r^{1 + (k−l)/(n−k−1) + eps}`.
pub fn crossing_radius(n: i64, k: i64, l: i64, eps: f64, s: f64, c: f64) -> Result<f64> {
    check_length_domain(n, k, l, eps, s, c)?;
    Ok((s * c).powf(1.0 / (1.0 + trade_exponent(n, k, l, eps))))
}

/// Minimizes `α x² + 2 β x` over `[lo, hi]` (`hi` may be infinite), `α ≥ 0`.
fn argmin_quadratic(alpha: f64, beta: f64, lo: f64, hi: f64) -> f64 {
    if alpha > 1e-14 {
        (-beta / alpha).clamp(lo, hi)
    } else if beta >= 0.0 || !hi.is_finite() {
        lo
    } else {
        hi
    }
}

/// Shortest straight segment from a point `p ∈ L1` to a point `q ∈ γ(L2)`, over
/// the enumerated `γ`, with both endpoints at distance at least `s` from `V`.
///
/// For each `γ` the squared length is a convex quadratic in the two ray
/// parameters; the clearance on `γ(L2)` cuts its parameter range into at most
/// two intervals, and each rectangle is minimized exactly.
pub fn brute_force_min_connection(
    ball: &GroupBall,
    v: &AffineSubspace,
    l1: &HalfLine,
    l2: &HalfLine,
    s: f64,
) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!("need s > 0, got {s}")));
    }
    if !v.is_linear(ball.tol()) {
        return Err(Error::InvalidSubspace("V must pass through the origin".into()));
    }
    let n = ball.dim();
    if v.ambient_dim() != n || l1.dim() != n || l2.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if v.ambient_dim() != n { v.ambient_dim() } else { l1.dim().min(l2.dim()) },
        });
    }
    for line in [l1, l2] {
        if v.project_direction(line.direction()).norm() > 1e-9 {
            return Err(Error::InvalidArgument("half-lines must lie in the orthogonal complement of V".into()));
        }
    }
    if ball.is_empty() {
        return Err(Error::InvalidArgument("ball contains no elements".into()));
    }

    let d1 = l1.direction();
    let mut best = f64::INFINITY;
    for g in ball.elements() {
        let c = g.tran();
        let w = g.ort() * l2.direction();
        let c_perp = v.reject_direction(c);
        let w_perp = v.reject_direction(&w);
        for (lo, hi) in clearance_intervals(&c_perp, &w_perp, s) {
            best = best.min(min_on_rectangle(d1, c, &w, s, lo, hi));
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::InvalidArgument("no admissible element keeps gamma(L2) clear of V".into()))
    }
}

/// Parameter intervals `u ≥ 0` with `|c + u w| ≥ s`.
fn clearance_intervals(c: &DVector<f64>, w: &DVector<f64>, s: f64) -> Vec<(f64, f64)> {
    let a = w.norm_squared();
    let b = c.dot(w);
    let c0 = c.norm_squared() - s * s;
    if a < 1e-14 {
        return if c0 >= 0.0 { vec![(0.0, f64::INFINITY)] } else { vec![] };
    }
    let disc = b * b - a * c0;
    if disc <= 0.0 {
        return vec![(0.0, f64::INFINITY)];
    }
    let root = disc.sqrt();
    let (u1, u2) = ((-b - root) / a, (-b + root) / a);
    let mut out = Vec::new();
    if u1 >= 0.0 {
        out.push((0.0, u1));
    }
    out.push((u2.max(0.0), f64::INFINITY));
    out
}

/// `min |t d1 − c − u w|` over `t ≥ s`, `u ∈ [lo, hi]`.
fn min_on_rectangle(d1: &DVector<f64>, c: &DVector<f64>, w: &DVector<f64>, s: f64, lo: f64, hi: f64) -> f64 {
    let eval = |t: f64, u: f64| (d1 * t - c - w * u).norm();
    let a = d1.norm_squared();
    let b = w.norm_squared();
    let d = d1.dot(w);
    let e = d1.dot(c);
    let f = w.dot(c);

    let mut best = f64::INFINITY;
    let det = a * b - d * d;
    if det > 1e-12 * a.max(1.0) * b.max(1.0) {
        let t = (e * b - d * f) / det;
        let u = (a * -f + d * e) / det;
        if t >= s && u >= lo && u <= hi {
            best = best.min(eval(t, u));
        }
    }
    // edge t = s
    let u = argmin_quadratic(b, f - s * d, lo, hi);
    best = best.min(eval(s, u));
    // edges u = lo and u = hi
    for u in [lo, hi] {
        if u.is_finite() {
            let t = argmin_quadratic(a, -(u * d + e), s, f64::INFINITY);
            best = best.min(eval(t, u));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::groupgen::{enumerate_ball, EnumerateOptions};
    use crate::isomcore::unit;

    #[test]
    fn bound_examples() {
        assert!((length_lower_bound(5, 1, 1, 0.0, 10.0, 1.0).unwrap() - 10.0).abs() < 1e-12);
        assert!((length_lower_bound(6, 2, 1, 0.0, 16.0, 1.0).unwrap() - 8.0).abs() < 1e-12);
        let v = length_lower_bound(4, 1, 0, 0.05, 100.0, 1.0).unwrap();
        let oracle = (2.0f64 / 3.0 - 0.05) * 100f64.ln();
        assert!((v.ln() - oracle).abs() < 1e-12);
    }

    #[test]
    fn bound_domain() {
        assert!(length_lower_bound(4, 3, 1, 0.0, 2.0, 1.0).is_err());
        assert!(length_lower_bound(4, 0, 0, 0.0, 2.0, 1.0).is_err());
        assert!(length_lower_bound(5, 1, 2, 0.0, 2.0, 1.0).is_err());
        assert!(length_lower_bound(5, 1, 1, 0.0, 0.5, 1.0).is_err());
        assert!(length_lower_bound(5, 1, 1, 0.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn crossing_matches_bisection() {
        for &(n, k, l, eps, s, c) in &[(5, 2, 1, 0.0, 10.0, 1.0), (7, 3, 0, 0.1, 40.0, 0.3), (4, 1, 0, 0.05, 3.0, 2.0)] {
            let r = crossing_radius(n, k, l, eps, s, c).unwrap();
            let (mut lo, mut hi) = (1e-9f64, 1e9f64);
            for _ in 0..200 {
                let mid = (lo * hi).sqrt();
                if mid < avoidance_length_bound(n, k, l, eps, s, c, mid).unwrap() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            assert!((r - lo).abs() < 1e-6 * r.max(1.0));
        }
    }

    #[test]
    fn crossing_equals_bound_without_eps() {
        let r = crossing_radius(6, 2, 1, 0.0, 16.0, 1.0).unwrap();
        assert!((r - 8.0).abs() < 1e-9);
    }

    #[test]
    fn orthogonal_lines_in_screw_r4() {
        let ball = enumerate_ball(&fixtures::screw_r4(1.0), 8.0, &EnumerateOptions::default()).unwrap();
        let v = AffineSubspace::linear(vec![unit(4, 3)]).unwrap();
        let l1 = HalfLine::new(unit(4, 2)).unwrap();
        let l2 = HalfLine::new(unit(4, 0)).unwrap();
        let m = brute_force_min_connection(&ball, &v, &l1, &l2, 3.0).unwrap();
        assert!(m >= 3.0 * 2f64.sqrt() - 1e-6);
        assert!((m - 3.0 * 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn same_ray_gives_zero() {
        let ball = enumerate_ball(&fixtures::lattice_in(3, 1), 3.0, &EnumerateOptions::default()).unwrap();
        let v = AffineSubspace::linear(vec![unit(3, 0)]).unwrap();
        let l = HalfLine::new(unit(3, 1)).unwrap();
        assert!(brute_force_min_connection(&ball, &v, &l, &l, 2.0).unwrap() < 1e-12);
    }

    #[test]
    fn antipodal_rays_give_two_s() {
        let ball = enumerate_ball(&fixtures::z_axis_translations(), 5.0, &EnumerateOptions::default()).unwrap();
        let v = AffineSubspace::linear(vec![unit(3, 2)]).unwrap();
        let l1 = HalfLine::new(unit(3, 0)).unwrap();
        let l2 = HalfLine::new(-unit(3, 0)).unwrap();
        let m = brute_force_min_connection(&ball, &v, &l1, &l2, 1.5).unwrap();
        assert!((m - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lines_must_avoid_v() {
        let ball = enumerate_ball(&fixtures::z_axis_translations(), 2.0, &EnumerateOptions::default()).unwrap();
        let v = AffineSubspace::linear(vec![unit(3, 2)]).unwrap();
        let l1 = HalfLine::new(unit(3, 2)).unwrap();
        let l2 = HalfLine::new(unit(3, 0)).unwrap();
        assert!(brute_force_min_connection(&ball, &v, &l1, &l2, 1.0).is_err());
    }

    #[test]
    fn clearance_cuts_parameter_range() {
        // c + u w passes through the origin at u = 2; the ball of radius 1 is excluded
        let c = DVector::from_vec(vec![-2.0, 0.0]);
        let w = DVector::from_vec(vec![1.0, 0.0]);
        let iv = clearance_intervals(&c, &w, 1.0);
        assert_eq!(iv.len(), 2);
        assert!((iv[0].1 - 1.0).abs() < 1e-12);
        assert!((iv[1].0 - 3.0).abs() < 1e-12);
    }
}
