use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};

/// Point of `S^m` far from a weighted sequence.
#[derive(Debug, Clone, Serialize)]
pub struct AvoidancePoint {
    pub y: Vec<f64>,
    /// `min_j d(y, x_j) · j^{1/m + eps}` over the input sequence.
    pub c_emp: f64,
    pub eps: f64,
}

impl AvoidancePoint {
    pub fn y_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.y)
    }
}

const REFINE_ROUNDS: usize = 20;
const REFINE_STARTS: usize = 8;
const GOLDEN_ITERATIONS: usize = 80;

/// Geodesic distance on the unit sphere.
pub fn sphere_distance(u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    u.dot(v).clamp(-1.0, 1.0).acos()
}

/// `min_j d(y, x_j) · j^p` with 1-based `j`.
pub fn avoidance_score(y: &DVector<f64>, seq: &[DVector<f64>], p: f64) -> f64 {
    seq.iter()
        .enumerate()
        .map(|(j, x)| sphere_distance(y, x) * ((j + 1) as f64).powf(p))
        .fold(f64::INFINITY, f64::min)
}

/// `count` roughly uniform points on `S^m`: an even circle for `m = 1`, the
/// Fibonacci spiral for `m = 2` and seeded Gaussian samples above that.
pub fn sphere_grid(m: usize, count: usize) -> Vec<DVector<f64>> {
    let count = count.max(1);
    match m {
        1 => (0..count)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / count as f64;
                DVector::from_vec(vec![t.cos(), t.sin()])
            })
            .collect(),
        2 => fibonacci_sphere(count),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0xf1b0);
            (0..count)
                .map(|_| loop {
                    let v = DVector::<f64>::from_fn(m + 1, |_, _| StandardNormal.sample(&mut rng));
                    let n = v.norm();
                    if n > 1e-9 {
                        break v / n;
                    }
                })
                .collect()
        }
    }
}

pub fn fibonacci_sphere(count: usize) -> Vec<DVector<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let t = golden * i as f64;
            DVector::from_vec(vec![rho * t.cos(), rho * t.sin(), z])
        })
        .collect()
}

fn sphere_area(m: usize) -> f64 {
    // |S^m| = 2 π^{(m+1)/2} / Γ((m+1)/2), via the recursion |S^m| = 2π/(m−1) |S^{m−2}|
    let mut area = if m % 2 == 0 { 4.0 * std::f64::consts::PI } else { std::f64::consts::TAU };
    let mut k = if m % 2 == 0 { 2 } else { 1 };
    while k < m {
        k += 2;
        area *= std::f64::consts::TAU / (k - 1) as f64;
    }
    area
}

fn tangent_basis(y: &DVector<f64>) -> Vec<DVector<f64>> {
    let d = y.len();
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(d - 1);
    for i in 0..d {
        let mut e = DVector::<f64>::zeros(d);
        e[i] = 1.0;
        e -= y * y.dot(&e);
        for b in &out {
            e -= b * b.dot(&e);
        }
        let n = e.norm();
        if n > 1e-6 {
            out.push(e / n);
        }
        if out.len() == d - 1 {
            break;
        }
    }
    out
}

fn geodesic(y: &DVector<f64>, u: &DVector<f64>, t: f64) -> DVector<f64> {
    let p = y * t.cos() + u * t.sin();
    let n = p.norm();
    p / n
}

/// Maximizes `t ↦ f(t)` on `[lo, hi]` by golden-section search.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    for _ in 0..GOLDEN_ITERATIONS {
        if hi - lo < 1e-12 {
            break;
        }
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a);
        }
    }
    if fa >= fb {
        (a, fa)
    } else {
        (b, fb)
    }
}

/// Point `y ∈ S^m` maximizing `min_j d(y, x_j) · j^{1/m + eps}`.
///
/// A grid of `grid_res` points is scored, and the best few grid points are
/// polished by golden-section line searches along great circles in every
/// tangent direction, with the step halving between rounds.
pub fn sphere_avoidance_point(seq: &[DVector<f64>], eps: f64, grid_res: usize) -> Result<AvoidancePoint> {
    let first = seq
        .first()
        .ok_or_else(|| Error::InvalidArgument("sequence must be non-empty".into()))?;
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    if grid_res == 0 {
        return Err(Error::InvalidArgument("grid_res must be positive".into()));
    }
    let dim = first.len();
    if dim < 2 {
        return Err(Error::InvalidArgument("sphere dimension m must be at least 1".into()));
    }
    for x in seq {
        if x.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: x.len() });
        }
        if (x.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("sequence points must be unit vectors".into()));
        }
    }
    let m = dim - 1;
    let p = 1.0 / m as f64 + eps;
    let score = |y: &DVector<f64>| avoidance_score(y, seq, p);

    let grid = sphere_grid(m, grid_res);
    let mut scored: Vec<(f64, usize)> = grid.iter().enumerate().map(|(i, y)| (score(y), i)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));

    let spacing = (sphere_area(m) / grid.len() as f64).powf(1.0 / m as f64);
    let mut best_y = grid[scored[0].1].clone();
    let mut best = scored[0].0;
    for &(start_score, idx) in scored.iter().take(REFINE_STARTS) {
        let mut y = grid[idx].clone();
        let mut current = start_score;
        let mut step = 2.0 * spacing;
        for _ in 0..REFINE_ROUNDS {
            for u in tangent_basis(&y) {
                let (t, value) = golden_max(|t| score(&geodesic(&y, &u, t)), -step, step);
                if value > current {
                    y = geodesic(&y, &u, t);
                    current = value;
                }
            }
            step *= 0.5;
        }
        if current > best {
            best = current;
            best_y = y;
        }
    }

    let c_emp = score(&best_y);
    Ok(AvoidancePoint {
        y: best_y.iter().copied().collect(),
        c_emp,
        eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_north_pole_gives_antipode() {
        let north = DVector::from_vec(vec![0.0, 1.0]);
        let seq = vec![north; 10];
        let pt = sphere_avoidance_point(&seq, 0.1, 64).unwrap();
        assert!((pt.y[1] + 1.0).abs() < 1e-9);
        assert!((pt.c_emp - PI).abs() < 1e-6);
    }

    #[test]
    fn invariant_holds_for_every_index() {
        let seq = fibonacci_sphere(50);
        let pt = sphere_avoidance_point(&seq, 0.1, 500).unwrap();
        let y = pt.y_vector();
        assert!(pt.c_emp > 0.0);
        for (j, x) in seq.iter().enumerate() {
            assert!(sphere_distance(&y, x) * ((j + 1) as f64).powf(0.5 + 0.1) >= pt.c_emp);
        }
    }

    #[test]
    fn higher_spheres_use_random_grid() {
        let grid = sphere_grid(3, 100);
        assert_eq!(grid.len(), 100);
        assert!(grid.iter().all(|g| (g.norm() - 1.0).abs() < 1e-12));
        let seq: Vec<_> = grid.iter().take(10).cloned().collect();
        let pt = sphere_avoidance_point(&seq, 0.2, 200).unwrap();
        assert!(pt.c_emp > 0.0);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0 * PI).abs() < 1e-12);
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-12);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-12);
        assert!((sphere_area(4) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(sphere_avoidance_point(&[], 0.1, 10).is_err());
        let seq = vec![DVector::from_vec(vec![1.0, 0.0])];
        assert!(sphere_avoidance_point(&seq, 0.0, 10).is_err());
        assert!(sphere_avoidance_point(&[DVector::from_vec(vec![2.0, 0.0])], 0.1, 10).is_err());
    }
}
