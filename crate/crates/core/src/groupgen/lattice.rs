//! Bases for discrete additive subgroups of `R^n` given a (ball of) member
//! vectors.
//!
//! Vectors are absorbed shortest first. An independent vector extends the
//! basis; a dependent vector with fractional coordinates is merged by an
//! integer echelon reduction over a common denominator. The result is
//! size-reduced pairwise until no basis vector can be shortened by subtracting
//! an integer multiple of another.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::isomcore::TAU;

const INTEGRALITY_TOL: f64 = 1e-6;
const MAX_DENOMINATOR: i64 = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeBasis {
    vectors: Vec<DVector<f64>>,
}

impl LatticeBasis {
    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    /// Real coordinates of `v` in the basis plus the residual of the fit.
    pub fn coordinates(&self, v: &DVector<f64>) -> (Vec<f64>, f64) {
        coordinates(&self.vectors, v)
    }

    /// Integer coordinates of `v`, if `v` is a lattice vector within `tol`.
    pub fn integer_coordinates(&self, v: &DVector<f64>, tol: f64) -> Option<Vec<i64>> {
        let (c, _) = self.coordinates(v);
        let ints: Vec<i64> = c.iter().map(|x| x.round() as i64).collect();
        let mut recon = DVector::zeros(v.len());
        for (b, &k) in self.vectors.iter().zip(&ints) {
            recon += b * k as f64;
        }
        ((recon - v).norm() < tol).then_some(ints)
    }

    pub fn contains(&self, v: &DVector<f64>, tol: f64) -> bool {
        self.integer_coordinates(v, tol).is_some()
    }
}

fn coordinates(basis: &[DVector<f64>], v: &DVector<f64>) -> (Vec<f64>, f64) {
    if basis.is_empty() {
        return (Vec::new(), v.norm());
    }
    let k = basis.len();
    let gram = DMatrix::from_fn(k, k, |i, j| basis[i].dot(&basis[j]));
    let rhs = DVector::from_fn(k, |i, _| basis[i].dot(v));
    let c = gram
        .lu()
        .solve(&rhs)
        .unwrap_or_else(|| DVector::zeros(k));
    let mut recon = DVector::zeros(v.len());
    for (b, x) in basis.iter().zip(c.iter()) {
        recon += b * *x;
    }
    (c.iter().copied().collect(), (recon - v).norm())
}

fn common_denominator(c: &[f64]) -> Option<i64> {
    (1..=MAX_DENOMINATOR).find(|&d| {
        c.iter().all(|x| {
            let y = x * d as f64;
            (y - y.round()).abs() < INTEGRALITY_TOL
        })
    })
}

/// Row echelon form over the integers; returns the non-zero rows.
fn integer_row_basis(mut rows: Vec<Vec<i128>>, cols: usize) -> Vec<Vec<i128>> {
    let mut pivot_row = 0;
    for col in 0..cols {
        loop {
            let min = (pivot_row..rows.len())
                .filter(|&r| rows[r][col] != 0)
                .min_by_key(|&r| rows[r][col].abs());
            let Some(min) = min else { break };
            rows.swap(pivot_row, min);
            let mut reduced_all = true;
            for r in pivot_row + 1..rows.len() {
                if rows[r][col] != 0 {
                    let q = rows[r][col] / rows[pivot_row][col];
                    for c in 0..cols {
                        rows[r][c] -= q * rows[pivot_row][c];
                    }
                    if rows[r][col] != 0 {
                        reduced_all = false;
                    }
                }
            }
            if reduced_all {
                pivot_row += 1;
                break;
            }
        }
    }
    rows.truncate(pivot_row);
    rows
}

fn size_reduce(basis: &mut [DVector<f64>]) {
    loop {
        let mut changed = false;
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if i == j {
                    continue;
                }
                let mu = (basis[i].dot(&basis[j]) / basis[j].norm_squared()).round();
                if mu == 0.0 {
                    continue;
                }
                let candidate = &basis[i] - &basis[j] * mu;
                if candidate.norm_squared() < basis[i].norm_squared() * (1.0 - 1e-12) {
                    basis[i] = candidate;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

fn merge_dependent(basis: &[DVector<f64>], c: &[f64]) -> Result<Vec<DVector<f64>>> {
    let d = common_denominator(c).ok_or_else(|| {
        Error::NotALattice(format!(
            "coordinates {c:?} are not rational with denominator <= {MAX_DENOMINATOR}"
        ))
    })?;
    let k = basis.len();
    let mut rows: Vec<Vec<i128>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { d as i128 } else { 0 }).collect())
        .collect();
    rows.push(c.iter().map(|x| (x * d as f64).round() as i128).collect());
    let reduced = integer_row_basis(rows, k);
    if reduced.len() != k {
        return Err(Error::NotALattice("rank dropped while merging".into()));
    }
    Ok(reduced
        .iter()
        .map(|row| {
            let mut v = DVector::zeros(basis[0].len());
            for (b, &x) in basis.iter().zip(row) {
                v += b * (x as f64 / d as f64);
            }
            v
        })
        .collect())
}

/// A basis of the additive group generated by `translations`.
pub fn lattice_basis(translations: &[DVector<f64>]) -> Result<LatticeBasis> {
    let mut sorted: Vec<&DVector<f64>> = translations.iter().filter(|v| v.norm() > TAU).collect();
    sorted.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    if let Some(first) = sorted.first() {
        let n = first.len();
        if let Some(bad) = sorted.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.len(),
            });
        }
    }

    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in sorted.iter().copied() {
        let (c, residual) = coordinates(&basis, v);
        if residual > 1e-9 * v.norm().max(1.0) {
            basis.push(v.clone());
            size_reduce(&mut basis);
            continue;
        }
        if c.iter().all(|x| (x - x.round()).abs() < INTEGRALITY_TOL) {
            continue;
        }
        basis = merge_dependent(&basis, &c)?;
        size_reduce(&mut basis);
    }
    basis.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let out = LatticeBasis { vectors: basis };

    for v in translations {
        if out.integer_coordinates(v, TAU * v.norm().max(1.0)).is_none() {
            return Err(Error::NotALattice(format!(
                "vector {:?} is not an integer combination of the basis",
                v.as_slice()
            )));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn unit_square_with_diagonals() {
        let vs = vec![
            dvector![1.0, 0.0],
            dvector![-1.0, 0.0],
            dvector![0.0, 1.0],
            dvector![0.0, -1.0],
            dvector![1.0, 1.0],
            dvector![-1.0, -1.0],
        ];
        let b = lattice_basis(&vs).unwrap();
        assert_eq!(b.rank(), 2);
        for v in b.vectors() {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
        assert!(b.vectors()[0].dot(&b.vectors()[1]).abs() < 1e-12);
    }

    #[test]
    fn even_multiples() {
        let vs = vec![dvector![2.0, 0.0], dvector![-2.0, 0.0], dvector![4.0, 0.0], dvector![-4.0, 0.0]];
        let b = lattice_basis(&vs).unwrap();
        assert_eq!(b.rank(), 1);
        assert!((b.vectors()[0].norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn merges_fractional_dependents() {
        // 2 and 3 generate Z
        let b = lattice_basis(&[dvector![2.0], dvector![3.0]]).unwrap();
        assert_eq!(b.rank(), 1);
        assert!((b.vectors()[0][0].abs() - 1.0).abs() < 1e-12);

        // (2,0), (0,2), (1,1) generate the checkerboard lattice of index 2
        let b = lattice_basis(&[dvector![2.0, 0.0], dvector![0.0, 2.0], dvector![1.0, 1.0]]).unwrap();
        let det = (b.vectors()[0][0] * b.vectors()[1][1] - b.vectors()[0][1] * b.vectors()[1][0]).abs();
        assert!((det - 2.0).abs() < 1e-9);
    }

    #[test]
    fn empty_input_has_rank_zero() {
        assert_eq!(lattice_basis(&[]).unwrap().rank(), 0);
        assert_eq!(lattice_basis(&[dvector![0.0, 0.0]]).unwrap().rank(), 0);
    }

    #[test]
    fn dense_input_is_rejected() {
        let res = lattice_basis(&[dvector![1.0], dvector![2f64.sqrt()]]);
        assert!(matches!(res, Err(Error::NotALattice(_))));
    }

    #[test]
    fn size_reduced() {
        let b = lattice_basis(&[dvector![1.0, 0.0], dvector![7.0, 1.0]]).unwrap();
        let v = b.vectors();
        for i in 0..2 {
            for j in 0..2 {
                if i != j {
                    let mu = (v[i].dot(&v[j]) / v[j].norm_squared()).round();
                    assert!((&v[i] - &v[j] * mu).norm() >= v[i].norm() - 1e-12);
                }
            }
        }
        assert!((v[1].norm() - 1.0).abs() < 1e-12);
    }
}
