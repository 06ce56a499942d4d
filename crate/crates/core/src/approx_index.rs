//! Spatial hash for float keys. Each coordinate is rounded to a grid of spacing
//! `cell`; a lookup also visits the neighbouring cell along every coordinate
//! that lies within `probe` of a rounding boundary, so no stored key within
//! `probe` (per coordinate) of the query is ever missed.

use std::collections::HashMap;

#[derive(Debug, Clone)]
pub(crate) struct ApproxIndex {
    cell: f64,
    probe: f64,
    map: HashMap<Vec<i64>, Vec<usize>>,
}

impl ApproxIndex {
    pub(crate) fn new(cell: f64, probe: f64) -> Self {
        debug_assert!(probe < 0.5 * cell);
        Self {
            cell,
            probe,
            map: HashMap::new(),
        }
    }

    fn cell_of(&self, key: &[f64]) -> Vec<i64> {
        key.iter().map(|x| (x / self.cell).round() as i64).collect()
    }

    pub(crate) fn insert(&mut self, key: &[f64], id: usize) {
        let cell = self.cell_of(key);
        self.map.entry(cell).or_default().push(id);
    }

    /// Ids stored in every cell that could hold a key within `probe` of `key`.
    pub(crate) fn candidates(&self, key: &[f64]) -> Vec<usize> {
        let home = self.cell_of(key);
        // coordinates near a boundary, with the direction of the neighbour
        let mut ambiguous: Vec<(usize, i64)> = Vec::new();
        for (i, x) in key.iter().enumerate() {
            let scaled = x / self.cell;
            let frac = scaled - scaled.round();
            let slack = 0.5 - self.probe / self.cell;
            if frac > slack {
                ambiguous.push((i, 1));
            } else if frac < -slack {
                ambiguous.push((i, -1));
            }
        }
        let mut out = Vec::new();
        let combos = 1usize << ambiguous.len().min(20);
        for mask in 0..combos {
            let mut cell = home.clone();
            for (bit, &(i, dir)) in ambiguous.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    cell[i] += dir;
                }
            }
            if let Some(ids) = self.map.get(&cell) {
                out.extend_from_slice(ids);
            }
        }
        out
    }

    #[cfg(test)]
    pub(crate) fn len_cells(&self) -> usize {
        self.map.len()
    }
}

/// Deduplicates orthogonal matrices on a `1e-6` grid, confirming with a
/// Frobenius-norm comparison.
#[derive(Debug, Clone)]
pub(crate) struct MatrixSet {
    index: ApproxIndex,
    items: Vec<nalgebra::DMatrix<f64>>,
    tol: f64,
}

pub(crate) const ORT_CELL: f64 = 1e-6;

impl MatrixSet {
    pub(crate) fn new(tol: f64) -> Self {
        Self {
            index: ApproxIndex::new(ORT_CELL, (tol * 10.0).min(0.25 * ORT_CELL)),
            items: Vec::new(),
            tol,
        }
    }

    /// Index of an existing match, or of the newly inserted matrix; the flag is
    /// true when the matrix was new.
    pub(crate) fn insert(&mut self, m: &nalgebra::DMatrix<f64>) -> (usize, bool) {
        if let Some(i) = self.find(m) {
            return (i, false);
        }
        let id = self.items.len();
        self.index.insert(m.as_slice(), id);
        self.items.push(m.clone());
        (id, true)
    }

    pub(crate) fn find(&self, m: &nalgebra::DMatrix<f64>) -> Option<usize> {
        self.index
            .candidates(m.as_slice())
            .into_iter()
            .find(|&i| (&self.items[i] - m).norm() <= self.tol)
    }

    #[cfg(test)]
    pub(crate) fn len(&self) -> usize {
        self.items.len()
    }
}
