//! Finitely generated subgroups of `E(n)` and their translation-norm balls.
//!
//! A [`GroupBall`] is produced by breadth-first closure over words in the
//! generators and their inverses. Elements are kept while `|tran| ≤ r + margin`;
//! the `complete` flag records whether the closure ran dry before hitting a
//! word-length or element budget.

mod coset;
mod lattice;
mod pair;

pub use coset::{coset_index, CosetIndex};
pub use lattice::{lattice_basis, LatticeBasis};
pub use pair::{tran_v, tran_v_with_tol, verify_translation_pair, PairReport, TranslationPair};

use nalgebra::DVector;

use crate::approx_index::ApproxIndex;
use crate::error::{Error, Result};
use crate::isomcore::{Isometry, TAU};

/// Distinct elements closer than this are reported as a non-discreteness suspicion.
pub const COLLISION_RADIUS: f64 = 1e-4;

/// Translation grid used to hash elements during enumeration.
const TRAN_CELL: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct GroupSpec {
    dim: usize,
    generators: Vec<Isometry>,
}

impl GroupSpec {
    pub fn new(generators: Vec<Isometry>) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::InvalidArgument("generator list is empty".into()))?;
        let dim = first.dim();
        for g in &generators {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: g.dim(),
                });
            }
        }
        Ok(Self { dim, generators })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Isometry] {
        &self.generators
    }

    pub fn max_generator_norm(&self) -> f64 {
        self.generators
            .iter()
            .map(Isometry::translation_norm)
            .fold(0.0, f64::max)
    }

    /// Generators and their inverses, with approximate duplicates removed.
    fn letters(&self, tol: f64) -> Vec<Isometry> {
        let mut out: Vec<Isometry> = Vec::new();
        for g in &self.generators {
            for h in [g.clone(), g.inverse()] {
                if !h.is_identity(tol) && !out.iter().any(|o| o.approx_eq(&h, tol)) {
                    out.push(h);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EnumerateOptions {
    /// Extra translation norm allowed for intermediate elements. `None` uses
    /// twice the largest generator translation norm.
    pub margin: Option<f64>,
    pub max_words: usize,
    pub max_elements: usize,
    pub tol: f64,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        Self {
            margin: None,
            max_words: 100_000,
            max_elements: 2_000_000,
            tol: TAU,
        }
    }
}

impl EnumerateOptions {
    pub fn with_max_words(mut self, max_words: usize) -> Self {
        self.max_words = max_words;
        self
    }

    pub fn with_max_elements(mut self, max_elements: usize) -> Self {
        self.max_elements = max_elements;
        self
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = Some(margin);
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Elements of the group with `|tran| ≤ radius`.
#[derive(Debug, Clone)]
pub struct GroupBall {
    spec: GroupSpec,
    radius: f64,
    elements: Vec<Isometry>,
    word_lengths: Vec<usize>,
    max_word_length: usize,
    complete: bool,
    tol: f64,
    index: ApproxIndex,
}

impl GroupBall {
    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn elements(&self) -> &[Isometry] {
        &self.elements
    }

    /// Length of the word that first reached each element.
    pub fn word_lengths(&self) -> &[usize] {
        &self.word_lengths
    }

    pub fn max_word_length(&self) -> usize {
        self.max_word_length
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn find(&self, g: &Isometry) -> Option<usize> {
        if g.dim() != self.dim() {
            return None;
        }
        self.index
            .candidates(g.tran().as_slice())
            .into_iter()
            .find(|&i| self.elements[i].distance(g) <= self.tol)
    }

    pub fn contains(&self, g: &Isometry) -> bool {
        self.find(g).is_some()
    }

    /// `N(r)`: number of elements with `|tran| ≤ r`.
    pub fn count_within(&self, r: f64) -> usize {
        self.elements
            .iter()
            .filter(|g| g.translation_norm() <= r + self.tol)
            .count()
    }

    /// Restriction to a smaller radius; completeness carries over.
    pub fn restrict(&self, r: f64) -> GroupBall {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| self.elements[i].translation_norm() <= r + self.tol)
            .collect();
        build_ball(
            self.spec.clone(),
            r.min(self.radius),
            keep.iter().map(|&i| self.elements[i].clone()).collect(),
            keep.iter().map(|&i| self.word_lengths[i]).collect(),
            self.max_word_length,
            self.complete,
            self.tol,
        )
    }
}

fn build_ball(
    spec: GroupSpec,
    radius: f64,
    elements: Vec<Isometry>,
    word_lengths: Vec<usize>,
    max_word_length: usize,
    complete: bool,
    tol: f64,
) -> GroupBall {
    let mut index = ApproxIndex::new(TRAN_CELL, COLLISION_RADIUS);
    for (i, g) in elements.iter().enumerate() {
        index.insert(g.tran().as_slice(), i);
    }
    GroupBall {
        spec,
        radius,
        elements,
        word_lengths,
        max_word_length,
        complete,
        tol,
        index,
    }
}

/// Breadth-first enumeration of the elements with `|tran| ≤ r`.
pub fn enumerate_ball(spec: &GroupSpec, r: f64, opts: &EnumerateOptions) -> Result<GroupBall> {
    if !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be non-negative, got {r}")));
    }
    let margin = opts.margin.unwrap_or(2.0 * spec.max_generator_norm());
    if !(margin >= 0.0) {
        return Err(Error::InvalidArgument(format!("margin must be non-negative, got {margin}")));
    }
    let tol = opts.tol;
    let limit = r + margin + tol;
    let letters = spec.letters(tol);

    let mut all = vec![Isometry::identity(spec.dim)];
    let mut words = vec![0usize];
    let mut index = ApproxIndex::new(TRAN_CELL, COLLISION_RADIUS);
    index.insert(all[0].tran().as_slice(), 0);

    let mut frontier = vec![0usize];
    let mut depth = 0usize;
    let mut truncated = false;

    'outer: while !frontier.is_empty() {
        if depth >= opts.max_words {
            truncated = true;
            break;
        }
        let mut next = Vec::new();
        for &i in &frontier {
            for s in &letters {
                let cand = s.compose_unchecked(&all[i]);
                if cand.translation_norm() > limit {
                    continue;
                }
                let mut seen = false;
                for j in index.candidates(cand.tran().as_slice()) {
                    let d = all[j].distance(&cand);
                    if d <= tol {
                        seen = true;
                        break;
                    }
                    if d < COLLISION_RADIUS {
                        return Err(Error::NonDiscrete { distance: d });
                    }
                }
                if seen {
                    continue;
                }
                if all.len() >= opts.max_elements {
                    truncated = true;
                    break 'outer;
                }
                let id = all.len();
                index.insert(cand.tran().as_slice(), id);
                all.push(cand);
                words.push(depth + 1);
                next.push(id);
            }
        }
        if !next.is_empty() {
            depth += 1;
        }
        frontier = next;
    }

    let complete = !truncated && frontier.is_empty();
    let (elements, word_lengths): (Vec<_>, Vec<_>) = all
        .into_iter()
        .zip(words)
        .filter(|(g, _)| g.translation_norm() <= r + tol)
        .unzip();
    Ok(build_ball(
        spec.clone(),
        r,
        elements,
        word_lengths,
        depth,
        complete,
        tol,
    ))
}

/// Translation vectors of the pure translations in the ball, excluding zero.
pub fn translation_subgroup(ball: &GroupBall) -> Vec<DVector<f64>> {
    ball.elements()
        .iter()
        .filter(|g| g.is_translation(ball.tol()) && g.translation_norm() > ball.tol())
        .map(|g| g.tran().clone())
        .collect()
}
