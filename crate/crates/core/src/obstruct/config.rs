use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupgen::{GroupSpec, TranslationPair};
use crate::growth::DEFAULT_RADII;
use crate::isomcore::{AffineSubspace, AffineSubspaceRepr, ConformalMap, Isometry, TAU};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsometryRepr {
    /// Row-major orthogonal part.
    pub ort: Vec<Vec<f64>>,
    pub tran: Vec<f64>,
}

impl IsometryRepr {
    pub fn from_isometry(g: &Isometry) -> Self {
        Self {
            ort: matrix_rows(g.ort()),
            tran: g.tran().iter().copied().collect(),
        }
    }
}

pub(crate) fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConformalRepr {
    pub scale: f64,
    pub rot: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairRepr {
    pub subgroup_indices: Vec<usize>,
    #[serde(rename = "V")]
    pub v: AffineSubspaceRepr,
}

fn default_radii() -> Vec<f64> {
    DEFAULT_RADII.to_vec()
}

fn default_tol() -> f64 {
    TAU
}

/// On-disk description of an analysis run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub dim: usize,
    pub generators: Vec<IsometryRepr>,
    #[serde(default)]
    pub conformal: Option<ConformalRepr>,
    #[serde(default)]
    pub pair: Option<PairRepr>,
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct Problem {
    pub spec: GroupSpec,
    pub conformal: Option<ConformalMap>,
    pub pair: Option<TranslationPair>,
    pub radii: Vec<f64>,
    pub tol: f64,
}

fn rows_to_matrix(rows: &[Vec<f64>], n: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rows.len() });
    }
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: r.len() });
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("{what} has non-finite entries")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<Problem> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::InvalidArgument("dim must be positive".into()));
        }
        if !(self.tol > 0.0 && self.tol < 1e-3) {
            return Err(Error::InvalidArgument(format!("tol must lie in (0, 1e-3), got {}", self.tol)));
        }
        if self.generators.is_empty() {
            return Err(Error::InvalidArgument("at least one generator is required".into()));
        }
        let mut gens = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            if g.tran.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: g.tran.len() });
            }
            rows_to_matrix(&g.ort, n, "ort")?;
            gens.push(Isometry::from_rows(&g.ort, &g.tran, self.tol)?);
        }
        let spec = GroupSpec::new(gens)?;

        let conformal = match &self.conformal {
            Some(c) => Some(ConformalMap::with_tolerance(c.scale, rows_to_matrix(&c.rot, n, "rot")?, self.tol)?),
            None => None,
        };

        let pair = match &self.pair {
            Some(p) => {
                if p.subgroup_indices.is_empty() {
                    return Err(Error::InvalidArgument("pair.subgroup_indices is empty".into()));
                }
                let mut sub = Vec::new();
                for &i in &p.subgroup_indices {
                    let g = spec.generators().get(i).ok_or_else(|| {
                        Error::InvalidArgument(format!("subgroup index {i} out of range"))
                    })?;
                    sub.push(g.clone());
                }
                let v = AffineSubspace::from_repr(&p.v, self.tol)?;
                if v.ambient_dim() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: v.ambient_dim() });
                }
                Some(TranslationPair::new(sub, v)?)
            }
            None => None,
        };

        if self.radii.is_empty() || self.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidArgument("radii must be positive and finite".into()));
        }

        Ok(Problem {
            spec,
            conformal,
            pair,
            radii: self.radii.clone(),
            tol: self.tol,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCREW: &str = r#"{
        "dim": 3,
        "generators": [{"ort": [[0.5403023058681398, -0.8414709848078965, 0], [0.8414709848078965, 0.5403023058681398, 0], [0, 0, 1]], "tran": [0, 0, 1]}],
        "pair": {"subgroup_indices": [0], "V": {"base": [0, 0, 0], "basis": [[0, 0, 1]]}},
        "radii": [8, 16, 32, 64],
        "tol": 1e-9
    }"#;

    #[test]
    fn parses_and_validates() {
        let cfg = Config::from_json(SCREW).unwrap();
        let p = cfg.validate().unwrap();
        assert_eq!(p.spec.dim(), 3);
        assert!(p.pair.is_some());
        assert!(p.conformal.is_none());
        let again = Config::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn defaults_apply() {
        let cfg = Config::from_json(r#"{"dim": 1, "generators": [{"ort": [[1]], "tran": [1]}]}"#).unwrap();
        assert_eq!(cfg.radii, DEFAULT_RADII.to_vec());
        assert_eq!(cfg.tol, TAU);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(Config::from_json("{ not json"), Err(Error::Json(_))));
        assert!(matches!(
            Config::from_json(r#"{"dim": 1, "generators": [], "extra": 1}"#),
            Err(Error::Json(_))
        ));
        let wrong_dim = Config::from_json(r#"{"dim": 2, "generators": [{"ort": [[1]], "tran": [1]}]}"#).unwrap();
        assert!(matches!(wrong_dim.validate(), Err(Error::DimensionMismatch { .. })));
        let not_orth = Config::from_json(r#"{"dim": 1, "generators": [{"ort": [[2]], "tran": [1]}]}"#).unwrap();
        assert!(matches!(not_orth.validate(), Err(Error::NotOrthogonal { .. })));
        let bad_index = Config::from_json(
            r#"{"dim": 1, "generators": [{"ort": [[1]], "tran": [1]}], "pair": {"subgroup_indices": [3], "V": {"base": [0], "basis": [[1]]}}}"#,
        )
        .unwrap();
        assert!(bad_index.validate().is_err());
    }
}
