use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use serde::Serialize;

use super::classify::{classify, ObstructionReport, Verdict};
use super::config::{Config, IsometryRepr, Problem};
use crate::conjugate::{
    check_conjugation_invariance, conjugation_index, linearize_pair, required_radius,
    verify_translation_dim_theorem, ConjugationIndex, ConjugationStatus, Linearization, TheoremStatus,
};
use crate::error::{Error, Result};
use crate::geomselect::{select_lines, LineSelection};
use crate::groupgen::{
    enumerate_ball, lattice_basis, GroupBall, translation_subgroup, verify_translation_pair, EnumerateOptions, PairReport,
};
use crate::growth::{estimate_dimension, growth_profile, CountKind, DimensionEstimate, GrowthProfile};

#[derive(Debug, Clone, Serialize)]
pub struct BallSummary {
    pub radius: f64,
    pub elements: usize,
    pub complete: bool,
    pub max_word_length: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticeSummary {
    pub rank: usize,
    pub basis: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairSection {
    pub report: PairReport,
    /// Growth exponent of `N_V` for the pair's subgroup.
    pub subspace_dimension: Option<DimensionEstimate>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LinearizationSummary {
    pub linearized: bool,
    pub iterates: Option<usize>,
    pub coefficients: Vec<f64>,
    pub linear_v: Option<crate::isomcore::AffineSubspaceRepr>,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugationSection {
    pub scale: f64,
    pub expanding: bool,
    pub status: ConjugationStatus,
    pub witness_generator: Option<usize>,
    pub witness: Option<IsometryRepr>,
    pub checked_radius: f64,
    pub index: Option<ConjugationIndex>,
    pub index_error: Option<String>,
    pub theorem_status: Option<TheoremStatus>,
    pub near_identity_power: Option<u64>,
    pub linearization: Option<LinearizationSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectionSection {
    pub selection: Option<LineSelection>,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub radii: Vec<f64>,
    pub tol: f64,
    pub ball: BallSummary,
    pub growth: GrowthProfile,
    pub dimension: DimensionEstimate,
    pub orthogonal_growth: Option<DimensionEstimate>,
    pub translation_lattice: LatticeSummary,
    pub pair: Option<PairSection>,
    pub conjugation: Option<ConjugationSection>,
    pub selection: Option<SelectionSection>,
    pub classification: ObstructionReport,
    pub inconclusive: bool,
    pub notes: Vec<String>,
}

impl AnalysisReport {
    pub fn exit_code(&self) -> i32 {
        if self.classification.verdict == Verdict::InvalidInput {
            2
        } else if self.inconclusive {
            3
        } else {
            0
        }
    }
}

fn options(problem: &Problem) -> EnumerateOptions {
    EnumerateOptions::default().with_tol(problem.tol)
}

fn max_radius(radii: &[f64]) -> f64 {
    radii.iter().copied().fold(0.0, f64::max)
}

/// Growth table of `Γ` at the given radii, with the `N_V`, `Λ_V` columns of
/// the pair's subgroup when a pair is configured.
pub fn growth_table(problem: &Problem, radii: &[f64]) -> Result<GrowthProfile> {
    let ball = enumerate_ball(&problem.spec, max_radius(radii), &options(problem))?;
    growth_from_ball(problem, &ball, radii)
}

fn growth_from_ball(problem: &Problem, ball: &GroupBall, radii: &[f64]) -> Result<GrowthProfile> {
    let opts = options(problem);
    let r = max_radius(radii);
    let mut profile = growth_profile(ball, radii, None)?;
    if let Some(pair) = &problem.pair {
        let origin = DVector::zeros(pair.v.ambient_dim());
        let headroom = 2.0 * pair.v.distance(&origin);
        let sub_ball = enumerate_ball(&pair.subgroup_spec(), r + headroom, &opts)?;
        let sub = growth_profile(&sub_ball, radii, Some(&pair.v))?;
        profile.merge_subspace_counts(&sub)?;
        profile.complete &= sub.complete;
    }
    Ok(profile)
}

fn summarize_linearization(lin: Linearization) -> LinearizationSummary {
    match lin {
        Linearization::Linearized {
            pair,
            m,
            coefficients,
            heuristic_generators,
        } => LinearizationSummary {
            linearized: true,
            iterates: Some(m),
            coefficients,
            linear_v: Some(pair.v.to_repr()),
            reason: heuristic_generators.then(|| "subgroup generators chosen heuristically".to_string()),
        },
        Linearization::Inconclusive { reason } => LinearizationSummary {
            linearized: false,
            iterates: None,
            coefficients: Vec::new(),
            linear_v: None,
            reason: Some(reason),
        },
    }
}

/// Conjugation invariance, index and the translation-dimension check for the
/// configured conformal map.
pub fn conjugation_analysis(problem: &Problem) -> Result<ConjugationSection> {
    let a = problem
        .conformal
        .as_ref()
        .ok_or_else(|| Error::Precondition("config has no conformal map".into()))?;
    let opts = options(problem);
    let spec = &problem.spec;
    let verdict = check_conjugation_invariance(a, spec, required_radius(a, spec), &opts)?;

    let (index, index_error) = if verdict.is_invariant() {
        match conjugation_index(a, spec, required_radius(a, spec), &opts) {
            Ok(i) => (Some(i), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };

    let (theorem_status, near_identity_power) = match verify_translation_dim_theorem(spec, a, &problem.radii, &opts) {
        Ok(t) => (Some(t.status), t.near_identity_power),
        Err(_) => (None, None),
    };

    let linearization = match (&problem.pair, a.is_expanding() && verdict.is_invariant()) {
        (Some(pair), true) => Some(match linearize_pair(a, pair, spec, spec.dim() + 2, &opts) {
            Ok(lin) => summarize_linearization(lin),
            Err(e) => summarize_linearization(Linearization::Inconclusive { reason: e.to_string() }),
        }),
        _ => None,
    };

    Ok(ConjugationSection {
        scale: a.scale(),
        expanding: a.is_expanding(),
        status: verdict.status,
        witness_generator: verdict.witness_index,
        witness: verdict.witness.as_ref().map(IsometryRepr::from_isometry),
        checked_radius: verdict.checked_radius,
        index,
        index_error,
        theorem_status,
        near_identity_power,
        linearization,
    })
}

/// Orthogonal half-line selection on `V⊥` for the configured pair.
pub fn line_selection(problem: &Problem) -> Result<LineSelection> {
    let pair = problem
        .pair
        .as_ref()
        .ok_or_else(|| Error::Precondition("config has no translation pair".into()))?;
    let ball = enumerate_ball(&problem.spec, max_radius(&problem.radii), &options(problem))?;
    select_lines(&ball, &pair.v)
}

/// Runs every analysis that the configuration supports.
pub fn analyze(problem: &Problem) -> Result<AnalysisReport> {
    let opts = options(problem);
    let n = problem.spec.dim();
    let r = max_radius(&problem.radii);
    let ball = enumerate_ball(&problem.spec, r, &opts)?;
    let mut notes = Vec::new();

    let growth = growth_from_ball(problem, &ball, &problem.radii)?;
    let dimension = estimate_dimension(&growth, CountKind::N)?;
    if dimension.warning {
        notes.push(format!("log-log fit residual {:.3} is large; k_hat is unreliable", dimension.residual));
    }
    let orthogonal_growth = estimate_dimension(&growth, CountKind::Lambda).ok();

    let lattice = lattice_basis(&translation_subgroup(&ball))?;
    let translation_lattice = LatticeSummary {
        rank: lattice.rank(),
        basis: lattice.vectors().iter().map(|v| v.iter().copied().collect()).collect(),
    };

    let pair = match &problem.pair {
        Some(p) => {
            let report = verify_translation_pair(&problem.spec, p, r, &opts)?;
            if !report.all_pass() {
                notes.push("the configured pair does not pass the translation-pair checks".into());
            }
            let (subspace_dimension, error) = match estimate_dimension(&growth, CountKind::NV) {
                Ok(d) => (Some(d), None),
                Err(e) => (None, Some(e.to_string())),
            };
            Some(PairSection {
                report,
                subspace_dimension,
                error,
            })
        }
        None => None,
    };

    let conjugation = match &problem.conformal {
        Some(_) => Some(conjugation_analysis(problem)?),
        None => None,
    };

    let selection = problem.pair.as_ref().map(|p| {
        if !p.v.is_linear(problem.tol) {
            SelectionSection {
                selection: None,
                skipped: Some("V does not pass through the origin".into()),
            }
        } else {
            match select_lines(&ball, &p.v) {
                Ok(s) => SelectionSection {
                    selection: Some(s),
                    skipped: None,
                },
                Err(e) => SelectionSection {
                    selection: None,
                    skipped: Some(e.to_string()),
                },
            }
        }
    });

    let classification = classify(n as i64, dimension.k_hat as i64, translation_lattice.rank as i64);
    let inconclusive = !ball.is_complete() || !growth.complete;
    if inconclusive {
        notes.push("enumeration hit its word or element limit; counts are lower bounds".into());
    }
    notes.push(classification.note.to_string());

    Ok(AnalysisReport {
        n,
        radii: problem.radii.clone(),
        tol: problem.tol,
        ball: BallSummary {
            radius: ball.radius(),
            elements: ball.len(),
            complete: ball.is_complete(),
            max_word_length: ball.max_word_length(),
        },
        growth,
        dimension,
        orthogonal_growth,
        translation_lattice,
        pair,
        conjugation,
        selection,
        classification,
        inconclusive,
        notes,
    })
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub report: AnalysisReport,
    pub report_path: PathBuf,
    pub csv_path: PathBuf,
    pub exit_code: i32,
}

/// Loads a config, runs [`analyze`] and writes `report.json` and `growth.csv`
/// into `out_dir`.
pub fn run_pipeline(config_path: impl AsRef<Path>, out_dir: impl AsRef<Path>) -> Result<PipelineOutcome> {
    let problem = Config::load(config_path)?.validate()?;
    let report = analyze(&problem)?;
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir)?;
    let report_path = out_dir.join("report.json");
    let csv_path = out_dir.join("growth.csv");
    serde_json::to_writer_pretty(BufWriter::new(File::create(&report_path)?), &report)?;
    report.growth.write_csv(BufWriter::new(File::create(&csv_path)?))?;
    let exit_code = report.exit_code();
    Ok(PipelineOutcome {
        report,
        report_path,
        csv_path,
        exit_code,
    })
}
