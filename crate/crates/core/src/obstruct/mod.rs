//! Obstruction classifier over `(n, dim Γ, dim Γ_T)`, the JSON configuration
//! format and the end-to-end analysis pipeline behind the command-line tool.

mod classify;
mod config;
mod pipeline;

pub use classify::{classify, condition_11, exponent_condition, is_admissible, Evidence, ObstructionReport, Theorem, Verdict};
pub use config::{Config, ConformalRepr, IsometryRepr, PairRepr, Problem};
pub use pipeline::{
    analyze, conjugation_analysis, growth_table, line_selection, run_pipeline, AnalysisReport, BallSummary,
    ConjugationSection, LatticeSummary, LinearizationSummary, PairSection, PipelineOutcome, SelectionSection,
};
