//! Dyad-year records: variable definitions, CSV ingestion, scaling, balanced
//! sampling and a synthetic generator.

mod dataset;
pub mod synthetic;
mod variable;

pub use dataset::{
    balanced_sample, disjoint, fit_normalize, load_dataset, normalize, read_dataset, write_dataset,
    Dataset, DyadRecord, Label, Normalizer, CSV_HEADER,
};
pub use synthetic::{generate, generate_synthetic, planted_score, SyntheticConfig};
pub use variable::{SpecSet, Variable, VariableKind, VariableSpec, N_VARIABLES};
