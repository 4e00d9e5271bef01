//! Learning from data: CPT estimation for a fixed structure, latent-class
//! mixtures fitted by EM, and greedy structure search.

mod dataset;
mod mixture;
mod params;
mod structure;

pub use dataset::Dataset;
pub use mixture::{
    best_permutation_agreement, em_fit, em_fit_restarts, majority_labels, select_classes, ClassCountScore,
    ClassSelection, EmConfig, MixtureModel,
};
pub use params::{bic_score, learn_cpts, CountTable, EmptyRowWarning, LearnedNet, StructureScore};
pub use structure::{greedy_structure_search, OrderingConstraint, SearchConfig, StructureResult};
