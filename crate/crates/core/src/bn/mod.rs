//! Generic discrete Bayesian networks with exact inference.
//!
//! Inference runs variable elimination over the ancestral subgraph of the
//! query and evidence, using a greedy min-fill ordering. Full-joint
//! enumeration is kept alongside as the reference method; the two must agree
//! to floating-point accuracy on every net.

mod factor;
mod inference;
mod net;

pub use inference::{
    argmax, change_ratios, entropy, rank_classes, Evidence, InferenceMethod, JointPosterior, Posterior,
};
pub use net::{BayesNet, Diagnostic, NetDocument, NodeDocument, Variable, ROW_SUM_TOLERANCE};

pub(crate) use net::{is_ancestor, topological_order};
