//! Bayesian-network diagnosis of decimal-comparison misconceptions.
//!
//! The crate builds the expert-elicited student network from a declarative
//! expectation table, classifies students from their per-type scores, runs
//! the comparison, prediction and adaptiveness evaluations, learns parameters,
//! mixtures and structures from data, and drives an adaptive item-selection
//! session exposed over HTTP.
//!
//! ```
//! use dct_bn::model::{ClassPrior, ExpertModel, FineClass, Pcm, ValueScheme};
//!
//! let model = ExpertModel::table1();
//! let net = model
//!     .build_student_net(ValueScheme::Band, Pcm::MID, &ClassPrior::table2())
//!     .unwrap();
//! let posterior = net.classify(&[0, 5, 0, 4, 3, 3]).unwrap();
//! assert_eq!(posterior.map_state(), FineClass::Lwh.label());
//! ```

pub mod adaptive;
pub mod bn;
pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod learn;
pub mod model;
pub mod service;

pub use error::{Error, Result};
