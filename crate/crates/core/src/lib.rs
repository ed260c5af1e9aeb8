//! Hybrid propagation of aleatory and epistemic uncertainty.
//!
//! Aleatory inputs are sampled by Monte Carlo, epistemic inputs enter as
//! α-cut intervals of possibility distributions, and the decision maker's
//! triplet (γS, γE, γA) fixes the sample size and evaluation budget before
//! anything is run.
//!
//! ```
//! use rafu::config::StudyConfig;
//! use rafu::engine::{plan, propagate};
//!
//! let config = StudyConfig::from_json(r#"{
//!     "parameters": [
//!         {"name": "x1", "aleatory": {"kind": "uniform", "lo": 0, "hi": 1}},
//!         {"name": "e1", "epistemic": {"kind": "triangular", "a": 0, "core": 1, "b": 2}}
//!     ],
//!     "model": "x1 + e1",
//!     "triplet": {"gamma_s": 0.95, "gamma_e": 0, "gamma_a": 0.99}
//! }"#).unwrap();
//! let plan = plan(&config).unwrap();
//! assert_eq!(plan.sample_size, 90);
//! let sample = propagate(&plan, &config).unwrap();
//! let bound = rafu::postprocess::percentile_bound(&sample, &plan, false).unwrap();
//! assert!(bound > 2.0);
//! ```

pub mod cli;
pub mod config;
pub mod engine;
pub mod model;
pub mod orderstats;
pub mod possibility;
pub mod postprocess;
pub mod probability;

pub use config::{load_config, DmTriplet, GammaE, GammaS, StudyConfig};
pub use engine::{plan, propagate, FuzzySample, Plan};
pub use possibility::{Interval, PossibilityDist};
pub use postprocess::PBox;
pub use probability::{ProbabilityDist, StepFunction};
