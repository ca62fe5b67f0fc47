//! Peer vs. external influence decomposition for activation cascades on
//! social networks, with a cascade simulator, configuration-model null
//! control, parameter calibration, and homophily profiles.

pub mod calibrator;
pub mod cascade;
pub mod error;
pub mod estimator;
pub mod generate;
pub mod graph;
pub mod homophily;
pub mod io;
pub mod manifest;
pub mod simulator;

pub use cascade::{Cascade, Horizon, Window};
pub use error::{Error, Result};
pub use estimator::{Attribution, EvalAt, InfluenceSeries, PeerParams, WindowDecomposition};
pub use graph::{Network, NodeAttributes, NodeId};
pub use simulator::{ExternalSpike, GroundTruth, LabeledCascade, SeedNode, SimConfig};
