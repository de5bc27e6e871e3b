//! Crate-wide error umbrella for the experiment and tuning layers.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error(transparent)]
    Mobility(#[from] crate::mobility::MobilityError),
    #[error(transparent)]
    Link(#[from] crate::link::LinkError),
    #[error(transparent)]
    Discovery(#[from] crate::discovery::DiscoveryError),
    #[error(transparent)]
    Metrics(#[from] crate::metrics::MetricsError),
    #[error(transparent)]
    Hnn(#[from] crate::hnn::HnnError),
    #[error(transparent)]
    Pso(#[from] crate::pso::PsoError),
    #[error(transparent)]
    Baseline(#[from] crate::baselines::BaselineError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
