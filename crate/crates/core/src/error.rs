use thiserror::Error;

/// Problems detected before any trial runs: bad parameters, unknown names,
/// unreadable configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("suite `{suite}` has no variant `{variant}`")]
    UnknownVariant { suite: String, variant: String },
    #[error("iterations must be at least 1")]
    ZeroIterations,
    #[error("step cap must be at least 1")]
    ZeroStepCap,
    #[error("eps must be a finite non-negative number, got {0}")]
    BadEps(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("suite definition is incomplete: {0}")]
    IncompleteSuite(String),
    #[error("failed to start external program `{command}`: {reason}")]
    Spawn { command: String, reason: String },
    #[error("bad configuration file: {0}")]
    ConfigFile(String),
}
