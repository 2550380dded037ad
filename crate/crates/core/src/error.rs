// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size mismatch: expected {expected} qubits, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{what} supports at most {max} qubits, got {n}")]
    TooLarge {
        what: &'static str,
        n: usize,
        max: usize,
    },

    #[error("channel is not trace preserving (max deviation {deviation:e})")]
    NotTracePreserving { deviation: f64 },

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("empty record set")]
    EmptyRecords,

    #[error("records mix protocol variants or register sizes")]
    MixedVariants,

    #[error("degenerate counts: {0}")]
    DegenerateCounts(String),

    #[error("maximum-likelihood fit did not converge (gradient norm {grad_norm:e})")]
    NonConvergence { p_last: Vec<f64>, grad_norm: f64 },

    #[error("schema mismatch: expected {expected}, found {found}")]
    SchemaVersion { expected: String, found: String },

    #[error("missing section `{0}`")]
    MissingSection(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn check_size(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::SizeMismatch { expected, found })
        }
    }
}
