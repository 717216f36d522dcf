// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

use crate::embed::EmbedError;
use crate::eval::EvalError;
use crate::fault::FaultError;
use crate::gcn::GcnError;
use crate::graph::GraphError;
use crate::netlist::NetlistError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Fault(#[from] FaultError),
    #[error(transparent)]
    Gcn(#[from] GcnError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("missing {} (run the `{stage}` stage first)", path.display())]
    MissingArtifact { stage: &'static str, path: PathBuf },
    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// 1 usage or configuration, 2 input data, 3 internal guard.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config(_) => 1,
            Error::Embed(EmbedError::InvalidConfig(_))
            | Error::Gcn(GcnError::InvalidConfig(_))
            | Error::Fault(FaultError::InvalidConfig(_)) => 1,
            Error::Fault(FaultError::GuardExceeded { .. }) => 3,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
