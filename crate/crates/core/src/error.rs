use thiserror::Error;

use crate::graph::{EdgeId, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph with {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },

    #[error("edge {0} does not exist")]
    UnknownEdge(EdgeId),

    #[error("graph size overflow: {0}")]
    SizeOverflow(String),

    #[error("boundary set is empty")]
    EmptyBoundary,

    #[error("edge {0} is dropped by the wired quotient")]
    EdgeDropped(EdgeId),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("edge set is not a spanning tree of the graph")]
    NotSpanningTree,

    #[error("{what} of size {size} exceeds the limit {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("vertex {0} is not a valid invasion source")]
    BadSource(VertexId),

    #[error("sample is empty")]
    EmptySample,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0}")]
    Io(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
