use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::NodeId;

/// Problems building or validating a [`Graph`](crate::Graph).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a graph needs at least one node")]
    Empty,
    #[error("node {node} is out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("graph too large: {0} exceeds the 32-bit node id space")]
    TooLarge(usize),
    #[error("nodes with zero out-degree: {0:?}")]
    Dangling(Vec<NodeId>),
}

/// A query the oracle cannot answer. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("node {node} is out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("parent index {index} out of range for node {node} with in-degree {degree}")]
    ParentIndex { node: NodeId, index: usize, degree: usize },
    #[error("child index {index} out of range for node {node} with out-degree {degree}")]
    ChildIndex { node: NodeId, index: usize, degree: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(&'static str),
    #[error("target {target} is out of range for a graph with {n} nodes")]
    TargetOutOfRange { target: NodeId, n: usize },
    #[error("infeasible instance: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Query(#[from] QueryError),
}
