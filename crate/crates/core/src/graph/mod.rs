// SPDX-License-Identifier: Apache-2.0

//! Circuit graphs built from elaborated netlists.
//!
//! One node per port (the clock port excepted) and per cell instance, ports
//! first in declaration order, then cells in source order. A directed edge
//! runs from the driver of each net to every reader of that net. The clock
//! net contributes no edges.

pub mod gml;
pub mod sparse;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::netlist::{Driver, NetId, Netlist, Sink};

pub use sparse::{adjacency_matrix, normalize_adjacency, NormalizedAdjacency, SparseMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("malformed GML at line {line}: {msg}")]
    Gml { line: usize, msg: String },
    #[error("duplicate node id {0}")]
    DuplicateNodeId(i64),
    #[error("edge references unknown node id {0}")]
    UnknownNodeId(i64),
    #[error("node ids must be dense 0..{count}; missing id {missing}")]
    NonDenseIds { count: usize, missing: usize },
    #[error("self edge on node {0}")]
    SelfEdge(usize),
    #[error("adjacency matrix is not symmetric at ({row}, {col})")]
    NonSymmetric { row: usize, col: usize },
    #[error("adjacency matrix must be 0/1 with zero diagonal; entry ({row}, {col}) = {value}")]
    InvalidAdjacency { row: usize, col: usize, value: f64 },
    #[error("permutation of length {got} does not match {expected} nodes")]
    BadPermutation { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Port,
    Gate,
    FlipFlop,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Port => "port",
            NodeKind::Gate => "gate",
            NodeKind::FlipFlop => "flipflop",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NodeKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "port" => Ok(NodeKind::Port),
            "gate" => Ok(NodeKind::Gate),
            "flipflop" => Ok(NodeKind::FlipFlop),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
}

/// Node index = position in `nodes`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CircuitGraph {
    pub nodes: Vec<Node>,
    /// Driver -> sink, no self edges, no duplicates.
    pub edges: Vec<(usize, usize)>,
}

impl CircuitGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    /// Indices of flip-flop nodes in node order.
    pub fn flipflop_nodes(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.kind == NodeKind::FlipFlop)
            .map(|(i, _)| i)
            .collect()
    }

    /// Sorted, deduplicated neighbor lists of the symmetrized graph.
    pub fn undirected_neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Relabels nodes: old node `i` becomes node `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<CircuitGraph, GraphError> {
        let n = self.nodes.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(GraphError::BadPermutation {
                expected: n,
                got: perm.len(),
            });
        }
        let mut nodes = vec![None; n];
        for (old, node) in self.nodes.iter().enumerate() {
            nodes[perm[old]] = Some(node.clone());
        }
        Ok(CircuitGraph {
            nodes: nodes.into_iter().map(|n| n.unwrap()).collect(),
            edges: self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect(),
        })
    }
}

pub fn build_graph(n: &Netlist) -> CircuitGraph {
    let clock_port = n.clock_port();
    let mut nodes = Vec::with_capacity(n.ports.len() + n.cells.len());
    let mut port_node = vec![usize::MAX; n.ports.len()];
    for (i, p) in n.ports.iter().enumerate() {
        if Some(i) == clock_port {
            continue;
        }
        port_node[i] = nodes.len();
        nodes.push(Node {
            name: p.name.clone(),
            kind: NodeKind::Port,
        });
    }
    let cell_base = nodes.len();
    for c in &n.cells {
        nodes.push(Node {
            name: c.name.clone(),
            kind: if c.kind.is_sequential() {
                NodeKind::FlipFlop
            } else {
                NodeKind::Gate
            },
        });
    }

    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for net in (0..n.nets.len()).map(NetId) {
        if Some(net) == n.clock() {
            continue;
        }
        let src = match n.driver(net) {
            Driver::Port(p) => port_node[p],
            Driver::Cell(c) => cell_base + c,
        };
        for sink in n.sinks(net) {
            let dst = match *sink {
                Sink::Port(p) => port_node[p],
                Sink::CellPin(c, _) => cell_base + c,
            };
            if src != dst && seen.insert((src, dst)) {
                edges.push((src, dst));
            }
        }
    }
    CircuitGraph { nodes, edges }
}
