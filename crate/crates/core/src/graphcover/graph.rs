use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple undirected graph on integer node labels.
///
/// Edges are stored as `(min, max)` pairs in lexicographic order; the node set
/// is the set of edge endpoints plus any explicitly added isolated nodes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    nodes: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nodes: Option<Vec<usize>>,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;
    fn try_from(raw: RawGraph) -> Result<Self> {
        let edges: Vec<(usize, usize)> = raw.edges.iter().map(|e| (e[0], e[1])).collect();
        match raw.nodes {
            Some(nodes) => Graph::with_nodes(&nodes, &edges),
            None => Graph::from_edges(&edges),
        }
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> Self {
        RawGraph {
            nodes: Some(g.nodes),
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

impl Graph {
    /// Graph whose nodes are exactly the edge endpoints.
    pub fn from_edges(edges: &[(usize, usize)]) -> Result<Self> {
        Self::with_nodes(&[], edges)
    }

    /// Graph on nodes `0..n`.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= n || b >= n) {
            return Err(Error::InvalidGraph(format!(
                "edge ({a}, {b}) outside 0..{n}"
            )));
        }
        Self::with_nodes(&(0..n).collect::<Vec<_>>(), edges)
    }

    /// Graph with the given extra nodes in addition to edge endpoints.
    pub fn with_nodes(nodes: &[usize], edges: &[(usize, usize)]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at node {a}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({a}, {b})")));
            }
        }
        let mut node_set: BTreeSet<usize> = nodes.iter().copied().collect();
        for &(a, b) in &set {
            node_set.insert(a);
            node_set.insert(b);
        }
        Ok(Graph {
            nodes: node_set.into_iter().collect(),
            edges: set.into_iter().collect(),
        })
    }

    /// Parses either a JSON document (`{"edges": [[i, j], ...]}` or a bare
    /// `[[i, j], ...]` array) or whitespace-separated `i j` lines; `#` starts a
    /// comment in the text form.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            return Ok(serde_json::from_str::<Graph>(trimmed)?);
        }
        if trimmed.starts_with('[') {
            let edges: Vec<[usize; 2]> = serde_json::from_str(trimmed)?;
            return Graph::from_edges(&edges.iter().map(|e| (e[0], e[1])).collect::<Vec<_>>());
        }
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|_| {
                    Error::InvalidGraph(format!("line {}: bad node label {s:?}", lineno + 1))
                })
            };
            if fields.len() != 2 {
                return Err(Error::InvalidGraph(format!(
                    "line {}: expected two node labels",
                    lineno + 1
                )));
            }
            edges.push((parse(fields[0])?, parse(fields[1])?));
        }
        Graph::from_edges(&edges)
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Node count.
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Whether every node is reachable from every other.
    pub fn is_connected(&self) -> bool {
        if self.nodes.len() <= 1 {
            return true;
        }
        let index = |v: usize| self.nodes.binary_search(&v).unwrap();
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.edges {
            adj[index(a)].push(index(b));
            adj[index(b)].push(index(a));
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub(crate) fn require_connected(&self) -> Result<()> {
        if self.edges.is_empty() {
            return Err(Error::InvalidGraph("graph has no edges".into()));
        }
        if !self.is_connected() {
            return Err(Error::InvalidGraph("graph is disconnected".into()));
        }
        Ok(())
    }

    /// Whether edges `i` and `j` (indices into [`edges`](Self::edges)) share a node.
    pub fn edges_adjacent(&self, i: usize, j: usize) -> bool {
        let (a, b) = self.edges[i];
        let (c, d) = self.edges[j];
        i != j && (a == c || a == d || b == c || b == d)
    }
}
