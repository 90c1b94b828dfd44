use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::graph::Graph;
use crate::error::{Error, Result};

/// Per-edge lower bound of the two-body weak-monotonicity relaxation for an
/// adjacent pair of singlet-projector edges, to the stated three decimals.
pub const WM2_EDGE_VALUE: f64 = -0.811;

/// Disjoint pairs of adjacent edges plus at most one unmatched edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgePairing {
    pub pairs: Vec<((usize, usize), (usize, usize))>,
    pub unmatched: Option<(usize, usize)>,
    /// Number of re-pairing moves performed while building the cover.
    pub repairs: usize,
}

impl EdgePairing {
    /// Checks every structural invariant against `g`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let mut used = std::collections::BTreeSet::new();
        let shares_node = |e: (usize, usize), f: (usize, usize)| {
            e.0 == f.0 || e.0 == f.1 || e.1 == f.0 || e.1 == f.1
        };
        for &(e, f) in &self.pairs {
            if !shares_node(e, f) || e == f {
                return Err(Error::InvalidGraph(format!(
                    "pair {e:?}, {f:?} is not adjacent"
                )));
            }
            for x in [e, f] {
                if !used.insert(x) {
                    return Err(Error::InvalidGraph(format!("edge {x:?} used twice")));
                }
            }
        }
        if let Some(u) = self.unmatched {
            if !used.insert(u) {
                return Err(Error::InvalidGraph(format!("edge {u:?} used twice")));
            }
        }
        if used.len() != g.edge_count() || g.edges().iter().any(|e| !used.contains(e)) {
            return Err(Error::InvalidGraph(
                "pairing does not cover the edge set exactly".into(),
            ));
        }
        if self.unmatched.is_some() != (g.edge_count() % 2 == 1) {
            return Err(Error::InvalidGraph(
                "unmatched edge present iff |E| odd is violated".into(),
            ));
        }
        Ok(())
    }
}

/// Line-graph breadth-first search from edge `src`; returns predecessor links
/// and hop counts (adjacent edges have hop count 1).
fn line_graph_bfs(g: &Graph, adj: &[Vec<usize>], src: usize) -> (Vec<Option<usize>>, Vec<usize>) {
    let m = g.edge_count();
    let mut parent = vec![None; m];
    let mut hops = vec![usize::MAX; m];
    hops[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if hops[w] == usize::MAX {
                hops[w] = hops[u] + 1;
                parent[w] = Some(u);
                queue.push_back(w);
            }
        }
    }
    (parent, hops)
}

/// Builds the pairing by the constructive induction on unmatched edges:
/// pair the two closest unmatched edges when adjacent, otherwise re-pair the
/// matched edge next to one of them along a shortest path, which shortens the
/// distance between unmatched edges.
///
/// Distances count intermediate edges on line-graph paths; ties go to the
/// lexicographically smallest pair of edge indices.
pub fn edge_pair_cover(g: &Graph) -> Result<EdgePairing> {
    g.require_connected()?;
    let m = g.edge_count();
    let adj: Vec<Vec<usize>> = (0..m)
        .map(|i| (0..m).filter(|&j| g.edges_adjacent(i, j)).collect())
        .collect();
    let mut partner: Vec<Option<usize>> = vec![None; m];
    let mut repairs = 0usize;

    loop {
        let unmatched: Vec<usize> = (0..m).filter(|&e| partner[e].is_none()).collect();
        if unmatched.len() < 2 {
            break;
        }
        // Closest unmatched pair (f, g).
        let mut best: Option<(usize, usize, usize, Vec<Option<usize>>)> = None;
        for &f in &unmatched {
            let (parent, hops) = line_graph_bfs(g, &adj, f);
            for &h in unmatched.iter().filter(|&&h| h > f) {
                let d = hops[h];
                if best.as_ref().map_or(true, |b| d < b.0) {
                    best = Some((d, f, h, parent.clone()));
                }
            }
        }
        let (hops, f, target, parent) = best.expect("at least two unmatched edges");
        if hops == 1 {
            partner[f] = Some(target);
            partner[target] = Some(f);
            continue;
        }
        // Walk back from the target to find the edge following f on the path.
        let mut step = target;
        while parent[step] != Some(f) {
            step = parent[step].expect("connected line graph");
        }
        let e = step;
        let e_partner = partner[e].expect("intermediate edges on a shortest path are matched");
        partner[e] = None;
        partner[e_partner] = None;
        if g.edges_adjacent(e_partner, f) {
            partner[e_partner] = Some(f);
            partner[f] = Some(e_partner);
        } else {
            partner[e] = Some(f);
            partner[f] = Some(e);
        }
        repairs += 1;
        assert!(repairs <= m * m, "re-pairing exceeded |E|^2 steps");
    }

    let edges = g.edges();
    let mut pairs = Vec::new();
    for e in 0..m {
        if let Some(p) = partner[e] {
            if e < p {
                pairs.push((edges[e], edges[p]));
            }
        }
    }
    let unmatched = (0..m).find(|&e| partner[e].is_none()).map(|e| edges[e]);
    Ok(EdgePairing {
        pairs,
        unmatched,
        repairs,
    })
}

/// Energy lower bound with the pairing that certifies it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairBound {
    pub bound: f64,
    pub pairing: EdgePairing,
}

/// `WM2_EDGE_VALUE·(|E| − δ) − δ` with `δ = |E| mod 2`: every adjacent pair of
/// singlet-projector edges contributes at least `2·WM2_EDGE_VALUE`, and the
/// leftover edge at least −1.
///
/// For even edge counts this is tighter than `−0.811|E−1| − 1` by one unit of
/// `1 + WM2_EDGE_VALUE`.
pub fn epr_wm_bound(g: &Graph) -> Result<PairBound> {
    let pairing = edge_pair_cover(g)?;
    let odd = (g.edge_count() % 2) as f64;
    let bound = WM2_EDGE_VALUE * (g.edge_count() as f64 - odd) - odd;
    Ok(PairBound { bound, pairing })
}
