//! Bipartite graphs, the Znám edge bound, and exhaustive search for complete
//! bipartite subgraphs.
//!
//! A bipartite graph whose edge count exceeds [`znam_bound`]`(n, t)` must
//! contain a complete bipartite subgraph K_{t,t}; [`find_biclique`] locates
//! one exhaustively (up to the stated caps) and re-verifies it before
//! reporting.

use std::collections::BTreeSet;

use rand::Rng;
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::impossibility::{bits_and, bits_count, bits_ones, bits_set, Bits256};

/// Maximum vertices per side accepted by [`find_biclique`].
pub const MAX_BICLIQUE_SIDE: usize = 256;

/// Maximum biclique order accepted by [`find_biclique`].
pub const MAX_BICLIQUE_ORDER: usize = 4;

/// A bipartite graph on vertex sets `{0..left} × {0..right}` given by its
/// edge set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BipartiteGraph {
    left: usize,
    right: usize,
    adjacency: BTreeSet<(usize, usize)>,
}

impl BipartiteGraph {
    /// Builds a graph, rejecting out-of-range endpoints.
    pub fn new(
        left: usize,
        right: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut adjacency = BTreeSet::new();
        for (i, j) in edges {
            if i >= left || j >= right {
                return Err(Error::InvalidInput(format!(
                    "edge ({i}, {j}) is out of range for a {left} x {right} graph"
                )));
            }
            adjacency.insert((i, j));
        }
        Ok(BipartiteGraph { left, right, adjacency })
    }

    /// The complete graph K_{left,right}.
    pub fn complete(left: usize, right: usize) -> Self {
        BipartiteGraph::new(left, right, (0..left).flat_map(|i| (0..right).map(move |j| (i, j))))
            .expect("generated edges are in range")
    }

    /// A uniformly random graph with exactly `edges` distinct edges.
    pub fn random(left: usize, right: usize, edges: usize, rng: &mut impl Rng) -> Result<Self> {
        if edges > left * right {
            return Err(Error::InvalidInput(format!(
                "requested {edges} edges but a {left} x {right} graph has only {} slots",
                left * right
            )));
        }
        let picks = rand::seq::index::sample(rng, left * right, edges);
        BipartiteGraph::new(left, right, picks.iter().map(|e| (e / right, e % right)))
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency.contains(&(i, j))
    }

    /// Edges in ascending `(left, right)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().copied()
    }
}

#[derive(Serialize, Deserialize)]
struct GraphWire {
    left: usize,
    right: usize,
    edges: Vec<(usize, usize)>,
}

impl Serialize for BipartiteGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GraphWire { left: self.left, right: self.right, edges: self.edges().collect() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BipartiteGraph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let w = GraphWire::deserialize(deserializer)?;
        BipartiteGraph::new(w.left, w.right, w.edges).map_err(D::Error::custom)
    }
}

/// The Znám bound `(t−1)^{1/t}·n^{2−1/t} + (t−1)·n/2`: a bipartite graph with
/// both sides of size `n` and strictly more edges contains a K_{t,t}.
pub fn znam_bound(n: usize, t: usize) -> f64 {
    assert!(n >= 1 && t >= 1, "znam_bound requires n, t >= 1");
    let (n, t) = (n as f64, t as f64);
    (t - 1.0).powf(1.0 / t) * n.powf(2.0 - 1.0 / t) + 0.5 * (t - 1.0) * n
}

/// Finds a complete bipartite subgraph K_{s,s}, or `None` when the graph has
/// none.
///
/// Enumerates `s`-subsets of the smaller side in ascending order, intersecting
/// neighborhood bitsets and pruning branches whose common neighborhood drops
/// below `s`. The witness is the lexicographically smallest in that order,
/// re-verified edge by edge before being returned as ascending
/// `(left_vertices, right_vertices)`.
pub fn find_biclique(g: &BipartiteGraph, s: usize) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    if s == 0 {
        return Err(Error::InvalidInput("biclique order must be at least 1".into()));
    }
    if s > MAX_BICLIQUE_ORDER {
        return Err(Error::CapExceeded {
            what: "biclique order",
            requested: s as u128,
            limit: MAX_BICLIQUE_ORDER as u128,
        });
    }
    let side = g.left.max(g.right);
    if side > MAX_BICLIQUE_SIDE {
        return Err(Error::CapExceeded {
            what: "bipartite side",
            requested: side as u128,
            limit: MAX_BICLIQUE_SIDE as u128,
        });
    }
    if g.left.min(g.right) < s {
        return Ok(None);
    }

    // Search over the smaller side so the subset enumeration is cheapest;
    // `transposed` remembers whether row indices are right-side vertices.
    let transposed = g.right < g.left;
    let (rows, _cols) = if transposed { (g.right, g.left) } else { (g.left, g.right) };
    let mut nb: Vec<Bits256> = vec![[0u64; 4]; rows];
    for &(i, j) in &g.adjacency {
        let (r, c) = if transposed { (j, i) } else { (i, j) };
        bits_set(&mut nb[r], c);
    }

    let found = (0..rows)
        .into_par_iter()
        .filter_map(|r0| {
            if bits_count(&nb[r0]) < s as u32 {
                return None;
            }
            let mut chosen = vec![r0];
            dfs_rows(&nb, s, &mut chosen, nb[r0], rows)
        })
        .min_by(|a, b| a.0.cmp(&b.0));

    let Some((row_set, col_set)) = found else {
        return Ok(None);
    };
    let (lefts, rights) = if transposed { (col_set, row_set) } else { (row_set, col_set) };
    for &i in &lefts {
        for &j in &rights {
            assert!(g.has_edge(i, j), "biclique witness failed re-verification");
        }
    }
    Ok(Some((lefts, rights)))
}

/// Depth-first extension of `chosen` by strictly larger row indices; returns
/// the first (lexicographically smallest) complete `s`-subset whose common
/// neighborhood still has `s` columns.
fn dfs_rows(
    nb: &[Bits256],
    s: usize,
    chosen: &mut Vec<usize>,
    common: Bits256,
    rows: usize,
) -> Option<(Vec<usize>, Vec<usize>)> {
    if chosen.len() == s {
        let cols: Vec<usize> = bits_ones(&common).take(s).collect();
        return Some((chosen.clone(), cols));
    }
    for r in chosen.last().unwrap() + 1..rows {
        let next = bits_and(&common, &nb[r]);
        if bits_count(&next) < s as u32 {
            continue;
        }
        chosen.push(r);
        if let Some(w) = dfs_rows(nb, s, chosen, next, rows) {
            return Some(w);
        }
        chosen.pop();
    }
    None
}
