//! Bundled example data.

use crate::error::Result;
use crate::multigraph::{read_edge_csv, MultiEdgeNetwork};

const KARATE_EDGES: &str = include_str!("../data/karate_edges.csv");
const KARATE_FACTIONS: &str = include_str!("../data/karate_factions.csv");
const EXAMPLE_EDGES: &str = include_str!("../data/example_edges.csv");

/// Zachary's karate club: co-occurrence counts across social contexts, with
/// the post-split club as attribute `faction`.
pub fn karate() -> Result<MultiEdgeNetwork> {
    let rows = read_edge_csv(KARATE_EDGES.as_bytes())?;
    MultiEdgeNetwork::from_edge_list(&rows, &[])?.with_attribute_csv(KARATE_FACTIONS.as_bytes())
}

/// The four-node illustration network (a, b, c, d).
pub fn example() -> Result<MultiEdgeNetwork> {
    let rows = read_edge_csv(EXAMPLE_EDGES.as_bytes())?;
    MultiEdgeNetwork::from_edge_list(&rows, &[])
}
