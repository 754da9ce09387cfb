//! Built-in edge-coloring adversaries.
//!
//! The guarantee being tested quantifies over every coloring, so the
//! adversary is an input, not part of the theorem. These colorers supply
//! reproducible adversaries: an unbiased random one, a greedy one that
//! actively avoids completing short monochromatic cycles (the structures
//! the gadget finders look for), a structured one keyed to vertex-class
//! pairs, and a loader for externally crafted colorings.

use std::collections::HashSet;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphcore::{EdgeColoring, Graph};

/// Longest cycle the greedy adversary tries not to complete. The gadget
/// finders hunt cycles of length three through six, so six is the default.
pub const DEFAULT_AVOID_BOUND: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ColorerSpec {
    /// Every edge uniform over 1..=k from the seeded generator.
    UniformRandom,
    /// Edges in id order take the color completing the fewest new
    /// monochromatic cycles of length at most `cycle_bound`.
    ProperGreedyAvoid {
        #[serde(default = "default_avoid_bound")]
        cycle_bound: usize,
    },
    /// Vertices split by parity; the three class pairs stripe across the
    /// palette.
    BipartitionStripe,
    /// JSON file holding an array of [u, v, color] entries covering every
    /// edge of the graph exactly.
    FromFile { path: String },
}

fn default_avoid_bound() -> usize {
    DEFAULT_AVOID_BOUND
}

#[derive(Debug, Error)]
pub enum ColorerError {
    #[error("zero colors requested")]
    ZeroColors,
    #[error("coloring file {path}: {message}")]
    File { path: String, message: String },
    #[error("coloring file omits edge ({u}, {v})")]
    MissingEdge { u: u32, v: u32 },
    #[error("coloring file names ({u}, {v}), which is not an edge of the graph")]
    UnknownEdge { u: u32, v: u32 },
    #[error("coloring file lists edge ({u}, {v}) more than once")]
    DuplicateEdge { u: u32, v: u32 },
    #[error("edge ({u}, {v}) colored {color}, outside 1..={k}")]
    ColorOutOfRange { u: u32, v: u32, color: u32, k: u32 },
}

/// Produces a total coloring of the graph's edges with colors 1..=k.
/// With a single color every descriptor degenerates to the only possible
/// coloring.
pub fn color_edges(
    spec: &ColorerSpec,
    graph: &Graph,
    k: u32,
    seed: u64,
) -> Result<EdgeColoring, ColorerError> {
    if k == 0 {
        return Err(ColorerError::ZeroColors);
    }
    if k == 1 {
        if let ColorerSpec::FromFile { path } = spec {
            return from_file(path, graph, k);
        }
        return Ok(EdgeColoring::monochrome(1, graph.edge_count()));
    }
    match spec {
        ColorerSpec::UniformRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let color =
                (0..graph.edge_count()).map(|_| rng.random_range(1..=k)).collect();
            Ok(EdgeColoring { k, color })
        }
        ColorerSpec::ProperGreedyAvoid { cycle_bound } => {
            Ok(greedy_avoid(graph, k, *cycle_bound))
        }
        ColorerSpec::BipartitionStripe => {
            let mut color = Vec::with_capacity(graph.edge_count());
            for (_, u, v) in graph.edges() {
                let rank = (u % 2) + (v % 2); // 0: even-even, 1: mixed, 2: odd-odd
                color.push(rank % k + 1);
            }
            Ok(EdgeColoring { k, color })
        }
        ColorerSpec::FromFile { path } => from_file(path, graph, k),
    }
}

/// Counts the simple paths of length < `bound` from `u` to `v` whose edges
/// all wear color `c` — each is a cycle of length <= `bound` that coloring
/// (u, v) with c would complete. Counting stops at `cap` since the greedy
/// rule only compares magnitudes.
fn mono_paths(
    graph: &Graph,
    colored: &[u32],
    c: u32,
    u: u32,
    v: u32,
    bound: usize,
    cap: usize,
) -> usize {
    fn dfs(
        graph: &Graph,
        colored: &[u32],
        c: u32,
        here: u32,
        target: u32,
        left: usize,
        visited: &mut HashSet<u32>,
        count: &mut usize,
        cap: usize,
    ) {
        if *count >= cap {
            return;
        }
        for &w in graph.neighbors(here) {
            let id = graph.edge_id(here, w).unwrap();
            if colored[id] != c {
                continue;
            }
            if w == target {
                *count += 1;
                if *count >= cap {
                    return;
                }
                continue;
            }
            if left > 1 && !visited.contains(&w) {
                visited.insert(w);
                dfs(graph, colored, c, w, target, left - 1, visited, count, cap);
                visited.remove(&w);
            }
        }
    }
    let mut count = 0;
    let mut visited = HashSet::from([u, v]);
    // Paths of length < bound: at most bound - 1 edges, the last of which
    // lands on v.
    dfs(graph, colored, c, u, v, bound - 1, &mut visited, &mut count, cap);
    count
}

fn greedy_avoid(graph: &Graph, k: u32, bound: usize) -> EdgeColoring {
    let mut colored = vec![0u32; graph.edge_count()];
    let mut usage = vec![0usize; k as usize + 1];
    for (id, u, v) in graph.edges() {
        // Fewest completed cycles wins; ties go to the color used least
        // so far, which keeps the classes balanced and steers later ties
        // away from forced completions a color-1 bias would pile up.
        let mut best = 1u32;
        let mut best_key = (usize::MAX, usize::MAX);
        for c in 1..=k {
            let created = mono_paths(graph, &colored, c, u, v, bound, 1000);
            let key = (created, usage[c as usize]);
            if key < best_key {
                best_key = key;
                best = c;
            }
        }
        colored[id] = best;
        usage[best as usize] += 1;
    }
    EdgeColoring { k, color: colored }
}

fn from_file(path: &str, graph: &Graph, k: u32) -> Result<EdgeColoring, ColorerError> {
    let text = std::fs::read_to_string(Path::new(path)).map_err(|e| {
        ColorerError::File { path: path.to_string(), message: e.to_string() }
    })?;
    let entries: Vec<(u32, u32, u32)> = serde_json::from_str(&text).map_err(|e| {
        ColorerError::File { path: path.to_string(), message: e.to_string() }
    })?;
    let mut color = vec![0u32; graph.edge_count()];
    let mut filled = vec![false; graph.edge_count()];
    for (u, v, c) in entries {
        let id = graph.edge_id(u, v).ok_or(ColorerError::UnknownEdge { u, v })?;
        if filled[id] {
            return Err(ColorerError::DuplicateEdge { u, v });
        }
        if c < 1 || c > k {
            return Err(ColorerError::ColorOutOfRange { u, v, color: c, k });
        }
        filled[id] = true;
        color[id] = c;
    }
    for (id, u, v) in graph.edges() {
        if !filled[id] {
            return Err(ColorerError::MissingEdge { u, v });
        }
    }
    Ok(EdgeColoring { k, color })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete_graph(n: u32) -> Graph {
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                pairs.push((i, j));
            }
        }
        Graph::from_edges(n as usize, &pairs).unwrap()
    }

    fn mono_triangles(graph: &Graph, coloring: &EdgeColoring) -> usize {
        let n = graph.vertex_count() as u32;
        let mut count = 0;
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    let (Some(ab), Some(bc), Some(ac)) = (
                        graph.edge_id(a, b),
                        graph.edge_id(b, c),
                        graph.edge_id(a, c),
                    ) else {
                        continue;
                    };
                    if coloring.of(ab) == coloring.of(bc)
                        && coloring.of(bc) == coloring.of(ac)
                    {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn one_color_means_one_coloring_for_every_descriptor() {
        let g = complete_graph(5);
        for spec in [
            ColorerSpec::UniformRandom,
            ColorerSpec::ProperGreedyAvoid { cycle_bound: DEFAULT_AVOID_BOUND },
            ColorerSpec::BipartitionStripe,
        ] {
            let c = color_edges(&spec, &g, 1, 7).unwrap();
            assert!(c.color.iter().all(|&x| x == 1), "{spec:?}");
        }
    }

    #[test]
    fn zero_colors_is_an_error() {
        let g = complete_graph(3);
        assert!(matches!(
            color_edges(&ColorerSpec::UniformRandom, &g, 0, 7),
            Err(ColorerError::ZeroColors)
        ));
    }

    #[test]
    fn uniform_random_is_reproducible_and_uses_the_palette() {
        let g = complete_graph(12);
        let a = color_edges(&ColorerSpec::UniformRandom, &g, 3, 41).unwrap();
        let b = color_edges(&ColorerSpec::UniformRandom, &g, 3, 41).unwrap();
        assert_eq!(a, b);
        let c = color_edges(&ColorerSpec::UniformRandom, &g, 3, 42).unwrap();
        assert_ne!(a, c);
        for want in 1..=3 {
            assert!(a.color.contains(&want));
        }
        assert!(a.color.iter().all(|&x| (1..=3).contains(&x)));
    }

    #[test]
    fn stripe_colors_depend_only_on_endpoint_parity() {
        let g = Graph::from_edges(6, &[(0, 2), (0, 1), (1, 3), (2, 4), (3, 5), (2, 3)])
            .unwrap();
        let c = color_edges(&ColorerSpec::BipartitionStripe, &g, 2, 0).unwrap();
        let of = |u: u32, v: u32| c.of(g.edge_id(u, v).unwrap());
        assert_eq!(of(0, 2), 1); // even-even
        assert_eq!(of(2, 4), 1);
        assert_eq!(of(0, 1), 2); // mixed
        assert_eq!(of(2, 3), 2);
        assert_eq!(of(1, 3), 1); // odd-odd wraps back around the palette
        assert_eq!(of(3, 5), 1);
    }

    #[test]
    fn greedy_avoid_two_colors_k4_without_a_monochromatic_triangle() {
        let g = complete_graph(4);
        let c = color_edges(
            &ColorerSpec::ProperGreedyAvoid { cycle_bound: 3 },
            &g,
            2,
            0,
        )
        .unwrap();
        assert_eq!(mono_triangles(&g, &c), 0);
    }

    #[test]
    fn greedy_choices_are_locally_minimal() {
        // Replay the greedy run on K5 and check every choice created no
        // more short monochromatic cycles than any alternative color
        // would have at that moment.
        let g = complete_graph(5);
        let c = color_edges(
            &ColorerSpec::ProperGreedyAvoid { cycle_bound: 3 },
            &g,
            3,
            0,
        )
        .unwrap();
        let mut prefix = vec![0u32; g.edge_count()];
        for (id, u, v) in g.edges() {
            let chosen = mono_paths(&g, &prefix, c.of(id), u, v, 3, 1000);
            for alt in 1..=3 {
                let other = mono_paths(&g, &prefix, alt, u, v, 3, 1000);
                assert!(
                    chosen <= other,
                    "edge ({u}, {v}): color {} created {chosen}, color {alt} \
                     would have created {other}",
                    c.of(id)
                );
            }
            prefix[id] = c.of(id);
        }
    }

    #[test]
    fn greedy_avoid_stays_total_when_cycles_are_unavoidable() {
        // Any 2-coloring of K6 has a monochromatic triangle, so the greedy
        // adversary can only minimize, never eliminate.
        let g = complete_graph(6);
        let c = color_edges(
            &ColorerSpec::ProperGreedyAvoid { cycle_bound: 3 },
            &g,
            2,
            0,
        )
        .unwrap();
        assert!(c.color.iter().all(|&x| (1..=2).contains(&x)));
        assert!(mono_triangles(&g, &c) >= 1);
    }

    #[test]
    fn file_colorer_round_trips_and_rejects_gaps() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let dir = std::env::temp_dir();
        let full = dir.join("colorer_full.json");
        std::fs::write(&full, "[[0,1,2],[1,2,1],[2,3,2]]").unwrap();
        let spec = ColorerSpec::FromFile { path: full.to_str().unwrap().into() };
        let c = color_edges(&spec, &g, 2, 0).unwrap();
        assert_eq!(c.of(g.edge_id(1, 2).unwrap()), 1);
        assert_eq!(c.of(g.edge_id(2, 3).unwrap()), 2);

        let partial = dir.join("colorer_partial.json");
        std::fs::write(&partial, "[[0,1,2],[2,3,2]]").unwrap();
        let spec = ColorerSpec::FromFile { path: partial.to_str().unwrap().into() };
        assert!(matches!(
            color_edges(&spec, &g, 2, 0),
            Err(ColorerError::MissingEdge { u: 1, v: 2 })
        ));

        let foreign = dir.join("colorer_foreign.json");
        std::fs::write(&foreign, "[[0,3,1],[0,1,1],[1,2,1],[2,3,1]]").unwrap();
        let spec = ColorerSpec::FromFile { path: foreign.to_str().unwrap().into() };
        assert!(matches!(
            color_edges(&spec, &g, 2, 0),
            Err(ColorerError::UnknownEdge { u: 0, v: 3 })
        ));

        let loud = dir.join("colorer_loud.json");
        std::fs::write(&loud, "[[0,1,7],[1,2,1],[2,3,1]]").unwrap();
        let spec = ColorerSpec::FromFile { path: loud.to_str().unwrap().into() };
        assert!(matches!(
            color_edges(&spec, &g, 2, 0),
            Err(ColorerError::ColorOutOfRange { color: 7, k: 2, .. })
        ));

        let twice = dir.join("colorer_twice.json");
        std::fs::write(&twice, "[[0,1,1],[1,0,2],[1,2,1],[2,3,1]]").unwrap();
        let spec = ColorerSpec::FromFile { path: twice.to_str().unwrap().into() };
        assert!(matches!(
            color_edges(&spec, &g, 2, 0),
            Err(ColorerError::DuplicateEdge { .. })
        ));
    }
}
