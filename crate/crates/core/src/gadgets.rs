//! Gadget graphs placed on every hyperedge of the host, and the finders
//! that, given any edge coloring of one gadget copy, extract the
//! monochromatic short cycle that copy is responsible for.
//!
//! Three families, one per pipeline mode:
//!
//! * complete graphs `K_{2^k+1}` (non-induced mode): every k-coloring
//!   contains a monochromatic odd cycle, because a graph whose color
//!   classes are all bipartite is a product of 2-colorings and would fit in
//!   `2^k` vertices;
//! * point–line incidence graphs of projective planes (even-induced mode):
//!   bipartite, girth 6, so any 6-cycle found inside a color class is
//!   automatically induced;
//! * verified triangle-free graphs (odd-induced mode): any 5-cycle in a
//!   triangle-free graph is induced.

use crate::graphcore::{graph_girth, is_induced_cycle, EdgeColoring, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::str::FromStr;
use thiserror::Error;

/// Which kind of monochromatic cycle the pipeline hunts for, and whether the
/// final host cycle must be induced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CycleMode {
    /// Even target length; gadget bipartite with girth ≥ 6; cycle induced.
    #[serde(rename = "even")]
    EvenInduced,
    /// Odd target length; gadget triangle-free; cycle induced.
    #[serde(rename = "odd")]
    OddInduced,
    /// Any target length; gadget complete; cycle need not be induced.
    #[serde(rename = "non-induced")]
    NonInduced,
}

impl CycleMode {
    pub fn requires_induced(self) -> bool {
        !matches!(self, CycleMode::NonInduced)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GadgetError {
    #[error("gadget size budget exceeded: need {needed}, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("random triangle-free generator reached {achieved} edges, wanted at least {target}")]
    DensityNotReached { achieved: usize, target: usize },
    #[error("operation requires gadget mode {expected}")]
    WrongMode { expected: &'static str },
    #[error("unrecognized gadget descriptor: {0}")]
    BadDescriptor(String),
    #[error("gadget invariant violated: {0}")]
    InvalidGadget(&'static str),
    #[error("coloring covers {got} edges, gadget has {expected}")]
    ColoringMismatch { expected: usize, got: usize },
    #[error("enumeration budget exceeded: {needed} colorings, budget {budget}")]
    EnumerationBudget { needed: u128, budget: u128 },
}

/// Hard cap on gadget vertex count; constructors refuse anything larger.
pub const GADGET_SIZE_BUDGET: usize = 1 << 12;

/// When the 5-cycle claim procedure's working set drops below this floor it
/// switches to exhaustive monochromatic 5-cycle search over the whole gadget.
pub const C5_EXHAUSTIVE_FLOOR: usize = 8;

// ---------------------------------------------------------------------------
// Gadget
// ---------------------------------------------------------------------------

/// A small fixed graph placed on each hyperedge. `s` (its vertex count)
/// must equal the host hypergraph's uniformity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gadget {
    pub graph: Graph,
    pub mode: CycleMode,
    pub s: usize,
}

impl Gadget {
    /// Validates the mode invariant: even-induced gadgets are bipartite with
    /// girth ≥ 6, odd-induced gadgets are triangle-free, non-induced gadgets
    /// are complete.
    pub fn new(graph: Graph, mode: CycleMode) -> Result<Gadget, GadgetError> {
        let n = graph.vertex_count();
        if n > GADGET_SIZE_BUDGET {
            return Err(GadgetError::BudgetExceeded {
                needed: n as u128,
                budget: GADGET_SIZE_BUDGET as u128,
            });
        }
        match mode {
            CycleMode::EvenInduced => {
                if two_color_classes(&graph).is_none() {
                    return Err(GadgetError::InvalidGadget("even-induced gadget must be bipartite"));
                }
                if graph_girth(&graph, 5).is_some() {
                    return Err(GadgetError::InvalidGadget("even-induced gadget must have girth >= 6"));
                }
            }
            CycleMode::OddInduced => {
                if has_triangle(&graph) {
                    return Err(GadgetError::InvalidGadget("odd-induced gadget must be triangle-free"));
                }
            }
            CycleMode::NonInduced => {
                if graph.edge_count() != n * (n - 1) / 2 {
                    return Err(GadgetError::InvalidGadget("non-induced gadget must be complete"));
                }
            }
        }
        Ok(Gadget { graph, mode, s: n })
    }
}

fn has_triangle(g: &Graph) -> bool {
    for (_, u, v) in g.edges() {
        let (nu, nv) = (g.neighbors(u), g.neighbors(v));
        let (mut i, mut j) = (0, 0);
        while i < nu.len() && j < nv.len() {
            match nu[i].cmp(&nv[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
    }
    false
}

/// BFS 2-coloring; `None` when an odd cycle exists.
fn two_color_classes(g: &Graph) -> Option<Vec<bool>> {
    let n = g.vertex_count();
    let mut side = vec![u8::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n as u32 {
        if side[start as usize] != u8::MAX {
            continue;
        }
        side[start as usize] = 0;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if side[v as usize] == u8::MAX {
                    side[v as usize] = 1 - side[u as usize];
                    queue.push_back(v);
                } else if side[v as usize] == side[u as usize] {
                    return None;
                }
            }
        }
    }
    Some(side.into_iter().map(|x| x == 0).collect())
}

// ---------------------------------------------------------------------------
// Descriptors and constructors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum GadgetDescriptor {
    Complete { k: u32 },
    Incidence { q: u32 },
    TriangleFree(TriangleFreeKind),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TriangleFreeKind {
    C5,
    Petersen,
    Random { n: usize, p: f64 },
}

impl GadgetDescriptor {
    /// Number of vertices the built gadget will have, computed from the
    /// descriptor alone (the random family reports its requested size).
    pub fn vertex_count_hint(&self) -> usize {
        match self {
            GadgetDescriptor::Complete { k } => {
                1usize.checked_shl(*k).map_or(usize::MAX, |x| x.saturating_add(1))
            }
            GadgetDescriptor::Incidence { q } => {
                let q = *q as usize;
                2 * (q * q + q + 1)
            }
            GadgetDescriptor::TriangleFree(TriangleFreeKind::C5) => 5,
            GadgetDescriptor::TriangleFree(TriangleFreeKind::Petersen) => 10,
            GadgetDescriptor::TriangleFree(TriangleFreeKind::Random { n, .. }) => *n,
        }
    }
}

impl FromStr for GadgetDescriptor {
    type Err = GadgetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GadgetError::BadDescriptor(s.to_string());
        if let Some(rest) = s.strip_prefix("complete:") {
            let k = rest.strip_prefix("k=").ok_or_else(bad)?.parse().map_err(|_| bad())?;
            return Ok(GadgetDescriptor::Complete { k });
        }
        if let Some(rest) = s.strip_prefix("incidence:") {
            let q = rest.strip_prefix("q=").ok_or_else(bad)?.parse().map_err(|_| bad())?;
            return Ok(GadgetDescriptor::Incidence { q });
        }
        if let Some(rest) = s.strip_prefix("trianglefree:") {
            return match rest {
                "c5" => Ok(GadgetDescriptor::TriangleFree(TriangleFreeKind::C5)),
                "petersen" => Ok(GadgetDescriptor::TriangleFree(TriangleFreeKind::Petersen)),
                other => {
                    let mut n = None;
                    let mut p = None;
                    let mut parts = other.split(',');
                    if parts.next() != Some("random") {
                        return Err(bad());
                    }
                    for kv in parts {
                        if let Some(v) = kv.strip_prefix("n=") {
                            n = Some(v.parse().map_err(|_| bad())?);
                        } else if let Some(v) = kv.strip_prefix("p=") {
                            p = Some(v.parse().map_err(|_| bad())?);
                        } else {
                            return Err(bad());
                        }
                    }
                    match (n, p) {
                        (Some(n), Some(p)) => {
                            Ok(GadgetDescriptor::TriangleFree(TriangleFreeKind::Random { n, p }))
                        }
                        _ => Err(bad()),
                    }
                }
            };
        }
        Err(bad())
    }
}

impl std::fmt::Display for GadgetDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GadgetDescriptor::Complete { k } => write!(f, "complete:k={k}"),
            GadgetDescriptor::Incidence { q } => write!(f, "incidence:q={q}"),
            GadgetDescriptor::TriangleFree(TriangleFreeKind::C5) => write!(f, "trianglefree:c5"),
            GadgetDescriptor::TriangleFree(TriangleFreeKind::Petersen) => {
                write!(f, "trianglefree:petersen")
            }
            GadgetDescriptor::TriangleFree(TriangleFreeKind::Random { n, p }) => {
                write!(f, "trianglefree:random,n={n},p={p}")
            }
        }
    }
}

impl Serialize for GadgetDescriptor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GadgetDescriptor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// Builds the gadget a descriptor names. The seed only matters for the
/// random triangle-free family.
pub fn build_gadget(desc: &GadgetDescriptor, seed: u64) -> Result<Gadget, GadgetError> {
    match desc {
        GadgetDescriptor::Complete { k } => complete_gadget(*k),
        GadgetDescriptor::Incidence { q } => incidence_gadget(*q),
        GadgetDescriptor::TriangleFree(kind) => trianglefree_gadget(kind, seed),
    }
}

/// `K_{2^k+1}`: the smallest complete graph on which every k-edge-coloring
/// has a non-bipartite color class.
pub fn complete_gadget(k: u32) -> Result<Gadget, GadgetError> {
    if k < 1 {
        return Err(GadgetError::BadDescriptor(format!("complete:k={k} (k must be >= 1)")));
    }
    let n = 1usize
        .checked_shl(k)
        .and_then(|x| x.checked_add(1))
        .filter(|&x| x <= GADGET_SIZE_BUDGET)
        .ok_or(GadgetError::BudgetExceeded {
            needed: (1u128 << k.min(127)) + 1,
            budget: GADGET_SIZE_BUDGET as u128,
        })?;
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n as u32 {
        for b in (a + 1)..n as u32 {
            edges.push((a, b));
        }
    }
    let graph = Graph::from_edges(n, &edges).expect("complete graph edges are valid");
    Gadget::new(graph, CycleMode::NonInduced)
}

/// Point–line incidence graph of the projective plane of order `q`:
/// `2(q²+q+1)` vertices, `(q+1)`-regular, bipartite, girth 6. Points come
/// first, lines after. `q` must be a prime power.
pub fn incidence_gadget(q: u32) -> Result<Gadget, GadgetError> {
    let field = FieldTables::new(q).ok_or(GadgetError::NotPrimePower(q))?;
    let q = q as usize;
    let plane_size = q * q + q + 1;
    if 2 * plane_size > GADGET_SIZE_BUDGET {
        return Err(GadgetError::BudgetExceeded {
            needed: 2 * plane_size as u128,
            budget: GADGET_SIZE_BUDGET as u128,
        });
    }
    // Normalized homogeneous triples: first nonzero coordinate is 1.
    let mut triples: Vec<[usize; 3]> = Vec::with_capacity(plane_size);
    for y in 0..q {
        for z in 0..q {
            triples.push([1, y, z]);
        }
    }
    for z in 0..q {
        triples.push([0, 1, z]);
    }
    triples.push([0, 0, 1]);
    debug_assert_eq!(triples.len(), plane_size);

    let mut edges = Vec::with_capacity((q + 1) * plane_size);
    for (pi, point) in triples.iter().enumerate() {
        for (li, line) in triples.iter().enumerate() {
            let dot = field.add(
                field.add(field.mul(point[0], line[0]), field.mul(point[1], line[1])),
                field.mul(point[2], line[2]),
            );
            if dot == 0 {
                edges.push((pi as u32, (plane_size + li) as u32));
            }
        }
    }
    let graph = Graph::from_edges(2 * plane_size, &edges).expect("incidences are unique");
    debug_assert!(graph.support().iter().all(|&v| graph.degree(v) == q + 1));
    Gadget::new(graph, CycleMode::EvenInduced)
}

/// Triangle-free gadget: explicit 5-cycle, the Petersen graph, or a random
/// graph made triangle-free by deleting one edge per triangle. The random
/// generator retries with stepped seeds until the post-deletion edge count
/// reaches half the expected pre-deletion count.
pub fn trianglefree_gadget(kind: &TriangleFreeKind, seed: u64) -> Result<Gadget, GadgetError> {
    match kind {
        TriangleFreeKind::C5 => {
            let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
            Gadget::new(g, CycleMode::OddInduced)
        }
        TriangleFreeKind::Petersen => {
            let mut edges = Vec::with_capacity(15);
            for i in 0..5u32 {
                edges.push((i, (i + 1) % 5)); // outer 5-cycle
                edges.push((i, i + 5)); // spokes
                edges.push((i + 5, (i + 2) % 5 + 5)); // inner pentagram
            }
            let g = Graph::from_edges(10, &edges).unwrap();
            Gadget::new(g, CycleMode::OddInduced)
        }
        TriangleFreeKind::Random { n, p } => {
            if *n > GADGET_SIZE_BUDGET {
                return Err(GadgetError::BudgetExceeded {
                    needed: *n as u128,
                    budget: GADGET_SIZE_BUDGET as u128,
                });
            }
            let target = ((*p * (*n as f64) * ((*n - 1) as f64) / 2.0) / 2.0).floor() as usize;
            let mut last_achieved = 0;
            for attempt in 0..5u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
                let mut edges = Vec::new();
                for a in 0..*n as u32 {
                    for b in (a + 1)..*n as u32 {
                        if rng.random::<f64>() < *p {
                            edges.push((a, b));
                        }
                    }
                }
                let g = Graph::from_edges(*n, &edges).unwrap();
                let g = delete_triangles(&g);
                last_achieved = g.edge_count();
                if last_achieved >= target {
                    return Gadget::new(g, CycleMode::OddInduced);
                }
            }
            Err(GadgetError::DensityNotReached { achieved: last_achieved, target })
        }
    }
}

/// Repeatedly removes the lexicographically largest edge of the first
/// triangle found, until no triangle remains.
fn delete_triangles(g: &Graph) -> Graph {
    let mut edges: Vec<(u32, u32)> = g.edges().map(|(_, u, v)| (u, v)).collect();
    loop {
        let cur = Graph::from_edges(g.vertex_count(), &edges).unwrap();
        let mut removed = false;
        'scan: for (_, u, v) in cur.edges() {
            let (nu, nv) = (cur.neighbors(u), cur.neighbors(v));
            let (mut i, mut j) = (0, 0);
            while i < nu.len() && j < nv.len() {
                match nu[i].cmp(&nv[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        let w = nu[i];
                        // Triangle u, v, w: drop its largest edge.
                        let mut tri = [(u.min(v), u.max(v)), (u.min(w), u.max(w)), (v.min(w), v.max(w))];
                        tri.sort_unstable();
                        let worst = tri[2];
                        edges.retain(|&e| e != worst);
                        removed = true;
                        break 'scan;
                    }
                }
            }
        }
        if !removed {
            return cur;
        }
    }
}

// ---------------------------------------------------------------------------
// Finite field tables for prime powers
// ---------------------------------------------------------------------------

/// Add/mul tables for GF(p^e), built from the smallest monic irreducible
/// polynomial of degree e over GF(p) (found by brute force). Elements are
/// encoded as base-p digit strings packed into integers.
struct FieldTables {
    q: usize,
    add: Vec<usize>,
    mul: Vec<usize>,
}

impl FieldTables {
    fn new(q: u32) -> Option<FieldTables> {
        let (p, e) = prime_power_split(q)?;
        let q = q as usize;
        let p = p as usize;
        let to_digits = |mut x: usize| -> Vec<usize> {
            let mut d = vec![0; e as usize];
            for slot in d.iter_mut() {
                *slot = x % p;
                x /= p;
            }
            d
        };
        let from_digits = |d: &[usize]| -> usize {
            d.iter().rev().fold(0, |acc, &c| acc * p + c)
        };
        // Monic irreducible of degree e: coefficients c_0..c_{e-1} (low to
        // high) with implicit leading 1, smallest by packed code.
        let modulus: Vec<usize> = if e == 1 {
            vec![0] // x - 0 placeholder; arithmetic is plain mod p
        } else {
            (0..q)
                .map(to_digits)
                .find(|cand| poly_is_irreducible(cand, p))?
        };
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..q {
            for b in 0..q {
                let (da, db) = (to_digits(a), to_digits(b));
                let sum: Vec<usize> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
                add[a * q + b] = from_digits(&sum);
                // Polynomial product reduced mod (x^e + modulus).
                let mut prod = vec![0usize; 2 * e as usize];
                for (i, &x) in da.iter().enumerate() {
                    for (j, &y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for i in (e as usize..prod.len()).rev() {
                    let c = prod[i];
                    if c == 0 {
                        continue;
                    }
                    prod[i] = 0;
                    for (j, &mc) in modulus.iter().enumerate() {
                        let idx = i - e as usize + j;
                        prod[idx] = (prod[idx] + c * (p - mc % p)) % p;
                    }
                }
                mul[a * q + b] = from_digits(&prod[..e as usize]);
            }
        }
        Some(FieldTables { q, add, mul })
    }

    fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.q + b]
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.q + b]
    }
}

fn prime_power_split(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|&d| q % d == 0)?; // smallest prime factor
    let mut x = q;
    let mut e = 0;
    while x % p == 0 {
        x /= p;
        e += 1;
    }
    (x == 1).then_some((p, e))
}

/// Irreducibility of the monic polynomial x^e + c (c given low-to-high) over
/// GF(p), by trial division with every monic polynomial of degree 1..=e/2.
fn poly_is_irreducible(c: &[usize], p: usize) -> bool {
    let e = c.len();
    let mut poly: Vec<usize> = c.to_vec();
    poly.push(1);
    // Iterate monic divisors of degree d: coefficients b_0..b_{d-1}.
    for d in 1..=e / 2 {
        let count = p.pow(d as u32);
        for code in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut x = code;
            for _ in 0..d {
                div.push(x % p);
                x /= p;
            }
            div.push(1);
            if poly_divides(&div, &poly, p) {
                return false;
            }
        }
    }
    true
}

fn poly_divides(div: &[usize], poly: &[usize], p: usize) -> bool {
    let mut rem: Vec<usize> = poly.to_vec();
    let d = div.len() - 1;
    while rem.len() > d {
        let lead = *rem.last().unwrap();
        if lead != 0 {
            let shift = rem.len() - 1 - d;
            for (j, &dc) in div.iter().enumerate() {
                rem[shift + j] = (rem[shift + j] + lead * (p - dc % p)) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&x| x == 0)
}

// ---------------------------------------------------------------------------
// Gadget cycles and finders
// ---------------------------------------------------------------------------

/// A monochromatic cycle found inside one gadget copy, with the anchor pair
/// whose two connecting arcs later become the short/long lift paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetCycle {
    /// Cycle vertices in order (gadget-local ids).
    pub vertices: Vec<u32>,
    pub color: u32,
    /// Anchor endpoints, sorted ascending.
    pub anchor: (u32, u32),
    /// Arc from anchor.0 to anchor.1 along the cycle, the shorter way.
    pub short_path: Vec<u32>,
    /// Arc from anchor.0 to anchor.1 the longer way.
    pub long_path: Vec<u32>,
}

impl GadgetCycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Packages a found cycle with the lexicographically least anchor pair at
/// the requested cyclic distance.
fn anchored_cycle(cycle: Vec<u32>, color: u32, anchor_dist: usize) -> GadgetCycle {
    let len = cycle.len();
    debug_assert!(anchor_dist >= 1 && 2 * anchor_dist < len + 1);
    let mut best: Option<(u32, u32, usize)> = None;
    for i in 0..len {
        let j = (i + anchor_dist) % len;
        let (a, b) = (cycle[i].min(cycle[j]), cycle[i].max(cycle[j]));
        if best.map_or(true, |(ba, bb, _)| (a, b) < (ba, bb)) {
            best = Some((a, b, i));
        }
    }
    let (a, b, i) = best.expect("cycle nonempty");
    let _j = (i + anchor_dist) % len;
    let mut short: Vec<u32> = (0..=anchor_dist).map(|t| cycle[(i + t) % len]).collect();
    let mut long: Vec<u32> = (0..=(len - anchor_dist)).map(|t| cycle[(i + len - t) % len]).collect();
    // Orient both arcs from anchor a to anchor b.
    if short[0] != a {
        short.reverse();
        long.reverse();
    }
    debug_assert_eq!((short[0], *short.last().unwrap()), (a, b));
    debug_assert_eq!((long[0], *long.last().unwrap()), (a, b));
    GadgetCycle { vertices: cycle, color, anchor: (a, b), short_path: short, long_path: long }
}

/// Per-vertex adjacency annotated with edge colors, so finders can walk one
/// color class without rebuilding graphs.
struct ColoredView<'a> {
    gadget: &'a Graph,
    coloring: &'a EdgeColoring,
}

impl<'a> ColoredView<'a> {
    fn new(gadget: &'a Gadget, coloring: &'a EdgeColoring) -> Result<ColoredView<'a>, GadgetError> {
        if coloring.color.len() != gadget.graph.edge_count() {
            return Err(GadgetError::ColoringMismatch {
                expected: gadget.graph.edge_count(),
                got: coloring.color.len(),
            });
        }
        Ok(ColoredView { gadget: &gadget.graph, coloring })
    }

    /// Colors ordered by decreasing class size, ties to the smaller color.
    fn colors_by_density(&self) -> Vec<u32> {
        let mut counts = vec![0usize; self.coloring.k as usize + 1];
        for &c in &self.coloring.color {
            counts[c as usize] += 1;
        }
        let mut order: Vec<u32> = (1..=self.coloring.k).collect();
        order.sort_by_key(|&c| (std::cmp::Reverse(counts[c as usize]), c));
        order
    }

    fn class_neighbors(&self, u: u32, color: u32) -> impl Iterator<Item = u32> + '_ {
        self.gadget.neighbors(u).iter().copied().filter(move |&v| {
            self.coloring.of(self.gadget.edge_id(u, v).unwrap()) == color
        })
    }

    fn class_degree(&self, u: u32, color: u32) -> usize {
        self.class_neighbors(u, color).count()
    }
}

/// Non-induced mode: scan color classes densest-first; in each, run a
/// bipartiteness BFS and extract an odd cycle from the first same-parity
/// edge via the ancestor walk. `None` means every class is bipartite.
pub fn find_mono_odd_cycle(
    gadget: &Gadget,
    coloring: &EdgeColoring,
) -> Result<Option<GadgetCycle>, GadgetError> {
    if gadget.mode != CycleMode::NonInduced {
        return Err(GadgetError::WrongMode { expected: "non-induced" });
    }
    let view = ColoredView::new(gadget, coloring)?;
    for color in view.colors_by_density() {
        if let Some(cycle) = odd_cycle_in_class(&view, color) {
            let len = cycle.len();
            let gc = anchored_cycle(cycle, color, (len - 1) / 2);
            debug_assert!(cycle_is_monochromatic(&gadget.graph, coloring, &gc.vertices, color));
            return Ok(Some(gc));
        }
    }
    Ok(None)
}

fn odd_cycle_in_class(view: &ColoredView, color: u32) -> Option<Vec<u32>> {
    let n = view.gadget.vertex_count();
    let mut parity = vec![u8::MAX; n];
    let mut parent = vec![u32::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n as u32 {
        if parity[start as usize] != u8::MAX || view.class_degree(start, color) == 0 {
            continue;
        }
        parity[start as usize] = 0;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for v in view.class_neighbors(u, color) {
                if parity[v as usize] == u8::MAX {
                    parity[v as usize] = 1 - parity[u as usize];
                    parent[v as usize] = u;
                    queue.push_back(v);
                } else if parity[v as usize] == parity[u as usize] {
                    // Same-parity edge closes an odd cycle through the
                    // lowest common ancestor.
                    let mut left = vec![u];
                    let mut right = vec![v];
                    loop {
                        let (lu, lv) = (*left.last().unwrap(), *right.last().unwrap());
                        if lu == lv {
                            break;
                        }
                        left.push(parent[lu as usize]);
                        right.push(parent[lv as usize]);
                    }
                    // left = u..lca, right = v..lca (equal depths, so the
                    // lockstep walk stops exactly at the LCA). Cycle order:
                    // u, …, lca, …, v, closed by the conflict edge vu.
                    let mut cycle = left;
                    cycle.extend(right.iter().rev().skip(1));
                    debug_assert!(cycle.len() % 2 == 1);
                    return Some(cycle);
                }
            }
        }
    }
    None
}

/// Even-induced mode: densest class first; per class, BFS from each edge's
/// endpoint in the class minus that edge looking for a distance-5 return
/// path. Girth ≥ 6 makes any found 6-cycle induced.
pub fn find_mono_c6(
    gadget: &Gadget,
    coloring: &EdgeColoring,
) -> Result<Option<GadgetCycle>, GadgetError> {
    if gadget.mode != CycleMode::EvenInduced {
        return Err(GadgetError::WrongMode { expected: "even-induced" });
    }
    let view = ColoredView::new(gadget, coloring)?;
    for color in view.colors_by_density() {
        for (eid, u, v) in gadget.graph.edges() {
            if coloring.of(eid) != color {
                continue;
            }
            if let Some(path) = class_path_of_length(&view, color, u, v, 5, eid) {
                let gc = anchored_cycle(path, color, 2);
                debug_assert!(cycle_is_monochromatic(&gadget.graph, coloring, &gc.vertices, color));
                debug_assert_eq!(is_induced_cycle(&gadget.graph, &gc.vertices), Ok(true));
                return Ok(Some(gc));
            }
        }
    }
    Ok(None)
}

/// Shortest path from `u` to `v` inside one color class avoiding edge
/// `skip_eid`; returns the cycle `u..v` when that distance is exactly
/// `want_len`.
fn class_path_of_length(
    view: &ColoredView,
    color: u32,
    u: u32,
    v: u32,
    want_len: usize,
    skip_eid: usize,
) -> Option<Vec<u32>> {
    let n = view.gadget.vertex_count();
    let mut dist = vec![u32::MAX; n];
    let mut parent = vec![u32::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    dist[u as usize] = 0;
    queue.push_back(u);
    while let Some(x) = queue.pop_front() {
        if dist[x as usize] as usize >= want_len {
            break;
        }
        for y in view.class_neighbors(x, color) {
            if view.gadget.edge_id(x, y) == Some(skip_eid) {
                continue;
            }
            if dist[y as usize] == u32::MAX {
                dist[y as usize] = dist[x as usize] + 1;
                parent[y as usize] = x;
                queue.push_back(y);
            }
        }
    }
    if dist[v as usize] as usize != want_len {
        return None;
    }
    let mut path = vec![v];
    while *path.last().unwrap() != u {
        path.push(parent[*path.last().unwrap() as usize]);
    }
    path.reverse();
    Some(path)
}

/// Odd-induced mode: the shrinking-neighborhood claim procedure. Maintains
/// a working vertex set U; each round restricts to the most frequent color
/// on U, prunes to minimum degree ≥ e/|U|, and either exhibits a 5-cycle
/// v–x′–x–y–y′ or recurses into the second neighborhood. Below the floor it
/// falls back to exhaustive monochromatic 5-cycle search over the whole
/// gadget, so `None` is definitive absence.
pub fn find_mono_c5(
    gadget: &Gadget,
    coloring: &EdgeColoring,
) -> Result<Option<GadgetCycle>, GadgetError> {
    if gadget.mode != CycleMode::OddInduced {
        return Err(GadgetError::WrongMode { expected: "odd-induced" });
    }
    let view = ColoredView::new(gadget, coloring)?;
    let n = gadget.graph.vertex_count();
    let mut u_set: Vec<u32> = (0..n as u32).collect();

    while u_set.len() >= C5_EXHAUSTIVE_FLOOR {
        let in_u = mark(n, &u_set);
        // Most frequent color on the induced subgraph F[U].
        let mut counts = vec![0usize; coloring.k as usize + 1];
        for (eid, a, b) in gadget.graph.edges() {
            if in_u[a as usize] && in_u[b as usize] {
                counts[coloring.of(eid) as usize] += 1;
            }
        }
        let (best_color, best_count) = (1..=coloring.k)
            .map(|c| (c, counts[c as usize]))
            .max_by_key(|&(c, cnt)| (cnt, std::cmp::Reverse(c)))
            .unwrap_or((1, 0));
        if best_count == 0 {
            break;
        }
        // Prune to minimum degree >= e(F")/|U| with the threshold frozen at
        // its initial value; the edge/vertex ratio never drops below it.
        let threshold = best_count as f64 / u_set.len() as f64;
        let mut alive = in_u.clone();
        let class_deg = |alive: &[bool], x: u32| -> usize {
            view.class_neighbors(x, best_color).filter(|&y| alive[y as usize]).count()
        };
        loop {
            let victim = u_set
                .iter()
                .copied()
                .find(|&x| alive[x as usize] && (class_deg(&alive, x) as f64) < threshold);
            match victim {
                Some(x) => alive[x as usize] = false,
                None => break,
            }
        }
        let f_prime: Vec<u32> = u_set.iter().copied().filter(|&x| alive[x as usize]).collect();
        if f_prime.is_empty() {
            break;
        }
        // v = max-degree vertex of F', smallest id on ties.
        let v = *f_prime
            .iter()
            .max_by_key(|&&x| (class_deg(&alive, x), std::cmp::Reverse(x)))
            .unwrap();
        let a_set: Vec<u32> = view
            .class_neighbors(v, best_color)
            .filter(|&y| alive[y as usize])
            .collect();
        let in_a = mark(n, &a_set);
        let mut b_set: Vec<u32> = Vec::new();
        let mut in_b = vec![false; n];
        for &a in &a_set {
            for y in view.class_neighbors(a, best_color) {
                if alive[y as usize] && y != v && !in_a[y as usize] && !in_b[y as usize] {
                    in_b[y as usize] = true;
                    b_set.push(y);
                }
            }
        }
        b_set.sort_unstable();
        // An F'-edge inside B closes the 5-cycle.
        for (eid, x, y) in gadget.graph.edges() {
            if coloring.of(eid) != best_color || !in_b[x as usize] || !in_b[y as usize] {
                continue;
            }
            if !alive[x as usize] || !alive[y as usize] {
                continue;
            }
            let xp = a_set.iter().copied().find(|&a| {
                alive[a as usize] && view.class_neighbors(a, best_color).any(|z| z == x)
            });
            let yp = a_set.iter().copied().find(|&a| {
                alive[a as usize] && view.class_neighbors(a, best_color).any(|z| z == y)
            });
            if let (Some(xp), Some(yp)) = (xp, yp) {
                // Triangle-freeness forces xp != yp (equal would close a
                // triangle with edge xy).
                debug_assert_ne!(xp, yp);
                let cycle = vec![v, xp, x, y, yp];
                let gc = anchored_cycle(cycle, best_color, 2);
                debug_assert!(cycle_is_monochromatic(&gadget.graph, coloring, &gc.vertices, best_color));
                debug_assert_eq!(is_induced_cycle(&gadget.graph, &gc.vertices), Ok(true));
                return Ok(Some(gc));
            }
        }
        if b_set.is_empty() {
            break;
        }
        u_set = b_set;
    }

    // Exhaustive fallback over the whole gadget.
    Ok(exhaustive_mono_c5(gadget, coloring))
}

fn mark(n: usize, set: &[u32]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &x in set {
        m[x as usize] = true;
    }
    m
}

/// Enumerates 5-cycles in canonical orientation and returns the first
/// monochromatic one.
fn exhaustive_mono_c5(gadget: &Gadget, coloring: &EdgeColoring) -> Option<GadgetCycle> {
    let g = &gadget.graph;
    let eid_color = |a: u32, b: u32| coloring.of(g.edge_id(a, b).unwrap());
    for v0 in 0..g.vertex_count() as u32 {
        for &v1 in g.neighbors(v0) {
            if v1 <= v0 {
                continue;
            }
            let c = eid_color(v0, v1);
            for &v2 in g.neighbors(v1) {
                if v2 <= v0 || v2 == v1 || eid_color(v1, v2) != c {
                    continue;
                }
                for &v3 in g.neighbors(v2) {
                    if v3 <= v0 || v3 == v1 || v3 == v2 || eid_color(v2, v3) != c {
                        continue;
                    }
                    for &v4 in g.neighbors(v3) {
                        if v4 <= v1 || v4 == v1 || v4 == v2 || v4 == v3 || v4 == v0 {
                            continue;
                        }
                        if eid_color(v3, v4) != c {
                            continue;
                        }
                        if g.has_edge(v4, v0) && eid_color(v4, v0) == c {
                            return Some(anchored_cycle(vec![v0, v1, v2, v3, v4], c, 2));
                        }
                    }
                }
            }
        }
    }
    None
}

fn cycle_is_monochromatic(g: &Graph, coloring: &EdgeColoring, cycle: &[u32], color: u32) -> bool {
    let k = cycle.len();
    (0..k).all(|i| {
        g.edge_id(cycle[i], cycle[(i + 1) % k])
            .map(|e| coloring.of(e) == color)
            .unwrap_or(false)
    })
}

/// Dispatches to the finder matching the gadget's mode.
pub fn find_for_mode(
    gadget: &Gadget,
    coloring: &EdgeColoring,
) -> Result<Option<GadgetCycle>, GadgetError> {
    match gadget.mode {
        CycleMode::EvenInduced => find_mono_c6(gadget, coloring),
        CycleMode::OddInduced => find_mono_c5(gadget, coloring),
        CycleMode::NonInduced => find_mono_odd_cycle(gadget, coloring),
    }
}

/// Exhaustively checks that the gadget's finder succeeds on every
/// k-coloring. Cost is k^{e(gadget)} finder calls; refused beyond `budget`.
pub fn verify_gadget_ramsey(gadget: &Gadget, k: u32, budget: u128) -> Result<bool, GadgetError> {
    let e = gadget.graph.edge_count();
    let mut needed: u128 = 1;
    for _ in 0..e {
        needed = needed.checked_mul(k as u128).unwrap_or(u128::MAX);
        if needed > budget {
            return Err(GadgetError::EnumerationBudget { needed, budget });
        }
    }
    let mut colors = vec![1u32; e];
    loop {
        let coloring = EdgeColoring { k, color: colors.clone() };
        if find_for_mode(gadget, &coloring)?.is_none() {
            return Ok(false);
        }
        // Odometer increment.
        let mut i = 0;
        loop {
            if i == e {
                return Ok(true);
            }
            if colors[i] < k {
                colors[i] += 1;
                break;
            }
            colors[i] = 1;
            i += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(g: &Gadget) -> EdgeColoring {
        EdgeColoring::monochrome(1, g.graph.edge_count())
    }

    /// Recheck everything a GadgetCycle promises.
    fn validate_cycle(g: &Gadget, coloring: &EdgeColoring, gc: &GadgetCycle, anchor_dist: usize) {
        assert!(cycle_is_monochromatic(&g.graph, coloring, &gc.vertices, gc.color));
        if g.mode.requires_induced() {
            assert_eq!(is_induced_cycle(&g.graph, &gc.vertices), Ok(true));
        }
        assert_eq!(gc.short_path.len() - 1, anchor_dist);
        assert_eq!(gc.long_path.len() - 1, gc.len() - anchor_dist);
        assert_eq!(gc.short_path[0], gc.anchor.0);
        assert_eq!(*gc.short_path.last().unwrap(), gc.anchor.1);
        assert_eq!(gc.long_path[0], gc.anchor.0);
        assert_eq!(*gc.long_path.last().unwrap(), gc.anchor.1);
        // Arcs partition the cycle and meet only at the anchors.
        let mut all: Vec<u32> = gc.short_path.iter().chain(gc.long_path.iter()).copied().collect();
        all.sort_unstable();
        all.dedup();
        let mut cyc = gc.vertices.clone();
        cyc.sort_unstable();
        assert_eq!(all, cyc);
    }

    #[test]
    fn complete_gadget_sizes() {
        assert_eq!(complete_gadget(1).unwrap().graph.edge_count(), 3);
        let k5 = complete_gadget(2).unwrap();
        assert_eq!(k5.graph.vertex_count(), 5);
        assert_eq!(k5.graph.edge_count(), 10);
        assert_eq!(k5.mode, CycleMode::NonInduced);
        let k9 = complete_gadget(3).unwrap();
        assert_eq!(k9.graph.vertex_count(), 9);
        assert_eq!(k9.graph.edge_count(), 36);
        assert!(matches!(complete_gadget(13), Err(GadgetError::BudgetExceeded { .. })));
        assert!(complete_gadget(0).is_err());
    }

    #[test]
    fn incidence_gadget_is_projective_plane() {
        let hw = incidence_gadget(2).unwrap();
        assert_eq!(hw.graph.vertex_count(), 14);
        assert_eq!(hw.graph.edge_count(), 21);
        assert_eq!(graph_girth(&hw.graph, usize::MAX), Some(6));
        assert!((0..14).all(|v| hw.graph.degree(v) == 3));
        assert_eq!(hw.mode, CycleMode::EvenInduced);

        let g3 = incidence_gadget(3).unwrap();
        assert_eq!(g3.graph.vertex_count(), 26);
        assert_eq!(g3.graph.edge_count(), 52);
        assert!((0..26).all(|v| g3.graph.degree(v) == 4));
        assert_eq!(graph_girth(&g3.graph, usize::MAX), Some(6));

        // q = 4 exercises genuine prime-power arithmetic (GF(4)).
        let g4 = incidence_gadget(4).unwrap();
        assert_eq!(g4.graph.vertex_count(), 42);
        assert_eq!(g4.graph.edge_count(), 105);
        assert_eq!(graph_girth(&g4.graph, usize::MAX), Some(6));

        let g8 = incidence_gadget(8).unwrap();
        assert_eq!(g8.graph.vertex_count(), 2 * (64 + 8 + 1));
        assert_eq!(graph_girth(&g8.graph, usize::MAX), Some(6));

        assert_eq!(incidence_gadget(6).unwrap_err(), GadgetError::NotPrimePower(6));
        assert_eq!(incidence_gadget(1).unwrap_err(), GadgetError::NotPrimePower(1));
    }

    #[test]
    fn trianglefree_constructors() {
        let c5 = trianglefree_gadget(&TriangleFreeKind::C5, 0).unwrap();
        assert_eq!(c5.graph.vertex_count(), 5);
        assert_eq!(graph_girth(&c5.graph, usize::MAX), Some(5));

        let pet = trianglefree_gadget(&TriangleFreeKind::Petersen, 0).unwrap();
        assert_eq!(pet.graph.vertex_count(), 10);
        assert_eq!(pet.graph.edge_count(), 15);
        assert_eq!(graph_girth(&pet.graph, usize::MAX), Some(5));
        assert!((0..10).all(|v| pet.graph.degree(v) == 3));

        let rnd = trianglefree_gadget(&TriangleFreeKind::Random { n: 40, p: 0.15 }, 7).unwrap();
        assert!(!has_triangle(&rnd.graph));
        assert_eq!(rnd.mode, CycleMode::OddInduced);
        // Determinism.
        let rnd2 = trianglefree_gadget(&TriangleFreeKind::Random { n: 40, p: 0.15 }, 7).unwrap();
        assert_eq!(rnd.graph, rnd2.graph);
    }

    #[test]
    fn descriptor_round_trip() {
        for s in [
            "complete:k=2",
            "incidence:q=2",
            "trianglefree:c5",
            "trianglefree:petersen",
            "trianglefree:random,n=40,p=0.15",
        ] {
            let d: GadgetDescriptor = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert!("complete".parse::<GadgetDescriptor>().is_err());
        assert!("complete:k=x".parse::<GadgetDescriptor>().is_err());
        assert!("trianglefree:random,n=40".parse::<GadgetDescriptor>().is_err());
        assert!("mystery:1".parse::<GadgetDescriptor>().is_err());
    }

    #[test]
    fn odd_cycle_finder_on_k3_and_k5() {
        let k3 = complete_gadget(1).unwrap();
        let gc = find_mono_odd_cycle(&k3, &mono(&k3)).unwrap().unwrap();
        assert_eq!(gc.len(), 3);
        validate_cycle(&k3, &mono(&k3), &gc, 1);

        // K5 split into a 5-cycle and its complement (also a 5-cycle):
        // both classes are non-bipartite, so a monochromatic C5 exists.
        let k5 = complete_gadget(2).unwrap();
        let ring: std::collections::HashSet<(u32, u32)> =
            (0..5u32).map(|i| ((i).min((i + 1) % 5), (i).max((i + 1) % 5))).collect();
        let color: Vec<u32> = k5
            .graph
            .edges()
            .map(|(_, u, v)| if ring.contains(&(u, v)) { 1 } else { 2 })
            .collect();
        let coloring = EdgeColoring::new(2, color).unwrap();
        let gc = find_mono_odd_cycle(&k5, &coloring).unwrap().unwrap();
        assert_eq!(gc.len(), 5);
        validate_cycle(&k5, &coloring, &gc, 2);

        // Star vs rest: the star class is bipartite, the rest contains K4.
        let color: Vec<u32> = k5.graph.edges().map(|(_, u, _)| if u == 0 { 1 } else { 2 }).collect();
        let coloring = EdgeColoring::new(2, color).unwrap();
        let gc = find_mono_odd_cycle(&k5, &coloring).unwrap().unwrap();
        assert_eq!(gc.color, 2);
        assert_eq!(gc.len() % 2, 1);
        validate_cycle(&k5, &coloring, &gc, (gc.len() - 1) / 2);

        // All classes bipartite: K3 with three colors, one edge each.
        let coloring = EdgeColoring::new(3, vec![1, 2, 3]).unwrap();
        assert_eq!(find_mono_odd_cycle(&k3, &coloring).unwrap(), None);
    }

    #[test]
    fn c6_finder_on_heawood() {
        let hw = incidence_gadget(2).unwrap();
        let coloring = mono(&hw);
        let gc = find_mono_c6(&hw, &coloring).unwrap().unwrap();
        assert_eq!(gc.len(), 6);
        validate_cycle(&hw, &coloring, &gc, 2);
        assert_eq!(gc.short_path.len() - 1, 2);
        assert_eq!(gc.long_path.len() - 1, 4);

        // Every color class a single edge: forests, no cycle anywhere.
        let rainbow = EdgeColoring::new(21, (1..=21).collect()).unwrap();
        assert_eq!(find_mono_c6(&hw, &rainbow).unwrap(), None);
    }

    /// Exhaustive 6-cycle presence oracle for one color class.
    fn class_has_c6(g: &Graph, coloring: &EdgeColoring, color: u32) -> bool {
        let n = g.vertex_count();
        let col = |a: u32, b: u32| coloring.of(g.edge_id(a, b).unwrap());
        let mut stack = Vec::new();
        for v0 in 0..n as u32 {
            stack.push(vec![v0]);
            while let Some(path) = stack.pop() {
                let last = *path.last().unwrap();
                for &nx in g.neighbors(last) {
                    if col(last, nx) != color {
                        continue;
                    }
                    if path.len() == 6 {
                        if nx == path[0] {
                            return true;
                        }
                        continue;
                    }
                    if nx > path[0] && !path.contains(&nx) {
                        let mut p2 = path.clone();
                        p2.push(nx);
                        stack.push(p2);
                    }
                }
            }
        }
        false
    }

    #[test]
    fn c6_finder_agrees_with_enumeration_on_random_split() {
        let hw = incidence_gadget(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let color: Vec<u32> = (0..21).map(|_| if rng.random::<bool>() { 1 } else { 2 }).collect();
        let coloring = EdgeColoring::new(2, color).unwrap();
        let found = find_mono_c6(&hw, &coloring).unwrap();
        let oracle = class_has_c6(&hw.graph, &coloring, 1) || class_has_c6(&hw.graph, &coloring, 2);
        assert_eq!(found.is_some(), oracle);
        if let Some(gc) = found {
            validate_cycle(&hw, &coloring, &gc, 2);
        }
    }

    #[test]
    fn c5_finder_basics() {
        let c5 = trianglefree_gadget(&TriangleFreeKind::C5, 0).unwrap();
        let gc = find_mono_c5(&c5, &mono(&c5)).unwrap().unwrap();
        assert_eq!(gc.len(), 5);
        validate_cycle(&c5, &mono(&c5), &gc, 2);

        let pet = trianglefree_gadget(&TriangleFreeKind::Petersen, 0).unwrap();
        let gc = find_mono_c5(&pet, &mono(&pet)).unwrap().unwrap();
        assert_eq!(gc.len(), 5);
        validate_cycle(&pet, &mono(&pet), &gc, 2);

        // Bipartite triangle-free gadget: no odd cycle at all, any coloring.
        let c6 = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
        let c6 = Gadget::new(c6, CycleMode::OddInduced).unwrap();
        assert_eq!(find_mono_c5(&c6, &mono(&c6)).unwrap(), None);
        let striped = EdgeColoring::new(2, vec![1, 2, 1, 2, 1, 2]).unwrap();
        assert_eq!(find_mono_c5(&c6, &striped).unwrap(), None);
    }

    #[test]
    fn c5_claim_procedure_runs_above_floor() {
        // Petersen has 10 vertices (above the floor of 8), so the first
        // round exercises the claim branch before any fallback.
        let pet = trianglefree_gadget(&TriangleFreeKind::Petersen, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let color: Vec<u32> = (0..15).map(|_| rng.random_range(1..=2)).collect();
            let coloring = EdgeColoring::new(2, color).unwrap();
            let found = find_mono_c5(&pet, &coloring).unwrap();
            let oracle = exhaustive_mono_c5(&pet, &coloring).is_some();
            assert_eq!(found.is_some(), oracle);
            if let Some(gc) = found {
                validate_cycle(&pet, &coloring, &gc, 2);
            }
        }
    }

    #[test]
    fn finders_reject_wrong_mode_and_bad_coloring() {
        let k5 = complete_gadget(2).unwrap();
        assert!(matches!(
            find_mono_c6(&k5, &mono(&k5)),
            Err(GadgetError::WrongMode { .. })
        ));
        assert!(matches!(
            find_mono_c5(&k5, &mono(&k5)),
            Err(GadgetError::WrongMode { .. })
        ));
        let hw = incidence_gadget(2).unwrap();
        assert!(matches!(
            find_mono_odd_cycle(&hw, &mono(&hw)),
            Err(GadgetError::WrongMode { .. })
        ));
        let short = EdgeColoring::monochrome(1, 3);
        assert!(matches!(
            find_mono_c6(&hw, &short),
            Err(GadgetError::ColoringMismatch { expected: 21, got: 3 })
        ));
    }

    #[test]
    fn gadget_mode_invariants_enforced() {
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(Gadget::new(tri.clone(), CycleMode::OddInduced).is_err());
        assert!(Gadget::new(tri.clone(), CycleMode::EvenInduced).is_err());
        assert!(Gadget::new(tri, CycleMode::NonInduced).is_ok());
        // C4 is bipartite but girth 4 < 6.
        let c4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(Gadget::new(c4.clone(), CycleMode::EvenInduced).is_err());
        assert!(Gadget::new(c4, CycleMode::NonInduced).is_err());
    }

    #[test]
    fn ramsey_verification_tiny() {
        let k3 = complete_gadget(1).unwrap();
        assert_eq!(verify_gadget_ramsey(&k3, 1, 10), Ok(true));
        let c5 = trianglefree_gadget(&TriangleFreeKind::C5, 0).unwrap();
        assert_eq!(verify_gadget_ramsey(&c5, 1, 10), Ok(true));
        let hw = incidence_gadget(2).unwrap();
        assert_eq!(verify_gadget_ramsey(&hw, 1, 10), Ok(true));
        // K3 with 2 colors: the coloring with three distinct... two colors
        // can split the triangle so one class is a path: no odd cycle.
        assert_eq!(verify_gadget_ramsey(&k3, 2, 100), Ok(false));
        assert!(matches!(
            verify_gadget_ramsey(&complete_gadget(2).unwrap(), 8, 1000),
            Err(GadgetError::EnumerationBudget { .. })
        ));
    }

    #[test]
    fn k5_is_ramsey_for_two_colors() {
        // The defining property of K_{2^k+1} at k=2, checked over all
        // 2^10 = 1024 colorings.
        let k5 = complete_gadget(2).unwrap();
        assert_eq!(verify_gadget_ramsey(&k5, 2, 2000), Ok(true));
    }
}
