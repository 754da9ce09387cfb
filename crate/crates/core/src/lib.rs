//! Sparse host graphs that force monochromatic cycles of an exact target
//! length, no matter how an adversary colors their edges.
//!
//! The pipeline builds a host in two layers: a random linear uniform
//! hypergraph with a short list of verified sparseness properties, and a
//! small fixed gadget graph placed on every hyperedge. Given any edge
//! coloring of the host with a bounded number of colors, a staged search
//! (dense color class, expander extraction, good-path growth, good trees,
//! ball closing, lifting) produces a cycle of exactly the requested length
//! in one color, together with a certificate that an independent checker
//! can replay against nothing but the host, the coloring, and the cycle.

pub mod colorer;
pub mod cycleclose;
pub mod expander;
pub mod gadgets;
pub mod goodness;
pub mod graphcore;
pub mod hostbuild;
pub mod hypergen;
pub mod pipeline;
pub mod profile;
pub mod search;

pub use graphcore::{Graph, Hypergraph, IntersectionGraph};
