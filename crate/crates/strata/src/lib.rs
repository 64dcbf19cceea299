//! Boundary divisors of multi-scale compactifications of strata of
//! meromorphic 1-forms: enumeration of decorated level graphs,
//! degeneration moves as graph rewrites, connectivity certificates
//! for the divisor adjacency complex, and ends counting for strata
//! components.

pub mod connectivity;
pub mod doc;
pub mod dot;
pub mod ends;
pub mod enumerate;
pub mod graph;
pub mod moves;
pub mod stratum;
