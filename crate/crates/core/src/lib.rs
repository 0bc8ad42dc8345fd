//! Combinatorial tools for non-positively curved cube complexes: vertex
//! links, hyperplanes, developed balls of universal covers, Whitehead
//! complexes of convex subcomplexes, and detectors for free and cyclic
//! splittings.

pub mod corpus;
pub mod cover;
pub mod cube_complex;
pub mod simplicial;
pub mod splittings;
pub mod whitehead;
pub mod words;
