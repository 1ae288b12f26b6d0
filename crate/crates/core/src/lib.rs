//! Finite relational structures, quantifier-free formula counting,
//! interpretation schemes and strongly polynomial structure sequences.

pub mod budget;
pub mod counting;
pub mod gallery;
pub mod interp;
pub mod logic;
pub mod sequences;
pub mod structures;
