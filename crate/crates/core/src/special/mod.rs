//! Closed-form constructions: min-up/min-down polytopes, reduced
//! formulations for `K_{1,t}`-free graphs, and comparability graphs.

pub mod clawfree;
pub mod comparability;
pub mod mud;

pub use clawfree::{clawfree_derivation_check, clawfree_full_ef, clawfree_rectangles, clawfree_reduced_ef, ClawRect};
pub use comparability::{comparability_full_ef, comparability_reduced_ef};
pub use mud::{mud_ef, mud_facets, mud_tree, mud_vertices, MinUpDown};
