//! Exact computation of the Euler characteristic valuation on finitely
//! presented MV-algebras.
//!
//! An element of the algebra is given by a Łukasiewicz formula `φ`, and the
//! algebra itself by an optional theory formula `θ` whose oneset is the
//! polyhedron `P`. [`valuation::euler_geometric`] and
//! [`valuation::euler_recursive`] return the integer `E(φ) = χ(supp φ)`
//! by two independent routes: level sets of `k.φ`, and the inclusion-exclusion
//! recursion over Schauder hats.

pub mod axioms;
pub mod cli;
pub mod complex;
pub mod formula;
pub mod linearize;
pub mod numeric;
pub mod schauder;
pub mod valuation;

pub use complex::{ComplexError, Triangulation};
pub use formula::{parse, Formula};
pub use linearize::{LinearizeError, McNaughtonRep};
pub use numeric::{HomogeneousPoint, Rational};
pub use valuation::{Method, ValuationError, ValuationReport};
