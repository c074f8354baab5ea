//! Algebraic geometry over finite algebras.
//!
//! Systems of equations over a finite algebra `H` and sets of points of the
//! affine space `H^n` are related by an antitone Galois connection. This crate
//! computes both sides of it, the closed sets and their lattices, bounded
//! tests of geometric equivalence between algebras, and the action-type
//! geometry of finite group representations over `Z/m`.

pub mod algebra;
pub mod caps;
pub mod error;
pub mod galois;
pub mod lattice;
pub mod relations;
pub mod rep;
pub mod term;

pub use algebra::{direct_product, enumerate_homs, FiniteAlgebra, Homomorphism, ProductIndex};
pub use caps::Caps;
pub use error::{Error, Result};
pub use galois::{
    apply_substitution_to_point, format_points, parse_points, point_set, pullback_contains,
    pullback_set, AffineSpace, AlgebraicSet, ClosurePredicate, EquationSystem, Point, PointSet,
};
pub use lattice::{enumerate_closed_sets, ClosedSetLattice, EnumerationMode, LawVerdict};
pub use relations::{
    check_quasi_identity, cross_check, geom_equivalent_bounded, identities_up_to, reduce_system,
    separation_equivalence, Bounds, Direction, EquivalenceStatus, EquivalenceVerdict,
    QuasiIdentity, SeparationReport, Side, Witness,
};
pub use rep::{
    action_closure_contains, evaluate_action_term, solve_action_system, triangular_product,
    wreath_product, ActionTerm, FiniteGroup, FiniteRepresentation, Letter, Matrix, RepPoint,
    Summand, TriangularBlock, TriangularElement, TriangularProduct, Word,
};
pub use term::{
    enumerate_terms, parse_equation, parse_system_lines, parse_term, parse_term_lines, Equation,
    Signature, Substitution, Symbol, Term,
};
