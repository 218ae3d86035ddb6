//! Rigidity of bar-joint frameworks in normed spaces whose unit ball is a
//! convex symmetric polytope.

pub mod analysis;
pub mod combinatorics;
pub mod constructions;
pub mod framework;
pub mod gallery;
pub mod graph;
pub mod hull;
pub mod io;
pub mod iso;
pub mod linalg;
pub mod pebble;
pub mod polytope;
pub mod rigidity;
pub mod scalar;
pub mod towers;

pub use polytope::{ConeMembership, FacetClass, Polytope, PolytopeError, Support};
pub use scalar::{Backend, Point, Rational, Scalar};
