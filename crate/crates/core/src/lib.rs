//! Combinatorics, algebra and numerics of parametric Feynman integrals.
//!
//! The crate covers graph polynomials with kinematics, motic subgraphs and
//! their Hopf algebra, partial factorisations, iterated linear blow-ups given
//! by explicit chart atlases, power counting, sector-decomposed numerical
//! integration of convergent integrals, and the enumeration of boundary
//! strata.

pub mod blowup;
pub mod canon;
pub mod checks;
pub mod cli;
pub mod convergence;
pub mod corpus;
pub mod cubature;
pub mod error;
pub mod graph;
pub mod hopf;
pub mod integrate;
pub mod io;
pub mod poly;
pub mod polyparse;
pub mod reconstruct;
pub mod strata;
pub mod symanzik;

pub use error::{Error, Result};
pub use graph::{EdgeLabel, EdgeSet, FeynmanGraph, VertexId};
pub use poly::{KinPoly, KinVar, Monomial, Rational};
