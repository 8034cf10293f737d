//! Numerical toolkit for the shift operators on de Branges-Rovnyak spaces
//! H(b) with rational symbols bounded by one on the unit disk.
//!
//! The crate decides whether a symbol is an extreme point of the unit ball
//! of H-infinity, constructs Pythagorean pairs (a, b) with
//! |a|^2 + |b|^2 = 1 on the circle, evaluates the reproducing kernels of
//! H(b) and the curvature invariants of the backward shift X_b and of S_b*,
//! decides unitary equivalence of these operators across two symbols, and
//! locates Caratheodory angular derivative points. Every closed form is
//! backed by an independent numerical route: a five-point Laplacian oracle
//! for the curvatures and a finite-section model of H(b) for the operator
//! identities.

pub mod adc;
pub mod boundary;
pub mod config;
pub mod curvature;
pub mod error;
pub mod finsect;
pub mod kernels;
pub mod pythagorean;
pub mod ratfun;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use ratfun::{C64, DiskPoint, Poly, RationalSymbol};
