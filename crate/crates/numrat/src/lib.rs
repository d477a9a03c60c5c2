//! Exact arithmetic for orders on surfaces, presented by resolution graphs.
//!
//! A surface singularity is described here by the dual graph of its
//! resolution: vertices are exceptional curves with a self-intersection and a
//! genus, edges record intersections.  An order on the surface is described
//! by ramification indices on exceptional curves and on strict transforms of
//! ramification curves, together with the square root of its rank.  From this
//! combinatorial data the crate computes intersection numbers, canonical and
//! discriminant pairings, numerical cycles, discrepancies, Euler
//! characteristics of restrictions, and decides numerical rationality: is
//! `chi` of the order restricted to every effective exceptional divisor
//! positive?
//!
//! All arithmetic is exact (arbitrary-precision rationals); no floating
//! point is used anywhere.  Results are deterministic: same inputs, same
//! outputs, bit for bit.
//!
//! Module map:
//!
//! * [`lattice`]: divisors with rational coefficients, the intersection
//!   form, exact solving, negative definiteness.
//! * [`model`]: resolution graphs, ramification data, validation, the
//!   discriminant and canonical pairings.
//! * [`cycles`]: numerical cycles, saturation, special divisors,
//!   multiplicities, the decomposition used by the positivity test.
//! * [`discrepancy`]: surface and order discrepancies, log terminal and
//!   crepant classification.
//! * [`adjunction`]: Euler characteristics of restrictions, the recursion
//!   over components, ramified covers of a single curve.
//! * [`birational`]: blowups, blowdowns, divisor transport, towers,
//!   minimal models.
//! * [`rationality`]: the numerical rationality checkers (special divisors
//!   and brute force) and the top-level decision procedure.
//! * [`catalogue`]: named fixtures, cyclic quotient graphs, seeded random
//!   generators.
//! * [`cli`]: the command line interface.

pub mod adjunction;
pub mod birational;
pub mod catalogue;
pub mod cli;
pub mod cycles;
pub mod discrepancy;
pub mod lattice;
pub mod model;
pub mod rationality;

mod error;

pub use error::{Error, ErrorKind};
