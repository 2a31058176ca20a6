//! PQ games: two-player zero-sum games in which player Q moves with unitary
//! transformations while Picard is constrained to classical (permutation)
//! moves.  The library contains the dense state-vector substrate, the
//! concrete gate and oracle constructors, the game-evaluation engine with a
//! zero-sum equilibrium solver, a catalog of the three reference games
//! (Penny Flip, Grover Guess-a-Number, Bernstein-Vazirani Guess-a-Number),
//! and per-timestep entanglement analysis of game transcripts.

pub mod catalog;
pub mod engine;
pub mod entanglement;
pub mod error;
pub mod gates;
pub mod qstate;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
