//! Pseudorandom generators and functions with recognizable abort, the
//! hash-based signature ladder built on them, and a Monte Carlo harness that
//! measures their correctness and runs their security games.
//!
//! The randomized generator at the bottom of the stack is simulated
//! ([`pdprg_sim`]): a keyed expander wrapped with injectable
//! pseudodeterminism noise. Everything above it treats the generator as a
//! black box.

pub mod bits;
pub mod bot_core;
pub mod bot_hash;
pub mod bot_prf;
pub mod bot_prg;
pub mod codec;
pub mod error;
mod expander;
pub mod harness;
pub mod pdprg_sim;
pub mod profile;
pub mod repetition_pke;
pub mod signatures;
pub mod tape;

#[cfg(test)]
mod test_oracles;

pub use bits::Bits;
pub use bot_core::BotValue;
pub use error::{Error, Result};
pub use tape::RandomTape;
