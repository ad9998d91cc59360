//! Exact computations with rainbows, coherent configurations and Jordan
//! schemes, and with the loops that thin regular Jordan schemes carry.
//!
//! Everything is integer or rational arithmetic; no floating point appears
//! in any decision.

#![allow(clippy::needless_range_loop)]

pub mod algmaps;
pub mod cli_io;
pub mod closures;
pub mod exact;
pub mod fixtures;
pub mod loops;
pub mod perm;
pub mod rainbow;
pub mod relations;
pub mod schemes;
