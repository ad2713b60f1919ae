//! Concrete variational inequalities and instance generators.

pub mod fts;
pub mod game;
pub mod noise;
pub mod rng;

pub use fts::{FtsOracle, FtsProblem, FtsVariant};
pub use game::{GameOracle, MatrixGame, PayoffDistribution};
pub use noise::{noisy_wrap, NoisyOracle};
