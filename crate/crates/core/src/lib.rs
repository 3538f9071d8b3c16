//! Adaptive Fourier decomposition in the Hardy spaces of the unit disc and
//! the 2-torus.
//!
//! Signals are truncated Fourier series ([`hardy`]). Dictionaries of Szegő
//! kernels live in [`szego`]. The decompositions are
//!
//! * [`tm`]: one-dimensional core AFD over Takenaka-Malmquist systems,
//! * [`afd2d`]: product-TM AFD and the pure greedy algorithm on the torus,
//! * [`poga`]: the pre-orthogonal greedy algorithm over any parameterized
//!   dictionary, with the complete Szegő dictionaries in one and two variables.
//!
//! [`io`] reads signals and record files, [`synth`] generates seeded test
//! signals, and [`cli`] is the `afd` tool.

pub mod afd2d;
pub mod cli;
pub mod error;
pub mod grid;
pub mod hardy;
pub mod io;
pub mod poga;
pub mod szego;
pub mod synth;
pub mod tm;

pub use error::{Error, Result};
pub use hardy::C64;
