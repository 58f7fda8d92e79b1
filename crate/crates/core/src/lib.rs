//! Construction, analysis and simulation of photonic switch networks for
//! multiplexed entanglement generation.
//!
//! The crate is organised bottom-up: [`linalg`] holds the dense complex
//! matrices, [`gmzi`] the interferometer theory built on them, and the
//! remaining modules the combinatorial, analytic and Monte-Carlo tooling
//! for muxes.  [`verify`] runs the reference checks end to end.

pub mod analytics;
pub mod error;
pub mod gmzi;
pub mod gridmux;
pub mod linalg;
pub mod logic;
pub mod netbuilder;
pub mod patterns;
pub mod simkit;
pub mod temporal;
pub mod verify;

pub use error::{Error, Result};

// The guide's snippets run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/gmzi.md")]
    mod gmzi {}
    #[doc = include_str!("../../../book/src/swing.md")]
    mod swing {}
    #[doc = include_str!("../../../book/src/patterns.md")]
    mod patterns {}
    #[doc = include_str!("../../../book/src/analytics.md")]
    mod analytics {}
    #[doc = include_str!("../../../book/src/gridmux.md")]
    mod gridmux {}
    #[doc = include_str!("../../../book/src/temporal.md")]
    mod temporal {}
    #[doc = include_str!("../../../book/src/logic.md")]
    mod logic {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
