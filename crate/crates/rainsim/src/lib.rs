//! Radio propagation in rain media and learned UAV trajectory design.
//!
//! `rainsim` couples a physics side and a decision side:
//!
//! - **Physics**: an effective-medium model of rain ([`medium`]) feeds a
//!   split-step Fourier solver for the parabolic wave equation ([`pwe`]),
//!   which is cross-checked against the ITU-R power-law rain model
//!   ([`validation`]) and used to build per-base-station received-signal
//!   maps and derived SIR maps on a fixed-altitude flight plane
//!   ([`radiomap`]).
//! - **Decisions**: a deterministic grid MDP over the SIR map ([`env`]) is
//!   solved by a dueling double deep-Q agent with multi-step returns
//!   ([`agent`]), trading flight time against connectivity.
//!
//! Scenario configuration, artifact formats, and the command-line entry
//! points live in [`scenario`] and [`cli`]; the `rainsim` binary exposes the
//! `validate`, `map`, `train`, `plan`, and `eval` subcommands. Runnable
//! demonstrations of each capability are in the crate's `examples/`
//! directory.
//!
//! Everything is deterministic: given the same configuration and seed, every
//! command reproduces its output artifacts byte for byte.

pub mod agent;
pub mod cli;
pub mod env;
pub mod medium;
pub mod pwe;
pub mod radiomap;
pub mod rng;
pub mod scenario;
pub mod validation;

pub use medium::{ComplexPermittivity, PolarizationFactors, RainParameters, SphereForm};
pub use pwe::{ComplexField, PropagationConfig, SourceSpec, SplitStepSolver, TransverseGrid};
pub use radiomap::{RssMap, Scenario, SirMap};
pub use rng::Rng;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
