//! Localizable entanglement of three- and four-qubit states under local noise.
//!
//! The pipeline runs in this order. [`noise`] applies single-qubit Kraus channels to any subset
//! of qubits. [`measurement`] projects the remaining qubits. [`negativity`] scores the retained
//! pair, and [`localizable`] optimizes the measurement. [`hierarchy`] turns the values for every
//! noise subset into pass/fail predicates with margins.
//!
//! ```
//! use le_hierarchy::ensembles::gghz;
//! use le_hierarchy::hierarchy::{build_profile, verdict};
//! use le_hierarchy::localizable::{Method, OptimizerOptions};
//! use le_hierarchy::noise::ChannelKind;
//!
//! let rho = gghz(1.0, 0.0)?.to_density();
//! let opts = OptimizerOptions::for_qubits(3);
//! let profile = build_profile(&rho, (0, 1), ChannelKind::PhaseFlip, 0.2, Method::Rle, &opts)?;
//! assert!(verdict(&profile, 1e-9)?.holds("Env"));
//! # Ok::<(), le_hierarchy::Error>(())
//! ```
//!
//! The guide under `book/` walks through each layer; its snippets run as doctests.

pub mod closed_forms;
pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod hierarchy;
pub mod linalg;
pub mod localizable;
pub mod measurement;
pub mod negativity;
pub mod noise;
pub mod optimize;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states-and-noise.md")]
    mod states_and_noise {}
    #[doc = include_str!("../../../book/src/localizing.md")]
    mod localizing {}
    #[doc = include_str!("../../../book/src/hierarchies.md")]
    mod hierarchies {}
    #[doc = include_str!("../../../book/src/closed-forms.md")]
    mod closed_forms {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
