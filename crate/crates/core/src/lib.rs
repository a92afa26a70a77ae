//! Frequency-side laboratory for the periodic nonlinear Schrödinger equation
//! `i u_t + Δu = λ|u|^{2k} u` on `T^d`: resonance function, exceptional
//! tuples, lattice-point counts, multilinear estimates and the
//! Galerkin-truncated interaction-picture flow.

pub mod cli;
pub mod counting;
pub mod error;
pub mod exceptional;
pub mod field;
pub mod flow;
pub mod lattice;
pub mod multilinear;
pub mod stats;

pub use error::{Error, Result};
pub use exceptional::{rank_and_classify, ExceptionalClass, ExceptionalRegime, RankProfile};
pub use field::{dyadic_project, weighted_norm, SpectralField};
pub use lattice::{order_compare, phi, FreqTuple, FreqVector};
