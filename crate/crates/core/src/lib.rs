//! Discrete-time spread models over weighted digraphs: simulation of
//! networked SIS dynamics, spectral threshold and Lyapunov stability
//! analysis, recovery of infection/healing rates from trajectory data, and
//! end-to-end validation pipelines for outbreak-style and adoption-style
//! datasets.
//!
//! The crate is `no_std + alloc`; all IO, file formats, and the command-line
//! front end live in the companion `netspread-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod dynamics;
pub mod graph;
pub mod identify;
pub mod linalg;
pub mod pipeline;
pub mod rng;
