//! Swept-rule space-time domain decomposition for 2D explicit stencil solvers.
//!
//! The spatial domain is a doubly-periodic Cartesian grid split into square
//! per-rank subdomains. Instead of exchanging a one-cell halo every sub-step,
//! the swept engine advances each rank through pyramid/bridge components that
//! follow the discrete domains of dependence and influence, so ranks
//! communicate only four times per full cycle of `n` sub-steps. A classic
//! halo-exchange engine and a single-threaded serial reference are provided
//! for comparison; all three produce bitwise-identical fields for any pure
//! kernel.
//!
//! Crate layout:
//! - [`grid`]: domain types (grids, panels, topology, kernels as [`grid::Stencil`])
//! - [`components`]: the four space-time building blocks
//! - [`engines`]: serial reference, classic halo engine, swept engine, gather
//! - [`transport`]: in-process and TCP message transports with latency injection
//! - [`kernels`]: wave, Euler (RK4), wide-stencil demo, identity, increment
//! - [`model`]: analytic per-sub-step cost model and interconnect/compute presets

pub mod components;
pub mod engines;
pub mod grid;
pub mod kernels;
pub mod model;
pub mod testkit;
pub mod transport;

pub use grid::{
    Direction, Grid, GridError, GlobalField, Neighborhood, Orientation, Panel, PanelShape,
    RankCoord, Slab, StateVector, Stencil, Topology,
};
