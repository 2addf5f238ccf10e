//! System-level Monte Carlo simulator for uplink SRS (pilot) allocation in
//! TDD massive-MIMO cellular networks.
//!
//! The crate models a 19-site, 57-sector hexagonal network with wrap-around,
//! 3GPP UMa propagation with Ricean fast fading, an index-level SRS pool with
//! four allocation schemes (Reuse 1, Reuse 3, cell-centric and neighbour-aware
//! fractional reuse), least-squares channel estimation under pilot collisions,
//! zero-forcing downlink precoding and the resulting per-BS throughput.
//!
//! Runnable walkthroughs live in `examples/`; the `srsim` binary drives
//! config-file campaigns and sweeps.

pub mod channel;
pub mod cli;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod phy;
pub mod rng;
pub mod srs_alloc;
pub mod units;

pub use channel::{ChannelSet, ChannelVector, LinkState};
pub use engine::{run_campaign, run_drop, CampaignResult, DropMetrics, SimConfig};
pub use error::{Error, Result};
pub use geometry::{build_layout, NetworkLayout, UeDrop};
pub use srs_alloc::{Scheme, SrsAssignment, SrsPool};
