//! Modelling and checking of two-party neighbor discovery over wireless
//! links, with relay adversaries, attack synthesis and boundary analysis.

pub mod adversary;
pub mod analysis;
pub mod attack;
pub mod commands;
pub mod event;
pub mod feasibility;
pub mod geometry;
pub mod io;
pub mod message;
pub mod node;
pub mod params;
pub mod protocol;
pub mod scalar;
pub mod setting;
pub mod sim;
pub mod verdict;
pub mod view;
