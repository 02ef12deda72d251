//! Arbitrary pattern formation by asynchronous, opaque, luminous robots on
//! the integer grid.

pub mod config;
pub mod controller;
pub mod geometry;
pub mod sim;
pub mod generate;
pub mod monitor;
pub mod oracle;
