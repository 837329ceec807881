//! Experiment runner, file formats, and reporting for the passive-scalar
//! transport laboratory. The numerics live in `mixcore`; this crate adds the
//! pieces that touch the filesystem: MIXF field dumps, CSV reports with
//! config digests, the flat key=value configuration format, and the
//! estimate-level experiments behind the `mixlab` CLI.

pub mod config;
pub mod experiments;
pub mod fit;
pub mod mixf;
pub mod report;
