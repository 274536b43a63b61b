//! Std companion to `netbell-core`: JSON and CSV formats, atomic output,
//! rayon-parallel drivers and the `netbell` command line.

pub mod cli;
pub mod drivers;
pub mod io;
pub mod json;
