//! File formats, renderers and the command line over `pathlens-core`.

pub mod cli;
pub mod emit;
pub mod io;
pub mod manifest;
