pub mod basis;
pub mod error;
pub mod hamiltonian;
pub mod integrator;
pub mod ramp;
pub mod sparse;
pub mod state;
pub mod observables;
pub mod svd;
pub mod lzs;
pub mod oracle;
pub mod record;
pub mod io;
pub mod config;
pub mod exec;
pub mod pipeline;
pub mod svg;
