//! Exact computations for the mirror symmetry of toric Deligne–Mumford stacks.

pub mod exactalg;
pub mod lattice;
pub mod stackyfan;
pub mod curves;
pub mod chenruan;
pub mod fandmod;
pub mod iseries;
pub mod mirrorflow;
pub mod cli;
