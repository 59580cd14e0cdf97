//! Exact counts of decomposable integer polynomials by height, with the
//! decomposition, Mahler measure and growth-fitting tools around them.

pub mod asymptotics;
pub mod census;
pub mod cli;
pub mod decompose;
pub(crate) mod field;
pub mod mahler;
pub mod poly;
pub mod report;
pub mod text;
pub mod verify;
