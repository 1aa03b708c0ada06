//! Exact local computations for Bessel periods on GSp₄ and anticyclotomic
//! theta elements over ring class groups.

pub mod exact_arith;
pub mod hecke_gsp4;
pub mod lfactors;
pub mod local_bessel;
pub mod quadfield;
pub mod cm_theta;
pub mod assembly;
