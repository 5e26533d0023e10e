//! Effective field Hamiltonians and master equations induced by driven
//! multilevel emitters, single or in ensembles, via time-independent
//! perturbation theory with operator-valued matrix elements.

pub mod effective;
pub mod emitter;
pub mod ensemble;
pub mod ops;
pub mod tipt;
pub mod validation;

pub use num_complex::Complex64 as C64;
