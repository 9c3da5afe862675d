//! Classification of finite-dimensional irreducible modules over (twisted)
//! multiloop algebras with exact cyclotomic arithmetic.

pub mod classify;
pub mod cli;
pub mod lattice;
pub mod liedata;
pub mod psi;
pub mod realizer;
pub mod twisted;
pub mod scalar;
