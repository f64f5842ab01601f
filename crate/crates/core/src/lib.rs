//! Finite element machinery and experiment harness for semilinear elliptic
//! problems `-div(D grad u) + b(u) = f` with polynomial nonlinearities up to
//! critical growth.

pub mod mesh;
pub mod fem;
pub mod solver;
pub mod analysis;
pub mod harness;
