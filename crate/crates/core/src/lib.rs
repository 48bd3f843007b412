//! Exact workbench for free-boson vertex algebras.
//!
//! The crate builds, from scratch and in exact rational arithmetic, the
//! standard computational stack around the quantum Miura transform:
//!
//! * pseudo-differential symbols of symbolic order, with multiplication,
//!   inversion, counit and the coefficients of the group comultiplication
//!   ([`psido`]);
//! * the rank-`n` Heisenberg vertex algebra on its Fock space, with all
//!   integer-indexed products computed by direct mode distribution ([`fock`]);
//! * the Miura fields, the PBW basis of the generated W-subalgebra, and exact
//!   rewriting of products into that basis ([`miura`]);
//! * structure tables of OPE coefficients, interpolated in the rank and
//!   validated on held-out ranks, together with the Virasoro element, the
//!   weight-3 commutant generator and the parameter maps ([`lalg`]);
//! * the quasiclassical limit as a Poisson vertex algebra with its lambda
//!   bracket, the classical Miura cross-check and the classical antipode
//!   ([`classical`]);
//! * the comultiplication, counit and the associated bialgebra certificates
//!   ([`bialg`]).
//!
//! All computations are pure and all values immutable after construction;
//! coarse-grained parallelism (structure-table entries, verification grids)
//! is provided by `rayon` behind the default `parallel` feature with a
//! sequential fallback.

pub mod bialg;
pub mod classical;
pub mod coeff;
pub mod diffpoly;
pub mod fock;
pub mod lalg;
pub mod linalg;
pub mod miura;
pub mod par;
pub mod psido;
pub mod verify;
