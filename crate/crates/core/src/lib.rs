//! CR-invariants of Levi degenerate hypersurfaces in C^3.
//!
//! The crate evaluates the CR-invariants `J` and `W` for tube and rigid
//! hypersurfaces from a graphing function, using truncated Taylor jets for
//! every derivative. It also reconstructs Monge-Ampere solutions from a pair
//! of one-variable profiles and checks the ODE systems and classified flat
//! families that go with them.

pub mod jet;
pub mod expr;
pub mod invariants;
pub mod tube;
pub mod rigid;
pub mod mapar;
pub mod catalog;
