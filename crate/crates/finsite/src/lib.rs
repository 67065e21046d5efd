//! Exact-computation workbench for finitely presented categories: generated
//! Grothendieck topologies, sheaf checks, adhesive functors and the induced
//! adjoint triple, fundamental groups via normal objects, and truncated
//! p-typical Witt vectors. Everything is verified by brute-force search over
//! finite data; there is no floating point anywhere in this crate.

pub mod fincat;
pub mod fixtures;
pub mod galois;
pub mod sheaves;
pub mod sites;
pub mod transfer;
pub mod witt;

pub use fincat::{FinCat, FunctorData, MorId, ObjId, Square, SquareMode};
pub use sheaves::{Elem, NatTrans, Presheaf};
pub use sites::{Cover, Pretopology, Sieve, Topology};
