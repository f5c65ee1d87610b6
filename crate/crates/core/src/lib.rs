//! Desk-scale laboratory for combining quasiconvex subgroups of the relatively
//! hyperbolic free products `Z^{n_1} * ... * Z^{n_m} * F_r`.
//!
//! The peripheral structure is the set of free abelian factors. Everything is
//! exact integer or rational arithmetic; every enumeration is bounded by
//! [`Caps`].

pub mod amalgam;
pub mod caps;
pub mod constants;
pub mod error;
pub mod group;
pub mod lattice;
pub mod quasiconvex;
pub mod relcayley;

pub use caps::Caps;
pub use error::{Error, Result};
pub use group::{Element, Factor, GroupSpec, RawLetter, Syllable};
pub use lattice::Lattice;
pub use relcayley::{EdgeTag, HComponent, RelPath};

/// Multiplicative constant for shortened polygonal paths: they are (3,0)-quasi-geodesics.
pub const LAMBDA_0: i64 = 3;
