//! Exact Čech cohomology of sheaves of abelian groups on finite covers.
//!
//! The crate is layered bottom-up:
//!
//! * [`lattice`]: Smith normal form, integer linear systems, finitely
//!   presented abelian groups and their morphisms.
//! * [`nerve`]: finite covers and their nerves.
//! * [`sheaf`]: abelian sheaves on a nerve.
//! * [`cech`]: cochains, the alternating coboundary, cohomology groups and
//!   coboundary witnesses.
//! * [`connecting`]: short exact sequences, the connecting map, the lifting
//!   obstruction quotient and the two-stage connecting map.
//! * [`descent`]: gerbe descent data with an abelian band.
//! * [`projective`]: divisors on P² and P¹ over ℚ, the symmetric-power
//!   windows and the local complete intersection cocycle.
//!
//! All arithmetic is exact (`num_bigint::BigInt`).

pub mod cech;
pub mod connecting;
pub mod descent;
pub mod fixtures;
pub mod lattice;
pub mod nerve;
pub mod projective;
pub mod sheaf;

pub use num_bigint::BigInt;
