//! Scene documents, certificates and the subcommands of the `cech` binary.
//!
//! A scene is a JSON document describing a cover and named sheaves,
//! morphisms, cochains, sequences, extensions, lifting choices, descent data
//! and complete-intersection data. Every command prints a [`report::Report`]:
//! a computed result plus certificates that `cech verify` re-checks from the
//! scene alone.

pub mod certificate;
pub mod commands;
pub mod error;
pub mod int;
pub mod report;
pub mod scene;
