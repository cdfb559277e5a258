//! File formats shared between the `symdec` binary and its tests.

pub mod files;
