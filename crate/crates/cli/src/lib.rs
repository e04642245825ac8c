//! Library half of the `pubmark` command-line tool. The binaries are thin
//! wrappers over [`commands`].

pub mod commands;
pub mod config;
pub mod corpus;

/// Exit status for "ran fine, nothing detected".
pub const EXIT_NOT_DETECTED: i32 = 1;
/// Exit status for usage, configuration and I/O errors.
pub const EXIT_ERROR: i32 = 2;

pub fn version() -> String {
    format!("pubmark {} ({})", env!("CARGO_PKG_VERSION"), env!("PUBMARK_GIT_REV"))
}
