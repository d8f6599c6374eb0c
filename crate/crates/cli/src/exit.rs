// SPDX-License-Identifier: Apache-2.0

//! Process exit codes. Scripts may branch on these; they do not change.

use std::fmt;
use std::io;
use std::path::Path;

pub const OK: u8 = 0;
/// `verify` found violations.
pub const VERIFY_FAILED: u8 = 1;
pub const INFEASIBLE: u8 = 2;
pub const USAGE: u8 = 64;
pub const DATA: u8 = 65;
pub const NO_INPUT: u8 = 66;
pub const CANT_CREATE: u8 = 73;

/// An error that ends the run with a specific exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl fmt::Display) -> Self {
        Self::new(USAGE, message.to_string())
    }

    pub fn data(path: &Path, message: impl fmt::Display) -> Self {
        Self::new(DATA, format!("{}: {message}", path.display()))
    }

    pub fn unreadable(path: &Path, err: io::Error) -> Self {
        Self::new(NO_INPUT, format!("cannot read {}: {err}", path.display()))
    }

    pub fn uncreatable(path: &Path, err: io::Error) -> Self {
        Self::new(CANT_CREATE, format!("cannot write {}: {err}", path.display()))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
