//! Exit-code classification.

use std::fmt::Display;

use moonlight_core::Error;

pub const USAGE: u8 = 2;
pub const INGEST: u8 = 3;
pub const PRECONDITION: u8 = 4;
pub const VERIFY: u8 = 5;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Display) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

pub fn code_for(err: &Error) -> u8 {
    match err {
        Error::MissingWeight { .. }
        | Error::NonPositiveWeight { .. }
        | Error::EmptyMatrix
        | Error::RowLimit { .. }
        | Error::MissingTuples { .. }
        | Error::SampleSize { .. } => PRECONDITION,
        Error::Unverified { .. } => VERIFY,
        Error::InFile { source, .. } => code_for(source),
        _ => INGEST,
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::new(code_for(&err), err)
    }
}
