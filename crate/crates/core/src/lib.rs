pub mod error;
pub mod exactfield;
pub mod groupoidsep;
pub mod hyperoct;
pub mod kgroups;
pub mod pencil;
pub mod picard;
pub mod report;
pub mod sample;
pub mod selftest;
pub mod wpline;

pub use error::{Error, Result};
