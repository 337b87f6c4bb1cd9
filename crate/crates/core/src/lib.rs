#![no_std]

extern crate alloc;

pub mod error;
pub mod cover;
pub mod enumerate;
pub mod exactalg;
pub mod geomcore;
pub mod latred;

pub use error::{Error, Result, Stage};
