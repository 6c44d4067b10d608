#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alist;
pub mod cli;
pub mod component;
pub mod decoder;
pub mod error;
pub mod evolve;
pub mod gf2;
pub mod gldpc;
pub mod simkit;

pub use error::{Error, Result};
