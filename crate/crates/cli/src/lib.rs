//! Command-line front end: configuration, run pipeline and artifacts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod config;
pub mod output;
pub mod pipeline;
