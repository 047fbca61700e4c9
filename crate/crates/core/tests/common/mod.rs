//! Independent reference solvers used only by the test suite.
#![allow(dead_code)]

pub mod fd;
pub mod montecarlo;
pub mod oracle;
