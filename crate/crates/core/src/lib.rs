#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod mesh;
pub mod numerics;
pub mod pfunc;
pub mod problem;
pub mod radial;
pub mod solver;
pub mod verify;
