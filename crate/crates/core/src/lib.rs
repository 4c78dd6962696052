//! Limit quantal response equilibria for finite two-player games.
//!
//! The logit-response map is iterated while precision rises in small steps;
//! the largest precision at which the dynamics still converge to a locally
//! stable point is the limit precision, and the point reached there is the
//! limit distribution. See [`path::evolutionary_path`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod auctions;
pub mod choice;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod format;
pub mod game;
pub mod library;
pub mod linalg;
pub mod path;
pub mod tables;
pub mod trembles;
