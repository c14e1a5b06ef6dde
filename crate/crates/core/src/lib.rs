//! Security-utility equilibrium laboratory for proof-of-work crypto-assets.
//!
//! Price, hash rate and perceived ledger safety are solved jointly: miners
//! enter until the marginal miner breaks even, attackers follow a noisy
//! threshold rule, and users and speculators demand the fixed asset stock
//! according to price and safety.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod demand;
pub mod equilibrium;
pub mod error;
pub mod hash_supply;
pub mod model;
pub mod normal;
pub mod report;
pub mod root;
pub mod scenarios;
pub mod security;
pub mod var_lab;

pub use error::{Error, Result, ValidationError};
pub use model::{validate, Economy, EconomyParams};
