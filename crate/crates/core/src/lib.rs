//! Quaternary generalized cyclotomic sequences of period 2p^m q^n over
//! GF(4): construction, linear complexity, and numerical checks of the
//! number theory behind them.

// Field addition in characteristic 2 is XOR.
#![allow(clippy::suspicious_arithmetic_impl, clippy::suspicious_op_assign_impl)]

pub mod analysis;
pub mod cyclotomy;
pub mod extfield;
pub mod gf4;
pub mod numtheory;
pub mod sequence;
pub mod sweep;
