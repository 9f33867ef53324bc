//! Exact q-expansion arithmetic for the weight 2 CM newforms that are eta
//! quotients, the operators acting on them, and a harness that checks their
//! p-adic congruences coefficient by coefficient.

pub mod arith;
pub mod error;
pub mod eta;
pub mod operators;
pub mod qseries;
pub mod spans;
pub mod verify;

pub use error::{Error, Result};
pub use eta::{catalog_form, CurveSpec, EtaQuotient, Form, Recipe};
pub use qseries::{QSeries, Valuation};
