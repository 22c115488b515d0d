//! Population dynamics of buyers and sellers in an over-the-counter market.
//!
//! Sellers revise prices from the gap between their buyer share and the competitor
//! average; buyers move towards cheaper sellers. The crate evaluates the maps, runs
//! orbits, audits invariants of the resulting dynamics and analyses the stability of
//! the symmetric fixed point.

pub mod audits;
pub mod dynamics;
mod error;
pub mod families;
mod report;
pub mod stability;

pub use error::{AuditError, DynamicsError, FamilyError, PeriodicError, StabilityError};
pub use report::{serialize_f64, AuditReport, Check, Status};
