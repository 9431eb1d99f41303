pub mod cost;
pub mod data;
pub mod error;
pub mod harness;
pub mod instances;
pub mod metric;
pub mod offline;
pub mod online;
pub mod order;
pub mod rng;

pub use data::{Dataset, Point};
pub use error::{Error, Result};
pub use metric::{CostKind, CostModel};
pub use order::{uniform_permutation, OrderProvenance, StreamOrder};
pub use rng::Rng;
