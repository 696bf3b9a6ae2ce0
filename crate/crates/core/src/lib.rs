//! Static analysis of TON FunC smart contracts.

pub mod analysis;
pub mod cells;
pub mod detectors;
pub mod frontend;
pub mod ir;
pub mod pipeline;
pub mod report;
