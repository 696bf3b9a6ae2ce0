//! Three-address IR in basic blocks, CFG construction and SSA conversion.

pub mod dom;
pub mod dump;
pub mod instr;
pub mod lower;
pub mod ssa;

pub use dom::{dominance_frontiers, DomTree};
pub use dump::dump_cfg;
pub use instr::*;
pub use lower::{lower, LowerError};
pub use ssa::{check_ssa, to_ssa};

use crate::frontend::ast::{FunctionDecl, SourceUnit};

/// Lower `f` and convert it to SSA form.
pub fn build_ssa(f: &FunctionDecl, unit: &SourceUnit) -> Result<Cfg, LowerError> {
    lower(f, unit).map(|cfg| to_ssa(&cfg))
}
