//! Inter- and intra-procedural analyses over the SSA IR: builtin effects,
//! the call graph, data dependencies and taint.

pub mod callgraph;
pub mod catalog;
pub mod consts;
pub mod datadep;
pub mod taint;

pub use callgraph::{bounced_check, effect_summaries, BouncedCheck, CallGraph, CgEdge, CgNode, EdgeKind};
pub use catalog::{BuiltinSpec, Catalog, CatalogError, CellOp, Effects, Sink, WidthSpec};
pub use consts::ConstEval;
pub use datadep::{DataDep, Dep};
pub use taint::{SinkHit, SinkKind, Taint, TaintAnalysis};
