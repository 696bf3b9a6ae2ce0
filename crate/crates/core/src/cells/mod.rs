//! Cell-layout tracking: what builders store, what slices read, and
//! whether parsed slices are checked with `end_parse`.

pub mod interp;
pub mod layout;

pub use interp::{analyze_cells, summarize, AbsVal, CellFacts, CellSite, CellSource, Context, EndParseStatus, LoadEvent, Root, RootId, Summary};
pub use layout::{layout_match, Field, FieldKind, Layout, MatchResult, Width, MAX_ALTERNATIVES};
