//! Per-unit analysis driver: lowers every function, then runs the shared
//! analyses the detectors consume.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use crate::analysis::{effect_summaries, CallGraph, Catalog, DataDep, Effects, SinkHit, TaintAnalysis};
use crate::cells::{self, CellFacts};
use crate::detectors::{self, DetectorSet, Finding};
use crate::frontend::ast::{FunctionDecl, SourceUnit};
use crate::frontend::{self, FrontendError};
use crate::ir::{build_ssa, Cfg, DomTree};

pub struct FunctionFacts {
    pub cfg: Cfg,
    pub dom: DomTree,
    pub deps: DataDep,
    pub sinks: Vec<SinkHit>,
    pub cells: CellFacts,
}

pub struct UnitAnalysis<'u> {
    pub unit: &'u SourceUnit,
    pub catalog: &'u Catalog,
    /// Every function with a body, by name.
    pub functions: BTreeMap<String, FunctionFacts>,
    pub callgraph: CallGraph,
    pub effects: BTreeMap<String, Effects>,
}

impl<'u> UnitAnalysis<'u> {
    pub fn new(unit: &'u SourceUnit, catalog: &'u Catalog) -> Self {
        let mut ssa: BTreeMap<String, Cfg> = BTreeMap::new();
        for f in &unit.functions {
            if f.block().is_none() || ssa.contains_key(&f.name) {
                continue;
            }
            if let Ok(cfg) = build_ssa(f, unit) {
                ssa.insert(f.name.clone(), cfg);
            }
        }
        let callgraph = CallGraph::build(&ssa);
        let effects = effect_summaries(&ssa, &callgraph, catalog);
        let doms: BTreeMap<String, DomTree> = ssa.iter().map(|(n, c)| (n.clone(), DomTree::of(c))).collect();

        // Taint runs twice: the first pass finds helpers returning logical
        // time, the second treats calls to them as sources.
        let lt_functions: BTreeSet<String> = ssa
            .iter()
            .filter(|(n, cfg)| {
                let mut t = TaintAnalysis::new(cfg, &doms[*n], catalog);
                t.run();
                t.returns_logical_time()
            })
            .map(|(n, _)| n.clone())
            .collect();

        let with_dom: BTreeMap<String, (Cfg, DomTree)> =
            ssa.into_iter().map(|(n, c)| { let d = doms[&n].clone(); (n, (c, d)) }).collect();
        let summaries = cells::summarize(&with_dom, catalog);
        let users: BTreeSet<String> = with_dom.keys().cloned().collect();
        let ctx = cells::Context { catalog, user_functions: &users, summaries: Some(&summaries) };

        let functions = with_dom
            .into_iter()
            .map(|(name, (cfg, dom))| {
                let sinks = {
                    let mut t = TaintAnalysis::new(&cfg, &dom, catalog).with_lt_functions(lt_functions.iter().cloned());
                    t.run();
                    t.sinks()
                };
                let cells = cells::analyze_cells(&cfg, &dom, &ctx);
                let deps = DataDep::build(&cfg);
                (name, FunctionFacts { cfg, dom, deps, sinks, cells })
            })
            .collect();
        UnitAnalysis { unit, catalog, functions, callgraph, effects }
    }

    pub fn decl(&self, name: &str) -> Option<&FunctionDecl> {
        self.unit.function(name)
    }

    pub fn run(&self, enabled: &DetectorSet) -> Vec<Finding> {
        detectors::run_all(self, enabled)
    }
}

/// Findings and frontend errors for one entry file.
#[derive(Debug, Clone)]
pub struct FileAnalysis {
    pub path: PathBuf,
    pub unit: SourceUnit,
    pub findings: Vec<Finding>,
}

impl FileAnalysis {
    pub fn errors(&self) -> &[FrontendError] {
        &self.unit.errors
    }
}

pub fn analyze_unit(unit: &SourceUnit, catalog: &Catalog, enabled: &DetectorSet) -> Vec<Finding> {
    UnitAnalysis::new(unit, catalog).run(enabled)
}

/// Load `path` with its includes and run the enabled detectors.
pub fn analyze_file(path: &Path, include_dirs: &[PathBuf], catalog: &Catalog, enabled: &DetectorSet) -> FileAnalysis {
    let unit = frontend::load_unit(path, include_dirs);
    let findings = analyze_unit(&unit, catalog, enabled);
    FileAnalysis { path: path.to_path_buf(), unit, findings }
}

/// Analyse in-memory source; includes are not followed.
pub fn analyze_source(path: impl Into<PathBuf>, text: &str, catalog: &Catalog, enabled: &DetectorSet) -> FileAnalysis {
    let path = path.into();
    let unit = frontend::parse_source(path.clone(), text);
    let findings = analyze_unit(&unit, catalog, enabled);
    FileAnalysis { path, unit, findings }
}
