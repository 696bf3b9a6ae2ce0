//! Forward taint propagation over SSA for logical-time and randomness
//! values.
//!
//! Sources are results of logical-time builtins (`cur_lt`, `block_lt`) and
//! of random-number calls dominated by a seeding call whose seed is
//! logical-time tainted. Taint flows through assignments, call arguments to
//! results, φ nodes, globals (flow-insensitively within a function) and
//! implicitly into every definition in a branch arm controlled by a tainted
//! condition.

use std::collections::{BTreeMap, HashSet};

use bitflags::bitflags;

use super::catalog::{Catalog, Effects, Sink};
use crate::frontend::Span;
use crate::ir::{Cfg, DomTree, InstrKind, Loc, Operand, Rvalue, VarId};

bitflags! {
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
    pub struct Taint: u8 {
        const LOGICAL_TIME = 1;
        const RANDOMNESS = 2;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SinkKind {
    Comparison,
    BranchCond,
    IndexAccess,
    SeedArg,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SinkHit {
    pub kind: SinkKind,
    pub loc: Loc,
    pub span: Span,
    pub taint: Taint,
}

/// Branch arm heads whose dominated blocks receive implicit flow: a branch
/// target counts as an arm only if the branch is its sole predecessor.
fn arm_regions(cfg: &Cfg, dom: &DomTree) -> Vec<(Loc, Vec<usize>)> {
    let mut out = Vec::new();
    for b in &cfg.blocks {
        let Some(term) = b.terminator() else { continue };
        let InstrKind::Branch { then_bb, else_bb, .. } = &term.kind else { continue };
        let mut region = Vec::new();
        for t in [then_bb, else_bb] {
            if cfg.block(*t).preds.len() == 1 {
                region.extend(dom.dominated_by(t.index()));
            }
        }
        region.sort_unstable();
        region.dedup();
        out.push((Loc { block: b.id, index: b.instrs.len() - 1 }, region));
    }
    out
}

pub struct TaintAnalysis<'a> {
    cfg: &'a Cfg,
    dom: &'a DomTree,
    catalog: &'a Catalog,
    lt_functions: HashSet<String>,
    arms: Vec<(Loc, Vec<usize>)>,
    extra: Vec<(VarId, Taint)>,
    taint: Vec<Taint>,
    globals: BTreeMap<String, Taint>,
}

impl<'a> TaintAnalysis<'a> {
    pub fn new(cfg: &'a Cfg, dom: &'a DomTree, catalog: &'a Catalog) -> Self {
        TaintAnalysis {
            cfg,
            dom,
            catalog,
            lt_functions: HashSet::new(),
            arms: arm_regions(cfg, dom),
            extra: Vec::new(),
            taint: vec![Taint::empty(); cfg.vars.len()],
            globals: BTreeMap::new(),
        }
    }

    /// User functions whose return value carries logical time; their call
    /// results become sources.
    pub fn with_lt_functions(mut self, names: impl IntoIterator<Item = String>) -> Self {
        self.lt_functions.extend(names);
        self
    }

    /// Mark `v` as an additional source.
    pub fn add_source(&mut self, v: VarId, t: Taint) {
        self.extra.push((v, t));
        self.taint[v.index()] |= t;
    }

    pub fn taint_of(&self, v: VarId) -> Taint {
        self.taint[v.index()]
    }

    pub fn operand_taint(&self, o: &Operand) -> Taint {
        o.var().map(|v| self.taint_of(v)).unwrap_or_default()
    }

    pub fn tainted_vars(&self) -> Vec<(VarId, Taint)> {
        self.taint
            .iter()
            .enumerate()
            .filter(|(_, t)| !t.is_empty())
            .map(|(i, t)| (VarId(i as u32), *t))
            .collect()
    }

    pub fn global_taint(&self, name: &str) -> Taint {
        self.globals.get(name).copied().unwrap_or_default()
    }

    fn loc_dominates(&self, a: Loc, b: Loc) -> bool {
        if a.block == b.block {
            a.index < b.index
        } else {
            self.dom.dominates_block(a.block, b.block)
        }
    }

    /// Seeding calls whose seed carries logical time.
    pub fn tainted_seedings(&self) -> Vec<Loc> {
        let mut out = Vec::new();
        for (loc, i) in self.cfg.instructions() {
            let InstrKind::Call { callee, args, .. } = &i.kind else { continue };
            let Some(spec) = self.catalog.get(callee) else { continue };
            let Some(Sink::Seed(k)) = spec.sink else { continue };
            let seed_lt = args.get(k).map(|a| self.operand_taint(a)).unwrap_or_default();
            if spec.effects.contains(Effects::LOGICAL_TIME_SOURCE) || seed_lt.contains(Taint::LOGICAL_TIME) {
                out.push(loc);
            }
        }
        out
    }

    fn add(&mut self, v: VarId, t: Taint) -> bool {
        let cur = &mut self.taint[v.index()];
        let new = *cur | t;
        let changed = new != *cur;
        *cur = new;
        changed
    }

    /// One pass over all instructions in reverse post-order. Returns whether
    /// anything changed; taint only ever grows.
    pub fn iterate_once(&mut self) -> bool {
        let mut changed = false;
        for (v, t) in self.extra.clone() {
            changed |= self.add(v, t);
        }
        let seedings = self.tainted_seedings();
        let cfg = self.cfg;
        for &b in &self.dom.rpo.clone() {
            for (index, instr) in cfg.blocks[b].instrs.iter().enumerate() {
                let loc = Loc { block: cfg.blocks[b].id, index };
                match &instr.kind {
                    InstrKind::Assign { dest, rv } => {
                        let t = rv.operands().into_iter().fold(Taint::empty(), |acc, o| acc | self.operand_taint(o));
                        changed |= self.add(*dest, t);
                    }
                    InstrKind::Call { dests, callee, args, .. } => {
                        let mut t = args.iter().fold(Taint::empty(), |acc, o| acc | self.operand_taint(o));
                        if let Some(spec) = self.catalog.get(callee) {
                            if spec.effects.contains(Effects::LOGICAL_TIME_SOURCE) && spec.rets > 0 {
                                t |= Taint::LOGICAL_TIME;
                            }
                            if spec.is_random_source() && seedings.iter().any(|s| self.loc_dominates(*s, loc)) {
                                t |= Taint::RANDOMNESS;
                            }
                        } else if self.lt_functions.contains(callee.trim_start_matches('~')) {
                            t |= Taint::LOGICAL_TIME;
                        }
                        for d in dests {
                            changed |= self.add(*d, t);
                        }
                    }
                    InstrKind::GlobRead { dest, name } => {
                        let t = self.global_taint(name);
                        changed |= self.add(*dest, t);
                    }
                    InstrKind::SetGlob { name, src } => {
                        let t = self.operand_taint(src);
                        let g = self.globals.entry(name.clone()).or_default();
                        if !g.contains(t) {
                            *g |= t;
                            changed = true;
                        }
                    }
                    InstrKind::Phi { dest, incoming } => {
                        let t = incoming.iter().fold(Taint::empty(), |acc, (_, v)| acc | self.taint_of(*v));
                        changed |= self.add(*dest, t);
                    }
                    InstrKind::Branch { cond, .. } => {
                        let t = self.operand_taint(cond);
                        if t.is_empty() {
                            continue;
                        }
                        let region = self.arms.iter().find(|(l, _)| *l == loc).map(|(_, r)| r.clone()).unwrap_or_default();
                        for rb in region {
                            for i in &cfg.blocks[rb].instrs {
                                for d in i.defs() {
                                    changed |= self.add(d, t);
                                }
                            }
                        }
                    }
                    InstrKind::Jump(_) | InstrKind::Return(_) | InstrKind::Nop => {}
                }
            }
        }
        changed
    }

    /// Iterate to the fixpoint. Returns the number of passes taken.
    pub fn run(&mut self) -> usize {
        let mut passes = 1;
        while self.iterate_once() {
            passes += 1;
        }
        passes
    }

    fn is_comparison(&self, v: VarId, depth: usize) -> bool {
        if depth > 16 {
            return false;
        }
        self.cfg.instructions().any(|(_, i)| match &i.kind {
            InstrKind::Assign { dest, rv } if *dest == v => match rv {
                Rvalue::Binary(op, ..) => op.is_comparison(),
                Rvalue::Use(Operand::Var(w)) => self.is_comparison(*w, depth + 1),
                _ => false,
            },
            _ => false,
        })
    }

    /// Tainted values reaching sinks, in instruction order.
    pub fn sinks(&self) -> Vec<SinkHit> {
        let mut out = Vec::new();
        for (loc, i) in self.cfg.instructions() {
            let hit = |kind, taint: Taint| SinkHit { kind, loc, span: i.span, taint };
            match &i.kind {
                InstrKind::Assign { rv: Rvalue::Binary(op, a, b), .. } if op.is_comparison() => {
                    let t = self.operand_taint(a) | self.operand_taint(b);
                    if !t.is_empty() {
                        out.push(hit(SinkKind::Comparison, t));
                    }
                }
                InstrKind::Branch { cond, .. } => {
                    let t = self.operand_taint(cond);
                    // A comparison condition is already reported as such.
                    let from_cmp = cond.var().is_some_and(|v| self.is_comparison(v, 0));
                    if !t.is_empty() && !from_cmp {
                        out.push(hit(SinkKind::BranchCond, t));
                    }
                }
                InstrKind::Call { callee, args, .. } => {
                    let Some(spec) = self.catalog.get(callee) else { continue };
                    match spec.sink {
                        Some(Sink::Index(k)) => {
                            let t = args.get(k).map(|a| self.operand_taint(a)).unwrap_or_default();
                            if !t.is_empty() {
                                out.push(hit(SinkKind::IndexAccess, t));
                            }
                        }
                        Some(Sink::Seed(k)) => {
                            let mut t = args.get(k).map(|a| self.operand_taint(a)).unwrap_or_default();
                            if spec.effects.contains(Effects::LOGICAL_TIME_SOURCE) {
                                t |= Taint::LOGICAL_TIME;
                            }
                            if !t.is_empty() {
                                out.push(hit(SinkKind::SeedArg, t));
                            }
                        }
                        None => {}
                    }
                }
                _ => {}
            }
        }
        out
    }

    /// Whether any returned value is logical-time tainted.
    pub fn returns_logical_time(&self) -> bool {
        self.cfg.instructions().any(|(_, i)| match &i.kind {
            InstrKind::Return(ops) => ops.iter().any(|o| self.operand_taint(o).contains(Taint::LOGICAL_TIME)),
            _ => false,
        })
    }
}
