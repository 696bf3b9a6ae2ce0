//! Inter-procedural call graph, transitive effect summaries and detection of
//! the bounced-message check in `recv_internal`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::catalog::{Catalog, Effects};
use super::consts::ConstEval;
use crate::frontend::ast::BinaryOp;
use crate::frontend::Span;
use crate::ir::{BlockId, Cfg, InstrKind, Loc, Operand, Rvalue, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CgNode {
    Function(String),
    /// One `send_raw_message` call site.
    SendMessage { function: String, span: Span },
    /// Entry for bounced messages; present when `recv_internal` checks the
    /// bounced flag.
    RecvBounced,
    ExternalBuiltin(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Call,
    Bounce,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CgEdge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
    /// Location of the call in the caller; for a bounce edge, the branch
    /// testing the flag.
    pub loc: Loc,
    pub span: Span,
}

#[derive(Debug, Clone, Default)]
pub struct CallGraph {
    pub nodes: Vec<CgNode>,
    pub edges: Vec<CgEdge>,
    index: HashMap<CgNode, usize>,
}

/// Resolve a call's callee to a user function name, if it names one.
pub fn resolve_user<'a>(callee: &'a str, cfgs: &BTreeMap<String, Cfg>) -> Option<&'a str> {
    if cfgs.contains_key(callee) {
        return Some(callee);
    }
    let plain = callee.strip_prefix('~')?;
    cfgs.contains_key(plain).then_some(plain)
}

impl CallGraph {
    fn node(&mut self, n: CgNode) -> usize {
        if let Some(&i) = self.index.get(&n) {
            return i;
        }
        self.nodes.push(n.clone());
        self.index.insert(n, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    pub fn find(&self, n: &CgNode) -> Option<usize> {
        self.index.get(n).copied()
    }

    /// `cfgs` maps every function with a body to its SSA CFG.
    pub fn build(cfgs: &BTreeMap<String, Cfg>) -> Self {
        let mut g = CallGraph::default();
        for name in cfgs.keys() {
            g.node(CgNode::Function(name.clone()));
        }
        for (name, cfg) in cfgs {
            let from = g.node(CgNode::Function(name.clone()));
            for (loc, i) in cfg.instructions() {
                let InstrKind::Call { callee, .. } = &i.kind else { continue };
                let target = match resolve_user(callee, cfgs) {
                    Some(f) => CgNode::Function(f.to_string()),
                    None => {
                        let plain = callee.trim_start_matches('~');
                        if plain == "send_raw_message" {
                            CgNode::SendMessage { function: name.clone(), span: i.span }
                        } else {
                            CgNode::ExternalBuiltin(plain.to_string())
                        }
                    }
                };
                let to = g.node(target);
                g.edges.push(CgEdge { from, to, kind: EdgeKind::Call, loc, span: i.span });
            }
        }
        if let Some(recv) = cfgs.get("recv_internal") {
            if let Some(check) = bounced_check(recv) {
                let from = g.node(CgNode::RecvBounced);
                let to = g.node(CgNode::Function("recv_internal".into()));
                g.edges.push(CgEdge { from, to, kind: EdgeKind::Bounce, loc: check.branch, span: check.span });
            }
        }
        g
    }

    pub fn call_edges(&self) -> impl Iterator<Item = &CgEdge> {
        self.edges.iter().filter(|e| e.kind == EdgeKind::Call)
    }

    /// Call sites of user function `name` as (caller, location).
    pub fn call_sites(&self, name: &str) -> Vec<(&str, Loc)> {
        let Some(to) = self.find(&CgNode::Function(name.to_string())) else { return Vec::new() };
        self.call_edges()
            .filter(|e| e.to == to)
            .filter_map(|e| match &self.nodes[e.from] {
                CgNode::Function(caller) => Some((caller.as_str(), e.loc)),
                _ => None,
            })
            .collect()
    }

    /// User functions called directly by `name`.
    pub fn callees(&self, name: &str) -> BTreeSet<&str> {
        let Some(from) = self.find(&CgNode::Function(name.to_string())) else { return BTreeSet::new() };
        self.call_edges()
            .filter(|e| e.from == from)
            .filter_map(|e| match &self.nodes[e.to] {
                CgNode::Function(f) => Some(f.as_str()),
                _ => None,
            })
            .collect()
    }

    pub fn send_sites(&self) -> Vec<(&str, Span)> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                CgNode::SendMessage { function, span } => Some((function.as_str(), *span)),
                _ => None,
            })
            .collect()
    }
}

/// Effects of each user function including everything it calls,
/// transitively. User functions shadow builtins of the same name.
pub fn effect_summaries(cfgs: &BTreeMap<String, Cfg>, cg: &CallGraph, catalog: &Catalog) -> BTreeMap<String, Effects> {
    let mut out: BTreeMap<String, Effects> = cfgs
        .iter()
        .map(|(name, cfg)| {
            let mut e = Effects::empty();
            for (_, i) in cfg.instructions() {
                match &i.kind {
                    InstrKind::Call { callee, .. } if resolve_user(callee, cfgs).is_none() => {
                        if let Some(spec) = catalog.get(callee) {
                            e |= spec.effects;
                        }
                    }
                    InstrKind::SetGlob { .. } => e |= Effects::GLOBAL_WRITE,
                    _ => {}
                }
            }
            (name.clone(), e)
        })
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for name in cfgs.keys() {
            let mut e = out[name];
            for c in cg.callees(name) {
                e |= out[c];
            }
            if e != out[name] {
                out.insert(name.clone(), e);
                changed = true;
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BouncedCheck {
    /// The branch on `flags & 1`.
    pub branch: Loc,
    /// First block of the bounced-message arm.
    pub bounced_bb: BlockId,
    pub span: Span,
}

fn def_of(cfg: &Cfg, v: VarId) -> Option<&InstrKind> {
    cfg.instructions().find(|(_, i)| i.defs().contains(&v)).map(|(_, i)| &i.kind)
}

/// Follow plain copies back to the original variable.
fn strip_copies(cfg: &Cfg, mut v: VarId) -> VarId {
    for _ in 0..16 {
        match def_of(cfg, v) {
            Some(InstrKind::Assign { rv: Rvalue::Use(Operand::Var(w)), .. }) => v = *w,
            _ => break,
        }
    }
    v
}

/// Whether `v` holds the 4-bit flags loaded from the message header.
fn is_flags(cfg: &Cfg, ev: &ConstEval, v: VarId) -> bool {
    let v = strip_copies(cfg, v);
    match def_of(cfg, v) {
        Some(InstrKind::Call { callee, args, dests, .. }) => {
            let plain = callee.trim_start_matches('~');
            matches!(plain, "load_uint" | "preload_uint")
                && args.get(1).and_then(|a| ev.operand(a)) == Some(4)
                && dests.last() == Some(&v)
        }
        _ => false,
    }
}

/// Find the branch on `flags & 1` in a receiver. Only a condition computed
/// from a 4-bit header load counts.
pub fn bounced_check(cfg: &Cfg) -> Option<BouncedCheck> {
    let ev = ConstEval::new(cfg);
    for (loc, i) in cfg.instructions() {
        let InstrKind::Branch { cond: Operand::Var(c), negate, then_bb, else_bb } = &i.kind else { continue };
        let c = strip_copies(cfg, *c);
        let Some(InstrKind::Assign { rv: Rvalue::Binary(BinaryOp::BitAnd, a, b), .. }) = def_of(cfg, c) else {
            continue;
        };
        let flags = match (a, b) {
            (Operand::Var(f), m) | (m, Operand::Var(f)) if ev.operand(m) == Some(1) => *f,
            _ => continue,
        };
        if is_flags(cfg, &ev, flags) {
            let bounced_bb = if *negate { *else_bb } else { *then_bb };
            return Some(BouncedCheck { branch: loc, bounced_bb, span: i.span });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_source;
    use crate::ir::build_ssa;

    fn cfgs(src: &str) -> BTreeMap<String, Cfg> {
        let unit = parse_source("t.fc", src);
        unit.functions
            .iter()
            .filter(|f| f.block().is_some())
            .map(|f| (f.name.clone(), build_ssa(f, &unit).unwrap()))
            .collect()
    }

    const SRC: &str = "
() save(int x) impure inline { set_data(begin_cell().store_uint(x, 32).end_cell()); }
() helper(int x) { save(x); }
() notify(slice to) impure {
    send_raw_message(begin_cell().store_uint(0x18, 6).store_slice(to).end_cell(), 64);
}
() recv_internal(cell in_msg_full, slice in_msg_body) impure {
    slice cs = in_msg_full.begin_parse();
    int flags = cs~load_uint(4);
    if (flags & 1) {
        return ();
    }
    helper(1);
    notify(cs~load_msg_addr());
}
";

    #[test]
    fn one_edge_per_call() {
        let cfgs = cfgs(SRC);
        let cg = CallGraph::build(&cfgs);
        let calls: usize = cfgs
            .values()
            .map(|c| c.instructions().filter(|(_, i)| matches!(i.kind, InstrKind::Call { .. })).count())
            .sum();
        assert_eq!(cg.call_edges().count(), calls);
        assert_eq!(cg.send_sites().len(), 1);
        assert!(cg.find(&CgNode::RecvBounced).is_some());
        assert_eq!(cg.call_sites("helper"), vec![("recv_internal", cg.call_sites("helper")[0].1)]);
    }

    #[test]
    fn effects_are_transitive() {
        let cfgs = cfgs(SRC);
        let cg = CallGraph::build(&cfgs);
        let eff = effect_summaries(&cfgs, &cg, &Catalog::builtin());
        assert!(eff["helper"].contains(Effects::STORAGE_WRITE));
        assert!(eff["recv_internal"].contains(Effects::MESSAGE_SEND | Effects::STORAGE_WRITE));
        assert!(!eff["notify"].contains(Effects::STORAGE_WRITE));
    }

    #[test]
    fn bounced_check_requires_header_flags() {
        let c = cfgs(SRC);
        let check = bounced_check(&c["recv_internal"]).unwrap();
        assert_eq!(check.span.start_line, 10);
        let c = cfgs("() recv_internal(int msg_value, slice in_msg_body) { int x = in_msg_body~load_uint(32); if (x & 1) { return (); } }");
        assert!(bounced_check(&c["recv_internal"]).is_none());
        assert!(CallGraph::build(&c).find(&CgNode::RecvBounced).is_none());
    }

    #[test]
    fn ifnot_selects_else_arm() {
        let c = cfgs("() recv_internal(cell m) { slice cs = m.begin_parse(); int flags = cs~load_uint(4); ifnot (flags & 1) { g(); } else { h(); } }");
        let cfg = &c["recv_internal"];
        let check = bounced_check(cfg).unwrap();
        let InstrKind::Branch { else_bb, .. } = &cfg.instr(check.branch).kind else { panic!() };
        assert_eq!(check.bounced_bb, *else_bb);
    }
}
