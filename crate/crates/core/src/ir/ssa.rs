//! SSA construction: semi-pruned φ placement at iterated dominance
//! frontiers, then renaming along the dominator tree.

use std::collections::{BTreeSet, HashSet};

use super::dom::DomTree;
use super::instr::*;

/// Convert a non-SSA CFG to SSA form. Parameters become version 0; a read of
/// a variable with no reaching definition becomes a version-0 name marked
/// `undefined`.
pub fn to_ssa(cfg: &Cfg) -> Cfg {
    assert!(!cfg.is_ssa, "CFG is already in SSA form");
    let dom = DomTree::of(cfg);
    let df = dom.frontiers(&cfg.successor_lists());
    let nvars = cfg.vars.len();
    let nblocks = cfg.blocks.len();

    // Variables read before being written in some block ("non-local" names)
    // are the only ones that can need a φ.
    let mut def_blocks: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nvars];
    let mut nonlocal = vec![false; nvars];
    for p in &cfg.params {
        def_blocks[p.index()].insert(cfg.entry.index());
    }
    for b in &cfg.blocks {
        let mut killed = HashSet::new();
        for i in &b.instrs {
            for u in i.uses() {
                if !killed.contains(&u) {
                    nonlocal[u.index()] = true;
                }
            }
            for d in i.defs() {
                killed.insert(d);
                def_blocks[d.index()].insert(b.id.index());
            }
        }
    }

    let mut phi_vars: Vec<Vec<VarId>> = vec![Vec::new(); nblocks];
    for v in 0..nvars {
        if !nonlocal[v] || cfg.vars[v].kind == VarKind::Discard {
            continue;
        }
        let mut has_phi = vec![false; nblocks];
        let mut work: Vec<usize> = def_blocks[v].iter().copied().collect();
        let mut queued: HashSet<usize> = work.iter().copied().collect();
        while let Some(b) = work.pop() {
            for &d in &df[b] {
                if !has_phi[d] {
                    has_phi[d] = true;
                    phi_vars[d].push(VarId(v as u32));
                    if queued.insert(d) {
                        work.push(d);
                    }
                }
            }
        }
    }

    let mut r = Renamer {
        old: cfg,
        vars: Vec::new(),
        stacks: vec![Vec::new(); nvars],
        counters: vec![0; nvars],
        undefined: vec![None; nvars],
    };

    let mut params = Vec::new();
    for &p in &cfg.params {
        let info = cfg.var(p);
        let id = r.push_var(VarInfo { name: info.name.clone(), version: 0, kind: VarKind::Param, origin: Some(p), undefined: false });
        r.stacks[p.index()].push(id);
        params.push(id);
    }

    // New blocks: φs first (destinations filled in during renaming), then
    // copies of the original instructions.
    let mut blocks: Vec<BasicBlock> = cfg
        .blocks
        .iter()
        .map(|b| {
            let span = b.instrs.first().map(|i| i.span).unwrap_or(cfg.span);
            let mut instrs: Vec<Instruction> = phi_vars[b.id.index()]
                .iter()
                .map(|&v| {
                    Instruction::new(
                        InstrKind::Phi { dest: v, incoming: b.preds.iter().map(|p| (*p, v)).collect() },
                        span,
                    )
                })
                .collect();
            instrs.extend(b.instrs.iter().cloned());
            BasicBlock { id: b.id, instrs, preds: b.preds.clone(), succs: b.succs.clone() }
        })
        .collect();
    let phi_counts: Vec<usize> = phi_vars.iter().map(Vec::len).collect();

    // Iterative dominator-tree walk: (block, entering?).
    let mut stack = vec![(cfg.entry.index(), true)];
    let mut pushed: Vec<Vec<usize>> = vec![Vec::new(); nblocks];
    while let Some((b, entering)) = stack.pop() {
        if !entering {
            for v in pushed[b].drain(..) {
                r.stacks[v].pop();
            }
            continue;
        }
        stack.push((b, false));
        for instr in blocks[b].instrs.iter_mut() {
            if let InstrKind::Phi { dest, .. } = &mut instr.kind {
                let old = *dest;
                *dest = r.fresh(old);
                pushed[b].push(old.index());
                continue;
            }
            for op in instr.operands_mut() {
                if let Operand::Var(v) = op {
                    *v = r.current(*v);
                }
            }
            match &mut instr.kind {
                InstrKind::Assign { dest, .. } | InstrKind::GlobRead { dest, .. } => {
                    let old = *dest;
                    *dest = r.fresh(old);
                    pushed[b].push(old.index());
                }
                InstrKind::Call { dests, .. } => {
                    for d in dests.iter_mut() {
                        let old = *d;
                        *d = r.fresh(old);
                        pushed[b].push(old.index());
                    }
                }
                _ => {}
            }
        }
        for s in cfg.blocks[b].succs.clone() {
            let s = s.index();
            let j = cfg.blocks[s].preds.iter().position(|p| p.index() == b).expect("edge lists consistent");
            for k in 0..phi_counts[s] {
                if let InstrKind::Phi { incoming, .. } = &mut blocks[s].instrs[k].kind {
                    let old = phi_vars[s][k];
                    incoming[j] = (BlockId(b as u32), r.current(old));
                }
            }
        }
        for &c in dom.children[b].iter().rev() {
            stack.push((c, true));
        }
    }

    Cfg {
        name: cfg.name.clone(),
        entry: cfg.entry,
        blocks,
        vars: r.vars,
        params,
        is_ssa: true,
        span: cfg.span,
    }
}

struct Renamer<'a> {
    old: &'a Cfg,
    vars: Vec<VarInfo>,
    stacks: Vec<Vec<VarId>>,
    counters: Vec<u32>,
    undefined: Vec<Option<VarId>>,
}

impl Renamer<'_> {
    fn push_var(&mut self, info: VarInfo) -> VarId {
        let id = VarId(self.vars.len() as u32);
        self.vars.push(info);
        id
    }

    fn fresh(&mut self, old: VarId) -> VarId {
        self.counters[old.index()] += 1;
        let info = self.old.var(old);
        let id = self.push_var(VarInfo {
            name: info.name.clone(),
            version: self.counters[old.index()],
            kind: if info.kind == VarKind::Param { VarKind::Local } else { info.kind },
            origin: Some(old),
            undefined: false,
        });
        self.stacks[old.index()].push(id);
        id
    }

    fn current(&mut self, old: VarId) -> VarId {
        if let Some(v) = self.stacks[old.index()].last() {
            return *v;
        }
        if let Some(v) = self.undefined[old.index()] {
            return v;
        }
        let info = self.old.var(old);
        let id = self.push_var(VarInfo { name: info.name.clone(), version: 0, kind: info.kind, origin: Some(old), undefined: true });
        self.undefined[old.index()] = Some(id);
        id
    }
}

/// Check the SSA invariants: single assignment, one φ input per
/// predecessor, φs only at block starts, terminators only at block ends,
/// and every use dominated by its definition. Returns the first violation.
pub fn check_ssa(cfg: &Cfg) -> Result<(), String> {
    if !cfg.is_ssa {
        return Err("not in SSA form".into());
    }
    let dom = DomTree::of(cfg);
    let mut def: Vec<Option<Loc>> = vec![None; cfg.vars.len()];
    for (loc, i) in cfg.instructions() {
        for d in i.defs() {
            if def[d.index()].is_some() {
                return Err(format!("{} defined twice", cfg.var_name(d)));
            }
            if cfg.var(d).version == 0 {
                return Err(format!("{} has version 0 but a definition", cfg.var_name(d)));
            }
            def[d.index()] = Some(loc);
        }
    }
    for b in &cfg.blocks {
        let mut seen_non_phi = false;
        for (idx, i) in b.instrs.iter().enumerate() {
            match &i.kind {
                InstrKind::Phi { incoming, .. } => {
                    if seen_non_phi {
                        return Err(format!("phi after non-phi in bb{}", b.id.0));
                    }
                    if incoming.len() != b.preds.len() {
                        return Err(format!("phi arity {} != {} preds in bb{}", incoming.len(), b.preds.len(), b.id.0));
                    }
                    for (p, v) in incoming {
                        if !b.preds.contains(p) {
                            return Err(format!("phi input from non-predecessor bb{}", p.0));
                        }
                        if let Some(d) = def[v.index()] {
                            if !dom.dominates_block(d.block, *p) {
                                return Err(format!("phi input {} does not dominate bb{}", cfg.var_name(*v), p.0));
                            }
                        }
                    }
                }
                _ => {
                    seen_non_phi = true;
                    if i.is_terminator() && idx + 1 != b.instrs.len() {
                        return Err(format!("terminator in the middle of bb{}", b.id.0));
                    }
                    for u in i.uses() {
                        if let Some(d) = def[u.index()] {
                            let ok = if d.block == b.id { d.index < idx } else { dom.dominates_block(d.block, b.id) };
                            if !ok {
                                return Err(format!("use of {} in bb{} not dominated by its definition", cfg.var_name(u), b.id.0));
                            }
                        } else if cfg.var(u).version != 0 {
                            return Err(format!("{} used but never defined", cfg.var_name(u)));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}
