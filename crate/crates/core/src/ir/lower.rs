//! AST → non-SSA CFG.
//!
//! Identifiers that are neither locals, parameters nor constants are
//! treated as globals: FunC excerpts routinely use storage globals declared
//! elsewhere, and reading them through `GlobRead` keeps them out of the
//! undefined-variable set.

use std::collections::HashMap;

use thiserror::Error;

use super::instr::*;
use crate::frontend::ast::*;
use crate::frontend::Span;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LowerError {
    #[error("function `{0}` has no body")]
    NoBody(String),
}

/// Integer value of a suffixed string literal, where FunC defines one.
pub fn string_literal_value(value: &str, suffix: Option<char>) -> Option<i128> {
    match suffix {
        Some('c') => Some(crc32fast::hash(value.as_bytes()) as i128),
        Some('u') if value.len() <= 15 => {
            Some(value.bytes().fold(0i128, |acc, b| (acc << 8) | b as i128))
        }
        _ => None,
    }
}

#[derive(Debug, Clone)]
enum Target {
    Local(VarId, Span),
    Global(String, Span),
    Discard(Span),
    /// A nested pattern; bound from a temporary by projection.
    Nested(Vec<Target>, Span),
}

impl Target {
    fn span(&self) -> Span {
        match self {
            Target::Local(_, s) | Target::Global(_, s) | Target::Discard(s) | Target::Nested(_, s) => *s,
        }
    }
}

struct CallParts {
    callee: String,
    args: Vec<Operand>,
    style: CallStyle,
    /// Where the updated receiver of a modifying call goes.
    receiver: Option<Target>,
    span: Span,
}

struct Lowerer<'a> {
    unit: &'a SourceUnit,
    blocks: Vec<BasicBlock>,
    vars: Vec<VarInfo>,
    cur: BlockId,
    scopes: Vec<HashMap<String, VarId>>,
    const_depth: usize,
}

impl<'a> Lowerer<'a> {
    fn new_block(&mut self) -> BlockId {
        let id = BlockId(self.blocks.len() as u32);
        self.blocks.push(BasicBlock { id, instrs: Vec::new(), preds: Vec::new(), succs: Vec::new() });
        id
    }

    fn new_var(&mut self, name: &str, kind: VarKind) -> VarId {
        let id = VarId(self.vars.len() as u32);
        self.vars.push(VarInfo { name: name.to_string(), version: 0, kind, origin: None, undefined: false });
        id
    }

    fn temp(&mut self) -> VarId {
        let n = self.vars.len();
        self.new_var(&format!("$t{n}"), VarKind::Temp)
    }

    fn terminated(&self) -> bool {
        self.blocks[self.cur.index()].instrs.last().is_some_and(Instruction::is_terminator)
    }

    fn emit(&mut self, kind: InstrKind, span: Span) {
        if self.terminated() {
            // Code after return: give it a fresh block, pruned later.
            self.cur = self.new_block();
        }
        self.blocks[self.cur.index()].instrs.push(Instruction::new(kind, span));
    }

    fn jump(&mut self, to: BlockId, span: Span) {
        if !self.terminated() {
            self.emit(InstrKind::Jump(to), span);
        }
    }

    fn lookup(&self, name: &str) -> Option<VarId> {
        self.scopes.iter().rev().find_map(|s| s.get(name).copied())
    }

    fn declare(&mut self, name: &str) -> VarId {
        if let Some(v) = self.lookup(name) {
            // FunC treats a repeated declaration of a visible name as an
            // assignment to it.
            return v;
        }
        let v = self.new_var(name, VarKind::Local);
        self.scopes.last_mut().expect("scope").insert(name.to_string(), v);
        v
    }

    fn resolve_callee(&self, name: &str, modifying: bool) -> String {
        if modifying {
            let tilde = format!("~{name}");
            if self.unit.function(&tilde).is_some() {
                return tilde;
            }
        }
        name.to_string()
    }

    // ----- expressions -----------------------------------------------------

    fn assign_temp(&mut self, rv: Rvalue, span: Span) -> Operand {
        let t = self.temp();
        self.emit(InstrKind::Assign { dest: t, rv }, span);
        Operand::Var(t)
    }

    fn ident(&mut self, name: &str, span: Span) -> Operand {
        if let Some(v) = self.lookup(name) {
            return Operand::Var(v);
        }
        match name {
            "true" => return Operand::Int(-1),
            "false" => return Operand::Int(0),
            _ => {}
        }
        if let Some(c) = self.unit.constant(name) {
            if self.const_depth < 16 {
                self.const_depth += 1;
                let value = c.value.clone();
                let op = self.expr(&value);
                self.const_depth -= 1;
                return op;
            }
        }
        let t = self.temp();
        self.emit(InstrKind::GlobRead { dest: t, name: name.to_string() }, span);
        Operand::Var(t)
    }

    fn expr(&mut self, e: &Expr) -> Operand {
        match &e.kind {
            ExprKind::Int { text, value } => match value {
                Some(v) => Operand::Int(*v),
                None => Operand::Lit(text.clone()),
            },
            ExprKind::Str { value, suffix } => match string_literal_value(value, *suffix) {
                Some(n) => Operand::Int(n),
                None => Operand::Lit(format!("\"{value}\"")),
            },
            ExprKind::Ident(name) => self.ident(name, e.span),
            ExprKind::Underscore => Operand::Lit("_".into()),
            ExprKind::Unit => Operand::Lit("()".into()),
            ExprKind::Unary { op, operand } => {
                if let (UnaryOp::Neg, ExprKind::Int { value: Some(v), .. }) = (op, &operand.kind) {
                    return Operand::Int(-v);
                }
                let a = self.expr(operand);
                self.assign_temp(Rvalue::Unary(*op, a), e.span)
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let a = self.expr(lhs);
                let b = self.expr(rhs);
                self.assign_temp(Rvalue::Binary(*op, a, b), e.span)
            }
            ExprKind::Ternary { cond, then, els } => {
                let c = self.expr(cond);
                let a = self.expr(then);
                let b = self.expr(els);
                self.assign_temp(Rvalue::Select(c, a, b), e.span)
            }
            ExprKind::Assign { op, target, value } => {
                self.assign(target, *op, value, e.span);
                self.read_back(target)
            }
            ExprKind::Call { .. } | ExprKind::MethodCall { .. } => {
                let parts = self.call_parts(e);
                let t = self.temp();
                self.emit_call(parts, vec![Target::Local(t, e.span)]);
                Operand::Var(t)
            }
            ExprKind::Tensor(items) => {
                let ops = items.iter().map(|i| self.expr(i)).collect();
                self.assign_temp(Rvalue::Tensor(ops), e.span)
            }
            ExprKind::Tuple(items) => {
                let ops = items.iter().map(|i| self.expr(i)).collect();
                self.assign_temp(Rvalue::Tuple(ops), e.span)
            }
            ExprKind::Decl { .. } => {
                // A declaration used as a value, e.g. an uninitialized `int x`
                // nested in an expression.
                let targets = self.targets(e);
                self.targets_value(&targets)
            }
            ExprKind::TypeOnly(_) => Operand::Lit("()".into()),
        }
    }

    /// Current value of an assignment target after the assignment.
    fn read_back(&mut self, target: &Expr) -> Operand {
        let t = self.targets(target);
        self.targets_value(&t)
    }

    fn targets_value(&mut self, t: &Target) -> Operand {
        match t {
            Target::Local(v, _) => Operand::Var(*v),
            Target::Global(name, span) => {
                let name = name.clone();
                self.ident(&name, *span)
            }
            Target::Discard(_) => Operand::Lit("_".into()),
            Target::Nested(items, span) => {
                let ops = items.iter().map(|i| self.targets_value(i)).collect();
                self.assign_temp(Rvalue::Tensor(ops), *span)
            }
        }
    }

    fn call_parts(&mut self, e: &Expr) -> CallParts {
        match &e.kind {
            ExprKind::Call { func, args, .. } => {
                let args = args.iter().map(|a| self.expr(a)).collect();
                CallParts { callee: self.resolve_callee(func, false), args, style: CallStyle::Plain, receiver: None, span: e.span }
            }
            ExprKind::MethodCall { receiver, method, args, modifying, .. } => {
                let (recv_op, recv_target) = if *modifying {
                    let target = match &receiver.kind {
                        ExprKind::Ident(_) | ExprKind::Underscore | ExprKind::Decl { .. } => self.targets(receiver),
                        _ => {
                            let t = self.temp();
                            Target::Local(t, receiver.span)
                        }
                    };
                    let op = match (&receiver.kind, &target) {
                        (ExprKind::Ident(_), _) => self.expr(receiver),
                        (_, Target::Local(t, _)) if self.vars[t.index()].kind == VarKind::Temp => {
                            let op = self.expr(receiver);
                            self.emit(InstrKind::Assign { dest: *t, rv: Rvalue::Use(op) }, receiver.span);
                            Operand::Var(*t)
                        }
                        _ => self.targets_value(&target),
                    };
                    (op, Some(target))
                } else {
                    (self.expr(receiver), None)
                };
                let mut ops = vec![recv_op];
                ops.extend(args.iter().map(|a| self.expr(a)));
                let style = if *modifying { CallStyle::Modifying } else { CallStyle::Method };
                CallParts { callee: self.resolve_callee(method, *modifying), args: ops, style, receiver: recv_target, span: e.span }
            }
            _ => unreachable!("call_parts on a non-call"),
        }
    }

    /// Emit a call whose results are bound to `targets` (after the updated
    /// receiver, for modifying calls).
    fn emit_call(&mut self, parts: CallParts, targets: Vec<Target>) {
        let mut all = Vec::new();
        if let Some(r) = parts.receiver {
            all.push(r);
        }
        all.extend(targets);
        let mut dests = Vec::new();
        let mut dest_spans = Vec::new();
        let mut after = Vec::new();
        for t in all {
            let span = t.span();
            match t {
                Target::Local(v, _) => dests.push(v),
                Target::Discard(_) => dests.push(self.new_var("_", VarKind::Discard)),
                other => {
                    let tmp = self.temp();
                    dests.push(tmp);
                    after.push((other, tmp));
                }
            }
            dest_spans.push(span);
        }
        self.emit(
            InstrKind::Call { dests, dest_spans, callee: parts.callee, args: parts.args, style: parts.style },
            parts.span,
        );
        for (t, tmp) in after {
            self.write(&t, Operand::Var(tmp), parts.span);
        }
    }

    // ----- assignment ------------------------------------------------------

    fn targets(&mut self, e: &Expr) -> Target {
        self.targets_in(e, false)
    }

    fn targets_in(&mut self, e: &Expr, declaring: bool) -> Target {
        match &e.kind {
            ExprKind::Ident(name) => {
                if declaring {
                    Target::Local(self.declare(name), e.span)
                } else if let Some(v) = self.lookup(name) {
                    Target::Local(v, e.span)
                } else {
                    Target::Global(name.clone(), e.span)
                }
            }
            ExprKind::Underscore => Target::Discard(e.span),
            ExprKind::Decl { binder, .. } => self.targets_in(binder, true),
            ExprKind::Tensor(items) | ExprKind::Tuple(items) => {
                Target::Nested(items.iter().map(|i| self.targets_in(i, declaring)).collect(), e.span)
            }
            // Type-only items in a pattern, e.g. `(int, _)`.
            _ => Target::Discard(e.span),
        }
    }

    fn write(&mut self, t: &Target, value: Operand, span: Span) {
        match t {
            Target::Local(v, _) => self.emit(InstrKind::Assign { dest: *v, rv: Rvalue::Use(value) }, span),
            Target::Global(name, _) => self.emit(InstrKind::SetGlob { name: name.clone(), src: value }, span),
            Target::Discard(_) => {
                let d = self.new_var("_", VarKind::Discard);
                self.emit(InstrKind::Assign { dest: d, rv: Rvalue::Use(value) }, span);
            }
            Target::Nested(items, _) => {
                for (i, item) in items.iter().enumerate() {
                    let part = self.assign_temp(Rvalue::Project(value.clone(), i), span);
                    self.write(item, part, span);
                }
            }
        }
    }

    fn assign(&mut self, target: &Expr, op: Option<BinaryOp>, value: &Expr, span: Span) {
        if let Some(op) = op {
            let cur = self.expr(target);
            let rhs = self.expr(value);
            let t = self.targets(target);
            match t {
                Target::Local(v, _) => self.emit(InstrKind::Assign { dest: v, rv: Rvalue::Binary(op, cur, rhs) }, span),
                other => {
                    let r = self.assign_temp(Rvalue::Binary(op, cur, rhs), span);
                    self.write(&other, r, span);
                }
            }
            return;
        }
        match &value.kind {
            ExprKind::Call { .. } | ExprKind::MethodCall { .. } => {
                let parts = self.call_parts(value);
                let t = self.targets(target);
                let targets = match t {
                    // `(a, b) = f()`: one destination per tensor component.
                    Target::Nested(items, _) if matches!(target_kind(target), PatternKind::Tensor) => items,
                    other => vec![other],
                };
                self.emit_call(parts, targets);
            }
            ExprKind::Tensor(vals) if tensor_arity(target) == Some(vals.len()) => {
                let ops: Vec<Operand> = vals.iter().map(|v| self.expr(v)).collect();
                let Target::Nested(items, _) = self.targets(target) else { unreachable!() };
                for (item, op) in items.iter().zip(ops) {
                    let s = item.span();
                    self.write(item, op, s);
                }
            }
            _ => {
                let v = self.expr(value);
                let t = self.targets(target);
                self.write(&t, v, span);
            }
        }
    }

    // ----- statements ------------------------------------------------------

    fn block(&mut self, b: &Block) {
        self.scopes.push(HashMap::new());
        for s in &b.stmts {
            self.stmt(s);
        }
        self.scopes.pop();
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::VarDecl { pattern, init } => match init {
                Some(init) => self.assign(pattern, None, init, s.span),
                None => {
                    let _ = self.targets(pattern);
                }
            },
            StmtKind::Assign { target, op, value } => self.assign(target, *op, value, s.span),
            StmtKind::Expr(e) => match &e.kind {
                ExprKind::Call { .. } | ExprKind::MethodCall { .. } => {
                    let parts = self.call_parts(e);
                    self.emit_call(parts, Vec::new());
                }
                _ => {
                    let _ = self.expr(e);
                }
            },
            StmtKind::If { .. } => self.if_stmt(s),
            StmtKind::While { cond, body } => {
                let header = self.new_block();
                self.jump(header, s.span);
                self.cur = header;
                let c = self.expr(cond);
                let cond_block = self.cur;
                let body_bb = self.new_block();
                self.cur = body_bb;
                self.block(body);
                self.jump(header, body.span);
                let exit = self.new_block();
                self.blocks[cond_block.index()].instrs.push(Instruction::new(
                    InstrKind::Branch { cond: c, negate: false, then_bb: body_bb, else_bb: exit },
                    cond.span,
                ));
                self.cur = exit;
            }
            StmtKind::Repeat { count, body } => {
                let n = self.expr(count);
                let rep = self.new_var("$rep", VarKind::Temp);
                self.emit(InstrKind::Assign { dest: rep, rv: Rvalue::Use(n) }, count.span);
                let header = self.new_block();
                self.jump(header, s.span);
                self.cur = header;
                let c = self.assign_temp(Rvalue::Binary(BinaryOp::Gt, Operand::Var(rep), Operand::Int(0)), count.span);
                let body_bb = self.new_block();
                self.cur = body_bb;
                self.block(body);
                self.emit(
                    InstrKind::Assign { dest: rep, rv: Rvalue::Binary(BinaryOp::Sub, Operand::Var(rep), Operand::Int(1)) },
                    count.span,
                );
                self.jump(header, body.span);
                let exit = self.new_block();
                self.blocks[header.index()].instrs.push(Instruction::new(
                    InstrKind::Branch { cond: c, negate: false, then_bb: body_bb, else_bb: exit },
                    count.span,
                ));
                self.cur = exit;
            }
            StmtKind::DoUntil { body, cond } => {
                let body_bb = self.new_block();
                self.jump(body_bb, s.span);
                self.cur = body_bb;
                self.block(body);
                let c = self.expr(cond);
                let cond_block = self.cur;
                let exit = self.new_block();
                if !self.blocks[cond_block.index()].instrs.last().is_some_and(Instruction::is_terminator) {
                    self.blocks[cond_block.index()].instrs.push(Instruction::new(
                        InstrKind::Branch { cond: c, negate: true, then_bb: body_bb, else_bb: exit },
                        cond.span,
                    ));
                }
                self.cur = exit;
            }
            StmtKind::Return(e) => {
                let ops = match &e.kind {
                    ExprKind::Unit => Vec::new(),
                    ExprKind::Tensor(items) => items.iter().map(|i| self.expr(i)).collect(),
                    _ => vec![self.expr(e)],
                };
                self.emit(InstrKind::Return(ops), s.span);
            }
            StmtKind::Block(b) => self.block(b),
            StmtKind::TryCatch { body, catch_args, handler } => {
                let body_bb = self.new_block();
                let handler_bb = self.new_block();
                self.emit(
                    InstrKind::Branch { cond: Operand::Lit("$try".into()), negate: false, then_bb: body_bb, else_bb: handler_bb },
                    s.span,
                );
                self.cur = body_bb;
                self.block(body);
                let body_end = self.cur;
                let body_done = self.terminated();
                self.cur = handler_bb;
                self.scopes.push(HashMap::new());
                for a in catch_args {
                    let t = self.targets_in(a, true);
                    self.write(&t, Operand::Lit("$exception".into()), a.span);
                }
                self.block(handler);
                self.scopes.pop();
                let join = self.new_block();
                self.jump(join, handler.span);
                if !body_done {
                    self.blocks[body_end.index()].instrs.push(Instruction::new(InstrKind::Jump(join), body.span));
                }
                self.cur = join;
            }
            StmtKind::Opaque => self.emit(InstrKind::Nop, s.span),
        }
    }

    fn if_stmt(&mut self, s: &Stmt) {
        let StmtKind::If { cond, negated, then_block, else_branch } = &s.kind else { unreachable!() };
        let c = self.expr(cond);
        if self.terminated() {
            self.cur = self.new_block();
        }
        let cond_block = self.cur;
        let then_bb = self.new_block();
        self.cur = then_bb;
        self.block(then_block);
        let then_end = self.cur;
        let then_done = self.terminated();
        let (else_bb, else_end, else_done) = match else_branch {
            Some(e) => {
                let bb = self.new_block();
                self.cur = bb;
                match &e.kind {
                    StmtKind::Block(b) => self.block(b),
                    _ => self.stmt(e),
                }
                (Some(bb), self.cur, self.terminated())
            }
            None => (None, then_end, true),
        };
        let merge = self.new_block();
        self.blocks[cond_block.index()].instrs.push(Instruction::new(
            InstrKind::Branch { cond: c, negate: *negated, then_bb, else_bb: else_bb.unwrap_or(merge) },
            cond.span,
        ));
        if !then_done {
            self.blocks[then_end.index()].instrs.push(Instruction::new(InstrKind::Jump(merge), then_block.span));
        }
        if else_bb.is_some() && !else_done {
            let span = else_branch.as_ref().map(|e| e.span).unwrap_or(s.span);
            self.blocks[else_end.index()].instrs.push(Instruction::new(InstrKind::Jump(merge), span));
        }
        self.cur = merge;
    }
}

enum PatternKind {
    Tensor,
    Other,
}

fn target_kind(e: &Expr) -> PatternKind {
    match &e.kind {
        ExprKind::Tensor(_) => PatternKind::Tensor,
        ExprKind::Decl { binder, .. } => target_kind(binder),
        _ => PatternKind::Other,
    }
}

fn tensor_arity(e: &Expr) -> Option<usize> {
    match &e.kind {
        ExprKind::Tensor(items) => Some(items.len()),
        ExprKind::Decl { binder, .. } => tensor_arity(binder),
        _ => None,
    }
}

/// Drop blocks unreachable from the entry and renumber the rest densely,
/// keeping their relative order.
fn prune_unreachable(cfg: &mut Cfg) {
    cfg.rebuild_edges();
    let mut reachable = vec![false; cfg.blocks.len()];
    let mut stack = vec![cfg.entry.index()];
    reachable[cfg.entry.index()] = true;
    while let Some(b) = stack.pop() {
        for s in &cfg.blocks[b].succs {
            if !reachable[s.index()] {
                reachable[s.index()] = true;
                stack.push(s.index());
            }
        }
    }
    let mut remap = vec![None; cfg.blocks.len()];
    let mut next = 0u32;
    for (i, r) in reachable.iter().enumerate() {
        if *r {
            remap[i] = Some(BlockId(next));
            next += 1;
        }
    }
    let old = std::mem::take(&mut cfg.blocks);
    for (i, mut b) in old.into_iter().enumerate() {
        let Some(id) = remap[i] else { continue };
        b.id = id;
        if let Some(t) = b.instrs.last_mut() {
            match &mut t.kind {
                InstrKind::Branch { then_bb, else_bb, .. } => {
                    *then_bb = remap[then_bb.index()].expect("reachable successor");
                    *else_bb = remap[else_bb.index()].expect("reachable successor");
                }
                InstrKind::Jump(to) => *to = remap[to.index()].expect("reachable successor"),
                _ => {}
            }
        }
        cfg.blocks.push(b);
    }
    cfg.entry = remap[cfg.entry.index()].expect("entry");
    cfg.rebuild_edges();
}

/// Lower one function to a non-SSA CFG.
pub fn lower(f: &FunctionDecl, unit: &SourceUnit) -> Result<Cfg, LowerError> {
    let body = f.block().ok_or_else(|| LowerError::NoBody(f.name.clone()))?;
    let mut l = Lowerer { unit, blocks: Vec::new(), vars: Vec::new(), cur: BlockId(0), scopes: vec![HashMap::new()], const_depth: 0 };
    let entry = l.new_block();
    l.cur = entry;
    let mut params = Vec::new();
    for p in &f.params {
        if let Some(name) = &p.name {
            let v = l.new_var(name, VarKind::Param);
            l.scopes[0].insert(name.clone(), v);
            params.push(v);
        }
    }
    l.block(body);
    if !l.terminated() {
        l.emit(InstrKind::Return(Vec::new()), body.span.last_char());
    }
    let mut cfg = Cfg { name: f.name.clone(), entry, blocks: l.blocks, vars: l.vars, params, is_ssa: false, span: f.span };
    prune_unreachable(&mut cfg);
    Ok(cfg)
}
