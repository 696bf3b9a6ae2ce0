use std::fmt;

use crate::frontend::ast::{BinaryOp, UnaryOp};
use crate::frontend::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl BlockId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Local,
    Param,
    /// Compiler-introduced intermediate value.
    Temp,
    /// A `_` binder; its value is dropped on purpose.
    Discard,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarInfo {
    pub name: String,
    /// SSA version; always 0 before SSA construction. Version 0 in SSA form
    /// means "live on entry": a parameter or a variable read before any
    /// definition (see `undefined`).
    pub version: u32,
    pub kind: VarKind,
    /// The pre-SSA variable this version was renamed from.
    pub origin: Option<VarId>,
    /// Set on version-0 SSA names of non-parameters.
    pub undefined: bool,
}

impl VarInfo {
    pub fn display_name(&self, ssa: bool) -> String {
        if ssa {
            format!("{}_{}", self.name, self.version)
        } else {
            self.name.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Var(VarId),
    Int(i128),
    /// Anything else that is not a variable: oversized integers, string
    /// literals, `()`.
    Lit(String),
}

impl Operand {
    pub fn var(&self) -> Option<VarId> {
        match self {
            Operand::Var(v) => Some(*v),
            _ => None,
        }
    }

    pub fn int(&self) -> Option<i128> {
        match self {
            Operand::Int(n) => Some(*n),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rvalue {
    Use(Operand),
    Unary(UnaryOp, Operand),
    Binary(BinaryOp, Operand, Operand),
    Tensor(Vec<Operand>),
    Tuple(Vec<Operand>),
    /// Component `index` of a tensor or tuple value.
    Project(Operand, usize),
    /// `c ? a : b`, evaluated without branching.
    Select(Operand, Operand, Operand),
}

impl Rvalue {
    pub fn operands(&self) -> Vec<&Operand> {
        match self {
            Rvalue::Use(a) | Rvalue::Unary(_, a) | Rvalue::Project(a, _) => vec![a],
            Rvalue::Binary(_, a, b) => vec![a, b],
            Rvalue::Tensor(items) | Rvalue::Tuple(items) => items.iter().collect(),
            Rvalue::Select(c, a, b) => vec![c, a, b],
        }
    }

    fn operands_mut(&mut self) -> Vec<&mut Operand> {
        match self {
            Rvalue::Use(a) | Rvalue::Unary(_, a) | Rvalue::Project(a, _) => vec![a],
            Rvalue::Binary(_, a, b) => vec![a, b],
            Rvalue::Tensor(items) | Rvalue::Tuple(items) => items.iter_mut().collect(),
            Rvalue::Select(c, a, b) => vec![c, a, b],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CallStyle {
    /// `f(a, b)`
    Plain,
    /// `a.f(b)`
    Method,
    /// `a~f(b)`
    Modifying,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstrKind {
    Assign {
        dest: VarId,
        rv: Rvalue,
    },
    /// For a modifying call `x~f(a)`, `dests[0]` is the updated receiver and
    /// `args[0]` the receiver before the call.
    Call {
        dests: Vec<VarId>,
        dest_spans: Vec<Span>,
        callee: String,
        args: Vec<Operand>,
        style: CallStyle,
    },
    GlobRead {
        dest: VarId,
        name: String,
    },
    SetGlob {
        name: String,
        src: Operand,
    },
    /// Goes to `then_bb` when the condition holds, i.e. when it is non-zero,
    /// or zero if `negate` is set.
    Branch {
        cond: Operand,
        negate: bool,
        then_bb: BlockId,
        else_bb: BlockId,
    },
    Jump(BlockId),
    Return(Vec<Operand>),
    /// One incoming entry per predecessor, in predecessor order.
    Phi {
        dest: VarId,
        incoming: Vec<(BlockId, VarId)>,
    },
    /// A statement the frontend could not parse.
    Nop,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instruction {
    pub kind: InstrKind,
    pub span: Span,
}

impl Instruction {
    pub fn new(kind: InstrKind, span: Span) -> Self {
        Instruction { kind, span }
    }

    pub fn is_terminator(&self) -> bool {
        matches!(self.kind, InstrKind::Branch { .. } | InstrKind::Jump(_) | InstrKind::Return(_))
    }

    pub fn is_modifying_call(&self) -> bool {
        matches!(self.kind, InstrKind::Call { style: CallStyle::Modifying, .. })
    }

    pub fn defs(&self) -> Vec<VarId> {
        match &self.kind {
            InstrKind::Assign { dest, .. } | InstrKind::GlobRead { dest, .. } | InstrKind::Phi { dest, .. } => {
                vec![*dest]
            }
            InstrKind::Call { dests, .. } => dests.clone(),
            _ => Vec::new(),
        }
    }

    /// Operands read by this instruction. φ inputs are not operands; see
    /// [`Instruction::uses`].
    pub fn operands(&self) -> Vec<&Operand> {
        match &self.kind {
            InstrKind::Assign { rv, .. } => rv.operands(),
            InstrKind::Call { args, .. } => args.iter().collect(),
            InstrKind::SetGlob { src, .. } => vec![src],
            InstrKind::Branch { cond, .. } => vec![cond],
            InstrKind::Return(ops) => ops.iter().collect(),
            InstrKind::GlobRead { .. } | InstrKind::Jump(_) | InstrKind::Phi { .. } | InstrKind::Nop => Vec::new(),
        }
    }

    pub(crate) fn operands_mut(&mut self) -> Vec<&mut Operand> {
        match &mut self.kind {
            InstrKind::Assign { rv, .. } => rv.operands_mut(),
            InstrKind::Call { args, .. } => args.iter_mut().collect(),
            InstrKind::SetGlob { src, .. } => vec![src],
            InstrKind::Branch { cond, .. } => vec![cond],
            InstrKind::Return(ops) => ops.iter_mut().collect(),
            InstrKind::GlobRead { .. } | InstrKind::Jump(_) | InstrKind::Phi { .. } | InstrKind::Nop => Vec::new(),
        }
    }

    /// Every variable read, including φ inputs.
    pub fn uses(&self) -> Vec<VarId> {
        match &self.kind {
            InstrKind::Phi { incoming, .. } => incoming.iter().map(|(_, v)| *v).collect(),
            _ => self.operands().into_iter().filter_map(Operand::var).collect(),
        }
    }

    pub fn successors(&self) -> Vec<BlockId> {
        match &self.kind {
            InstrKind::Branch { then_bb, else_bb, .. } => vec![*then_bb, *else_bb],
            InstrKind::Jump(b) => vec![*b],
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasicBlock {
    pub id: BlockId,
    pub instrs: Vec<Instruction>,
    pub preds: Vec<BlockId>,
    pub succs: Vec<BlockId>,
}

impl BasicBlock {
    pub fn terminator(&self) -> Option<&Instruction> {
        self.instrs.last().filter(|i| i.is_terminator())
    }
}

/// Location of an instruction inside a [`Cfg`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Loc {
    pub block: BlockId,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cfg {
    pub name: String,
    pub entry: BlockId,
    pub blocks: Vec<BasicBlock>,
    pub vars: Vec<VarInfo>,
    pub params: Vec<VarId>,
    pub is_ssa: bool,
    /// Span of the function declaration.
    pub span: Span,
}

impl Cfg {
    pub fn block(&self, id: BlockId) -> &BasicBlock {
        &self.blocks[id.index()]
    }

    pub fn var(&self, v: VarId) -> &VarInfo {
        &self.vars[v.index()]
    }

    pub fn instr(&self, loc: Loc) -> &Instruction {
        &self.blocks[loc.block.index()].instrs[loc.index]
    }

    pub fn var_name(&self, v: VarId) -> String {
        self.var(v).display_name(self.is_ssa)
    }

    /// All instructions with their locations, in block order.
    pub fn instructions(&self) -> impl Iterator<Item = (Loc, &Instruction)> {
        self.blocks.iter().flat_map(|b| {
            b.instrs.iter().enumerate().map(move |(index, i)| (Loc { block: b.id, index }, i))
        })
    }

    pub fn successor_lists(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.succs.iter().map(|s| s.index()).collect()).collect()
    }

    pub fn predecessor_lists(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.preds.iter().map(|s| s.index()).collect()).collect()
    }

    /// Defining location of every variable (the last one seen for non-SSA
    /// variables with several definitions).
    pub fn def_sites(&self) -> Vec<Option<Loc>> {
        let mut out = vec![None; self.vars.len()];
        for (loc, i) in self.instructions() {
            for d in i.defs() {
                out[d.index()] = Some(loc);
            }
        }
        out
    }

    pub fn use_counts(&self) -> Vec<usize> {
        let mut out = vec![0; self.vars.len()];
        for (_, i) in self.instructions() {
            for u in i.uses() {
                out[u.index()] += 1;
            }
        }
        out
    }

    /// Blocks without successors; every path through the function ends in one.
    pub fn exit_blocks(&self) -> Vec<BlockId> {
        self.blocks.iter().filter(|b| b.succs.is_empty()).map(|b| b.id).collect()
    }

    /// Recompute `preds` and `succs` from block terminators.
    pub(crate) fn rebuild_edges(&mut self) {
        for b in &mut self.blocks {
            b.preds.clear();
            b.succs = b.terminator().map(Instruction::successors).unwrap_or_default();
            b.succs.dedup();
        }
        for i in 0..self.blocks.len() {
            for s in self.blocks[i].succs.clone() {
                let id = self.blocks[i].id;
                self.blocks[s.index()].preds.push(id);
            }
        }
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Var(v) => write!(f, "%{}", v.0),
            Operand::Int(n) => write!(f, "{n}"),
            Operand::Lit(s) => write!(f, "{s:?}"),
        }
    }
}
