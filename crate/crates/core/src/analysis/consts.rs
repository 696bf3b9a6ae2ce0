//! Local constant folding over SSA definitions: a value is constant when its
//! definition chain bottoms out in literals through pure operators. φ nodes
//! and calls are never folded.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::frontend::ast::{BinaryOp, UnaryOp};
use crate::ir::{Cfg, InstrKind, Loc, Operand, Rvalue, VarId};

const MAX_DEPTH: usize = 64;

fn floor_div(a: i128, b: i128) -> Option<i128> {
    if b == 0 {
        return None;
    }
    let q = a.checked_div(b)?;
    Some(if (a % b != 0) && ((a < 0) != (b < 0)) { q - 1 } else { q })
}

fn ceil_div(a: i128, b: i128) -> Option<i128> {
    Some(-floor_div(a.checked_neg()?, b)?)
}

/// Division rounded to the nearest integer, ties towards +∞.
fn round_div(a: i128, b: i128) -> Option<i128> {
    floor_div(a.checked_mul(2)?.checked_add(b)?, b.checked_mul(2)?)
}

fn flag(b: bool) -> i128 {
    if b {
        -1
    } else {
        0
    }
}

/// Evaluate a binary operator with FunC semantics: division rounds towards
/// −∞ unless the `~` / `^` variants are used, and true is −1.
pub fn fold_binary(op: BinaryOp, a: i128, b: i128) -> Option<i128> {
    use BinaryOp::*;
    let shift = |n: i128| u32::try_from(n).ok().filter(|n| *n < 127);
    Some(match op {
        Add => a.checked_add(b)?,
        Sub => a.checked_sub(b)?,
        Mul => a.checked_mul(b)?,
        Div => floor_div(a, b)?,
        DivRound => round_div(a, b)?,
        DivCeil => ceil_div(a, b)?,
        Mod => a.checked_sub(floor_div(a, b)?.checked_mul(b)?)?,
        ModRound => a.checked_sub(round_div(a, b)?.checked_mul(b)?)?,
        ModCeil => a.checked_sub(ceil_div(a, b)?.checked_mul(b)?)?,
        DivMod => return None,
        Shl => a.checked_mul(1i128.checked_shl(shift(b)?)?)?,
        Shr => a >> shift(b)?,
        ShrRound => round_div(a, 1i128.checked_shl(shift(b)?)?)?,
        ShrCeil => ceil_div(a, 1i128.checked_shl(shift(b)?)?)?,
        BitAnd => a & b,
        BitOr => a | b,
        BitXor => a ^ b,
        Eq => flag(a == b),
        Ne => flag(a != b),
        Lt => flag(a < b),
        Gt => flag(a > b),
        Le => flag(a <= b),
        Ge => flag(a >= b),
        Cmp => (a > b) as i128 - (a < b) as i128,
    })
}

pub fn fold_unary(op: UnaryOp, a: i128) -> Option<i128> {
    match op {
        UnaryOp::Neg => a.checked_neg(),
        UnaryOp::BitNot | UnaryOp::Not => Some(!a),
    }
}

pub struct ConstEval<'a> {
    cfg: &'a Cfg,
    defs: Vec<Option<Loc>>,
    memo: RefCell<HashMap<VarId, Option<i128>>>,
}

impl<'a> ConstEval<'a> {
    pub fn new(cfg: &'a Cfg) -> Self {
        ConstEval { cfg, defs: cfg.def_sites(), memo: RefCell::new(HashMap::new()) }
    }

    pub fn operand(&self, op: &Operand) -> Option<i128> {
        self.operand_at(op, 0)
    }

    pub fn var(&self, v: VarId) -> Option<i128> {
        self.var_at(v, 0)
    }

    fn operand_at(&self, op: &Operand, depth: usize) -> Option<i128> {
        match op {
            Operand::Int(n) => Some(*n),
            Operand::Var(v) => self.var_at(*v, depth),
            Operand::Lit(_) => None,
        }
    }

    fn var_at(&self, v: VarId, depth: usize) -> Option<i128> {
        if depth > MAX_DEPTH {
            return None;
        }
        if let Some(r) = self.memo.borrow().get(&v) {
            return *r;
        }
        let r = self.compute(v, depth);
        self.memo.borrow_mut().insert(v, r);
        r
    }

    fn compute(&self, v: VarId, depth: usize) -> Option<i128> {
        // Only SSA names have a unique definition.
        if !self.cfg.is_ssa {
            return None;
        }
        let loc = self.defs.get(v.index()).copied().flatten()?;
        let InstrKind::Assign { rv, .. } = &self.cfg.instr(loc).kind else {
            return None;
        };
        let d = depth + 1;
        match rv {
            Rvalue::Use(a) => self.operand_at(a, d),
            Rvalue::Unary(op, a) => fold_unary(*op, self.operand_at(a, d)?),
            Rvalue::Binary(op, a, b) => fold_binary(*op, self.operand_at(a, d)?, self.operand_at(b, d)?),
            Rvalue::Select(c, a, b) => {
                if self.operand_at(c, d)? != 0 {
                    self.operand_at(a, d)
                } else {
                    self.operand_at(b, d)
                }
            }
            Rvalue::Tensor(_) | Rvalue::Tuple(_) | Rvalue::Project(..) => None,
        }
    }
}
