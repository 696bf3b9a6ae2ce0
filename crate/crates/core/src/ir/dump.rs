//! Textual CFG dump used by golden tests and `--dump-ir`-style debugging:
//!
//! ```text
//! bb0: preds=[] succs=[1, 2]
//!   flags_1 = call ~load_uint(cs_1, 4) @3:16
//! ```

use std::fmt::Write;

use super::instr::*;

fn op(cfg: &Cfg, o: &Operand) -> String {
    match o {
        Operand::Var(v) => cfg.var_name(*v),
        Operand::Int(n) => n.to_string(),
        Operand::Lit(s) => s.clone(),
    }
}

fn ops(cfg: &Cfg, list: &[Operand]) -> String {
    list.iter().map(|o| op(cfg, o)).collect::<Vec<_>>().join(", ")
}

fn rvalue(cfg: &Cfg, rv: &Rvalue) -> String {
    match rv {
        Rvalue::Use(a) => op(cfg, a),
        Rvalue::Unary(u, a) => format!("{}{}", u.as_str(), op(cfg, a)),
        Rvalue::Binary(b, x, y) => format!("{} {} {}", op(cfg, x), b.as_str(), op(cfg, y)),
        Rvalue::Tensor(items) => format!("({})", ops(cfg, items)),
        Rvalue::Tuple(items) => format!("[{}]", ops(cfg, items)),
        Rvalue::Project(a, i) => format!("{}.{i}", op(cfg, a)),
        Rvalue::Select(c, a, b) => format!("{} ? {} : {}", op(cfg, c), op(cfg, a), op(cfg, b)),
    }
}

pub fn instr_text(cfg: &Cfg, i: &Instruction) -> String {
    match &i.kind {
        InstrKind::Assign { dest, rv } => format!("{} = {}", cfg.var_name(*dest), rvalue(cfg, rv)),
        InstrKind::Call { dests, callee, args, style, .. } => {
            let prefix = match style {
                CallStyle::Modifying => "~",
                CallStyle::Method => ".",
                CallStyle::Plain => "",
            };
            let call = format!("call {prefix}{callee}({})", ops(cfg, args));
            if dests.is_empty() {
                call
            } else {
                let d: Vec<String> = dests.iter().map(|d| cfg.var_name(*d)).collect();
                format!("{} = {call}", d.join(", "))
            }
        }
        InstrKind::GlobRead { dest, name } => format!("{} = glob {name}", cfg.var_name(*dest)),
        InstrKind::SetGlob { name, src } => format!("setglob {name}, {}", op(cfg, src)),
        InstrKind::Branch { cond, negate, then_bb, else_bb } => {
            let bang = if *negate { "!" } else { "" };
            format!("branch {bang}{} ? bb{} : bb{}", op(cfg, cond), then_bb.0, else_bb.0)
        }
        InstrKind::Jump(b) => format!("jump bb{}", b.0),
        InstrKind::Return(list) => {
            if list.is_empty() {
                "return".into()
            } else {
                format!("return {}", ops(cfg, list))
            }
        }
        InstrKind::Phi { dest, incoming } => {
            let inc: Vec<String> = incoming.iter().map(|(b, v)| format!("bb{}: {}", b.0, cfg.var_name(*v))).collect();
            format!("{} = phi [{}]", cfg.var_name(*dest), inc.join(", "))
        }
        InstrKind::Nop => "nop".into(),
    }
}

pub fn dump_cfg(cfg: &Cfg) -> String {
    let mut out = String::new();
    let params: Vec<String> = cfg.params.iter().map(|p| cfg.var_name(*p)).collect();
    let _ = writeln!(out, "fn {}({}){}", cfg.name, params.join(", "), if cfg.is_ssa { " ssa" } else { "" });
    for b in &cfg.blocks {
        let preds: Vec<String> = b.preds.iter().map(|p| p.0.to_string()).collect();
        let succs: Vec<String> = b.succs.iter().map(|p| p.0.to_string()).collect();
        let _ = writeln!(out, "\nbb{}: preds=[{}] succs=[{}]", b.id.0, preds.join(", "), succs.join(", "));
        for i in &b.instrs {
            let _ = writeln!(out, "  {} @{}:{}", instr_text(cfg, i), i.span.start_line, i.span.start_col);
        }
    }
    out
}
