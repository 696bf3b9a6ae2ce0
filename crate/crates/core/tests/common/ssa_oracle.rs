//! SSA invariants over the fixture tree and random programs, and
//! equivalence of each random program before and after SSA construction
//! under a small integer interpreter.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tonscanner_core::frontend::ast::{BinaryOp, UnaryOp};
use tonscanner_core::frontend::parse_source;
use tonscanner_core::ir::{build_ssa, check_ssa, lower, BlockId, Cfg, InstrKind, Operand, Rvalue};

/// Check every function with a body in the fixture tree; returns how many.
pub fn fixture_functions() -> Result<usize, String> {
    let mut checked = 0;
    for path in super::all_fixture_files() {
        let a = super::analyze(&path);
        for f in a.unit.functions.iter().filter(|f| f.block().is_some()) {
            let cfg = build_ssa(f, &a.unit).map_err(|e| format!("{}: {}: {e}", path.display(), f.name))?;
            check_ssa(&cfg).map_err(|e| format!("{}: {}: {e}", path.display(), f.name))?;
            checked += 1;
        }
    }
    Ok(checked)
}

// ----- random programs -------------------------------------------------------

struct Gen {
    rng: ChaCha8Rng,
    loops: usize,
}

const VARS: [&str; 5] = ["a", "b", "x", "y", "z"];

impl Gen {
    fn var(&mut self) -> &'static str {
        VARS.choose(&mut self.rng).unwrap()
    }

    fn expr(&mut self, depth: u32) -> String {
        if depth == 0 || self.rng.gen_bool(0.35) {
            return if self.rng.gen_bool(0.7) { self.var().to_string() } else { self.rng.gen_range(-3..10).to_string() };
        }
        match self.rng.gen_range(0..6) {
            0 => format!("({} ? {} : {})", self.cond(), self.expr(depth - 1), self.expr(depth - 1)),
            1 => format!("(- {})", self.expr(depth - 1)),
            _ => {
                let op = *["+", "-", "*", "&", "|", "^"].choose(&mut self.rng).unwrap();
                format!("({} {op} {})", self.expr(depth - 1), self.expr(depth - 1))
            }
        }
    }

    fn cond(&mut self) -> String {
        let op = *["<", ">", "<=", ">=", "==", "!="].choose(&mut self.rng).unwrap();
        format!("({} {op} {})", self.expr(1), self.expr(1))
    }

    fn assignable(&mut self) -> &'static str {
        ["x", "y", "z", "a"].choose(&mut self.rng).copied().unwrap()
    }

    fn stmts(&mut self, depth: u32, out: &mut String) {
        for _ in 0..self.rng.gen_range(1..4) {
            self.stmt(depth, out);
        }
    }

    fn stmt(&mut self, depth: u32, out: &mut String) {
        let pick = if depth == 0 { self.rng.gen_range(0..3) } else { self.rng.gen_range(0..10) };
        match pick {
            0 => {
                let v = self.assignable();
                out.push_str(&format!("{v} = {};\n", self.expr(2)));
            }
            1 => {
                let v = self.assignable();
                let op = *["+=", "-=", "*="].choose(&mut self.rng).unwrap();
                out.push_str(&format!("{v} {op} {};\n", self.expr(1)));
            }
            2 => {
                let v = self.assignable();
                out.push_str(&format!("{{ int t = {}; {v} = t + 1; }}\n", self.expr(1)));
            }
            3 | 4 => {
                let kw = if self.rng.gen_bool(0.8) { "if" } else { "ifnot" };
                out.push_str(&format!("{kw} {} {{\n", self.cond()));
                self.stmts(depth - 1, out);
                if self.rng.gen_bool(0.5) {
                    out.push_str("} else {\n");
                    self.stmts(depth - 1, out);
                }
                out.push_str("}\n");
            }
            5 => {
                out.push_str(&format!("repeat ({}) {{\n", self.rng.gen_range(0..4)));
                self.stmts(depth - 1, out);
                out.push_str("}\n");
            }
            6 => {
                let w = format!("w{}", self.loops);
                self.loops += 1;
                out.push_str(&format!("int {w} = 0;\nwhile ({w} < {}) {{\n{w} += 1;\n", self.rng.gen_range(0..4)));
                self.stmts(depth - 1, out);
                out.push_str("}\n");
            }
            7 => {
                let w = format!("w{}", self.loops);
                self.loops += 1;
                out.push_str(&format!("int {w} = 0;\ndo {{\n{w} += 1;\n"));
                self.stmts(depth - 1, out);
                out.push_str(&format!("}} until ({w} >= {});\n", self.rng.gen_range(1..4)));
            }
            8 => {
                out.push_str(&format!("if {} {{\nreturn {};\n}}\n", self.cond(), self.expr(1)));
            }
            _ => {
                out.push_str("{\n");
                self.stmts(depth - 1, out);
                out.push_str("}\n");
            }
        }
    }

    fn program(&mut self) -> String {
        self.loops = 0;
        let mut body = String::from("int x = a;\nint y = b;\nint z = 0;\n");
        self.stmts(3, &mut body);
        format!("int f(int a, int b) {{\n{body}return x + y * 3 + z;\n}}\n")
    }
}

#[derive(Debug, PartialEq, Eq)]
enum Outcome {
    Returned(Vec<i128>),
    OutOfFuel,
    Stuck(String),
}

fn operand(env: &[Option<i128>], o: &Operand) -> Result<i128, String> {
    match o {
        Operand::Int(n) => Ok(*n),
        Operand::Var(v) => env[v.index()].ok_or_else(|| "read of unset value".to_string()),
        Operand::Lit(s) => Err(format!("literal {s}")),
    }
}

fn truth(b: bool) -> i128 {
    if b {
        -1
    } else {
        0
    }
}

fn eval(env: &[Option<i128>], rv: &Rvalue) -> Result<i128, String> {
    Ok(match rv {
        Rvalue::Use(a) => operand(env, a)?,
        Rvalue::Unary(op, a) => {
            let a = operand(env, a)?;
            match op {
                UnaryOp::Neg => a.wrapping_neg(),
                UnaryOp::BitNot => !a,
                UnaryOp::Not => truth(a == 0),
            }
        }
        Rvalue::Binary(op, a, b) => {
            let (a, b) = (operand(env, a)?, operand(env, b)?);
            match op {
                BinaryOp::Add => a.wrapping_add(b),
                BinaryOp::Sub => a.wrapping_sub(b),
                BinaryOp::Mul => a.wrapping_mul(b),
                BinaryOp::BitAnd => a & b,
                BinaryOp::BitOr => a | b,
                BinaryOp::BitXor => a ^ b,
                BinaryOp::Eq => truth(a == b),
                BinaryOp::Ne => truth(a != b),
                BinaryOp::Lt => truth(a < b),
                BinaryOp::Gt => truth(a > b),
                BinaryOp::Le => truth(a <= b),
                BinaryOp::Ge => truth(a >= b),
                other => return Err(format!("operator {other:?}")),
            }
        }
        Rvalue::Select(c, a, b) => {
            if operand(env, c)? != 0 {
                operand(env, a)?
            } else {
                operand(env, b)?
            }
        }
        other => return Err(format!("rvalue {other:?}")),
    })
}

/// Run `cfg` on integer arguments. φ nodes read the values flowing in from
/// the block just left; fuel counts block visits, which SSA construction
/// does not change.
fn run(cfg: &Cfg, args: &[i128]) -> Outcome {
    let mut env: Vec<Option<i128>> = vec![None; cfg.vars.len()];
    for (p, a) in cfg.params.iter().zip(args) {
        env[p.index()] = Some(*a);
    }
    let mut cur = cfg.entry;
    let mut prev: Option<BlockId> = None;
    for _ in 0..2000 {
        let block = cfg.block(cur);
        let phis: Vec<_> = block
            .instrs
            .iter()
            .filter_map(|i| match &i.kind {
                InstrKind::Phi { dest, incoming } => {
                    let from = incoming.iter().find(|(b, _)| Some(*b) == prev).map(|(_, v)| env[v.index()]);
                    Some((*dest, from.flatten()))
                }
                _ => None,
            })
            .collect();
        for (d, v) in phis {
            env[d.index()] = v;
        }
        let mut next = None;
        for i in &block.instrs {
            match &i.kind {
                InstrKind::Phi { .. } | InstrKind::Nop => {}
                InstrKind::Assign { dest, rv } => match eval(&env, rv) {
                    Ok(v) => env[dest.index()] = Some(v),
                    Err(e) => return Outcome::Stuck(e),
                },
                InstrKind::Branch { cond, negate, then_bb, else_bb } => {
                    let c = match operand(&env, cond) {
                        Ok(c) => c,
                        Err(e) => return Outcome::Stuck(e),
                    };
                    next = Some(if (c != 0) != *negate { *then_bb } else { *else_bb });
                }
                InstrKind::Jump(b) => next = Some(*b),
                InstrKind::Return(ops) => {
                    return match ops.iter().map(|o| operand(&env, o)).collect() {
                        Ok(v) => Outcome::Returned(v),
                        Err(e) => Outcome::Stuck(e),
                    }
                }
                other => return Outcome::Stuck(format!("{other:?}")),
            }
        }
        match next {
            Some(b) => {
                prev = Some(cur);
                cur = b;
            }
            None => return Outcome::Stuck("fell off a block".into()),
        }
    }
    Outcome::OutOfFuel
}

pub struct RandomStats {
    pub runs: usize,
    pub returned: usize,
    pub phis: usize,
}

/// Generate `count` programs; each must parse, be valid SSA, and compute the
/// same results as its pre-SSA form on four random inputs.
pub fn random_programs(count: usize) -> Result<RandomStats, String> {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(7), loops: 0 };
    let mut stats = RandomStats { runs: 0, returned: 0, phis: 0 };
    for case in 0..count {
        let src = g.program();
        let unit = parse_source("gen.fc", src.clone());
        if !unit.errors.is_empty() {
            return Err(format!("case {case}: {:?}\n{src}", unit.errors));
        }
        let f = unit.function("f").unwrap();
        let plain = lower(f, &unit).map_err(|e| format!("case {case}: {e}"))?;
        let ssa = build_ssa(f, &unit).map_err(|e| format!("case {case}: {e}"))?;
        check_ssa(&ssa).map_err(|e| format!("case {case}: {e}\n{src}"))?;
        stats.phis += ssa.instructions().filter(|(_, i)| matches!(i.kind, InstrKind::Phi { .. })).count();
        for _ in 0..4 {
            let args = [g.rng.gen_range(-20..20), g.rng.gen_range(-20..20)];
            let want = run(&plain, &args);
            if let Outcome::Stuck(why) = &want {
                return Err(format!("case {case}: interpreter stuck: {why}\n{src}"));
            }
            let got = run(&ssa, &args);
            if got != want {
                return Err(format!("case {case} on {args:?}: {got:?} after SSA, {want:?} before\n{src}"));
            }
            stats.runs += 1;
            stats.returned += matches!(want, Outcome::Returned(_)) as usize;
        }
    }
    Ok(stats)
}
