//! Abstract cell layouts against a concrete bit-level builder/slice
//! interpreter on random straight-line programs.
//!
//! The concrete side really encodes the values into bits and keeps a trace
//! of which bit ranges each store wrote. A read is faithful when it starts
//! and ends on trace boundaries and either consumes one entry of the same
//! kind and width or is a raw bit read over fixed-width integers. The first
//! unfaithful read, or a read past the end of the data, must be exactly
//! where `layout_match` reports a problem.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tonscanner_core::analysis::Catalog;
use tonscanner_core::cells::{layout_match, CellSource, Field, FieldKind, Layout, MatchResult, Width};
use tonscanner_core::frontend::parse_source;
use tonscanner_core::pipeline::UnitAnalysis;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Uint(u32, i128),
    Int(u32, i128),
    Coins(i128),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Read {
    Uint(u32),
    Int(u32),
    Bits(u32),
    Skip(u32),
    Coins,
}

struct Segment {
    start: usize,
    len: usize,
    kind: FieldKind,
    value: i128,
}

#[derive(Default)]
struct Builder {
    bits: Vec<bool>,
    trace: Vec<Segment>,
}

impl Builder {
    fn put(&mut self, value: i128, width: u32) {
        for i in (0..width).rev() {
            self.bits.push((value >> i) & 1 == 1);
        }
    }

    fn store(&mut self, op: Op) {
        let start = self.bits.len();
        let (kind, value) = match op {
            Op::Uint(w, v) => {
                self.put(v, w);
                (FieldKind::Uint, v)
            }
            Op::Int(w, v) => {
                // Two's complement in w bits.
                self.put(v & ((1i128 << w) - 1), w);
                (FieldKind::Int, v)
            }
            Op::Coins(v) => {
                let bytes = (128 - v.leading_zeros()).div_ceil(8);
                self.put(bytes as i128, 4);
                self.put(v, bytes * 8);
                (FieldKind::Coins, v)
            }
        };
        self.trace.push(Segment { start, len: self.bits.len() - start, kind, value });
    }
}

#[derive(Debug, PartialEq)]
enum Verdict {
    Faithful,
    Diverged(usize),
    Exhausted(usize),
    /// The interpreter itself is wrong.
    Broken(String),
}

fn take(bits: &[bool], pos: usize, n: usize) -> i128 {
    bits[pos..pos + n].iter().fold(0, |acc, &b| (acc << 1) | b as i128)
}

/// Replay `reads` over the built cell.
fn replay(b: &Builder, reads: &[Read]) -> Verdict {
    let mut pos = 0;
    for (i, r) in reads.iter().enumerate() {
        if pos == b.bits.len() {
            return Verdict::Exhausted(i);
        }
        let width = match *r {
            Read::Uint(w) | Read::Int(w) | Read::Bits(w) | Read::Skip(w) => w as usize,
            Read::Coins => {
                if pos + 4 > b.bits.len() {
                    return Verdict::Diverged(i);
                }
                4 + 8 * take(&b.bits, pos, 4) as usize
            }
        };
        if pos + width > b.bits.len() {
            return Verdict::Diverged(i);
        }
        let Some(first) = b.trace.iter().position(|s| s.start == pos) else { return Verdict::Diverged(i) };
        let Some(last) = b.trace.iter().position(|s| s.start + s.len == pos + width) else { return Verdict::Diverged(i) };
        let covered = &b.trace[first..=last];
        let seg = &b.trace[first];
        let ok = match *r {
            Read::Uint(_) => covered.len() == 1 && seg.kind == FieldKind::Uint,
            Read::Int(_) => covered.len() == 1 && seg.kind == FieldKind::Int,
            Read::Coins => covered.len() == 1 && seg.kind == FieldKind::Coins,
            Read::Bits(_) | Read::Skip(_) => covered.iter().all(|s| matches!(s.kind, FieldKind::Uint | FieldKind::Int)),
        };
        if !ok {
            return Verdict::Diverged(i);
        }
        // A faithful integer read gets back what was stored.
        let raw = take(&b.bits, pos + width - seg.len.min(width), seg.len.min(width));
        let decoded = match *r {
            Read::Uint(_) => Some(raw),
            Read::Int(w) if raw >> (w - 1) == 1 => Some(raw - (1i128 << w)),
            Read::Int(_) => Some(raw),
            Read::Coins => Some(take(&b.bits, pos + 4, width - 4)),
            _ => None,
        };
        if let Some(v) = decoded {
            if v != seg.value {
                return Verdict::Broken(format!("read back {v}, stored {}", seg.value));
            }
        }
        pos += width;
    }
    Verdict::Faithful
}

fn gen_ops(rng: &mut ChaCha8Rng) -> Vec<Op> {
    (0..rng.gen_range(1..=6))
        .map(|_| match rng.gen_range(0..5) {
            0 | 1 => {
                let w = [1, 2, 4, 8, 16, 32, 64][rng.gen_range(0..7)];
                Op::Uint(w, rng.gen_range(0..(1i128 << w)))
            }
            2 | 3 => {
                let w = [2, 8, 16, 32, 64][rng.gen_range(0..5)];
                let h = 1i128 << (w - 1);
                Op::Int(w, rng.gen_range(-h..h))
            }
            _ => Op::Coins(rng.gen_range(0..1_000_000_000_000)),
        })
        .collect()
}

/// Reads that mostly follow the stored layout, with occasional deviations
/// and the odd read past the end.
fn gen_reads(rng: &mut ChaCha8Rng, ops: &[Op]) -> Vec<Read> {
    let mut out = Vec::new();
    let mut i = 0;
    while out.len() < 8 && rng.gen_bool(0.85) {
        let next = ops.get(i).copied();
        if rng.gen_bool(0.75) {
            match next {
                Some(Op::Uint(w, _)) => out.push(if rng.gen_bool(0.8) { Read::Uint(w) } else { Read::Bits(w) }),
                Some(Op::Int(w, _)) => out.push(if rng.gen_bool(0.8) { Read::Int(w) } else { Read::Skip(w) }),
                Some(Op::Coins(_)) => out.push(Read::Coins),
                None => out.push(Read::Uint(8)),
            }
            i += 1;
            // Sometimes swallow the following fixed-width field too.
            if let (Some(Read::Bits(w)), Some(Op::Uint(w2, _) | Op::Int(w2, _))) = (out.last().copied(), ops.get(i)) {
                if rng.gen_bool(0.5) {
                    *out.last_mut().unwrap() = Read::Bits(w + w2);
                    i += 1;
                }
            }
        } else {
            let w = [1, 2, 8, 16, 32, 64][rng.gen_range(0..6)];
            out.push(match rng.gen_range(0..5) {
                0 => Read::Uint(w),
                1 => Read::Int(w.max(2)),
                2 => Read::Bits(w),
                3 => Read::Skip(w),
                _ => Read::Coins,
            });
            i += 1;
        }
    }
    out
}

fn program(ops: &[Op], reads: &[Read]) -> String {
    let mut s = String::from("() f() impure {\n  cell c = begin_cell()");
    for op in ops {
        match op {
            Op::Uint(w, v) => s.push_str(&format!(".store_uint({v}, {w})")),
            Op::Int(w, v) => s.push_str(&format!(".store_int({v}, {w})")),
            Op::Coins(v) => s.push_str(&format!(".store_coins({v})")),
        }
    }
    s.push_str(".end_cell();\n  set_data(c);\n  slice s = c.begin_parse();\n");
    for (i, r) in reads.iter().enumerate() {
        s.push_str(&match r {
            Read::Uint(w) => format!("  int v{i} = s~load_uint({w});\n"),
            Read::Int(w) => format!("  int v{i} = s~load_int({w});\n"),
            Read::Bits(w) => format!("  slice v{i} = s~load_bits({w});\n"),
            Read::Skip(w) => format!("  s~skip_bits({w});\n"),
            Read::Coins => format!("  int v{i} = s~load_coins();\n"),
        });
    }
    s.push_str("}\n");
    s
}

fn expected_field(op: &Op) -> (FieldKind, Width, i128) {
    match *op {
        Op::Uint(w, v) => (FieldKind::Uint, Width::Exact(w), v),
        Op::Int(w, v) => (FieldKind::Int, Width::Exact(w), v),
        Op::Coins(v) => (FieldKind::Coins, Width::Variable, v),
    }
}

fn read_field(r: &Read) -> (FieldKind, Width) {
    match *r {
        Read::Uint(w) => (FieldKind::Uint, Width::Exact(w)),
        Read::Int(w) => (FieldKind::Int, Width::Exact(w)),
        Read::Bits(w) | Read::Skip(w) => (FieldKind::Bits, Width::Exact(w)),
        Read::Coins => (FieldKind::Coins, Width::Variable),
    }
}

#[derive(Debug, Default)]
pub struct Stats {
    pub faithful: usize,
    pub diverged: usize,
    pub exhausted: usize,
}

/// Run `count` random programs through both sides.
pub fn check(count: usize) -> Result<Stats, String> {
    let catalog = Catalog::builtin();
    let mut rng = ChaCha8Rng::seed_from_u64(0xce11);
    let mut stats = Stats::default();
    for case in 0..count {
        let ops = gen_ops(&mut rng);
        let reads = gen_reads(&mut rng, &ops);
        let src = program(&ops, &reads);
        let fail = |what: String| Err(format!("case {case}: {what}\n{src}"));
        let unit = parse_source("gen.fc", src.clone());
        if !unit.errors.is_empty() {
            return fail(format!("{:?}", unit.errors));
        }
        let ua = UnitAnalysis::new(&unit, &catalog);
        let facts = &ua.functions["f"].cells;

        // The stored layout is the concrete trace.
        let Some(Layout::Equal(stored)) = facts.stores[0].layout.clone() else { return fail("no stored layout".into()) };
        let shape: Vec<(FieldKind, Width, Option<i128>)> = stored.iter().map(|f| (f.kind, f.width, f.value)).collect();
        let want: Vec<_> = ops.iter().map(expected_field).map(|(k, w, v)| (k, w, Some(v))).collect();
        if shape != want {
            return fail(format!("stored {shape:?}, concrete {want:?}"));
        }
        let mut b = Builder::default();
        for op in &ops {
            b.store(*op);
        }

        // So is the sequence of reads.
        if facts.roots.len() != 1 || facts.roots[0].source != CellSource::Built(Layout::Equal(stored.clone())) {
            return fail(format!("roots {:?}", facts.roots));
        }
        let loaded: Vec<Field> = match facts.loads.last().map(|ev| ev.loaded()) {
            Some(alts) if alts.len() == 1 => alts[0].clone(),
            Some(alts) => return fail(format!("{} load alternatives", alts.len())),
            None => Vec::new(),
        };
        let read_shape: Vec<_> = loaded.iter().map(|f| (f.kind, f.width)).collect();
        let want: Vec<_> = reads.iter().map(read_field).collect();
        if read_shape != want {
            return fail(format!("loaded {read_shape:?}, concrete {want:?}"));
        }

        let verdict = replay(&b, &reads);
        let m = layout_match(&stored, &loaded);
        match (&verdict, &m) {
            (Verdict::Faithful, MatchResult::Compatible) => stats.faithful += 1,
            (Verdict::Diverged(i), MatchResult::MismatchAt { index, .. }) if i == index => stats.diverged += 1,
            (Verdict::Exhausted(i), MatchResult::LoadOverrun { index, .. }) if i == index => stats.exhausted += 1,
            _ => return fail(format!("concrete {verdict:?} but abstract {m:?}")),
        }
    }
    Ok(stats)
}
