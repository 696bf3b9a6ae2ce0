//! Taint propagation: passes only add taint, extra sources only add taint,
//! and a settled analysis stays put.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tonscanner_core::analysis::{Catalog, Taint, TaintAnalysis};
use tonscanner_core::ir::{build_ssa, DomTree, VarId};

fn snapshot(t: &TaintAnalysis, n: usize) -> Vec<Taint> {
    (0..n).map(|i| t.taint_of(VarId(i as u32))).collect()
}

fn subset(a: &[Taint], b: &[Taint]) -> bool {
    a.iter().zip(b).all(|(x, y)| y.contains(*x))
}

/// Returns (functions checked, functions carrying taint).
pub fn check() -> Result<(usize, usize), String> {
    let catalog = Catalog::builtin();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a1);
    let mut functions = 0;
    let mut tainted = 0;
    for path in super::all_fixture_files() {
        let a = super::analyze(&path);
        for f in a.unit.functions.iter().filter(|f| f.block().is_some()) {
            let cfg = build_ssa(f, &a.unit).unwrap();
            let dom = DomTree::of(&cfg);
            let n = cfg.vars.len();
            functions += 1;

            let mut t = TaintAnalysis::new(&cfg, &dom, &catalog);
            let mut prev = snapshot(&t, n);
            while t.iterate_once() {
                let cur = snapshot(&t, n);
                if !subset(&prev, &cur) {
                    return Err(format!("{}: {}: taint shrank", path.display(), f.name));
                }
                prev = cur;
            }
            let fixed = snapshot(&t, n);
            let sinks = t.sinks();
            if t.iterate_once() || t.run() != 1 || snapshot(&t, n) != fixed || t.sinks() != sinks {
                return Err(format!("{}: {}: fixpoint moved when rerun", path.display(), f.name));
            }
            tainted += fixed.iter().any(|x| !x.is_empty()) as usize;

            if n == 0 {
                continue;
            }
            let mut more = TaintAnalysis::new(&cfg, &dom, &catalog);
            for _ in 0..rng.gen_range(1..=3) {
                let v = VarId(rng.gen_range(0..n as u32));
                let extra = if rng.gen_bool(0.5) { Taint::LOGICAL_TIME } else { Taint::RANDOMNESS };
                more.add_source(v, extra);
            }
            more.run();
            let bigger = snapshot(&more, n);
            if !subset(&fixed, &bigger) || more.sinks().len() < sinks.len() {
                return Err(format!("{}: {}: extra sources removed taint", path.display(), f.name));
            }
        }
    }
    Ok((functions, tainted))
}
