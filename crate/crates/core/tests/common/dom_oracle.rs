//! Dominator tree and frontiers against brute-force reachability on random
//! digraphs.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tonscanner_core::ir::DomTree;

fn reachable(succs: &[Vec<usize>], entry: usize, removed: Option<usize>) -> Vec<bool> {
    let mut seen = vec![false; succs.len()];
    if removed == Some(entry) {
        return seen;
    }
    let mut stack = vec![entry];
    seen[entry] = true;
    while let Some(n) = stack.pop() {
        for &s in &succs[n] {
            if !seen[s] && Some(s) != removed {
                seen[s] = true;
                stack.push(s);
            }
        }
    }
    seen
}

/// `dom[d][n]`: every path from the entry to `n` passes through `d`.
fn brute_dominators(succs: &[Vec<usize>], entry: usize) -> Vec<Vec<bool>> {
    let n = succs.len();
    let live = reachable(succs, entry, None);
    let mut dom = vec![vec![false; n]; n];
    for d in 0..n {
        if !live[d] {
            continue;
        }
        let without = reachable(succs, entry, Some(d));
        for v in 0..n {
            dom[d][v] = live[v] && (v == d || !without[v]);
        }
    }
    dom
}

fn random_graph(rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let n = rng.gen_range(1..=12);
    let density = rng.gen_range(0.05..0.45);
    (0..n)
        .map(|_| {
            let mut s: Vec<usize> = (0..n).filter(|_| rng.gen_bool(density)).collect();
            s.dedup();
            s
        })
        .collect()
}

/// Compare `graphs` random digraphs; returns the number of nodes checked.
pub fn check(graphs: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x00d0_u64);
    let mut nodes = 0;
    let mut mismatches = Vec::new();
    for case in 0..graphs {
        let succs = random_graph(&mut rng);
        let n = succs.len();
        let tree = DomTree::compute(0, &succs);
        let dom = brute_dominators(&succs, 0);
        let live = reachable(&succs, 0, None);
        nodes += n;

        for v in 0..n {
            if tree.is_reachable(v) != live[v] {
                mismatches.push(format!("case {case} reachable({v}) in {succs:?}"));
            }
            // The immediate dominator is the strict dominator every other
            // strict dominator dominates.
            let want = if !live[v] {
                None
            } else if v == 0 {
                Some(0)
            } else {
                (0..n).filter(|&d| d != v && dom[d][v]).find(|&d| (0..n).all(|e| e == v || e == d || !dom[e][v] || dom[e][d]))
            };
            if tree.idom[v] != want {
                mismatches.push(format!("case {case} idom({v}): {:?} vs {want:?} in {succs:?}", tree.idom[v]));
            }
            for d in 0..n {
                if tree.dominates(d, v) != dom[d][v] {
                    mismatches.push(format!("case {case} dominates({d},{v}) in {succs:?}"));
                }
            }
        }

        let df = tree.frontiers(&succs);
        for d in 0..n {
            let want: BTreeSet<usize> = if !live[d] {
                BTreeSet::new()
            } else {
                (0..n)
                    .filter(|&y| live[y])
                    .filter(|&y| (0..n).any(|p| live[p] && succs[p].contains(&y) && dom[d][p]) && !(d != y && dom[d][y]))
                    .collect()
            };
            if df[d] != want {
                mismatches.push(format!("case {case} DF({d}): {:?} vs {want:?} in {succs:?}", df[d]));
            }
        }
    }
    match mismatches.first() {
        None => Ok(nodes),
        Some(first) => Err(format!("{} mismatches, first: {first}", mismatches.len())),
    }
}
