//! Dominators (Cooper, Harvey & Kennedy's iterative scheme) and dominance
//! frontiers over plain successor lists, so the same code serves CFGs and
//! randomly generated graphs in tests.

use std::collections::BTreeSet;

use super::instr::{BlockId, Cfg};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomTree {
    /// `idom[entry] == Some(entry)`; `None` for nodes unreachable from entry.
    pub idom: Vec<Option<usize>>,
    /// Reachable nodes in reverse postorder.
    pub rpo: Vec<usize>,
    pub children: Vec<Vec<usize>>,
    pub entry: usize,
    // Position in rpo, usize::MAX for unreachable nodes.
    order: Vec<usize>,
}

fn reverse_postorder(entry: usize, succs: &[Vec<usize>]) -> Vec<usize> {
    let n = succs.len();
    let mut seen = vec![false; n];
    let mut post = Vec::with_capacity(n);
    // Explicit stack of (node, next successor index).
    let mut stack = vec![(entry, 0usize)];
    seen[entry] = true;
    while let Some((node, i)) = stack.last_mut() {
        if let Some(&s) = succs[*node].get(*i) {
            *i += 1;
            if !seen[s] {
                seen[s] = true;
                stack.push((s, 0));
            }
        } else {
            post.push(*node);
            stack.pop();
        }
    }
    post.reverse();
    post
}

impl DomTree {
    pub fn compute(entry: usize, succs: &[Vec<usize>]) -> Self {
        let n = succs.len();
        let rpo = reverse_postorder(entry, succs);
        let mut order = vec![usize::MAX; n];
        for (i, &b) in rpo.iter().enumerate() {
            order[b] = i;
        }
        let mut preds = vec![Vec::new(); n];
        for (b, ss) in succs.iter().enumerate() {
            if order[b] == usize::MAX {
                continue;
            }
            for &s in ss {
                preds[s].push(b);
            }
        }

        let mut idom: Vec<Option<usize>> = vec![None; n];
        idom[entry] = Some(entry);
        let intersect = |idom: &[Option<usize>], mut a: usize, mut b: usize| {
            while a != b {
                while order[a] > order[b] {
                    a = idom[a].expect("processed");
                }
                while order[b] > order[a] {
                    b = idom[b].expect("processed");
                }
            }
            a
        };
        let mut changed = true;
        while changed {
            changed = false;
            for &b in rpo.iter().skip(1) {
                let mut new = None;
                for &p in &preds[b] {
                    if idom[p].is_none() {
                        continue;
                    }
                    new = Some(match new {
                        None => p,
                        Some(cur) => intersect(&idom, p, cur),
                    });
                }
                if new.is_some() && idom[b] != new {
                    idom[b] = new;
                    changed = true;
                }
            }
        }

        let mut children = vec![Vec::new(); n];
        for &b in &rpo {
            if b != entry {
                if let Some(d) = idom[b] {
                    children[d].push(b);
                }
            }
        }
        DomTree { idom, rpo, children, entry, order }
    }

    pub fn of(cfg: &Cfg) -> Self {
        Self::compute(cfg.entry.index(), &cfg.successor_lists())
    }

    pub fn is_reachable(&self, b: usize) -> bool {
        self.order[b] != usize::MAX
    }

    /// Reflexive dominance.
    pub fn dominates(&self, a: usize, b: usize) -> bool {
        if !self.is_reachable(a) || !self.is_reachable(b) {
            return false;
        }
        let mut cur = b;
        loop {
            if cur == a {
                return true;
            }
            match self.idom[cur] {
                Some(d) if d != cur => cur = d,
                _ => return false,
            }
        }
    }

    pub fn dominates_block(&self, a: BlockId, b: BlockId) -> bool {
        self.dominates(a.index(), b.index())
    }

    /// Every node dominated by `root`, including itself, in dominator-tree
    /// preorder.
    pub fn dominated_by(&self, root: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![root];
        while let Some(b) = stack.pop() {
            out.push(b);
            stack.extend(self.children[b].iter().rev());
        }
        out
    }

    /// Dominance frontiers, computed by walking up from each join point's
    /// predecessors to its immediate dominator.
    pub fn frontiers(&self, succs: &[Vec<usize>]) -> Vec<BTreeSet<usize>> {
        let n = succs.len();
        let mut preds = vec![Vec::new(); n];
        for (b, ss) in succs.iter().enumerate() {
            if self.is_reachable(b) {
                for &s in ss {
                    preds[s].push(b);
                }
            }
        }
        let mut df = vec![BTreeSet::new(); n];
        for b in 0..n {
            if !self.is_reachable(b) {
                continue;
            }
            // The entry has no immediate dominator; a back edge into it puts
            // every node on the way up, entry included, in the frontier.
            let stop = if b == self.entry { None } else { self.idom[b] };
            for &p in &preds[b] {
                let mut runner = p;
                while Some(runner) != stop {
                    df[runner].insert(b);
                    if runner == self.entry {
                        break;
                    }
                    runner = self.idom[runner].expect("reachable");
                }
            }
        }
        df
    }
}

/// Convenience wrapper: dominance frontiers of every block of `cfg`.
pub fn dominance_frontiers(cfg: &Cfg, dom: &DomTree) -> Vec<BTreeSet<usize>> {
    dom.frontiers(&cfg.successor_lists())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diamond() {
        // A=0 -> {B=1, C=2} -> D=3
        let succs = vec![vec![1, 2], vec![3], vec![3], vec![]];
        let d = DomTree::compute(0, &succs);
        assert_eq!(d.idom, vec![Some(0), Some(0), Some(0), Some(0)]);
        let df = d.frontiers(&succs);
        assert_eq!(df[1], BTreeSet::from([3]));
        assert_eq!(df[2], BTreeSet::from([3]));
        assert!(df[0].is_empty() && df[3].is_empty());
    }

    #[test]
    fn loop_header_in_frontier_of_body() {
        // 0 -> 1(header) -> 2(body) -> 1 ; 1 -> 3(exit)
        let succs = vec![vec![1], vec![2, 3], vec![1], vec![]];
        let d = DomTree::compute(0, &succs);
        assert!(d.dominates(1, 2) && d.dominates(1, 3));
        let df = d.frontiers(&succs);
        assert_eq!(df[2], BTreeSet::from([1]));
        assert_eq!(df[1], BTreeSet::from([1]));
    }

    #[test]
    fn straight_line_has_empty_frontiers() {
        let succs = vec![vec![1], vec![2], vec![]];
        let d = DomTree::compute(0, &succs);
        assert!(d.frontiers(&succs).iter().all(BTreeSet::is_empty));
        assert_eq!(d.idom, vec![Some(0), Some(0), Some(1)]);
    }

    #[test]
    fn unreachable_nodes_have_no_idom() {
        let succs = vec![vec![], vec![0]];
        let d = DomTree::compute(0, &succs);
        assert_eq!(d.idom[1], None);
        assert!(!d.dominates(0, 1));
    }
}
