//! Def-use data dependencies between SSA variables.

use std::collections::BTreeSet;

use crate::ir::{Cfg, InstrKind, Loc, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Dep {
    pub var: VarId,
    /// The dependency goes through a φ node.
    pub phi: bool,
}

#[derive(Debug, Clone)]
pub struct DataDep {
    direct: Vec<Vec<Dep>>,
    users: Vec<Vec<VarId>>,
    def_loc: Vec<Option<Loc>>,
}

impl DataDep {
    /// A variable defined by an instruction depends on every variable that
    /// instruction reads; all results of a call depend on all its arguments.
    pub fn build(cfg: &Cfg) -> Self {
        let n = cfg.vars.len();
        let mut direct = vec![Vec::new(); n];
        let mut users = vec![Vec::new(); n];
        for (_, i) in cfg.instructions() {
            let phi = matches!(i.kind, InstrKind::Phi { .. });
            let uses = i.uses();
            for d in i.defs() {
                for &u in &uses {
                    direct[d.index()].push(Dep { var: u, phi });
                    users[u.index()].push(d);
                }
            }
        }
        for list in direct.iter_mut() {
            list.sort();
            list.dedup();
        }
        for list in users.iter_mut() {
            list.sort();
            list.dedup();
        }
        DataDep { direct, users, def_loc: cfg.def_sites() }
    }

    pub fn direct(&self, v: VarId) -> &[Dep] {
        &self.direct[v.index()]
    }

    /// Variables whose definitions read `v`.
    pub fn users(&self, v: VarId) -> &[VarId] {
        &self.users[v.index()]
    }

    pub fn def_loc(&self, v: VarId) -> Option<Loc> {
        self.def_loc[v.index()]
    }

    /// Every variable `v` transitively depends on, excluding `v` itself
    /// unless it lies on a cycle.
    pub fn closure(&self, v: VarId) -> BTreeSet<VarId> {
        let mut seen = BTreeSet::new();
        let mut work: Vec<VarId> = self.direct(v).iter().map(|d| d.var).collect();
        while let Some(x) = work.pop() {
            if seen.insert(x) {
                work.extend(self.direct(x).iter().map(|d| d.var));
            }
        }
        seen
    }

    pub fn depends_on(&self, v: VarId, on: VarId) -> bool {
        self.closure(v).contains(&on)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_source;
    use crate::ir::build_ssa;

    fn var(cfg: &Cfg, name: &str, version: u32) -> VarId {
        VarId(cfg.vars.iter().position(|v| v.name == name && v.version == version).unwrap() as u32)
    }

    #[test]
    fn chains_and_phis() {
        let src = "int f(int a, int n) { int x = a * 2; while (n > 0) { x = x + 1; n -= 1; } int y = x; return y; }";
        let unit = parse_source("t.fc", src);
        let cfg = build_ssa(unit.function("f").unwrap(), &unit).unwrap();
        let dd = DataDep::build(&cfg);
        let y = var(&cfg, "y", 1);
        let a = var(&cfg, "a", 0);
        let n = var(&cfg, "n", 0);
        assert!(dd.depends_on(y, a));
        assert!(!dd.depends_on(y, n));
        let x2 = var(&cfg, "x", 2);
        assert!(dd.direct(x2).iter().all(|d| d.phi));
        // The loop makes x_2 depend on itself.
        assert!(dd.depends_on(x2, x2));
    }
}
