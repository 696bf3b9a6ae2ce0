//! Abstract interpretation of builder, cell and slice operations over SSA.
//!
//! Values are computed per SSA name in reverse post-order. Two passes
//! settle every acyclic CFG; names still changing after the second pass
//! (loop-carried builders and slices) are widened to ⊤ and the change is
//! pushed along def-use edges.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::layout::{Field, FieldKind, Layout, Width};
use crate::analysis::catalog::{Catalog, CellOp, WidthSpec};
use crate::analysis::consts::ConstEval;
use crate::frontend::Span;
use crate::ir::{CallStyle, Cfg, DomTree, InstrKind, Loc, Operand, Rvalue, VarId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellSource {
    /// The contract's persistent data (`get_data()`).
    Storage,
    /// The cell referenced by field `i` of the persistent data.
    StorageRef(usize),
    Built(Layout),
    Unknown,
}

pub type RootId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AbsVal {
    /// Not computed yet.
    Bottom,
    /// A value with no cell structure (integers and the like).
    NotCell,
    /// An address slice, e.g. from `load_msg_addr` or `my_address`.
    Addr,
    Builder(Layout),
    /// Builder parameter `i` of the function being summarised, followed by
    /// the given fields.
    ParamBuilder(usize, Layout),
    Cell(CellSource),
    /// A slice parsed from root `root` after reading `consumed`.
    Slice { root: RootId, consumed: Layout },
    Top,
}

impl AbsVal {
    pub fn join(&self, o: &AbsVal) -> AbsVal {
        use AbsVal::*;
        match (self, o) {
            (Bottom, x) | (x, Bottom) => x.clone(),
            (a, b) if a == b => a.clone(),
            (Builder(a), Builder(b)) => Builder(a.join(b)),
            (ParamBuilder(i, a), ParamBuilder(j, b)) if i == j => ParamBuilder(*i, a.join(b)),
            (Cell(CellSource::Built(a)), Cell(CellSource::Built(b))) => Cell(CellSource::Built(a.join(b))),
            (Cell(_), Cell(_)) => Cell(CellSource::Unknown),
            (Slice { root: r1, consumed: a }, Slice { root: r2, consumed: b }) if r1 == r2 => {
                Slice { root: *r1, consumed: a.join(b) }
            }
            (NotCell, Addr) | (Addr, NotCell) => NotCell,
            _ => Top,
        }
    }

    /// ⊤ for widening, keeping track of which root a slice comes from.
    pub fn widened(&self) -> AbsVal {
        match self {
            AbsVal::Slice { root, .. } => AbsVal::Slice { root: *root, consumed: Layout::Top },
            _ => AbsVal::Top,
        }
    }

    pub fn root(&self) -> Option<RootId> {
        match self {
            AbsVal::Slice { root, .. } => Some(*root),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Root {
    /// The `begin_parse` call.
    pub loc: Loc,
    pub span: Span,
    pub source: CellSource,
    /// Lost track of the layout (loop widening or merged roots).
    pub top: bool,
    /// Passed to a user function, returned, stored, or packed.
    pub escaped: bool,
    pub loads: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadEvent {
    pub root: RootId,
    pub loc: Loc,
    pub span: Span,
    /// Fields consumed before this load.
    pub prefix: Layout,
    pub field: Field,
}

impl LoadEvent {
    /// Loaded field lists up to and including this load.
    pub fn loaded(&self) -> Vec<Vec<Field>> {
        self.prefix.pushed(self.field.clone()).alternatives().unwrap_or_default().into_iter().map(<[Field]>::to_vec).collect()
    }
}

/// A `set_data` or `send_raw_message` call and the layout of its cell, when
/// known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSite {
    pub loc: Loc,
    pub span: Span,
    pub layout: Option<Layout>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EndParseStatus {
    Validated,
    Escaped,
    /// Some path reaches an exit without `end_parse`.
    NotValidated { last_load: Span },
    /// Nothing was read from the slice.
    Unread,
    /// The layout was widened to ⊤; no verdict.
    Untracked,
}

/// Returned values of a function analysed with unknown arguments.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Summary {
    pub returns: Vec<AbsVal>,
}

#[derive(Debug, Clone, Default)]
pub struct CellFacts {
    pub values: Vec<AbsVal>,
    pub roots: Vec<Root>,
    pub loads: Vec<LoadEvent>,
    pub stores: Vec<CellSite>,
    pub sends: Vec<CellSite>,
    pub end_parse: Vec<EndParseStatus>,
    pub summary: Summary,
    /// Block visits spent in the fixpoint passes.
    pub block_visits: usize,
    /// Names widened to ⊤.
    pub widened: BTreeSet<VarId>,
}

pub struct Context<'a> {
    pub catalog: &'a Catalog,
    /// User functions with a body.
    pub user_functions: &'a BTreeSet<String>,
    /// Summaries applied at calls to user functions. `None` computes a
    /// summary: builder parameters are symbolic and calls are opaque.
    pub summaries: Option<&'a BTreeMap<String, Summary>>,
}

struct Interp<'a> {
    cfg: &'a Cfg,
    ctx: &'a Context<'a>,
    consts: ConstEval<'a>,
    vals: Vec<AbsVal>,
    roots: Vec<Root>,
    root_at: HashMap<Loc, RootId>,
}

fn user_name<'s>(callee: &'s str, users: &BTreeSet<String>) -> Option<&'s str> {
    if users.contains(callee) {
        return Some(callee);
    }
    let plain = callee.strip_prefix('~')?;
    users.contains(plain).then_some(plain)
}

impl<'a> Interp<'a> {
    fn val(&self, o: &Operand) -> AbsVal {
        match o {
            Operand::Var(v) => self.vals[v.index()].clone(),
            _ => AbsVal::NotCell,
        }
    }

    fn width(&self, spec: WidthSpec, args: &[Operand]) -> Width {
        match spec {
            WidthSpec::Fixed(n) => Width::Exact(n),
            WidthSpec::Variable => Width::Variable,
            WidthSpec::Arg(i) => args
                .get(i)
                .and_then(|a| self.consts.operand(a))
                .and_then(|n| u32::try_from(n).ok())
                .map_or(Width::Unknown, Width::Exact),
        }
    }

    fn append(&self, b: AbsVal, fields: &Layout) -> AbsVal {
        match b {
            AbsVal::Builder(l) => AbsVal::Builder(l.concat(fields)),
            AbsVal::ParamBuilder(i, l) => AbsVal::ParamBuilder(i, l.concat(fields)),
            _ => AbsVal::Top,
        }
    }

    fn root_for(&mut self, loc: Loc, span: Span, source: CellSource) -> RootId {
        if let Some(&r) = self.root_at.get(&loc) {
            self.roots[r].source = source;
            return r;
        }
        self.roots.push(Root { loc, span, source, top: false, escaped: false, loads: 0 });
        self.root_at.insert(loc, self.roots.len() - 1);
        self.roots.len() - 1
    }

    /// Spread a pair of results over the call's destinations. `s~load_x()`
    /// with its value discarded only updates the receiver.
    fn pair(style: CallStyle, dests: usize, first: AbsVal, second: AbsVal) -> Vec<AbsVal> {
        match dests {
            2 => vec![first, second],
            1 if style == CallStyle::Modifying => vec![first],
            n => vec![AbsVal::Top; n],
        }
    }

    fn single(style: CallStyle, dests: usize, v: AbsVal) -> Vec<AbsVal> {
        let mut out = vec![AbsVal::NotCell; dests];
        if let Some(first) = out.first_mut() {
            *first = v;
        }
        if style != CallStyle::Modifying && dests > 1 {
            return vec![AbsVal::Top; dests];
        }
        out
    }

    fn eval_call(&mut self, loc: Loc, span: Span, callee: &str, args: &[Operand], ndests: usize, style: CallStyle) -> Vec<AbsVal> {
        if let Some(name) = user_name(callee, self.ctx.user_functions) {
            return self.apply_summary(name, args, ndests);
        }
        let Some(spec) = self.ctx.catalog.get(callee) else {
            return vec![AbsVal::Top; ndests];
        };
        let arg = |i: usize| args.get(i).map(|a| self.val(a)).unwrap_or(AbsVal::Top);
        let Some(op) = spec.cell_op else {
            let mut out = vec![AbsVal::Top; ndests];
            if style == CallStyle::Modifying && ndests > 0 {
                out[0] = arg(0);
            }
            return out;
        };
        match op {
            CellOp::BeginCell => Self::single(style, ndests, AbsVal::Builder(Layout::empty())),
            CellOp::Store { kind, width } => {
                let mut f = Field::new(kind, self.width(width, args), span);
                f.value = args.get(1).and_then(|a| self.consts.operand(a));
                if kind == FieldKind::Ref {
                    if let AbsVal::Cell(CellSource::Built(l)) = arg(1) {
                        f.nested = Some(Box::new(l));
                    }
                }
                let b = self.append(arg(0), &Layout::Equal(vec![f]));
                Self::single(style, ndests, b)
            }
            CellOp::StoreSlice => {
                let kind = if arg(1) == AbsVal::Addr { FieldKind::MsgAddr } else { FieldKind::Slice };
                let b = self.append(arg(0), &Layout::Equal(vec![Field::new(kind, Width::Variable, span)]));
                Self::single(style, ndests, b)
            }
            CellOp::StoreBuilder => {
                let fields = match arg(1) {
                    AbsVal::Builder(l) if !l.is_top() => l,
                    _ => Layout::Equal(vec![Field::new(FieldKind::Slice, Width::Variable, span)]),
                };
                let b = self.append(arg(0), &fields);
                Self::single(style, ndests, b)
            }
            CellOp::EndCell => {
                let c = match arg(0) {
                    AbsVal::Builder(l) if !l.is_top() => CellSource::Built(l),
                    _ => CellSource::Unknown,
                };
                Self::single(style, ndests, AbsVal::Cell(c))
            }
            CellOp::BeginParse => {
                let source = match arg(0) {
                    AbsVal::Cell(c) => c,
                    _ => CellSource::Unknown,
                };
                let root = self.root_for(loc, span, source);
                Self::single(style, ndests, AbsVal::Slice { root, consumed: Layout::empty() })
            }
            CellOp::Load { kind, width } | CellOp::Skip { kind, width } => {
                let f = Field::new(kind, self.width(width, args), span);
                let s = match arg(0) {
                    AbsVal::Slice { root, consumed } => AbsVal::Slice { root, consumed: consumed.pushed(f) },
                    _ => AbsVal::Top,
                };
                if matches!(op, CellOp::Skip { .. }) {
                    return Self::single(CallStyle::Modifying, ndests, s);
                }
                let v = match kind {
                    FieldKind::MsgAddr => AbsVal::Addr,
                    FieldKind::Ref => AbsVal::Cell(self.ref_source(&arg(0))),
                    _ => AbsVal::NotCell,
                };
                Self::pair(style, ndests, s, v)
            }
            CellOp::Preload { kind, .. } => {
                let v = if kind == FieldKind::Ref { AbsVal::Cell(CellSource::Unknown) } else { AbsVal::NotCell };
                Self::single(style, ndests, v)
            }
            CellOp::GetData => Self::single(style, ndests, AbsVal::Cell(CellSource::Storage)),
            CellOp::MakeAddr => Self::single(style, ndests, AbsVal::Addr),
            CellOp::EndParse | CellOp::SetData | CellOp::Send | CellOp::Inspect => {
                let mut out = vec![AbsVal::NotCell; ndests];
                if style == CallStyle::Modifying && ndests > 0 {
                    out[0] = arg(0);
                }
                out
            }
        }
    }

    /// Source of a cell loaded by `load_ref` from `slice`. References are
    /// followed one level below the persistent data.
    fn ref_source(&self, slice: &AbsVal) -> CellSource {
        match slice {
            AbsVal::Slice { root, consumed: Layout::Equal(prefix) } if self.roots[*root].source == CellSource::Storage => {
                CellSource::StorageRef(prefix.len())
            }
            _ => CellSource::Unknown,
        }
    }

    fn apply_summary(&self, name: &str, args: &[Operand], ndests: usize) -> Vec<AbsVal> {
        let Some(summaries) = self.ctx.summaries else { return vec![AbsVal::Top; ndests] };
        let Some(s) = summaries.get(name) else { return vec![AbsVal::Top; ndests] };
        if s.returns.len() != ndests {
            return vec![AbsVal::Top; ndests];
        }
        s.returns
            .iter()
            .map(|r| match r {
                AbsVal::ParamBuilder(i, fields) => match args.get(*i).map(|a| self.val(a)) {
                    Some(AbsVal::Builder(l)) => AbsVal::Builder(l.concat(fields)),
                    _ => AbsVal::Top,
                },
                AbsVal::Builder(_) | AbsVal::Cell(CellSource::Built(_)) | AbsVal::NotCell | AbsVal::Addr => r.clone(),
                AbsVal::Cell(CellSource::Storage | CellSource::StorageRef(_)) => r.clone(),
                _ => AbsVal::Top,
            })
            .collect()
    }

    fn eval_rvalue(&self, rv: &Rvalue) -> AbsVal {
        match rv {
            Rvalue::Use(a) => self.val(a),
            Rvalue::Select(_, a, b) => self.val(a).join(&self.val(b)),
            Rvalue::Unary(..) | Rvalue::Binary(..) => AbsVal::NotCell,
            Rvalue::Tensor(_) | Rvalue::Tuple(_) | Rvalue::Project(..) => AbsVal::Top,
        }
    }

    /// Values for the definitions of the instruction at `loc`.
    fn eval(&mut self, loc: Loc) -> Vec<(VarId, AbsVal)> {
        let instr = self.cfg.instr(loc);
        match &instr.kind {
            InstrKind::Assign { dest, rv } => vec![(*dest, self.eval_rvalue(rv))],
            InstrKind::GlobRead { dest, .. } => vec![(*dest, AbsVal::Top)],
            InstrKind::Phi { dest, incoming } => {
                let v = incoming.iter().fold(AbsVal::Bottom, |acc, (_, x)| acc.join(&self.vals[x.index()]));
                vec![(*dest, v)]
            }
            InstrKind::Call { dests, callee, args, style, .. } => {
                let vals = self.eval_call(loc, instr.span, callee, args, dests.len(), *style);
                dests.iter().copied().zip(vals).collect()
            }
            _ => Vec::new(),
        }
    }
}

/// Analyse one SSA function.
pub fn analyze_cells(cfg: &Cfg, dom: &DomTree, ctx: &Context) -> CellFacts {
    let mut it = Interp {
        cfg,
        ctx,
        consts: ConstEval::new(cfg),
        vals: vec![AbsVal::Bottom; cfg.vars.len()],
        roots: Vec::new(),
        root_at: HashMap::new(),
    };
    for (i, v) in cfg.vars.iter().enumerate() {
        if v.version == 0 {
            it.vals[i] = AbsVal::Top;
        }
    }
    if ctx.summaries.is_none() {
        for (i, p) in cfg.params.iter().enumerate() {
            it.vals[p.index()] = AbsVal::ParamBuilder(i, Layout::empty());
        }
    }

    let locs: Vec<Loc> = dom
        .rpo
        .iter()
        .flat_map(|&b| (0..cfg.blocks[b].instrs.len()).map(move |index| Loc { block: cfg.blocks[b].id, index }))
        .collect();

    let mut block_visits = 0;
    let mut changed: BTreeSet<VarId> = BTreeSet::new();
    for pass in 0..2 {
        block_visits += dom.rpo.len();
        for &loc in &locs {
            for (d, v) in it.eval(loc) {
                if pass == 1 && it.vals[d.index()] != v {
                    changed.insert(d);
                }
                it.vals[d.index()] = v;
            }
        }
    }
    // φs whose back-edge inputs moved after they were evaluated.
    for &loc in &locs {
        if matches!(cfg.instr(loc).kind, InstrKind::Phi { .. }) {
            for (d, v) in it.eval(loc) {
                if it.vals[d.index()] != v {
                    changed.insert(d);
                }
            }
        }
    }

    // Widen and propagate along def-use edges.
    let mut users: Vec<Vec<Loc>> = vec![Vec::new(); cfg.vars.len()];
    for &loc in &locs {
        for u in cfg.instr(loc).uses() {
            users[u.index()].push(loc);
        }
    }
    let mut frozen: HashSet<VarId> = HashSet::new();
    let mut updates: HashMap<VarId, u32> = HashMap::new();
    let mut work: Vec<Loc> = Vec::new();
    for &v in &changed {
        it.vals[v.index()] = it.vals[v.index()].widened();
        frozen.insert(v);
        work.extend(users[v.index()].iter().copied());
    }
    while let Some(loc) = work.pop() {
        for (d, v) in it.eval(loc) {
            if frozen.contains(&d) || it.vals[d.index()] == v {
                continue;
            }
            let n = updates.entry(d).or_insert(0);
            *n += 1;
            if *n > 2 {
                it.vals[d.index()] = v.widened();
                frozen.insert(d);
            } else {
                it.vals[d.index()] = v;
            }
            work.extend(users[d.index()].iter().copied());
        }
    }

    let mut facts = collect(&mut it, &locs);
    facts.block_visits = block_visits;
    facts.widened = changed;
    facts
}

fn collect(it: &mut Interp, locs: &[Loc]) -> CellFacts {
    let cfg = it.cfg;
    let mut loads = Vec::new();
    let mut stores = Vec::new();
    let mut sends = Vec::new();
    let mut returns: Option<Vec<AbsVal>> = None;
    let mut returns_agree = true;

    for v in &it.vals {
        if let AbsVal::Slice { root, consumed: Layout::Top } = v {
            it.roots[*root].top = true;
        }
    }
    for &loc in locs {
        let instr = cfg.instr(loc);
        match &instr.kind {
            InstrKind::Phi { dest, incoming } => {
                let roots: BTreeSet<RootId> = incoming.iter().filter_map(|(_, v)| it.vals[v.index()].root()).collect();
                // Merging different slices, or a slice with something
                // unknown, loses track of every slice involved.
                if roots.len() > 1 || (!roots.is_empty() && it.vals[dest.index()].root().is_none()) {
                    for r in roots {
                        it.roots[r].top = true;
                    }
                }
            }
            InstrKind::Assign { rv: Rvalue::Tensor(items) | Rvalue::Tuple(items), .. } => {
                for o in items {
                    if let Some(r) = it.val(o).root() {
                        it.roots[r].escaped = true;
                    }
                }
            }
            InstrKind::Assign { rv: Rvalue::Select(_, a, b), .. } => {
                if let (Some(x), Some(y)) = (it.val(a).root(), it.val(b).root()) {
                    if x != y {
                        it.roots[x].top = true;
                        it.roots[y].top = true;
                    }
                }
            }
            InstrKind::SetGlob { src, .. } => {
                if let Some(r) = it.val(src).root() {
                    it.roots[r].escaped = true;
                }
            }
            InstrKind::Return(ops) => {
                for o in ops {
                    if let Some(r) = it.val(o).root() {
                        it.roots[r].escaped = true;
                    }
                }
                let vals: Vec<AbsVal> = ops.iter().map(|o| it.val(o)).collect();
                returns = Some(match returns.take() {
                    None => vals,
                    Some(prev) if prev.len() == vals.len() => prev.iter().zip(&vals).map(|(a, b)| a.join(b)).collect(),
                    Some(prev) => {
                        returns_agree = false;
                        prev
                    }
                });
            }
            InstrKind::Call { callee, args, .. } => {
                let user = user_name(callee, it.ctx.user_functions).is_some();
                let spec = if user { None } else { it.ctx.catalog.get(callee) };
                for (i, a) in args.iter().enumerate() {
                    let Some(r) = it.val(a).root() else { continue };
                    let escapes = match spec {
                        None => true,
                        Some(s) => i == 1 && matches!(s.cell_op, Some(CellOp::StoreSlice | CellOp::StoreBuilder)),
                    };
                    if escapes {
                        it.roots[r].escaped = true;
                    }
                }
                match spec.and_then(|s| s.cell_op) {
                    Some(CellOp::Load { kind, width }) | Some(CellOp::Skip { kind, width }) => {
                        if let Some(AbsVal::Slice { root, consumed }) = args.first().map(|a| it.val(a)) {
                            it.roots[root].loads += 1;
                            if !consumed.is_top() {
                                loads.push(LoadEvent {
                                    root,
                                    loc,
                                    span: instr.span,
                                    prefix: consumed,
                                    field: Field::new(kind, it.width(width, args), instr.span),
                                });
                            }
                        }
                    }
                    Some(CellOp::SetData) | Some(CellOp::Send) => {
                        let layout = match args.first().map(|a| it.val(a)) {
                            Some(AbsVal::Cell(CellSource::Built(l))) if !l.is_top() => Some(l),
                            _ => None,
                        };
                        let site = CellSite { loc, span: instr.span, layout };
                        if spec.and_then(|s| s.cell_op) == Some(CellOp::SetData) {
                            stores.push(site);
                        } else {
                            sends.push(site);
                        }
                    }
                    _ => {}
                }
            }
            _ => {}
        }
    }
    let end_parse = end_parse_status(it, locs);
    let summary = Summary { returns: if returns_agree { returns.unwrap_or_default() } else { Vec::new() } };
    CellFacts {
        values: it.vals.clone(),
        roots: it.roots.clone(),
        loads,
        stores,
        sends,
        end_parse,
        summary,
        block_visits: 0,
        widened: BTreeSet::new(),
    }
}

/// Roots open (parsed but not `end_parse`d) at each point, with the span of
/// the latest load on some path. May-analysis: a root open on any path to an
/// exit is reported.
fn end_parse_status(it: &Interp, locs: &[Loc]) -> Vec<EndParseStatus> {
    let cfg = it.cfg;
    type State = BTreeMap<RootId, Option<Span>>;
    let join_into = |into: &mut State, from: &State| {
        let mut changed = false;
        for (r, s) in from {
            match into.get_mut(r) {
                None => {
                    into.insert(*r, *s);
                    changed = true;
                }
                Some(cur) => {
                    let best = match (*cur, *s) {
                        (Some(a), Some(b)) => Some(if b.lo() > a.lo() { b } else { a }),
                        (a, b) => a.or(b),
                    };
                    if best != *cur {
                        *cur = best;
                        changed = true;
                    }
                }
            }
        }
        changed
    };
    let order: Vec<usize> = {
        let mut seen = BTreeSet::new();
        locs.iter().filter(|l| seen.insert(l.block.index())).map(|l| l.block.index()).collect()
    };
    let mut out_state: Vec<State> = vec![State::new(); cfg.blocks.len()];
    let mut changed = true;
    while changed {
        changed = false;
        for &b in &order {
            let mut st = State::new();
            for p in &cfg.blocks[b].preds {
                join_into(&mut st, &out_state[p.index()]);
            }
            for (index, instr) in cfg.blocks[b].instrs.iter().enumerate() {
                let InstrKind::Call { callee, args, .. } = &instr.kind else { continue };
                let loc = Loc { block: cfg.blocks[b].id, index };
                let op = if user_name(callee, it.ctx.user_functions).is_some() {
                    None
                } else {
                    it.ctx.catalog.get(callee).and_then(|s| s.cell_op)
                };
                match op {
                    Some(CellOp::BeginParse) => {
                        if let Some(&r) = it.root_at.get(&loc) {
                            st.insert(r, None);
                        }
                    }
                    Some(CellOp::Load { .. }) | Some(CellOp::Skip { .. }) => {
                        if let Some(r) = args.first().and_then(|a| it.val(a).root()) {
                            if let Some(s) = st.get_mut(&r) {
                                *s = Some(instr.span);
                            }
                        }
                    }
                    Some(CellOp::EndParse) => {
                        if let Some(r) = args.first().and_then(|a| it.val(a).root()) {
                            st.remove(&r);
                        }
                    }
                    _ => {}
                }
            }
            if out_state[b] != st {
                out_state[b] = st;
                changed = true;
            }
        }
    }

    let mut open: State = State::new();
    for b in &cfg.blocks {
        if matches!(b.terminator().map(|t| &t.kind), Some(InstrKind::Return(_))) {
            join_into(&mut open, &out_state[b.id.index()]);
        }
    }
    it.roots
        .iter()
        .enumerate()
        .map(|(r, root)| {
            if root.top {
                EndParseStatus::Untracked
            } else if root.escaped {
                EndParseStatus::Escaped
            } else if root.loads == 0 {
                EndParseStatus::Unread
            } else {
                match open.get(&r) {
                    Some(Some(span)) => EndParseStatus::NotValidated { last_load: *span },
                    _ => EndParseStatus::Validated,
                }
            }
        })
        .collect()
}

/// Compute summaries for all functions (one level: calls inside the
/// summarised functions are opaque).
pub fn summarize(cfgs: &BTreeMap<String, (Cfg, DomTree)>, catalog: &Catalog) -> BTreeMap<String, Summary> {
    let users: BTreeSet<String> = cfgs.keys().cloned().collect();
    let ctx = Context { catalog, user_functions: &users, summaries: None };
    cfgs.iter()
        .map(|(name, (cfg, dom))| (name.clone(), analyze_cells(cfg, dom, &ctx).summary))
        .collect()
}
