use super::span::{SourceMap, Span};
use super::FrontendError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeExpr {
    Int,
    Cell,
    Slice,
    Builder,
    Cont,
    Tuple,
    /// `var` or `_`: the type is left to inference.
    Inferred,
    /// `()`, also written as an empty tensor.
    Unit,
    Tensor(Vec<TypeExpr>),
    TupleOf(Vec<TypeExpr>),
    /// A `forall` type variable or unknown type name.
    Named(String),
    Func(Box<TypeExpr>, Box<TypeExpr>),
}

impl TypeExpr {
    pub fn is_unit(&self) -> bool {
        match self {
            TypeExpr::Unit => true,
            TypeExpr::Tensor(items) => items.is_empty(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    BitNot,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    DivRound,
    DivCeil,
    Mod,
    ModRound,
    ModCeil,
    DivMod,
    Shl,
    Shr,
    ShrRound,
    ShrCeil,
    BitAnd,
    BitOr,
    BitXor,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    Cmp,
}

impl BinaryOp {
    pub fn as_str(self) -> &'static str {
        use BinaryOp::*;
        match self {
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            DivRound => "~/",
            DivCeil => "^/",
            Mod => "%",
            ModRound => "~%",
            ModCeil => "^%",
            DivMod => "/%",
            Shl => "<<",
            Shr => ">>",
            ShrRound => "~>>",
            ShrCeil => "^>>",
            BitAnd => "&",
            BitOr => "|",
            BitXor => "^",
            Eq => "==",
            Ne => "!=",
            Lt => "<",
            Gt => ">",
            Le => "<=",
            Ge => ">=",
            Cmp => "<=>",
        }
    }

    pub fn is_comparison(self) -> bool {
        use BinaryOp::*;
        matches!(self, Eq | Ne | Lt | Gt | Le | Ge | Cmp)
    }

    /// Integer divisions that truncate their result.
    pub fn is_division(self) -> bool {
        use BinaryOp::*;
        matches!(self, Div | DivRound | DivCeil | DivMod)
    }
}

impl UnaryOp {
    pub fn as_str(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::BitNot => "~",
            UnaryOp::Not => "!",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    /// Integer literal; `value` is `None` when it does not fit in `i128`.
    Int { text: String, value: Option<i128> },
    Str { value: String, suffix: Option<char> },
    Ident(String),
    /// The `_` binder / placeholder.
    Underscore,
    Unit,
    Unary { op: UnaryOp, operand: Box<Expr> },
    Binary { op: BinaryOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Ternary { cond: Box<Expr>, then: Box<Expr>, els: Box<Expr> },
    /// `target = value` or a compound form such as `target += value`.
    Assign { op: Option<BinaryOp>, target: Box<Expr>, value: Box<Expr> },
    /// `f(a, b)`
    Call { func: String, func_span: Span, args: Vec<Expr> },
    /// `x.f(a)` when `modifying` is false, `x~f(a)` when true.
    MethodCall { receiver: Box<Expr>, method: String, method_span: Span, args: Vec<Expr>, modifying: bool },
    Tensor(Vec<Expr>),
    Tuple(Vec<Expr>),
    /// A typed binder such as `int x`, `var (a, b)` or `slice _`.
    Decl { ty: TypeExpr, binder: Box<Expr> },
    /// A bare type in expression position, e.g. the elements of `(int, int) p`.
    TypeOnly(TypeExpr),
}

impl Expr {
    /// True when the expression (as an assignment target) introduces at least
    /// one new local.
    pub fn declares(&self) -> bool {
        match &self.kind {
            ExprKind::Decl { .. } => true,
            ExprKind::Tensor(items) | ExprKind::Tuple(items) => items.iter().any(Expr::declares),
            _ => false,
        }
    }

    /// Visit this expression and every sub-expression in pre-order.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Unary { operand, .. } => operand.walk(f),
            ExprKind::Binary { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            ExprKind::Ternary { cond, then, els } => {
                cond.walk(f);
                then.walk(f);
                els.walk(f);
            }
            ExprKind::Assign { target, value, .. } => {
                target.walk(f);
                value.walk(f);
            }
            ExprKind::Call { args, .. } => args.iter().for_each(|a| a.walk(f)),
            ExprKind::MethodCall { receiver, args, .. } => {
                receiver.walk(f);
                args.iter().for_each(|a| a.walk(f));
            }
            ExprKind::Tensor(items) | ExprKind::Tuple(items) => items.iter().for_each(|a| a.walk(f)),
            ExprKind::Decl { binder, .. } => binder.walk(f),
            ExprKind::Int { .. }
            | ExprKind::Str { .. }
            | ExprKind::Ident(_)
            | ExprKind::Underscore
            | ExprKind::Unit
            | ExprKind::TypeOnly(_) => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    /// `int x = e;`, `var (a, b) = e;`, `(int a, slice s) = e;`
    VarDecl { pattern: Expr, init: Option<Expr> },
    /// `x = e;`, `x += e;`, `(a, b) = e;`
    Assign { target: Expr, op: Option<BinaryOp>, value: Expr },
    Expr(Expr),
    /// `if`/`ifnot`; an `elseif` chain is a nested `If` in `else_branch`.
    If { cond: Expr, negated: bool, then_block: Block, else_branch: Option<Box<Stmt>> },
    While { cond: Expr, body: Block },
    Repeat { count: Expr, body: Block },
    DoUntil { body: Block, cond: Expr },
    Return(Expr),
    Block(Block),
    TryCatch { body: Block, catch_args: Vec<Expr>, handler: Block },
    /// A region the parser could not make sense of. Analyses skip it.
    Opaque,
}

impl Stmt {
    /// Visit this statement and all nested statements in pre-order.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Stmt)) {
        f(self);
        match &self.kind {
            StmtKind::If { then_block, else_branch, .. } => {
                then_block.walk(f);
                if let Some(e) = else_branch {
                    e.walk(f);
                }
            }
            StmtKind::While { body, .. } | StmtKind::Repeat { body, .. } | StmtKind::DoUntil { body, .. } => {
                body.walk(f)
            }
            StmtKind::Block(b) => b.walk(f),
            StmtKind::TryCatch { body, handler, .. } => {
                body.walk(f);
                handler.walk(f);
            }
            _ => {}
        }
    }

    /// Expressions directly owned by this statement (not nested statements).
    pub fn exprs(&self) -> Vec<&Expr> {
        match &self.kind {
            StmtKind::VarDecl { pattern, init } => std::iter::once(pattern).chain(init.iter()).collect(),
            StmtKind::Assign { target, value, .. } => vec![target, value],
            StmtKind::Expr(e) | StmtKind::Return(e) => vec![e],
            StmtKind::If { cond, .. } | StmtKind::While { cond, .. } | StmtKind::DoUntil { cond, .. } => vec![cond],
            StmtKind::Repeat { count, .. } => vec![count],
            StmtKind::TryCatch { catch_args, .. } => catch_args.iter().collect(),
            StmtKind::Block(_) | StmtKind::Opaque => Vec::new(),
        }
    }
}

impl Block {
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Stmt)) {
        for s in &self.stmts {
            s.walk(f);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Modifiers {
    pub impure: bool,
    pub inline: bool,
    pub inline_ref: bool,
    /// `Some(None)` for a bare `method_id`, `Some(Some(n))` for `method_id(n)`.
    pub method_id: Option<Option<i128>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    /// `None` for an unnamed parameter such as `(slice, int count)`.
    pub name: Option<String>,
    pub ty: TypeExpr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionBody {
    Block(Block),
    /// `asm "..."` body; not analyzed.
    Asm,
    /// Forward declaration without a body.
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDecl {
    pub name: String,
    pub name_span: Span,
    pub forall: Vec<String>,
    pub params: Vec<Param>,
    pub return_type: TypeExpr,
    pub modifiers: Modifiers,
    pub body: FunctionBody,
    pub span: Span,
}

impl FunctionDecl {
    pub fn is_recv_internal(&self) -> bool {
        self.name == "recv_internal"
    }

    pub fn block(&self) -> Option<&Block> {
        match &self.body {
            FunctionBody::Block(b) => Some(b),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalDecl {
    pub name: String,
    pub ty: TypeExpr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstDecl {
    pub name: String,
    pub ty: TypeExpr,
    pub value: Expr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Include {
    pub path: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pragma {
    pub text: String,
    pub span: Span,
}

/// Top-level declarations of a single file, in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedFile {
    pub functions: Vec<FunctionDecl>,
    pub globals: Vec<GlobalDecl>,
    pub constants: Vec<ConstDecl>,
    pub includes: Vec<Include>,
    pub pragmas: Vec<Pragma>,
}

/// A whole compilation unit: every file reached through `#include`, with the
/// declarations of all of them merged in include order.
#[derive(Debug, Clone, Default)]
pub struct SourceUnit {
    pub sources: SourceMap,
    pub functions: Vec<FunctionDecl>,
    pub globals: Vec<GlobalDecl>,
    pub constants: Vec<ConstDecl>,
    pub includes: Vec<Include>,
    pub pragmas: Vec<Pragma>,
    pub errors: Vec<FrontendError>,
}

impl SourceUnit {
    pub fn function(&self, name: &str) -> Option<&FunctionDecl> {
        // Prefer the definition over forward declarations.
        self.functions
            .iter()
            .find(|f| f.name == name && matches!(f.body, FunctionBody::Block(_)))
            .or_else(|| self.functions.iter().find(|f| f.name == name))
    }

    pub fn global(&self, name: &str) -> Option<&GlobalDecl> {
        self.globals.iter().find(|g| g.name == name)
    }

    pub fn constant(&self, name: &str) -> Option<&ConstDecl> {
        self.constants.iter().find(|c| c.name == name)
    }

    pub fn merge(&mut self, file: ParsedFile) {
        for g in file.globals {
            if self.global(&g.name).is_none() {
                self.globals.push(g);
            }
        }
        self.functions.extend(file.functions);
        self.constants.extend(file.constants);
        self.includes.extend(file.includes);
        self.pragmas.extend(file.pragmas);
    }

    /// Number of opaque statements across all function bodies.
    pub fn opaque_count(&self) -> usize {
        let mut n = 0;
        for f in &self.functions {
            if let Some(b) = f.block() {
                b.walk(&mut |s| {
                    if matches!(s.kind, StmtKind::Opaque) {
                        n += 1;
                    }
                });
            }
        }
        n
    }
}
