//! Recursive-descent parser for the FunC subset used by wallet, jetton and
//! NFT style contracts.
//!
//! Precedence, loosest first: assignment, `?:`, comparison, shifts,
//! `+ - | ^`, `* / % /% ~/ ^/ ~% ^% &`, unary, method calls, primaries.
//! Statement-level failures inside a function body become
//! [`StmtKind::Opaque`] and parsing resumes at the next statement.

use super::ast::*;
use super::lexer::{parse_int_literal, Keyword, Token, TokenKind};
use super::span::{SourceFile, Span};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{message}")]
pub struct ParseError {
    pub message: String,
    pub expected: Option<String>,
    pub span: Span,
    /// True when the parser skipped the offending statement and continued.
    pub recovered: bool,
}

type PResult<T> = Result<T, ParseError>;

pub struct Parser<'a> {
    file: &'a SourceFile,
    tokens: &'a [Token],
    pos: usize,
    forall: Vec<String>,
    errors: Vec<ParseError>,
}

fn assign_op(op: &str) -> Option<Option<BinaryOp>> {
    use BinaryOp::*;
    Some(match op {
        "=" => None,
        "+=" => Some(Add),
        "-=" => Some(Sub),
        "*=" => Some(Mul),
        "/=" => Some(Div),
        "~/=" => Some(DivRound),
        "^/=" => Some(DivCeil),
        "%=" => Some(Mod),
        "~%=" => Some(ModRound),
        "^%=" => Some(ModCeil),
        "<<=" => Some(Shl),
        ">>=" => Some(Shr),
        "~>>=" => Some(ShrRound),
        "^>>=" => Some(ShrCeil),
        "&=" => Some(BitAnd),
        "|=" => Some(BitOr),
        "^=" => Some(BitXor),
        _ => return None,
    })
}

fn comparison_op(op: &str) -> Option<BinaryOp> {
    use BinaryOp::*;
    Some(match op {
        "==" => Eq,
        "!=" => Ne,
        "<" => Lt,
        ">" => Gt,
        "<=" => Le,
        ">=" => Ge,
        "<=>" => Cmp,
        _ => return None,
    })
}

fn shift_op(op: &str) -> Option<BinaryOp> {
    use BinaryOp::*;
    Some(match op {
        "<<" => Shl,
        ">>" => Shr,
        "~>>" => ShrRound,
        "^>>" => ShrCeil,
        _ => return None,
    })
}

fn additive_op(op: &str) -> Option<BinaryOp> {
    use BinaryOp::*;
    Some(match op {
        "+" => Add,
        "-" => Sub,
        "|" => BitOr,
        "^" => BitXor,
        _ => return None,
    })
}

fn multiplicative_op(op: &str) -> Option<BinaryOp> {
    use BinaryOp::*;
    Some(match op {
        "*" => Mul,
        "/" => Div,
        "~/" => DivRound,
        "^/" => DivCeil,
        "%" => Mod,
        "~%" => ModRound,
        "^%" => ModCeil,
        "/%" => DivMod,
        "&" => BitAnd,
        _ => return None,
    })
}

fn simple_type(kw: Keyword) -> Option<TypeExpr> {
    Some(match kw {
        Keyword::Int => TypeExpr::Int,
        Keyword::Cell => TypeExpr::Cell,
        Keyword::Slice => TypeExpr::Slice,
        Keyword::Builder => TypeExpr::Builder,
        Keyword::Cont => TypeExpr::Cont,
        Keyword::Tuple => TypeExpr::Tuple,
        Keyword::Var => TypeExpr::Inferred,
        _ => return None,
    })
}

impl<'a> Parser<'a> {
    pub fn new(file: &'a SourceFile, tokens: &'a [Token]) -> Self {
        Parser { file, tokens, pos: 0, forall: Vec::new(), errors: Vec::new() }
    }

    fn peek(&self) -> Option<&'a TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, n: usize) -> Option<&'a TokenKind> {
        self.tokens.get(self.pos + n).map(|t| &t.kind)
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek() == Some(kind)
    }

    fn at_kw(&self, kw: Keyword) -> bool {
        self.peek() == Some(&TokenKind::Keyword(kw))
    }

    fn at_op(&self, op: &str) -> bool {
        matches!(self.peek(), Some(TokenKind::Op(o)) if *o == op)
    }

    fn bump(&mut self) -> &'a Token {
        let t = &self.tokens[self.pos];
        self.pos += 1;
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eof_span(&self) -> Span {
        let end = self.file.text.len();
        self.file.span(end, end)
    }

    fn cur_span(&self) -> Span {
        self.tokens.get(self.pos).map(|t| t.span).unwrap_or_else(|| self.eof_span())
    }

    fn span_from(&self, start: usize) -> Span {
        if self.pos == start {
            return self.cur_span();
        }
        self.tokens[start].span.to(self.tokens[self.pos - 1].span)
    }

    fn error(&self, message: impl Into<String>, expected: Option<&str>) -> ParseError {
        let found = match self.peek() {
            Some(k) => k.to_string(),
            None => "end of file".to_string(),
        };
        ParseError {
            message: format!("{}, found {found}", message.into()),
            expected: expected.map(str::to_string),
            span: self.cur_span(),
            recovered: false,
        }
    }

    fn expect(&mut self, kind: &TokenKind, what: &str) -> PResult<&'a Token> {
        if self.at(kind) {
            Ok(self.bump())
        } else {
            Err(self.error(format!("expected {what}"), Some(what)))
        }
    }

    fn expect_ident(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.peek() {
            Some(TokenKind::Ident(name)) => {
                let t = self.bump();
                Ok((name.clone(), t.span))
            }
            _ => Err(self.error(format!("expected {what}"), Some(what))),
        }
    }

    // ----- top level -------------------------------------------------------

    pub fn parse_file(mut self) -> (ParsedFile, Vec<ParseError>) {
        let mut out = ParsedFile::default();
        while self.pos < self.tokens.len() {
            let start = self.pos;
            if let Err(e) = self.parse_item(&mut out) {
                self.errors.push(e);
                self.pos = start;
                self.recover_top();
            }
        }
        (out, self.errors)
    }

    fn recover_top(&mut self) {
        let start = self.pos;
        let mut depth = 0i32;
        while let Some(k) = self.peek() {
            self.pos += 1;
            match k {
                TokenKind::Semi if depth == 0 => break,
                TokenKind::LBrace => depth += 1,
                TokenKind::RBrace => {
                    depth -= 1;
                    if depth <= 0 {
                        break;
                    }
                }
                _ => {}
            }
        }
        if self.pos == start {
            self.pos += 1;
        }
    }

    fn parse_item(&mut self, out: &mut ParsedFile) -> PResult<()> {
        let start = self.pos;
        match self.peek() {
            Some(TokenKind::Include) => {
                self.bump();
                let path = match self.peek() {
                    Some(TokenKind::Str { value, .. }) => {
                        self.bump();
                        value.clone()
                    }
                    _ => return Err(self.error("expected include path string", Some("string literal"))),
                };
                self.expect(&TokenKind::Semi, "';'")?;
                out.includes.push(Include { path, span: self.span_from(start) });
            }
            Some(TokenKind::Pragma) => {
                self.bump();
                let body_start = self.pos;
                while !self.at(&TokenKind::Semi) {
                    if self.peek().is_none() {
                        return Err(self.error("unterminated #pragma", Some("';'")));
                    }
                    self.bump();
                }
                let text = if self.pos > body_start {
                    self.file.snippet(&self.span_from(body_start)).to_string()
                } else {
                    String::new()
                };
                self.bump();
                out.pragmas.push(Pragma { text, span: self.span_from(start) });
            }
            Some(TokenKind::Keyword(Keyword::Global)) => {
                self.bump();
                loop {
                    let decl_start = self.pos;
                    let ty = if matches!(self.peek(), Some(TokenKind::Ident(_)))
                        && matches!(self.peek_at(1), Some(TokenKind::Comma | TokenKind::Semi))
                    {
                        TypeExpr::Inferred
                    } else {
                        self.parse_type()?
                    };
                    let (name, _) = self.expect_ident("global name")?;
                    out.globals.push(GlobalDecl { name, ty, span: self.span_from(decl_start) });
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
                self.expect(&TokenKind::Semi, "';'")?;
            }
            Some(TokenKind::Keyword(Keyword::Const)) => {
                self.bump();
                loop {
                    let decl_start = self.pos;
                    let ty = if matches!(self.peek(), Some(TokenKind::Ident(_))) && self.peek_at(1) == Some(&TokenKind::Op("="))
                    {
                        TypeExpr::Inferred
                    } else {
                        self.parse_type()?
                    };
                    let (name, _) = self.expect_ident("constant name")?;
                    if !self.at_op("=") {
                        return Err(self.error("expected '='", Some("'='")));
                    }
                    self.bump();
                    let value = self.parse_ternary()?;
                    out.constants.push(ConstDecl { name, ty, value, span: self.span_from(decl_start) });
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
                self.expect(&TokenKind::Semi, "';'")?;
            }
            Some(TokenKind::Semi) => {
                self.bump();
            }
            Some(_) => {
                let f = self.parse_function()?;
                out.functions.push(f);
            }
            None => {}
        }
        Ok(())
    }

    fn parse_function(&mut self) -> PResult<FunctionDecl> {
        let start = self.pos;
        self.forall.clear();
        let mut forall = Vec::new();
        if self.at_kw(Keyword::Forall) {
            self.bump();
            loop {
                let (name, _) = self.expect_ident("type variable")?;
                forall.push(name);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            if !self.at_op("->") {
                return Err(self.error("expected '->' after forall", Some("'->'")));
            }
            self.bump();
            self.forall = forall.clone();
        }
        let return_type = self.parse_type()?;
        let (name, name_span) = if self.at(&TokenKind::Tilde) {
            let tilde = self.bump().span;
            let (n, s) = self.expect_ident("function name")?;
            (format!("~{n}"), tilde.to(s))
        } else {
            self.expect_ident("function name")?
        };
        self.expect(&TokenKind::LParen, "'('")?;
        let params = self.parse_params()?;
        self.expect(&TokenKind::RParen, "')'")?;

        let mut modifiers = Modifiers::default();
        loop {
            match self.peek() {
                Some(TokenKind::Keyword(Keyword::Impure)) => modifiers.impure = true,
                Some(TokenKind::Keyword(Keyword::Inline)) => modifiers.inline = true,
                Some(TokenKind::Keyword(Keyword::InlineRef)) => modifiers.inline_ref = true,
                Some(TokenKind::Keyword(Keyword::MethodId)) => {
                    self.bump();
                    let mut id = None;
                    if self.eat(&TokenKind::LParen) {
                        if let Some(TokenKind::Int(text)) = self.peek() {
                            id = parse_int_literal(text);
                            self.bump();
                        }
                        self.expect(&TokenKind::RParen, "')'")?;
                    }
                    modifiers.method_id = Some(id);
                    continue;
                }
                _ => break,
            }
            self.bump();
        }

        let body = match self.peek() {
            Some(TokenKind::Semi) => {
                self.bump();
                FunctionBody::None
            }
            Some(TokenKind::Keyword(Keyword::Asm)) => {
                while !self.at(&TokenKind::Semi) {
                    if self.peek().is_none() {
                        return Err(self.error("unterminated asm body", Some("';'")));
                    }
                    self.bump();
                }
                self.bump();
                FunctionBody::Asm
            }
            Some(TokenKind::LBrace) => FunctionBody::Block(self.parse_block()?),
            _ => return Err(self.error("expected function body", Some("'{', ';' or asm"))),
        };

        let mut seen = std::collections::HashSet::new();
        for p in &params {
            if let Some(n) = &p.name {
                if !seen.insert(n.clone()) {
                    self.errors.push(ParseError {
                        message: format!("duplicate parameter `{n}` in `{name}`"),
                        expected: None,
                        span: p.span,
                        recovered: true,
                    });
                }
            }
        }
        self.forall.clear();
        Ok(FunctionDecl { name, name_span, forall, params, return_type, modifiers, body, span: self.span_from(start) })
    }

    fn parse_params(&mut self) -> PResult<Vec<Param>> {
        let mut params = Vec::new();
        if self.at(&TokenKind::RParen) {
            return Ok(params);
        }
        loop {
            let start = self.pos;
            let untyped = match (self.peek(), self.peek_at(1)) {
                (Some(TokenKind::Ident(n)), Some(TokenKind::Comma | TokenKind::RParen))
                    if n != "_" && !self.forall.contains(n) =>
                {
                    Some(n.clone())
                }
                _ => None,
            };
            let param = if let Some(name) = untyped {
                self.bump();
                Param { name: Some(name), ty: TypeExpr::Inferred, span: self.span_from(start) }
            } else {
                let ty = self.parse_type()?;
                let name = match self.peek() {
                    Some(TokenKind::Ident(n)) if n != "_" => {
                        let n = n.clone();
                        self.bump();
                        Some(n)
                    }
                    Some(TokenKind::Ident(_)) => {
                        self.bump();
                        None
                    }
                    _ => None,
                };
                Param { name, ty, span: self.span_from(start) }
            };
            params.push(param);
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        Ok(params)
    }

    fn parse_type(&mut self) -> PResult<TypeExpr> {
        let ty = match self.peek() {
            Some(TokenKind::Keyword(kw)) => match simple_type(*kw) {
                Some(t) => {
                    self.bump();
                    t
                }
                None => return Err(self.error("expected type", Some("type"))),
            },
            Some(TokenKind::Ident(n)) => {
                let n = n.clone();
                self.bump();
                if n == "_" {
                    TypeExpr::Inferred
                } else {
                    TypeExpr::Named(n)
                }
            }
            Some(TokenKind::LParen) => {
                self.bump();
                if self.eat(&TokenKind::RParen) {
                    TypeExpr::Unit
                } else {
                    let mut items = vec![self.parse_type()?];
                    while self.eat(&TokenKind::Comma) {
                        items.push(self.parse_type()?);
                    }
                    self.expect(&TokenKind::RParen, "')'")?;
                    if items.len() == 1 {
                        items.pop().unwrap()
                    } else {
                        TypeExpr::Tensor(items)
                    }
                }
            }
            Some(TokenKind::LBracket) => {
                self.bump();
                let mut items = Vec::new();
                if !self.at(&TokenKind::RBracket) {
                    items.push(self.parse_type()?);
                    while self.eat(&TokenKind::Comma) {
                        items.push(self.parse_type()?);
                    }
                }
                self.expect(&TokenKind::RBracket, "']'")?;
                TypeExpr::TupleOf(items)
            }
            _ => return Err(self.error("expected type", Some("type"))),
        };
        if self.at_op("->") {
            self.bump();
            let ret = self.parse_type()?;
            return Ok(TypeExpr::Func(Box::new(ty), Box::new(ret)));
        }
        Ok(ty)
    }

    // ----- statements ------------------------------------------------------

    fn parse_block(&mut self) -> PResult<Block> {
        let start = self.pos;
        self.expect(&TokenKind::LBrace, "'{'")?;
        let mut stmts = Vec::new();
        loop {
            match self.peek() {
                None => return Err(self.error("unclosed block", Some("'}'"))),
                Some(TokenKind::RBrace) => break,
                _ => {}
            }
            let stmt_start = self.pos;
            match self.parse_stmt() {
                Ok(Some(s)) => stmts.push(s),
                Ok(None) => {}
                Err(mut e) => {
                    self.pos = stmt_start;
                    self.skip_statement();
                    if self.pos == stmt_start {
                        return Err(e);
                    }
                    e.recovered = true;
                    self.errors.push(e);
                    stmts.push(Stmt { kind: StmtKind::Opaque, span: self.span_from(stmt_start) });
                }
            }
        }
        self.bump();
        Ok(Block { stmts, span: self.span_from(start) })
    }

    fn skip_statement(&mut self) {
        let mut depth = 0i32;
        while let Some(k) = self.peek() {
            match k {
                TokenKind::Semi if depth == 0 => {
                    self.bump();
                    return;
                }
                TokenKind::RBrace if depth == 0 => return,
                TokenKind::LBrace | TokenKind::LParen | TokenKind::LBracket => depth += 1,
                TokenKind::RBrace => {
                    depth -= 1;
                    if depth == 0 {
                        self.bump();
                        if !self.at(&TokenKind::Keyword(Keyword::Else))
                            && !self.at(&TokenKind::Keyword(Keyword::ElseIf))
                            && !self.at(&TokenKind::Keyword(Keyword::ElseIfNot))
                            && !self.at(&TokenKind::Keyword(Keyword::Until))
                            && !self.at(&TokenKind::Keyword(Keyword::Catch))
                        {
                            return;
                        }
                        continue;
                    }
                }
                TokenKind::RParen | TokenKind::RBracket => depth = (depth - 1).max(0),
                _ => {}
            }
            self.bump();
        }
    }

    fn parse_stmt(&mut self) -> PResult<Option<Stmt>> {
        let start = self.pos;
        let kind = match self.peek() {
            Some(TokenKind::Semi) => {
                self.bump();
                return Ok(None);
            }
            Some(TokenKind::LBrace) => StmtKind::Block(self.parse_block()?),
            Some(TokenKind::Keyword(Keyword::Return)) => {
                let kw = self.bump().span;
                let value = if self.at(&TokenKind::Semi) {
                    Expr { kind: ExprKind::Unit, span: kw }
                } else {
                    self.parse_expr()?
                };
                self.expect(&TokenKind::Semi, "';'")?;
                StmtKind::Return(value)
            }
            Some(TokenKind::Keyword(Keyword::If)) | Some(TokenKind::Keyword(Keyword::IfNot)) => {
                return self.parse_if().map(Some);
            }
            Some(TokenKind::Keyword(Keyword::While)) => {
                self.bump();
                let cond = self.parse_expr()?;
                let body = self.parse_block()?;
                StmtKind::While { cond, body }
            }
            Some(TokenKind::Keyword(Keyword::Repeat)) => {
                self.bump();
                let count = self.parse_expr()?;
                let body = self.parse_block()?;
                StmtKind::Repeat { count, body }
            }
            Some(TokenKind::Keyword(Keyword::Do)) => {
                self.bump();
                let body = self.parse_block()?;
                self.expect(&TokenKind::Keyword(Keyword::Until), "'until'")?;
                let cond = self.parse_expr()?;
                self.expect(&TokenKind::Semi, "';'")?;
                StmtKind::DoUntil { body, cond }
            }
            Some(TokenKind::Keyword(Keyword::Try)) => {
                self.bump();
                let body = self.parse_block()?;
                self.expect(&TokenKind::Keyword(Keyword::Catch), "'catch'")?;
                self.expect(&TokenKind::LParen, "'('")?;
                let mut catch_args = Vec::new();
                if !self.at(&TokenKind::RParen) {
                    catch_args.push(self.parse_expr()?);
                    while self.eat(&TokenKind::Comma) {
                        catch_args.push(self.parse_expr()?);
                    }
                }
                self.expect(&TokenKind::RParen, "')'")?;
                let handler = self.parse_block()?;
                StmtKind::TryCatch { body, catch_args, handler }
            }
            _ => {
                let e = self.parse_expr()?;
                self.expect(&TokenKind::Semi, "';'")?;
                match e.kind {
                    ExprKind::Assign { op: None, target, value } if target.declares() => {
                        StmtKind::VarDecl { pattern: *target, init: Some(*value) }
                    }
                    ExprKind::Assign { op, target, value } => StmtKind::Assign { target: *target, op, value: *value },
                    ExprKind::Decl { .. } => StmtKind::VarDecl { pattern: e, init: None },
                    _ => StmtKind::Expr(e),
                }
            }
        };
        Ok(Some(Stmt { kind, span: self.span_from(start) }))
    }

    fn parse_if(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        let negated = matches!(
            self.bump().kind,
            TokenKind::Keyword(Keyword::IfNot) | TokenKind::Keyword(Keyword::ElseIfNot)
        );
        let cond = self.parse_expr()?;
        let then_block = self.parse_block()?;
        let else_branch = match self.peek() {
            Some(TokenKind::Keyword(Keyword::Else)) => {
                self.bump();
                if self.at_kw(Keyword::If) || self.at_kw(Keyword::IfNot) {
                    Some(Box::new(self.parse_if()?))
                } else {
                    let b = self.parse_block()?;
                    let span = b.span;
                    Some(Box::new(Stmt { kind: StmtKind::Block(b), span }))
                }
            }
            Some(TokenKind::Keyword(Keyword::ElseIf)) | Some(TokenKind::Keyword(Keyword::ElseIfNot)) => {
                Some(Box::new(self.parse_if()?))
            }
            _ => None,
        };
        Ok(Stmt { kind: StmtKind::If { cond, negated, then_block, else_branch }, span: self.span_from(start) })
    }

    // ----- expressions -----------------------------------------------------

    pub fn parse_expr(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let lhs = self.parse_ternary()?;
        if let Some(TokenKind::Op(op)) = self.peek() {
            if let Some(aop) = assign_op(op) {
                self.bump();
                let value = self.parse_expr()?;
                return Ok(Expr {
                    kind: ExprKind::Assign { op: aop, target: Box::new(lhs), value: Box::new(value) },
                    span: self.span_from(start),
                });
            }
        }
        Ok(lhs)
    }

    fn parse_ternary(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let cond = self.parse_comparison()?;
        if self.at_op("?") {
            self.bump();
            let then = self.parse_expr()?;
            if !self.at_op(":") {
                return Err(self.error("expected ':' in conditional expression", Some("':'")));
            }
            self.bump();
            let els = self.parse_ternary()?;
            return Ok(Expr {
                kind: ExprKind::Ternary { cond: Box::new(cond), then: Box::new(then), els: Box::new(els) },
                span: self.span_from(start),
            });
        }
        Ok(cond)
    }

    fn parse_binary_level(
        &mut self,
        next: fn(&mut Self) -> PResult<Expr>,
        classify: fn(&str) -> Option<BinaryOp>,
    ) -> PResult<Expr> {
        let start = self.pos;
        let mut lhs = next(self)?;
        while let Some(TokenKind::Op(op)) = self.peek() {
            let Some(bop) = classify(op) else { break };
            self.bump();
            let rhs = next(self)?;
            lhs = Expr {
                kind: ExprKind::Binary { op: bop, lhs: Box::new(lhs), rhs: Box::new(rhs) },
                span: self.span_from(start),
            };
        }
        Ok(lhs)
    }

    fn parse_comparison(&mut self) -> PResult<Expr> {
        self.parse_binary_level(Self::parse_shift, comparison_op)
    }

    fn parse_shift(&mut self) -> PResult<Expr> {
        self.parse_binary_level(Self::parse_additive, shift_op)
    }

    fn parse_additive(&mut self) -> PResult<Expr> {
        self.parse_binary_level(Self::parse_multiplicative, additive_op)
    }

    fn parse_multiplicative(&mut self) -> PResult<Expr> {
        self.parse_binary_level(Self::parse_unary, multiplicative_op)
    }

    fn parse_unary(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let op = match self.peek() {
            Some(TokenKind::Op("-")) => Some(UnaryOp::Neg),
            Some(TokenKind::Op("~")) | Some(TokenKind::Tilde) => Some(UnaryOp::BitNot),
            Some(TokenKind::Op("!")) => Some(UnaryOp::Not),
            _ => None,
        };
        if let Some(op) = op {
            self.bump();
            let operand = self.parse_unary()?;
            return Ok(Expr { kind: ExprKind::Unary { op, operand: Box::new(operand) }, span: self.span_from(start) });
        }
        self.parse_postfix()
    }

    fn parse_postfix(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let mut e = self.parse_primary()?;
        loop {
            let modifying = match (self.peek(), self.peek_at(1)) {
                (Some(TokenKind::Dot), Some(TokenKind::Ident(_))) => false,
                (Some(TokenKind::Tilde), Some(TokenKind::Ident(_))) => true,
                _ => break,
            };
            self.bump();
            let (method, method_span) = self.expect_ident("method name")?;
            let args = if self.at(&TokenKind::LParen) { self.parse_args()? } else { Vec::new() };
            e = Expr {
                kind: ExprKind::MethodCall { receiver: Box::new(e), method, method_span, args, modifying },
                span: self.span_from(start),
            };
        }
        Ok(e)
    }

    fn parse_args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(&TokenKind::LParen, "'('")?;
        let mut args = Vec::new();
        if !self.at(&TokenKind::RParen) {
            args.push(self.parse_expr()?);
            while self.eat(&TokenKind::Comma) {
                args.push(self.parse_expr()?);
            }
        }
        self.expect(&TokenKind::RParen, "')'")?;
        Ok(args)
    }

    fn parse_binder(&mut self) -> PResult<Expr> {
        let start = self.pos;
        match self.peek() {
            Some(TokenKind::Ident(n)) => {
                let n = n.clone();
                let span = self.bump().span;
                let kind = if n == "_" { ExprKind::Underscore } else { ExprKind::Ident(n) };
                Ok(Expr { kind, span })
            }
            Some(TokenKind::LParen) | Some(TokenKind::LBracket) => {
                let tuple = self.at(&TokenKind::LBracket);
                self.bump();
                let close = if tuple { TokenKind::RBracket } else { TokenKind::RParen };
                let mut items = Vec::new();
                if !self.at(&close) {
                    items.push(self.parse_binder_item()?);
                    while self.eat(&TokenKind::Comma) {
                        items.push(self.parse_binder_item()?);
                    }
                }
                self.expect(&close, if tuple { "']'" } else { "')'" })?;
                let kind = if tuple { ExprKind::Tuple(items) } else { ExprKind::Tensor(items) };
                Ok(Expr { kind, span: self.span_from(start) })
            }
            _ => Err(self.error("expected variable name", Some("identifier"))),
        }
    }

    fn parse_binder_item(&mut self) -> PResult<Expr> {
        if let Some(TokenKind::Keyword(kw)) = self.peek() {
            if kw.is_type() {
                return self.parse_primary();
            }
        }
        self.parse_binder()
    }

    fn parse_primary(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let Some(kind) = self.peek() else {
            return Err(self.error("expected expression", Some("expression")));
        };
        match kind {
            TokenKind::Int(text) => {
                let span = self.bump().span;
                Ok(Expr { kind: ExprKind::Int { text: text.clone(), value: parse_int_literal(text) }, span })
            }
            TokenKind::Str { value, suffix } => {
                let span = self.bump().span;
                Ok(Expr { kind: ExprKind::Str { value: value.clone(), suffix: *suffix }, span })
            }
            TokenKind::Ident(name) => {
                let name = name.clone();
                let span = self.bump().span;
                if name == "_" {
                    return Ok(Expr { kind: ExprKind::Underscore, span });
                }
                if self.at(&TokenKind::LParen) {
                    let args = self.parse_args()?;
                    return Ok(Expr {
                        kind: ExprKind::Call { func: name, func_span: span, args },
                        span: self.span_from(start),
                    });
                }
                if self.forall.contains(&name) && matches!(self.peek(), Some(TokenKind::Ident(_))) {
                    let binder = self.parse_binder()?;
                    return Ok(Expr {
                        kind: ExprKind::Decl { ty: TypeExpr::Named(name), binder: Box::new(binder) },
                        span: self.span_from(start),
                    });
                }
                Ok(Expr { kind: ExprKind::Ident(name), span })
            }
            TokenKind::Keyword(kw) if kw.is_type() => {
                let ty = self.parse_type()?;
                match self.peek() {
                    Some(TokenKind::Ident(_)) | Some(TokenKind::LParen) | Some(TokenKind::LBracket) => {
                        let binder = self.parse_binder()?;
                        Ok(Expr { kind: ExprKind::Decl { ty, binder: Box::new(binder) }, span: self.span_from(start) })
                    }
                    _ => Ok(Expr { kind: ExprKind::TypeOnly(ty), span: self.span_from(start) }),
                }
            }
            TokenKind::LParen | TokenKind::LBracket => {
                let tuple = matches!(kind, TokenKind::LBracket);
                self.bump();
                let close = if tuple { TokenKind::RBracket } else { TokenKind::RParen };
                if self.eat(&close) {
                    let kind = if tuple { ExprKind::Tuple(Vec::new()) } else { ExprKind::Unit };
                    return Ok(Expr { kind, span: self.span_from(start) });
                }
                let mut items = vec![self.parse_expr()?];
                let mut trailing = false;
                while self.eat(&TokenKind::Comma) {
                    if self.at(&close) {
                        trailing = true;
                        break;
                    }
                    items.push(self.parse_expr()?);
                }
                self.expect(&close, if tuple { "']'" } else { "')'" })?;
                let all_types = items.iter().all(|e| matches!(e.kind, ExprKind::TypeOnly(_)));
                if all_types && matches!(self.peek(), Some(TokenKind::Ident(_))) {
                    let tys = items
                        .into_iter()
                        .map(|e| match e.kind {
                            ExprKind::TypeOnly(t) => t,
                            _ => unreachable!(),
                        })
                        .collect();
                    let ty = if tuple { TypeExpr::TupleOf(tys) } else { TypeExpr::Tensor(tys) };
                    let binder = self.parse_binder()?;
                    return Ok(Expr { kind: ExprKind::Decl { ty, binder: Box::new(binder) }, span: self.span_from(start) });
                }
                let span = self.span_from(start);
                if !tuple && items.len() == 1 && !trailing {
                    let mut inner = items.pop().unwrap();
                    inner.span = span;
                    return Ok(inner);
                }
                let kind = if tuple { ExprKind::Tuple(items) } else { ExprKind::Tensor(items) };
                Ok(Expr { kind, span })
            }
            _ => Err(self.error("expected expression", Some("expression"))),
        }
    }
}

/// Parse one file's tokens. Top-level failures are returned as errors after
/// skipping to the next declaration; body failures are recovered in place.
pub fn parse(file: &SourceFile, tokens: &[Token]) -> (ParsedFile, Vec<ParseError>) {
    Parser::new(file, tokens).parse_file()
}
