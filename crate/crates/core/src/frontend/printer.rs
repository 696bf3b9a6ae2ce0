//! Debug pretty-printer. Output is valid input for the parser; binary
//! expressions are fully parenthesized so re-parsing yields the same tree.

use std::fmt::Write;

use super::ast::*;

pub fn print_type(ty: &TypeExpr) -> String {
    match ty {
        TypeExpr::Int => "int".into(),
        TypeExpr::Cell => "cell".into(),
        TypeExpr::Slice => "slice".into(),
        TypeExpr::Builder => "builder".into(),
        TypeExpr::Cont => "cont".into(),
        TypeExpr::Tuple => "tuple".into(),
        TypeExpr::Inferred => "var".into(),
        TypeExpr::Unit => "()".into(),
        TypeExpr::Tensor(items) => format!("({})", items.iter().map(print_type).collect::<Vec<_>>().join(", ")),
        TypeExpr::TupleOf(items) => format!("[{}]", items.iter().map(print_type).collect::<Vec<_>>().join(", ")),
        TypeExpr::Named(n) => n.clone(),
        TypeExpr::Func(a, b) => format!("({} -> {})", print_type(a), print_type(b)),
    }
}

fn print_ret_type(ty: &TypeExpr) -> String {
    match ty {
        TypeExpr::Inferred => "_".into(),
        other => print_type(other),
    }
}

pub fn print_expr(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Int { text, .. } => text.clone(),
        ExprKind::Str { value, suffix } => match suffix {
            Some(c) => format!("\"{value}\"{c}"),
            None => format!("\"{value}\""),
        },
        ExprKind::Ident(n) => n.clone(),
        ExprKind::Underscore => "_".into(),
        ExprKind::Unit => "()".into(),
        ExprKind::Unary { op, operand } => format!("{} ({})", op.as_str(), print_expr(operand)),
        ExprKind::Binary { op, lhs, rhs } => format!("({} {} {})", print_expr(lhs), op.as_str(), print_expr(rhs)),
        ExprKind::Ternary { cond, then, els } => {
            format!("({} ? {} : {})", print_expr(cond), print_expr(then), print_expr(els))
        }
        ExprKind::Assign { op, target, value } => {
            let op = op.map(|o| format!("{}=", o.as_str())).unwrap_or_else(|| "=".into());
            format!("{} {op} {}", print_expr(target), print_expr(value))
        }
        ExprKind::Call { func, args, .. } => format!("{func}({})", print_list(args)),
        ExprKind::MethodCall { receiver, method, args, modifying, .. } => {
            let sep = if *modifying { "~" } else { "." };
            format!("{}{sep}{method}({})", print_expr(receiver), print_list(args))
        }
        ExprKind::Tensor(items) => {
            if items.len() == 1 {
                format!("({},)", print_expr(&items[0]))
            } else {
                format!("({})", print_list(items))
            }
        }
        ExprKind::Tuple(items) => format!("[{}]", print_list(items)),
        ExprKind::Decl { ty, binder } => format!("{} {}", print_type(ty), print_expr(binder)),
        ExprKind::TypeOnly(ty) => print_type(ty),
    }
}

fn print_list(items: &[Expr]) -> String {
    items.iter().map(print_expr).collect::<Vec<_>>().join(", ")
}

fn print_block(b: &Block, indent: usize, out: &mut String) {
    out.push_str("{\n");
    for s in &b.stmts {
        print_stmt(s, indent + 1, out);
    }
    out.push_str(&"    ".repeat(indent));
    out.push('}');
}

fn print_stmt(s: &Stmt, indent: usize, out: &mut String) {
    let pad = "    ".repeat(indent);
    out.push_str(&pad);
    match &s.kind {
        StmtKind::VarDecl { pattern, init } => {
            out.push_str(&print_expr(pattern));
            if let Some(init) = init {
                let _ = write!(out, " = {}", print_expr(init));
            }
            out.push_str(";\n");
        }
        StmtKind::Assign { target, op, value } => {
            let op = op.map(|o| format!("{}=", o.as_str())).unwrap_or_else(|| "=".into());
            let _ = writeln!(out, "{} {op} {};", print_expr(target), print_expr(value));
        }
        StmtKind::Expr(e) => {
            let _ = writeln!(out, "{};", print_expr(e));
        }
        StmtKind::If { .. } => {
            print_if(s, indent, out);
            out.push('\n');
        }
        StmtKind::While { cond, body } => {
            let _ = write!(out, "while ({}) ", print_expr(cond));
            print_block(body, indent, out);
            out.push('\n');
        }
        StmtKind::Repeat { count, body } => {
            let _ = write!(out, "repeat ({}) ", print_expr(count));
            print_block(body, indent, out);
            out.push('\n');
        }
        StmtKind::DoUntil { body, cond } => {
            out.push_str("do ");
            print_block(body, indent, out);
            let _ = writeln!(out, " until ({});", print_expr(cond));
        }
        StmtKind::Return(e) => {
            let _ = writeln!(out, "return {};", print_expr(e));
        }
        StmtKind::Block(b) => {
            print_block(b, indent, out);
            out.push('\n');
        }
        StmtKind::TryCatch { body, catch_args, handler } => {
            out.push_str("try ");
            print_block(body, indent, out);
            let _ = write!(out, " catch ({}) ", print_list(catch_args));
            print_block(handler, indent, out);
            out.push('\n');
        }
        StmtKind::Opaque => out.push_str(";; <opaque>\n"),
    }
}

fn print_if(s: &Stmt, indent: usize, out: &mut String) {
    let StmtKind::If { cond, negated, then_block, else_branch } = &s.kind else { return };
    let kw = if *negated { "ifnot" } else { "if" };
    let _ = write!(out, "{kw} ({}) ", print_expr(cond));
    print_block(then_block, indent, out);
    match else_branch.as_deref() {
        None => {}
        Some(Stmt { kind: StmtKind::Block(b), .. }) => {
            out.push_str(" else ");
            print_block(b, indent, out);
        }
        Some(nested) => {
            out.push_str(" else ");
            print_if(nested, indent, out);
        }
    }
}

pub fn print_function(f: &FunctionDecl) -> String {
    let mut out = String::new();
    if !f.forall.is_empty() {
        let _ = write!(out, "forall {} -> ", f.forall.join(", "));
    }
    let params: Vec<String> = f
        .params
        .iter()
        .map(|p| match (&p.name, &p.ty) {
            (Some(n), TypeExpr::Inferred) => n.clone(),
            (Some(n), ty) => format!("{} {n}", print_type(ty)),
            (None, ty) => print_type(ty),
        })
        .collect();
    let _ = write!(out, "{} {}({})", print_ret_type(&f.return_type), f.name, params.join(", "));
    let m = &f.modifiers;
    if m.impure {
        out.push_str(" impure");
    }
    if m.inline {
        out.push_str(" inline");
    }
    if m.inline_ref {
        out.push_str(" inline_ref");
    }
    match m.method_id {
        Some(Some(id)) => {
            let _ = write!(out, " method_id({id})");
        }
        Some(None) => out.push_str(" method_id"),
        None => {}
    }
    match &f.body {
        FunctionBody::Block(b) => {
            out.push(' ');
            print_block(b, 0, &mut out);
            out.push('\n');
        }
        FunctionBody::Asm => out.push_str(" asm \"NOP\";\n"),
        FunctionBody::None => out.push_str(";\n"),
    }
    out
}

/// Print every declaration of a parsed file.
pub fn print_file(p: &ParsedFile) -> String {
    let mut out = String::new();
    for i in &p.includes {
        let _ = writeln!(out, "#include \"{}\";", i.path);
    }
    for g in &p.globals {
        let _ = writeln!(out, "global {} {};", print_type(&g.ty), g.name);
    }
    for c in &p.constants {
        let _ = writeln!(out, "const {} {} = {};", print_type(&c.ty), c.name, print_expr(&c.value));
    }
    for f in &p.functions {
        out.push_str(&print_function(f));
    }
    out
}
