//! Recursive-descent parser for reward programs.
//!
//! ```text
//! program  := item*                      (exactly one reward entry)
//! item     := "fn" NAME "(" params ")" "->" type ":" expr
//!           | "reward" "(" NAME ")" ":" expr
//! expr     := "let" NAME "=" expr ";" expr
//!           | "if" expr "then" expr "else" expr
//!           | "if" "let" NAME "=" expr ("," NAME "=" expr)* "then" expr "else" expr
//!           | or
//! or       := and ("or" and)*
//! and      := not ("and" not)*
//! not      := "not" not | cmp
//! cmp      := sum (CMP sum)?             (comparisons do not chain)
//! sum      := term (("+" | "-") term)*
//! term     := unary (("*" | "/") unary)*
//! unary    := "-" unary | postfix
//! postfix  := primary ("." FIELD)*
//! primary  := INT | FLOAT | STRING | "true" | "false" | NAME | call
//!           | "(" expr ")" | "(" expr "," expr ")" | let | if
//! call     := NAME "(" args ")" | FORM "(" NAME ("," NAME)* "in" expr
//!             ("," NAME "=" expr)? ":" expr ("," expr)* ")"
//! ```

use std::collections::{HashMap, HashSet};

use super::ast::*;
use super::diag::{codes, Diagnostic};
use super::lexer::{lex, Tok, Token};

type PResult<T> = Result<T, Diagnostic>;

/// Parses and resolves function names. Type errors are left to
/// [`super::typecheck`].
pub fn parse(source: &str) -> Result<RewardProgram, Vec<Diagnostic>> {
    let lexed = lex(source).map_err(|d| vec![d])?;
    let comments: HashMap<u32, String> = lexed.comments.into_iter().map(|c| (c.line, c.text)).collect();
    let mut p = Parser { tokens: lexed.tokens, pos: 0, comments };
    let (helpers, entry) = p.program().map_err(|d| vec![d])?;
    let program = RewardProgram {
        helpers,
        entry,
        source_text: source.to_string(),
        origin: ProgramOrigin::default(),
    };
    let diags = resolve(&program);
    if diags.is_empty() {
        Ok(program)
    } else {
        Err(diags)
    }
}

/// Items of a source text that need not form a complete program, e.g. a
/// reply that only defines helpers. Names are not resolved.
#[derive(Debug, Clone)]
pub struct Fragment {
    pub helpers: Vec<Helper>,
    pub entry: Option<RewardEntry>,
}

pub fn parse_fragment(source: &str) -> Result<Fragment, Vec<Diagnostic>> {
    let lexed = lex(source).map_err(|d| vec![d])?;
    let comments: HashMap<u32, String> = lexed.comments.into_iter().map(|c| (c.line, c.text)).collect();
    let mut p = Parser { tokens: lexed.tokens, pos: 0, comments };
    let (helpers, entry) = p.items().map_err(|d| vec![d])?;
    Ok(Fragment { helpers, entry })
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    comments: HashMap<u32, String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, context: &str) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("expected {} {}", tok.describe(), context)))
        }
    }

    fn unexpected(&self, what: &str) -> Diagnostic {
        Diagnostic::error(self.span(), codes::SYNTAX, format!("{what}, found {}", self.peek().describe()))
    }

    fn ident(&mut self, context: &str) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().span;
                Ok((name, span))
            }
            _ => Err(self.unexpected(&format!("expected a name {context}"))),
        }
    }

    fn doc_above(&self, line: u32) -> Vec<String> {
        let mut lines = Vec::new();
        let mut l = line;
        while l > 1 {
            l -= 1;
            match self.comments.get(&l) {
                Some(text) => lines.push(text.clone()),
                None => break,
            }
        }
        lines.reverse();
        lines
    }

    fn program(&mut self) -> PResult<(Vec<Helper>, RewardEntry)> {
        let (helpers, entry) = self.items()?;
        let entry = entry.ok_or_else(|| {
            Diagnostic::error(self.span(), codes::ENTRY, "missing reward entry point `reward(objects): ...`")
        })?;
        Ok((helpers, entry))
    }

    fn items(&mut self) -> PResult<(Vec<Helper>, Option<RewardEntry>)> {
        let mut helpers = Vec::new();
        let mut entry: Option<RewardEntry> = None;
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::Fn => helpers.push(self.helper()?),
                Tok::Ident(name) if name == "reward" && *self.peek_at(1) == Tok::LParen => {
                    let start = self.span();
                    let e = self.reward_entry()?;
                    if entry.is_some() {
                        return Err(Diagnostic::error(start, codes::DUPLICATE, "reward entry point defined twice"));
                    }
                    entry = Some(e);
                }
                _ => return Err(self.unexpected("expected `fn` or `reward(...)` at top level")),
            }
        }
        Ok((helpers, entry))
    }

    fn helper(&mut self) -> PResult<Helper> {
        let start = self.expect(Tok::Fn, "")?;
        let doc = self.doc_above(start.line);
        let (name, _) = self.ident("after `fn`")?;
        self.expect(Tok::LParen, "after the helper name")?;
        let mut params = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                let (pname, _) = self.ident("for a parameter")?;
                self.expect(Tok::Colon, "after the parameter name")?;
                let ty = self.ty()?;
                params.push(Param { name: pname, ty });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "to close the parameter list")?;
        self.expect(Tok::Arrow, "before the return type")?;
        let ret = self.ty()?;
        self.expect(Tok::Colon, "before the helper body")?;
        let body = self.expr()?;
        let span = start.to(body.span);
        Ok(Helper { name, params, ret, body, doc, span })
    }

    fn reward_entry(&mut self) -> PResult<RewardEntry> {
        let start = self.span();
        let doc = self.doc_above(start.line);
        self.bump();
        self.expect(Tok::LParen, "after `reward`")?;
        let (param, _) = self.ident("for the object list")?;
        self.expect(Tok::RParen, "after the object list name")?;
        self.expect(Tok::Colon, "before the reward body")?;
        let body = self.expr()?;
        let span = start.to(body.span);
        Ok(RewardEntry { param, body, doc, span })
    }

    fn ty(&mut self) -> PResult<Type> {
        let (name, span) = self.ident("for a type")?;
        let ty = Type::from_keyword(&name)
            .ok_or_else(|| Diagnostic::error(span, codes::SYNTAX, format!("unknown type `{name}`")))?;
        if self.eat(&Tok::Question) {
            if ty != Type::Obj {
                return Err(Diagnostic::error(span, codes::SYNTAX, "only `obj?` may be optional"));
            }
            return Ok(Type::OptObj);
        }
        Ok(ty)
    }

    fn expr(&mut self) -> PResult<Expr> {
        match self.peek() {
            Tok::Let => self.let_expr(),
            Tok::If => self.if_expr(),
            _ => self.or_expr(),
        }
    }

    fn let_expr(&mut self) -> PResult<Expr> {
        let start = self.expect(Tok::Let, "")?;
        let (name, _) = self.ident("after `let`")?;
        self.expect(Tok::Assign, "in let binding")?;
        let value = self.expr()?;
        self.expect(Tok::Semi, "after the let value")?;
        let body = self.expr()?;
        let span = start.to(body.span);
        Ok(Expr::new(ExprKind::Let(name, Box::new(value), Box::new(body)), span))
    }

    fn if_expr(&mut self) -> PResult<Expr> {
        let start = self.expect(Tok::If, "")?;
        if self.eat(&Tok::Let) {
            let mut bindings = Vec::new();
            loop {
                let (name, _) = self.ident("after `if let`")?;
                self.expect(Tok::Assign, "in `if let` binding")?;
                let value = self.expr()?;
                bindings.push((name, value));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::Then, "after `if let` bindings")?;
            let then = self.expr()?;
            self.expect(Tok::Else, "after the `then` branch")?;
            let otherwise = self.expr()?;
            let span = start.to(otherwise.span);
            return Ok(Expr::new(
                ExprKind::IfLet { bindings, then: Box::new(then), otherwise: Box::new(otherwise) },
                span,
            ));
        }
        let cond = self.expr()?;
        self.expect(Tok::Then, "after the condition")?;
        let then = self.expr()?;
        self.expect(Tok::Else, "after the `then` branch")?;
        let otherwise = self.expr()?;
        let span = start.to(otherwise.span);
        Ok(Expr::new(ExprKind::If(Box::new(cond), Box::new(then), Box::new(otherwise)), span))
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_expr()?;
        while self.eat(&Tok::Or) {
            let rhs = self.and_expr()?;
            lhs = binary(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.not_expr()?;
        while self.eat(&Tok::And) {
            let rhs = self.not_expr()?;
            lhs = binary(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Not {
            let start = self.bump().span;
            let inner = self.not_expr()?;
            let span = start.to(inner.span);
            return Ok(Expr::new(ExprKind::Unary(UnOp::Not, Box::new(inner)), span));
        }
        self.cmp_expr()
    }

    fn cmp_op(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::EqEq => BinOp::Eq,
            Tok::NotEq => BinOp::Ne,
            _ => return None,
        })
    }

    fn cmp_expr(&mut self) -> PResult<Expr> {
        let lhs = self.sum_expr()?;
        let Some(op) = self.cmp_op() else { return Ok(lhs) };
        self.bump();
        let rhs = self.sum_expr()?;
        if self.cmp_op().is_some() {
            return Err(Diagnostic::error(
                self.span(),
                codes::SYNTAX,
                "comparisons do not chain; combine them with `and`",
            ));
        }
        if matches!(op, BinOp::Eq | BinOp::Ne) {
            if let (ExprKind::Field(target, Field::Category), ExprKind::Str(name)) = (&lhs.kind, &rhs.kind) {
                let span = lhs.span.to(rhs.span);
                return Ok(Expr::new(
                    ExprKind::CategoryIs { target: target.clone(), name: name.clone(), negated: op == BinOp::Ne },
                    span,
                ));
            }
        }
        Ok(binary(op, lhs, rhs))
    }

    fn sum_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term_expr()?;
            lhs = binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.unary_expr()?;
            lhs = binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary_expr(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Minus {
            let start = self.bump().span;
            // Negative literals are folded so that printing them round-trips.
            match self.peek().clone() {
                Tok::Int(i) => {
                    let lit = self.bump().span;
                    let is_field_access = *self.peek() == Tok::Dot;
                    if !is_field_access {
                        return Ok(Expr::new(ExprKind::Int(-i), start.to(lit)));
                    }
                    self.pos -= 1;
                }
                Tok::Float(f) => {
                    let lit = self.bump().span;
                    if *self.peek() != Tok::Dot {
                        return Ok(Expr::new(ExprKind::Float(-f), start.to(lit)));
                    }
                    self.pos -= 1;
                }
                _ => {}
            }
            let inner = self.unary_expr()?;
            let span = start.to(inner.span);
            return Ok(Expr::new(ExprKind::Unary(UnOp::Neg, Box::new(inner)), span));
        }
        self.postfix_expr()
    }

    fn postfix_expr(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        while *self.peek() == Tok::Dot {
            self.bump();
            let (name, span) = self.ident("after `.`")?;
            let field = Field::from_name(&name).ok_or_else(|| {
                Diagnostic::error(span, codes::UNKNOWN_FIELD, format!("unknown field `{name}`"))
            })?;
            let full = e.span.to(span);
            e = Expr::new(ExprKind::Field(Box::new(e), field), full);
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(Expr::new(ExprKind::Int(i), span))
            }
            Tok::Float(f) => {
                self.bump();
                Ok(Expr::new(ExprKind::Float(f), span))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Expr::new(ExprKind::Str(s), span))
            }
            Tok::True => {
                self.bump();
                Ok(Expr::new(ExprKind::Bool(true), span))
            }
            Tok::False => {
                self.bump();
                Ok(Expr::new(ExprKind::Bool(false), span))
            }
            Tok::Let => self.let_expr(),
            Tok::If => self.if_expr(),
            Tok::LParen => {
                self.bump();
                let first = self.expr()?;
                if self.eat(&Tok::Comma) {
                    let second = self.expr()?;
                    let end = self.expect(Tok::RParen, "to close the pair")?;
                    return Ok(Expr::new(ExprKind::Pair(Box::new(first), Box::new(second)), span.to(end)));
                }
                let end = self.expect(Tok::RParen, "to close the parenthesis")?;
                Ok(Expr { kind: first.kind, span: span.to(end) })
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    if let Some(form) = BinderForm::from_name(&name) {
                        return self.binder(form, span);
                    }
                    return self.call(name, span);
                }
                Ok(Expr::new(ExprKind::Var(name), span))
            }
            _ => Err(self.unexpected("expected an expression")),
        }
    }

    fn call(&mut self, name: String, start: Span) -> PResult<Expr> {
        self.expect(Tok::LParen, "")?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                args.push(self.expr()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        let end = self.expect(Tok::RParen, "to close the argument list")?;
        let callee = match Builtin::from_name(&name) {
            Some(b) => Callee::Builtin(b),
            None => Callee::Helper(name),
        };
        Ok(Expr::new(ExprKind::Call(callee, args), start.to(end)))
    }

    fn binder(&mut self, form: BinderForm, start: Span) -> PResult<Expr> {
        self.expect(Tok::LParen, "")?;
        let mut vars = Vec::new();
        loop {
            let (v, _) = self.ident(&format!("for the `{}` loop variable", form.name()))?;
            vars.push(v);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        if vars.len() != form.var_count() {
            return Err(Diagnostic::error(
                self.prev_span(),
                codes::SYNTAX,
                format!("`{}` binds {} loop variable(s), got {}", form.name(), form.var_count(), vars.len()),
            ));
        }
        self.expect(Tok::In, "after the loop variable")?;
        let list = self.expr()?;
        let acc = if form.has_accumulator() {
            self.expect(Tok::Comma, "before the accumulator")?;
            let (name, _) = self.ident("for the accumulator")?;
            self.expect(Tok::Assign, "after the accumulator name")?;
            let init = self.expr()?;
            Some((name, Box::new(init)))
        } else {
            None
        };
        self.expect(Tok::Colon, &format!("before the `{}` body", form.name()))?;
        let mut body = vec![self.expr()?];
        if form == BinderForm::SortBy {
            while self.eat(&Tok::Comma) {
                body.push(self.expr()?);
            }
        }
        let end = self.expect(Tok::RParen, &format!("to close `{}`", form.name()))?;
        Ok(Expr::new(
            ExprKind::Binder(Binder { form, vars, list: Box::new(list), acc, body }),
            start.to(end),
        ))
    }
}

fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
    let span = lhs.span.to(rhs.span);
    Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span)
}

/// Checks that every called helper exists and that helper names are unique
/// and do not shadow builtins.
fn resolve(program: &RewardProgram) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut names = HashSet::new();
    for h in &program.helpers {
        if Builtin::from_name(&h.name).is_some() || BinderForm::from_name(&h.name).is_some() {
            diags.push(Diagnostic::error(h.span, codes::DUPLICATE, format!("helper `{}` shadows a builtin", h.name)));
        } else if !names.insert(h.name.as_str()) {
            diags.push(Diagnostic::error(h.span, codes::DUPLICATE, format!("helper `{}` defined twice", h.name)));
        }
    }
    let mut check = |e: &Expr| {
        if let ExprKind::Call(Callee::Helper(name), _) = &e.kind {
            if !names.contains(name.as_str()) {
                diags.push(Diagnostic::error(e.span, codes::UNKNOWN_FUNCTION, format!("unknown function `{name}`")));
            }
        }
    };
    for h in &program.helpers {
        walk(&h.body, &mut check);
    }
    walk(&program.entry.body, &mut check);
    diags
}

/// Pre-order traversal.
pub fn walk<'a>(e: &'a Expr, f: &mut impl FnMut(&'a Expr)) {
    f(e);
    match &e.kind {
        ExprKind::Int(_) | ExprKind::Float(_) | ExprKind::Bool(_) | ExprKind::Str(_) | ExprKind::Var(_) => {}
        ExprKind::Unary(_, a) | ExprKind::Field(a, _) => walk(a, f),
        ExprKind::CategoryIs { target, .. } => walk(target, f),
        ExprKind::Binary(_, a, b) | ExprKind::Pair(a, b) | ExprKind::Let(_, a, b) => {
            walk(a, f);
            walk(b, f);
        }
        ExprKind::If(c, a, b) => {
            walk(c, f);
            walk(a, f);
            walk(b, f);
        }
        ExprKind::IfLet { bindings, then, otherwise } => {
            for (_, v) in bindings {
                walk(v, f);
            }
            walk(then, f);
            walk(otherwise, f);
        }
        ExprKind::Call(_, args) => {
            for a in args {
                walk(a, f);
            }
        }
        ExprKind::Binder(b) => {
            walk(&b.list, f);
            if let Some((_, init)) = &b.acc {
                walk(init, f);
            }
            for k in &b.body {
                walk(k, f);
            }
        }
    }
}
