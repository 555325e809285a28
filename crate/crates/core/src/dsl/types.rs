//! Static checking: types, scoping, helper arity and the no-recursion rule.

use std::collections::HashMap;

use super::ast::*;
use super::bounds::{static_bounds, Interval};
use super::diag::{codes, Diagnostic};

/// Errors only. An empty result means the program may be evaluated.
pub fn typecheck(program: &RewardProgram) -> Vec<Diagnostic> {
    let mut c = Checker::new(program);
    c.run();
    c.errors
}

/// Warnings for well-typed programs: float equality and a reward that is not
/// provably inside [-1, 1].
pub fn lint(program: &RewardProgram) -> Vec<Diagnostic> {
    let mut c = Checker::new(program);
    c.run();
    if !c.errors.is_empty() {
        return Vec::new();
    }
    let mut warnings = c.warnings;
    let bounds = static_bounds(program);
    if !bounds.within(&Interval::UNIT) {
        warnings.push(Diagnostic::warning(
            program.entry.span,
            codes::UNCLAMPED,
            format!("reward is not provably within [-1, 1] (bounds {bounds})"),
        ));
    }
    warnings
}

/// Least common type of two branches.
pub fn join(a: Type, b: Type) -> Option<Type> {
    use Type::*;
    match (a, b) {
        _ if a == b => Some(a),
        (Int, Float) | (Float, Int) => Some(Float),
        (Obj, OptObj) | (OptObj, Obj) => Some(OptObj),
        _ => None,
    }
}

pub fn assignable(from: Type, to: Type) -> bool {
    from == to || matches!((from, to), (Type::Int, Type::Float) | (Type::Obj, Type::OptObj))
}

struct Signature {
    params: Vec<Type>,
    ret: Type,
}

struct Checker<'p> {
    program: &'p RewardProgram,
    sigs: HashMap<&'p str, Signature>,
    scope: Vec<(String, Type)>,
    errors: Vec<Diagnostic>,
    warnings: Vec<Diagnostic>,
}

impl<'p> Checker<'p> {
    fn new(program: &'p RewardProgram) -> Self {
        let sigs = program
            .helpers
            .iter()
            .map(|h| (h.name.as_str(), Signature { params: h.params.iter().map(|p| p.ty).collect(), ret: h.ret }))
            .collect();
        Checker { program, sigs, scope: Vec::new(), errors: Vec::new(), warnings: Vec::new() }
    }

    fn run(&mut self) {
        self.check_recursion();
        for h in &self.program.helpers {
            self.scope = h.params.iter().map(|p| (p.name.clone(), p.ty)).collect();
            if let Some(t) = self.expr(&h.body) {
                if !assignable(t, h.ret) {
                    self.err(
                        h.body.span,
                        codes::TYPE_MISMATCH,
                        format!("helper `{}` declares `{}` but its body has type `{t}`", h.name, h.ret),
                    );
                }
            }
        }
        let entry = &self.program.entry;
        self.scope = vec![(entry.param.clone(), Type::ObjList)];
        if let Some(t) = self.expr(&entry.body) {
            if !t.is_numeric() {
                self.err(entry.body.span, codes::TYPE_MISMATCH, format!("reward must be float, found `{t}`"));
            }
        }
    }

    fn err(&mut self, span: Span, code: &str, msg: impl Into<String>) {
        self.errors.push(Diagnostic::error(span, code, msg));
    }

    fn check_recursion(&mut self) {
        let index: HashMap<&str, usize> =
            self.program.helpers.iter().enumerate().map(|(i, h)| (h.name.as_str(), i)).collect();
        let edges: Vec<Vec<usize>> = self
            .program
            .helpers
            .iter()
            .map(|h| {
                let mut out = Vec::new();
                super::parser::walk(&h.body, &mut |e| {
                    if let ExprKind::Call(Callee::Helper(n), _) = &e.kind {
                        if let Some(&j) = index.get(n.as_str()) {
                            out.push(j);
                        }
                    }
                });
                out
            })
            .collect();
        for (i, h) in self.program.helpers.iter().enumerate() {
            let mut seen = vec![false; edges.len()];
            let mut stack = edges[i].clone();
            while let Some(j) = stack.pop() {
                if !seen[j] {
                    seen[j] = true;
                    stack.extend(&edges[j]);
                }
            }
            if seen[i] {
                self.err(h.span, codes::RECURSION, format!("recursive helper `{}`", h.name));
            }
        }
    }

    fn lookup(&self, name: &str) -> Option<Type> {
        self.scope.iter().rev().find(|(n, _)| n == name).map(|(_, t)| *t)
    }

    fn with_binding<T>(&mut self, bindings: &[(String, Type)], f: impl FnOnce(&mut Self) -> T) -> T {
        let depth = self.scope.len();
        self.scope.extend(bindings.iter().cloned());
        let out = f(self);
        self.scope.truncate(depth);
        out
    }

    fn expect(&mut self, e: &Expr, want: Type, what: &str) -> Option<()> {
        let t = self.expr(e)?;
        if assignable(t, want) {
            Some(())
        } else {
            self.err(e.span, codes::TYPE_MISMATCH, format!("{what} must be `{want}`, found `{t}`"));
            None
        }
    }

    fn numeric(&mut self, e: &Expr, what: &str) -> Option<Type> {
        let t = self.expr(e)?;
        if t.is_numeric() {
            Some(t)
        } else {
            self.err(e.span, codes::TYPE_MISMATCH, format!("{what} must be numeric, found `{t}`"));
            None
        }
    }

    fn expr(&mut self, e: &Expr) -> Option<Type> {
        match &e.kind {
            ExprKind::Int(_) => Some(Type::Int),
            ExprKind::Float(_) => Some(Type::Float),
            ExprKind::Bool(_) => Some(Type::Bool),
            ExprKind::Str(_) => {
                self.err(e.span, codes::TYPE_MISMATCH, "string literals are only allowed as category names");
                None
            }
            ExprKind::Var(name) => {
                let t = self.lookup(name);
                if t.is_none() {
                    self.err(e.span, codes::UNBOUND_NAME, format!("unbound name `{name}`"));
                }
                t
            }
            ExprKind::Unary(UnOp::Neg, a) => self.numeric(a, "operand of `-`"),
            ExprKind::Unary(UnOp::Not, a) => {
                self.expect(a, Type::Bool, "operand of `not`")?;
                Some(Type::Bool)
            }
            ExprKind::Binary(op, a, b) => self.binary(*op, a, b, e.span),
            ExprKind::Field(target, field) => {
                self.expect_obj(target)?;
                match field.ty() {
                    Some(t) => Some(t),
                    None => {
                        self.err(e.span, codes::TYPE_MISMATCH, "`category` can only be compared to a string literal");
                        None
                    }
                }
            }
            ExprKind::CategoryIs { target, .. } => {
                self.expect_obj(target)?;
                Some(Type::Bool)
            }
            ExprKind::Pair(a, b) => {
                let ta = self.numeric(a, "pair component");
                let tb = self.numeric(b, "pair component");
                ta?;
                tb?;
                Some(Type::Pair)
            }
            ExprKind::If(c, a, b) => {
                let tc = self.expect(c, Type::Bool, "condition");
                let ta = self.expr(a);
                let tb = self.expr(b);
                tc?;
                self.join_branches(ta?, tb?, e.span)
            }
            ExprKind::IfLet { bindings, then, otherwise } => {
                let mut bound = Vec::new();
                let mut ok = true;
                for (name, v) in bindings {
                    match self.expr(v) {
                        Some(Type::OptObj) | Some(Type::Obj) => bound.push((name.clone(), Type::Obj)),
                        Some(t) => {
                            self.err(v.span, codes::TYPE_MISMATCH, format!("`if let` needs `obj?`, found `{t}`"));
                            ok = false;
                        }
                        None => ok = false,
                    }
                }
                let tt = if ok { self.with_binding(&bound, |c| c.expr(then)) } else { None };
                let to = self.expr(otherwise);
                self.join_branches(tt?, to?, e.span)
            }
            ExprKind::Let(name, value, body) => {
                let tv = self.expr(value)?;
                self.with_binding(&[(name.clone(), tv)], |c| c.expr(body))
            }
            ExprKind::Call(Callee::Builtin(b), args) => self.builtin(*b, args, e.span),
            ExprKind::Call(Callee::Helper(name), args) => {
                let Some(sig) = self.sigs.get(name.as_str()) else {
                    self.err(e.span, codes::UNKNOWN_FUNCTION, format!("unknown function `{name}`"));
                    return None;
                };
                let (params, ret) = (sig.params.clone(), sig.ret);
                if params.len() != args.len() {
                    self.err(
                        e.span,
                        codes::ARITY,
                        format!("`{name}` takes {} argument(s), got {}", params.len(), args.len()),
                    );
                    return None;
                }
                let mut ok = true;
                for (a, p) in args.iter().zip(params) {
                    ok &= self.expect(a, p, &format!("argument to `{name}`")).is_some();
                }
                ok.then_some(ret)
            }
            ExprKind::Binder(b) => self.binder(b, e.span),
        }
    }

    fn expect_obj(&mut self, target: &Expr) -> Option<()> {
        match self.expr(target)? {
            Type::Obj => Some(()),
            Type::OptObj => {
                self.err(
                    target.span,
                    codes::TYPE_MISMATCH,
                    "field access on `obj?`; bind it with `if let` or use `unwrap`",
                );
                None
            }
            t => {
                self.err(target.span, codes::TYPE_MISMATCH, format!("field access needs `obj`, found `{t}`"));
                None
            }
        }
    }

    fn join_branches(&mut self, a: Type, b: Type, span: Span) -> Option<Type> {
        let j = join(a, b);
        if j.is_none() {
            self.err(span, codes::TYPE_MISMATCH, format!("branches have different types `{a}` and `{b}`"));
        }
        j
    }

    fn binary(&mut self, op: BinOp, a: &Expr, b: &Expr, span: Span) -> Option<Type> {
        match op {
            BinOp::And | BinOp::Or => {
                let ta = self.expect(a, Type::Bool, &format!("operand of `{}`", op.symbol()));
                let tb = self.expect(b, Type::Bool, &format!("operand of `{}`", op.symbol()));
                ta?;
                tb?;
                Some(Type::Bool)
            }
            BinOp::Add => {
                let ta = self.expr(a);
                let tb = self.expr(b);
                let (ta, tb) = (ta?, tb?);
                if ta == Type::ObjList && tb == Type::ObjList {
                    return Some(Type::ObjList);
                }
                self.arith(op, ta, tb, span)
            }
            BinOp::Sub | BinOp::Mul | BinOp::Div => {
                let ta = self.expr(a);
                let tb = self.expr(b);
                self.arith(op, ta?, tb?, span)
            }
            BinOp::Eq | BinOp::Ne => {
                let ta = self.expr(a);
                let tb = self.expr(b);
                let (ta, tb) = (ta?, tb?);
                let comparable = (ta.is_numeric() && tb.is_numeric()) || (ta == Type::Bool && tb == Type::Bool);
                if !comparable {
                    self.err(span, codes::TYPE_MISMATCH, format!("cannot compare `{ta}` with `{tb}`"));
                    return None;
                }
                if ta == Type::Float || tb == Type::Float {
                    self.warnings.push(Diagnostic::warning(
                        span,
                        codes::FLOAT_EQUALITY,
                        format!("`{}` on floats compares exact bit values", op.symbol()),
                    ));
                }
                Some(Type::Bool)
            }
            _ => {
                let ta = self.numeric(a, "comparison operand");
                let tb = self.numeric(b, "comparison operand");
                ta?;
                tb?;
                Some(Type::Bool)
            }
        }
    }

    fn arith(&mut self, op: BinOp, ta: Type, tb: Type, span: Span) -> Option<Type> {
        if !ta.is_numeric() || !tb.is_numeric() {
            self.err(span, codes::TYPE_MISMATCH, format!("`{}` needs numbers, found `{ta}` and `{tb}`", op.symbol()));
            return None;
        }
        if op == BinOp::Div || ta == Type::Float || tb == Type::Float {
            Some(Type::Float)
        } else {
            Some(Type::Int)
        }
    }

    fn builtin(&mut self, b: Builtin, args: &[Expr], span: Span) -> Option<Type> {
        if args.len() != b.arity() {
            self.err(span, codes::ARITY, format!("`{}` takes {} argument(s), got {}", b.name(), b.arity(), args.len()));
            return None;
        }
        use Builtin::*;
        let what = format!("argument to `{}`", b.name());
        match b {
            Overlaps | CornerIn | Manhattan => {
                let x = self.expect(&args[0], Type::Obj, &what);
                let y = self.expect(&args[1], Type::Obj, &what);
                x?;
                y?;
                Some(if b == Manhattan { Type::Float } else { Type::Bool })
            }
            CenterX | CenterY | Center => {
                self.expect(&args[0], Type::Obj, &what)?;
                Some(if b == Center { Type::Pair } else { Type::Float })
            }
            Nearest => {
                let x = self.expect(&args[0], Type::Obj, &what);
                let y = self.expect(&args[1], Type::ObjList, &what);
                x?;
                y?;
                Some(Type::OptObj)
            }
            Clamp | Min | Max => {
                let mut all_int = true;
                let mut ok = true;
                for a in args {
                    match self.numeric(a, &what) {
                        Some(t) => all_int &= t == Type::Int,
                        None => ok = false,
                    }
                }
                ok.then_some(if all_int { Type::Int } else { Type::Float })
            }
            Abs => self.numeric(&args[0], &what),
            FilterCategory => {
                let x = self.expect(&args[0], Type::ObjList, &what);
                if !matches!(args[1].kind, ExprKind::Str(_)) {
                    self.err(args[1].span, codes::TYPE_MISMATCH, "`filter_category` needs a string literal category");
                    return None;
                }
                x?;
                Some(Type::ObjList)
            }
            Count => {
                self.expect(&args[0], Type::ObjList, &what)?;
                Some(Type::Int)
            }
            First | Last => {
                self.expect(&args[0], Type::ObjList, &what)?;
                Some(Type::OptObj)
            }
            IsSome | Unwrap => {
                let t = self.expr(&args[0])?;
                if t != Type::OptObj && t != Type::Obj {
                    self.err(args[0].span, codes::TYPE_MISMATCH, format!("{what} must be `obj?`, found `{t}`"));
                    return None;
                }
                Some(if b == IsSome { Type::Bool } else { Type::Obj })
            }
            Fst | Snd => {
                self.expect(&args[0], Type::Pair, &what)?;
                Some(Type::Float)
            }
        }
    }

    fn binder(&mut self, b: &Binder, span: Span) -> Option<Type> {
        let name = b.form.name();
        let list_ok = self.expect(&b.list, Type::ObjList, &format!("list of `{name}`")).is_some();
        let mut bound: Vec<(String, Type)> = b.vars.iter().map(|v| (v.clone(), Type::Obj)).collect();
        let acc_ty = match &b.acc {
            Some((acc, init)) => {
                let t = self.expr(init)?;
                bound.push((acc.clone(), t));
                Some(t)
            }
            None => None,
        };
        let body_types: Vec<Option<Type>> =
            self.with_binding(&bound, |c| b.body.iter().map(|e| c.expr(e)).collect());
        if !list_ok {
            return None;
        }
        let mut out = None;
        for (e, t) in b.body.iter().zip(&body_types) {
            let t = (*t)?;
            out = Some(t);
            use BinderForm::*;
            let bad = match b.form {
                Exists | Forall | Filter => t != Type::Bool,
                SumOver | MinOver | MaxOver | SortBy | MinBy | MaxBy => !t.is_numeric(),
                Fold | FoldPairs => !assignable(t, acc_ty.expect("fold has an accumulator")),
            };
            if bad {
                let want = match b.form {
                    Exists | Forall | Filter => "bool".to_string(),
                    Fold | FoldPairs => format!("the accumulator type `{}`", acc_ty.unwrap()),
                    _ => "numeric".to_string(),
                };
                self.err(e.span, codes::TYPE_MISMATCH, format!("body of `{name}` must be {want}, found `{t}`"));
                return None;
            }
        }
        let body_ty = out?;
        let _ = span;
        Some(match b.form {
            BinderForm::Exists | BinderForm::Forall => Type::Bool,
            BinderForm::SumOver => body_ty,
            BinderForm::MinOver | BinderForm::MaxOver => Type::Float,
            BinderForm::Filter | BinderForm::SortBy => Type::ObjList,
            BinderForm::MinBy | BinderForm::MaxBy => Type::OptObj,
            BinderForm::Fold | BinderForm::FoldPairs => acc_ty.unwrap(),
        })
    }
}
