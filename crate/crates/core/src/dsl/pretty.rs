//! Canonical formatting. `parse(pretty_print(p)) == p` for every parsed
//! program; the printer only adds the parentheses the grammar needs.

use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "    ";

pub fn pretty_print(program: &RewardProgram) -> String {
    let mut out = String::new();
    for h in &program.helpers {
        write_doc(&mut out, &h.doc);
        let params: Vec<String> = h.params.iter().map(|p| format!("{}: {}", p.name, p.ty)).collect();
        let head = format!("fn {}({}) -> {}:", h.name, params.join(", "), h.ret);
        write_item(&mut out, &head, &h.body);
        out.push('\n');
    }
    write_doc(&mut out, &program.entry.doc);
    let head = format!("reward({}):", program.entry.param);
    write_item(&mut out, &head, &program.entry.body);
    out
}

fn write_doc(out: &mut String, doc: &[String]) {
    for line in doc {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            let _ = writeln!(out, "# {line}");
        }
    }
}

fn write_item(out: &mut String, head: &str, body: &Expr) {
    let text = expr(body, 1);
    if text.contains('\n') {
        let _ = writeln!(out, "{head}\n{INDENT}{text}");
    } else {
        let _ = writeln!(out, "{head} {text}");
    }
}

/// Binding levels used to decide on parentheses (`or` is 1, `and` 2, the
/// arithmetic levels come from `BinOp::precedence`).
const LVL_OPEN: u8 = 0; // let / if: extend as far right as possible
const LVL_NOT: u8 = 3;
const LVL_CMP: u8 = 4;
const LVL_NEG: u8 = 7;
const LVL_POSTFIX: u8 = 8;
const LVL_ATOM: u8 = 9;

fn level(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Let(..) | ExprKind::If(..) | ExprKind::IfLet { .. } => LVL_OPEN,
        ExprKind::Binary(op, _, _) => op.precedence(),
        ExprKind::CategoryIs { .. } => LVL_CMP,
        ExprKind::Unary(UnOp::Not, _) => LVL_NOT,
        ExprKind::Unary(UnOp::Neg, _) => LVL_NEG,
        ExprKind::Int(i) if *i < 0 => LVL_NEG,
        ExprKind::Float(f) if f.is_sign_negative() => LVL_NEG,
        ExprKind::Field(..) => LVL_POSTFIX,
        _ => LVL_ATOM,
    }
}

fn float(f: f64) -> String {
    let s = format!("{f:?}");
    // Debug output is always re-lexable as a float: it keeps a `.` or an
    // exponent.
    debug_assert!(s.contains('.') || s.contains('e'), "{s}");
    s
}

/// Prints `e`, parenthesised unless its level is at least `min`.
fn operand(e: &Expr, min: u8, depth: usize) -> String {
    let s = expr(e, depth);
    if level(e) >= min {
        s
    } else {
        format!("({s})")
    }
}

fn indent(depth: usize) -> String {
    INDENT.repeat(depth)
}

fn expr(e: &Expr, depth: usize) -> String {
    match &e.kind {
        ExprKind::Int(i) => i.to_string(),
        ExprKind::Float(f) => float(*f),
        ExprKind::Bool(b) => b.to_string(),
        ExprKind::Str(s) => format!("\"{s}\""),
        ExprKind::Var(v) => v.clone(),
        ExprKind::Unary(UnOp::Not, a) => format!("not {}", operand(a, LVL_NOT, depth)),
        ExprKind::Unary(UnOp::Neg, a) => {
            // A bare literal would be folded into a negative literal.
            let literal = matches!(a.kind, ExprKind::Int(_) | ExprKind::Float(_));
            let inner = operand(a, LVL_NEG, depth);
            if literal && !inner.starts_with('(') {
                format!("-({inner})")
            } else {
                format!("-{inner}")
            }
        }
        ExprKind::Binary(op, a, b) => {
            let p = op.precedence();
            let (lmin, rmin) = if op.is_comparison() { (p + 1, p + 1) } else { (p, p + 1) };
            format!("{} {} {}", operand(a, lmin, depth), op.symbol(), operand(b, rmin, depth))
        }
        ExprKind::Field(t, f) => format!("{}.{}", operand(t, LVL_POSTFIX, depth), f.name()),
        ExprKind::CategoryIs { target, name, negated } => format!(
            "{}.category {} \"{name}\"",
            operand(target, LVL_POSTFIX, depth),
            if *negated { "!=" } else { "==" }
        ),
        ExprKind::Pair(a, b) => format!("({}, {})", expr(a, depth), expr(b, depth)),
        ExprKind::If(c, a, b) => {
            // `if let` would start an optional binding.
            let cond = if matches!(c.kind, ExprKind::Let(..)) { format!("({})", expr(c, depth)) } else { expr(c, depth) };
            format!("if {cond} then {} else {}", expr(a, depth), expr(b, depth))
        }
        ExprKind::IfLet { bindings, then, otherwise } => {
            let bs: Vec<String> = bindings.iter().map(|(n, v)| format!("{n} = {}", expr(v, depth))).collect();
            format!("if let {} then {} else {}", bs.join(", "), expr(then, depth), expr(otherwise, depth))
        }
        ExprKind::Let(name, value, body) => {
            format!("let {name} = {};\n{}{}", expr(value, depth + 1), indent(depth), expr(body, depth))
        }
        ExprKind::Call(callee, args) => {
            let a: Vec<String> = args.iter().map(|x| expr(x, depth)).collect();
            format!("{}({})", callee.name(), a.join(", "))
        }
        ExprKind::Binder(b) => {
            let mut s = format!("{}({} in {}", b.form.name(), b.vars.join(", "), expr(&b.list, depth));
            if let Some((acc, init)) = &b.acc {
                let _ = write!(s, ", {acc} = {}", expr(init, depth));
            }
            let body: Vec<String> = b.body.iter().map(|x| expr(x, depth)).collect();
            let _ = write!(s, ": {})", body.join(", "));
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    fn roundtrip(src: &str) -> String {
        let p = parse(src).unwrap();
        let printed = pretty_print(&p);
        let q = parse(&printed).unwrap_or_else(|e| panic!("{printed}\n{e:?}"));
        assert_eq!(p, q, "{printed}");
        printed
    }

    #[test]
    fn minimal_is_one_line() {
        assert_eq!(roundtrip("reward(objects):\n   0.0"), "reward(objects): 0.0\n");
    }

    #[test]
    fn parentheses_survive() {
        roundtrip("reward(o): (1 + 2) * 3 - (4 - 5) - -6");
        roundtrip("reward(o): if not (true and false) == false then 1.0 else 0.0");
        roundtrip("reward(o): -(1.5) + -(count(o)) + (if true then 1 else 2)");
        roundtrip("reward(o): fst((1, 2)) + (let a = 1; a) * 2");
        roundtrip("reward(o): sum_over(x in o + o: if x.category != \"Car\" then x.y else 0.0)");
        roundtrip("reward(o): if let a = first(o), b = last(o) then manhattan(a, b) else 1e-7");
    }

    #[test]
    fn docs_are_kept() {
        let out = roundtrip("# adds\n#\n#   indented\nfn f(a: float) -> float: a + 1.0\n\nreward(o): f(1.0)");
        assert!(out.starts_with("# adds\n#\n#   indented\nfn f"));
    }
}
