//! Interval analysis of reward programs.
//!
//! Every numeric subexpression is over-approximated by a closed interval
//! whose ends may be infinite. Object fields are unconstrained, so anything
//! read from an object starts at the full line; it is the final clamp that
//! makes a reward provably bounded.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ast::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const FULL: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };
    pub const UNIT: Interval = Interval { lo: -1.0, hi: 1.0 };
    pub const NON_NEGATIVE: Interval = Interval { lo: 0.0, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Self {
        if lo.is_nan() || hi.is_nan() {
            return Interval::FULL;
        }
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Interval::new(v, v)
    }

    pub fn within(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn union(self, o: Interval) -> Interval {
        Interval::new(self.lo.min(o.lo), self.hi.max(o.hi))
    }

    pub fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }

    pub fn add(self, o: Interval) -> Interval {
        Interval::new(self.lo + o.lo, self.hi + o.hi)
    }

    pub fn sub(self, o: Interval) -> Interval {
        self.add(o.neg())
    }

    pub fn mul(self, o: Interval) -> Interval {
        // 0 * inf is taken as 0: the concrete operands are always finite.
        let m = |a: f64, b: f64| if a == 0.0 || b == 0.0 { 0.0 } else { a * b };
        let c = [m(self.lo, o.lo), m(self.lo, o.hi), m(self.hi, o.lo), m(self.hi, o.hi)];
        Interval::new(
            c.iter().copied().fold(f64::INFINITY, f64::min),
            c.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    }

    /// A divisor straddling zero gives no information. Division by exactly
    /// zero traps, so only non-zero divisors reach the result.
    pub fn div(self, o: Interval) -> Interval {
        if o.lo < 0.0 && o.hi > 0.0 {
            return Interval::FULL;
        }
        if o.lo == 0.0 && o.hi == 0.0 {
            return Interval::FULL;
        }
        let recip = if o.lo >= 0.0 {
            Interval::new(if o.hi == f64::INFINITY { 0.0 } else { 1.0 / o.hi }, if o.lo == 0.0 { f64::INFINITY } else { 1.0 / o.lo })
        } else {
            Interval::new(if o.hi == 0.0 { f64::NEG_INFINITY } else { 1.0 / o.hi }, if o.lo == f64::NEG_INFINITY { 0.0 } else { 1.0 / o.lo })
        };
        self.mul(recip)
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            self.neg()
        } else {
            Interval::new(0.0, (-self.lo).max(self.hi))
        }
    }

    pub fn min(self, o: Interval) -> Interval {
        Interval::new(self.lo.min(o.lo), self.hi.min(o.hi))
    }

    pub fn max(self, o: Interval) -> Interval {
        Interval::new(self.lo.max(o.lo), self.hi.max(o.hi))
    }

    pub fn clamp(self, lo: Interval, hi: Interval) -> Interval {
        // x < lo -> lo, x > hi -> hi, otherwise x
        let mut out: Option<Interval> = None;
        let mut add = |i: Interval| out = Some(out.map_or(i, |o| o.union(i)));
        if self.lo < lo.hi {
            add(lo);
        }
        if self.hi > hi.lo {
            add(hi);
        }
        let lo_cut = self.lo.max(lo.lo);
        let hi_cut = self.hi.min(hi.hi);
        if lo_cut <= hi_cut {
            add(Interval::new(lo_cut, hi_cut));
        }
        out.unwrap_or_else(|| lo.union(hi))
    }

    /// Sum of an unknown number of terms drawn from `self`.
    pub fn repeated_sum(self) -> Interval {
        Interval::new(
            if self.lo < 0.0 { f64::NEG_INFINITY } else { 0.0 },
            if self.hi > 0.0 { f64::INFINITY } else { 0.0 },
        )
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let end = |v: f64| {
            if v == f64::INFINITY {
                "inf".to_string()
            } else if v == f64::NEG_INFINITY {
                "-inf".to_string()
            } else {
                format!("{v}")
            }
        };
        write!(f, "[{}, {}]", end(self.lo), end(self.hi))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Bound {
    Num(f64),
    Sentinel(String),
}

fn to_bound(v: f64) -> Bound {
    if v == f64::INFINITY {
        Bound::Sentinel("inf".into())
    } else if v == f64::NEG_INFINITY {
        Bound::Sentinel("-inf".into())
    } else {
        Bound::Num(v)
    }
}

fn from_bound(b: Bound) -> Result<f64, String> {
    match b {
        Bound::Num(v) => Ok(v),
        Bound::Sentinel(s) if s == "inf" => Ok(f64::INFINITY),
        Bound::Sentinel(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
        Bound::Sentinel(s) => Err(format!("bad interval bound `{s}`")),
    }
}

/// `{"lo": .., "hi": ..}` with `"inf"`/`"-inf"` for infinite ends.
impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw {
            lo: Bound,
            hi: Bound,
        }
        Raw { lo: to_bound(self.lo), hi: to_bound(self.hi) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            lo: Bound,
            hi: Bound,
        }
        let raw = Raw::deserialize(d)?;
        let lo = from_bound(raw.lo).map_err(serde::de::Error::custom)?;
        let hi = from_bound(raw.hi).map_err(serde::de::Error::custom)?;
        if lo > hi {
            return Err(serde::de::Error::custom("lo > hi"));
        }
        Ok(Interval { lo, hi })
    }
}

/// Three-valued truth for conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Truth {
    True,
    False,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Abs {
    Num(Interval),
    Pair(Interval, Interval),
    Bool(Truth),
    /// Objects, lists, optionals: nothing numeric to track.
    Opaque,
}

impl Abs {
    fn num(self) -> Interval {
        match self {
            Abs::Num(i) => i,
            _ => Interval::FULL,
        }
    }

    fn join(self, o: Abs) -> Abs {
        match (self, o) {
            (Abs::Num(a), Abs::Num(b)) => Abs::Num(a.union(b)),
            (Abs::Pair(a, b), Abs::Pair(c, d)) => Abs::Pair(a.union(c), b.union(d)),
            (Abs::Bool(a), Abs::Bool(b)) => Abs::Bool(if a == b { a } else { Truth::Unknown }),
            _ => Abs::Opaque,
        }
    }

    /// Pushes every end that moved since `prev` out to infinity.
    fn widen(prev: Abs, next: Abs) -> Abs {
        let w = |p: Interval, n: Interval| {
            Interval::new(
                if n.lo < p.lo { f64::NEG_INFINITY } else { p.lo },
                if n.hi > p.hi { f64::INFINITY } else { p.hi },
            )
        };
        match (prev, next) {
            (Abs::Num(p), Abs::Num(n)) => Abs::Num(w(p, n)),
            (Abs::Pair(p1, p2), Abs::Pair(n1, n2)) => Abs::Pair(w(p1, n1), w(p2, n2)),
            (Abs::Bool(a), Abs::Bool(b)) if a == b => Abs::Bool(a),
            (Abs::Bool(_), Abs::Bool(_)) => Abs::Bool(Truth::Unknown),
            _ => Abs::Opaque,
        }
    }
}

/// Sound over-approximation of the rewards `program` can return.
///
/// Traps score 0.0, so a program that may trap includes 0 in its range.
pub fn static_bounds(program: &RewardProgram) -> Interval {
    let helpers: HashMap<&str, &Helper> = program.helpers.iter().map(|h| (h.name.as_str(), h)).collect();
    let mut a = Analyzer { helpers, env: vec![(program.entry.param.clone(), Abs::Opaque)], depth: 0 };
    let out = a.expr(&program.entry.body).num();
    // Overflow and non-finite results can only come from unbounded ranges.
    let unbounded = out.lo.is_infinite() || out.hi.is_infinite();
    if unbounded || may_trap(program) {
        out.union(Interval::point(0.0))
    } else {
        out
    }
}

/// Conservative syntactic check for operations that can trap.
fn may_trap(program: &RewardProgram) -> bool {
    let mut found = false;
    let mut check = |e: &Expr| match &e.kind {
        ExprKind::Binary(BinOp::Div, _, _) => found = true,
        ExprKind::Call(Callee::Builtin(Builtin::Unwrap), _) => found = true,
        ExprKind::Field(_, f) if matches!(f, Field::Value | Field::PrevValue | Field::ValueDiff | Field::Orientation) => {
            found = true
        }
        _ => {}
    };
    for h in &program.helpers {
        super::parser::walk(&h.body, &mut check);
    }
    super::parser::walk(&program.entry.body, &mut check);
    found
}

struct Analyzer<'p> {
    helpers: HashMap<&'p str, &'p Helper>,
    env: Vec<(String, Abs)>,
    depth: usize,
}

impl<'p> Analyzer<'p> {
    fn lookup(&self, name: &str) -> Abs {
        self.env.iter().rev().find(|(n, _)| n == name).map(|(_, v)| *v).unwrap_or(Abs::Opaque)
    }

    fn scoped(&mut self, bindings: Vec<(String, Abs)>, f: impl FnOnce(&mut Self) -> Abs) -> Abs {
        let depth = self.env.len();
        self.env.extend(bindings);
        let out = f(self);
        self.env.truncate(depth);
        out
    }

    fn truth(&mut self, e: &Expr) -> Truth {
        match self.expr(e) {
            Abs::Bool(t) => t,
            _ => Truth::Unknown,
        }
    }

    fn expr(&mut self, e: &Expr) -> Abs {
        match &e.kind {
            ExprKind::Int(i) => Abs::Num(Interval::point(*i as f64)),
            ExprKind::Float(f) => Abs::Num(Interval::point(*f)),
            ExprKind::Bool(b) => Abs::Bool(if *b { Truth::True } else { Truth::False }),
            ExprKind::Str(_) => Abs::Opaque,
            ExprKind::Var(n) => self.lookup(n),
            ExprKind::Unary(UnOp::Neg, a) => Abs::Num(self.expr(a).num().neg()),
            ExprKind::Unary(UnOp::Not, a) => Abs::Bool(match self.truth(a) {
                Truth::True => Truth::False,
                Truth::False => Truth::True,
                Truth::Unknown => Truth::Unknown,
            }),
            ExprKind::Binary(op, a, b) => self.binary(*op, a, b),
            ExprKind::Field(target, _) => {
                self.expr(target);
                Abs::Num(Interval::FULL)
            }
            ExprKind::CategoryIs { .. } => Abs::Bool(Truth::Unknown),
            ExprKind::Pair(a, b) => Abs::Pair(self.expr(a).num(), self.expr(b).num()),
            ExprKind::If(c, a, b) => match self.truth(c) {
                Truth::True => self.expr(a),
                Truth::False => self.expr(b),
                Truth::Unknown => {
                    let x = self.expr(a);
                    let y = self.expr(b);
                    x.join(y)
                }
            },
            ExprKind::IfLet { bindings, then, otherwise } => {
                let bound = bindings.iter().map(|(n, _)| (n.clone(), Abs::Opaque)).collect();
                let x = self.scoped(bound, |a| a.expr(then));
                let y = self.expr(otherwise);
                x.join(y)
            }
            ExprKind::Let(name, value, body) => {
                let v = self.expr(value);
                self.scoped(vec![(name.clone(), v)], |a| a.expr(body))
            }
            ExprKind::Call(Callee::Builtin(b), args) => self.builtin(*b, args),
            ExprKind::Call(Callee::Helper(name), args) => {
                let vals: Vec<Abs> = args.iter().map(|a| self.expr(a)).collect();
                let Some(h) = self.helpers.get(name.as_str()).copied() else { return Abs::Opaque };
                if self.depth > 64 {
                    // Only reachable for programs that failed the recursion check.
                    return Abs::Opaque;
                }
                let frame = h.params.iter().map(|p| p.name.clone()).zip(vals).collect();
                let saved = std::mem::replace(&mut self.env, frame);
                self.depth += 1;
                let out = self.expr(&h.body);
                self.depth -= 1;
                self.env = saved;
                out
            }
            ExprKind::Binder(b) => self.binder(b),
        }
    }

    fn binary(&mut self, op: BinOp, a: &Expr, b: &Expr) -> Abs {
        if matches!(op, BinOp::And | BinOp::Or) {
            let x = self.truth(a);
            let y = self.truth(b);
            return Abs::Bool(match (op, x, y) {
                (BinOp::And, Truth::False, _) | (BinOp::And, _, Truth::False) => Truth::False,
                (BinOp::And, Truth::True, Truth::True) => Truth::True,
                (BinOp::Or, Truth::True, _) | (BinOp::Or, _, Truth::True) => Truth::True,
                (BinOp::Or, Truth::False, Truth::False) => Truth::False,
                _ => Truth::Unknown,
            });
        }
        let x = self.expr(a);
        let y = self.expr(b);
        if op.is_comparison() {
            // Only constant comparisons are decided.
            if let (Abs::Num(l), Abs::Num(r)) = (x, y) {
                if l.is_point() && r.is_point() {
                    let (l, r) = (l.lo, r.lo);
                    let v = match op {
                        BinOp::Lt => l < r,
                        BinOp::Le => l <= r,
                        BinOp::Gt => l > r,
                        BinOp::Ge => l >= r,
                        BinOp::Eq => l == r,
                        _ => l != r,
                    };
                    return Abs::Bool(if v { Truth::True } else { Truth::False });
                }
            }
            return Abs::Bool(Truth::Unknown);
        }
        if let (Abs::Opaque, Abs::Opaque) = (x, y) {
            return Abs::Opaque; // list concatenation
        }
        let (l, r) = (x.num(), y.num());
        Abs::Num(match op {
            BinOp::Add => l.add(r),
            BinOp::Sub => l.sub(r),
            BinOp::Mul => l.mul(r),
            BinOp::Div => l.div(r),
            _ => unreachable!(),
        })
    }

    fn builtin(&mut self, b: Builtin, args: &[Expr]) -> Abs {
        let vals: Vec<Abs> = args.iter().map(|a| self.expr(a)).collect();
        use Builtin as B;
        match b {
            B::Overlaps | B::CornerIn | B::IsSome => Abs::Bool(Truth::Unknown),
            B::Manhattan => Abs::Num(Interval::NON_NEGATIVE),
            B::CenterX | B::CenterY => Abs::Num(Interval::FULL),
            B::Center => Abs::Pair(Interval::FULL, Interval::FULL),
            B::Clamp => Abs::Num(vals[0].num().clamp(vals[1].num(), vals[2].num())),
            B::Abs => Abs::Num(vals[0].num().abs()),
            B::Min => Abs::Num(vals[0].num().min(vals[1].num())),
            B::Max => Abs::Num(vals[0].num().max(vals[1].num())),
            B::Count => Abs::Num(Interval::NON_NEGATIVE),
            B::Fst | B::Snd => match vals[0] {
                Abs::Pair(x, y) => Abs::Num(if b == B::Fst { x } else { y }),
                _ => Abs::Num(Interval::FULL),
            },
            B::Nearest | B::FilterCategory | B::First | B::Last | B::Unwrap => Abs::Opaque,
        }
    }

    fn binder(&mut self, b: &Binder) -> Abs {
        self.expr(&b.list);
        let vars: Vec<(String, Abs)> = b.vars.iter().map(|v| (v.clone(), Abs::Opaque)).collect();
        use BinderForm::*;
        match b.form {
            Exists | Forall => {
                self.scoped(vars, |a| a.expr(&b.body[0]));
                Abs::Bool(Truth::Unknown)
            }
            SumOver => {
                let body = self.scoped(vars, |a| a.expr(&b.body[0])).num();
                Abs::Num(body.repeated_sum())
            }
            MinOver => {
                let body = self.scoped(vars, |a| a.expr(&b.body[0])).num();
                Abs::Num(Interval::new(body.lo, f64::INFINITY))
            }
            MaxOver => {
                let body = self.scoped(vars, |a| a.expr(&b.body[0])).num();
                Abs::Num(Interval::new(f64::NEG_INFINITY, body.hi))
            }
            Filter | SortBy | MinBy | MaxBy => {
                for k in &b.body {
                    self.scoped(vars.clone(), |a| a.expr(k));
                }
                Abs::Opaque
            }
            Fold | FoldPairs => {
                let (acc, init) = b.acc.as_ref().expect("fold accumulator");
                let mut state = self.expr(init);
                // Kleene iteration with widening after a few rounds; widened
                // ends are infinite, so the loop stabilises quickly.
                let mut round = 0;
                loop {
                    round += 1;
                    let mut bindings = vars.clone();
                    bindings.push((acc.clone(), state));
                    let next = state.join(self.scoped(bindings, |a| a.expr(&b.body[0])));
                    if next == state {
                        break;
                    }
                    state = if round > 2 { Abs::widen(state, next) } else { next };
                }
                state
            }
        }
    }
}
