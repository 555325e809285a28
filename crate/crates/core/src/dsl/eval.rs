//! Tree-walking evaluator. Evaluation is total on well-typed programs: every
//! loop is a bounded pass over an object list and helpers cannot recurse.
//! Domain errors become traps, which score 0.0 and carry a diagnostic.

use std::rc::Rc;

use super::ast::*;
use super::diag::{codes, Diagnostic};
use crate::object::{center, corner_in, manhattan_distance, nearest_by_ref, overlaps, GameObject, Snapshot};

#[derive(Debug, Clone)]
pub enum Value<'a> {
    Int(i64),
    Float(f64),
    Bool(bool),
    Obj(&'a GameObject),
    OptObj(Option<&'a GameObject>),
    List(Rc<Vec<&'a GameObject>>),
    Pair(f64, f64),
}

impl<'a> Value<'a> {
    fn as_f64(&self) -> f64 {
        match self {
            Value::Int(i) => *i as f64,
            Value::Float(f) => *f,
            other => unreachable!("numeric value expected, got {other:?}"),
        }
    }

    fn as_bool(&self) -> bool {
        match self {
            Value::Bool(b) => *b,
            other => unreachable!("bool expected, got {other:?}"),
        }
    }

    fn as_obj(&self) -> &'a GameObject {
        match self {
            Value::Obj(o) => o,
            other => unreachable!("object expected, got {other:?}"),
        }
    }

    fn as_opt(&self) -> Option<&'a GameObject> {
        match self {
            Value::Obj(o) => Some(o),
            Value::OptObj(o) => *o,
            other => unreachable!("optional object expected, got {other:?}"),
        }
    }

    fn as_list(&self) -> &Rc<Vec<&'a GameObject>> {
        match self {
            Value::List(l) => l,
            other => unreachable!("object list expected, got {other:?}"),
        }
    }

    fn as_pair(&self) -> (f64, f64) {
        match self {
            Value::Pair(a, b) => (*a, *b),
            other => unreachable!("pair expected, got {other:?}"),
        }
    }
}

/// Result of scoring one snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// 0.0 when the evaluation trapped.
    pub reward: f64,
    pub trap: Option<Diagnostic>,
}

impl Evaluation {
    pub fn trapped(&self) -> bool {
        self.trap.is_some()
    }
}

struct Trap {
    span: Span,
    code: &'static str,
    message: String,
}

type EResult<T> = Result<T, Trap>;

fn trap<T>(span: Span, code: &'static str, message: impl Into<String>) -> EResult<T> {
    Err(Trap { span, code, message: message.into() })
}

/// Scores the reward-visible part of `snapshot` (HUD and score displays are
/// dropped first).
pub fn evaluate(program: &RewardProgram, snapshot: &Snapshot) -> Evaluation {
    evaluate_objects(program, &snapshot.objects)
}

pub fn evaluate_objects(program: &RewardProgram, objects: &[GameObject]) -> Evaluation {
    let visible: Vec<&GameObject> = objects.iter().filter(|o| !o.is_score_display()).collect();
    let mut ev = Evaluator { program, env: vec![(program.entry.param.as_str(), Value::List(Rc::new(visible)))] };
    let result = ev.eval(&program.entry.body).and_then(|v| {
        let r = v.as_f64();
        if r.is_finite() {
            Ok(r)
        } else {
            trap(program.entry.span, codes::TRAP_NON_FINITE, format!("reward evaluated to {r}"))
        }
    });
    match result {
        Ok(reward) => Evaluation { reward, trap: None },
        Err(t) => Evaluation { reward: 0.0, trap: Some(Diagnostic::error(t.span, t.code, t.message)) },
    }
}

struct Evaluator<'p, 'a> {
    program: &'p RewardProgram,
    env: Vec<(&'p str, Value<'a>)>,
}

impl<'p, 'a> Evaluator<'p, 'a> {
    fn lookup(&self, name: &str) -> Value<'a> {
        self.env
            .iter()
            .rev()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| unreachable!("unbound name `{name}` survived typechecking"))
    }

    fn scoped<T>(&mut self, bindings: Vec<(&'p str, Value<'a>)>, f: impl FnOnce(&mut Self) -> T) -> T {
        let depth = self.env.len();
        self.env.extend(bindings);
        let out = f(self);
        self.env.truncate(depth);
        out
    }

    fn eval(&mut self, e: &'p Expr) -> EResult<Value<'a>> {
        Ok(match &e.kind {
            ExprKind::Int(i) => Value::Int(*i),
            ExprKind::Float(f) => Value::Float(*f),
            ExprKind::Bool(b) => Value::Bool(*b),
            ExprKind::Str(_) => unreachable!("string literal outside filter_category"),
            ExprKind::Var(name) => self.lookup(name),
            ExprKind::Unary(UnOp::Not, a) => Value::Bool(!self.eval(a)?.as_bool()),
            ExprKind::Unary(UnOp::Neg, a) => match self.eval(a)? {
                Value::Int(i) => match i.checked_neg() {
                    Some(n) => Value::Int(n),
                    None => return trap(e.span, codes::TRAP_OVERFLOW, "integer overflow in negation"),
                },
                v => Value::Float(-v.as_f64()),
            },
            ExprKind::Binary(op, a, b) => self.binary(*op, a, b, e.span)?,
            ExprKind::Field(target, field) => {
                let o = self.eval(target)?.as_obj();
                read_field(o, *field, e.span)?
            }
            ExprKind::CategoryIs { target, name, negated } => {
                let o = self.eval(target)?.as_obj();
                Value::Bool((o.category == *name) != *negated)
            }
            ExprKind::Pair(a, b) => {
                let x = self.eval(a)?.as_f64();
                let y = self.eval(b)?.as_f64();
                Value::Pair(x, y)
            }
            ExprKind::If(c, a, b) => {
                if self.eval(c)?.as_bool() {
                    self.eval(a)?
                } else {
                    self.eval(b)?
                }
            }
            ExprKind::IfLet { bindings, then, otherwise } => {
                let mut bound = Vec::with_capacity(bindings.len());
                for (name, v) in bindings {
                    match self.eval(v)?.as_opt() {
                        Some(o) => bound.push((name.as_str(), Value::Obj(o))),
                        None => return self.eval(otherwise),
                    }
                }
                self.scoped(bound, |ev| ev.eval(then))?
            }
            ExprKind::Let(name, value, body) => {
                let v = self.eval(value)?;
                self.scoped(vec![(name.as_str(), v)], |ev| ev.eval(body))?
            }
            ExprKind::Call(Callee::Builtin(b), args) => self.builtin(*b, args, e.span)?,
            ExprKind::Call(Callee::Helper(name), args) => {
                let helper = self.program.helper(name).expect("helper resolved at parse time");
                let mut frame = Vec::with_capacity(args.len());
                for (p, a) in helper.params.iter().zip(args) {
                    frame.push((p.name.as_str(), self.eval(a)?));
                }
                let saved = std::mem::replace(&mut self.env, frame);
                let out = self.eval(&helper.body);
                self.env = saved;
                out?
            }
            ExprKind::Binder(b) => self.binder(b, e.span)?,
        })
    }

    fn binary(&mut self, op: BinOp, a: &'p Expr, b: &'p Expr, span: Span) -> EResult<Value<'a>> {
        match op {
            BinOp::And => {
                return Ok(Value::Bool(self.eval(a)?.as_bool() && self.eval(b)?.as_bool()));
            }
            BinOp::Or => {
                return Ok(Value::Bool(self.eval(a)?.as_bool() || self.eval(b)?.as_bool()));
            }
            _ => {}
        }
        let x = self.eval(a)?;
        let y = self.eval(b)?;
        if let (Value::List(l), Value::List(r)) = (&x, &y) {
            let mut out = Vec::with_capacity(l.len() + r.len());
            out.extend(l.iter().copied());
            out.extend(r.iter().copied());
            return Ok(Value::List(Rc::new(out)));
        }
        if let (Value::Bool(l), Value::Bool(r)) = (&x, &y) {
            return Ok(Value::Bool(match op {
                BinOp::Eq => l == r,
                BinOp::Ne => l != r,
                _ => unreachable!("bool operands for `{}`", op.symbol()),
            }));
        }
        if op == BinOp::Div {
            let d = y.as_f64();
            if d == 0.0 {
                return trap(span, codes::TRAP_DIV_ZERO, "division by zero");
            }
            return Ok(Value::Float(x.as_f64() / d));
        }
        if let (Value::Int(l), Value::Int(r)) = (&x, &y) {
            let (l, r) = (*l, *r);
            let checked = match op {
                BinOp::Add => l.checked_add(r),
                BinOp::Sub => l.checked_sub(r),
                BinOp::Mul => l.checked_mul(r),
                _ => return Ok(Value::Bool(compare(op, l.cmp(&r)))),
            };
            return match checked {
                Some(v) => Ok(Value::Int(v)),
                None => trap(span, codes::TRAP_OVERFLOW, format!("integer overflow in `{}`", op.symbol())),
            };
        }
        let (l, r) = (x.as_f64(), y.as_f64());
        Ok(match op {
            BinOp::Add => Value::Float(l + r),
            BinOp::Sub => Value::Float(l - r),
            BinOp::Mul => Value::Float(l * r),
            BinOp::Lt => Value::Bool(l < r),
            BinOp::Le => Value::Bool(l <= r),
            BinOp::Gt => Value::Bool(l > r),
            BinOp::Ge => Value::Bool(l >= r),
            BinOp::Eq => Value::Bool(l == r),
            BinOp::Ne => Value::Bool(l != r),
            BinOp::Div | BinOp::And | BinOp::Or => unreachable!(),
        })
    }

    fn builtin(&mut self, b: Builtin, args: &'p [Expr], span: Span) -> EResult<Value<'a>> {
        use Builtin::*;
        Ok(match b {
            Overlaps | CornerIn | Manhattan => {
                let x = self.eval(&args[0])?.as_obj();
                let y = self.eval(&args[1])?.as_obj();
                match b {
                    Overlaps => Value::Bool(overlaps(x, y)),
                    CornerIn => Value::Bool(corner_in(x, y)),
                    _ => Value::Float(manhattan_distance(x, y)),
                }
            }
            CenterX => Value::Float(center(self.eval(&args[0])?.as_obj()).0),
            CenterY => Value::Float(center(self.eval(&args[0])?.as_obj()).1),
            Center => {
                let (cx, cy) = center(self.eval(&args[0])?.as_obj());
                Value::Pair(cx, cy)
            }
            Nearest => {
                let r = self.eval(&args[0])?.as_obj();
                let list = self.eval(&args[1])?;
                Value::OptObj(nearest_by_ref(r, list.as_list().iter().copied()).map(|(_, o)| o))
            }
            Min | Max => {
                let x = self.eval(&args[0])?;
                let y = self.eval(&args[1])?;
                // First argument wins ties, as in Python's min/max.
                let take_second = if b == Min { y.as_f64() < x.as_f64() } else { y.as_f64() > x.as_f64() };
                let both_int = matches!((&x, &y), (Value::Int(_), Value::Int(_)));
                let v = if take_second { y } else { x };
                if both_int {
                    v
                } else {
                    Value::Float(v.as_f64())
                }
            }
            Clamp => {
                let x = self.eval(&args[0])?;
                let lo = self.eval(&args[1])?;
                let hi = self.eval(&args[2])?;
                let all_int = matches!((&x, &lo, &hi), (Value::Int(_), Value::Int(_), Value::Int(_)));
                let v = if x.as_f64() < lo.as_f64() {
                    lo
                } else if x.as_f64() > hi.as_f64() {
                    hi
                } else {
                    x
                };
                if all_int {
                    v
                } else {
                    Value::Float(v.as_f64())
                }
            }
            Abs => match self.eval(&args[0])? {
                Value::Int(i) => match i.checked_abs() {
                    Some(v) => Value::Int(v),
                    None => return trap(span, codes::TRAP_OVERFLOW, "integer overflow in `abs`"),
                },
                v => Value::Float(v.as_f64().abs()),
            },
            FilterCategory => {
                let list = self.eval(&args[0])?;
                let ExprKind::Str(name) = &args[1].kind else { unreachable!("category literal") };
                let out: Vec<&GameObject> = list.as_list().iter().copied().filter(|o| o.category == *name).collect();
                Value::List(Rc::new(out))
            }
            Count => Value::Int(self.eval(&args[0])?.as_list().len() as i64),
            First => Value::OptObj(self.eval(&args[0])?.as_list().first().copied()),
            Last => Value::OptObj(self.eval(&args[0])?.as_list().last().copied()),
            IsSome => Value::Bool(self.eval(&args[0])?.as_opt().is_some()),
            Unwrap => match self.eval(&args[0])?.as_opt() {
                Some(o) => Value::Obj(o),
                None => return trap(span, codes::TRAP_ABSENT, "unwrap of an absent object"),
            },
            Fst => Value::Float(self.eval(&args[0])?.as_pair().0),
            Snd => Value::Float(self.eval(&args[0])?.as_pair().1),
        })
    }

    fn binder(&mut self, b: &'p Binder, _span: Span) -> EResult<Value<'a>> {
        let list = self.eval(&b.list)?;
        let items = Rc::clone(list.as_list());
        let var = b.vars[0].as_str();
        let body = &b.body[0];
        use BinderForm::*;
        Ok(match b.form {
            Exists | Forall => {
                let want = b.form == Exists;
                for &o in items.iter() {
                    let hit = self.scoped(vec![(var, Value::Obj(o))], |ev| ev.eval(body))?.as_bool();
                    if hit == want {
                        return Ok(Value::Bool(want));
                    }
                }
                Value::Bool(!want)
            }
            SumOver => {
                let mut acc = Value::Int(0);
                for &o in items.iter() {
                    let v = self.scoped(vec![(var, Value::Obj(o))], |ev| ev.eval(body))?;
                    acc = match (&acc, &v) {
                        (Value::Int(l), Value::Int(r)) => match l.checked_add(*r) {
                            Some(s) => Value::Int(s),
                            None => return trap(body.span, codes::TRAP_OVERFLOW, "integer overflow in `sum_over`"),
                        },
                        _ => Value::Float(acc.as_f64() + v.as_f64()),
                    };
                }
                acc
            }
            MinOver | MaxOver => {
                let min = b.form == MinOver;
                let mut best = if min { f64::INFINITY } else { f64::NEG_INFINITY };
                for &o in items.iter() {
                    let v = self.scoped(vec![(var, Value::Obj(o))], |ev| ev.eval(body))?.as_f64();
                    if (min && v < best) || (!min && v > best) {
                        best = v;
                    }
                }
                Value::Float(best)
            }
            Filter => {
                let mut out = Vec::new();
                for &o in items.iter() {
                    if self.scoped(vec![(var, Value::Obj(o))], |ev| ev.eval(body))?.as_bool() {
                        out.push(o);
                    }
                }
                Value::List(Rc::new(out))
            }
            SortBy => {
                let mut keyed = Vec::with_capacity(items.len());
                for &o in items.iter() {
                    let keys = self.scoped(vec![(var, Value::Obj(o))], |ev| {
                        b.body.iter().map(|k| ev.eval(k).map(|v| v.as_f64())).collect::<EResult<Vec<f64>>>()
                    })?;
                    keyed.push((keys, o));
                }
                keyed.sort_by(|(ka, _), (kb, _)| {
                    ka.iter()
                        .zip(kb)
                        .map(|(x, y)| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal))
                        .find(|o| o.is_ne())
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
                Value::List(Rc::new(keyed.into_iter().map(|(_, o)| o).collect()))
            }
            MinBy | MaxBy => {
                let min = b.form == MinBy;
                let mut best: Option<(f64, &GameObject)> = None;
                for &o in items.iter() {
                    let k = self.scoped(vec![(var, Value::Obj(o))], |ev| ev.eval(body))?.as_f64();
                    let better = match best {
                        None => true,
                        Some((bk, _)) => (min && k < bk) || (!min && k > bk),
                    };
                    if better {
                        best = Some((k, o));
                    }
                }
                Value::OptObj(best.map(|(_, o)| o))
            }
            Fold => {
                let (acc_name, init) = b.acc.as_ref().expect("fold accumulator");
                let mut acc = self.eval(init)?;
                for &o in items.iter() {
                    acc = self.scoped(vec![(var, Value::Obj(o)), (acc_name.as_str(), acc)], |ev| ev.eval(body))?;
                }
                acc
            }
            FoldPairs => {
                let (acc_name, init) = b.acc.as_ref().expect("fold accumulator");
                let second = b.vars[1].as_str();
                let mut acc = self.eval(init)?;
                for pair in items.chunks_exact(2) {
                    let bindings =
                        vec![(var, Value::Obj(pair[0])), (second, Value::Obj(pair[1])), (acc_name.as_str(), acc)];
                    acc = self.scoped(bindings, |ev| ev.eval(body))?;
                }
                acc
            }
        })
    }
}

fn compare(op: BinOp, ord: std::cmp::Ordering) -> bool {
    use std::cmp::Ordering::*;
    match op {
        BinOp::Lt => ord == Less,
        BinOp::Le => ord != Greater,
        BinOp::Gt => ord == Greater,
        BinOp::Ge => ord != Less,
        BinOp::Eq => ord == Equal,
        BinOp::Ne => ord != Equal,
        _ => unreachable!(),
    }
}

fn read_field<'a>(o: &GameObject, field: Field, span: Span) -> EResult<Value<'a>> {
    let absent = |what: &str| trap(span, codes::TRAP_ABSENT, format!("`{}` has no {what}", o.category));
    Ok(match field {
        Field::X => Value::Float(o.x),
        Field::Y => Value::Float(o.y),
        Field::W => Value::Float(o.w),
        Field::H => Value::Float(o.h),
        Field::PrevX => Value::Float(o.prev_x),
        Field::PrevY => Value::Float(o.prev_y),
        Field::Dx => Value::Float(o.dx()),
        Field::Dy => Value::Float(o.dy()),
        Field::Orientation => match o.orientation {
            Some(v) => Value::Float(v),
            None => return absent("orientation"),
        },
        Field::Value => match o.value {
            Some(v) => Value::Int(v),
            None => return absent("value"),
        },
        Field::PrevValue => match o.prev_value_or_current() {
            Some(v) => Value::Int(v),
            None => return absent("value"),
        },
        Field::ValueDiff => match (o.value, o.prev_value_or_current()) {
            (Some(v), Some(p)) => match v.checked_sub(p) {
                Some(d) => Value::Int(d),
                None => return trap(span, codes::TRAP_OVERFLOW, "integer overflow in `value_diff`"),
            },
            _ => return absent("value"),
        },
        Field::Category => unreachable!("category is only read through comparisons"),
    })
}
