//! Random well-typed programs and random snapshots.
//!
//! Generated programs exercise every construct of the language. They are
//! used for the round-trip, termination and clamp-soundness properties and
//! by `validate` to probe a program empirically.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ast::*;
use super::bounds::{static_bounds, Interval};
use super::eval::evaluate;
use crate::games::Game;
use crate::object::{GameObject, Snapshot};

/// Nesting limit for generated expressions. A leaf generated at this level
/// may span three levels (`unwrap(first(objects))`), so trees stay within
/// depth 8.
pub const MAX_GEN_DEPTH: usize = 5;

const CATEGORIES: &[&str] = &["Player", "Enemy", "Ball", "Chicken", "Car", "Diver", "Flag", "Tree"];

/// Depth of an expression tree (a leaf has depth 1).
pub fn depth(e: &Expr) -> usize {
    fn d(e: &Expr) -> usize {
        1 + match &e.kind {
            ExprKind::Int(_) | ExprKind::Float(_) | ExprKind::Bool(_) | ExprKind::Str(_) | ExprKind::Var(_) => 0,
            ExprKind::Unary(_, a) | ExprKind::Field(a, _) => d(a),
            ExprKind::CategoryIs { target, .. } => d(target),
            ExprKind::Binary(_, a, b) | ExprKind::Pair(a, b) | ExprKind::Let(_, a, b) => d(a).max(d(b)),
            ExprKind::If(c, a, b) => d(c).max(d(a)).max(d(b)),
            ExprKind::IfLet { bindings, then, otherwise } => {
                bindings.iter().map(|(_, v)| d(v)).chain([d(then), d(otherwise)]).max().unwrap_or(0)
            }
            ExprKind::Call(_, args) => args.iter().map(d).max().unwrap_or(0),
            ExprKind::Binder(b) => {
                let mut m = d(&b.list);
                if let Some((_, i)) = &b.acc {
                    m = m.max(d(i));
                }
                b.body.iter().map(d).fold(m, usize::max)
            }
        }
    }
    d(e)
}

struct Gen<'r> {
    rng: &'r mut ChaCha8Rng,
    scope: Vec<(String, Type)>,
    helpers: Vec<(String, Vec<Type>, Type)>,
    fresh: usize,
}

fn synth(kind: ExprKind) -> Expr {
    Expr::synth(kind)
}

fn b(e: Expr) -> Box<Expr> {
    Box::new(e)
}

impl Gen<'_> {
    fn name(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }

    fn var_of(&mut self, ty: Type) -> Option<Expr> {
        let vars: Vec<&String> = self.scope.iter().filter(|(_, t)| *t == ty).map(|(n, _)| n).collect();
        vars.choose(self.rng).map(|n| synth(ExprKind::Var((*n).clone())))
    }

    fn scoped(&mut self, bindings: Vec<(String, Type)>, f: impl FnOnce(&mut Self) -> Expr) -> Expr {
        let n = self.scope.len();
        self.scope.extend(bindings);
        let e = f(self);
        self.scope.truncate(n);
        e
    }

    fn float_lit(&mut self) -> Expr {
        let v: f64 = match self.rng.random_range(0..4) {
            0 => self.rng.random_range(-2.0..2.0),
            1 => self.rng.random_range(-200.0..200.0),
            2 => [0.0, 0.5, 1.0, -1.0, 0.1][self.rng.random_range(0..5)],
            _ => (self.rng.random_range(-100..100) as f64) / 10.0,
        };
        synth(ExprKind::Float(v))
    }

    fn leaf(&mut self, ty: Type) -> Expr {
        if self.rng.random_bool(0.6) {
            if let Some(v) = self.var_of(ty) {
                return v;
            }
        }
        match ty {
            Type::Int => synth(ExprKind::Int(self.rng.random_range(-20..20))),
            Type::Float => self.float_lit(),
            Type::Bool => synth(ExprKind::Bool(self.rng.random_bool(0.5))),
            Type::ObjList => self.var_of(Type::ObjList).expect("object list in scope"),
            Type::OptObj => {
                let list = self.leaf(Type::ObjList);
                let f = if self.rng.random_bool(0.5) { Builtin::First } else { Builtin::Last };
                synth(ExprKind::Call(Callee::Builtin(f), vec![list]))
            }
            Type::Obj => match self.var_of(Type::Obj) {
                Some(v) => v,
                None => {
                    let opt = self.leaf(Type::OptObj);
                    synth(ExprKind::Call(Callee::Builtin(Builtin::Unwrap), vec![opt]))
                }
            },
            Type::Pair => {
                let x = self.float_lit();
                let y = self.float_lit();
                synth(ExprKind::Pair(b(x), b(y)))
            }
        }
    }

    fn call(&mut self, f: Builtin, args: Vec<Expr>) -> Expr {
        synth(ExprKind::Call(Callee::Builtin(f), args))
    }

    fn binder(&mut self, form: BinderForm, d: usize, body_ty: Type, acc: Option<(Type, Expr)>) -> Expr {
        let list = self.gen(Type::ObjList, d + 1);
        let var = self.name("o");
        let mut vars = vec![var.clone()];
        let mut bindings = vec![(var, Type::Obj)];
        if form == BinderForm::FoldPairs {
            let second = self.name("o");
            vars.push(second.clone());
            bindings.push((second, Type::Obj));
        }
        let acc = acc.map(|(t, init)| {
            let name = self.name("acc");
            bindings.push((name.clone(), t));
            (name, b(init))
        });
        let keys = if form == BinderForm::SortBy { self.rng.random_range(1..=2) } else { 1 };
        let mut body = Vec::new();
        for _ in 0..keys {
            let bindings = bindings.clone();
            body.push(self.scoped(bindings, |g| g.gen(body_ty, d + 1)));
        }
        synth(ExprKind::Binder(Binder { form, vars, list: b(list), acc, body }))
    }

    /// Generic constructs valid at any type: let, if, if-let.
    fn generic(&mut self, ty: Type, d: usize) -> Expr {
        match self.rng.random_range(0..3) {
            0 => {
                let vt = *[Type::Float, Type::Int, Type::Bool, Type::Obj, Type::ObjList, Type::Pair]
                    .choose(self.rng)
                    .unwrap();
                let value = self.gen(vt, d + 1);
                let name = self.name("v");
                let body = self.scoped(vec![(name.clone(), vt)], |g| g.gen(ty, d + 1));
                synth(ExprKind::Let(name, b(value), b(body)))
            }
            1 => {
                let c = self.gen(Type::Bool, d + 1);
                let x = self.gen(ty, d + 1);
                let y = self.gen(ty, d + 1);
                synth(ExprKind::If(b(c), b(x), b(y)))
            }
            _ => {
                let n = self.rng.random_range(1..=2);
                let mut bindings = Vec::new();
                let mut scope = Vec::new();
                for _ in 0..n {
                    let v = self.gen(Type::OptObj, d + 1);
                    let name = self.name("p");
                    scope.push((name.clone(), Type::Obj));
                    bindings.push((name, v));
                }
                let then = self.scoped(scope, |g| g.gen(ty, d + 1));
                let otherwise = self.gen(ty, d + 1);
                synth(ExprKind::IfLet { bindings, then: b(then), otherwise: b(otherwise) })
            }
        }
    }

    fn helper_call(&mut self, ty: Type, d: usize) -> Option<Expr> {
        let candidates: Vec<(String, Vec<Type>)> =
            self.helpers.iter().filter(|(_, _, r)| *r == ty).map(|(n, p, _)| (n.clone(), p.clone())).collect();
        let (name, params) = candidates.choose(self.rng)?.clone();
        let args = params.into_iter().map(|t| self.gen(t, d + 1)).collect();
        Some(synth(ExprKind::Call(Callee::Helper(name), args)))
    }

    fn gen(&mut self, ty: Type, d: usize) -> Expr {
        if d >= MAX_GEN_DEPTH || self.rng.random_bool(0.2) {
            return self.leaf(ty);
        }
        if self.rng.random_bool(0.12) {
            return self.generic(ty, d);
        }
        if self.rng.random_bool(0.08) {
            if let Some(c) = self.helper_call(ty, d) {
                return c;
            }
        }
        match ty {
            Type::Float => self.gen_float(d),
            Type::Int => self.gen_int(d),
            Type::Bool => self.gen_bool(d),
            Type::Obj => {
                let opt = self.gen(Type::OptObj, d + 1);
                self.call(Builtin::Unwrap, vec![opt])
            }
            Type::OptObj => match self.rng.random_range(0..4) {
                0 => {
                    let r = self.gen(Type::Obj, d + 1);
                    let l = self.gen(Type::ObjList, d + 1);
                    self.call(Builtin::Nearest, vec![r, l])
                }
                1 => {
                    let l = self.gen(Type::ObjList, d + 1);
                    let f = if self.rng.random_bool(0.5) { Builtin::First } else { Builtin::Last };
                    self.call(f, vec![l])
                }
                _ => {
                    let f = if self.rng.random_bool(0.5) { BinderForm::MinBy } else { BinderForm::MaxBy };
                    self.binder(f, d, Type::Float, None)
                }
            },
            Type::ObjList => match self.rng.random_range(0..4) {
                0 => {
                    let l = self.gen(Type::ObjList, d + 1);
                    let c = CATEGORIES.choose(self.rng).unwrap().to_string();
                    self.call(Builtin::FilterCategory, vec![l, synth(ExprKind::Str(c))])
                }
                1 => self.binder(BinderForm::Filter, d, Type::Bool, None),
                2 => self.binder(BinderForm::SortBy, d, Type::Float, None),
                _ => {
                    let l = self.gen(Type::ObjList, d + 1);
                    let r = self.gen(Type::ObjList, d + 1);
                    synth(ExprKind::Binary(BinOp::Add, b(l), b(r)))
                }
            },
            Type::Pair => {
                if self.rng.random_bool(0.5) {
                    let o = self.gen(Type::Obj, d + 1);
                    self.call(Builtin::Center, vec![o])
                } else {
                    let x = self.gen(Type::Float, d + 1);
                    let y = self.gen(Type::Float, d + 1);
                    synth(ExprKind::Pair(b(x), b(y)))
                }
            }
        }
    }

    fn gen_float(&mut self, d: usize) -> Expr {
        let fields = [Field::X, Field::Y, Field::W, Field::H, Field::PrevX, Field::PrevY, Field::Dx, Field::Dy];
        let top = if d + 2 < MAX_GEN_DEPTH { 13 } else { 10 };
        match self.rng.random_range(0..top) {
            0 | 1 => {
                let op = *[BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div].choose(self.rng).unwrap();
                let x = self.gen(Type::Float, d + 1);
                let y = if self.rng.random_bool(0.3) { self.gen(Type::Int, d + 1) } else { self.gen(Type::Float, d + 1) };
                synth(ExprKind::Binary(op, b(x), b(y)))
            }
            2 => {
                let o = self.gen(Type::Obj, d + 1);
                synth(ExprKind::Field(b(o), *fields.choose(self.rng).unwrap()))
            }
            3 => {
                let f = *[Builtin::Abs, Builtin::CenterX, Builtin::CenterY, Builtin::Fst, Builtin::Snd]
                    .choose(self.rng)
                    .unwrap();
                let arg_ty = match f {
                    Builtin::Abs => Type::Float,
                    Builtin::Fst | Builtin::Snd => Type::Pair,
                    _ => Type::Obj,
                };
                let a = self.gen(arg_ty, d + 1);
                self.call(f, vec![a])
            }
            4 => {
                let f = if self.rng.random_bool(0.5) { Builtin::Min } else { Builtin::Max };
                let x = self.gen(Type::Float, d + 1);
                let y = self.gen(Type::Float, d + 1);
                self.call(f, vec![x, y])
            }
            5 => {
                let x = self.gen(Type::Float, d + 1);
                let lo = self.gen(Type::Float, d + 1);
                let hi = self.gen(Type::Float, d + 1);
                self.call(Builtin::Clamp, vec![x, lo, hi])
            }
            6 => {
                let x = self.gen(Type::Obj, d + 1);
                let y = self.gen(Type::Obj, d + 1);
                self.call(Builtin::Manhattan, vec![x, y])
            }
            7 => {
                let f = *[BinderForm::SumOver, BinderForm::MinOver, BinderForm::MaxOver].choose(self.rng).unwrap();
                self.binder(f, d, Type::Float, None)
            }
            8 => {
                let init = self.gen(Type::Float, d + 1);
                let f = if self.rng.random_bool(0.5) { BinderForm::Fold } else { BinderForm::FoldPairs };
                self.binder(f, d, Type::Float, Some((Type::Float, init)))
            }
            9 => {
                let x = self.gen(Type::Float, d + 1);
                synth(ExprKind::Unary(UnOp::Neg, b(x)))
            }
            10 | 11 => {
                // fold with a pair accumulator, projected back to a float
                let init = self.gen(Type::Pair, d + 2);
                let fold = self.binder(BinderForm::Fold, d + 1, Type::Pair, Some((Type::Pair, init)));
                let f = if self.rng.random_bool(0.5) { Builtin::Fst } else { Builtin::Snd };
                self.call(f, vec![fold])
            }
            _ => self.float_lit(),
        }
    }

    fn gen_int(&mut self, d: usize) -> Expr {
        match self.rng.random_range(0..6) {
            0 => {
                let l = self.gen(Type::ObjList, d + 1);
                self.call(Builtin::Count, vec![l])
            }
            1 => {
                let op = *[BinOp::Add, BinOp::Sub, BinOp::Mul].choose(self.rng).unwrap();
                let x = self.gen(Type::Int, d + 1);
                let y = self.gen(Type::Int, d + 1);
                synth(ExprKind::Binary(op, b(x), b(y)))
            }
            2 => {
                let o = self.gen(Type::Obj, d + 1);
                let f = *[Field::Value, Field::PrevValue, Field::ValueDiff].choose(self.rng).unwrap();
                synth(ExprKind::Field(b(o), f))
            }
            3 => {
                let f = *[Builtin::Abs, Builtin::Min, Builtin::Max].choose(self.rng).unwrap();
                let n = f.arity();
                let args = (0..n).map(|_| self.gen(Type::Int, d + 1)).collect();
                self.call(f, args)
            }
            4 => self.binder(BinderForm::SumOver, d, Type::Int, None),
            _ => synth(ExprKind::Int(self.rng.random_range(-20..20))),
        }
    }

    fn gen_bool(&mut self, d: usize) -> Expr {
        match self.rng.random_range(0..8) {
            0 => {
                let op = *[BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge, BinOp::Eq, BinOp::Ne].choose(self.rng).unwrap();
                let t = if self.rng.random_bool(0.7) { Type::Float } else { Type::Int };
                let x = self.gen(t, d + 1);
                let y = self.gen(t, d + 1);
                synth(ExprKind::Binary(op, b(x), b(y)))
            }
            1 => {
                let op = if self.rng.random_bool(0.5) { BinOp::And } else { BinOp::Or };
                let x = self.gen(Type::Bool, d + 1);
                let y = self.gen(Type::Bool, d + 1);
                synth(ExprKind::Binary(op, b(x), b(y)))
            }
            2 => {
                let x = self.gen(Type::Bool, d + 1);
                synth(ExprKind::Unary(UnOp::Not, b(x)))
            }
            3 => {
                let f = if self.rng.random_bool(0.5) { Builtin::Overlaps } else { Builtin::CornerIn };
                let x = self.gen(Type::Obj, d + 1);
                let y = self.gen(Type::Obj, d + 1);
                self.call(f, vec![x, y])
            }
            4 => {
                let f = if self.rng.random_bool(0.5) { BinderForm::Exists } else { BinderForm::Forall };
                self.binder(f, d, Type::Bool, None)
            }
            5 => {
                let o = self.gen(Type::OptObj, d + 1);
                self.call(Builtin::IsSome, vec![o])
            }
            6 => {
                let t = self.gen(Type::Obj, d + 1);
                let name = CATEGORIES.choose(self.rng).unwrap().to_string();
                synth(ExprKind::CategoryIs { target: b(t), name, negated: self.rng.random_bool(0.3) })
            }
            _ => synth(ExprKind::Bool(self.rng.random_bool(0.5))),
        }
    }
}

/// A random well-typed program. With `clamped`, the entry is wrapped in
/// `clamp(.., -1.0, 1.0)`.
pub fn random_program(rng: &mut ChaCha8Rng, clamped: bool) -> RewardProgram {
    let mut g = Gen { rng, scope: Vec::new(), helpers: Vec::new(), fresh: 0 };
    let mut helpers = Vec::new();
    let n_helpers = g.rng.random_range(0..=2);
    for _ in 0..n_helpers {
        let name = g.name("h");
        let n_params = g.rng.random_range(1..=2);
        let params: Vec<Param> = (0..n_params)
            .map(|_| {
                let ty = *[Type::Obj, Type::Float, Type::ObjList].choose(g.rng).unwrap();
                Param { name: g.name("a"), ty }
            })
            .collect();
        let ret = *[Type::Float, Type::Bool, Type::Int].choose(g.rng).unwrap();
        // Helper bodies need an object list for leaves; give every helper one.
        let mut params = params;
        if !params.iter().any(|p| p.ty == Type::ObjList) {
            params.push(Param { name: g.name("a"), ty: Type::ObjList });
        }
        g.scope = params.iter().map(|p| (p.name.clone(), p.ty)).collect();
        let body = g.gen(ret, 2);
        let doc = if g.rng.random_bool(0.5) { vec![format!("generated helper {name}")] } else { Vec::new() };
        g.helpers.push((name.clone(), params.iter().map(|p| p.ty).collect(), ret));
        helpers.push(Helper { name, params, ret, body, doc, span: Span::default() });
    }
    g.scope = vec![("objects".to_string(), Type::ObjList)];
    let mut body = g.gen(Type::Float, if clamped { 1 } else { 0 });
    if clamped {
        body = synth(ExprKind::Call(
            Callee::Builtin(Builtin::Clamp),
            vec![body, synth(ExprKind::Float(-1.0)), synth(ExprKind::Float(1.0))],
        ));
    }
    let mut program = RewardProgram {
        helpers,
        entry: RewardEntry { param: "objects".into(), body, doc: Vec::new(), span: Span::default() },
        source_text: String::new(),
        origin: ProgramOrigin::HandFixture,
    };
    program.source_text = super::pretty::pretty_print(&program);
    program
}

/// A random reward-visible-or-not snapshot following `game`'s schema.
/// About half of the objects cluster around one point so that collisions
/// and containment actually happen.
pub fn random_snapshot(rng: &mut impl Rng, game: Game, t: u64) -> Snapshot {
    let (w, h) = game.screen();
    let focus = (rng.random_range(0.0..w), rng.random_range(0.0..h));
    let mut objects = Vec::new();
    for c in game.classes() {
        let n = match c.name {
            "Player" | "Chicken" => rng.random_range(0..=2),
            "OxygenBar" => rng.random_range(0..=1),
            _ => rng.random_range(0..=4),
        };
        for _ in 0..n {
            let (x, y) = if rng.random_bool(0.5) {
                (focus.0 + rng.random_range(-12.0..12.0), focus.1 + rng.random_range(-12.0..12.0))
            } else {
                (rng.random_range(-10.0..w + 10.0), rng.random_range(-10.0..h + 10.0))
            };
            // Integer-valued coordinates make exact alignments (equal y of
            // two flags, y == 0) reachable.
            let (x, y) = if rng.random_bool(0.5) { (x.round(), y.round()) } else { (x, y) };
            let mut o = GameObject::new(c.name, x, y, c.wh.0, c.wh.1)
                .with_rgb(c.rgb)
                .with_prev(x - rng.random_range(-4.0..4.0), y - rng.random_range(-4.0..4.0));
            if c.valued {
                o = o.with_value(rng.random_range(0..=64)).with_prev_value(rng.random_range(0..=64));
            }
            objects.push(o);
        }
    }
    if rng.random_bool(0.3) {
        objects.push(GameObject::new("PlayerScore", 40.0, 2.0, 12.0, 8.0).with_hud(true).with_value(rng.random_range(0..30)));
    }
    // Interleave classes so that order-sensitive selections get exercised.
    for i in (1..objects.len()).rev() {
        if rng.random_bool(0.3) {
            let j = rng.random_range(0..=i);
            objects.swap(i, j);
        }
    }
    Snapshot::new(t, objects)
}

/// Empirical probe of a program.
#[derive(Debug, Clone, Serialize)]
pub struct FuzzReport {
    pub samples: usize,
    pub traps: usize,
    pub observed_min: f64,
    pub observed_max: f64,
    pub static_bounds: Interval,
    /// Every observed reward lies inside `static_bounds`.
    pub sound: bool,
    pub games: Vec<Game>,
}

pub fn fuzz_program(program: &RewardProgram, games: &[Game], samples: usize, seed: u64) -> FuzzReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bounds = static_bounds(program);
    let mut report = FuzzReport {
        samples,
        traps: 0,
        observed_min: f64::INFINITY,
        observed_max: f64::NEG_INFINITY,
        static_bounds: bounds,
        sound: true,
        games: games.to_vec(),
    };
    for i in 0..samples {
        let game = games[i % games.len()];
        let s = random_snapshot(&mut rng, game, i as u64);
        let ev = evaluate(program, &s);
        if ev.trapped() {
            report.traps += 1;
        }
        report.observed_min = report.observed_min.min(ev.reward);
        report.observed_max = report.observed_max.max(ev.reward);
        report.sound &= bounds.contains(ev.reward);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse, pretty_print, typecheck};

    #[test]
    fn generated_programs_typecheck_and_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let p = random_program(&mut rng, false);
            let errs = typecheck(&p);
            assert!(errs.is_empty(), "{}\n{errs:?}", p.source_text);
            for body in p.helpers.iter().map(|h| &h.body).chain([&p.entry.body]) {
                assert!(depth(body) <= 8, "{}", p.source_text);
            }
            let q = parse(&pretty_print(&p)).unwrap();
            assert_eq!(p, q);
        }
    }

    #[test]
    fn snapshots_follow_schema() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for g in Game::ALL {
            for t in 0..50 {
                let s = random_snapshot(&mut rng, g, t);
                for o in s.objects.iter().filter(|o| !o.hud) {
                    assert!(g.class(&o.category).is_some());
                }
            }
        }
    }
}
