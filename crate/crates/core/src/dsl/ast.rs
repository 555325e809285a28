use std::fmt;

use serde::{Deserialize, Serialize};

/// Location of a node in the source text. Lines and columns are 1-based;
/// `end_col` is exclusive and refers to `end_line`.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Span {
    pub line: u32,
    pub col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32, end_line: u32, end_col: u32) -> Self {
        Span { line, col, end_line, end_col }
    }

    pub fn to(self, other: Span) -> Span {
        Span { line: self.line, col: self.col, end_line: other.end_line, end_col: other.end_col }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Type {
    Int,
    Float,
    Bool,
    Obj,
    ObjList,
    OptObj,
    Pair,
}

impl Type {
    pub fn is_numeric(self) -> bool {
        matches!(self, Type::Int | Type::Float)
    }

    pub fn from_keyword(s: &str) -> Option<Type> {
        Some(match s {
            "int" => Type::Int,
            "float" => Type::Float,
            "bool" => Type::Bool,
            "obj" => Type::Obj,
            "objlist" => Type::ObjList,
            "pair" => Type::Pair,
            _ => return None,
        })
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Type::Int => "int",
            Type::Float => "float",
            Type::Bool => "bool",
            Type::Obj => "obj",
            Type::ObjList => "objlist",
            Type::OptObj => "obj?",
            Type::Pair => "pair",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div => 6,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 4
    }
}

/// Object attributes readable from reward programs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    X,
    Y,
    W,
    H,
    PrevX,
    PrevY,
    Dx,
    Dy,
    Orientation,
    Value,
    PrevValue,
    ValueDiff,
    Category,
}

impl Field {
    pub const ALL: [Field; 13] = [
        Field::X,
        Field::Y,
        Field::W,
        Field::H,
        Field::PrevX,
        Field::PrevY,
        Field::Dx,
        Field::Dy,
        Field::Orientation,
        Field::Value,
        Field::PrevValue,
        Field::ValueDiff,
        Field::Category,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Field::X => "x",
            Field::Y => "y",
            Field::W => "w",
            Field::H => "h",
            Field::PrevX => "prev_x",
            Field::PrevY => "prev_y",
            Field::Dx => "dx",
            Field::Dy => "dy",
            Field::Orientation => "orientation",
            Field::Value => "value",
            Field::PrevValue => "prev_value",
            Field::ValueDiff => "value_diff",
            Field::Category => "category",
        }
    }

    pub fn from_name(s: &str) -> Option<Field> {
        Field::ALL.into_iter().find(|f| f.name() == s)
    }

    /// Result type of reading the field. `category` has none on its own; it
    /// only appears compared against a literal.
    pub fn ty(self) -> Option<Type> {
        match self {
            Field::Value | Field::PrevValue | Field::ValueDiff => Some(Type::Int),
            Field::Category => None,
            _ => Some(Type::Float),
        }
    }
}

/// Built-in functions with ordinary call syntax.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Overlaps,
    CornerIn,
    Manhattan,
    CenterX,
    CenterY,
    Center,
    Nearest,
    Clamp,
    Abs,
    Min,
    Max,
    FilterCategory,
    Count,
    First,
    Last,
    IsSome,
    Unwrap,
    Fst,
    Snd,
}

impl Builtin {
    pub const ALL: [Builtin; 19] = [
        Builtin::Overlaps,
        Builtin::CornerIn,
        Builtin::Manhattan,
        Builtin::CenterX,
        Builtin::CenterY,
        Builtin::Center,
        Builtin::Nearest,
        Builtin::Clamp,
        Builtin::Abs,
        Builtin::Min,
        Builtin::Max,
        Builtin::FilterCategory,
        Builtin::Count,
        Builtin::First,
        Builtin::Last,
        Builtin::IsSome,
        Builtin::Unwrap,
        Builtin::Fst,
        Builtin::Snd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Overlaps => "overlaps",
            Builtin::CornerIn => "corner_in",
            Builtin::Manhattan => "manhattan",
            Builtin::CenterX => "center_x",
            Builtin::CenterY => "center_y",
            Builtin::Center => "center",
            Builtin::Nearest => "nearest",
            Builtin::Clamp => "clamp",
            Builtin::Abs => "abs",
            Builtin::Min => "min",
            Builtin::Max => "max",
            Builtin::FilterCategory => "filter_category",
            Builtin::Count => "count",
            Builtin::First => "first",
            Builtin::Last => "last",
            Builtin::IsSome => "is_some",
            Builtin::Unwrap => "unwrap",
            Builtin::Fst => "fst",
            Builtin::Snd => "snd",
        }
    }

    pub fn from_name(s: &str) -> Option<Builtin> {
        Builtin::ALL.into_iter().find(|b| b.name() == s)
    }

    pub fn arity(self) -> usize {
        match self {
            Builtin::Clamp => 3,
            Builtin::Overlaps
            | Builtin::CornerIn
            | Builtin::Manhattan
            | Builtin::Nearest
            | Builtin::Min
            | Builtin::Max
            | Builtin::FilterCategory => 2,
            _ => 1,
        }
    }
}

/// List forms that bind a loop variable: `form(x in list: body)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinderForm {
    Exists,
    Forall,
    SumOver,
    MinOver,
    MaxOver,
    Filter,
    SortBy,
    MinBy,
    MaxBy,
    /// `fold(x in list, acc = init: body)`
    Fold,
    /// `fold_pairs(a, b in list, acc = init: body)` over elements (0,1), (2,3), ...
    FoldPairs,
}

impl BinderForm {
    pub const ALL: [BinderForm; 11] = [
        BinderForm::Exists,
        BinderForm::Forall,
        BinderForm::SumOver,
        BinderForm::MinOver,
        BinderForm::MaxOver,
        BinderForm::Filter,
        BinderForm::SortBy,
        BinderForm::MinBy,
        BinderForm::MaxBy,
        BinderForm::Fold,
        BinderForm::FoldPairs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BinderForm::Exists => "exists",
            BinderForm::Forall => "forall",
            BinderForm::SumOver => "sum_over",
            BinderForm::MinOver => "min_over",
            BinderForm::MaxOver => "max_over",
            BinderForm::Filter => "filter",
            BinderForm::SortBy => "sort_by",
            BinderForm::MinBy => "min_by",
            BinderForm::MaxBy => "max_by",
            BinderForm::Fold => "fold",
            BinderForm::FoldPairs => "fold_pairs",
        }
    }

    pub fn from_name(s: &str) -> Option<BinderForm> {
        BinderForm::ALL.into_iter().find(|b| b.name() == s)
    }

    pub fn var_count(self) -> usize {
        if self == BinderForm::FoldPairs {
            2
        } else {
            1
        }
    }

    pub fn has_accumulator(self) -> bool {
        matches!(self, BinderForm::Fold | BinderForm::FoldPairs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Callee {
    Builtin(Builtin),
    Helper(String),
}

impl Callee {
    pub fn name(&self) -> &str {
        match self {
            Callee::Builtin(b) => b.name(),
            Callee::Helper(n) => n,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

/// Structural equality; spans are ignored.
impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    /// Node with a default span, for programmatically built trees.
    pub fn synth(kind: ExprKind) -> Self {
        Expr { kind, span: Span::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Binder {
    pub form: BinderForm,
    pub vars: Vec<String>,
    pub list: Box<Expr>,
    pub acc: Option<(String, Box<Expr>)>,
    /// One expression for every form except `sort_by`, which takes one or
    /// more keys compared lexicographically.
    pub body: Vec<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Int(i64),
    Float(f64),
    Bool(bool),
    /// Only valid as a category name.
    Str(String),
    Var(String),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Field(Box<Expr>, Field),
    /// `target.category == "Name"` (or `!=` when negated).
    CategoryIs { target: Box<Expr>, name: String, negated: bool },
    Pair(Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    /// `if let a = opt_a, b = opt_b then .. else ..`; the then branch runs
    /// only when every optional is present.
    IfLet { bindings: Vec<(String, Expr)>, then: Box<Expr>, otherwise: Box<Expr> },
    Let(String, Box<Expr>, Box<Expr>),
    Call(Callee, Vec<Expr>),
    Binder(Binder),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub ty: Type,
}

#[derive(Debug, Clone)]
pub struct Helper {
    pub name: String,
    pub params: Vec<Param>,
    pub ret: Type,
    pub body: Expr,
    /// Comment lines directly above the definition, without the `#`.
    pub doc: Vec<String>,
    pub span: Span,
}

impl PartialEq for Helper {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.params == other.params
            && self.ret == other.ret
            && self.body == other.body
            && self.doc == other.doc
    }
}

#[derive(Debug, Clone)]
pub struct RewardEntry {
    /// Name bound to the visible object list.
    pub param: String,
    pub body: Expr,
    pub doc: Vec<String>,
    pub span: Span,
}

impl PartialEq for RewardEntry {
    fn eq(&self, other: &Self) -> bool {
        self.param == other.param && self.body == other.body && self.doc == other.doc
    }
}

/// How a program came to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ProgramOrigin {
    Full,
    NoRelations,
    #[default]
    HandFixture,
}

impl ProgramOrigin {
    pub fn as_str(self) -> &'static str {
        match self {
            ProgramOrigin::Full => "full",
            ProgramOrigin::NoRelations => "no_relations",
            ProgramOrigin::HandFixture => "hand_fixture",
        }
    }
}

/// A parsed reward program: helper definitions plus one entry point.
///
/// Equality is structural: source text, spans and origin are not compared.
#[derive(Debug, Clone)]
pub struct RewardProgram {
    pub helpers: Vec<Helper>,
    pub entry: RewardEntry,
    pub source_text: String,
    pub origin: ProgramOrigin,
}

impl PartialEq for RewardProgram {
    fn eq(&self, other: &Self) -> bool {
        self.helpers == other.helpers && self.entry == other.entry
    }
}

impl RewardProgram {
    pub fn helper(&self, name: &str) -> Option<&Helper> {
        self.helpers.iter().find(|h| h.name == name)
    }

    pub fn with_origin(mut self, origin: ProgramOrigin) -> Self {
        self.origin = origin;
        self
    }
}
