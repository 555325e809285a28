use super::ast::Span;
use super::diag::{codes, Diagnostic};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Float(f64),
    Str(String),
    Fn,
    Let,
    If,
    Then,
    Else,
    In,
    And,
    Or,
    Not,
    True,
    False,
    LParen,
    RParen,
    Comma,
    Colon,
    Semi,
    Dot,
    Question,
    Arrow,
    Assign,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(i) => format!("integer `{i}`"),
            Tok::Float(f) => format!("number `{f:?}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Fn => "fn",
            Tok::Let => "let",
            Tok::If => "if",
            Tok::Then => "then",
            Tok::Else => "else",
            Tok::In => "in",
            Tok::And => "and",
            Tok::Or => "or",
            Tok::Not => "not",
            Tok::True => "true",
            Tok::False => "false",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Dot => ".",
            Tok::Question => "?",
            Tok::Arrow => "->",
            Tok::Assign => "=",
            Tok::EqEq => "==",
            Tok::NotEq => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            _ => "?",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// A comment occupying a whole line.
#[derive(Debug, Clone)]
pub struct LineComment {
    pub line: u32,
    pub text: String,
}

pub struct Lexed {
    pub tokens: Vec<Token>,
    pub comments: Vec<LineComment>,
}

pub fn lex(src: &str) -> Result<Lexed, Diagnostic> {
    let mut tokens = Vec::new();
    let mut comments = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut line = 1u32;
    let mut col = 1u32;
    let mut line_has_token = false;

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            line_has_token = false;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            let start = i + 1;
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            if !line_has_token {
                let text: String = chars[start..i].iter().collect();
                let text = text.strip_prefix(' ').unwrap_or(&text).trim_end().to_string();
                comments.push(LineComment { line, text });
            }
            continue;
        }

        let start_col = col;
        let single = |tok: Tok, len: u32| (tok, len);
        let next = chars.get(i + 1).copied();
        let (tok, len) = match c {
            '(' => single(Tok::LParen, 1),
            ')' => single(Tok::RParen, 1),
            ',' => single(Tok::Comma, 1),
            ':' => single(Tok::Colon, 1),
            ';' => single(Tok::Semi, 1),
            '.' if !next.is_some_and(|n| n.is_ascii_digit()) => single(Tok::Dot, 1),
            '?' => single(Tok::Question, 1),
            '+' => single(Tok::Plus, 1),
            '*' => single(Tok::Star, 1),
            '/' => single(Tok::Slash, 1),
            '-' if next == Some('>') => single(Tok::Arrow, 2),
            '-' => single(Tok::Minus, 1),
            '=' if next == Some('=') => single(Tok::EqEq, 2),
            '=' => single(Tok::Assign, 1),
            '!' if next == Some('=') => single(Tok::NotEq, 2),
            '<' if next == Some('=') => single(Tok::Le, 2),
            '<' => single(Tok::Lt, 1),
            '>' if next == Some('=') => single(Tok::Ge, 2),
            '>' => single(Tok::Gt, 1),
            '"' => {
                let mut j = i + 1;
                let mut s = String::new();
                while j < chars.len() && chars[j] != '"' {
                    if chars[j] == '\n' {
                        break;
                    }
                    s.push(chars[j]);
                    j += 1;
                }
                if j >= chars.len() || chars[j] != '"' {
                    return Err(Diagnostic::error(
                        Span::new(line, start_col, line, start_col + (j - i) as u32),
                        codes::SYNTAX,
                        "unterminated string literal",
                    ));
                }
                let len = (j - i + 1) as u32;
                (Tok::Str(s), len)
            }
            c if c.is_ascii_digit() || c == '.' => {
                let mut j = i;
                let mut is_float = false;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j < chars.len() && chars[j] == '.' && chars.get(j + 1).is_some_and(|d| d.is_ascii_digit()) {
                    is_float = true;
                    j += 1;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                    let mut k = j + 1;
                    if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        is_float = true;
                        j = k;
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                    }
                }
                let text: String = chars[i..j].iter().collect();
                let span = Span::new(line, start_col, line, start_col + (j - i) as u32);
                let tok = if is_float {
                    Tok::Float(text.parse().map_err(|_| {
                        Diagnostic::error(span, codes::SYNTAX, format!("invalid number `{text}`"))
                    })?)
                } else {
                    Tok::Int(text.parse().map_err(|_| {
                        Diagnostic::error(span, codes::SYNTAX, format!("integer literal `{text}` out of range"))
                    })?)
                };
                (tok, (j - i) as u32)
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.as_str() {
                    "fn" => Tok::Fn,
                    "let" => Tok::Let,
                    "if" => Tok::If,
                    "then" => Tok::Then,
                    "else" => Tok::Else,
                    "in" => Tok::In,
                    "and" => Tok::And,
                    "or" => Tok::Or,
                    "not" => Tok::Not,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word),
                };
                (tok, (j - i) as u32)
            }
            other => {
                return Err(Diagnostic::error(
                    Span::new(line, col, line, col + 1),
                    codes::SYNTAX,
                    format!("unexpected character `{other}`"),
                ))
            }
        };
        tokens.push(Token { tok, span: Span::new(line, start_col, line, start_col + len) });
        line_has_token = true;
        i += len as usize;
        col += len;
    }
    tokens.push(Token { tok: Tok::Eof, span: Span::new(line, col, line, col) });
    Ok(Lexed { tokens, comments })
}
