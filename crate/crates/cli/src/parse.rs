//! Operator and symbol expressions.
//!
//! Operators are built from `a`, `ad`, `N`, `Sz`, `I` (optionally annotated as
//! `Sz{s=3/2}`, `I{boson}`, `I{s=1}`), the imaginary unit `i`, exact decimal or
//! rational literals (`1.5`, `3/4`, `2i`, `3/4i`), `kron(e1, e2, ...)` and
//! parentheses. `^` binds tightest, then `*` and `/`, then `+` and `-`.
//! A rational literal is written without spaces; `3 / 4i` divides by `4i`.
//!
//! Symbols use the same grammar with atoms `z`, `zb` and `i`.

use std::fmt;

use dequant_core::opalg::{
    BosonOperator, LocalOperator, Spin, SpinOperator, SystemKind, TensorOperator,
};
use dequant_core::symcore::{GaussRational, PhaseSymbol};
use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{at}: expected {}, found {found}", .expected.join(" or "))]
    Syntax {
        at: Position,
        expected: Vec<String>,
        found: String,
    },
    #[error("{at}: unknown atom `{name}`")]
    UnknownAtom { at: Position, name: String },
    #[error("{at}: `{atom}` needs a spin label, e.g. `Sz{{s=1/2}}` or --spin")]
    MissingSpinLabel { at: Position, atom: String },
    #[error("{at}: {detail}")]
    AmbiguousSystem { at: Position, detail: String },
}

impl ParseError {
    pub fn name(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "SyntaxError",
            ParseError::UnknownAtom { .. } => "UnknownAtom",
            ParseError::MissingSpinLabel { .. } => "MissingSpinLabel",
            ParseError::AmbiguousSystem { .. } => "AmbiguousSystem",
        }
    }

    pub fn position(&self) -> Position {
        match self {
            ParseError::Syntax { at, .. }
            | ParseError::UnknownAtom { at, .. }
            | ParseError::MissingSpinLabel { at, .. }
            | ParseError::AmbiguousSystem { at, .. } => *at,
        }
    }
}

/// Subsystem descriptors supplied outside the expression.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SystemConfig {
    /// One descriptor per subsystem, in `kron` order.
    pub systems: Option<Vec<SystemKind>>,
    /// Label for unannotated `Sz` atoms.
    pub spin: Option<Spin>,
}

impl SystemConfig {
    fn slot(&self, index: usize, arity: usize) -> Option<SystemKind> {
        self.systems
            .as_ref()
            .filter(|s| s.len() == arity)
            .map(|s| s[index])
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(GaussRational),
    Ident(String),
    Annot(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(c) => format!("number `{}`", c),
            Tok::Ident(s) => format!("`{}`", s),
            Tok::Annot(s) => format!("`{{{}}}`", s),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    at: Position,
    start: usize,
    end: usize,
}

fn position_of(text: &str, offset: usize) -> Position {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Position { line, column }
}

fn digits_to_int(s: &str) -> BigInt {
    s.parse().expect("ascii digits")
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let run = |mut j: usize, pred: fn(u8) -> bool| {
        while j < bytes.len() && pred(bytes[j]) {
            j += 1;
        }
        j
    };
    let is_ident = |b: u8| b.is_ascii_alphanumeric() || b == b'_';
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = if b.is_ascii_digit()
            || (b == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit))
        {
            let int_end = run(i, |c| c.is_ascii_digit());
            let mut value = BigRational::from_integer(digits_to_int(if int_end > i {
                &text[i..int_end]
            } else {
                "0"
            }));
            i = int_end;
            if bytes.get(i) == Some(&b'.') {
                let frac_end = run(i + 1, |c| c.is_ascii_digit());
                if frac_end > i + 1 {
                    let scale = num::pow(BigInt::from(10), frac_end - i - 1);
                    value += BigRational::new(digits_to_int(&text[i + 1..frac_end]), scale);
                }
                i = frac_end;
            }
            if bytes.get(i) == Some(&b'/') && bytes.get(i + 1).is_some_and(u8::is_ascii_digit) {
                let den_end = run(i + 1, |c| c.is_ascii_digit());
                let den = digits_to_int(&text[i + 1..den_end]);
                if den.is_zero() {
                    return Err(ParseError::Syntax {
                        at: position_of(text, i + 1),
                        expected: vec!["non-zero denominator".into()],
                        found: "`0`".into(),
                    });
                }
                value /= BigRational::from_integer(den);
                i = den_end;
            }
            let imaginary =
                bytes.get(i) == Some(&b'i') && !bytes.get(i + 1).is_some_and(|c| is_ident(*c));
            if imaginary {
                i += 1;
                Tok::Num(GaussRational::imag(value))
            } else {
                Tok::Num(GaussRational::real(value))
            }
        } else if b.is_ascii_alphabetic() || b == b'_' {
            i = run(i, is_ident);
            Tok::Ident(text[start..i].to_string())
        } else if b == b'{' {
            let close = text[i..]
                .find('}')
                .map(|k| i + k)
                .ok_or(ParseError::Syntax {
                    at: position_of(text, text.len()),
                    expected: vec!["`}`".into()],
                    found: "end of input".into(),
                })?;
            i = close + 1;
            Tok::Annot(text[start + 1..close].trim().to_string())
        } else {
            i += 1;
            match b {
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'/' => Tok::Slash,
                b'^' => Tok::Caret,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                _ => {
                    let ch = text[start..].chars().next().expect("non-empty");
                    return Err(ParseError::Syntax {
                        at: position_of(text, start),
                        expected: vec!["an expression".into()],
                        found: format!("`{}`", ch),
                    });
                }
            }
        };
        let i_end = if matches!(tok, Tok::Ident(_) | Tok::Num(_) | Tok::Annot(_)) {
            i
        } else {
            start + 1
        };
        out.push(Token {
            tok,
            at: position_of(text, start),
            start,
            end: i_end,
        });
    }
    out.push(Token {
        tok: Tok::End,
        at: position_of(text, text.len()),
        start: text.len(),
        end: text.len(),
    });
    Ok(out)
}

#[derive(Debug, Clone)]
enum Node {
    Num(GaussRational),
    Atom { name: String, annot: Option<String> },
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Kron(Vec<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone)]
struct Expr {
    node: Node,
    at: Position,
    start: usize,
    end: usize,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

const AFTER_OPERAND: [&str; 6] = ["`+`", "`-`", "`*`", "`/`", "`^`", "end of input"];
const OPERAND: [&str; 4] = ["a number", "an atom", "`kron(`", "`(`"];

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError::Syntax {
            at: t.at,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.describe(),
        })
    }

    fn expect(&mut self, tok: Tok, expected: &[&str]) -> Result<Token, ParseError> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            self.fail(expected)
        }
    }

    fn parse_all(&mut self) -> Result<Expr, ParseError> {
        let e = self.expr()?;
        if self.peek().tok != Tok::End {
            let mut expected = AFTER_OPERAND.to_vec();
            if self.peek().tok == Tok::Caret {
                expected = vec!["`+`", "`-`", "`*`", "`/`", "end of input"];
            }
            return self.fail(&expected);
        }
        Ok(e)
    }

    fn join(&self, op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr {
            at: l.at,
            start: l.start,
            end: r.end,
            node: Node::Bin(op, Box::new(l), Box::new(r)),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = self.join(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = self.join(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().tok == Tok::Minus {
            let t = self.bump();
            let inner = self.unary()?;
            return Ok(Expr {
                at: t.at,
                start: t.start,
                end: inner.end,
                node: Node::Neg(Box::new(inner)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let t = self.peek().clone();
        let exp = match &t.tok {
            Tok::Num(c) if c.is_real() && c.re.is_integer() && !c.re.is_negative() => {
                c.re.to_integer().to_u32()
            }
            _ => None,
        };
        match exp {
            Some(e) => {
                self.bump();
                Ok(Expr {
                    at: base.at,
                    start: base.start,
                    end: t.end,
                    node: Node::Pow(Box::new(base), e),
                })
            }
            None => self.fail(&["a non-negative integer exponent"]),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Num(c) => {
                self.bump();
                Ok(Expr {
                    node: Node::Num(c),
                    at: t.at,
                    start: t.start,
                    end: t.end,
                })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                let close =
                    self.expect(Tok::RParen, &["`)`", "`+`", "`-`", "`*`", "`/`", "`^`"])?;
                Ok(Expr {
                    at: t.at,
                    start: t.start,
                    end: close.end,
                    ..inner
                })
            }
            Tok::Ident(name) if name == "kron" => {
                self.bump();
                self.expect(Tok::LParen, &["`(`"])?;
                let mut args = vec![self.expr()?];
                while self.peek().tok == Tok::Comma {
                    self.bump();
                    args.push(self.expr()?);
                }
                let close = self.expect(
                    Tok::RParen,
                    &["`,`", "`)`", "`+`", "`-`", "`*`", "`/`", "`^`"],
                )?;
                Ok(Expr {
                    node: Node::Kron(args),
                    at: t.at,
                    start: t.start,
                    end: close.end,
                })
            }
            Tok::Ident(name) => {
                self.bump();
                let mut end = t.end;
                let annot = if let Tok::Annot(a) = &self.peek().tok {
                    let a = a.clone();
                    end = self.bump().end;
                    Some(a)
                } else {
                    None
                };
                Ok(Expr {
                    node: Node::Atom { name, annot },
                    at: t.at,
                    start: t.start,
                    end,
                })
            }
            _ => self.fail(&OPERAND),
        }
    }
}

fn parse_tree(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    Parser { toks, pos: 0 }.parse_all()
}

/// Intermediate value while folding an operator expression.
#[derive(Debug, Clone)]
enum Value {
    Scalar(GaussRational),
    Local(LocalOperator),
    Tensor(TensorOperator),
}

struct Evaluator<'c, 't> {
    config: &'c SystemConfig,
    text: &'t str,
}

fn ambiguous(at: Position, detail: impl Into<String>) -> ParseError {
    ParseError::AmbiguousSystem {
        at,
        detail: detail.into(),
    }
}

fn parse_spin_label(label: &str, at: Position) -> Result<Spin, ParseError> {
    let bad = || ParseError::Syntax {
        at,
        expected: vec!["a spin label `s=<half-integer>`".into()],
        found: format!("`{{{}}}`", label),
    };
    let value = label
        .strip_prefix('s')
        .map(str::trim_start)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(bad)?
        .trim();
    let toks = lex(value).map_err(|_| bad())?;
    match toks.as_slice() {
        [Token {
            tok: Tok::Num(c), ..
        }, Token { tok: Tok::End, .. }]
            if c.is_real() =>
        {
            Spin::from_rational(&c.re).map_err(|_| bad())
        }
        _ => Err(bad()),
    }
}

impl Evaluator<'_, '_> {
    fn snippet(&self, e: &Expr) -> String {
        self.text[e.start..e.end].trim().to_string()
    }

    fn atom(
        &self,
        e: &Expr,
        name: &str,
        annot: Option<&str>,
        hint: Option<SystemKind>,
    ) -> Result<Value, ParseError> {
        let boson = |b: BosonOperator| Ok(Value::Local(LocalOperator::Boson(b)));
        let check_boson = |v: Result<Value, ParseError>| match hint {
            Some(SystemKind::Spin(s)) => Err(ambiguous(
                e.at,
                format!(
                    "`{}` is a boson operator but the subsystem is spin {}",
                    name, s
                ),
            )),
            _ => v,
        };
        if annot.is_some() && !matches!(name, "Sz" | "I") {
            return Err(ParseError::Syntax {
                at: e.at,
                expected: AFTER_OPERAND.iter().map(|s| s.to_string()).collect(),
                found: format!("`{{{}}}`", annot.unwrap_or_default()),
            });
        }
        match name {
            "a" => check_boson(boson(BosonOperator::annihilation())),
            "ad" => check_boson(boson(BosonOperator::creation())),
            "N" => check_boson(boson(BosonOperator::number())),
            "i" => Ok(Value::Scalar(GaussRational::i())),
            "I" => match annot {
                None => Ok(Value::Scalar(GaussRational::one())),
                Some("boson") => check_boson(boson(BosonOperator::identity())),
                Some(label) => {
                    let s = parse_spin_label(label, e.at)?;
                    Ok(Value::Local(LocalOperator::Spin(SpinOperator::scalar(
                        s,
                        GaussRational::one(),
                    ))))
                }
            },
            "Sz" => {
                let s = match (annot, hint) {
                    (Some(label), _) => parse_spin_label(label, e.at)?,
                    (None, Some(SystemKind::Spin(s))) => s,
                    (None, Some(SystemKind::Boson)) => {
                        return Err(ambiguous(
                            e.at,
                            "`Sz` is a spin operator but the subsystem is a boson",
                        ))
                    }
                    (None, None) => self.config.spin.ok_or(ParseError::MissingSpinLabel {
                        at: e.at,
                        atom: self.snippet(e),
                    })?,
                };
                Ok(Value::Local(LocalOperator::Spin(SpinOperator::sz(s))))
            }
            _ => Err(ParseError::UnknownAtom {
                at: e.at,
                name: name.to_string(),
            }),
        }
    }

    fn eval(&self, e: &Expr, hint: Option<SystemKind>) -> Result<Value, ParseError> {
        match &e.node {
            Node::Num(c) => Ok(Value::Scalar(c.clone())),
            Node::Atom { name, annot } => self.atom(e, name, annot.as_deref(), hint),
            Node::Neg(inner) => {
                let v = self.eval(inner, hint)?;
                Ok(scale(v, &-GaussRational::one()))
            }
            Node::Pow(base, n) => match self.eval(base, hint)? {
                Value::Scalar(c) => Ok(Value::Scalar(c.pow(*n))),
                Value::Local(l) => {
                    let mut acc = LocalOperator::identity(l.kind());
                    for _ in 0..*n {
                        acc = acc.mul(&l).expect("same subsystem");
                    }
                    Ok(Value::Local(acc))
                }
                Value::Tensor(t) => Ok(Value::Tensor(t.pow(*n).expect("same systems"))),
            },
            Node::Bin(BinOp::Div, l, r) => {
                let num = self.eval(l, hint)?;
                match self.eval(r, hint)? {
                    Value::Scalar(c) => match c.inv() {
                        Some(inv) => Ok(scale(num, &inv)),
                        None => Err(ParseError::Syntax {
                            at: r.at,
                            expected: vec!["a non-zero divisor".into()],
                            found: format!("`{}`", self.snippet(r)),
                        }),
                    },
                    _ => Err(ParseError::Syntax {
                        at: r.at,
                        expected: vec!["a scalar divisor".into()],
                        found: format!("`{}`", self.snippet(r)),
                    }),
                }
            }
            Node::Bin(op, l, r) => {
                let lv = self.eval(l, hint)?;
                let rv = self.eval(r, hint)?;
                combine(*op, lv, rv)
                    .map_err(|detail| ambiguous(r.at, format!("`{}`: {}", self.snippet(e), detail)))
            }
            Node::Kron(args) => {
                let mut parts = Vec::with_capacity(args.len());
                for (j, arg) in args.iter().enumerate() {
                    let slot = self.config.slot(j, args.len());
                    let t = match self.eval(arg, slot)? {
                        Value::Tensor(t) => t,
                        Value::Local(l) => TensorOperator::from_local(l),
                        Value::Scalar(c) => {
                            let kind = slot.ok_or_else(|| {
                                ambiguous(
                                    arg.at,
                                    format!(
                                        "kron factor `{}` does not determine its subsystem; use `I{{boson}}`, `I{{s=...}}` or --systems",
                                        self.snippet(arg)
                                    ),
                                )
                            })?;
                            TensorOperator::scalar(vec![kind], c)
                        }
                    };
                    parts.push(t);
                }
                Ok(Value::Tensor(TensorOperator::kron(&parts)))
            }
        }
    }
}

fn scale(v: Value, c: &GaussRational) -> Value {
    match v {
        Value::Scalar(x) => Value::Scalar(&x * c),
        Value::Local(l) => Value::Local(l.scale(c)),
        Value::Tensor(t) => Value::Tensor(t.scale(c)),
    }
}

fn lift(l: LocalOperator, systems: &[SystemKind]) -> Result<TensorOperator, String> {
    if systems == [l.kind()] {
        Ok(TensorOperator::from_local(l))
    } else {
        Err(format!(
            "cannot combine an operator on {} with one on [{}] without kron",
            l.kind(),
            systems
                .iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ))
    }
}

fn combine(op: BinOp, l: Value, r: Value) -> Result<Value, String> {
    use Value::*;
    let mismatch = |a: SystemKind, b: SystemKind| {
        format!(
            "operators act on different subsystems ({} and {}); use kron",
            a, b
        )
    };
    Ok(match (l, r) {
        (Scalar(x), Scalar(y)) => Scalar(match op {
            BinOp::Add => &x + &y,
            BinOp::Sub => &x - &y,
            _ => &x * &y,
        }),
        (Scalar(x), Local(y)) | (Local(y), Scalar(x)) if op == BinOp::Mul => Local(y.scale(&x)),
        (Scalar(x), Tensor(y)) | (Tensor(y), Scalar(x)) if op == BinOp::Mul => Tensor(y.scale(&x)),
        (Scalar(x), Local(y)) => {
            let id = LocalOperator::identity(y.kind()).scale(&x);
            Local(apply_local(op, &id, &y).map_err(|_| mismatch(y.kind(), y.kind()))?)
        }
        (Local(x), Scalar(y)) => {
            let id = LocalOperator::identity(x.kind()).scale(&y);
            Local(apply_local(op, &x, &id).map_err(|_| mismatch(x.kind(), x.kind()))?)
        }
        (Local(x), Local(y)) => {
            if x.kind() != y.kind() {
                return Err(mismatch(x.kind(), y.kind()));
            }
            Local(apply_local(op, &x, &y).map_err(|_| mismatch(x.kind(), y.kind()))?)
        }
        (Scalar(x), Tensor(y)) => {
            let id = TensorOperator::scalar(y.systems().to_vec(), x);
            Tensor(apply_tensor(op, &id, &y)?)
        }
        (Tensor(x), Scalar(y)) => {
            let id = TensorOperator::scalar(x.systems().to_vec(), y);
            Tensor(apply_tensor(op, &x, &id)?)
        }
        (Local(x), Tensor(y)) => {
            let x = lift(x, y.systems())?;
            Tensor(apply_tensor(op, &x, &y)?)
        }
        (Tensor(x), Local(y)) => {
            let y = lift(y, x.systems())?;
            Tensor(apply_tensor(op, &x, &y)?)
        }
        (Tensor(x), Tensor(y)) => Tensor(apply_tensor(op, &x, &y)?),
    })
}

fn apply_local(
    op: BinOp,
    x: &LocalOperator,
    y: &LocalOperator,
) -> dequant_core::Result<LocalOperator> {
    match op {
        BinOp::Add => x.add(y),
        BinOp::Sub => x.add(&y.scale(&-GaussRational::one())),
        _ => x.mul(y),
    }
}

fn apply_tensor(
    op: BinOp,
    x: &TensorOperator,
    y: &TensorOperator,
) -> Result<TensorOperator, String> {
    let res = match op {
        BinOp::Add => x.add(y),
        BinOp::Sub => x.sub(y),
        _ => x.mul(y),
    };
    res.map_err(|_| {
        format!(
            "tensor factors disagree on the subsystems ([{}] vs [{}])",
            x.systems()
                .iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join(", "),
            y.systems()
                .iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        )
    })
}

/// Parses an operator expression into a normal-ordered tensor operator.
pub fn parse_expression(text: &str, config: &SystemConfig) -> Result<TensorOperator, ParseError> {
    let tree = parse_tree(text)?;
    let ev = Evaluator { config, text };
    let top = config.slot(0, 1);
    let op = match ev.eval(&tree, top)? {
        Value::Tensor(t) => t,
        Value::Local(l) => TensorOperator::from_local(l),
        Value::Scalar(c) => {
            let systems = config.systems.clone().ok_or_else(|| {
                ambiguous(
                    tree.at,
                    "a scalar expression needs --system (or --systems) to fix its subsystem",
                )
            })?;
            TensorOperator::scalar(systems, c)
        }
    };
    if let Some(systems) = &config.systems {
        if op.systems() != systems.as_slice() {
            return Err(ambiguous(
                tree.at,
                format!(
                    "expression acts on [{}] but the subsystems were declared as [{}]",
                    op.systems()
                        .iter()
                        .map(|k| k.to_string())
                        .collect::<Vec<_>>()
                        .join(", "),
                    systems
                        .iter()
                        .map(|k| k.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            ));
        }
    }
    Ok(op)
}

/// Parses a phase-space symbol in `z`, `zb`.
pub fn parse_symbol(text: &str) -> Result<PhaseSymbol, ParseError> {
    let tree = parse_tree(text)?;
    symbol_value(&tree, text)
}

fn symbol_value(e: &Expr, text: &str) -> Result<PhaseSymbol, ParseError> {
    Ok(match &e.node {
        Node::Num(c) => PhaseSymbol::constant(c.clone()),
        Node::Atom { name, annot } => {
            if let Some(a) = annot {
                return Err(ParseError::Syntax {
                    at: e.at,
                    expected: AFTER_OPERAND.iter().map(|s| s.to_string()).collect(),
                    found: format!("`{{{}}}`", a),
                });
            }
            match name.as_str() {
                "z" => PhaseSymbol::z(),
                "zb" => PhaseSymbol::zbar(),
                "i" => PhaseSymbol::constant(GaussRational::i()),
                _ => {
                    return Err(ParseError::UnknownAtom {
                        at: e.at,
                        name: name.clone(),
                    })
                }
            }
        }
        Node::Kron(_) => {
            return Err(ParseError::UnknownAtom {
                at: e.at,
                name: "kron".into(),
            })
        }
        Node::Neg(inner) => -symbol_value(inner, text)?,
        Node::Pow(base, n) => symbol_value(base, text)?.pow(*n),
        Node::Bin(op, l, r) => {
            let a = symbol_value(l, text)?;
            let b = symbol_value(r, text)?;
            match op {
                BinOp::Add => &a + &b,
                BinOp::Sub => &a - &b,
                BinOp::Mul => &a * &b,
                BinOp::Div => a.checked_div(&b).map_err(|_| ParseError::Syntax {
                    at: r.at,
                    expected: vec!["a divisor of the form c*(1 + z*zb)^k".into()],
                    found: format!("`{}`", text[r.start..r.end].trim()),
                })?,
            }
        }
    })
}

/// Parses a `--systems` list such as `boson,spin:1/2`.
pub fn parse_systems(text: &str) -> Result<Vec<SystemKind>, String> {
    text.split(',')
        .map(|item| {
            let item = item.trim();
            match item.split_once(':') {
                None if item == "boson" => Ok(SystemKind::Boson),
                Some(("spin", s)) => parse_spin(s).map(SystemKind::Spin),
                _ => Err(format!(
                    "unknown subsystem `{}` (expected `boson` or `spin:<s>`)",
                    item
                )),
            }
        })
        .collect()
}

/// Parses a half-integer spin label such as `3/2`, `1` or `1.5`.
pub fn parse_spin(text: &str) -> Result<Spin, String> {
    let bad = || format!("invalid spin `{}` (expected a positive half-integer)", text);
    let toks = lex(text.trim()).map_err(|_| bad())?;
    match toks.as_slice() {
        [Token {
            tok: Tok::Num(c), ..
        }, Token { tok: Tok::End, .. }]
            if c.is_real() =>
        {
            Spin::from_rational(&c.re).map_err(|_| bad())
        }
        _ => Err(bad()),
    }
}
