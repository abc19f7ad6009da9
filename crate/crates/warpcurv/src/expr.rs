//! Warp expression language: parsing, printing, and jet evaluation.
//!
//! Grammar (EBNF, also documented in the README):
//!
//! ```text
//! warp    = expr | "piecewise" "(" signed ";" expr ";" expr ")" ;
//! expr    = term { ("+" | "-") term } ;
//! term    = factor { ("*" | "/") factor } ;
//! factor  = "-" factor | power ;
//! power   = atom [ "^" factor ] ;                  (right-associative)
//! atom    = number | "t" | function "(" expr ")" | "(" expr ")" ;
//! function = "sqrt" | "sin" | "cos" | "cosh" | "sinh" | "exp" | "ln" ;
//! signed  = [ "-" | "+" ] number ;
//! number  = digits [ "." digits ] [ ("e" | "E") [ "-" | "+" ] digits ] ;
//! ```
//!
//! `piecewise` is recognized only as the outermost form; anywhere else it is a
//! dedicated parse error. Unary minus binds tighter than `*` and `/` but looser
//! than `^`, so `-t^2` parses as `-(t^2)`.

use std::fmt;

use thiserror::Error;

use crate::jet::Jet2;

/// Parse failure, with the byte offset into the source text.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("unexpected character {found:?} at byte {offset}")]
    UnexpectedCharacter { found: char, offset: usize },
    #[error("malformed number literal at byte {offset}")]
    InvalidNumber { offset: usize },
    #[error("unknown identifier {name:?} at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("piecewise is only allowed as the outermost form (byte {offset})")]
    PiecewiseNotTopLevel { offset: usize },
    #[error("expected {expected} at byte {offset}, found {found}")]
    UnexpectedToken { expected: &'static str, found: String, offset: usize },
    #[error("unexpected end of input (expected {expected})")]
    UnexpectedEnd { expected: &'static str },
    #[error("trailing input at byte {offset}")]
    TrailingInput { offset: usize },
}

/// Jet evaluation failure inside an expression.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{op} applied outside its domain (argument {arg})")]
    Domain { op: &'static str, arg: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{op} produced a non-finite jet")]
    NonFinite { op: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sqrt,
    Sin,
    Cos,
    Cosh,
    Sinh,
    Exp,
    Ln,
}

impl UnaryOp {
    fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Cosh => "cosh",
            UnaryOp::Sinh => "sinh",
            UnaryOp::Exp => "exp",
            UnaryOp::Ln => "ln",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Expression tree node.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    /// The base coordinate `t`.
    Var,
    Unary(UnaryOp, Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
}

/// A parsed warp expression together with the text it came from.
#[derive(Debug, Clone)]
pub struct WarpExpr {
    root: Node,
    source: String,
}

/// Outcome of [`parse_warp`]: either a single smooth expression or the
/// two branches of a piecewise warp split at a junction point.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedWarp {
    Smooth(WarpExpr),
    Piecewise { junction: f64, left: WarpExpr, right: WarpExpr },
}

impl PartialEq for WarpExpr {
    /// Structural equality on the tree; the recorded source text is ignored.
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

impl WarpExpr {
    pub fn from_node(root: Node) -> Self {
        let source = render(&root);
        WarpExpr { root, source }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// The text this expression was parsed from (canonical rendering when
    /// built programmatically).
    pub fn source(&self) -> &str {
        &self.source
    }

    /// Evaluate the order-2 jet at `t` by forward propagation.
    pub fn eval_jet(&self, t: f64) -> Result<Jet2, EvalError> {
        eval_node(&self.root, Jet2::variable(t))
    }
}

fn eval_node(node: &Node, t: Jet2) -> Result<Jet2, EvalError> {
    let jet = match node {
        Node::Const(c) => Jet2::constant(*c),
        Node::Var => t,
        Node::Unary(op, inner) => {
            let u = eval_node(inner, t)?;
            match op {
                UnaryOp::Neg => u.neg(),
                UnaryOp::Sqrt => {
                    if u.value < 0.0 {
                        return Err(EvalError::Domain { op: "sqrt", arg: u.value });
                    }
                    u.sqrt()
                }
                UnaryOp::Sin => u.sin(),
                UnaryOp::Cos => u.cos(),
                UnaryOp::Cosh => u.cosh(),
                UnaryOp::Sinh => u.sinh(),
                UnaryOp::Exp => u.exp(),
                UnaryOp::Ln => {
                    if u.value <= 0.0 {
                        return Err(EvalError::Domain { op: "ln", arg: u.value });
                    }
                    u.ln()
                }
            }
        }
        Node::Binary(op, lhs, rhs) => {
            let a = eval_node(lhs, t)?;
            let b = eval_node(rhs, t)?;
            match op {
                BinOp::Add => a.add(b),
                BinOp::Sub => a.sub(b),
                BinOp::Mul => a.mul(b),
                BinOp::Div => {
                    if b.value == 0.0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    a.div(b)
                }
                BinOp::Pow => {
                    // A constant exponent keeps negative and zero bases usable
                    // (integer powers); a variable exponent needs base > 0.
                    if b.d1 == 0.0 && b.d2 == 0.0 {
                        a.powf_const(b.value)
                    } else if a.value > 0.0 {
                        a.pow(b)
                    } else {
                        return Err(EvalError::Domain { op: "pow", arg: a.value });
                    }
                }
            }
        }
    };
    if jet.is_finite() {
        Ok(jet)
    } else {
        Err(EvalError::NonFinite { op: op_name(node) })
    }
}

fn op_name(node: &Node) -> &'static str {
    match node {
        Node::Const(_) => "constant",
        Node::Var => "t",
        Node::Unary(op, _) => op.name(),
        Node::Binary(BinOp::Add, ..) => "+",
        Node::Binary(BinOp::Sub, ..) => "-",
        Node::Binary(BinOp::Mul, ..) => "*",
        Node::Binary(BinOp::Div, ..) => "/",
        Node::Binary(BinOp::Pow, ..) => "^",
    }
}

// Printer. Precedence levels: + - (1), * / (2), unary - (3), ^ (4), atoms (5).
// Parenthesization is chosen so that parsing the rendering reproduces the tree
// node for node. Constants are printed with Rust's shortest round-trip float
// notation; a programmatically built negative constant renders with a leading
// minus and therefore reparses as a negation node.

fn prec(node: &Node) -> u8 {
    match node {
        Node::Const(_) | Node::Var => 5,
        Node::Unary(UnaryOp::Neg, _) => 3,
        Node::Unary(..) => 5,
        Node::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
        Node::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
        Node::Binary(BinOp::Pow, ..) => 4,
    }
}

fn render(node: &Node) -> String {
    let mut out = String::new();
    write_node(&mut out, node);
    out
}

fn write_node(out: &mut String, node: &Node) {
    match node {
        Node::Const(c) => out.push_str(&format!("{c:?}")),
        Node::Var => out.push('t'),
        Node::Unary(UnaryOp::Neg, inner) => {
            out.push('-');
            write_child(out, inner, prec(inner) < 3);
        }
        Node::Unary(op, inner) => {
            out.push_str(op.name());
            out.push('(');
            write_node(out, inner);
            out.push(')');
        }
        Node::Binary(op, lhs, rhs) => {
            let (sym, p) = match op {
                BinOp::Add => (" + ", 1),
                BinOp::Sub => (" - ", 1),
                BinOp::Mul => (" * ", 2),
                BinOp::Div => (" / ", 2),
                BinOp::Pow => ("^", 4),
            };
            if *op == BinOp::Pow {
                write_child(out, lhs, prec(lhs) <= p);
                out.push_str(sym);
                write_child(out, rhs, prec(rhs) < p);
            } else {
                write_child(out, lhs, prec(lhs) < p);
                out.push_str(sym);
                write_child(out, rhs, prec(rhs) <= p);
            }
        }
    }
}

fn write_child(out: &mut String, node: &Node, parens: bool) {
    if parens {
        out.push('(');
        write_node(out, node);
        out.push(')');
    } else {
        write_node(out, node);
    }
}

impl fmt::Display for WarpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(&self.root))
    }
}

// Lexer.

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(f64),
    Ident(String),
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Semi,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Number(n) => format!("number {n:?}"),
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::Semi => "';'".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => { toks.push((Tok::LParen, i)); i += 1; }
            ')' => { toks.push((Tok::RParen, i)); i += 1; }
            '+' => { toks.push((Tok::Plus, i)); i += 1; }
            '-' => { toks.push((Tok::Minus, i)); i += 1; }
            '*' => { toks.push((Tok::Star, i)); i += 1; }
            '/' => { toks.push((Tok::Slash, i)); i += 1; }
            '^' => { toks.push((Tok::Caret, i)); i += 1; }
            ';' => { toks.push((Tok::Semi, i)); i += 1; }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    if i >= bytes.len() || !bytes[i].is_ascii_digit() {
                        return Err(ParseError::InvalidNumber { offset: start });
                    }
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let value: f64 = text[start..i]
                    .parse()
                    .map_err(|_| ParseError::InvalidNumber { offset: start })?;
                toks.push((Tok::Number(value), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => return Err(ParseError::UnexpectedCharacter { found: c, offset: i }),
        }
    }
    Ok(toks)
}

// Parser.

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(Tok, usize)> {
        self.toks.get(self.pos)
    }

    fn next(&mut self, expected: &'static str) -> Result<&(Tok, usize), ParseError> {
        let t = self
            .toks
            .get(self.pos)
            .ok_or(ParseError::UnexpectedEnd { expected })?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: Tok, expected: &'static str) -> Result<usize, ParseError> {
        let (tok, off) = self.next(expected)?;
        if *tok == want {
            Ok(*off)
        } else {
            Err(ParseError::UnexpectedToken {
                expected,
                found: tok.describe(),
                offset: *off,
            })
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        while let Some((tok, _)) = self.peek() {
            let op = match tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.factor()?;
        while let Some((tok, _)) = self.peek() {
            let op = match tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        if let Some((Tok::Minus, _)) = self.peek() {
            self.pos += 1;
            let inner = self.factor()?;
            return Ok(Node::Unary(UnaryOp::Neg, Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if let Some((Tok::Caret, _)) = self.peek() {
            self.pos += 1;
            let exponent = self.factor()?;
            return Ok(Node::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let (tok, off) = self.next("an operand")?;
        let off = *off;
        match tok.clone() {
            Tok::Number(n) => Ok(Node::Const(n)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "t" => Ok(Node::Var),
                "piecewise" => Err(ParseError::PiecewiseNotTopLevel { offset: off }),
                "sqrt" | "sin" | "cos" | "cosh" | "sinh" | "exp" | "ln" => {
                    let op = match name.as_str() {
                        "sqrt" => UnaryOp::Sqrt,
                        "sin" => UnaryOp::Sin,
                        "cos" => UnaryOp::Cos,
                        "cosh" => UnaryOp::Cosh,
                        "sinh" => UnaryOp::Sinh,
                        "exp" => UnaryOp::Exp,
                        _ => UnaryOp::Ln,
                    };
                    self.expect(Tok::LParen, "'('")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Node::Unary(op, Box::new(arg)))
                }
                _ => Err(ParseError::UnknownIdentifier { name, offset: off }),
            },
            other => Err(ParseError::UnexpectedToken {
                expected: "an operand",
                found: other.describe(),
                offset: off,
            }),
        }
    }

    fn signed_number(&mut self) -> Result<f64, ParseError> {
        let mut sign = 1.0;
        loop {
            match self.peek() {
                Some((Tok::Minus, _)) => {
                    sign = -sign;
                    self.pos += 1;
                }
                Some((Tok::Plus, _)) => {
                    self.pos += 1;
                }
                _ => break,
            }
        }
        let (tok, off) = self.next("a number")?;
        match tok {
            Tok::Number(n) => Ok(sign * n),
            other => Err(ParseError::UnexpectedToken {
                expected: "a number",
                found: other.describe(),
                offset: *off,
            }),
        }
    }

    fn finished(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some((_, off)) => Err(ParseError::TrailingInput { offset: *off }),
        }
    }
}

/// Parse a warp: a single expression, or `piecewise(p; left; right)` at the
/// top level only.
pub fn parse_warp(text: &str) -> Result<ParsedWarp, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, pos: 0 };
    if let Some((Tok::Ident(name), _)) = p.peek() {
        if name == "piecewise" {
            p.pos += 1;
            p.expect(Tok::LParen, "'('")?;
            let junction = p.signed_number()?;
            p.expect(Tok::Semi, "';'")?;
            let left_start = p.pos;
            let left = p.expr()?;
            let left_src = span_text(text, &toks, left_start, p.pos);
            p.expect(Tok::Semi, "';'")?;
            let right_start = p.pos;
            let right = p.expr()?;
            let right_src = span_text(text, &toks, right_start, p.pos);
            p.expect(Tok::RParen, "')'")?;
            p.finished()?;
            return Ok(ParsedWarp::Piecewise {
                junction,
                left: WarpExpr { root: left, source: left_src },
                right: WarpExpr { root: right, source: right_src },
            });
        }
    }
    let root = p.expr()?;
    p.finished()?;
    Ok(ParsedWarp::Smooth(WarpExpr { root, source: text.trim().to_string() }))
}

/// Parse a plain expression, rejecting the piecewise form.
pub fn parse_expr(text: &str) -> Result<WarpExpr, ParseError> {
    match parse_warp(text)? {
        ParsedWarp::Smooth(e) => Ok(e),
        ParsedWarp::Piecewise { .. } => Err(ParseError::PiecewiseNotTopLevel { offset: 0 }),
    }
}

fn span_text(text: &str, toks: &[(Tok, usize)], start: usize, end: usize) -> String {
    let from = toks[start].1;
    let to = toks
        .get(end)
        .map(|(_, off)| *off)
        .unwrap_or(text.len());
    text[from..to].trim().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expr(text: &str) -> WarpExpr {
        parse_expr(text).unwrap()
    }

    #[test]
    fn parses_radial_profile_structure() {
        // sqrt(2/t - 1) is sqrt applied to (2/t) - 1
        let e = expr("sqrt(2/t - 1)");
        let expected = Node::Unary(
            UnaryOp::Sqrt,
            Box::new(Node::Binary(
                BinOp::Sub,
                Box::new(Node::Binary(
                    BinOp::Div,
                    Box::new(Node::Const(2.0)),
                    Box::new(Node::Var),
                )),
                Box::new(Node::Const(1.0)),
            )),
        );
        assert_eq!(*e.root(), expected);
    }

    #[test]
    fn precedence_and_associativity() {
        // 2 + 3 * 4 ^ 2 = 2 + (3 * (4^2)) = 50
        let e = expr("2 + 3 * 4 ^ 2");
        assert_eq!(e.eval_jet(0.0).unwrap().value, 50.0);
        // right-associative power: 2^3^2 = 2^9
        let e = expr("2^3^2");
        assert_eq!(e.eval_jet(0.0).unwrap().value, 512.0);
        // unary minus binds looser than ^: -2^2 = -4
        let e = expr("-2^2");
        assert_eq!(e.eval_jet(0.0).unwrap().value, -4.0);
        // left-associative subtraction: 8 - 3 - 2 = 3
        let e = expr("8 - 3 - 2");
        assert_eq!(e.eval_jet(0.0).unwrap().value, 3.0);
    }

    #[test]
    fn piecewise_top_level() {
        match parse_warp("piecewise(0; 1 - t; 1 + t)").unwrap() {
            ParsedWarp::Piecewise { junction, left, right } => {
                assert_eq!(junction, 0.0);
                assert_eq!(left.source(), "1 - t");
                assert_eq!(right.source(), "1 + t");
            }
            other => panic!("expected piecewise, got {other:?}"),
        }
    }

    #[test]
    fn piecewise_negative_junction() {
        match parse_warp("piecewise(-0.5; 1; 1)").unwrap() {
            ParsedWarp::Piecewise { junction, .. } => assert_eq!(junction, -0.5),
            other => panic!("expected piecewise, got {other:?}"),
        }
    }

    #[test]
    fn nested_piecewise_rejected() {
        let err = parse_warp("1 + piecewise(0; t; t)").unwrap_err();
        assert_eq!(err, ParseError::PiecewiseNotTopLevel { offset: 4 });
    }

    #[test]
    fn unknown_identifier_offset() {
        let err = parse_warp("cosh(t) + tan(t)").unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownIdentifier { name: "tan".into(), offset: 10 }
        );
    }

    #[test]
    fn syntax_error_offsets() {
        assert_eq!(
            parse_warp("1 + * 2").unwrap_err(),
            ParseError::UnexpectedToken {
                expected: "an operand",
                found: "'*'".into(),
                offset: 4
            }
        );
        assert_eq!(
            parse_warp("(1 + 2").unwrap_err(),
            ParseError::UnexpectedEnd { expected: "')'" }
        );
        assert_eq!(
            parse_warp("1 2").unwrap_err(),
            ParseError::TrailingInput { offset: 2 }
        );
        assert_eq!(
            parse_warp("1.x").unwrap_err(),
            ParseError::InvalidNumber { offset: 0 }
        );
        assert_eq!(
            parse_warp("t @ 2").unwrap_err(),
            ParseError::UnexpectedCharacter { found: '@', offset: 2 }
        );
    }

    #[test]
    fn scientific_notation() {
        let e = expr("1e-3 + 2.5E2");
        assert_eq!(e.eval_jet(0.0).unwrap().value, 0.001 + 250.0);
    }

    #[test]
    fn display_round_trips_fixed_cases() {
        for src in [
            "cosh(t)",
            "sqrt(2/t - 1)",
            "1 - t",
            "-t^2",
            "(1 + t) * (1 - t)",
            "2^3^2",
            "t / (2 * t + 1)",
            "-(t + 1)",
            "exp(-t) * sin(3.5 * t)",
            "t - (t - 1)",
        ] {
            let first = expr(src);
            let printed = first.to_string();
            let second = parse_expr(&printed)
                .unwrap_or_else(|e| panic!("reparse of {printed:?} failed: {e}"));
            assert_eq!(first, second, "round trip changed {src:?} -> {printed:?}");
        }
    }

    #[test]
    fn eval_domain_errors() {
        assert_eq!(
            expr("sqrt(t)").eval_jet(-1.0).unwrap_err(),
            EvalError::Domain { op: "sqrt", arg: -1.0 }
        );
        assert_eq!(
            expr("ln(t)").eval_jet(0.0).unwrap_err(),
            EvalError::Domain { op: "ln", arg: 0.0 }
        );
        assert_eq!(
            expr("1/t").eval_jet(0.0).unwrap_err(),
            EvalError::DivisionByZero
        );
    }

    #[test]
    fn sqrt_jet_blows_up_at_interior_zero() {
        // sqrt(t^2) has value 0 at t = 0 but an infinite one-sided derivative,
        // which must surface as an error rather than a silent inf.
        let err = expr("sqrt(t^2)").eval_jet(0.0).unwrap_err();
        assert_eq!(err, EvalError::NonFinite { op: "sqrt" });
    }
}
