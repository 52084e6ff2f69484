use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Log,
    Exp,
    Sqrt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Expression tree in the single variable `x`.
///
/// The right operand of [`BinaryOp::Pow`] never contains `x`; the parser
/// enforces this.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var => false,
            Expr::Unary(_, a) => a.is_constant(),
            Expr::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Const(c) if *c < 0.0 => 2,
            Expr::Const(_) | Expr::Var => 5,
            Expr::Unary(UnaryOp::Neg, _) => 2,
            Expr::Unary(..) => 5,
            Expr::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 0,
            Expr::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 1,
            Expr::Binary(BinaryOp::Pow, ..) => 3,
        }
    }
}

/// Prints in the input grammar with the minimal parentheses needed to parse
/// back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var => f.write_str("x"),
            Expr::Unary(UnaryOp::Neg, a) => {
                f.write_str("-")?;
                wrap(f, a, 2)
            }
            Expr::Unary(op, a) => {
                let name = match op {
                    UnaryOp::Log => "log",
                    UnaryOp::Exp => "exp",
                    UnaryOp::Sqrt => "sqrt",
                    UnaryOp::Neg => unreachable!(),
                };
                write!(f, "{name}({a})")
            }
            Expr::Binary(op, a, b) => {
                let (sym, lmin, rmin) = match op {
                    BinaryOp::Add => ("+", 0, 1),
                    BinaryOp::Sub => ("-", 0, 1),
                    BinaryOp::Mul => ("*", 1, 2),
                    BinaryOp::Div => ("/", 1, 2),
                    BinaryOp::Pow => ("^", 4, 2),
                };
                wrap(f, a, lmin)?;
                f.write_str(sym)?;
                wrap(f, b, rmin)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        offset,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' | b'(' | b')' => {
                out.push((Tok::Sym(c as char), i));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j >= bytes.len() || !bytes[j].is_ascii_digit() {
                        return Err(err(j, "expected digits in exponent"));
                    }
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
                let lit = &text[start..i];
                let v: f64 = lit
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| err(start, format!("invalid number `{lit}`")))?;
                out.push((Tok::Num(v), start));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(err(
                    i,
                    format!("unexpected character `{}`", ch.escape_debug()),
                ));
            }
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

/// Bound on tree height, so that parsing, evaluation and drop never recurse
/// deeply on adversarial input. Each chained binary operator counts as one
/// level, as does each nested group.
const MAX_DEPTH: usize = 500;

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(err(
                self.offset(),
                format!("expected `{c}`, found {}", self.peek()),
            ))
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(err(self.offset(), "expression nested too deeply"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr> {
        let base = self.depth;
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinaryOp::Add
            } else if self.eat('-') {
                BinaryOp::Sub
            } else {
                break;
            };
            self.enter()?;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        self.depth = base;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let base = self.depth;
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinaryOp::Mul
            } else if self.eat('/') {
                BinaryOp::Div
            } else {
                break;
            };
            self.enter()?;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        self.depth = base;
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        self.enter()?;
        let e = if self.eat('-') {
            Expr::Unary(UnaryOp::Neg, Box::new(self.unary()?))
        } else {
            self.power()?
        };
        self.depth -= 1;
        Ok(e)
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let at = self.offset();
        let exponent = self.unary()?;
        if !exponent.is_constant() {
            return Err(err(at, "exponent must be a constant expression"));
        }
        Ok(Expr::Binary(
            BinaryOp::Pow,
            Box::new(base),
            Box::new(exponent),
        ))
    }

    fn primary(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Ident(name) => {
                let op = match name.as_str() {
                    "x" => return Ok(Expr::Var),
                    "log" => UnaryOp::Log,
                    "exp" => UnaryOp::Exp,
                    "sqrt" => UnaryOp::Sqrt,
                    _ => return Err(err(at, format!("unknown identifier `{name}`"))),
                };
                self.expect('(')?;
                let arg = self.expr()?;
                self.expect(')')?;
                Ok(Expr::Unary(op, Box::new(arg)))
            }
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            other => Err(err(
                at,
                format!("expected a number, `x`, a function call or `(`, found {other}"),
            )),
        }
    }
}

/// Parses an expression in `x`. Errors carry the byte offset of the
/// offending token.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        depth: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(err(p.offset(), format!("unexpected {}", p.peek())));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn offset_of(text: &str) -> usize {
        match parse_expr(text) {
            Err(Error::Parse { offset, .. }) => offset,
            other => panic!("{text}: expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn shapes() {
        assert_eq!(
            parse_expr("log(x)").unwrap(),
            Expr::Unary(UnaryOp::Log, Box::new(Expr::Var))
        );
        // unary minus binds looser than ^
        let e = parse_expr("-x^2").unwrap();
        assert!(
            matches!(e, Expr::Unary(UnaryOp::Neg, ref a) if matches!(**a, Expr::Binary(BinaryOp::Pow, ..)))
        );
        // ^ is right-associative
        let e = parse_expr("2^3^2").unwrap();
        match e {
            Expr::Binary(BinaryOp::Pow, a, b) => {
                assert_eq!(*a, Expr::Const(2.0));
                assert!(matches!(*b, Expr::Binary(BinaryOp::Pow, ..)));
            }
            _ => panic!(),
        }
        // - and / are left-associative
        assert_eq!(parse_expr("1-2-3").unwrap().to_string(), "1.0-2.0-3.0");
        assert_eq!(parse_expr("1-(2-3)").unwrap().to_string(), "1.0-(2.0-3.0)");
        assert!(parse_expr("1.5e-3 * x").is_ok());
        assert!(parse_expr("x^-0.5").is_ok());
    }

    #[test]
    fn error_offsets() {
        assert_eq!(offset_of("x^^2"), 2);
        assert_eq!(offset_of("2x"), 1);
        assert_eq!(offset_of("x^x"), 2);
        assert_eq!(offset_of("foo(x)"), 0);
        assert_eq!(offset_of("log x"), 4);
        assert_eq!(offset_of("(x+1"), 4);
        assert_eq!(offset_of(""), 0);
        assert_eq!(offset_of("x $"), 2);
        assert_eq!(offset_of("1e+"), 3);
        assert!(matches!(
            parse_expr(&"(".repeat(10_000)),
            Err(Error::Parse { ref message, .. }) if message.contains("nested")
        ));
        let long_sum = vec!["x"; 10_000].join("+");
        assert!(parse_expr(&long_sum).is_err());
        assert!(parse_expr(&vec!["x"; 100].join("*")).is_ok());
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "-(x+1)*log(x+1)",
            "x^0.5/(1+x)",
            "(-x)^2",
            "-x^2",
            "2^-1",
            "exp(-x)-sqrt(x)*(x-1)",
            "(x^2)^3",
            "1/(x/2)",
            "--x",
        ] {
            let e = parse_expr(s).unwrap();
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e, "{s} -> {e}");
        }
    }
}
