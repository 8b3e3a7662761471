//! Recursive-descent parser for the formula grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := unary ('^' factor)?
//! unary  := '-' unary | atom
//! atom   := number | ident | ident '(' args ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds a signed atom, i.e. `-x^2` parses as
//! `(-x)^2`. Known identifiers are the variables `z0`..`z9`, `x`, `s`, `q`,
//! `t` (each only when listed in `allowed_vars`) and the function names
//! `exp`, `log`, `sin`, `cos`, `tan`, `tanh`, `sqrt`, `clamp`.

use super::{Expr, UnaryOp, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdent { offset: usize, name: String },
    #[error("`{name}` expects {expected} argument(s), got {got} (at byte {offset})")]
    ArityMismatch {
        offset: usize,
        name: String,
        expected: usize,
        got: usize,
    },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdent { offset, .. }
            | ParseError::ArityMismatch { offset, .. } => *offset,
        }
    }
}

/// Parses `text` over the given variable scope.
pub fn parse(text: &str, allowed_vars: &[Var]) -> Result<Expr, ParseError> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        allowed: allowed_vars,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    allowed: &'a [Var],
}

impl<'a> Parser<'a> {
    fn syntax(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = Expr::add(acc, self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = Expr::sub(acc, self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = Expr::mul(acc, self.factor()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    acc = Expr::div(acc, self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.unary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exponent = self.factor()?;
            Ok(Expr::pow(base, exponent))
        } else {
            Ok(base)
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            Ok(Expr::neg(self.unary()?))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(self.syntax("expected a number, identifier or `(`")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.bytes.len() && self.bytes[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        // optional exponent, only when followed by digits
        if self.pos < self.bytes.len() && matches!(self.bytes[self.pos], b'e' | b'E') {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.bytes.len() && matches!(self.bytes[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
            offset: start,
            message: format!("invalid number literal `{text}`"),
        })?;
        Ok(Expr::Const(value))
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .to_string();

        if self.peek() == Some(b'(') {
            return self.call(start, name);
        }

        let var = var_from_name(&name).ok_or_else(|| ParseError::UnknownIdent {
            offset: start,
            name: name.clone(),
        })?;
        if !self.allowed.contains(&var) {
            return Err(ParseError::UnknownIdent {
                offset: start,
                name,
            });
        }
        Ok(Expr::Var(var))
    }

    fn call(&mut self, start: usize, name: String) -> Result<Expr, ParseError> {
        self.expect(b'(')?;
        let mut args = vec![self.expr()?];
        while self.eat(b',') {
            args.push(self.expr()?);
        }
        self.expect(b')')?;

        let unary = match name.as_str() {
            "exp" => Some(UnaryOp::Exp),
            "log" => Some(UnaryOp::Log),
            "sin" => Some(UnaryOp::Sin),
            "cos" => Some(UnaryOp::Cos),
            "tan" => Some(UnaryOp::Tan),
            "tanh" => Some(UnaryOp::Tanh),
            "sqrt" => Some(UnaryOp::Sqrt),
            _ => None,
        };
        if let Some(op) = unary {
            if args.len() != 1 {
                return Err(ParseError::ArityMismatch {
                    offset: start,
                    name,
                    expected: 1,
                    got: args.len(),
                });
            }
            return Ok(Expr::unary(op, args.pop().unwrap()));
        }
        if name == "clamp" {
            if args.len() != 3 {
                return Err(ParseError::ArityMismatch {
                    offset: start,
                    name,
                    expected: 3,
                    got: args.len(),
                });
            }
            let hi = args.pop().unwrap();
            let lo = args.pop().unwrap();
            let arg = args.pop().unwrap();
            let (lo, hi) = match (lo, hi) {
                (Expr::Const(lo), Expr::Const(hi)) => (lo, hi),
                _ => {
                    return Err(ParseError::Syntax {
                        offset: start,
                        message: "clamp bounds must be constants".to_string(),
                    })
                }
            };
            return Ok(Expr::clamp(arg, lo, hi));
        }
        Err(ParseError::UnknownIdent {
            offset: start,
            name,
        })
    }
}

fn var_from_name(name: &str) -> Option<Var> {
    match name {
        "x" => Some(Var::X),
        "s" => Some(Var::S),
        "q" => Some(Var::Q),
        "t" => Some(Var::T),
        _ => {
            let digits = name.strip_prefix('z')?;
            if digits.len() == 1 && digits.as_bytes()[0].is_ascii_digit() {
                Some(Var::Z(digits.parse().ok()?))
            } else {
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Bindings;

    const Z0: &[Var] = &[Var::Z(0)];

    #[test]
    fn parses_cubic_nonlinearity() {
        let e = parse("z0 - z0^3", Z0).unwrap();
        assert_eq!(
            e,
            Expr::sub(Expr::z(0), Expr::powi(Expr::z(0), 3))
        );
    }

    #[test]
    fn parses_unary_function() {
        let e = parse("cos(x)", &[Var::X]).unwrap();
        assert_eq!(e, Expr::unary(UnaryOp::Cos, Expr::x()));
    }

    #[test]
    fn reports_syntax_error_offset() {
        let err = parse("z0 +", Z0).unwrap_err();
        assert_eq!(err.offset(), 4);
        assert!(matches!(err, ParseError::Syntax { .. }));
    }

    #[test]
    fn rejects_unknown_and_out_of_scope_identifiers() {
        let err = parse("y + 1", Z0).unwrap_err();
        assert!(matches!(err, ParseError::UnknownIdent { .. }));
        let err = parse("x + 1", Z0).unwrap_err();
        assert!(matches!(err, ParseError::UnknownIdent { .. }));
    }

    #[test]
    fn rejects_wrong_arity() {
        let err = parse("sin(x, x)", &[Var::X]).unwrap_err();
        assert!(matches!(err, ParseError::ArityMismatch { expected: 1, got: 2, .. }));
        let err = parse("clamp(x, 1)", &[Var::X]).unwrap_err();
        assert!(matches!(err, ParseError::ArityMismatch { expected: 3, got: 2, .. }));
    }

    #[test]
    fn power_is_right_associative_and_binds_signed_atom() {
        // x^2^3 = x^(2^3) = x^8
        let e = parse("x^2^3", &[Var::X]).unwrap();
        assert_eq!(e, Expr::powi(Expr::x(), 8));
        // per the grammar, -x^2 is (-x)^2
        let e = parse("-x^2", &[Var::X]).unwrap();
        let v = e.evaluate(&Bindings::x(3.0)).unwrap();
        assert_eq!(v, 9.0);
    }

    #[test]
    fn parses_clamp_and_precedence() {
        let e = parse("clamp(z0, -4, 4)", Z0).unwrap();
        assert_eq!(
            e.evaluate(&Bindings::jet(&[7.0])).unwrap(),
            4.0
        );
        let e = parse("1 + 2*3^2", &[]).unwrap();
        assert_eq!(e, Expr::Const(19.0));
    }
}
