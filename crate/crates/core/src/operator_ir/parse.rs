//! Recursive-descent parser for the plain-text expression grammar.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary ('*' unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' '-'? integer)?
//! primary := integer ('/' integer)? | constant | 'i'
//!          | ('x' | 'p' | 'alpha' | 'A') '[' axis ']' | 'beta' | 'Phi'
//!          | 'd' '[' axis ']' '(' sum ')'
//!          | '(' sum ')' | '[' sum ',' sum ']' | '{' sum ',' sum '}'
//! ```
//!
//! Columns in error messages are 1-based character positions.

use num_traits::Zero;

use crate::error::{Error, Result};

use super::atom::Atom;
use super::canonical::{anticommutator, canonicalize, commutator, coordinate_derivative, AlgebraContext, MomentumRule};
use super::expr::OperatorExpr;
use super::scalar::{Constant, Rational, ScalarCoeff};

/// Parsed expression tree. Commutator nodes are kept so that callers can
/// evaluate them under different algebras (or numerically).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Number(Rational),
    Imaginary,
    Constant(Constant),
    Atom(Atom),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Commutator(Box<Expr>, Box<Expr>),
    Anticommutator(Box<Expr>, Box<Expr>),
    Partial(u8, Box<Expr>),
}

impl Expr {
    pub fn commutator(a: Expr, b: Expr) -> Expr {
        Expr::Commutator(Box::new(a), Box::new(b))
    }

    /// Wraps an already evaluated expression as a literal sum of products.
    pub fn literal(e: &OperatorExpr) -> Expr {
        let mut acc: Option<Expr> = None;
        for t in e.terms() {
            let mut prod = coeff_literal(&t.coeff);
            for a in t.factors {
                prod = Expr::Mul(Box::new(prod), Box::new(Expr::Atom(a)));
            }
            acc = Some(match acc {
                None => prod,
                Some(s) => Expr::Add(Box::new(s), Box::new(prod)),
            });
        }
        acc.unwrap_or(Expr::Number(Rational::zero()))
    }

    /// Evaluates to an operator expression. Products keep the written factor
    /// order; commutator, anticommutator and derivative nodes are resolved
    /// (and canonicalized) under `ctx`.
    pub fn eval(&self, ctx: &AlgebraContext) -> Result<OperatorExpr> {
        Ok(match self {
            Expr::Number(r) => OperatorExpr::scalar(ScalarCoeff::rational(*r)),
            Expr::Imaginary => OperatorExpr::scalar(ScalarCoeff::i()),
            Expr::Constant(c) => OperatorExpr::constant(*c),
            Expr::Atom(a) => OperatorExpr::atom(*a),
            Expr::Neg(a) => -a.eval(ctx)?,
            Expr::Add(a, b) => a.eval(ctx)? + b.eval(ctx)?,
            Expr::Sub(a, b) => a.eval(ctx)? - b.eval(ctx)?,
            Expr::Mul(a, b) => a.eval(ctx)? * b.eval(ctx)?,
            Expr::Pow(a, n) => {
                let base = a.eval(ctx)?;
                if *n >= 0 {
                    (0..*n).fold(OperatorExpr::one(), |acc, _| &acc * &base)
                } else {
                    let inv = base
                        .as_scalar()
                        .and_then(|c| c.inverse())
                        .ok_or_else(|| Error::NonPolynomial(format!("negative power of a non-scalar or zero: {base:?}")))?;
                    OperatorExpr::scalar(inv.pow(n.unsigned_abs()))
                }
            }
            Expr::Commutator(a, b) => commutator(&a.eval(ctx)?, &b.eval(ctx)?, ctx)?,
            Expr::Anticommutator(a, b) => anticommutator(&a.eval(ctx)?, &b.eval(ctx)?, ctx)?,
            Expr::Partial(j, a) => canonicalize(&coordinate_derivative(&a.eval(ctx)?, *j, MomentumRule::Reject)?, ctx)?,
        })
    }
}

fn coeff_literal(c: &ScalarCoeff) -> Expr {
    let mut e = Expr::Number(c.rational_part());
    if c.is_imaginary() {
        e = Expr::Mul(Box::new(e), Box::new(Expr::Imaginary));
    }
    for (k, exp) in c.consts().factors() {
        let factor = if exp == 1 {
            Expr::Constant(k)
        } else {
            Expr::Pow(Box::new(Expr::Constant(k)), exp)
        };
        e = Expr::Mul(Box::new(e), Box::new(factor));
    }
    e
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer;

impl Lexer {
    fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse().map_err(|_| Error::Syntax {
                    column: col,
                    message: format!("integer literal `{s}` out of range"),
                })?;
                out.push((Tok::Int(n), col));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            } else if "+-*/^()[]{},".contains(c) {
                out.push((Tok::Sym(c), col));
                i += 1;
            } else {
                return Err(Error::Syntax {
                    column: col,
                    message: format!("unexpected character `{c}`"),
                });
            }
        }
        out.push((Tok::End, chars.len() + 1));
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
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
            Err(self.unexpected(&format!("expected `{c}`")))
        }
    }

    fn unexpected(&self, what: &str) -> Error {
        let found = match self.peek() {
            Tok::End => "end of input".to_string(),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
        };
        Error::Syntax {
            column: self.col(),
            message: format!("{what}, found {found}"),
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        loop {
            let col = self.col();
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.operand('+', col)?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.operand('-', col)?));
            } else {
                return Ok(lhs);
            }
        }
    }

    /// Operand following a binary operator; a missing operand is reported
    /// at the operator.
    fn operand(&mut self, op: char, col: usize) -> Result<Expr> {
        if matches!(self.peek(), Tok::End | Tok::Sym(')' | ']' | '}' | ',')) {
            return Err(Error::Syntax {
                column: col,
                message: format!("operator `{op}` is missing its right operand"),
            });
        }
        if op == '*' {
            self.unary()
        } else {
            self.product()
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let col = self.col();
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.operand('*', col)?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        let col = self.col();
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.operand('-', col)?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        let col = self.col();
        if !self.eat('^') {
            return Ok(base);
        }
        let negative = self.eat('-');
        match self.bump() {
            (Tok::Int(n), _) => {
                let n = i32::try_from(n).map_err(|_| Error::Syntax {
                    column: col,
                    message: "exponent out of range".into(),
                })?;
                Ok(Expr::Pow(Box::new(base), if negative { -n } else { n }))
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected("expected integer exponent"))
            }
        }
    }

    fn axis(&mut self) -> Result<u8> {
        self.expect('[')?;
        let col = self.col();
        let axis = match self.bump() {
            (Tok::Int(n @ 1..=3), _) => n as u8,
            (Tok::Int(n), _) => {
                return Err(Error::Syntax {
                    column: col,
                    message: format!("axis index {n} outside 1..=3"),
                })
            }
            _ => {
                self.pos -= 1;
                return Err(self.unexpected("expected axis index"));
            }
        };
        self.expect(']')?;
        Ok(axis)
    }

    fn primary(&mut self) -> Result<Expr> {
        let col = self.col();
        match self.bump().0 {
            Tok::Int(n) => {
                if self.eat('/') {
                    match self.bump() {
                        (Tok::Int(0), c) => Err(Error::Syntax {
                            column: c,
                            message: "zero denominator".into(),
                        }),
                        (Tok::Int(d), _) => Ok(Expr::Number(Rational::new(n, d))),
                        _ => {
                            self.pos -= 1;
                            Err(self.unexpected("expected integer denominator"))
                        }
                    }
                } else {
                    Ok(Expr::Number(Rational::from_integer(n)))
                }
            }
            Tok::Ident(name) => self.identifier(&name, col),
            Tok::Sym('(') => {
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym(open @ ('[' | '{')) => {
                let a = self.sum()?;
                self.expect(',')?;
                let b = self.sum()?;
                if open == '[' {
                    self.expect(']')?;
                    Ok(Expr::Commutator(Box::new(a), Box::new(b)))
                } else {
                    self.expect('}')?;
                    Ok(Expr::Anticommutator(Box::new(a), Box::new(b)))
                }
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected("expected an operand"))
            }
        }
    }

    fn identifier(&mut self, name: &str, col: usize) -> Result<Expr> {
        Ok(match name {
            "x" => Expr::Atom(Atom::Position(self.axis()?)),
            "p" => Expr::Atom(Atom::Momentum(self.axis()?)),
            "alpha" => Expr::Atom(Atom::Alpha(self.axis()?)),
            "A" => Expr::Atom(Atom::AField(self.axis()?)),
            "beta" => Expr::Atom(Atom::Beta),
            "Phi" => Expr::Atom(Atom::Phi),
            "i" => Expr::Imaginary,
            "d" => {
                let j = self.axis()?;
                self.expect('(')?;
                let inner = self.sum()?;
                self.expect(')')?;
                Expr::Partial(j, Box::new(inner))
            }
            other => match Constant::from_name(other) {
                Some(c) => Expr::Constant(c),
                None => {
                    return Err(Error::UnknownSymbol {
                        name: other.to_string(),
                        column: col,
                    })
                }
            },
        })
    }
}

/// Parses text into an expression tree.
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: Lexer::tokenize(text)?,
        pos: 0,
    };
    let e = p.sum()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("expected an operator or end of input"));
    }
    Ok(e)
}

/// Parses and evaluates in the commutative algebra. Products keep their
/// written order; bracket nodes are resolved.
pub fn parse_expr(text: &str) -> Result<OperatorExpr> {
    parse(text)?.eval(&AlgebraContext::commutative())
}

/// Parses and evaluates under `ctx`, returning the canonical form.
pub fn parse_canonical(text: &str, ctx: &AlgebraContext) -> Result<OperatorExpr> {
    canonicalize(&parse(text)?.eval(ctx)?, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_ir::render_plain;

    #[test]
    fn product_keeps_written_order() {
        let e = parse_expr("c*alpha[1]*p[1]").unwrap();
        assert_eq!(e, OperatorExpr::term(ScalarCoeff::constant(Constant::C), vec![Atom::Alpha(1), Atom::Momentum(1)]));
    }

    #[test]
    fn commutator_node_evaluates() {
        let tree = parse("[x[1], p[1]]").unwrap();
        assert!(matches!(tree, Expr::Commutator(..)));
        let v = tree.eval(&AlgebraContext::commutative()).unwrap();
        assert_eq!(render_plain(&v), "i*hbar");
    }

    #[test]
    fn dangling_operator_reports_its_column() {
        match parse_expr("x[1]*") {
            Err(Error::Syntax { column, .. }) => assert_eq!(column, 5),
            other => panic!("unexpected {other:?}"),
        }
        match parse_expr("x[1] +  ") {
            Err(Error::Syntax { column, .. }) => assert_eq!(column, 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_names_are_reported() {
        match parse_expr("2*foo") {
            Err(Error::UnknownSymbol { name, column }) => {
                assert_eq!(name, "foo");
                assert_eq!(column, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn whitespace_is_ignored() {
        assert_eq!(parse_expr(" x [ 1 ] * p[2] ").unwrap(), parse_expr("x[1]*p[2]").unwrap());
    }

    #[test]
    fn powers_and_rationals() {
        let e = parse_expr("-1/4*hbar^-1*Theta*p[2]").unwrap();
        assert_eq!(render_plain(&e), "-1/4*hbar^-1*Theta*p[2]");
        assert_eq!(parse_expr("x[1]^2").unwrap(), parse_expr("x[1]*x[1]").unwrap());
    }

    #[test]
    fn partial_of_field() {
        let e = parse_expr("d[2](A[1])").unwrap();
        assert_eq!(e, OperatorExpr::atom(Atom::AField(1).partial_of(2).unwrap()));
        assert!(matches!(parse_expr("d[1](p[1])"), Err(Error::MomentumDerivative(_))));
    }

    #[test]
    fn anticommutator_of_alphas() {
        assert_eq!(render_plain(&parse_expr("{alpha[1], alpha[1]}").unwrap()), "2");
        assert_eq!(render_plain(&parse_expr("{alpha[1], beta}").unwrap()), "0");
    }
}
