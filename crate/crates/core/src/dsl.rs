//! Expression language for field elements.
//!
//! ```text
//! expr   := ['+' | '-'] term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ['^' power]
//! atom   := integer | 'X' ['^' xexp] | 'O' '(' 'X' '^' xexp ')'
//!         | 'z' | 'pi' | 'y' | 'w' | '(' expr ')'
//! power  := integer | '(' ['-'] integer ')'
//! xexp   := integer | '(' rational | '(' rational ',' rational ')' ')'
//! ```
//!
//! `X`, `O(..)` and `w` (the generator of `GF(q)`) belong to series fields;
//! `z` and `pi` to cyclotomic fields; `y` to both when the transcendental
//! layer is present. The `format` methods of both fields emit this grammar.

use std::str::FromStr;

use thiserror::Error;

use crate::kummer::{CycloElt, CycloField, KummerError};
use crate::series::{SeriesElt, SeriesError, SeriesField};
use crate::value_group::GroupElt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{symbol}` for {field}")]
    UnknownSymbol { symbol: String, field: String },
    #[error("cannot evaluate: {0}")]
    Eval(String),
}

impl From<SeriesError> for ParseError {
    fn from(e: SeriesError) -> Self {
        ParseError::Eval(e.to_string())
    }
}

impl From<KummerError> for ParseError {
    fn from(e: KummerError) -> Self {
        ParseError::Eval(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Symbol(String),
    XPow(GroupElt),
    BigO(GroupElt),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = text[start..i].parse().map_err(|_| ParseError::Syntax {
                pos: start,
                msg: "integer literal out of range".into(),
            })?;
            out.push((start, Tok::Int(n)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if "+-*/^(),".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ParseError::Syntax {
                pos: i,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.text.len(), |(o, _)| *o)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = if self.eat('-') {
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat('-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
            } else if self.eat('/') {
                acc = Expr::Div(Box::new(acc), Box::new(self.factor()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let atom = self.atom()?;
        if !self.eat('^') {
            return Ok(atom);
        }
        let n = if self.eat('(') {
            let neg = self.eat('-');
            let n = self.integer()?;
            self.expect(')')?;
            if neg {
                -n
            } else {
                n
            }
        } else {
            self.integer()?
        };
        Ok(Expr::Pow(Box::new(atom), n))
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        match self.peek() {
            Some(&Tok::Int(n)) => {
                self.pos += 1;
                Ok(n)
            }
            _ => self.err("expected an integer"),
        }
    }

    /// Exponent of `X`: an integer, or the raw text of a parenthesized
    /// group element.
    fn x_exponent(&mut self) -> Result<GroupElt, ParseError> {
        if let Some(&Tok::Int(n)) = self.peek() {
            self.pos += 1;
            return Ok(GroupElt::int(n));
        }
        let start = self.offset();
        self.expect('(')?;
        let mut depth = 1;
        let inner_start = self.offset();
        while depth > 0 {
            match self.peek() {
                None => return self.err("unbalanced parentheses in exponent"),
                Some(Tok::Op('(')) => depth += 1,
                Some(Tok::Op(')')) => depth -= 1,
                _ => {}
            }
            self.pos += 1;
        }
        let end = self.toks[self.pos - 1].0;
        GroupElt::from_str(&self.text[inner_start..end]).map_err(|e| ParseError::Syntax {
            pos: start,
            msg: e.to_string(),
        })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) if name == "X" => {
                self.pos += 1;
                if self.eat('^') {
                    Ok(Expr::XPow(self.x_exponent()?))
                } else {
                    Ok(Expr::Symbol(name))
                }
            }
            Some(Tok::Ident(name)) if name == "O" => {
                self.pos += 1;
                self.expect('(')?;
                match self.peek() {
                    Some(Tok::Ident(x)) if x == "X" => self.pos += 1,
                    _ => return self.err("expected `X` inside O(..)"),
                }
                self.expect('^')?;
                let e = self.x_exponent()?;
                self.expect(')')?;
                Ok(Expr::BigO(e))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(Expr::Symbol(name))
            }
            Some(Tok::Op(c)) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        text,
        toks: tokenize(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// A field the expression language can be evaluated in.
pub trait Target {
    type Elt: Clone;

    fn describe_target(&self) -> String;
    fn int(&self, n: i64) -> Self::Elt;
    fn symbol(&self, name: &str) -> Option<Result<Self::Elt, ParseError>>;
    fn x_pow(&self, e: &GroupElt) -> Result<Self::Elt, ParseError>;
    fn big_o(&self, e: &GroupElt) -> Result<Self::Elt, ParseError>;
    fn add(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt;
    fn sub(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt;
    fn neg(&self, a: &Self::Elt) -> Self::Elt;
    fn mul(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt;
    fn div(&self, a: &Self::Elt, b: &Self::Elt) -> Result<Self::Elt, ParseError>;
    fn pow(&self, a: &Self::Elt, n: i64) -> Result<Self::Elt, ParseError>;
}

pub fn eval<T: Target>(field: &T, e: &Expr) -> Result<T::Elt, ParseError> {
    let unknown = |s: &str| ParseError::UnknownSymbol {
        symbol: s.to_string(),
        field: field.describe_target(),
    };
    Ok(match e {
        Expr::Int(n) => field.int(*n),
        Expr::Symbol(s) => field.symbol(s).ok_or_else(|| unknown(s))??,
        Expr::XPow(g) => field.x_pow(g)?,
        Expr::BigO(g) => field.big_o(g)?,
        Expr::Neg(a) => field.neg(&eval(field, a)?),
        Expr::Add(a, b) => field.add(&eval(field, a)?, &eval(field, b)?),
        Expr::Sub(a, b) => field.sub(&eval(field, a)?, &eval(field, b)?),
        Expr::Mul(a, b) => field.mul(&eval(field, a)?, &eval(field, b)?),
        Expr::Div(a, b) => field.div(&eval(field, a)?, &eval(field, b)?)?,
        Expr::Pow(a, n) => field.pow(&eval(field, a)?, *n)?,
    })
}

pub fn parse_expr<T: Target>(text: &str, field: &T) -> Result<T::Elt, ParseError> {
    eval(field, &parse(text)?)
}

impl Target for SeriesField {
    type Elt = SeriesElt;

    fn describe_target(&self) -> String {
        self.describe()
    }

    fn int(&self, n: i64) -> SeriesElt {
        self.from_int(n)
    }

    fn symbol(&self, name: &str) -> Option<Result<SeriesElt, ParseError>> {
        let res = self.residue();
        match name {
            "X" => {
                let one = if self.group().rank() == 2 {
                    GroupElt::pair_frac((1, 1), (0, 1))
                } else {
                    GroupElt::int(1)
                };
                Some(self.x_pow(one).map_err(Into::into))
            }
            "w" => res
                .base()
                .generator()
                .map(|g| Ok(self.from_residue(res.from_gf(g)))),
            "y" => res.indeterminate().map(|y| Ok(self.from_residue(y))),
            _ => None,
        }
    }

    fn x_pow(&self, e: &GroupElt) -> Result<SeriesElt, ParseError> {
        Ok(SeriesField::x_pow(self, e.clone())?)
    }

    fn big_o(&self, e: &GroupElt) -> Result<SeriesElt, ParseError> {
        self.group()
            .check(e)
            .map_err(|err| ParseError::Eval(err.to_string()))?;
        Ok(self.zero_to(e.clone()))
    }

    fn add(&self, a: &SeriesElt, b: &SeriesElt) -> SeriesElt {
        SeriesField::add(self, a, b)
    }

    fn sub(&self, a: &SeriesElt, b: &SeriesElt) -> SeriesElt {
        SeriesField::sub(self, a, b)
    }

    fn neg(&self, a: &SeriesElt) -> SeriesElt {
        SeriesField::neg(self, a)
    }

    fn mul(&self, a: &SeriesElt, b: &SeriesElt) -> SeriesElt {
        SeriesField::mul(self, a, b)
    }

    fn div(&self, a: &SeriesElt, b: &SeriesElt) -> Result<SeriesElt, ParseError> {
        Ok(SeriesField::mul(self, a, &self.invert(b)?))
    }

    fn pow(&self, a: &SeriesElt, n: i64) -> Result<SeriesElt, ParseError> {
        let base = if n < 0 { self.invert(a)? } else { a.clone() };
        Ok(SeriesField::pow(self, &base, n.unsigned_abs()))
    }
}

impl Target for CycloField {
    type Elt = CycloElt;

    fn describe_target(&self) -> String {
        self.describe()
    }

    fn int(&self, n: i64) -> CycloElt {
        self.from_int(n)
    }

    fn symbol(&self, name: &str) -> Option<Result<CycloElt, ParseError>> {
        match name {
            "z" => Some(Ok(self.z())),
            "pi" => Some(Ok(self.pi())),
            "y" if self.with_y() => Some(self.y().map_err(Into::into)),
            _ => None,
        }
    }

    fn x_pow(&self, _: &GroupElt) -> Result<CycloElt, ParseError> {
        Err(ParseError::UnknownSymbol {
            symbol: "X".into(),
            field: self.describe(),
        })
    }

    fn big_o(&self, _: &GroupElt) -> Result<CycloElt, ParseError> {
        Err(ParseError::UnknownSymbol {
            symbol: "O".into(),
            field: self.describe(),
        })
    }

    fn add(&self, a: &CycloElt, b: &CycloElt) -> CycloElt {
        CycloField::add(self, a, b)
    }

    fn sub(&self, a: &CycloElt, b: &CycloElt) -> CycloElt {
        CycloField::sub(self, a, b)
    }

    fn neg(&self, a: &CycloElt) -> CycloElt {
        CycloField::neg(self, a)
    }

    fn mul(&self, a: &CycloElt, b: &CycloElt) -> CycloElt {
        CycloField::mul(self, a, b)
    }

    fn div(&self, a: &CycloElt, b: &CycloElt) -> Result<CycloElt, ParseError> {
        Ok(CycloField::div(self, a, b)?)
    }

    fn pow(&self, a: &CycloElt, n: i64) -> Result<CycloElt, ParseError> {
        Ok(CycloField::pow(self, a, n)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::ResidueField;
    use crate::value_group::{GroupKind, ValueGroup};
    use proptest::prelude::*;

    fn laurent(residue: ResidueField) -> SeriesField {
        SeriesField::laurent(residue, 16).unwrap()
    }

    #[test]
    fn parse_examples() {
        let k = laurent(ResidueField::gf(2).unwrap());
        let f = parse_expr("X^(-3)", &k).unwrap();
        assert_eq!(k.valuation(&f), Ok(GroupElt::int(-3)));
        let r = laurent(ResidueField::ratfunc(2).unwrap());
        let f = parse_expr("y*X^(-2) + X^(0)", &r).unwrap();
        assert_eq!(f.terms().len(), 2);
        let c = CycloField::new(2, 1, false, 12).unwrap();
        let h = parse_expr("1 + z^2", &c).unwrap();
        assert!(c.eq_to_precision(&h, &c.from_int(5)));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let k = laurent(ResidueField::gf(2).unwrap());
        assert!(matches!(
            parse("1 + * 2"),
            Err(ParseError::Syntax { pos: 4, .. })
        ));
        assert_eq!(parse_expr("2 * -X", &k), parse_expr("-2*X^(1)", &k));
        assert!(matches!(parse("X^(1"), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse("1 $ 2"),
            Err(ParseError::Syntax { pos: 2, .. })
        ));
        assert!(matches!(parse("(1"), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse("1 2"),
            Err(ParseError::Syntax { pos: 2, .. })
        ));
        assert!(matches!(
            parse_expr("pi", &k),
            Err(ParseError::UnknownSymbol { .. })
        ));
        assert!(matches!(
            parse_expr("w", &k),
            Err(ParseError::UnknownSymbol { .. })
        ));
        let c = CycloField::new(3, 1, false, 8).unwrap();
        assert!(matches!(
            parse_expr("X^(1)", &c),
            Err(ParseError::UnknownSymbol { .. })
        ));
        assert!(matches!(
            parse_expr("y", &c),
            Err(ParseError::UnknownSymbol { .. })
        ));
        assert!(matches!(
            parse_expr("X^(1/2)", &k),
            Err(ParseError::Eval(_))
        ));
    }

    #[test]
    fn group_exponents_and_precision() {
        let lex = SeriesField::new(
            ResidueField::gf(2).unwrap(),
            ValueGroup::new(GroupKind::Lex2, 2),
            GroupElt::pair_frac((8, 1), (0, 1)),
        )
        .unwrap();
        let f = parse_expr("X^((-1, 0)) + X^((0, 1/2)) + O(X^((3, 0)))", &lex).unwrap();
        assert_eq!(lex.valuation(&f), Ok(GroupElt::pair_frac((-1, 1), (0, 1))));
        assert_eq!(f.precision(), Some(&GroupElt::pair_frac((3, 1), (0, 1))));
        let again = parse_expr(&lex.format(&f), &lex).unwrap();
        assert_eq!(again, f);

        let k9 = laurent(ResidueField::gf(9).unwrap());
        let f = parse_expr("(w+1)*X^(-2) - w^2 + X^3/X", &k9).unwrap();
        assert_eq!(parse_expr(&k9.format(&f), &k9).unwrap(), f);
    }

    #[test]
    fn cyclo_round_trip_examples() {
        let c = CycloField::new(3, 2, true, 8).unwrap();
        for text in [
            "1 + pi^2",
            "(1 + y)/(y^2 - pi)",
            "-z + 3*y*pi",
            "1/(1 + pi)",
        ] {
            let a = parse_expr(text, &c).unwrap();
            let b = parse_expr(&c.format(&a), &c).unwrap();
            assert!(c.eq_to_precision(&a, &b), "{text} -> {}", c.format(&a));
        }
    }

    fn series_text() -> impl Strategy<Value = String> {
        let term = (-3i64..4, -6i64..7, 1i64..5).prop_map(|(c, e, d)| {
            let e = if d == 2 {
                format!("{e}/2")
            } else {
                e.to_string()
            };
            format!("{c}*X^({e})")
        });
        (prop::collection::vec(term, 1..5), any::<bool>()).prop_map(|(terms, big_o)| {
            let mut s = terms.join(" + ");
            if big_o {
                s.push_str(" + O(X^(9))");
            }
            s
        })
    }

    proptest! {
        #[test]
        fn series_round_trip(text in series_text(), q in prop::sample::select(vec![2u64, 4])) {
            let k = SeriesField::new(
                ResidueField::gf(q).unwrap(),
                ValueGroup::new(GroupKind::IntInvP, 2),
                GroupElt::int(12),
            ).unwrap();
            let a = parse_expr(&text, &k).unwrap();
            let b = parse_expr(&k.format(&a), &k).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn cyclo_round_trip(rows in prop::collection::vec(prop::collection::vec(-30i64..30, 1..4), 1..3)) {
            let c = CycloField::new(5, 1, true, 6).unwrap();
            let a = c.from_coeffs(&rows).unwrap();
            let b = parse_expr(&c.format(&a), &c).unwrap();
            prop_assert!(c.eq_to_precision(&a, &b));
        }
    }
}
