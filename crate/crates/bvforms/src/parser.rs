//! Expression language for forms.
//!
//! Grammar, with explicit `*` and one token per indexed generator:
//!
//! ```text
//!   expr   := term (('+' | '-') term)*
//!   term   := '-'* factor ('*' factor)*
//!   factor := atom ('^' uint)?
//!   atom   := rational | generator | 'h' | '(' expr ')'
//! ```
//!
//! Rationals are `a` or `a/b` with integer digits; `/` exists only inside a
//! literal. Generators are `x<i>`, `p<i>`, `dx<i>`, `dp<i>` with 1-based
//! indices bounded by the context. Every error carries the byte offset it
//! was detected at.

use thiserror::Error;

use crate::form::SuperForm;
use crate::monomial::Generator;
use crate::operators::HbarForm;
use crate::scalar::Scalar;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("parse error at byte {position}: {kind}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected {0}")]
    UnexpectedToken(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("generator indices start at 1")]
    IndexZero,
    #[error("generator index {index} exceeds context dimension {n}")]
    IndexTooLarge { index: u32, n: u32 },
    #[error("zero denominator in rational literal")]
    ZeroDenominator,
    #[error("the deformation variable h is not allowed here")]
    HbarNotAllowed,
}

fn err<T>(position: usize, kind: ParseErrorKind) -> Result<T, ParseError> {
    Err(ParseError { position, kind })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Rational(Scalar),
    Gen(Generator),
    Hbar,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Rational(c) => format!("literal {c}"),
            Token::Gen(g) => format!("generator {g}"),
            Token::Hbar => "h".to_string(),
            Token::Plus => "'+'".to_string(),
            Token::Minus => "'-'".to_string(),
            Token::Star => "'*'".to_string(),
            Token::Caret => "'^'".to_string(),
            Token::LParen => "'('".to_string(),
            Token::RParen => "')'".to_string(),
        }
    }
}

struct Lexer<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { bytes: text.as_bytes(), pos: 0 }
    }

    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn take_digits(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).unwrap()
    }

    /// `u32` is plenty: indices are bounded by the context dimension and
    /// exponents beyond the enumeration caps never occur in valid input.
    fn take_index(&mut self, n: u32) -> Result<u32, ParseError> {
        let at = self.pos;
        let digits = self.take_digits();
        if digits.is_empty() {
            return match self.bytes.get(self.pos) {
                Some(&b) => err(self.pos, ParseErrorKind::UnexpectedChar(b as char)),
                None => err(self.pos, ParseErrorKind::UnexpectedEnd),
            };
        }
        let index: u32 = digits
            .parse()
            .map_err(|_| ParseError {
                position: at,
                kind: ParseErrorKind::IndexTooLarge { index: u32::MAX, n },
            })?;
        if index == 0 {
            return err(at, ParseErrorKind::IndexZero);
        }
        if index > n {
            return err(at, ParseErrorKind::IndexTooLarge { index, n });
        }
        Ok(index)
    }

    /// Next token plus its starting byte offset; `None` at end of input.
    fn next(&mut self, n: u32) -> Result<Option<(usize, Token)>, ParseError> {
        self.skip_space();
        let at = self.pos;
        let Some(&b) = self.bytes.get(self.pos) else {
            return Ok(None);
        };
        let token = match b {
            b'+' => {
                self.pos += 1;
                Token::Plus
            }
            b'-' => {
                self.pos += 1;
                Token::Minus
            }
            b'*' => {
                self.pos += 1;
                Token::Star
            }
            b'^' => {
                self.pos += 1;
                Token::Caret
            }
            b'(' => {
                self.pos += 1;
                Token::LParen
            }
            b')' => {
                self.pos += 1;
                Token::RParen
            }
            b'0'..=b'9' => {
                let numer = self.take_digits().to_string();
                if self.bytes.get(self.pos) == Some(&b'/') {
                    self.pos += 1;
                    let den_at = self.pos;
                    let denom = self.take_digits();
                    if denom.is_empty() {
                        return match self.bytes.get(self.pos) {
                            Some(&c) => err(self.pos, ParseErrorKind::UnexpectedChar(c as char)),
                            None => err(self.pos, ParseErrorKind::UnexpectedEnd),
                        };
                    }
                    let den: num::BigInt = denom.parse().unwrap();
                    if num::Zero::is_zero(&den) {
                        return err(den_at, ParseErrorKind::ZeroDenominator);
                    }
                    Token::Rational(Scalar::new(numer.parse().unwrap(), den))
                } else {
                    Token::Rational(Scalar::from_integer(numer.parse().unwrap()))
                }
            }
            b'h' => {
                self.pos += 1;
                Token::Hbar
            }
            b'x' => {
                self.pos += 1;
                Token::Gen(Generator::x(self.take_index(n)?))
            }
            b'p' => {
                self.pos += 1;
                Token::Gen(Generator::p(self.take_index(n)?))
            }
            b'd' => {
                self.pos += 1;
                match self.bytes.get(self.pos) {
                    Some(b'x') => {
                        self.pos += 1;
                        Token::Gen(Generator::dx(self.take_index(n)?))
                    }
                    Some(b'p') => {
                        self.pos += 1;
                        Token::Gen(Generator::dp(self.take_index(n)?))
                    }
                    Some(&c) => return err(self.pos, ParseErrorKind::UnexpectedChar(c as char)),
                    None => return err(self.pos, ParseErrorKind::UnexpectedEnd),
                }
            }
            _ => return err(at, ParseErrorKind::UnexpectedChar(b as char)),
        };
        Ok(Some((at, token)))
    }
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    cursor: usize,
    end: usize,
    n: u32,
    first_hbar: Option<usize>,
}

impl Parser {
    fn peek(&self) -> Option<&(usize, Token)> {
        self.tokens.get(self.cursor)
    }

    fn bump(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.cursor).cloned();
        if t.is_some() {
            self.cursor += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.peek().map(|(at, _)| *at).unwrap_or(self.end)
    }

    fn expr(&mut self) -> Result<HbarForm, ParseError> {
        let mut acc = self.term()?;
        while let Some((_, t)) = self.peek() {
            match t {
                Token::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Token::Minus => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<HbarForm, ParseError> {
        let mut negate = false;
        while matches!(self.peek(), Some((_, Token::Minus))) {
            self.bump();
            negate = !negate;
        }
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some((_, Token::Star))) {
            self.bump();
            acc = acc.mul(&self.factor()?);
        }
        Ok(if negate { acc.neg() } else { acc })
    }

    fn factor(&mut self) -> Result<HbarForm, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek(), Some((_, Token::Caret))) {
            self.bump();
            let at = self.here();
            match self.bump() {
                Some((_, Token::Rational(c))) => {
                    if !c.is_integer() || num::Signed::is_negative(&c) {
                        return err(at, ParseErrorKind::UnexpectedToken(format!("literal {c}")));
                    }
                    let k: u32 = c.to_integer().try_into().map_err(|_| ParseError {
                        position: at,
                        kind: ParseErrorKind::UnexpectedToken(format!("literal {c}")),
                    })?;
                    return Ok(base.pow(k));
                }
                Some((_, t)) => return err(at, ParseErrorKind::UnexpectedToken(t.describe())),
                None => return err(at, ParseErrorKind::UnexpectedEnd),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<HbarForm, ParseError> {
        let at = self.here();
        match self.bump() {
            Some((_, Token::Rational(c))) => {
                Ok(HbarForm::from_form(SuperForm::scalar(self.n, c)))
            }
            Some((_, Token::Gen(g))) => {
                Ok(HbarForm::from_form(SuperForm::generator(self.n, g)))
            }
            Some((h_at, Token::Hbar)) => {
                if self.first_hbar.is_none() {
                    self.first_hbar = Some(h_at);
                }
                Ok(HbarForm::shifted(1, SuperForm::one(self.n)))
            }
            Some((_, Token::LParen)) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((_, Token::RParen)) => Ok(inner),
                    Some((at, t)) => err(at, ParseErrorKind::UnexpectedToken(t.describe())),
                    None => err(self.end, ParseErrorKind::UnexpectedEnd),
                }
            }
            Some((_, t)) => err(at, ParseErrorKind::UnexpectedToken(t.describe())),
            None => err(at, ParseErrorKind::UnexpectedEnd),
        }
    }
}

fn tokenize(text: &str, n: u32) -> Result<Vec<(usize, Token)>, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut tokens = Vec::new();
    while let Some(t) = lexer.next(n)? {
        tokens.push(t);
    }
    Ok(tokens)
}

/// Parses a possibly `h`-deformed expression over `n` Darboux pairs.
pub fn parse_hbar(text: &str, n: u32) -> Result<HbarForm, ParseError> {
    let tokens = tokenize(text, n)?;
    let mut parser = Parser {
        tokens,
        cursor: 0,
        end: text.len(),
        n,
        first_hbar: None,
    };
    let value = parser.expr()?;
    if let Some((at, t)) = parser.peek() {
        return err(*at, ParseErrorKind::UnexpectedToken(t.describe()));
    }
    Ok(value)
}

/// Parses an expression that must not involve `h`.
pub fn parse_form(text: &str, n: u32) -> Result<SuperForm, ParseError> {
    let tokens = tokenize(text, n)?;
    let mut parser = Parser {
        tokens,
        cursor: 0,
        end: text.len(),
        n,
        first_hbar: None,
    };
    let value = parser.expr()?;
    if let Some((at, t)) = parser.peek() {
        return err(*at, ParseErrorKind::UnexpectedToken(t.describe()));
    }
    if value.len() > 1 {
        return err(
            parser.first_hbar.unwrap_or(0),
            ParseErrorKind::HbarNotAllowed,
        );
    }
    Ok(value.level(0))
}

/// Largest generator index mentioned, for inferring a context dimension.
/// Indices are not bounds-checked here.
pub fn max_generator_index(text: &str) -> Result<u32, ParseError> {
    let tokens = tokenize(text, u32::MAX)?;
    Ok(tokens
        .iter()
        .filter_map(|(_, t)| match t {
            Token::Gen(g) => Some(g.index),
            _ => None,
        })
        .max()
        .unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::term;
    use crate::scalar::{int, ratio};

    fn kind_at(r: Result<HbarForm, ParseError>) -> (usize, ParseErrorKind) {
        let e = r.unwrap_err();
        (e.position, e.kind)
    }

    #[test]
    fn literals_and_monomials() {
        assert_eq!(parse_form("3/2*x1^2*p1", 1).unwrap().to_string(), "3/2*x1^2*p1");
        assert_eq!(parse_form("0", 2).unwrap(), SuperForm::zero(2));
        assert_eq!(parse_form("7", 1).unwrap(), SuperForm::scalar(1, int(7)));
        assert_eq!(parse_form("1/2", 1).unwrap(), SuperForm::scalar(1, ratio(1, 2)));
    }

    #[test]
    fn normalization() {
        // Products reorder into canonical form with the right sign.
        assert_eq!(parse_form("dp1*dx1", 1).unwrap(), crate::operators::omega(1));
        assert_eq!(parse_form("dx1*dx1", 1).unwrap(), SuperForm::zero(1));
        assert_eq!(
            parse_form("p1*x1 - x1*p1", 1).unwrap(),
            SuperForm::zero(1)
        );
        assert_eq!(
            parse_form("dx1*p1", 1).unwrap(),
            term(1, int(-1), &[crate::monomial::Generator::p(1), crate::monomial::Generator::dx(1)])
        );
    }

    #[test]
    fn precedence_and_unary_minus() {
        assert_eq!(
            parse_form("-x1 + 2*x1", 1).unwrap(),
            term(1, int(1), &[crate::monomial::Generator::x(1)])
        );
        assert_eq!(
            parse_form("(x1 + x2)^2", 2).unwrap().to_string(),
            "x2^2 + 2*x1*x2 + x1^2"
        );
        assert_eq!(parse_form("--x1", 1).unwrap().to_string(), "x1");
        assert_eq!(parse_form("2^3", 1).unwrap(), SuperForm::scalar(1, int(8)));
    }

    #[test]
    fn hbar_levels() {
        let z = parse_hbar("p1*dx1 - h", 1).unwrap();
        assert_eq!(z.len(), 2);
        assert_eq!(z.level(1), SuperForm::scalar(1, int(-1)));
        assert_eq!(parse_hbar("h^2*x1 + h*h*x1", 1).unwrap().level(2).to_string(), "2*x1");
        // h is rejected where a plain form is required, at its position.
        let e = parse_form("x1 + h", 1).unwrap_err();
        assert_eq!(e.position, 5);
        assert_eq!(e.kind, ParseErrorKind::HbarNotAllowed);
    }

    #[test]
    fn error_positions() {
        assert_eq!(kind_at(parse_hbar("", 1)), (0, ParseErrorKind::UnexpectedEnd));
        assert_eq!(kind_at(parse_hbar("x0", 1)), (1, ParseErrorKind::IndexZero));
        assert_eq!(
            kind_at(parse_hbar("x3", 2)),
            (1, ParseErrorKind::IndexTooLarge { index: 3, n: 2 })
        );
        assert_eq!(kind_at(parse_hbar("3/0", 1)), (2, ParseErrorKind::ZeroDenominator));
        assert_eq!(kind_at(parse_hbar("x1 +", 1)), (4, ParseErrorKind::UnexpectedEnd));
        assert_eq!(kind_at(parse_hbar("q1", 1)), (0, ParseErrorKind::UnexpectedChar('q')));
        assert_eq!(kind_at(parse_hbar("x", 1)), (1, ParseErrorKind::UnexpectedEnd));
        assert_eq!(kind_at(parse_hbar("dq1", 1)), (1, ParseErrorKind::UnexpectedChar('q')));
        assert_eq!(
            kind_at(parse_hbar("x1 x2", 2)),
            (3, ParseErrorKind::UnexpectedToken("generator x2".to_string()))
        );
        assert_eq!(
            kind_at(parse_hbar("(x1", 1)),
            (3, ParseErrorKind::UnexpectedEnd)
        );
        assert_eq!(
            kind_at(parse_hbar("x1^p1", 1)),
            (3, ParseErrorKind::UnexpectedToken("generator p1".to_string()))
        );
        assert_eq!(
            kind_at(parse_hbar("*x1", 1)),
            (0, ParseErrorKind::UnexpectedToken("'*'".to_string()))
        );
    }

    #[test]
    fn max_index_scan() {
        assert_eq!(max_generator_index("x1*dp3 + p2").unwrap(), 3);
        assert_eq!(max_generator_index("5/7").unwrap(), 0);
    }

    #[test]
    fn print_parse_round_trip() {
        for m in crate::cohomology::all_monomials(2, 3) {
            let f = SuperForm::from_monomial(m, ratio(-3, 7));
            assert_eq!(parse_form(&f.to_string(), 2).unwrap(), f);
        }
    }
}
