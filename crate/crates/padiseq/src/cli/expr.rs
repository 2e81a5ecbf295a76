//! Text form of polynomials: integer or rational coefficients, one
//! variable (any identifier), '+', '-', '*', '^' with nonnegative integer
//! exponents, parentheses, and '|' separating tuple components. Adjacent
//! factors multiply, so "5(x+1)" and "5*(x+1)" agree.

use crate::error::{Error, Result};
use crate::roots::RationalPoly;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

const MAX_EXPONENT: u32 = 4096;
const MAX_DEGREE: usize = 1 << 14;

/// Parses '|'-separated polynomial components.
pub fn parse_poly_tuple(text: &str) -> Result<Vec<RationalPoly>> {
    text.split('|').map(parse_poly).collect()
}

/// Parses a single polynomial in one variable.
pub fn parse_poly(text: &str) -> Result<RationalPoly> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let coeffs = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::parse(format!(
            "unexpected {} after a complete polynomial in {:?}",
            parser.tokens[parser.pos].describe(),
            text.trim()
        )));
    }
    Ok(RationalPoly::new(coeffs))
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Int(BigInt),
    Var,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Int(n) => format!("the number {}", n),
            Token::Var => "the variable".to_string(),
            Token::Plus => "'+'".to_string(),
            Token::Minus => "'-'".to_string(),
            Token::Star => "'*'".to_string(),
            Token::Slash => "'/'".to_string(),
            Token::Caret => "'^'".to_string(),
            Token::LParen => "'('".to_string(),
            Token::RParen => "')'".to_string(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' | '\n' => {
                chars.next();
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push(Token::Int(digits.parse().expect("digits")));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                while let Some(&d) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' {
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push(Token::Var);
            }
            '+' => {
                chars.next();
                tokens.push(Token::Plus);
            }
            '-' => {
                chars.next();
                tokens.push(Token::Minus);
            }
            '*' => {
                chars.next();
                tokens.push(Token::Star);
            }
            '/' => {
                chars.next();
                tokens.push(Token::Slash);
            }
            '^' => {
                chars.next();
                tokens.push(Token::Caret);
            }
            '(' => {
                chars.next();
                tokens.push(Token::LParen);
            }
            ')' => {
                chars.next();
                tokens.push(Token::RParen);
            }
            other => {
                return Err(Error::parse(format!(
                    "unexpected character {:?} in a polynomial",
                    other
                )));
            }
        }
    }
    if tokens.is_empty() {
        return Err(Error::parse("an empty polynomial".to_string()));
    }
    Ok(tokens)
}

/// Dense coefficient arithmetic, lowest degree first.
type Coeffs = Vec<BigRational>;

fn poly_add(a: &Coeffs, b: &Coeffs) -> Coeffs {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    out
}

fn poly_neg(a: &Coeffs) -> Coeffs {
    a.iter().map(|c| -c).collect()
}

fn poly_mul(a: &Coeffs, b: &Coeffs) -> Result<Coeffs> {
    if a.is_empty() || b.is_empty() {
        return Ok(Vec::new());
    }
    if a.len() + b.len() > MAX_DEGREE {
        return Err(Error::parse(
            "the polynomial degree is too large".to_string(),
        ));
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    Ok(out)
}

fn poly_pow(a: &Coeffs, e: u32) -> Result<Coeffs> {
    let mut out = vec![BigRational::one()];
    for _ in 0..e {
        out = poly_mul(&out, a)?;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Coeffs> {
        let mut acc = self.term()?;
        while let Some(op) = self.peek() {
            match op {
                Token::Plus => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = poly_add(&acc, &rhs);
                }
                Token::Minus => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = poly_add(&acc, &poly_neg(&rhs));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Coeffs> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = poly_mul(&acc, &rhs)?;
                }
                // Adjacency multiplies: "5x", "2(x+1)".
                Some(Token::Int(_)) | Some(Token::Var) | Some(Token::LParen) => {
                    let rhs = self.factor()?;
                    acc = poly_mul(&acc, &rhs)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Coeffs> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let Some(Token::Int(e)) = self.next() else {
                return Err(Error::parse("'^' needs an integer exponent".to_string()));
            };
            let e: u32 = e
                .try_into()
                .ok()
                .filter(|&e| e <= MAX_EXPONENT)
                .ok_or_else(|| {
                    Error::parse(format!("the exponent must lie in 0..={}", MAX_EXPONENT))
                })?;
            return poly_pow(&base, e);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Coeffs> {
        match self.next() {
            Some(Token::Int(n)) => {
                // A '/' directly after an integer forms a rational literal.
                if self.peek() == Some(&Token::Slash) {
                    self.pos += 1;
                    let Some(Token::Int(d)) = self.next() else {
                        return Err(Error::parse("'/' needs an integer denominator".to_string()));
                    };
                    if d.is_zero() {
                        return Err(Error::parse("a zero denominator".to_string()));
                    }
                    return Ok(vec![BigRational::new(n, d)]);
                }
                Ok(vec![BigRational::from_integer(n)])
            }
            Some(Token::Var) => Ok(vec![BigRational::zero(), BigRational::one()]),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                if self.next() != Some(Token::RParen) {
                    return Err(Error::parse("a missing ')'".to_string()));
                }
                Ok(inner)
            }
            Some(Token::Minus) => Ok(poly_neg(&self.factor()?)),
            Some(Token::Plus) => self.factor(),
            other => Err(Error::parse(format!(
                "expected a number, variable or '(', got {}",
                other.map_or("the end of input".to_string(), |t| t.describe())
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(coeffs: &[i64]) -> RationalPoly {
        RationalPoly::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    #[test]
    fn single_polynomials() {
        assert_eq!(parse_poly("x^2+1").unwrap(), ints(&[1, 0, 1]));
        assert_eq!(parse_poly("x*(x+1)").unwrap(), ints(&[0, 1, 1]));
        assert_eq!(parse_poly("x(x+1)").unwrap(), ints(&[0, 1, 1]));
        assert_eq!(parse_poly("2x - 7").unwrap(), ints(&[-7, 2]));
        assert_eq!(parse_poly(" n ^ 3 ").unwrap(), ints(&[0, 0, 0, 1]));
        assert_eq!(parse_poly("-x+x").unwrap(), RationalPoly::zero());
        assert_eq!(
            parse_poly("5*(x^2+1)^4").unwrap(),
            ints(&[5, 0, 20, 0, 30, 0, 20, 0, 5])
        );
    }

    #[test]
    fn rational_coefficients() {
        let half_x = parse_poly("1/2 * x").unwrap();
        assert_eq!(
            half_x.coeffs()[1],
            BigRational::new(BigInt::from(1), BigInt::from(2))
        );
        assert!(parse_poly("1/0").is_err());
    }

    #[test]
    fn tuples_split_on_bars() {
        let polys = parse_poly_tuple("x | x^2").unwrap();
        assert_eq!(polys.len(), 2);
        assert_eq!(polys[0], ints(&[0, 1]));
        assert_eq!(polys[1], ints(&[0, 0, 1]));
    }

    #[test]
    fn rejected_inputs() {
        assert!(parse_poly("").is_err());
        assert!(parse_poly("x +").is_err());
        assert!(parse_poly("(x").is_err());
        assert!(parse_poly("x^x").is_err());
        assert!(parse_poly("x ? 3").is_err());
        assert!(parse_poly("x^99999").is_err());
    }
}
