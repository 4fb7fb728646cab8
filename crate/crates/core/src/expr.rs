//! Text format for Arnold-algebra elements.
//!
//! ```text
//! expr   := sign? term (('+' | '-') term)*
//! term   := coeff | coeff? '*'? factor ('*'? factor)*
//! factor := 'w(' int ',' int ')'
//! coeff  := int | int '/' int
//! ```
//!
//! Whitespace is allowed between tokens. The printed form of an element
//! (`Display` on [`ArnoldElement`]) parses back to the same element.

use crate::arnold::{straighten, ArnoldElement};
use crate::error::{Error, Result};
use crate::linalg::Rational;

struct Term {
    offset: usize,
    coeff: Rational,
    word: Vec<(usize, usize)>,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { offset: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{}`", c as char))
        }
    }

    fn digits(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn label(&mut self) -> Result<usize> {
        let start = self.pos;
        let d = self.digits()?;
        d.parse().map_err(|_| Error::Parse { offset: start, message: "label too large".into() })
    }

    fn coeff(&mut self) -> Result<Rational> {
        let start = self.pos;
        let p = self.digits()?;
        let text = if self.peek() == Some(b'/') {
            self.pos += 1;
            let q = self.digits()?;
            format!("{p}/{q}")
        } else {
            p.to_string()
        };
        text.parse().map_err(|_| Error::Parse { offset: start, message: format!("invalid coefficient `{text}`") })
    }

    fn factor(&mut self) -> Result<(usize, usize)> {
        self.expect(b'w')?;
        self.expect(b'(')?;
        let a = self.label()?;
        self.expect(b',')?;
        let b = self.label()?;
        self.expect(b')')?;
        if a == b {
            return Err(Error::InvalidGenerator { a, b });
        }
        Ok((a, b))
    }

    fn term(&mut self, negative: bool) -> Result<Term> {
        self.skip_ws();
        let offset = self.pos;
        let mut coeff = Rational::one();
        let mut word = Vec::new();
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            coeff = self.coeff()?;
        }
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    word.push(self.factor()?);
                }
                Some(b'w') => word.push(self.factor()?),
                _ => break,
            }
        }
        if word.is_empty() && offset == self.pos {
            return self.err("expected a term");
        }
        if negative {
            coeff = -coeff;
        }
        Ok(Term { offset, coeff, word })
    }

    fn expression(&mut self) -> Result<Vec<Term>> {
        let mut terms = Vec::new();
        let mut negative = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        loop {
            terms.push(self.term(negative)?);
            match self.peek() {
                Some(b'+') => negative = false,
                Some(b'-') => negative = true,
                None => return Ok(terms),
                Some(_) => return self.err("unexpected character"),
            }
            self.pos += 1;
        }
    }
}

/// Parses and straightens an expression. The ambient arity is `n` when given,
/// otherwise the largest label that occurs (at least 1).
pub fn parse_expression(text: &str, n: Option<usize>) -> Result<ArnoldElement> {
    let mut parser = Parser { src: text.as_bytes(), pos: 0 };
    let terms = parser.expression()?;
    let max_label = terms.iter().flat_map(|t| t.word.iter().map(|&(a, b)| a.max(b))).max().unwrap_or(0);
    let n = match n {
        Some(n) => {
            if max_label > n {
                return Err(Error::LabelOutOfRange { label: max_label, n });
            }
            n
        }
        None => max_label.max(1),
    };
    let degree = terms[0].word.len();
    let mut out = ArnoldElement::zero(n, degree);
    for t in terms {
        if t.word.len() != degree {
            return Err(Error::NotHomogeneous { first: degree, second: t.word.len() });
        }
        let x = straighten(&t.word, 1, n).map_err(|e| match e {
            Error::InvalidGenerator { .. } | Error::LabelOutOfRange { .. } => e,
            other => Error::Parse { offset: t.offset, message: other.to_string() },
        })?;
        out = out.add(&x.scale(&t.coeff))?;
    }
    if out.is_zero() {
        out = ArnoldElement::zero(n, degree);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arnold::basis;
    use proptest::prelude::*;

    #[test]
    fn admissible_monomial() {
        let x = parse_expression("w(1,2)*w(2,3)", None).unwrap();
        assert_eq!(x.n(), 3);
        assert_eq!(x.to_string(), "w(1,2)w(2,3)");
        assert_eq!(parse_expression("w(1,2)w(2,3)", None).unwrap(), x);
    }

    #[test]
    fn explicit_ambient() {
        let x = parse_expression("w(1,2) - w(1,3)", Some(3)).unwrap();
        assert_eq!((x.n(), x.degree()), (3, 1));
        assert!(matches!(parse_expression("w(1,5)", Some(3)), Err(Error::LabelOutOfRange { label: 5, n: 3 })));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_expression("w(1,1)", None), Err(Error::InvalidGenerator { a: 1, b: 1 })));
        assert!(matches!(parse_expression("w(1,2) + ", None), Err(Error::Parse { offset: 9, .. })));
        assert!(matches!(parse_expression("w(1;2)", None), Err(Error::Parse { offset: 3, .. })));
        assert!(matches!(parse_expression("w(1,2) + w(1,2)w(2,3)", None), Err(Error::NotHomogeneous { .. })));
        assert!(matches!(parse_expression("", None), Err(Error::Parse { offset: 0, .. })));
    }

    #[test]
    fn coefficients_and_constants() {
        let x = parse_expression("1/2 w(1,2) - 3*w(1,3)", None).unwrap();
        assert_eq!(x.to_string(), "-3*w(1,3) + 1/2*w(1,2)");
        assert_eq!(parse_expression("-1/2", None).unwrap().to_string(), "-1/2");
        assert!(parse_expression("0", Some(2)).unwrap().is_zero());
    }

    fn element_strategy() -> impl Strategy<Value = ArnoldElement> {
        (2usize..=5, 0usize..=3).prop_flat_map(|(n, k)| {
            let size = basis(n, k).len();
            prop::collection::vec((-3i64..=3, 1i64..=3), size).prop_map(move |cs| {
                let b = basis(n, k);
                ArnoldElement::from_terms(
                    n,
                    k,
                    b.monomials().iter().cloned().zip(cs.into_iter().map(|(p, q)| Rational::new(p, q))),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(x in element_strategy()) {
            let back = parse_expression(&x.to_string(), Some(x.n())).unwrap();
            if x.is_zero() {
                prop_assert!(back.is_zero());
            } else {
                prop_assert_eq!(back, x);
            }
        }
    }
}
