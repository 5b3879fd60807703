//! Weight expressions: `std:<num> | gauss:<num> | star(<expr>) | star^<k>(<expr>)`,
//! where a number is a decimal or a rational `p/q`.

use std::fmt;

use bergkern::exact;
use bergkern::weights::RadialWeight;
use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightExpr {
    Standard(BigRational),
    Gaussian(BigRational),
    /// `depth >= 1` star transforms of a non-star base.
    Star { depth: usize, base: Box<WeightExpr> },
}

impl WeightExpr {
    /// Wraps in `depth` more star transforms, merging nested iterates.
    pub fn star(self, depth: usize) -> Self {
        match self {
            _ if depth == 0 => self,
            WeightExpr::Star { depth: d, base } => WeightExpr::Star { depth: d + depth, base },
            base => WeightExpr::Star {
                depth,
                base: Box::new(base),
            },
        }
    }

    pub fn to_weight(&self) -> bergkern::Result<RadialWeight> {
        match self {
            WeightExpr::Standard(a) => RadialWeight::standard_exact(a.clone()),
            WeightExpr::Gaussian(g) => RadialWeight::gaussian_exact(g.clone()),
            WeightExpr::Star { depth, base } => Ok(base.to_weight()?.star_n(*depth)),
        }
    }
}

impl fmt::Display for WeightExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightExpr::Standard(a) => write!(f, "std:{}", exact::to_string(a)),
            WeightExpr::Gaussian(g) => write!(f, "gauss:{}", exact::to_string(g)),
            WeightExpr::Star { depth: 1, base } => write!(f, "star({base})"),
            WeightExpr::Star { depth, base } => write!(f, "star^{depth}({base})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    Syntax { offset: usize, expected: Vec<&'static str> },
    AlphaOutOfRange { offset: usize, value: String },
    GammaOutOfRange { offset: usize, value: String },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { offset, expected } => {
                write!(f, "syntax error at offset {offset}: expected one of {}", expected.join(", "))
            }
            ParseError::AlphaOutOfRange { offset, value } => {
                write!(f, "alpha out of range at offset {offset}: {value} (need alpha > -1)")
            }
            ParseError::GammaOutOfRange { offset, value } => {
                write!(f, "gamma out of range at offset {offset}: {value} (need gamma > 0)")
            }
        }
    }
}

impl std::error::Error for ParseError {}

pub fn parse_weight(text: &str) -> Result<WeightExpr, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.syntax(&["end of input"]));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let r = self.rest();
        self.pos += r.len() - r.trim_start().len();
    }

    fn syntax(&self, expected: &[&'static str]) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            expected: expected.to_vec(),
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &'static str) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.syntax(&[token]))
        }
    }

    fn expr(&mut self) -> Result<WeightExpr, ParseError> {
        self.skip_ws();
        if self.eat("std:") {
            let (offset, text, value) = self.number()?;
            if value <= -BigRational::from_integer(1.into()) {
                return Err(ParseError::AlphaOutOfRange { offset, value: text });
            }
            return Ok(WeightExpr::Standard(value));
        }
        if self.eat("gauss:") {
            let (offset, text, value) = self.number()?;
            if value <= BigRational::from_integer(0.into()) {
                return Err(ParseError::GammaOutOfRange { offset, value: text });
            }
            return Ok(WeightExpr::Gaussian(value));
        }
        if self.eat("star") {
            let depth = if self.eat("^") { self.depth()? } else { 1 };
            self.expect("(")?;
            let inner = self.expr()?;
            self.expect(")")?;
            return Ok(inner.star(depth));
        }
        Err(self.syntax(&["std:", "gauss:", "star"]))
    }

    fn depth(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        match self.rest()[..digits].parse::<usize>() {
            Ok(k) if k >= 1 => {
                self.pos += digits;
                Ok(k)
            }
            _ => Err(self.syntax(&["positive integer"])),
        }
    }

    /// A decimal (`-2.5`, `1e-3`) or a rational `p/q`.
    fn number(&mut self) -> Result<(usize, String, BigRational), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '+' | '/')))
            .unwrap_or(self.rest().len());
        let text = &self.rest()[..len];
        match exact::parse(text) {
            Ok(v) if !text.is_empty() && !text.contains(char::is_whitespace) => {
                self.pos += len;
                Ok((start, text.to_string(), v))
            }
            _ => Err(self.syntax(&["number"])),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bergkern::exact::{int, ratio};

    #[test]
    fn examples() {
        let e = parse_weight("star^2(std:1/2)").unwrap();
        assert_eq!(
            e,
            WeightExpr::Star {
                depth: 2,
                base: Box::new(WeightExpr::Standard(ratio(1, 2)))
            }
        );
        assert_eq!(e.to_string(), "star^2(std:1/2)");
        let g = parse_weight("star(gauss:2.0)").unwrap();
        assert_eq!(g.to_string(), "star(gauss:2)");
        assert_eq!(g.to_weight().unwrap().domain(), bergkern::Domain::Plane);
        assert_eq!(parse_weight(" std : 0 ").unwrap_err(), ParseError::Syntax { offset: 1, expected: vec!["std:", "gauss:", "star"] });
        assert_eq!(parse_weight("std:0").unwrap(), WeightExpr::Standard(int(0)));
    }

    #[test]
    fn nested_stars_merge() {
        assert_eq!(parse_weight("star(star^2(std:3))").unwrap().to_string(), "star^3(std:3)");
        assert_eq!(parse_weight("star ( star ( gauss:1/2 ) )").unwrap().to_string(), "star^2(gauss:1/2)");
    }

    #[test]
    fn range_errors() {
        assert!(matches!(parse_weight("std:-1"), Err(ParseError::AlphaOutOfRange { offset: 4, .. })));
        assert!(matches!(parse_weight("std:-3/2"), Err(ParseError::AlphaOutOfRange { .. })));
        assert!(matches!(parse_weight("gauss:0"), Err(ParseError::GammaOutOfRange { offset: 6, .. })));
        assert!(parse_weight("std:-0.999").is_ok());
        let msg = parse_weight("std:-1").unwrap_err().to_string();
        assert!(msg.starts_with("alpha out of range"), "{msg}");
    }

    #[test]
    fn syntax_errors_are_positioned() {
        let cases = [
            ("", 0, "std:"),
            ("std:", 4, "number"),
            ("std:abc", 4, "number"),
            ("star(std:1", 10, ")"),
            ("star^0(std:1)", 5, "positive integer"),
            ("star^2 std:1", 7, "("),
            ("std:1 x", 6, "end of input"),
            ("std:1/0", 4, "number"),
        ];
        for (text, offset, token) in cases {
            match parse_weight(text) {
                Err(ParseError::Syntax { offset: o, expected }) => {
                    assert_eq!(o, offset, "{text:?}");
                    assert!(expected.contains(&token), "{text:?}: {expected:?}");
                }
                other => panic!("{text:?}: {other:?}"),
            }
        }
        let msg = parse_weight("star(").unwrap_err().to_string();
        assert!(msg.starts_with("syntax error at offset 5"), "{msg}");
    }
}
