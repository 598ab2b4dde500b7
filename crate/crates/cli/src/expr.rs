//! Polynomial expressions over named generators, e.g. `ha2*hb2_1*hb2_3 - 1/2*ha1^2`.

use std::sync::Arc;

use hnrel::exactalg::rational::{self, Rational};
use hnrel::exactalg::{GradedElement, Ring};

pub fn parse(src: &str, ring: &Arc<Ring>) -> Result<GradedElement, String> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0, ring };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(format!("unexpected `{}` in expression", p.tokens[p.pos]));
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Num(q) => write!(f, "{}", rational::to_string(q)),
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Op(c) => write!(f, "{c}"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Num(rational::parse(&text).ok_or_else(|| format!("bad number {text}"))?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(format!("unexpected character `{c}` in expression"));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Tok>,
    pos: usize,
    ring: &'a Arc<Ring>,
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<GradedElement, String> {
        let mut acc = match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                self.term()?.neg_ref()
            }
            Some('+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let t = self.term()?;
            acc = if op == '+' { acc + t } else { acc - t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<GradedElement, String> {
        let mut acc = self.power()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.power()?;
            acc = if op == '*' {
                &acc * &rhs
            } else {
                let q = scalar_of(&rhs).ok_or("division is only by nonzero numbers")?;
                acc.scale(&q.recip())
            };
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<GradedElement, String> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            match self.tokens.get(self.pos) {
                Some(Tok::Num(q)) if q.is_integer() => {
                    self.pos += 1;
                    let k = rational::to_i64(q).and_then(|k| u32::try_from(k).ok()).ok_or("exponent too large")?;
                    return Ok(base.pow(k));
                }
                _ => return Err("exponent must be a nonnegative integer".into()),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<GradedElement, String> {
        let tok = self.tokens.get(self.pos).cloned().ok_or("expression ends early")?;
        self.pos += 1;
        match tok {
            Tok::Num(q) => Ok(GradedElement::scalar(self.ring, q)),
            Tok::Ident(name) => GradedElement::gen(self.ring, &name).map_err(|_| format!("unknown generator `{name}`")),
            Tok::Op('(') => {
                let e = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err("missing `)`".into());
                }
                self.pos += 1;
                Ok(e)
            }
            Tok::Op(c) => Err(format!("unexpected `{c}`")),
        }
    }
}

fn scalar_of(x: &GradedElement) -> Option<Rational> {
    let c = x.constant_term();
    (x.len() == 1 && c != rational::int(0)).then_some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hnrel::exactalg::{GeneratorSpec, NO_CAP};

    fn ring() -> Arc<Ring> {
        Ring::new(vec![GeneratorSpec::new("a1", 2), GeneratorSpec::new("b1_1", 1), GeneratorSpec::new("b1_2", 1)], NO_CAP).unwrap()
    }

    #[test]
    fn parses_polynomials() {
        let r = ring();
        let a = GradedElement::gen(&r, "a1").unwrap();
        let x = GradedElement::gen(&r, "b1_1").unwrap();
        let y = GradedElement::gen(&r, "b1_2").unwrap();
        let want = a.pow(2).scale(&rational::frac(1, 2)) - &y * &x + GradedElement::int(&r, 3);
        assert_eq!(parse("1/2*a1^2 + b1_1*b1_2 + 3", &r).unwrap(), want);
        assert_eq!(parse("-(a1 - 1)", &r).unwrap(), GradedElement::one(&r) - a);
    }

    #[test]
    fn rejects_garbage() {
        let r = ring();
        assert!(parse("a2", &r).is_err());
        assert!(parse("a1 +", &r).is_err());
        assert!(parse("a1 $ 2", &r).is_err());
        assert!(parse("a1 / a1", &r).is_err());
    }
}
