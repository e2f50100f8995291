//! Reader for the textual formula syntax produced by `Display`.
//!
//! ```text
//! formula  := quant | disj
//! quant    := ("∃" | "exists" | "∀" | "forall") var "." formula
//! disj     := conj (("∨" | "|" | "\/") conj)*
//! conj     := unary (("∧" | "&" | "/\") unary)*
//! unary    := ("¬" | "!" | "~") unary | "(" formula ")" | quant
//!           | "⊤" | "true" | "⊥" | "false" | var rel var
//! rel      := "=" | "≠" | "!=" | "≤" | "<=" | "<"
//! var      := ascii identifier | "a" subscript-digits
//! ```
//!
//! `a < b` is read as the derived `a ≤ b ∧ a ≠ b`.

use super::{Formula, Variable};
use crate::error::Error;

pub fn parse_formula(input: &str) -> Result<Formula, Error> {
    let mut parser = Parser { input, pos: 0 };
    let phi = parser.formula()?;
    parser.skip_ws();
    if parser.pos != input.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(phi)
}

struct Parser<'a> {
    input: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.input[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.input.len() - trimmed.len();
    }

    fn error(&self, message: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn eat(&mut self, tokens: &[&str]) -> bool {
        self.skip_ws();
        for token in tokens {
            if self.rest().starts_with(token) {
                let is_word = token.chars().all(|c| c.is_ascii_alphabetic());
                let next = self.rest()[token.len()..].chars().next();
                if is_word && next.is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                    continue;
                }
                self.pos += token.len();
                return true;
            }
        }
        false
    }

    fn formula(&mut self) -> Result<Formula, Error> {
        if let Some(phi) = self.quantified()? {
            return Ok(phi);
        }
        let mut parts = vec![self.conjunction()?];
        while self.eat(&["∨", "\\/", "|"]) {
            parts.push(self.conjunction()?);
        }
        Ok(Formula::or(parts))
    }

    fn quantified(&mut self) -> Result<Option<Formula>, Error> {
        let existential = if self.eat(&["∃", "exists"]) {
            true
        } else if self.eat(&["∀", "forall"]) {
            false
        } else {
            return Ok(None);
        };
        let var = self.variable()?;
        if !self.eat(&["."]) {
            return Err(self.error("expected `.` after quantified variable"));
        }
        let body = self.formula()?;
        Ok(Some(if existential {
            Formula::exists(var, body)
        } else {
            Formula::forall(var, body)
        }))
    }

    fn conjunction(&mut self) -> Result<Formula, Error> {
        let mut parts = vec![self.unary()?];
        while self.eat(&["∧", "/\\", "&"]) {
            parts.push(self.unary()?);
        }
        Ok(Formula::and(parts))
    }

    fn unary(&mut self) -> Result<Formula, Error> {
        if self.eat(&["¬", "!", "~"]) {
            return Ok(Formula::not(self.unary()?));
        }
        if self.eat(&["("]) {
            let phi = self.formula()?;
            if !self.eat(&[")"]) {
                return Err(self.error("expected `)`"));
            }
            return Ok(phi);
        }
        if let Some(phi) = self.quantified()? {
            return Ok(phi);
        }
        if self.eat(&["⊤", "true"]) {
            return Ok(Formula::True);
        }
        if self.eat(&["⊥", "false"]) {
            return Ok(Formula::False);
        }
        let left = self.variable()?;
        let phi = if self.eat(&["≠", "!="]) {
            Formula::not_equal(&left, &self.variable()?)
        } else if self.eat(&["≤", "<="]) {
            Formula::leq(&left, &self.variable()?)
        } else if self.eat(&["<"]) {
            Formula::less(&left, &self.variable()?)
        } else if self.eat(&["="]) {
            Formula::equal(&left, &self.variable()?)
        } else {
            return Err(self.error("expected a relation symbol"));
        };
        Ok(phi)
    }

    fn variable(&mut self) -> Result<Variable, Error> {
        self.skip_ws();
        let rest = self.rest();
        let ident_len = rest
            .char_indices()
            .find(|&(i, c)| {
                !(c.is_ascii_alphabetic()
                    || c == '_'
                    || (i > 0 && (c.is_ascii_digit() || c == '\'')))
            })
            .map_or(rest.len(), |(i, _)| i);
        let ident = &rest[..ident_len];
        if ident == "a" {
            let digits: String = rest[1..]
                .chars()
                .take_while(|c| ('₀'..='₉').contains(c))
                .collect();
            if !digits.is_empty() {
                let value: String = digits
                    .chars()
                    .map(|c| char::from_digit(c as u32 - '₀' as u32, 10).unwrap())
                    .collect();
                let n = value
                    .parse()
                    .map_err(|_| self.error("fresh variable index out of range"))?;
                self.pos += 1 + digits.len();
                return Ok(Variable::Fresh(n));
            }
        }
        if !super::is_identifier(ident) {
            return Err(self.error("expected an atom variable"));
        }
        self.pos += ident_len;
        Ok(Variable::named(ident))
    }
}
