use std::fmt;

use super::{Formula, Relation};

// Binding strength: quantifiers extend as far right as possible.
fn precedence(phi: &Formula) -> u8 {
    match phi {
        Formula::Exists(..) | Formula::ForAll(..) => 0,
        Formula::Or(_) => 1,
        Formula::And(_) => 2,
        _ => 3,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, phi: &Formula, min: u8) -> fmt::Result {
    if precedence(phi) < min {
        write!(f, "({phi})")
    } else {
        write!(f, "{phi}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("⊤"),
            Formula::False => f.write_str("⊥"),
            Formula::Rel(rel, a, b) => write!(f, "{a} {rel} {b}"),
            Formula::Not(inner) => match &**inner {
                Formula::Rel(Relation::Eq, a, b) => write!(f, "{a} ≠ {b}"),
                Formula::True | Formula::False => write!(f, "¬{inner}"),
                _ => write!(f, "¬({inner})"),
            },
            Formula::And(ps) | Formula::Or(ps) => {
                let (sep, min) = if matches!(self, Formula::And(_)) {
                    (" ∧ ", 3)
                } else {
                    (" ∨ ", 2)
                };
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    write_operand(f, p, min)?;
                }
                Ok(())
            }
            Formula::Exists(x, body) => write!(f, "∃{x}. {body}"),
            Formula::ForAll(x, body) => write!(f, "∀{x}. {body}"),
        }
    }
}
