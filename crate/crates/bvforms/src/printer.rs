//! Canonical text for monomials and forms.
//!
//! The printer emits a flat sum of signed products in canonical monomial
//! order: coefficient first (omitted when ±1 next to generators), then an
//! `h` power for deformed forms, then the generator factors joined by `*`
//! with `^k` for repeated commuting generators. Printed output always
//! re-parses to the same value, and printing a freshly parsed expression
//! yields the canonical reordering.

use std::fmt;

use num::Signed;

use crate::form::SuperForm;
use crate::monomial::{GenKind, Generator, Monomial};
use crate::operators::HbarForm;
use crate::scalar::Scalar;

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let stem = match self.kind {
            GenKind::X => "x",
            GenKind::P => "p",
            GenKind::Dx => "dx",
            GenKind::Dp => "dp",
        };
        write!(f, "{}{}", stem, self.index)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (g, k) in self.factors() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if k == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{k}")?;
            }
        }
        Ok(())
    }
}

/// One signed product: `sign`, then coefficient magnitude, `h` power and
/// monomial joined by `*`. The sign is returned separately so the caller
/// can fold it into ` + ` / ` - ` joiners.
fn term_body(c: &Scalar, hbar_power: u32, m: &Monomial) -> (bool, String) {
    let negative = c.is_negative();
    let mag = c.abs();
    let mut parts: Vec<String> = Vec::new();
    if !num::One::is_one(&mag) {
        parts.push(mag.to_string());
    }
    if hbar_power == 1 {
        parts.push("h".to_string());
    } else if hbar_power > 1 {
        parts.push(format!("h^{hbar_power}"));
    }
    if !m.is_one() {
        parts.push(m.to_string());
    }
    if parts.is_empty() {
        parts.push("1".to_string());
    }
    (negative, parts.join("*"))
}

fn write_terms<'a, I>(f: &mut fmt::Formatter<'_>, terms: I) -> fmt::Result
where
    I: Iterator<Item = (u32, &'a Monomial, &'a Scalar)>,
{
    let mut wrote_any = false;
    for (hbar_power, m, c) in terms {
        let (negative, body) = term_body(c, hbar_power, m);
        if !wrote_any {
            if negative {
                write!(f, "-")?;
            }
        } else if negative {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        write!(f, "{body}")?;
        wrote_any = true;
    }
    if !wrote_any {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for SuperForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms().map(|(m, c)| (0, m, c)))
    }
}

impl fmt::Display for HbarForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flat = self.levels().iter().enumerate().flat_map(|(j, level)| {
            level.terms().map(move |(m, c)| (j as u32, m, c))
        });
        write_terms(f, flat)
    }
}

pub fn display_monomial(m: &Monomial) -> String {
    m.to_string()
}

pub fn display_form(form: &SuperForm) -> String {
    form.to_string()
}

/// Exact term list for reports: canonical monomial text plus rational
/// coefficient string per term.
pub fn form_to_json(form: &SuperForm) -> serde_json::Value {
    let terms: Vec<serde_json::Value> = form
        .terms()
        .map(|(m, c)| {
            serde_json::json!({
                "monomial": m.to_string(),
                "coeff": c.to_string(),
            })
        })
        .collect();
    serde_json::Value::Array(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::term;
    use crate::scalar::{int, ratio};

    #[test]
    fn generator_and_monomial_text() {
        assert_eq!(Generator::dx(3).to_string(), "dx3");
        let m = Monomial::from_parts(vec![2, 0], 0b1, 0b10, vec![0, 3]);
        assert_eq!(m.to_string(), "x1^2*p1*dx2*dp2^3");
        assert_eq!(Monomial::one(2).to_string(), "1");
    }

    #[test]
    fn form_text() {
        assert_eq!(SuperForm::zero(1).to_string(), "0");
        assert_eq!(SuperForm::scalar(1, int(-1)).to_string(), "-1");
        // Term order follows the monomial order: p2 has the smaller x-block.
        let f = &term(2, int(1), &[Generator::x(1)]) - &term(2, ratio(3, 2), &[Generator::p(2)]);
        assert_eq!(f.to_string(), "-3/2*p2 + x1");
        let g = term(1, int(-1), &[Generator::p(1), Generator::dx(1)]);
        assert_eq!(g.to_string(), "-p1*dx1");
    }

    #[test]
    fn omega_text_is_pinned() {
        assert_eq!(crate::operators::omega(2).to_string(), "dx1*dp1 + dx2*dp2");
    }

    #[test]
    fn hbar_text() {
        // p1*dx1 - h, the classic total cocycle shape.
        let z = HbarForm::new(
            1,
            vec![
                term(1, int(1), &[Generator::p(1), Generator::dx(1)]),
                SuperForm::scalar(1, int(-1)),
            ],
        );
        assert_eq!(z.to_string(), "p1*dx1 - h");
        let w = HbarForm::new(1, vec![SuperForm::zero(1), SuperForm::zero(1), term(1, int(2), &[Generator::x(1)])]);
        assert_eq!(w.to_string(), "2*h^2*x1");
        assert_eq!(HbarForm::zero(1).to_string(), "0");
    }

    #[test]
    fn json_terms() {
        let f = term(1, ratio(-1, 3), &[Generator::x(1)]);
        let v = form_to_json(&f);
        assert_eq!(v[0]["monomial"], "x1");
        assert_eq!(v[0]["coeff"], "-1/3");
    }
}
