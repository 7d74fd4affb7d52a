//! Canonical text and JSON writers. `parse(format(f))` reproduces `f`
//! exactly: coefficients are printed with Rust's shortest round-trip float
//! formatting and term order is deterministic. Terms sort by total absolute
//! degree, so constants come first, and within a grade the term touching
//! the earlier variable (with the larger exponent on ties) leads; `1+x+y`
//! and `1 + x^-1 + y^-1` both come out in that order.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde_json::json;

use super::{ExponentVector, LaurentPolynomial, PolySystem};

fn term_order(a: &ExponentVector, b: &ExponentVector) -> Ordering {
    let la: i64 = a.entries().iter().map(|e| e.abs()).sum();
    let lb: i64 = b.entries().iter().map(|e| e.abs()).sum();
    la.cmp(&lb).then_with(|| {
        for (&x, &y) in a.entries().iter().zip(b.entries()) {
            if x == y {
                continue;
            }
            return if x == 0 {
                Ordering::Greater
            } else if y == 0 {
                Ordering::Less
            } else {
                y.cmp(&x)
            };
        }
        Ordering::Equal
    })
}

fn ordered_terms(poly: &LaurentPolynomial) -> Vec<(&ExponentVector, &Complex64)> {
    let mut terms: Vec<_> = poly.terms().collect();
    terms.sort_by(|(ea, _), (eb, _)| term_order(ea, eb));
    terms
}

fn write_monomial(out: &mut String, exp: &ExponentVector, vars: &[String]) {
    let mut first = true;
    for (name, &e) in vars.iter().zip(exp.entries()) {
        if e == 0 {
            continue;
        }
        if !first {
            out.push('*');
        }
        first = false;
        out.push_str(name);
        if e != 1 {
            let _ = write!(out, "^{e}");
        }
    }
}

fn write_real(out: &mut String, v: f64) {
    let _ = write!(out, "{v}");
}

impl LaurentPolynomial {
    /// Canonical text form using the given variable names.
    pub fn to_text(&self, vars: &[String]) -> String {
        assert_eq!(
            vars.len(),
            self.num_vars(),
            "variable list must match the polynomial"
        );
        let mut out = String::new();
        for (i, (exp, coeff)) in ordered_terms(self).iter().enumerate() {
            let constant = exp.entries().iter().all(|&e| e == 0);
            if coeff.im == 0.0 {
                let v = coeff.re;
                if i == 0 {
                    if v < 0.0 {
                        out.push('-');
                    }
                } else {
                    out.push_str(if v < 0.0 { " - " } else { " + " });
                }
                let mag = v.abs();
                if constant {
                    write_real(&mut out, mag);
                } else if mag == 1.0 {
                    write_monomial(&mut out, exp, vars);
                } else {
                    write_real(&mut out, mag);
                    out.push('*');
                    write_monomial(&mut out, exp, vars);
                }
            } else {
                if i > 0 {
                    out.push_str(" + ");
                }
                out.push('(');
                write_real(&mut out, coeff.re);
                out.push_str(if coeff.im < 0.0 { "-" } else { "+" });
                write_real(&mut out, coeff.im.abs());
                out.push_str("i)");
                if !constant {
                    out.push('*');
                    write_monomial(&mut out, exp, vars);
                }
            }
        }
        out
    }
}

impl PolySystem {
    /// Canonical system file text (`vars:` line plus `f<k>:` lines).
    pub fn to_text(&self) -> String {
        let mut out = format!("vars: {}\n", self.var_names().join(", "));
        for (k, p) in self.polys().iter().enumerate() {
            let _ = writeln!(out, "f{}: {}", k + 1, p.to_text(self.var_names()));
        }
        out
    }

    /// Canonical JSON form
    /// `{"vars":[...],"polys":[{"terms":[{"exp":[...],"re":r,"im":i}]}]}`.
    /// Terms are in ascending lexicographic exponent order.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "vars": self.var_names(),
            "polys": self.polys().iter().map(|p| {
                json!({
                    "terms": p.terms().map(|(e, c)| {
                        json!({"exp": e.entries(), "re": c.re, "im": c.im})
                    }).collect::<Vec<_>>()
                })
            }).collect::<Vec<_>>(),
        })
    }
}
