use num_traits::{One, Signed};

use super::poly::{Monomial, Poly, Q};
use super::var::Var;
use super::Expr;

/// Naming convention for coordinates.
///
/// Without a time alias slot `i` prints as `x{i+1}`; with it slot 0 is `t`
/// and slot `i > 0` is `x{i}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Names {
    pub time_alias: bool,
}

impl Names {
    pub fn coord(&self, i: usize) -> String {
        if self.time_alias {
            if i == 0 {
                "t".to_string()
            } else {
                format!("x{i}")
            }
        } else {
            format!("x{}", i + 1)
        }
    }
}

pub fn show(e: &Expr, names: Names) -> String {
    let num = show_poly(e.num(), names);
    if e.den().is_one() {
        return num;
    }
    let num = if e.num().len() > 1 { format!("({num})") } else { num };
    let den_simple = e.den().len() == 1 && e.den().lt().1.is_one() && e.den().lt().0.factors().len() == 1;
    let den = show_poly(e.den(), names);
    if den_simple {
        format!("{num}/{den}")
    } else {
        format!("{num}/({den})")
    }
}

fn show_poly(p: &Poly, names: Names) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().iter().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&show_term(m, &c.abs(), names));
    }
    out
}

fn show_q(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn show_term(m: &Monomial, c: &Q, names: Names) -> String {
    if m.is_one() {
        return show_q(c);
    }
    let mut parts = Vec::new();
    if !c.is_one() {
        parts.push(show_q(c));
    }
    for (v, k) in m.factors().iter().rev() {
        let s = show_var(v, names);
        parts.push(if *k == 1 { s } else { format!("{s}^{k}") });
    }
    parts.join("*")
}

pub(super) fn show_var(v: &Var, names: Names) -> String {
    match v {
        Var::Coord(i) => names.coord(*i as usize),
        Var::U => "u".to_string(),
        Var::Jet(a) => format!("u{a}"),
        Var::Sym(s) => s.to_string(),
        Var::Exp(a) => format!("exp({})", show(a, names)),
        Var::Omega(a) => format!("w{a}"),
    }
}
