use num_traits::One;

use super::poly::{Monomial, Poly, Q};
use super::var::Var;
use super::Expr;
use crate::jet::JetContext;

fn structurally_nonzero(v: &Var, ctx: &JetContext) -> bool {
    match v {
        Var::Exp(_) => true,
        Var::Sym(s) => ctx.is_nonzero_symbol(s),
        _ => false,
    }
}

/// Splits off the monomial factor made of exp atoms and nonzero symbols.
fn split_nonvanishing(p: &Poly, ctx: &JetContext) -> (Monomial, Poly) {
    let content = p.monomial_content();
    let mut m = Monomial::one();
    for (v, k) in content.factors() {
        if structurally_nonzero(v, ctx) {
            m = m.mul(&Monomial::var(v.clone(), *k));
        }
    }
    if m.is_one() {
        return (m, p.clone());
    }
    let rest = Poly::from_terms(p.terms().iter().map(|(mm, c)| (mm.div(&m).expect("content divides"), c.clone())).collect());
    (m, rest)
}

/// `e = multiplier · core` with the multiplier a product of a nonzero
/// constant, exp atoms and declared-nonzero symbols (possibly inverted).
/// The core numerator is normalized to leading coefficient one.
pub fn factor_nonvanishing(e: &Expr, ctx: &JetContext) -> (Expr, Expr) {
    if e.is_zero() {
        return (Expr::one(), Expr::zero());
    }
    let (mn, rn) = split_nonvanishing(e.num(), ctx);
    let (md, rd) = split_nonvanishing(e.den(), ctx);
    let c: Q = rn.lc().clone();
    let rn = if c.is_one() { rn } else { rn.scale(&c.recip()) };
    let multiplier = Expr::from_poly(Poly::term(mn, c)) / Expr::from_poly(Poly::term(md, Q::one()));
    let core = Expr::from_parts(rn, rd).expect("nonzero denominator");
    (multiplier, core)
}
