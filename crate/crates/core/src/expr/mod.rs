//! Symbolic expressions in canonical rational normal form.
//!
//! An [`Expr`] is a quotient of two polynomials over `Q` whose gcd is one and
//! whose denominator has leading coefficient one. Equality of `Expr` values is
//! therefore equality of rational functions. Exponentials are opaque
//! indeterminates keyed by their normalized argument.

mod eval;
mod factor;
mod gcd;
mod node;
mod parse;
mod poly;
mod print;
mod var;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed};

pub use eval::{is_zero_checked, sample_agrees, Evaluator, SampleConfig};
pub use factor::factor_nonvanishing;
pub use gcd::gcd;
pub use node::Node;
pub use parse::{parse_expr, parse_node};
pub use poly::{q, q2, Monomial, Poly, Q};
pub use print::Names;
pub use var::{MultiIndex, Var, MAX_VARS};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Frac {
    num: Poly,
    den: Poly,
}

const MAX_EXP_POWER: u64 = 64;

/// Normalized symbolic expression.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Frac>);

impl Expr {
    fn raw(num: Poly, den: Poly) -> Self {
        Expr(Arc::new(Frac { num, den }))
    }

    /// `num / den` reduced to lowest terms.
    pub fn from_parts(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::SingularSubstitution("denominator vanishes identically".into()));
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if let Some(c) = den.as_constant() {
            return Self::raw(num.scale(&c.recip()), Poly::one());
        }
        let g = gcd(&num, &den);
        Self::reduced(num, den, &g)
    }

    fn reduced(num: Poly, den: Poly, g: &Poly) -> Self {
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(g).expect("gcd divides numerator"), den.div_exact(g).expect("gcd divides denominator"))
        };
        let lc = den.lc().clone();
        if lc.is_one() {
            Self::raw(num, den)
        } else {
            let inv = lc.recip();
            Self::raw(num.scale(&inv), den.scale(&inv))
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        Self::raw(p, Poly::one())
    }

    pub fn zero() -> Self {
        Self::raw(Poly::zero(), Poly::one())
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn int(n: i64) -> Self {
        Self::from_poly(Poly::constant(q(n)))
    }

    pub fn rational(c: Q) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn var(v: Var) -> Self {
        Self::from_poly(Poly::var(v))
    }

    pub fn coord(i: usize) -> Self {
        Self::var(Var::coord(i))
    }

    pub fn u() -> Self {
        Self::var(Var::U)
    }

    pub fn jet(alpha: MultiIndex) -> Self {
        Self::var(Var::jet(alpha))
    }

    pub fn sym(name: &str) -> Self {
        Self::var(Var::sym(name))
    }

    /// `exp(arg)`, split over the terms of the numerator: with
    /// `arg = Σ (p/q) m / D` the result is `Π exp(m / (q D))^p`.
    pub fn exp(arg: Expr) -> Self {
        let den = arg.den();
        let mut out = Self::one();
        for (m, c) in arg.num().terms() {
            let (base, k) = match i64::try_from(c.numer()) {
                Ok(k) if k.unsigned_abs() <= MAX_EXP_POWER => (Q::from_integer(c.denom().clone()).recip(), k),
                _ => (c.abs(), if c.is_negative() { -1 } else { 1 }),
            };
            let a = Self::normalize(Poly::term(m.clone(), base), den.clone());
            out = out * Self::var(Var::Exp(Arc::new(a))).pow(k);
        }
        out
    }

    pub fn num(&self) -> &Poly {
        &self.0.num
    }

    pub fn den(&self) -> &Poly {
        &self.0.den
    }

    pub fn is_zero(&self) -> bool {
        self.0.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.num.is_one() && self.0.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.0.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.0.den.is_one() {
            self.0.num.as_constant()
        } else {
            None
        }
    }

    pub fn as_var(&self) -> Option<&Var> {
        if !self.is_polynomial() || self.num().len() != 1 {
            return None;
        }
        let (m, c) = self.num().lt();
        if c.is_one() && m.factors().len() == 1 && m.factors()[0].1 == 1 {
            Some(&m.factors()[0].0)
        } else {
            None
        }
    }

    /// Number of scalar nodes of the expanded form.
    pub fn size(&self) -> usize {
        self.0.num.size() + self.0.den.size()
    }

    /// Indeterminates occurring at top level (exp arguments not entered).
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut s = self.0.num.vars();
        s.extend(self.0.den.vars());
        s
    }

    /// Indeterminates occurring anywhere, including inside exp arguments.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        for v in self.vars() {
            if let Var::Exp(a) = &v {
                a.collect_vars(out);
            }
            out.insert(v);
        }
    }

    /// Non-exp indeterminates occurring anywhere.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        self.all_vars().into_iter().filter(|v| !v.is_exp()).collect()
    }

    /// Whether `v` occurs anywhere in the expression.
    pub fn mentions(&self, v: &Var) -> bool {
        self.vars().iter().any(|w| w == v || matches!(w, Var::Exp(a) if a.mentions(v)))
    }

    /// Whether `∂_v self` is not identically zero.
    pub fn depends_on(&self, v: &Var) -> bool {
        if !self.mentions(v) {
            return false;
        }
        let through_exp = self.vars().iter().any(|w| matches!(w, Var::Exp(a) if a.mentions(v)));
        if !through_exp {
            return true;
        }
        !self.diff(v).is_zero()
    }

    pub fn pow(&self, k: i64) -> Expr {
        if k == 0 {
            return Expr::one();
        }
        let e = k.unsigned_abs() as u32;
        let num = self.0.num.pow(e);
        let den = self.0.den.pow(e);
        if k > 0 {
            Self::raw(num, den)
        } else {
            assert!(!num.is_zero(), "negative power of zero");
            Self::reduced(den, num, &Poly::one())
        }
    }

    pub fn recip(&self) -> Expr {
        self.pow(-1)
    }

    pub fn checked_div(&self, other: &Expr) -> Result<Expr> {
        if other.is_zero() {
            return Err(Error::SingularSubstitution("division by an expression that vanishes identically".into()));
        }
        Ok(self * &other.recip())
    }

    fn add_impl(&self, other: &Expr, sign: bool) -> Expr {
        let combine = |a: &Poly, b: &Poly| if sign { a.add(b) } else { a.sub(b) };
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if sign { other.clone() } else { -other };
        }
        let (a, b, c, d) = (&self.0.num, &self.0.den, &other.0.num, &other.0.den);
        if b.is_one() && d.is_one() {
            return Self::raw(combine(a, c), Poly::one());
        }
        if b == d {
            let n = combine(a, c);
            if n.is_zero() {
                return Self::zero();
            }
            let g = gcd(&n, b);
            return Self::reduced(n, b.clone(), &g);
        }
        if b.is_one() {
            return Self::raw(combine(&a.mul(d), c), d.clone());
        }
        if d.is_one() {
            return Self::raw(combine(a, &c.mul(b)), b.clone());
        }
        let g = gcd(b, d);
        let bg = b.div_exact(&g).expect("gcd divides");
        let dg = d.div_exact(&g).expect("gcd divides");
        let n = combine(&a.mul(&dg), &c.mul(&bg));
        if n.is_zero() {
            return Self::zero();
        }
        let den = b.mul(&dg);
        let h = gcd(&n, &g);
        Self::reduced(n, den, &h)
    }

    fn mul_impl(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let (a, b, c, d) = (&self.0.num, &self.0.den, &other.0.num, &other.0.den);
        if b.is_one() && d.is_one() {
            return Self::raw(a.mul(c), Poly::one());
        }
        let g1 = gcd(a, d);
        let g2 = gcd(c, b);
        let a1 = a.div_exact(&g1).expect("gcd divides");
        let d1 = d.div_exact(&g1).expect("gcd divides");
        let c1 = c.div_exact(&g2).expect("gcd divides");
        let b1 = b.div_exact(&g2).expect("gcd divides");
        Self::reduced(a1.mul(&c1), b1.mul(&d1), &Poly::one())
    }

    /// Derivative of a polynomial, including the chain rule through exp atoms.
    fn poly_diff(p: &Poly, v: &Var) -> Expr {
        let mut out = Expr::from_poly(p.diff(v));
        for w in p.vars() {
            if let Var::Exp(arg) = &w {
                if w == *v || !arg.mentions(v) {
                    continue;
                }
                let da = arg.diff(v);
                if da.is_zero() {
                    continue;
                }
                let pw = Expr::from_poly(p.diff(&w));
                out = out + pw * Expr::var(w.clone()) * da;
            }
        }
        out
    }

    /// Partial derivative with respect to an indeterminate.
    pub fn diff(&self, v: &Var) -> Expr {
        if !self.mentions(v) {
            return Expr::zero();
        }
        let n = &self.0.num;
        let d = &self.0.den;
        let dn = Self::poly_diff(n, v);
        if d.is_one() {
            return dn;
        }
        let dd = Self::poly_diff(d, v);
        let den = Expr::from_poly(d.clone());
        if dd.is_zero() {
            return dn / den;
        }
        (dn * den.clone() - Expr::from_poly(n.clone()) * dd) / (den.clone() * den)
    }

    /// Simultaneous substitution of indeterminates, entering exp arguments.
    pub fn substitute(&self, bindings: &HashMap<Var, Expr>) -> Result<Expr> {
        if bindings.is_empty() {
            return Ok(self.clone());
        }
        let mut images: HashMap<Var, Expr> = HashMap::new();
        let mut any = false;
        for v in self.vars() {
            let img = if let Some(e) = bindings.get(&v) {
                any = true;
                Some(e.clone())
            } else if let Var::Exp(arg) = &v {
                let na = arg.substitute(bindings)?;
                if na != **arg {
                    any = true;
                    Some(Expr::exp(na))
                } else {
                    None
                }
            } else {
                None
            };
            if let Some(img) = img {
                images.insert(v, img);
            }
        }
        if !any {
            return Ok(self.clone());
        }
        let num = subst_poly(&self.0.num, &images);
        let den = subst_poly(&self.0.den, &images);
        if den.is_zero() {
            return Err(Error::SingularSubstitution("a denominator vanishes after substitution".into()));
        }
        Ok(num / den)
    }

    /// Substitutes a single variable.
    pub fn subs1(&self, v: &Var, e: &Expr) -> Result<Expr> {
        let mut m = HashMap::new();
        m.insert(v.clone(), e.clone());
        self.substitute(&m)
    }

    /// Polynomial coefficients of the numerator in `v` (denominator must be free of `v`).
    pub fn coeffs_in(&self, v: &Var) -> Option<Vec<Expr>> {
        if self.0.den.contains_var(v) {
            return None;
        }
        if self.vars().iter().any(|w| matches!(w, Var::Exp(a) if a.mentions(v))) {
            return None;
        }
        let den = Expr::from_poly(self.0.den.clone());
        Some(self.0.num.coeffs_in(v).into_iter().map(|c| Expr::from_poly(c) / den.clone()).collect())
    }

    /// Canonical tree view.
    pub fn to_node(&self) -> Node {
        node::from_expr(self)
    }

    pub fn show(&self, names: Names) -> String {
        print::show(self, names)
    }
}

/// Evaluates a polynomial at rational-function images of its variables
/// (unbound variables stay as themselves), clearing denominators once.
fn subst_poly(p: &Poly, images: &HashMap<Var, Expr>) -> Expr {
    if p.is_zero() {
        return Expr::zero();
    }
    let mut rational: Vec<Var> = Vec::new();
    for (m, _) in p.terms() {
        for (v, _) in m.factors() {
            if images.get(v).is_some_and(|img| !img.is_polynomial()) && !rational.contains(v) {
                rational.push(v.clone());
            }
        }
    }
    // den(image_v) = c_v · Π_j b_j^{e_vj} over a coprime base.
    let base = coprime_base(&rational.iter().map(|v| images[v].den().clone()).collect::<Vec<_>>());
    let mut factored: HashMap<Var, (Q, Vec<u32>)> = HashMap::new();
    for v in &rational {
        let mut rest = images[v].den().clone();
        let mut e = vec![0u32; base.len()];
        for (j, b) in base.iter().enumerate() {
            while let Some(q) = rest.div_exact(b) {
                rest = q;
                e[j] += 1;
            }
        }
        let c = rest.as_constant().expect("coprime base covers the denominator");
        factored.insert(v.clone(), (c, e));
    }
    let term_exps: Vec<Vec<u32>> = p
        .terms()
        .iter()
        .map(|(m, _)| {
            let mut e = vec![0u32; base.len()];
            for (v, k) in m.factors() {
                if let Some((_, ev)) = factored.get(v) {
                    for (acc, x) in e.iter_mut().zip(ev) {
                        *acc += k * x;
                    }
                }
            }
            e
        })
        .collect();
    let emax: Vec<u32> =
        (0..base.len()).map(|j| term_exps.iter().map(|e| e[j]).max().unwrap_or(0)).collect();

    let mut pow_cache: HashMap<(Var, u32), Poly> = HashMap::new();
    let mut base_cache: HashMap<(usize, u32), Poly> = HashMap::new();
    let mut acc = Poly::zero();
    let mut terms_acc = Vec::new();
    for ((m, c), e) in p.terms().iter().zip(&term_exps) {
        let mut t = Poly::constant(c.clone());
        let mut keep = Monomial::one();
        for (v, k) in m.factors() {
            match images.get(v) {
                None => keep = keep.mul(&Monomial::var(v.clone(), *k)),
                Some(img) => {
                    let pw = pow_cache.entry((v.clone(), *k)).or_insert_with(|| img.num().pow(*k));
                    t = t.mul(pw);
                    if let Some((cv, _)) = factored.get(v) {
                        t = t.scale(&cv.recip().pow(*k as i32));
                    }
                }
            }
        }
        for (j, b) in base.iter().enumerate() {
            let d = emax[j] - e[j];
            if d > 0 {
                t = t.mul(base_cache.entry((j, d)).or_insert_with(|| b.pow(d)));
            }
        }
        if !keep.is_one() {
            t = t.mul_term(&keep, &Q::one());
        }
        terms_acc.push(t);
        if terms_acc.len() >= 64 {
            for t in terms_acc.drain(..) {
                acc = acc.add(&t);
            }
        }
    }
    for t in terms_acc {
        acc = acc.add(&t);
    }
    let dens: Vec<(Poly, u32)> = base.into_iter().zip(emax).filter(|(_, k)| *k > 0).collect();
    Expr::normalize_factored(acc, &dens)
}

/// Refines `ps` into pairwise coprime monic factors, each `p` being a product
/// of powers of them.
fn coprime_base(ps: &[Poly]) -> Vec<Poly> {
    let mut base: Vec<Poly> = Vec::new();
    let mut work: Vec<Poly> = ps.iter().map(Poly::monic).collect();
    while let Some(q) = work.pop() {
        if q.is_constant() {
            continue;
        }
        let hit = base.iter().enumerate().find_map(|(i, b)| {
            let g = gcd(&q, b);
            (!g.is_constant()).then_some((i, g))
        });
        match hit {
            Some((i, g)) => {
                let b = base.swap_remove(i);
                work.push(b.div_exact(&g).expect("gcd divides"));
                work.push(q.div_exact(&g).expect("gcd divides"));
                work.push(g);
            }
            None => base.push(q),
        }
    }
    base
}

impl Expr {
    /// `num / Π d^k` reduced to lowest terms, using the factored denominator
    /// to avoid a gcd against the expanded product.
    fn normalize_factored(mut num: Poly, dens: &[(Poly, u32)]) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let ds: Vec<Poly> = dens.iter().map(|(d, _)| d.clone()).collect();
        let mut base: Vec<(Poly, u32)> = coprime_base(&ds).into_iter().map(|b| (b, 0)).collect();
        for (d, k) in dens {
            let mut rest = d.monic();
            for (b, e) in base.iter_mut() {
                while let Some(q) = rest.div_exact(b) {
                    rest = q;
                    *e += k;
                }
            }
        }
        let mut i = 0;
        while i < base.len() {
            let (b, e) = base[i].clone();
            let mut e = e;
            while e > 0 {
                match num.div_exact(&b) {
                    Some(q) => {
                        num = q;
                        e -= 1;
                    }
                    None => break,
                }
            }
            if e > 0 {
                let g = gcd(&num, &b);
                if !g.is_constant() {
                    let h = b.div_exact(&g).expect("gcd divides");
                    base[i] = (g, e);
                    if !h.is_constant() {
                        base.push((h, e));
                    }
                    continue;
                }
            }
            base[i].1 = e;
            i += 1;
        }
        let mut den = Poly::one();
        for (b, e) in &base {
            if *e > 0 {
                den = den.mul(&b.pow(*e));
            }
        }
        Self::reduced(num, den, &Poly::one())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.show(Names::default()))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Var> for Expr {
    fn from(v: Var) -> Self {
        Expr::var(v)
    }
}

impl From<BigInt> for Expr {
    fn from(n: BigInt) -> Self {
        Expr::rational(Q::from_integer(n))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                (&self).$m(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_impl(b, true));
binop!(Sub, sub, |a, b| a.add_impl(b, false));
binop!(Mul, mul, |a, b| a.mul_impl(b));
binop!(Div, div, |a, b| {
    assert!(!b.is_zero(), "division by zero expression");
    a.mul_impl(&b.recip())
});

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::raw(self.0.num.neg(), self.0.den.clone())
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::one(), |a, b| a * b)
    }
}

/// Sign of the leading coefficient of the numerator.
pub fn leading_sign(e: &Expr) -> i32 {
    if e.is_zero() {
        0
    } else if e.num().lc().is_negative() {
        -1
    } else {
        1
    }
}
