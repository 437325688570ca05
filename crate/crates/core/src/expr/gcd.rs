//! Multivariate polynomial gcd over `Q`: modular coprimality certificate,
//! heuristic integer gcd, and recursive primitive remainder sequences as the
//! fallback.

use std::collections::BTreeSet;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use super::poly::{Monomial, Poly, Q};
use super::var::Var;

/// Monic gcd of two polynomials; `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.is_monomial() || b.is_monomial() {
        let m = a.monomial_content().gcd(&b.monomial_content());
        return Poly::term(m, Q::one());
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mg = ma.gcd(&mb);
    if !ma.is_one() || !mb.is_one() {
        let a1 = strip_monomial(a, &ma);
        let b1 = strip_monomial(b, &mb);
        let g = gcd(&a1, &b1);
        return g.mul_term(&mg, &Q::one()).monic();
    }
    let am = a.monic();
    let bm = b.monic();
    if am == bm {
        return am;
    }
    if b.len() <= a.len() && a.div_exact(b).is_some() {
        return bm;
    }
    if a.len() <= b.len() && b.div_exact(a).is_some() {
        return am;
    }
    let va = a.vars();
    let vb = b.vars();
    if coprime_mod_p(a, b, &va, &vb) {
        return Poly::one();
    }
    if let Some(v) = va.difference(&vb).next() {
        return gcd_with_coeffs(&a.coeffs_in(v), b);
    }
    if let Some(v) = vb.difference(&va).next() {
        return gcd_with_coeffs(&b.coeffs_in(v), a);
    }
    if let Some(g) = heu_gcd(a, b) {
        return g;
    }
    let v = main_var(a, b, &va);
    let ca = content(a, &v);
    let cb = content(b, &v);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let c = gcd(&ca, &cb);
    let g = prs(&pa, &pb, &v);
    c.mul(&g).monic()
}

fn strip_monomial(p: &Poly, m: &Monomial) -> Poly {
    if m.is_one() {
        return p.clone();
    }
    Poly::from_terms(p.terms().iter().map(|(mm, c)| (mm.div(m).expect("monomial content"), c.clone())).collect())
}

fn main_var(a: &Poly, b: &Poly, vars: &BTreeSet<Var>) -> Var {
    vars.iter()
        .min_by_key(|v| a.degree_in(v).max(b.degree_in(v)))
        .cloned()
        .expect("nonconstant polynomials share a variable")
}

/// gcd of `b` with every polynomial in `coeffs`.
fn gcd_with_coeffs(coeffs: &[Poly], b: &Poly) -> Poly {
    let mut cs: Vec<&Poly> = coeffs.iter().filter(|c| !c.is_zero()).collect();
    cs.sort_by_key(|c| (c.len(), c.total_degree()));
    let mut g = b.monic();
    for c in cs {
        g = gcd(c, &g);
        if g.is_constant() {
            return Poly::one();
        }
    }
    g
}

/// Content with respect to `v`: gcd of the coefficients in the other variables.
pub fn content(p: &Poly, v: &Var) -> Poly {
    let mut cs: Vec<Poly> = p.coeffs_in(v).into_iter().filter(|c| !c.is_zero()).collect();
    cs.sort_by_key(|c| (c.len(), c.total_degree()));
    let mut g = cs[0].monic();
    for c in &cs[1..] {
        if g.is_constant() {
            break;
        }
        g = gcd(c, &g);
    }
    if g.is_constant() {
        Poly::one()
    } else {
        g
    }
}

fn primitive_part(p: &Poly, v: &Var) -> Poly {
    let c = content(p, v);
    p.div_exact(&c).expect("content divides").monic()
}

/// Pseudo-remainder of `a` by `b` in `v`, up to a nonzero factor free of `v`.
fn prem(a: &Poly, b: &Poly, v: &Var) -> Poly {
    let db = b.degree_in(v);
    let bc = b.coeffs_in(v);
    let lb = bc[db as usize].clone();
    let mut r = a.clone();
    loop {
        if r.is_zero() {
            return r;
        }
        let dr = r.degree_in(v);
        if dr < db {
            return r;
        }
        let rc = r.coeffs_in(v);
        let lr = &rc[dr as usize];
        let shift = Poly::term(Monomial::var(v.clone(), dr - db), Q::one());
        r = r.mul(&lb).sub(&b.mul(&lr.mul(&shift)));
        let c = r.rational_content();
        if !c.is_one() {
            r = r.scale(&c.recip());
        }
    }
}

/// gcd of two polynomials primitive with respect to `v`.
fn prs(a: &Poly, b: &Poly, v: &Var) -> Poly {
    let (mut a, mut b) = if a.degree_in(v) >= b.degree_in(v) { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    if b.degree_in(v) == 0 {
        return Poly::one();
    }
    loop {
        let r = prem(&a, &b, v);
        if r.is_zero() {
            return b.monic();
        }
        if r.degree_in(v) == 0 {
            return Poly::one();
        }
        a = b;
        b = primitive_part(&r, v);
    }
}

const P: u64 = 4_294_967_291;

fn mod_p(c: &Q) -> Option<u64> {
    let p = BigInt::from(P);
    let n = (c.numer() % &p + &p) % &p;
    let d = (c.denom() % &p + &p) % &p;
    let d = d.to_u64()?;
    if d == 0 {
        return None;
    }
    Some(n.to_u64()? * inv(d) % P)
}

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    b %= P;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    r
}

fn inv(a: u64) -> u64 {
    pow_mod(a, P - 2)
}

/// Image of `p` in `F_P[v]` with the other variables at `point`.
fn univariate_image(p: &Poly, v: &Var, point: &HashMap<Var, u64>) -> Option<Vec<u64>> {
    let mut out = vec![0u64; p.degree_in(v) as usize + 1];
    for (m, c) in p.terms() {
        let mut t = mod_p(c)?;
        let mut k = 0;
        for (w, e) in m.factors() {
            if w == v {
                k = *e as usize;
            } else {
                t = t * pow_mod(point[w], *e as u64) % P;
            }
        }
        out[k] = (out[k] + t) % P;
    }
    Some(out)
}

fn trim(p: &mut Vec<u64>) {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
}

fn univariate_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim(&mut a);
    trim(&mut b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.len() == 1 {
            return if b[0] == 0 { a.len() - 1 } else { 0 };
        }
        let lb = inv(*b.last().unwrap());
        while a.len() >= b.len() && !(a.len() == 1 && a[0] == 0) {
            let f = a.last().unwrap() * lb % P;
            let shift = a.len() - b.len();
            for (i, bc) in b.iter().enumerate() {
                a[i + shift] = (a[i + shift] + P - f * bc % P) % P;
            }
            a.pop();
            trim(&mut a);
            if a.len() < b.len() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
}

/// Certifies `gcd(a, b) = 1` by showing, for every shared variable `v`, that
/// the images in `F_P[v]` at a point keeping both leading coefficients
/// nonzero are coprime. `false` means no certificate was found.
fn coprime_mod_p(a: &Poly, b: &Poly, va: &BTreeSet<Var>, vb: &BTreeSet<Var>) -> bool {
    let shared: Vec<&Var> = va.intersection(vb).collect();
    if shared.is_empty() {
        return true;
    }
    let mut seed: u64 = 0x2545_f491_4f6c_dd1d;
    let mut next = || {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        seed % (P - 2) + 2
    };
    let all: BTreeSet<&Var> = va.union(vb).collect();
    for v in shared {
        let mut ok = false;
        for _ in 0..2 {
            let point: HashMap<Var, u64> = all.iter().filter(|w| **w != v).map(|w| ((*w).clone(), next())).collect();
            let (ia, ib) = match (univariate_image(a, v, &point), univariate_image(b, v, &point)) {
                (Some(x), Some(y)) => (x, y),
                _ => return false,
            };
            if ia.last() == Some(&0) || ib.last() == Some(&0) {
                continue;
            }
            ok = univariate_gcd_degree(ia, ib) == 0;
            break;
        }
        if !ok {
            return false;
        }
    }
    true
}

/// Heuristic gcd over `Z`: evaluate one variable at a large integer, recurse,
/// interpolate back in the symmetric base-`ξ` representation and verify by
/// exact division. `None` when every evaluation point fails.
fn heu_gcd(a: &Poly, b: &Poly) -> Option<Poly> {
    let a = a.scale(&a.rational_content().recip());
    let b = b.scale(&b.rational_content().recip());
    let vars: Vec<Var> = a.vars().union(&b.vars()).cloned().collect();
    heu_rec(&a, &b, &vars).map(|g| g.monic())
}

fn heu_rec(a: &Poly, b: &Poly, vars: &[Var]) -> Option<Poly> {
    let Some((v, rest)) = vars.split_last() else {
        let x = a.as_constant()?;
        let y = b.as_constant()?;
        return Some(Poly::constant(Q::from_integer(x.numer().gcd(y.numer()))));
    };
    if !a.contains_var(v) && !b.contains_var(v) {
        return heu_rec(a, b, rest);
    }
    // The integer content of an image encodes dependence on the evaluated
    // variables one level up, so it is carried through.
    let ca = a.rational_content();
    let cb = b.rational_content();
    let c = Q::from_integer(ca.numer().gcd(cb.numer()));
    let a = &a.scale(&ca.recip());
    let b = &b.scale(&cb.recip());
    let bound = max_norm(a).min(max_norm(b)) * 2u32 + 29u32;
    let mut xi = bound.clone().min(bound.sqrt() * 99u32).max(BigInt::from(2));
    for _ in 0..6 {
        let aa = eval_at(a, v, &xi);
        let bb = eval_at(b, v, &xi);
        if !aa.is_zero() && !bb.is_zero() {
            if let Some(h) = heu_rec(&aa, &bb, rest) {
                let h = interpolate(&h, &xi, v);
                if !h.is_zero() {
                    let h = h.scale(&h.rational_content().recip());
                    if a.div_exact(&h).is_some() && b.div_exact(&h).is_some() {
                        return Some(h.scale(&c));
                    }
                }
            }
        }
        xi = xi.clone() * 73794u32 * xi.sqrt().sqrt() / 27011u32;
    }
    None
}

fn max_norm(p: &Poly) -> BigInt {
    p.terms().iter().map(|(_, c)| c.numer().abs()).max().unwrap_or_default()
}

fn eval_at(p: &Poly, v: &Var, x: &BigInt) -> Poly {
    let cs = p.coeffs_in(v);
    let xq = Q::from_integer(x.clone());
    let mut out = Poly::zero();
    for c in cs.iter().rev() {
        out = out.scale(&xq).add(c);
    }
    out
}

fn interpolate(h: &Poly, x: &BigInt, v: &Var) -> Poly {
    let half = x / 2;
    let xinv = Q::from_integer(x.clone()).recip();
    let mut h = h.clone();
    let mut coeffs = Vec::new();
    while !h.is_zero() {
        let g = h.map_coeffs(|c| {
            let mut r = c.numer().mod_floor(x);
            if r > half {
                r -= x;
            }
            Q::from_integer(r)
        });
        h = h.sub(&g).scale(&xinv);
        coeffs.push(g);
    }
    Poly::from_coeffs(v, &coeffs)
}
