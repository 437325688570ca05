//! Sparse multivariate polynomials over `Q`.
//!
//! Terms are kept sorted in decreasing lexicographic order with respect to
//! the order on [`Var`]; the first term is the leading term.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::var::Var;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q2(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Power product, stored as `(var, exponent)` pairs sorted by decreasing var.
///
/// The derived order on this representation is exactly the lexicographic
/// monomial order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(SmallVec<[(Var, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Var, k: u32) -> Self {
        if k == 0 {
            return Self::one();
        }
        let mut s = SmallVec::new();
        s.push((v, k));
        Monomial(s)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, k)| k).sum()
    }

    pub fn degree_in(&self, v: &Var) -> u32 {
        self.0.iter().find(|(w, _)| w == v).map(|(_, k)| *k).unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().cloned());
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::with_capacity(self.0.len());
        let mut j = 0;
        for (v, k) in &self.0 {
            if j < other.0.len() && other.0[j].0 > *v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *v {
                let kk = other.0[j].1;
                if kk > *k {
                    return None;
                }
                if kk < *k {
                    out.push((v.clone(), k - kk));
                }
                j += 1;
            } else {
                out.push((v.clone(), *k));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Componentwise minimum of exponents.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        for (v, k) in &self.0 {
            let kk = other.degree_in(v);
            if kk > 0 {
                out.push((v.clone(), (*k).min(kk)));
            }
        }
        Monomial(out)
    }

    /// Removes `v`, returning the rest and the exponent of `v`.
    pub fn split_off(&self, v: &Var) -> (Monomial, u32) {
        let mut k = 0;
        let mut out = SmallVec::with_capacity(self.0.len());
        for (w, e) in &self.0 {
            if w == v {
                k = *e;
            } else {
                out.push((w.clone(), *e));
            }
        }
        (Monomial(out), k)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    terms: Vec<(Monomial, Q)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![(Monomial::one(), c)] }
        }
    }

    pub fn var(v: Var) -> Self {
        Poly { terms: vec![(Monomial::var(v, 1), Q::one())] }
    }

    pub fn term(m: Monomial, c: Q) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    /// Builds a polynomial from unsorted terms, combining duplicates.
    pub fn from_terms(mut terms: Vec<(Monomial, Q)>) -> Self {
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Monomial, Q)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            if let Some(last) = out.last_mut() {
                if last.0 == m {
                    last.1 += c;
                    continue;
                }
            }
            out.push((m, c));
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { terms: out }
    }

    pub fn terms(&self) -> &[(Monomial, Q)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 if self.terms[0].0.is_one() => Some(self.terms[0].1.clone()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn lt(&self) -> &(Monomial, Q) {
        &self.terms[0]
    }

    pub fn lc(&self) -> &Q {
        &self.terms[0].1
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        for (m, _) in &self.terms {
            for (v, _) in m.factors() {
                s.insert(v.clone());
            }
        }
        s
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        self.terms.iter().any(|(m, _)| m.degree_in(v) > 0)
    }

    pub fn degree_in(&self, v: &Var) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree_in(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(mm, a)| (mm.mul(m), a * c)).collect() }
    }

    fn merge(&self, other: &Poly, sign: bool) -> Poly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if sign { b[j].1.clone() } else { -&b[j].1 };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if sign { &a[i].1 + &b[j].1 } else { &a[i].1 - &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if sign { t.1.clone() } else { -&t.1 };
            out.push((t.0.clone(), c));
        }
        Poly { terms: out }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.merge(other, true)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.merge(other, false)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        if small.len() == 1 {
            return big.mul_term(&small.terms[0].0, &small.terms[0].1);
        }
        let mut acc: HashMap<Monomial, Q> = HashMap::with_capacity(self.len() * other.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(x) => *x += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        let mut terms: Vec<(Monomial, Q)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Plain partial derivative treating every variable as independent.
    pub fn diff(&self, v: &Var) -> Poly {
        let mut out = Vec::new();
        for (m, c) in &self.terms {
            let (rest, k) = m.split_off(v);
            if k == 0 {
                continue;
            }
            let mm = if k == 1 { rest } else { rest.mul(&Monomial::var(v.clone(), k - 1)) };
            out.push((mm, c * q(k as i64)));
        }
        Poly::from_terms(out)
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let lc = self.lc().clone();
        if lc.is_one() {
            return self.clone();
        }
        self.scale(&lc.recip())
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        if d.len() == 1 {
            let (dm, dc) = d.lt();
            let inv = dc.recip();
            let mut out = Vec::with_capacity(self.len());
            for (m, c) in &self.terms {
                out.push((m.div(dm)?, c * &inv));
            }
            return Some(Poly { terms: out });
        }
        // Recursive division in the variable of `d` whose leading
        // coefficient is smallest.
        let v = d
            .vars()
            .into_iter()
            .min_by_key(|v| {
                let cs = d.coeffs_in(v);
                (cs.last().map_or(0, Poly::len), std::cmp::Reverse(cs.len()))
            })
            .expect("nonconstant divisor");
        if !self.contains_var(&v) {
            return None;
        }
        let dc = d.coeffs_in(&v);
        let mut rem = self.coeffs_in(&v);
        let db = dc.len() - 1;
        if rem.len() <= db {
            return None;
        }
        let mut quot = vec![Poly::zero(); rem.len() - db];
        for k in (db..rem.len()).rev() {
            if rem[k].is_zero() {
                continue;
            }
            let q = rem[k].div_exact(&dc[db])?;
            for (j, c) in dc.iter().enumerate().take(db) {
                if !c.is_zero() {
                    rem[k - db + j] = rem[k - db + j].sub(&q.mul(c));
                }
            }
            rem[k] = Poly::zero();
            quot[k - db] = q;
        }
        if rem[..db].iter().any(|r| !r.is_zero()) {
            return None;
        }
        Some(Poly::from_coeffs(&v, &quot))
    }

    /// Coefficients with respect to `v`, indexed by degree.
    pub fn coeffs_in(&self, v: &Var) -> Vec<Poly> {
        let deg = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, Q)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let (rest, k) = m.split_off(v);
            buckets[k as usize].push((rest, c.clone()));
        }
        buckets
            .into_iter()
            .map(|mut t| {
                t.sort_unstable_by(|a, b| b.0.cmp(&a.0));
                Poly { terms: t }
            })
            .collect()
    }

    pub fn from_coeffs(v: &Var, coeffs: &[Poly]) -> Poly {
        let mut out = Vec::new();
        for (k, c) in coeffs.iter().enumerate() {
            let mv = Monomial::var(v.clone(), k as u32);
            for (m, a) in &c.terms {
                out.push((m.mul(&mv), a.clone()));
            }
        }
        Poly::from_terms(out)
    }

    /// Greatest common monomial divisor of all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let mut g = match it.next() {
            Some((m, _)) => m.clone(),
            None => return Monomial::one(),
        };
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    /// Rational scalar `c > 0` such that `self / c` has coprime integer coefficients.
    pub fn rational_content(&self) -> Q {
        use num_integer::Integer;
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for (_, c) in &self.terms {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Q::one();
        }
        Q::new(num, den).abs()
    }

    pub fn map_coeffs(&self, f: impl Fn(&Q) -> Q) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))).collect())
    }

    /// Number of scalar nodes, used for the size cap.
    pub fn size(&self) -> usize {
        self.terms.iter().map(|(m, _)| 1 + m.factors().len()).sum()
    }
}
