//! Jet bookkeeping: contexts, total derivatives, orders and prolongation.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr, MultiIndex, Names, Poly, Var, MAX_VARS};
use crate::vfmod::VectorField;

pub const DEFAULT_R_MAX: usize = 12;
pub const DEFAULT_MAX_NODES: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolDecl {
    pub name: String,
    #[serde(default)]
    pub nonzero: bool,
    #[serde(default)]
    pub positive: bool,
}

impl SymbolDecl {
    pub fn new(name: &str) -> Self {
        SymbolDecl { name: name.to_string(), nonzero: false, positive: false }
    }

    pub fn nonzero(name: &str) -> Self {
        SymbolDecl { name: name.to_string(), nonzero: true, positive: false }
    }

    pub fn positive(name: &str) -> Self {
        SymbolDecl { name: name.to_string(), nonzero: true, positive: true }
    }

    pub fn is_nonzero(&self) -> bool {
        self.nonzero || self.positive
    }
}

fn default_r() -> usize {
    3
}

fn default_r_max() -> usize {
    DEFAULT_R_MAX
}

fn default_max_nodes() -> usize {
    DEFAULT_MAX_NODES
}

/// Number of independent variables, working order, symbols and naming.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetContext {
    pub n: usize,
    #[serde(default = "default_r")]
    pub r: usize,
    #[serde(default)]
    pub p: Option<usize>,
    #[serde(default)]
    pub symbols: Vec<SymbolDecl>,
    #[serde(default)]
    pub time_alias: bool,
    #[serde(default = "default_r_max")]
    pub r_max: usize,
    #[serde(default = "default_max_nodes")]
    pub max_nodes: usize,
}

impl JetContext {
    pub fn new(n: usize) -> Self {
        assert!((1..=MAX_VARS).contains(&n), "number of independent variables must be in 1..={MAX_VARS}");
        JetContext {
            n,
            r: default_r(),
            p: None,
            symbols: Vec::new(),
            time_alias: false,
            r_max: DEFAULT_R_MAX,
            max_nodes: DEFAULT_MAX_NODES,
        }
    }

    /// Context with slot 0 named `t` and `n_spatial` further slots.
    pub fn with_time(n_spatial: usize) -> Self {
        let mut c = Self::new(n_spatial + 1);
        c.time_alias = true;
        c
    }

    pub fn symbol_decl(mut self, s: SymbolDecl) -> Self {
        self.symbols.retain(|d| d.name != s.name);
        self.symbols.push(s);
        self
    }

    pub fn with_symbol(self, name: &str) -> Self {
        self.symbol_decl(SymbolDecl::new(name))
    }

    pub fn symbol(&self, name: &str) -> Option<&SymbolDecl> {
        self.symbols.iter().find(|s| s.name == name)
    }

    pub fn is_nonzero_symbol(&self, name: &str) -> bool {
        self.symbol(name).map(|s| s.is_nonzero()).unwrap_or(false)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_VARS {
            return Err(Error::InvalidInput(format!("n must be in 1..={MAX_VARS}")));
        }
        if let Some(p) = self.p {
            if p == 0 || p > self.n {
                return Err(Error::InvalidInput("split p must satisfy 0 < p <= n".into()));
            }
        }
        for s in &self.symbols {
            let reserved = s.name == "u" || s.name == "exp" || self.coord_slot(&s.name).is_some();
            if reserved || !s.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::InvalidInput(format!("invalid symbol name `{}`", s.name)));
            }
        }
        Ok(())
    }

    /// Slot of a coordinate identifier.
    pub fn coord_slot(&self, name: &str) -> Option<usize> {
        if self.time_alias {
            if name == "t" {
                return Some(0);
            }
            if name == "x" && self.n == 2 {
                return Some(1);
            }
        } else if name == "x" && self.n == 1 {
            return Some(0);
        }
        let k: usize = name.strip_prefix('x')?.parse().ok()?;
        if name.len() > 2 && name.as_bytes()[1] == b'0' {
            return None;
        }
        if self.time_alias {
            (k < self.n).then_some(k)
        } else {
            (k >= 1 && k <= self.n).then(|| k - 1)
        }
    }

    pub fn names(&self) -> Names {
        Names { time_alias: self.time_alias }
    }

    pub fn show(&self, e: &Expr) -> String {
        e.show(self.names())
    }

    pub fn parse(&self, text: &str) -> Result<Expr> {
        parse_expr(text, self)
    }

    pub fn coord(&self, i: usize) -> Expr {
        Expr::coord(i)
    }

    pub fn zero_index(&self) -> MultiIndex {
        MultiIndex::zero(self.n)
    }

    pub fn delta(&self, i: usize) -> MultiIndex {
        MultiIndex::delta(self.n, i)
    }

    /// `u_α` as an expression.
    pub fn jet(&self, entries: &[u32]) -> Expr {
        assert_eq!(entries.len(), self.n);
        Expr::jet(MultiIndex::new(entries))
    }

    pub fn check_size(&self, e: &Expr, what: &str) -> Result<()> {
        if e.size() > self.max_nodes {
            return Err(Error::ResourceLimit(format!("{what}: {} nodes exceed the cap of {}", e.size(), self.max_nodes)));
        }
        Ok(())
    }

    pub fn check_order(&self, order: usize) -> Result<()> {
        if order > self.r_max {
            return Err(Error::ResourceLimit(format!("jet order {order} exceeds r_max = {}", self.r_max)));
        }
        Ok(())
    }
}

/// Partition of the coordinate slots into checked and hat directions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub n: usize,
    pub checked: Vec<usize>,
    pub hat: Vec<usize>,
}

impl Split {
    /// The first `p` slots are checked.
    pub fn prefix(n: usize, p: usize) -> Self {
        assert!(p <= n);
        Split { n, checked: (0..p).collect(), hat: (p..n).collect() }
    }

    pub fn from_checked(n: usize, checked: &[usize]) -> Self {
        let mut c: Vec<usize> = checked.to_vec();
        c.sort_unstable();
        c.dedup();
        let hat = (0..n).filter(|i| !c.contains(i)).collect();
        Split { n, checked: c, hat }
    }

    pub fn from_hat(n: usize, hat: &[usize]) -> Self {
        let checked: Vec<usize> = (0..n).filter(|i| !hat.contains(i)).collect();
        Self::from_checked(n, &checked)
    }

    pub fn p(&self) -> usize {
        self.checked.len()
    }

    pub fn check_weight(&self, a: &MultiIndex) -> u32 {
        a.weight(&self.checked)
    }

    pub fn hat_weight(&self, a: &MultiIndex) -> u32 {
        a.weight(&self.hat)
    }
}

fn jet_vars(e: &Expr) -> Vec<Var> {
    e.all_vars().into_iter().filter(|v| matches!(v, Var::U | Var::Jet(_))).collect()
}

/// Applies the derivation `v ↦ image(v)` to a polynomial; exp atoms are
/// handled by the caller through `image`.
fn derive_poly(p: &Poly, image: &mut dyn FnMut(&Var) -> Option<Expr>) -> Expr {
    let mut poly_part = Poly::zero();
    let mut rest = Expr::zero();
    for v in p.vars() {
        let Some(img) = image(&v) else { continue };
        if img.is_zero() {
            continue;
        }
        let dp = p.diff(&v);
        if img.is_polynomial() {
            poly_part = poly_part.add(&dp.mul(img.num()));
        } else {
            rest = rest + Expr::from_poly(dp) * img;
        }
    }
    Expr::from_poly(poly_part) + rest
}

/// Applies a derivation given on generators to a normalized expression.
pub fn derive(e: &Expr, image: &mut dyn FnMut(&Var) -> Option<Expr>) -> Expr {
    let dn = derive_poly(e.num(), image);
    if e.den().is_one() {
        return dn;
    }
    let dd = derive_poly(e.den(), image);
    let d = Expr::from_poly(e.den().clone());
    if dd.is_zero() {
        return dn / d;
    }
    if dn.is_polynomial() && dd.is_polynomial() {
        let g = crate::expr::gcd(e.den(), dd.num());
        let dg = e.den().div_exact(&g).expect("gcd divides");
        let ddg = dd.num().div_exact(&g).expect("gcd divides");
        let num = dn.num().mul(&dg).sub(&e.num().mul(&ddg));
        let den = e.den().mul(&dg);
        return Expr::from_parts(num, den).expect("nonzero denominator");
    }
    (dn * d.clone() - Expr::from_poly(e.num().clone()) * dd) / (d.clone() * d)
}

/// Total derivative `D_i`.
pub fn total_derivative(e: &Expr, i: usize, ctx: &JetContext) -> Expr {
    let mut memo: HashMap<Var, Expr> = HashMap::new();
    total_derivative_memo(e, i, ctx, &mut memo)
}

fn total_derivative_memo(e: &Expr, i: usize, ctx: &JetContext, memo: &mut HashMap<Var, Expr>) -> Expr {
    let xi = Var::coord(i);
    let mut image = |v: &Var| -> Option<Expr> {
        match v {
            Var::Coord(_) => (*v == xi).then(Expr::one),
            Var::U => Some(Expr::jet(ctx.delta(i))),
            Var::Jet(a) => Some(Expr::jet(a.add_delta(i))),
            Var::Exp(arg) => {
                if let Some(x) = memo.get(v) {
                    return Some(x.clone());
                }
                let da = total_derivative(arg, i, ctx);
                let x = Expr::var(v.clone()) * da;
                memo.insert(v.clone(), x.clone());
                Some(x)
            }
            Var::Sym(_) | Var::Omega(_) => None,
        }
    };
    derive(e, &mut image)
}

/// `D^α e`, applying `D_1` first `α_1` times, then `D_2`, and so on.
pub fn total_derivative_multi(e: &Expr, alpha: &MultiIndex, ctx: &JetContext) -> Expr {
    let mut out = e.clone();
    for i in 0..alpha.len() {
        for _ in 0..alpha.get(i) {
            out = total_derivative(&out, i, ctx);
        }
    }
    out
}

/// Jet order; `-1` for the zero expression.
pub fn order_of(e: &Expr) -> i32 {
    if e.is_zero() {
        return -1;
    }
    let mut best = 0;
    for v in jet_vars(e) {
        let k = match &v {
            Var::Jet(a) => a.order() as i32,
            _ => 0,
        };
        if k > best && e.depends_on(&v) {
            best = k;
        }
    }
    best
}

/// Maximal hat weight `|α̂|` over jet variables the expression depends on;
/// `-1` for zero.
pub fn hat_order(e: &Expr, split: &Split) -> i32 {
    if e.is_zero() {
        return -1;
    }
    let mut best = 0;
    for v in jet_vars(e) {
        if let Var::Jet(a) = &v {
            let k = split.hat_weight(a) as i32;
            if k > best && e.depends_on(&v) {
                best = k;
            }
        }
    }
    best
}

/// Jet variables of order exactly `k` that `e` depends on.
pub fn jet_vars_of_order(e: &Expr, k: u32) -> Vec<MultiIndex> {
    let mut out: Vec<MultiIndex> = jet_vars(e)
        .into_iter()
        .filter_map(|v| match v {
            Var::Jet(a) if a.order() == k && e.depends_on(&Var::Jet(a)) => Some(a),
            _ => None,
        })
        .collect();
    out.sort();
    out
}

/// Prolongation coefficients `η^α` for `0 < |α| ≤ r`.
pub fn prolong(v: &VectorField, r: usize, ctx: &JetContext) -> Result<BTreeMap<MultiIndex, Expr>> {
    ctx.check_order(r + 1)?;
    let n = ctx.n;
    if v.xi.len() != n {
        return Err(Error::InvalidInput("vector field dimension does not match the context".into()));
    }
    let q = v.characteristic(ctx);
    let mut dq: BTreeMap<MultiIndex, Expr> = BTreeMap::new();
    dq.insert(MultiIndex::zero(n), q);
    let mut out = BTreeMap::new();
    for alpha in MultiIndex::all_up_to(n, 1, r as u32) {
        let i = (0..n).find(|&i| alpha.get(i) > 0).expect("nonzero index");
        let prev = &dq[&alpha.sub_delta(i).expect("positive entry")];
        let d = total_derivative(prev, i, ctx);
        ctx.check_size(&d, "prolongation")?;
        let mut eta = d.clone();
        for (j, x) in v.xi.iter().enumerate() {
            if !x.is_zero() {
                eta = eta + x * Expr::jet(alpha.add_delta(j));
            }
        }
        dq.insert(alpha, d);
        out.insert(alpha, eta);
    }
    Ok(out)
}

/// `V_(r) f` for a differential function `f` of order at most `r`.
pub fn apply_prolonged(v: &VectorField, f: &Expr, r: usize, ctx: &JetContext) -> Result<Expr> {
    let pr = prolong(v, r, ctx)?;
    let mut out = Expr::zero();
    for (i, x) in v.xi.iter().enumerate() {
        if !x.is_zero() {
            out = out + x * f.diff(&Var::coord(i));
        }
    }
    if !v.eta.is_zero() {
        out = out + &v.eta * f.diff(&Var::U);
    }
    for (alpha, eta) in &pr {
        let var = Var::jet(*alpha);
        if f.mentions(&var) && !eta.is_zero() {
            out = out + eta * f.diff(&var);
        }
    }
    Ok(out)
}
