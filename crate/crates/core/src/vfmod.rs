//! Vector fields on `(x, u)`-space and modules spanned by them.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Expr, Var};
use crate::jet::{order_of, JetContext, Split};

/// `Q = ξ^i ∂_i + η ∂_u` with coefficients depending on `x` and `u` only.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub xi: Vec<Expr>,
    pub eta: Expr,
}

fn is_point_function(e: &Expr) -> bool {
    order_of(e) <= 0 && !e.free_vars().iter().any(|v| matches!(v, Var::Omega(_)))
}

impl VectorField {
    pub fn new(xi: Vec<Expr>, eta: Expr) -> Result<Self> {
        if !xi.iter().chain(std::iter::once(&eta)).all(is_point_function) {
            return Err(Error::InvalidInput("vector-field coefficients must depend on x and u only".into()));
        }
        Ok(VectorField { xi, eta })
    }

    /// `∂_i` in `n` variables.
    pub fn partial(n: usize, i: usize) -> Self {
        let mut xi = vec![Expr::zero(); n];
        xi[i] = Expr::one();
        VectorField { xi, eta: Expr::zero() }
    }

    /// `∂_u` in `n` variables.
    pub fn d_u(n: usize) -> Self {
        VectorField { xi: vec![Expr::zero(); n], eta: Expr::one() }
    }

    pub fn n(&self) -> usize {
        self.xi.len()
    }

    pub fn is_zero(&self) -> bool {
        self.eta.is_zero() && self.xi.iter().all(Expr::is_zero)
    }

    /// Coefficient row `(ξ^1, …, ξ^n, η)`.
    pub fn row(&self) -> Vec<Expr> {
        let mut r = self.xi.clone();
        r.push(self.eta.clone());
        r
    }

    pub fn from_row(row: &[Expr]) -> Self {
        let n = row.len() - 1;
        VectorField { xi: row[..n].to_vec(), eta: row[n].clone() }
    }

    /// Action on a function of `(x, u)`.
    pub fn apply(&self, f: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (i, x) in self.xi.iter().enumerate() {
            if !x.is_zero() {
                out = out + x * f.diff(&Var::coord(i));
            }
        }
        if !self.eta.is_zero() {
            out = out + &self.eta * f.diff(&Var::U);
        }
        out
    }

    /// `Q[u] = η − ξ^i u_i`.
    pub fn characteristic(&self, ctx: &JetContext) -> Expr {
        let mut out = self.eta.clone();
        for (i, x) in self.xi.iter().enumerate() {
            if !x.is_zero() {
                out = out - x * Expr::jet(ctx.delta(i));
            }
        }
        out
    }

    pub fn commutator(&self, other: &VectorField) -> VectorField {
        let xi = self.xi.iter().zip(&other.xi).map(|(a, b)| self.apply(b) - other.apply(a)).collect();
        let eta = self.apply(&other.eta) - other.apply(&self.eta);
        VectorField { xi, eta }
    }

    pub fn scale(&self, f: &Expr) -> VectorField {
        VectorField { xi: self.xi.iter().map(|x| x * f).collect(), eta: &self.eta * f }
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField { xi: self.xi.iter().zip(&other.xi).map(|(a, b)| a + b).collect(), eta: &self.eta + &other.eta }
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        self.add(&other.scale(&Expr::int(-1)))
    }

    pub fn show(&self, ctx: &JetContext) -> String {
        let mut parts = Vec::new();
        for (i, x) in self.xi.iter().enumerate() {
            if !x.is_zero() {
                parts.push(format!("({})*d/d{}", ctx.show(x), ctx.names().coord(i)));
            }
        }
        if !self.eta.is_zero() {
            parts.push(format!("({})*d/du", ctx.show(&self.eta)));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Rank of a matrix over the field of rational functions.
pub fn rank(rows: &[Vec<Expr>]) -> usize {
    let mut m: Vec<Vec<Expr>> = rows.to_vec();
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(piv) = (r..m.len()).min_by_key(|&i| if m[i][c].is_zero() { usize::MAX } else { m[i][c].size() }) else {
            break;
        };
        if m[piv][c].is_zero() {
            continue;
        }
        m.swap(r, piv);
        let inv = m[r][c].recip();
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..ncols {
                let v = &m[i][j] - &f * &m[r][j];
                m[i][j] = v;
            }
        }
        r += 1;
    }
    r
}

/// Module `⟨Q_1, …, Q_p⟩` over functions of `(x, u)`.
#[derive(Debug)]
pub struct VFModule {
    basis: Vec<VectorField>,
    n: usize,
    rank_flag: OnceLock<bool>,
    involutive_flag: OnceLock<bool>,
}

impl Clone for VFModule {
    fn clone(&self) -> Self {
        VFModule { basis: self.basis.clone(), n: self.n, rank_flag: self.rank_flag.clone(), involutive_flag: self.involutive_flag.clone() }
    }
}

impl PartialEq for VFModule {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.basis == other.basis
    }
}

impl VFModule {
    pub fn new(basis: Vec<VectorField>, n: usize) -> Result<Self> {
        let p = basis.len();
        if p == 0 || p > n {
            return Err(Error::InvalidInput(format!("module dimension {p} must be in 1..={n}")));
        }
        if basis.iter().any(|v| v.n() != n) {
            return Err(Error::InvalidInput("basis fields have inconsistent dimension".into()));
        }
        let rows: Vec<Vec<Expr>> = basis.iter().map(VectorField::row).collect();
        if rank(&rows) < p {
            return Err(Error::InvalidInput("basis fields are linearly dependent".into()));
        }
        Ok(VFModule { basis, n, rank_flag: OnceLock::new(), involutive_flag: OnceLock::new() })
    }

    /// Shift module `⟨∂_s, s ∈ slots⟩`.
    pub fn shifts(n: usize, slots: &[usize]) -> Self {
        Self::new(slots.iter().map(|&s| VectorField::partial(n, s)).collect(), n).expect("shift fields are independent")
    }

    pub fn basis(&self) -> &[VectorField] {
        &self.basis
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `rank(ξ^{si}) = p`.
    pub fn rank_condition(&self) -> bool {
        *self.rank_flag.get_or_init(|| {
            let rows: Vec<Vec<Expr>> = self.basis.iter().map(|v| v.xi.clone()).collect();
            rank(&rows) == self.dim()
        })
    }

    pub fn is_involutive(&self) -> bool {
        *self.involutive_flag.get_or_init(|| self.first_non_closing_bracket().is_none())
    }

    /// A bracket of basis elements that leaves the span, if any.
    pub fn first_non_closing_bracket(&self) -> Option<VectorField> {
        let rows: Vec<Vec<Expr>> = self.basis.iter().map(VectorField::row).collect();
        let base = rows.len();
        for i in 0..self.dim() {
            for j in i + 1..self.dim() {
                let b = self.basis[i].commutator(&self.basis[j]);
                if b.is_zero() {
                    continue;
                }
                let mut ext = rows.clone();
                ext.push(b.row());
                if rank(&ext) > base {
                    return Some(b);
                }
            }
        }
        None
    }

    /// Whether `v` lies in the span of the basis.
    pub fn contains(&self, v: &VectorField) -> bool {
        let mut rows: Vec<Vec<Expr>> = self.basis.iter().map(VectorField::row).collect();
        rows.push(v.row());
        rank(&rows) == self.dim()
    }

    pub fn canonical_basis(&self) -> Result<CanonicalModule> {
        CanonicalModule::from_module(self)
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Basis `Q̂_s = ∂_s + ξ̂^{sι} ∂_ι + η̂^s ∂_u`, `s` over the checked slots of
/// `split` and `ι` over its hat slots.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalModule {
    pub split: Split,
    /// `xi_hat[s][k]` is the coefficient of `∂_{hat[k]}` in `Q̂_s`.
    pub xi_hat: Vec<Vec<Expr>>,
    pub eta_hat: Vec<Expr>,
}

impl CanonicalModule {
    pub fn from_module(m: &VFModule) -> Result<Self> {
        if !m.rank_condition() {
            return Err(Error::RankDeficient);
        }
        let n = m.n();
        let p = m.dim();
        let rows: Vec<Vec<Expr>> = m.basis().iter().map(VectorField::row).collect();
        for cols in combinations(n, p) {
            let block: Vec<Vec<Expr>> = rows.iter().map(|r| cols.iter().map(|&c| r[c].clone()).collect()).collect();
            if rank(&block) < p {
                continue;
            }
            let mut a = rows.clone();
            for (k, &c) in cols.iter().enumerate() {
                let piv = (k..p).find(|&i| !a[i][c].is_zero()).expect("invertible block");
                a.swap(k, piv);
                let inv = a[k][c].recip();
                for j in 0..=n {
                    a[k][j] = &a[k][j] * &inv;
                }
                for i in 0..p {
                    if i == k || a[i][c].is_zero() {
                        continue;
                    }
                    let f = a[i][c].clone();
                    for j in 0..=n {
                        let v = &a[i][j] - &f * &a[k][j];
                        a[i][j] = v;
                    }
                }
            }
            let split = Split::from_checked(n, &cols);
            let xi_hat = a.iter().map(|r| split.hat.iter().map(|&h| r[h].clone()).collect()).collect();
            let eta_hat = a.iter().map(|r| r[n].clone()).collect();
            return Ok(CanonicalModule { split, xi_hat, eta_hat });
        }
        Err(Error::SingularSubstitution("no invertible coefficient block".into()))
    }

    /// Canonical module of a given split from explicit coefficients.
    pub fn from_coefficients(split: Split, xi_hat: Vec<Vec<Expr>>, eta_hat: Vec<Expr>) -> Self {
        CanonicalModule { split, xi_hat, eta_hat }
    }

    pub fn p(&self) -> usize {
        self.split.p()
    }

    pub fn n(&self) -> usize {
        self.split.n
    }

    pub fn field(&self, s: usize) -> VectorField {
        let n = self.n();
        let mut xi = vec![Expr::zero(); n];
        xi[self.split.checked[s]] = Expr::one();
        for (k, &h) in self.split.hat.iter().enumerate() {
            xi[h] = self.xi_hat[s][k].clone();
        }
        VectorField { xi, eta: self.eta_hat[s].clone() }
    }

    pub fn to_module(&self) -> VFModule {
        VFModule::new((0..self.p()).map(|s| self.field(s)).collect(), self.n()).expect("canonical fields are independent")
    }

    /// Each field of `m` equals `Σ_s ξ^{s, checked_s} Q̂_s`.
    pub fn spans(&self, m: &VFModule) -> bool {
        m.basis().iter().all(|v| {
            let mut comb = VectorField { xi: vec![Expr::zero(); self.n()], eta: Expr::zero() };
            for s in 0..self.p() {
                comb = comb.add(&self.field(s).scale(&v.xi[self.split.checked[s]]));
            }
            v.sub(&comb).is_zero()
        })
    }
}

/// Which family of submodules a function `Φ` parameterizes.
#[derive(Clone, Debug, PartialEq)]
pub enum PhiVariant {
    /// `⟨∂_s − (Φ_s/Φ_u) ∂_u⟩` over the checked slots.
    Involutive,
    /// `⟨∂_1 + u ∂_2 + ξ^3 ∂_3 + … + ξ^n ∂_n + θ ∂_u⟩` with `θ = −Φ_1/Φ_u`;
    /// holds `ξ^3, …, ξ^n`.
    Special(Vec<Expr>),
}

fn phi_u(phi: &Expr) -> Result<Expr> {
    let pu = phi.diff(&Var::U);
    if pu.is_zero() {
        Err(Error::DegenerateInvariant)
    } else {
        Ok(pu)
    }
}

/// `η^s = −Φ_s/Φ_u` for the given slots.
pub fn phi_etas(phi: &Expr, slots: &[usize]) -> Result<Vec<Expr>> {
    let pu = phi_u(phi)?;
    Ok(slots.iter().map(|&s| -(phi.diff(&Var::coord(s)) / &pu)).collect())
}

pub fn phi_family_member(phi: &Expr, split: &Split, variant: &PhiVariant) -> Result<VFModule> {
    let n = split.n;
    match variant {
        PhiVariant::Involutive => {
            let etas = phi_etas(phi, &split.checked)?;
            let basis = split
                .checked
                .iter()
                .zip(etas)
                .map(|(&s, eta)| {
                    let mut v = VectorField::partial(n, s);
                    v.eta = eta;
                    v
                })
                .collect();
            let m = VFModule::new(basis, n)?;
            if !m.is_involutive() {
                return Err(Error::Internal("Φ-family member failed the involutivity check".into()));
            }
            Ok(m)
        }
        PhiVariant::Special(rest) => {
            if n < 2 || rest.len() != n - 2 {
                return Err(Error::InvalidInput("special variant needs n >= 2 and coefficients ξ^3..ξ^n".into()));
            }
            let theta = phi_etas(phi, &[0])?.remove(0);
            let mut xi = vec![Expr::one(), Expr::u()];
            xi.extend(rest.iter().cloned());
            VFModule::new(vec![VectorField::new(xi, theta)?], n)
        }
    }
}

/// Point transformation `x̃ = X(x, u)`, `ũ = U(x, u)` together with an optional inverse.
#[derive(Clone, Debug)]
pub struct PointMap {
    pub x: Vec<Expr>,
    pub u: Expr,
    /// `x = X⁻¹(x̃, ũ)`, `u = U⁻¹(x̃, ũ)`, written in the same coordinate names.
    pub inverse: Option<(Vec<Expr>, Expr)>,
}

/// `Ṽ` with `ξ̃^i = V X^i` and `η̃ = V U`, rewritten in the new coordinates.
pub fn pushforward(v: &VectorField, map: &PointMap) -> Result<VectorField> {
    let n = v.n();
    if map.x.len() != n {
        return Err(Error::InvalidInput("point map dimension does not match".into()));
    }
    let mut coeffs: Vec<Expr> = map.x.iter().map(|x| v.apply(x)).collect();
    coeffs.push(v.apply(&map.u));
    let needs_inverse = coeffs.iter().any(|c| (0..n).any(|i| c.mentions(&Var::coord(i))) || c.mentions(&Var::U));
    if !needs_inverse {
        return Ok(VectorField::from_row(&coeffs));
    }
    let Some((xinv, uinv)) = &map.inverse else {
        return Err(Error::MissingInverse);
    };
    let mut b = std::collections::HashMap::new();
    for (i, e) in xinv.iter().enumerate() {
        b.insert(Var::coord(i), e.clone());
    }
    b.insert(Var::U, uinv.clone());
    let out: Result<Vec<Expr>> = coeffs.iter().map(|c| c.substitute(&b)).collect();
    Ok(VectorField::from_row(&out?))
}

/// JSON schema for module input files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub n: usize,
    pub fields: Vec<FieldSpec>,
    #[serde(default)]
    pub symbols: Vec<crate::jet::SymbolDecl>,
    #[serde(default)]
    pub time_alias: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldSpec {
    pub xi: Vec<String>,
    pub eta: String,
}

impl ModuleSpec {
    pub fn build(&self, ctx: &JetContext) -> Result<VFModule> {
        if self.n != ctx.n {
            return Err(Error::InvalidInput(format!("module has n = {}, context has n = {}", self.n, ctx.n)));
        }
        let mut basis = Vec::new();
        for f in &self.fields {
            if f.xi.len() != self.n {
                return Err(Error::InvalidInput("each field needs n xi coefficients".into()));
            }
            let xi: Result<Vec<Expr>> = f.xi.iter().map(|s| ctx.parse(s)).collect();
            basis.push(VectorField::new(xi?, ctx.parse(&f.eta)?)?);
        }
        VFModule::new(basis, self.n)
    }

    pub fn from_module(m: &VFModule, ctx: &JetContext) -> Self {
        ModuleSpec {
            n: m.n(),
            fields: m
                .basis()
                .iter()
                .map(|v| FieldSpec { xi: v.xi.iter().map(|x| ctx.show(x)).collect(), eta: ctx.show(&v.eta) })
                .collect(),
            symbols: ctx.symbols.clone(),
            time_alias: ctx.time_alias,
        }
    }
}
