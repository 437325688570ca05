//! Quasi-linear second-order equations: elliptic, evolution and wave.

use std::collections::HashMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::{Evaluator, Expr, MultiIndex, Var, Q};
use crate::jet::{order_of, JetContext, Split};
use crate::manifold::{associated_function, strong_coorder_canonical, weak_coorder, ElimChoice, RewriteSystem, SingularityReport};
use crate::vfmod::{CanonicalModule, ModuleSpec, VFModule, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Elliptic,
    Evolution,
    Wave,
}

/// Leading principal minors of the coefficient matrix at sample points.
#[derive(Clone, Debug, PartialEq)]
pub struct PositivityCertificate {
    pub points: Vec<HashMap<Var, Q>>,
    pub minors: Vec<Vec<Q>>,
}

impl PositivityCertificate {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub const MIN_POSITIVITY_SAMPLES: usize = 10;

/// `a^{ij} u_{ij} + b = 0` (elliptic), `u_t = a^{ij} u_{ij} + b` (evolution)
/// or `u_tt = a^{ij} u_{ij} + b` (wave). For the last two `t` is slot 0 and
/// the matrix indexes the spatial slots.
#[derive(Clone, Debug)]
pub struct QuasiLinear2 {
    pub kind: Kind,
    pub a: Vec<Vec<Expr>>,
    pub b: Expr,
    pub positivity: Option<PositivityCertificate>,
}

impl QuasiLinear2 {
    pub fn new(kind: Kind, a: Vec<Vec<Expr>>, b: Expr, ctx: &JetContext) -> Result<Self> {
        let q = QuasiLinear2 { kind, a, b, positivity: None };
        q.validate(ctx)?;
        Ok(q)
    }

    /// First slot covered by the matrix.
    pub fn offset(&self) -> usize {
        match self.kind {
            Kind::Elliptic => 0,
            Kind::Evolution | Kind::Wave => 1,
        }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    fn validate(&self, ctx: &JetContext) -> Result<()> {
        let m = self.dim();
        if m == 0 || m + self.offset() != ctx.n {
            return Err(Error::InvalidInput(format!("coefficient matrix is {m}×{m}, context has {} variables", ctx.n)));
        }
        if self.a.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidInput("coefficient matrix is not square".into()));
        }
        for i in 0..m {
            for j in i + 1..m {
                if self.a[i][j] != self.a[j][i] {
                    return Err(Error::InvalidInput(format!("a^{{{i}{j}}} ≠ a^{{{j}{i}}}")));
                }
            }
        }
        for e in self.a.iter().flatten().chain(std::iter::once(&self.b)) {
            for v in e.free_vars() {
                let bad = match &v {
                    Var::Jet(a) => a.order() > 1 || (a.get(0) > 0 && self.kind == Kind::Evolution),
                    Var::Omega(_) => true,
                    _ => false,
                };
                if bad {
                    return Err(Error::InvalidInput(format!(
                        "coefficient depends on {}, which is not allowed for this kind",
                        ctx.show(&Expr::var(v.clone()))
                    )));
                }
            }
        }
        Ok(())
    }

    fn second(&self, i: usize, j: usize, ctx: &JetContext) -> Expr {
        let o = self.offset();
        Expr::jet(ctx.delta(i + o).add(&ctx.delta(j + o)))
    }

    /// `L` as a differential function.
    pub fn equation(&self, ctx: &JetContext) -> Expr {
        let m = self.dim();
        let mut h = self.b.clone();
        for i in 0..m {
            for j in 0..m {
                h = h + &self.a[i][j] * &self.second(i, j, ctx);
            }
        }
        match self.kind {
            Kind::Elliptic => h,
            Kind::Evolution => Expr::jet(ctx.delta(0)) - h,
            Kind::Wave => Expr::jet(ctx.delta(0).add_delta(0)) - h,
        }
    }

    pub fn with_positivity(mut self, samples: usize, seed: u64, ctx: &JetContext) -> Result<Self> {
        self.positivity = Some(certify_positive(&self.a, samples, seed, ctx)?);
        Ok(self)
    }
}

/// Determinant by exact elimination.
pub fn det(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Q::from_integer(1.into());
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else { return Q::zero() };
        if p != k {
            a.swap(p, k);
            d = -d;
        }
        let piv = a[k][k].clone();
        d *= &piv;
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &piv;
            for j in k..n {
                let v = &a[i][j] - &f * &a[k][j];
                a[i][j] = v;
            }
        }
    }
    d
}

/// Sylvester's criterion at `samples.max(10)` random points.
pub fn certify_positive(a: &[Vec<Expr>], samples: usize, seed: u64, ctx: &JetContext) -> Result<PositivityCertificate> {
    let want = samples.max(MIN_POSITIVITY_SAMPLES);
    let positive: Vec<String> = ctx.symbols.iter().filter(|s| s.positive).map(|s| s.name.clone()).collect();
    let mut points = Vec::new();
    let mut minors = Vec::new();
    let mut attempt = 0u64;
    while points.len() < want {
        if attempt >= 64 * want as u64 {
            return Err(Error::ResourceLimit("could not find pole-free sample points for the coefficient matrix".into()));
        }
        let mut ev = Evaluator::new(seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9))).with_positive(positive.clone());
        attempt += 1;
        let vals: Option<Vec<Vec<Q>>> = a.iter().map(|r| r.iter().map(|e| ev.eval_expr(e)).collect()).collect();
        let Some(vals) = vals else { continue };
        let mut point = HashMap::new();
        for e in a.iter().flatten() {
            for v in e.free_vars() {
                if let Some(x) = ev.value(&v) {
                    point.insert(v, x);
                }
            }
        }
        let ms: Vec<Q> = (1..=vals.len())
            .map(|k| det(&vals[..k].iter().map(|r| r[..k].to_vec()).collect::<Vec<_>>()))
            .collect();
        if let Some(bad) = ms.iter().position(|m| !m.is_positive()) {
            let mut desc: Vec<String> =
                point.iter().map(|(v, x)| format!("{}={}", ctx.show(&Expr::var(v.clone())), x)).collect();
            desc.sort();
            return Err(Error::NotPositiveDefinite(format!("minor {} is {} at {{{}}}", bad + 1, ms[bad], desc.join(", "))));
        }
        points.push(point);
        minors.push(ms);
    }
    Ok(PositivityCertificate { points, minors })
}

/// Elliptic analysis of a module.
#[derive(Clone, Debug)]
pub struct EllipticReport {
    pub report: SingularityReport,
    /// `â^{ιι'}` over the hat slots.
    pub a_hat: Vec<Vec<Expr>>,
    /// `â` agrees with the second-order coefficients of `L̂`.
    pub matches_associated: bool,
    /// Each `â^{ιι}` equals the quadratic form of `a` at `z`.
    pub diagonal_is_form: bool,
    /// `â^{ιι}` is positive at every certificate point.
    pub diagonal_positive: bool,
}

impl EllipticReport {
    pub fn to_json(&self, ctx: &JetContext) -> Value {
        let mut v = self.report.to_json(ctx);
        v["a_hat"] = json!(self.a_hat.iter().map(|r| r.iter().map(|e| ctx.show(e)).collect::<Vec<_>>()).collect::<Vec<_>>());
        v["a_hat_matches_associated"] = json!(self.matches_associated);
        v["diagonal_is_quadratic_form"] = json!(self.diagonal_is_form);
        v["diagonal_positive"] = json!(self.diagonal_positive);
        v
    }
}

pub fn elliptic_coorder(e: &QuasiLinear2, m: &VFModule, ctx: &JetContext) -> Result<EllipticReport> {
    if e.kind != Kind::Elliptic {
        return Err(Error::InvalidInput("elliptic analysis needs an elliptic equation".into()));
    }
    let cert = e.positivity.as_ref().ok_or(Error::PositivityCertificateMissing)?;
    if cert.len() < MIN_POSITIVITY_SAMPLES {
        return Err(Error::PositivityCertificateMissing);
    }
    if m.dim() >= ctx.n {
        return Err(Error::InvalidInput("module dimension must be less than the number of variables".into()));
    }
    let l = e.equation(ctx);
    let report = weak_coorder(&l, m, ctx)?;
    let c = m.canonical_basis()?;
    let split = c.split.clone();
    let mut rs = RewriteSystem::build(&c, 1, ElimChoice::First, ctx)?;

    let restrict = |x: &Expr, rs: &mut RewriteSystem| -> Result<Expr> {
        let mut b = HashMap::new();
        for v in x.free_vars() {
            if let Var::Jet(a) = &v {
                if split.check_weight(a) > 0 {
                    b.insert(v.clone(), rs.ensure(a, ctx)?);
                }
            }
        }
        x.substitute(&b)
    };
    let n = ctx.n;
    let mut a = vec![vec![Expr::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = restrict(&e.a[i][j], &mut rs)?;
        }
    }
    let p = split.p();
    let hat = &split.hat;
    let xi = |s: usize, k: usize| c.xi_hat[s][k].clone();
    let mut a_hat = vec![vec![Expr::zero(); hat.len()]; hat.len()];
    for (k, &i) in hat.iter().enumerate() {
        for (k2, &i2) in hat.iter().enumerate() {
            let mut v = a[i][i2].clone();
            for s in 0..p {
                let cs = split.checked[s];
                v = v - &a[cs][i] * &xi(s, k2) - &a[cs][i2] * &xi(s, k);
                for s2 in 0..p {
                    v = v + &a[cs][split.checked[s2]] * &xi(s, k) * xi(s2, k2);
                }
            }
            a_hat[k][k2] = v;
        }
    }

    let lhat = if report.associated_function.is_zero() { Expr::zero() } else { report.associated_function.clone() };
    let mut matches_associated = true;
    for (k, &i) in hat.iter().enumerate() {
        for (k2, &i2) in hat.iter().enumerate().skip(k) {
            let v = Var::Jet(ctx.delta(i).add(&ctx.delta(i2)));
            let coeff = lhat.diff(&v);
            let want = if k == k2 { a_hat[k][k].clone() } else { &a_hat[k][k2] * &Expr::int(2) };
            if !(coeff - want).is_zero() {
                matches_associated = false;
            }
        }
    }

    let mut diagonal_is_form = true;
    let mut diagonal_positive = true;
    for (k, &i) in hat.iter().enumerate() {
        let mut z = vec![Expr::zero(); n];
        z[i] = Expr::one();
        for s in 0..p {
            z[split.checked[s]] = -xi(s, k);
        }
        let mut form = Expr::zero();
        for r in 0..n {
            for q in 0..n {
                form = form + &a[r][q] * &z[r] * &z[q];
            }
        }
        if !(form - &a_hat[k][k]).is_zero() {
            diagonal_is_form = false;
        }
        for (idx, point) in cert.points.iter().enumerate() {
            if !positive_at(&e.a, &z, point, idx as u64) {
                diagonal_positive = false;
            }
        }
    }
    Ok(EllipticReport { report, a_hat, matches_associated, diagonal_is_form, diagonal_positive })
}

/// `a^{ij} z^i z^j > 0` with `a` taken at a certificate point and `z` at a
/// random `(x, u)` agreeing with that point.
fn positive_at(a: &[Vec<Expr>], z: &[Expr], point: &HashMap<Var, Q>, seed: u64) -> bool {
    for attempt in 0..32u64 {
        let mut ev = Evaluator::new(seed.wrapping_mul(31).wrapping_add(attempt));
        for (v, x) in point {
            ev.fix(v.clone(), x.clone());
        }
        let zs: Option<Vec<Q>> = z.iter().map(|e| ev.eval_expr(e)).collect();
        let Some(zs) = zs else { continue };
        let mut acc = Q::zero();
        for (r, zr) in zs.iter().enumerate() {
            for (q, zq) in zs.iter().enumerate() {
                let Some(x) = ev.eval_expr(&a[r][q]) else { return false };
                acc += x * zr * zq;
            }
        }
        return acc.is_positive();
    }
    false
}

/// `â^{ij} τ^i τ^j − 1` with `u_s = η^s − τ^s u_t`, split by powers of `u_t`
/// when `â` depends on it.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveCondition {
    pub a_hat: Vec<Vec<Expr>>,
    pub residual: Expr,
    /// Coefficients of powers of `u_t` in the numerator of the residual,
    /// or the residual alone when it does not depend on `u_t`.
    pub residuals: Vec<Expr>,
    pub split: bool,
}

impl WaveCondition {
    pub fn singular(&self) -> bool {
        self.residuals.iter().all(Expr::is_zero)
    }

    pub fn to_json(&self, ctx: &JetContext) -> Value {
        let show = |v: &[Expr]| v.iter().map(|e| ctx.show(e)).collect::<Vec<_>>();
        json!({
            "a_hat": self.a_hat.iter().map(|r| show(r)).collect::<Vec<_>>(),
            "residual": ctx.show(&self.residual),
            "residuals": show(&self.residuals),
            "split": self.split,
            "singular": self.singular(),
        })
    }
}

pub fn wave_singularity_condition(w: &QuasiLinear2, tau: &[Expr], eta: &[Expr], ctx: &JetContext) -> Result<WaveCondition> {
    if w.kind != Kind::Wave {
        return Err(Error::InvalidInput("wave analysis needs a wave equation".into()));
    }
    let m = w.dim();
    if tau.len() != m || eta.len() != m {
        return Err(Error::InvalidInput(format!("expected {m} τ and η coefficients")));
    }
    let ut = Var::Jet(ctx.delta(0));
    let mut b = HashMap::new();
    for s in 0..m {
        b.insert(Var::Jet(ctx.delta(s + 1)), &eta[s] - &(&tau[s] * &Expr::var(ut.clone())));
    }
    let mut a_hat = vec![vec![Expr::zero(); m]; m];
    let mut residual = Expr::int(-1);
    for i in 0..m {
        for j in 0..m {
            a_hat[i][j] = w.a[i][j].substitute(&b)?;
            residual = residual + &a_hat[i][j] * &tau[i] * &tau[j];
        }
    }
    let split = residual.depends_on(&ut);
    let residuals = if split {
        let num = Expr::from_poly(residual.num().clone());
        num.coeffs_in(&ut).unwrap_or_else(|| vec![residual.clone()])
    } else {
        vec![residual.clone()]
    };
    Ok(WaveCondition { a_hat, residual, residuals, split })
}

/// `⟨∂_s + τ^s ∂_t + η^s ∂_u⟩` as a canonical module with hat slot `t`.
pub fn wave_module(tau: &[Expr], eta: &[Expr], ctx: &JetContext) -> CanonicalModule {
    let n = ctx.n;
    let checked: Vec<usize> = (1..n).collect();
    CanonicalModule::from_coefficients(
        Split::from_checked(n, &checked),
        tau.iter().map(|t| vec![t.clone()]).collect(),
        eta.to_vec(),
    )
}

/// Strong co-order of a wave module given by `(τ, η)`.
pub fn wave_coorder(w: &QuasiLinear2, tau: &[Expr], eta: &[Expr], ctx: &JetContext) -> Result<SingularityReport> {
    let c = wave_module(tau, eta, ctx);
    let m = c.to_module();
    if let Some(b) = m.first_non_closing_bracket() {
        return Err(Error::NotInvolutive(b.show(ctx)));
    }
    strong_coorder_canonical(&w.equation(ctx), &c, ctx)
}

fn jacobian(phi1: &Expr, phi2: &Expr) -> Expr {
    let (t, u) = (Var::coord(0), Var::U);
    phi1.diff(&t) * phi2.diff(&u) - phi2.diff(&t) * phi1.diff(&u)
}

/// `τ^s` and `η^s` of the module annihilating `Φ^1` and `Φ^2`.
pub fn phi_pair_coefficients(phi1: &Expr, phi2: &Expr, ctx: &JetContext) -> Result<(Vec<Expr>, Vec<Expr>)> {
    let j = jacobian(phi1, phi2);
    if j.is_zero() {
        return Err(Error::DegenerateJacobian);
    }
    let (t, u) = (Var::coord(0), Var::U);
    let mut tau = Vec::new();
    let mut eta = Vec::new();
    for s in 1..ctx.n {
        let xs = Var::coord(s);
        tau.push(-((phi1.diff(&xs) * phi2.diff(&u) - phi2.diff(&xs) * phi1.diff(&u)) / &j));
        eta.push(-((phi1.diff(&t) * phi2.diff(&xs) - phi2.diff(&t) * phi1.diff(&xs)) / &j));
    }
    Ok((tau, eta))
}

pub fn phi_pair_module(phi1: &Expr, phi2: &Expr, ctx: &JetContext) -> Result<VFModule> {
    let (tau, eta) = phi_pair_coefficients(phi1, phi2, ctx)?;
    let m = wave_module(&tau, &eta, ctx).to_module();
    for (k, q) in m.basis().iter().enumerate() {
        if !q.apply(phi1).is_zero() || !q.apply(phi2).is_zero() {
            return Err(Error::Internal(format!("Q^{} does not annihilate the pair", k + 1)));
        }
    }
    if let Some(b) = m.first_non_closing_bracket() {
        return Err(Error::Internal(format!("pair module is not involutive: {}", b.show(ctx))));
    }
    Ok(m)
}

fn check_eiconal_input(w: &QuasiLinear2, psi: &Expr) -> Result<Expr> {
    if w.kind != Kind::Wave {
        return Err(Error::InvalidInput("eiconal residual needs a wave equation".into()));
    }
    for e in w.a.iter().flatten() {
        if e.free_vars().iter().any(|v| matches!(v, Var::U | Var::Jet(_) | Var::Omega(_))) {
            return Err(Error::InvalidInput("eiconal residual needs a = a(t, x)".into()));
        }
    }
    if psi.free_vars().iter().any(|v| matches!(v, Var::U | Var::Jet(_) | Var::Omega(_))) {
        return Err(Error::InvalidInput("Ψ must be a function of (t, x)".into()));
    }
    let pt = psi.diff(&Var::coord(0));
    if pt.is_zero() {
        return Err(Error::InvalidInput("Ψ_t vanishes identically".into()));
    }
    Ok(pt)
}

/// `(Ψ_t)^2 − a^{ij} Ψ_i Ψ_j`.
pub fn eiconal_residual(w: &QuasiLinear2, psi: &Expr, _ctx: &JetContext) -> Result<Expr> {
    let pt = check_eiconal_input(w, psi)?;
    let m = w.dim();
    let grad: Vec<Expr> = (1..=m).map(|s| psi.diff(&Var::coord(s))).collect();
    let mut r = &pt * &pt;
    for i in 0..m {
        for j in 0..m {
            r = r - &w.a[i][j] * &grad[i] * &grad[j];
        }
    }
    Ok(r)
}

/// `M^Ψ = ⟨Ψ_t ∂_s − Ψ_s ∂_t, ∂_u⟩`.
pub fn meta_module_from_eiconal(w: &QuasiLinear2, psi: &Expr, ctx: &JetContext) -> Result<VFModule> {
    let r = eiconal_residual(w, psi, ctx)?;
    if !r.is_zero() {
        return Err(Error::EiconalViolated(ctx.show(&r)));
    }
    let n = ctx.n;
    let pt = psi.diff(&Var::coord(0));
    let mut basis = Vec::new();
    for s in 1..n {
        let mut xi = vec![Expr::zero(); n];
        xi[s] = pt.clone();
        xi[0] = -psi.diff(&Var::coord(s));
        basis.push(VectorField::new(xi, Expr::zero())?);
    }
    basis.push(VectorField::d_u(n));
    VFModule::new(basis, n)
}

/// The member of `M^Ψ` annihilating `Ψ` and `Φ`.
pub fn eiconal_submodule(psi: &Expr, phi: &Expr, ctx: &JetContext) -> Result<VFModule> {
    phi_pair_module(psi, phi, ctx)
}

/// Whether every field of `sub` lies in `m`.
pub fn is_submodule(sub: &VFModule, m: &VFModule) -> bool {
    sub.basis().iter().all(|v| m.contains(v))
}

/// Second-order derivative index helper.
pub fn second_index(ctx: &JetContext, i: usize, j: usize) -> MultiIndex {
    ctx.delta(i).add(&ctx.delta(j))
}

/// Order of the associated function of the wave equation for `(τ, η)`,
/// computed directly from the rewrite system.
pub fn wave_associated_order(w: &QuasiLinear2, tau: &[Expr], eta: &[Expr], ctx: &JetContext) -> Result<i32> {
    let c = wave_module(tau, eta, ctx);
    let l = w.equation(ctx);
    let rs = RewriteSystem::for_function(&c, &l, ElimChoice::First, ctx)?;
    Ok(order_of(&associated_function(&l, &rs)?))
}

/// Serialized form: `{"kind", "a", "b", "module"}` with `a` either a matrix
/// of expression strings or `"identity"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuasiLinearSpec {
    pub kind: Kind,
    pub a: Value,
    #[serde(default)]
    pub b: Option<String>,
    #[serde(default)]
    pub module: Option<ModuleSpec>,
}

impl QuasiLinearSpec {
    pub fn build(&self, ctx: &JetContext) -> Result<QuasiLinear2> {
        let m = match self.kind {
            Kind::Elliptic => ctx.n,
            Kind::Evolution | Kind::Wave => ctx.n.saturating_sub(1),
        };
        let a = parse_matrix(&self.a, m, ctx)?;
        let b = match &self.b {
            Some(s) => ctx.parse(s)?,
            None => Expr::zero(),
        };
        QuasiLinear2::new(self.kind, a, b, ctx)
    }
}

/// `"identity"`, a list of diagonal entries, or a full matrix of strings.
pub fn parse_matrix(v: &Value, m: usize, ctx: &JetContext) -> Result<Vec<Vec<Expr>>> {
    let bad = || Error::InvalidInput("coefficient matrix must be \"identity\", a diagonal list or a square matrix of strings".into());
    match v {
        Value::String(s) if s == "identity" => {
            Ok((0..m).map(|i| (0..m).map(|j| if i == j { Expr::one() } else { Expr::zero() }).collect()).collect())
        }
        Value::Array(rows) if rows.iter().all(Value::is_string) => {
            let mut a = vec![vec![Expr::zero(); rows.len()]; rows.len()];
            for (i, r) in rows.iter().enumerate() {
                a[i][i] = ctx.parse(r.as_str().ok_or_else(bad)?)?;
            }
            Ok(a)
        }
        Value::Array(rows) => rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(bad)?
                    .iter()
                    .map(|e| ctx.parse(e.as_str().ok_or_else(bad)?))
                    .collect::<Result<Vec<_>>>()
            })
            .collect(),
        _ => Err(bad()),
    }
}
