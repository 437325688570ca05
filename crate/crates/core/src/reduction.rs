//! Conditional invariance, reduced equations and reduction to algebraic
//! equations.

use std::collections::HashMap;

use num_traits::Signed;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::{factor_nonvanishing, gcd, Expr, MultiIndex, Poly, Var};
use crate::jet::{apply_prolonged, jet_vars_of_order, order_of, JetContext, Split};
use crate::manifold::{associated_function, ElimChoice, PhiFamily, RewriteSystem};
use crate::vfmod::{phi_family_member, CanonicalModule, PhiVariant, VFModule};

/// How the restriction to the solution set of `L̂ = 0` was carried out.
#[derive(Clone, Debug, PartialEq)]
pub enum LeadingSolve {
    /// `L̂ ≡ 0`: the restriction is the manifold itself.
    Ultra,
    /// `L̂` is a nonzero constant: the restricted set is empty.
    Vacuous,
    /// `v = value` solved from `L̂ = 0`.
    Affine { var: Var, value: Expr },
    /// Residuals tested for divisibility by `L̂`.
    Division,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionVerdict {
    /// `Some(true)`/`Some(false)` when decided, `None` when unknown.
    pub is_reduction_module: Option<bool>,
    /// `V_(r) L` restricted to `L̂ = 0` on the manifold, one per basis element.
    pub residuals: Vec<Expr>,
    pub leading_solve: LeadingSolve,
    pub associated_function: Expr,
    pub notes: Vec<String>,
}

impl ReductionVerdict {
    pub fn to_json(&self, ctx: &JetContext) -> Value {
        let solve = match &self.leading_solve {
            LeadingSolve::Ultra => json!({"kind": "ultra"}),
            LeadingSolve::Vacuous => json!({"kind": "vacuous"}),
            LeadingSolve::Affine { var, value } => {
                json!({"kind": "affine", "var": ctx.show(&Expr::var(var.clone())), "value": ctx.show(value)})
            }
            LeadingSolve::Division => json!({"kind": "division"}),
        };
        json!({
            "is_reduction_module": self.is_reduction_module,
            "residuals": self.residuals.iter().map(|r| ctx.show(r)).collect::<Vec<_>>(),
            "associated_function": ctx.show(&self.associated_function),
            "leading_solve": solve,
            "notes": self.notes,
        })
    }
}

/// Positive constant term, positive coefficients and even powers of every
/// non-exp variable: such a polynomial has no real zeros.
fn manifestly_positive(p: &Poly) -> bool {
    let sign = p.lc().is_positive();
    p.terms().iter().any(|(m, _)| m.is_one())
        && p.terms().iter().all(|(m, c)| {
            c.is_positive() == sign && m.factors().iter().all(|(v, k)| v.is_exp() || k % 2 == 0)
        })
}

/// `e` vanishes wherever `f` does (generically): every factor of `num(f)`
/// surviving in the denominator of `e / f` has no real zeros.
pub fn vanishes_on_zero_set(e: &Expr, f: &Expr) -> bool {
    if e.is_zero() {
        return true;
    }
    if f.is_zero() {
        return false;
    }
    let q = e / f;
    let g = gcd(q.den(), f.num());
    g.is_constant() || manifestly_positive(&g)
}

fn top_order_vars(lhat: &Expr, split: &Split) -> Vec<Var> {
    let k = order_of(lhat);
    if k <= 0 {
        return if lhat.depends_on(&Var::U) { vec![Var::U] } else { Vec::new() };
    }
    jet_vars_of_order(lhat, k as u32).into_iter().filter(|a| split.check_weight(a) == 0).map(Var::Jet).collect()
}

/// Solves `e = 0` for `v` when `e` is affine in `v`.
pub fn affine_solve(e: &Expr, v: &Var) -> Option<Expr> {
    let a = e.diff(v);
    if a.is_zero() || a.depends_on(v) {
        return None;
    }
    let b = e.subs1(v, &Expr::zero()).ok()?;
    Some(-(b / a))
}

fn choose_affine(lhat: &Expr, split: &Split) -> Option<(Var, Expr)> {
    top_order_vars(lhat, split)
        .into_iter()
        .filter_map(|v| affine_solve(lhat, &v).map(|x| (v, x)))
        .min_by_key(|(_, x)| x.size())
}

fn restrict_to_manifold(e: &Expr, rs: &mut RewriteSystem, ctx: &JetContext) -> Result<Expr> {
    let split = rs.split.clone();
    let mut b = HashMap::new();
    for v in e.all_vars() {
        if let Var::Jet(a) = &v {
            if split.check_weight(a) > 0 {
                b.insert(v.clone(), rs.ensure(a, ctx)?);
            }
        }
    }
    e.substitute(&b)
}

/// Conditional invariance criterion `V_(r) L |_{L ∩ Q_(r)} = 0` for each basis
/// element `V` of `M`.
pub fn conditional_invariance_check(l: &Expr, m: &VFModule, ctx: &JetContext) -> Result<ReductionVerdict> {
    if !m.rank_condition() {
        return Err(Error::RankDeficient);
    }
    if let Some(b) = m.first_non_closing_bracket() {
        return Err(Error::NotInvolutive(b.show(ctx)));
    }
    let c = m.canonical_basis()?;
    check_with_canonical(l, m, &c, ctx)
}

fn check_with_canonical(l: &Expr, m: &VFModule, c: &CanonicalModule, ctx: &JetContext) -> Result<ReductionVerdict> {
    let r = order_of(l).max(0) as usize;
    let mut rs = RewriteSystem::for_function(c, l, ElimChoice::First, ctx)?;
    let lhat = associated_function(l, &rs)?;
    let mut raw = Vec::new();
    for v in m.basis() {
        let pr = apply_prolonged(v, l, r, ctx)?;
        let res = restrict_to_manifold(&pr, &mut rs, ctx)?;
        ctx.check_size(&res, "conditional invariance residual")?;
        raw.push(res);
    }
    let mut notes = Vec::new();
    let (_, core) = factor_nonvanishing(&lhat, ctx);
    if lhat.is_zero() {
        let ok = raw.iter().all(Expr::is_zero);
        return Ok(ReductionVerdict {
            is_reduction_module: Some(ok),
            residuals: raw,
            leading_solve: LeadingSolve::Ultra,
            associated_function: lhat,
            notes,
        });
    }
    if core.as_constant().is_some() {
        notes.push("associated function is a nonzero constant; the criterion holds vacuously".into());
        return Ok(ReductionVerdict {
            is_reduction_module: Some(true),
            residuals: vec![Expr::zero(); raw.len()],
            leading_solve: LeadingSolve::Vacuous,
            associated_function: lhat,
            notes,
        });
    }
    if let Some((var, value)) = choose_affine(&core, &c.split) {
        let mut residuals = Vec::new();
        for e in &raw {
            residuals.push(e.subs1(&var, &value)?);
        }
        let ok = residuals.iter().all(Expr::is_zero);
        return Ok(ReductionVerdict {
            is_reduction_module: Some(ok),
            residuals,
            leading_solve: LeadingSolve::Affine { var, value },
            associated_function: lhat,
            notes,
        });
    }
    let residuals: Vec<Expr> =
        raw.into_iter().map(|e| if vanishes_on_zero_set(&e, &core) { Expr::zero() } else { e }).collect();
    let ok = residuals.iter().all(Expr::is_zero);
    if !ok {
        notes.push("associated function is not affine in a top-order derivative and does not divide every residual".into());
    }
    Ok(ReductionVerdict {
        is_reduction_module: if ok { Some(true) } else { None },
        residuals,
        leading_solve: LeadingSolve::Division,
        associated_function: lhat,
        notes,
    })
}

/// Reduced equation for a shift module `⟨∂_s, s checked⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftReduction {
    /// Equations in the hat variables, `u` and hat derivatives (read as
    /// `φ` and its derivatives).
    pub equations: Vec<Expr>,
    /// The reduced function still depended on a checked coordinate and was
    /// split with respect to it.
    pub split_performed: bool,
    pub reduced_order: i32,
    pub verdict: ReductionVerdict,
}

impl ShiftReduction {
    pub fn to_json(&self, ctx: &JetContext) -> Value {
        json!({
            "equations": self.equations.iter().map(|e| ctx.show(e)).collect::<Vec<_>>(),
            "split_performed": self.split_performed,
            "reduced_order": self.reduced_order,
            "verdict": self.verdict.to_json(ctx),
        })
    }
}

fn split_on_coords(e: &Expr, coords: &[usize]) -> Option<Vec<Expr>> {
    let mut parts = vec![e.clone()];
    for &s in coords {
        let v = Var::coord(s);
        let mut next = Vec::new();
        for p in parts {
            if !p.mentions(&v) {
                next.push(p);
                continue;
            }
            if p.den().contains_var(&v) || p.vars().iter().any(|w| matches!(w, Var::Exp(a) if a.mentions(&v))) {
                return None;
            }
            let num = Expr::from_poly(p.num().clone());
            let den = Expr::from_poly(p.den().clone());
            for c in num.coeffs_in(&v)? {
                if !c.is_zero() {
                    next.push(c / &den);
                }
            }
        }
        parts = next;
    }
    Some(parts)
}

pub fn reduce_shift_module(l: &Expr, split: &Split, ctx: &JetContext) -> Result<ShiftReduction> {
    let m = VFModule::shifts(ctx.n, &split.checked);
    let verdict = conditional_invariance_check(l, &m, ctx)?;
    if verdict.is_reduction_module == Some(false) {
        return Err(Error::NotReductionModule);
    }
    let lhat = verdict.associated_function.clone();
    let depends = split.checked.iter().any(|&s| lhat.depends_on(&Var::coord(s)));
    let (equations, split_performed) = if depends {
        match split_on_coords(&lhat, &split.checked) {
            Some(parts) => (parts, true),
            None => (vec![lhat.clone()], false),
        }
    } else {
        (vec![lhat.clone()], false)
    };
    let reduced_order = equations.iter().map(order_of).max().unwrap_or(-1);
    Ok(ShiftReduction { equations, split_performed, reduced_order, verdict })
}

/// Whether `u = f(x)` solves `L = 0`.
pub fn is_solution(l: &Expr, f: &Expr, ctx: &JetContext) -> Result<bool> {
    if f.free_vars().iter().any(|v| matches!(v, Var::U | Var::Jet(_) | Var::Omega(_))) {
        return Err(Error::InvalidInput("candidate solution must be a function of x only".into()));
    }
    let mut b = HashMap::new();
    b.insert(Var::U, f.clone());
    for v in l.all_vars() {
        if let Var::Jet(a) = &v {
            let mut d = f.clone();
            for i in 0..ctx.n {
                for _ in 0..a.get(i) {
                    d = d.diff(&Var::coord(i));
                }
            }
            b.insert(v.clone(), d);
        }
    }
    Ok(l.substitute(&b)?.is_zero())
}

/// Outcome of separating `L^Φ = Λ̃ ζ(Φ)`.
#[derive(Clone, Debug, PartialEq)]
pub enum ZetaCertificate {
    /// `ζ` as an expression in the parameter symbol, with `Λ̃ = 1`.
    Zeta(Expr),
    /// Every `Q_s L^Φ` vanishes, so `L^Φ` is a function of `Φ`; no inverse
    /// was supplied to write it down.
    Invariant,
    /// `Q_s L^Φ = λ^s L^Φ` for all `s`.
    Multiplicative { lambdas: Vec<Expr> },
    /// Some `Q_s L^Φ` does not vanish on `L^Φ = 0`.
    NotSeparable { residuals: Vec<Expr> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicReduction {
    pub phi: Expr,
    pub l_phi: Expr,
    pub multiplier: Expr,
    pub certificate: ZetaCertificate,
    pub ultra: bool,
}

impl AlgebraicReduction {
    pub fn is_reduction(&self) -> bool {
        !matches!(self.certificate, ZetaCertificate::NotSeparable { .. })
    }

    pub fn to_json(&self, ctx: &JetContext) -> Value {
        let cert = match &self.certificate {
            ZetaCertificate::Zeta(z) => json!({"kind": "zeta", "zeta": ctx.show(z)}),
            ZetaCertificate::Invariant => json!({"kind": "invariant"}),
            ZetaCertificate::Multiplicative { lambdas } => {
                json!({"kind": "multiplicative", "lambdas": lambdas.iter().map(|e| ctx.show(e)).collect::<Vec<_>>()})
            }
            ZetaCertificate::NotSeparable { residuals } => {
                json!({"kind": "not_separable", "residuals": residuals.iter().map(|e| ctx.show(e)).collect::<Vec<_>>()})
            }
        };
        json!({
            "phi": ctx.show(&self.phi),
            "l_phi": ctx.show(&self.l_phi),
            "multiplier": ctx.show(&self.multiplier),
            "ultra": self.ultra,
            "is_reduction_module": self.is_reduction(),
            "certificate": cert,
        })
    }
}

/// Inverse `u = ψ(x, κ)` of `κ = Φ(x, u)`, with `κ` a declared symbol.
#[derive(Clone, Debug)]
pub struct PhiInverse {
    pub psi: Expr,
    pub kappa: Var,
}

impl PhiInverse {
    /// `Φ(x, ψ(x, κ)) = κ`.
    pub fn round_trips(&self, phi: &Expr) -> Result<bool> {
        Ok((phi.subs1(&Var::U, &self.psi)? - Expr::var(self.kappa.clone())).is_zero())
    }
}

/// `L^Φ` for the `n`-dimensional module of `Φ`.
pub fn l_phi(l: &Expr, phi: &Expr, ctx: &JetContext) -> Result<(Expr, PhiFamily)> {
    let split = Split::prefix(ctx.n, ctx.n);
    let mut fam = PhiFamily::new(phi, &split, None, ctx)?;
    let lp = fam.restrict(l, ctx)?;
    ctx.check_size(&lp, "L^Φ")?;
    Ok((lp, fam))
}

pub fn ndim_reduce(l: &Expr, phi: &Expr, inverse: Option<&PhiInverse>, ctx: &JetContext) -> Result<AlgebraicReduction> {
    let (lp, fam) = l_phi(l, phi, ctx)?;
    let mk = |certificate, multiplier| AlgebraicReduction {
        phi: phi.clone(),
        l_phi: lp.clone(),
        multiplier,
        ultra: lp.is_zero(),
        certificate,
    };
    if lp.is_zero() {
        return Ok(mk(ZetaCertificate::Zeta(Expr::zero()), Expr::one()));
    }
    if lp.as_constant().is_some() {
        return Ok(mk(ZetaCertificate::Zeta(lp.clone()), Expr::one()));
    }
    let qs: Vec<Expr> = fam.fields().iter().map(|q| q.apply(&lp)).collect();
    if qs.iter().all(Expr::is_zero) {
        if let Some(inv) = inverse {
            if !inv.round_trips(phi)? {
                return Err(Error::InvalidInput("supplied inverse does not invert Φ".into()));
            }
            let z = lp.subs1(&Var::U, &inv.psi)?;
            let x_free = (0..ctx.n).all(|i| !z.depends_on(&Var::coord(i)));
            if x_free {
                let back = z.subs1(&inv.kappa, phi)?;
                if !(back - &lp).is_zero() {
                    return Err(Error::Internal("ζ(Φ) does not reproduce L^Φ".into()));
                }
                return Ok(mk(ZetaCertificate::Zeta(z), Expr::one()));
            }
        }
        return Ok(mk(ZetaCertificate::Invariant, Expr::one()));
    }
    if qs.iter().all(|q| vanishes_on_zero_set(q, &lp)) {
        let lambdas = qs.iter().map(|q| q / &lp).collect();
        return Ok(mk(ZetaCertificate::Multiplicative { lambdas }, Expr::one()));
    }
    Ok(mk(ZetaCertificate::NotSeparable { residuals: qs }, Expr::one()))
}

#[derive(Clone, Debug)]
pub struct UltraFamilyVerdict {
    pub module: VFModule,
    pub ultra: bool,
    pub l_phi: Expr,
}

impl UltraFamilyVerdict {
    pub fn to_json(&self, ctx: &JetContext) -> Value {
        json!({
            "module": self.module.basis().iter().map(|v| v.show(ctx)).collect::<Vec<_>>(),
            "ultra": self.ultra,
            "l_phi": ctx.show(&self.l_phi),
        })
    }
}

/// The `n`-dimensional module of a one-parameter family `κ = Φ(x, u)` and
/// whether `L` is ultra-singular on it.
pub fn ultra_module_from_family(l: &Expr, phi: &Expr, ctx: &JetContext) -> Result<UltraFamilyVerdict> {
    let module = phi_family_member(phi, &Split::prefix(ctx.n, ctx.n), &PhiVariant::Involutive)?;
    let (lp, _) = l_phi(l, phi, ctx)?;
    Ok(UltraFamilyVerdict { module, ultra: lp.is_zero(), l_phi: lp })
}

/// Multi-index helper for callers building jets by hand.
pub fn jet_index(entries: &[u32]) -> MultiIndex {
    MultiIndex::new(entries)
}
