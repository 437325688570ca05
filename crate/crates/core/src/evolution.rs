//! Evolution equations `u_t = H(t, x, u_(r,x))`, their determining systems,
//! and co-order-one modules of general equations.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::{Expr, MultiIndex, Var};
use crate::jet::{order_of, JetContext, Split};
use crate::manifold::{
    associated_function, family_reduced_function, meta_singularity_coorder, ElimChoice, MetaVariant, PhiFamily,
    RewriteSystem,
};
use crate::reduction::{affine_solve, conditional_invariance_check};
use crate::vfmod::{phi_etas, CanonicalModule, VFModule, VectorField};

/// `u_t = H` with `t` in slot 0 and spatial variables in slots `1..=n`.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionEquation {
    pub h: Expr,
    pub n_spatial: usize,
}

impl EvolutionEquation {
    pub fn new(h: Expr, ctx: &JetContext) -> Result<Self> {
        if ctx.n < 2 {
            return Err(Error::InvalidInput("an evolution equation needs t and at least one spatial variable".into()));
        }
        for v in h.free_vars() {
            match &v {
                Var::Jet(a) if a.get(0) > 0 => {
                    return Err(Error::InvalidInput(format!("H depends on the t-derivative {}", ctx.show(&Expr::var(v.clone())))));
                }
                Var::Omega(_) => return Err(Error::InvalidInput("H must be written in jet variables".into())),
                _ => {}
            }
        }
        if order_of(&h) < 2 {
            return Err(Error::InvalidInput(format!("H has order {}, expected at least 2", order_of(&h))));
        }
        Ok(EvolutionEquation { h, n_spatial: ctx.n - 1 })
    }

    /// Reads `H` off `L = c·u_t − F` with `c` a nonzero constant.
    pub fn from_equation(l: &Expr, ctx: &JetContext) -> Result<Self> {
        let ut = Var::Jet(ctx.delta(0));
        let c = l.diff(&ut);
        if c.as_constant().is_none() || c.is_zero() {
            return Err(Error::InvalidInput("equation is not of the form c·u_t = H with constant c".into()));
        }
        let h = -(l - &(&c * &Expr::var(ut))) / c;
        Self::new(h, ctx)
    }

    /// `L = u_t − H`.
    pub fn equation(&self, ctx: &JetContext) -> Expr {
        Expr::jet(ctx.delta(0)) - &self.h
    }

    pub fn spatial(&self) -> Vec<usize> {
        (1..=self.n_spatial).collect()
    }

    fn split(&self) -> Split {
        Split::from_checked(self.n_spatial + 1, &self.spatial())
    }

    fn check_etas(&self, etas: &[Expr]) -> Result<()> {
        if etas.len() != self.n_spatial {
            return Err(Error::InvalidInput(format!("expected {} η coefficients, found {}", self.n_spatial, etas.len())));
        }
        for e in etas {
            if e.free_vars().iter().any(|v| matches!(v, Var::Jet(_) | Var::Omega(_))) {
                return Err(Error::InvalidInput("η must be a function of (t, x, u)".into()));
            }
        }
        Ok(())
    }
}

/// Involutivity residuals for `s < s'`:
/// `η^s_{s'} + η^{s'} η^s_u − η^{s'}_s − η^s η^{s'}_u`.
pub fn involutivity_residuals(etas: &[Expr]) -> Vec<((usize, usize), Expr)> {
    let u = Var::U;
    let mut out = Vec::new();
    for i in 0..etas.len() {
        for j in i + 1..etas.len() {
            let (s, s2) = (i + 1, j + 1);
            let (a, b) = (&etas[i], &etas[j]);
            let r = a.diff(&Var::coord(s2)) + b * &a.diff(&u) - b.diff(&Var::coord(s)) - a * &b.diff(&u);
            out.push(((s, s2), r));
        }
    }
    out
}

/// `H̃`: `H` with every `u_α` replaced by `h^α = (∂_1+η^1∂_u)^{α_1}⋯u`.
pub fn tilde_h(e: &EvolutionEquation, etas: &[Expr], ctx: &JetContext) -> Result<Expr> {
    e.check_etas(etas)?;
    if let Some((_, r)) = involutivity_residuals(etas).into_iter().find(|(_, r)| !r.is_zero()) {
        return Err(Error::NotInvolutive(ctx.show(&r)));
    }
    let mut fam = PhiFamily::from_etas(&e.split(), etas)?;
    let out = fam.restrict(&e.h, ctx)?;
    ctx.check_size(&out, "H̃")?;
    Ok(out)
}

/// `η^s_h + G η^s_u − G_s − η^s G_u` for each checked `s`, with `h` the
/// distinguished slot.
pub fn invariance_residuals(etas: &[Expr], checked: &[usize], hat: usize, g: &Expr) -> Vec<Expr> {
    let u = Var::U;
    checked
        .iter()
        .zip(etas)
        .map(|(&s, eta)| eta.diff(&Var::coord(hat)) + g * &eta.diff(&u) - g.diff(&Var::coord(s)) - eta * &g.diff(&u))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeterminingSystem {
    pub involutivity: Vec<((usize, usize), Expr)>,
    pub invariance: Vec<Expr>,
    /// `H̃` (evolution case) or `G^Φ` (co-order one); absent when the module
    /// is not involutive.
    pub reduced_rhs: Option<Expr>,
}

impl DeterminingSystem {
    pub fn is_reduction_module(&self) -> bool {
        self.reduced_rhs.is_some()
            && self.involutivity.iter().all(|(_, r)| r.is_zero())
            && self.invariance.iter().all(Expr::is_zero)
    }

    pub fn residual_count(&self) -> usize {
        self.involutivity.len() + self.invariance.len()
    }

    pub fn to_json(&self, ctx: &JetContext) -> Value {
        let inv: Vec<Value> = self
            .involutivity
            .iter()
            .map(|((s, s2), r)| json!({"pair": [s, s2], "residual": ctx.show(r)}))
            .collect();
        let det: Vec<Value> = self
            .invariance
            .iter()
            .enumerate()
            .map(|(k, r)| json!({"index": k + 1, "residual": ctx.show(r)}))
            .collect();
        json!({
            "involutivity": inv,
            "invariance": det,
            "reduced_rhs": self.reduced_rhs.as_ref().map(|e| ctx.show(e)),
            "is_reduction_module": self.is_reduction_module(),
        })
    }
}

/// Involutivity and invariance residuals of `⟨∂_s + η^s ∂_u⟩` for `u_t = H`.
pub fn determining_system_evolution(e: &EvolutionEquation, etas: &[Expr], ctx: &JetContext) -> Result<DeterminingSystem> {
    e.check_etas(etas)?;
    let involutivity = involutivity_residuals(etas);
    if involutivity.iter().any(|(_, r)| !r.is_zero()) {
        return Ok(DeterminingSystem { involutivity, invariance: Vec::new(), reduced_rhs: None });
    }
    let ht = tilde_h(e, etas, ctx)?;
    let invariance = invariance_residuals(etas, &e.spatial(), 0, &ht);
    Ok(DeterminingSystem { involutivity, invariance, reduced_rhs: Some(ht) })
}

/// `R = Φ_h + Φ_u G` together with the checks that accompany it.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiResidual {
    pub phi: Expr,
    pub etas: Vec<Expr>,
    /// `H^Φ` or `G^Φ`.
    pub rhs: Expr,
    pub residual: Expr,
    /// `Q^Φ_s R = 0` for every checked `s`: `R` is a function of the
    /// distinguished variable and `Φ`, and a reparameterization `χ` removes it.
    pub chi_repairable: bool,
    /// Invariance residuals of the module `Q^Φ`.
    pub invariance: Vec<Expr>,
    /// `invariance_s + (1/Φ_u) Q^Φ_s R`, all identically zero.
    pub identity: Vec<Expr>,
}

impl PhiResidual {
    fn build(phi: &Expr, etas: Vec<Expr>, checked: &[usize], hat: usize, rhs: Expr, n: usize) -> Result<Self> {
        let pu = phi.diff(&Var::U);
        let residual = phi.diff(&Var::coord(hat)) + &pu * &rhs;
        let invariance = invariance_residuals(&etas, checked, hat, &rhs);
        let mut qr = Vec::new();
        for (&s, eta) in checked.iter().zip(&etas) {
            let mut q = VectorField::partial(n, s);
            q.eta = eta.clone();
            qr.push(q.apply(&residual));
        }
        let identity = invariance.iter().zip(&qr).map(|(i, q)| i + &(q / &pu)).collect();
        let chi_repairable = qr.iter().all(Expr::is_zero);
        Ok(PhiResidual { phi: phi.clone(), etas, rhs, residual, chi_repairable, invariance, identity })
    }

    pub fn identity_holds(&self) -> bool {
        self.identity.iter().all(Expr::is_zero)
    }

    pub fn is_reduction_module(&self) -> bool {
        self.residual.is_zero() || self.chi_repairable
    }

    pub fn to_json(&self, ctx: &JetContext) -> Value {
        let show = |v: &[Expr]| v.iter().map(|e| ctx.show(e)).collect::<Vec<_>>();
        json!({
            "phi": ctx.show(&self.phi),
            "etas": show(&self.etas),
            "rhs": ctx.show(&self.rhs),
            "residual": ctx.show(&self.residual),
            "chi_repairable": self.chi_repairable,
            "invariance": show(&self.invariance),
            "identity_holds": self.identity_holds(),
            "is_reduction_module": self.is_reduction_module(),
        })
    }
}

/// `Φ_t + Φ_u H^Φ` with `H^Φ = H̃` for `η^s = −Φ_s/Φ_u`.
pub fn phi_residual_evolution(e: &EvolutionEquation, phi: &Expr, ctx: &JetContext) -> Result<PhiResidual> {
    let etas = phi_etas(phi, &e.spatial())?;
    let hphi = tilde_h(e, &etas, ctx)?;
    PhiResidual::build(phi, etas, &e.spatial(), 0, hphi, ctx.n)
}

/// `Q̃ = ⟨∂_t + H̃∂_u, Q_1, …, Q_n⟩` and three independently computed verdicts.
#[derive(Clone, Debug)]
pub struct TildeExtension {
    pub module: VFModule,
    pub h_tilde: Expr,
    /// `⟨Q_1, …, Q_n⟩` is a reduction module of `u_t = H`.
    pub reduction: bool,
    /// `Q̃` is involutive.
    pub involutive: bool,
    /// `u_t − H` is ultra-singular for `Q̃`.
    pub ultra: bool,
}

impl TildeExtension {
    pub fn agree(&self) -> bool {
        self.reduction == self.involutive && self.involutive == self.ultra
    }

    pub fn to_json(&self, ctx: &JetContext) -> Value {
        json!({
            "module": self.module.basis().iter().map(|v| v.show(ctx)).collect::<Vec<_>>(),
            "h_tilde": ctx.show(&self.h_tilde),
            "reduction_module": self.reduction,
            "involutive": self.involutive,
            "ultra_singular": self.ultra,
            "agree": self.agree(),
        })
    }
}

/// Ultra-singularity of `l` for a module whose checked slots are all slots:
/// the rules obtained with both elimination orders must coincide and `L̂ ≡ 0`.
fn ultra_by_rules(c: &CanonicalModule, l: &Expr, ctx: &JetContext) -> Result<bool> {
    let r = order_of(l).max(1) as usize;
    let first = RewriteSystem::build(c, r, ElimChoice::First, ctx)?;
    let last = RewriteSystem::build(c, r, ElimChoice::Last, ctx)?;
    for (a, e) in &first.rules {
        match last.get(a) {
            Some(f) if f == e => {}
            _ => return Ok(false),
        }
    }
    Ok(associated_function(l, &first)?.is_zero())
}

pub fn tilde_extension(e: &EvolutionEquation, etas: &[Expr], ctx: &JetContext) -> Result<TildeExtension> {
    let ht = tilde_h(e, etas, ctx)?;
    let n = ctx.n;
    let l = e.equation(ctx);
    let spatial: Vec<VectorField> = e
        .spatial()
        .iter()
        .zip(etas)
        .map(|(&s, eta)| {
            let mut q = VectorField::partial(n, s);
            q.eta = eta.clone();
            q
        })
        .collect();
    let q = VFModule::new(spatial.clone(), n)?;
    let reduction = conditional_invariance_check(&l, &q, ctx)?.is_reduction_module == Some(true);

    let mut q0 = VectorField::partial(n, 0);
    q0.eta = ht.clone();
    let mut basis = vec![q0];
    basis.extend(spatial);
    let module = VFModule::new(basis, n)?;
    let involutive = module.is_involutive();

    let mut eta_hat = vec![ht.clone()];
    eta_hat.extend(etas.iter().cloned());
    let c = CanonicalModule::from_coefficients(Split::prefix(n, n), vec![Vec::new(); n], eta_hat);
    let ultra = ultra_by_rules(&c, &l, ctx)?;
    Ok(TildeExtension { module, h_tilde: ht, reduction, involutive, ultra })
}

fn coorder1_split(n: usize, hat: Option<usize>) -> Result<(Split, usize)> {
    let h = hat.unwrap_or(n - 1);
    if h >= n {
        return Err(Error::InvalidInput(format!("hat slot {h} out of range")));
    }
    Ok((Split::from_hat(n, &[h]), h))
}

/// `G^Φ` solving `L̃^Φ = 0` for `u_h`, `h` the hat slot (default the last).
pub fn coorder1_g(l: &Expr, phi: &Expr, hat: Option<usize>, ctx: &JetContext) -> Result<Expr> {
    let (split, h) = coorder1_split(ctx.n, hat)?;
    let meta = meta_singularity_coorder(l, &split, &MetaVariant::Involutive, ctx)?;
    if meta.coorder > 1 {
        return Err(Error::InvalidInput(format!("meta-singular co-order is {}, expected at most 1", meta.coorder)));
    }
    let lt = family_reduced_function(l, phi, &split, 1, &MetaVariant::Involutive, ctx)?;
    let v = Var::Jet(ctx.delta(h));
    if !lt.depends_on(&v) {
        return Err(Error::SingularPhi);
    }
    let g = affine_solve(&lt, &v)
        .ok_or_else(|| Error::NotSolvable(format!("{} is not affine in {}", ctx.show(&lt), ctx.show(&Expr::var(v.clone())))))?;
    if !lt.subs1(&v, &g)?.is_zero() {
        return Err(Error::Internal("G^Φ does not annihilate the family-reduced function".into()));
    }
    Ok(g)
}

/// `Φ_h + Φ_u G^Φ` and the invariance residuals of `Q^Φ`.
pub fn coorder1_determining(l: &Expr, phi: &Expr, hat: Option<usize>, ctx: &JetContext) -> Result<PhiResidual> {
    let g = coorder1_g(l, phi, hat, ctx)?;
    let (split, h) = coorder1_split(ctx.n, hat)?;
    let etas = phi_etas(phi, &split.checked)?;
    PhiResidual::build(phi, etas, &split.checked, h, g, ctx.n)
}

/// Spatial multi-index helper: `(0, a_1, …, a_n)`.
pub fn spatial_index(entries: &[u32]) -> MultiIndex {
    let mut v = vec![0];
    v.extend_from_slice(entries);
    MultiIndex::new(&v)
}
