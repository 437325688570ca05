//! Rewrite systems for the manifold `Q_(r)` cut out by a module and its
//! differential consequences, and singularity co-orders.

use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::{factor_nonvanishing, gcd, Expr, MultiIndex, Var};
use crate::jet::{derive, jet_vars_of_order, order_of, total_derivative, JetContext, Split};
use crate::vfmod::{phi_etas, CanonicalModule, VFModule, VectorField};

/// Which admissible direction is peeled off when a rule is derived from a
/// lower one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ElimChoice {
    #[default]
    First,
    Last,
}

impl ElimChoice {
    fn pick(self, slots: &[usize], alpha: &MultiIndex) -> Option<usize> {
        let mut it = slots.iter().copied().filter(|&i| alpha.get(i) > 0);
        match self {
            ElimChoice::First => it.next(),
            ElimChoice::Last => it.next_back(),
        }
    }
}

/// Rules `u_α → E_α` for every `α` with a checked component, `|α| ≤ r`.
#[derive(Clone, Debug)]
pub struct RewriteSystem {
    pub split: Split,
    pub order: usize,
    pub rules: BTreeMap<MultiIndex, Expr>,
    module: CanonicalModule,
    choice: ElimChoice,
}

/// Processing order: `|α|`, then `|α̌|`, then graded-lex.
fn rule_key(split: &Split, a: &MultiIndex) -> (u32, u32, MultiIndex) {
    (a.order(), split.check_weight(a), *a)
}

fn rule_indices(split: &Split, r: usize) -> Vec<MultiIndex> {
    let mut v: Vec<MultiIndex> =
        MultiIndex::all_up_to(split.n, 1, r as u32).into_iter().filter(|a| split.check_weight(a) > 0).collect();
    v.sort_by_key(|a| rule_key(split, a));
    v
}

fn checked_jets(e: &Expr, split: &Split) -> Vec<MultiIndex> {
    let mut out: Vec<MultiIndex> = e
        .all_vars()
        .into_iter()
        .filter_map(|v| match v {
            Var::Jet(a) if split.check_weight(&a) > 0 => Some(a),
            _ => None,
        })
        .collect();
    out.sort_by_key(|a| rule_key(split, a));
    out
}

fn hat_jets(e: &Expr, split: &Split) -> Vec<MultiIndex> {
    e.all_vars()
        .into_iter()
        .filter_map(|v| match v {
            Var::Jet(a) if split.check_weight(&a) == 0 => Some(a),
            _ => None,
        })
        .collect()
}

impl RewriteSystem {
    fn empty(c: &CanonicalModule, r: usize, choice: ElimChoice) -> Self {
        RewriteSystem { split: c.split.clone(), order: r, rules: BTreeMap::new(), module: c.clone(), choice }
    }

    pub fn choice(&self) -> ElimChoice {
        self.choice
    }

    pub fn module(&self) -> &CanonicalModule {
        &self.module
    }

    pub fn get(&self, a: &MultiIndex) -> Option<&Expr> {
        self.rules.get(a)
    }

    /// `E_α`, building it and everything it depends on if needed.
    pub fn ensure(&mut self, a: &MultiIndex, ctx: &JetContext) -> Result<Expr> {
        if let Some(e) = self.rules.get(a) {
            return Ok(e.clone());
        }
        let split = self.split.clone();
        let w = split.check_weight(a);
        if w == 0 {
            return Err(Error::InvalidInput(format!("u{a} has no checked component")));
        }
        ctx.check_order(a.order() as usize)?;
        let e = if w == 1 {
            let pos = split.checked.iter().position(|&s| a.get(s) > 0).expect("weight one");
            let s = split.checked[pos];
            let rest = a.sub_delta(s).expect("positive entry");
            if rest.is_zero() {
                let mut e = self.module.eta_hat[pos].clone();
                for (k, &h) in split.hat.iter().enumerate() {
                    let x = &self.module.xi_hat[pos][k];
                    if !x.is_zero() {
                        e = e - x * Expr::jet(ctx.delta(h));
                    }
                }
                e
            } else {
                let i = self.choice.pick(&split.hat, a).expect("hat component");
                let lower = self.ensure(&a.sub_delta(i).expect("positive entry"), ctx)?;
                total_derivative(&lower, i, ctx)
            }
        } else {
            let s = self.choice.pick(&split.checked, a).expect("checked component");
            let lower = self.ensure(&a.sub_delta(s).expect("positive entry"), ctx)?;
            self.reduced_derivative(&lower, s, ctx)?
        };
        ctx.check_size(&e, "rewrite rule")?;
        self.rules.insert(*a, e.clone());
        Ok(e)
    }

    /// `D_s e` restricted to the manifold, for `e` free of checked jets.
    pub fn reduced_derivative(&mut self, e: &Expr, s: usize, ctx: &JetContext) -> Result<Expr> {
        let mut images: HashMap<Var, Expr> = HashMap::new();
        images.insert(Var::U, self.ensure(&ctx.delta(s), ctx)?);
        for b in hat_jets(e, &self.split) {
            images.insert(Var::Jet(b), self.ensure(&b.add_delta(s), ctx)?);
        }
        Ok(reduced_derivative_with(e, s, &images))
    }

    /// Full system up to order `r`.
    pub fn build(c: &CanonicalModule, r: usize, choice: ElimChoice, ctx: &JetContext) -> Result<Self> {
        let mut sys = Self::empty(c, r, choice);
        for a in rule_indices(&c.split, r) {
            sys.ensure(&a, ctx)?;
        }
        Ok(sys)
    }

    /// Only the rules needed to restrict `l`.
    pub fn for_function(c: &CanonicalModule, l: &Expr, choice: ElimChoice, ctx: &JetContext) -> Result<Self> {
        let r = order_of(l).max(0) as usize;
        let mut sys = Self::empty(c, r, choice);
        for a in checked_jets(l, &c.split) {
            sys.ensure(&a, ctx)?;
        }
        Ok(sys)
    }

    /// Bindings usable with [`Expr::substitute`].
    pub fn bindings(&self) -> HashMap<Var, Expr> {
        self.rules.iter().map(|(a, e)| (Var::Jet(*a), e.clone())).collect()
    }
}

fn reduced_derivative_with(e: &Expr, s: usize, images: &HashMap<Var, Expr>) -> Expr {
    let xs = Var::coord(s);
    let mut memo: HashMap<Var, Expr> = HashMap::new();
    fn go(e: &Expr, xs: &Var, images: &HashMap<Var, Expr>, memo: &mut HashMap<Var, Expr>) -> Expr {
        let mut image = |v: &Var| -> Option<Expr> {
            match v {
                Var::Coord(_) => (v == xs).then(Expr::one),
                Var::U | Var::Jet(_) => images.get(v).cloned(),
                Var::Exp(arg) => {
                    if let Some(x) = memo.get(v) {
                        return Some(x.clone());
                    }
                    let da = go(arg, xs, images, &mut HashMap::new());
                    let x = Expr::var(v.clone()) * da;
                    memo.insert(v.clone(), x.clone());
                    Some(x)
                }
                Var::Sym(_) | Var::Omega(_) => None,
            }
        };
        derive(e, &mut image)
    }
    go(e, &xs, images, &mut memo)
}

/// Rewrite system of a canonical module up to order `r`.
pub fn build_rewrites(c: &CanonicalModule, r: usize, ctx: &JetContext) -> Result<RewriteSystem> {
    RewriteSystem::build(c, r, ElimChoice::First, ctx)
}

/// `L̂`: `L` with every checked jet variable replaced by its rule.
pub fn associated_function(l: &Expr, rs: &RewriteSystem) -> Result<Expr> {
    for a in checked_jets(l, &rs.split) {
        if !rs.rules.contains_key(&a) {
            return Err(Error::InvalidInput(format!("rewrite system has no rule for u{a}")));
        }
    }
    l.substitute(&rs.bindings())
}

/// Result of a co-order classification.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularityReport {
    /// `r = ord L`.
    pub order: i32,
    pub strong_coorder: i32,
    pub ultra: bool,
    pub associated_function: Expr,
    pub weak_coorder: Option<i32>,
    pub weak_multiplier: Option<Expr>,
    pub weak_core: Option<Expr>,
    /// The core is of maximal rank in a top-order derivative, so the weak
    /// co-order is exact rather than an upper bound.
    pub maximal_rank_flag: bool,
    pub split: Split,
}

impl SingularityReport {
    pub fn regular(&self) -> bool {
        self.strong_coorder == self.order && !self.ultra
    }

    pub fn to_json(&self, ctx: &JetContext) -> Value {
        json!({
            "order": self.order,
            "strong_coorder": self.strong_coorder,
            "weak_coorder": self.weak_coorder,
            "ultra": self.ultra,
            "regular": self.regular(),
            "associated_function": ctx.show(&self.associated_function),
            "multiplier": self.weak_multiplier.as_ref().map(|m| ctx.show(m)),
            "core": self.weak_core.as_ref().map(|m| ctx.show(m)),
            "maximal_rank_certificate": self.maximal_rank_flag,
            "checked": self.split.checked.iter().map(|&i| ctx.names().coord(i)).collect::<Vec<_>>(),
        })
    }
}

fn admissible(m: &VFModule, ctx: &JetContext) -> Result<CanonicalModule> {
    if m.n() != ctx.n {
        return Err(Error::InvalidInput("module dimension does not match the context".into()));
    }
    if !m.rank_condition() {
        return Err(Error::RankDeficient);
    }
    if let Some(b) = m.first_non_closing_bracket() {
        return Err(Error::NotInvolutive(b.show(ctx)));
    }
    m.canonical_basis()
}

/// Strong co-order from an already canonical module.
pub fn strong_coorder_canonical(l: &Expr, c: &CanonicalModule, ctx: &JetContext) -> Result<SingularityReport> {
    let r = order_of(l);
    let (lhat, strong) = if l.is_zero() {
        (Expr::zero(), -1)
    } else {
        let rs = RewriteSystem::for_function(c, l, ElimChoice::First, ctx)?;
        let lhat = associated_function(l, &rs)?;
        ctx.check_size(&lhat, "associated function")?;
        let k = if lhat.is_zero() {
            -1
        } else if c.p() == c.n() {
            r
        } else {
            order_of(&lhat)
        };
        (lhat, k)
    };
    Ok(SingularityReport {
        order: r,
        strong_coorder: strong,
        ultra: strong == -1,
        associated_function: lhat,
        weak_coorder: None,
        weak_multiplier: None,
        weak_core: None,
        maximal_rank_flag: false,
        split: c.split.clone(),
    })
}

pub fn strong_coorder(l: &Expr, m: &VFModule, ctx: &JetContext) -> Result<SingularityReport> {
    let c = admissible(m, ctx)?;
    strong_coorder_canonical(l, &c, ctx)
}

/// Whether `∂core/∂v` fails to vanish on `core = 0`.
fn maximal_rank_in(core: &Expr, v: &Var) -> bool {
    let d = core.diff(v);
    if d.is_zero() {
        return false;
    }
    let q = d / core;
    !gcd(q.den(), core.num()).is_constant()
}

/// Certificate that `core` is of maximal rank in a derivative of its top order.
pub fn maximal_rank_certificate(core: &Expr, split: &Split) -> bool {
    let k = order_of(core);
    if k < 0 {
        return true;
    }
    if k == 0 {
        return !core.depends_on(&Var::U) || maximal_rank_in(core, &Var::U);
    }
    jet_vars_of_order(core, k as u32)
        .into_iter()
        .filter(|a| split.check_weight(a) == 0)
        .any(|a| maximal_rank_in(core, &Var::Jet(a)))
}

/// Adds the weak fields to a strong report.
pub fn with_weak(mut rep: SingularityReport, ctx: &JetContext) -> SingularityReport {
    if rep.ultra {
        rep.weak_coorder = Some(-1);
        rep.weak_multiplier = Some(Expr::one());
        rep.weak_core = Some(Expr::zero());
        rep.maximal_rank_flag = true;
        return rep;
    }
    let (mult, core) = factor_nonvanishing(&rep.associated_function, ctx);
    let full = rep.split.p() == rep.split.n;
    rep.weak_coorder = Some(if full { rep.strong_coorder } else { order_of(&core) });
    rep.maximal_rank_flag = full || maximal_rank_certificate(&core, &rep.split);
    rep.weak_multiplier = Some(mult);
    rep.weak_core = Some(core);
    rep
}

pub fn weak_coorder(l: &Expr, m: &VFModule, ctx: &JetContext) -> Result<SingularityReport> {
    Ok(with_weak(strong_coorder(l, m, ctx)?, ctx))
}

/// Family of submodules a meta-singular module is tested against.
#[derive(Clone, Debug, PartialEq)]
pub enum MetaVariant {
    /// `ω_α = u_α`.
    Involutive,
    /// As `Involutive`, after stripping a nonvanishing multiplier.
    Weak,
    /// `p = 1`, `ω_α = D_2^{α_2}⋯D_n^{α_n}(D_1 + u D_2 + ξ^3 D_3 + ⋯)^{α_1} u`;
    /// holds `ξ^3, …, ξ^n`.
    Special(Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetaReport {
    pub coorder: i32,
    pub order: i32,
    /// `ω_α` with `|α̂| = k` that the function depends on.
    pub certificate: Vec<MultiIndex>,
    /// The function in `ω` coordinates (`Var::Omega`), or the stripped core.
    pub reduced_form: Expr,
    pub multiplier: Expr,
}

impl MetaReport {
    pub fn singular(&self) -> bool {
        self.coorder < self.order
    }

    pub fn to_json(&self, ctx: &JetContext) -> Value {
        json!({
            "meta_coorder": self.coorder,
            "order": self.order,
            "singular": self.singular(),
            "certificate": self.certificate.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "reduced_form": ctx.show(&self.reduced_form),
            "multiplier": ctx.show(&self.multiplier),
        })
    }
}

fn special_split(n: usize) -> Split {
    Split::prefix(n, 1)
}

/// `(D_1 + u D_2 + ξ^3 D_3 + ⋯)^{α_1}` followed by the hat total derivatives.
fn omega_expression(a: &MultiIndex, xi: &[Expr], ctx: &JetContext, cache: &mut HashMap<MultiIndex, Expr>) -> Expr {
    if let Some(e) = cache.get(a) {
        return e.clone();
    }
    let n = ctx.n;
    let e = if a.is_zero() {
        Expr::u()
    } else if let Some(i) = (1..n).rev().find(|&i| a.get(i) > 0) {
        let lower = omega_expression(&a.sub_delta(i).expect("positive"), xi, ctx, cache);
        total_derivative(&lower, i, ctx)
    } else {
        let lower = omega_expression(&a.sub_delta(0).expect("positive"), xi, ctx, cache);
        let mut out = total_derivative(&lower, 0, ctx);
        if n > 1 {
            out = out + Expr::u() * total_derivative(&lower, 1, ctx);
        }
        for (k, x) in xi.iter().enumerate() {
            if !x.is_zero() {
                out = out + x * total_derivative(&lower, k + 2, ctx);
            }
        }
        out
    };
    cache.insert(*a, e.clone());
    e
}

fn omega_order_key(a: &MultiIndex) -> (u32, Vec<u32>) {
    (a.order(), a.entries())
}

/// Rewrites `l` in the `ω` coordinates of the special `p = 1` family by the
/// triangular change of jet coordinates.
pub fn to_omega_coordinates(l: &Expr, xi: &[Expr], ctx: &JetContext) -> Result<Expr> {
    let n = ctx.n;
    if n < 2 || xi.len() != n - 2 {
        return Err(Error::InvalidInput("special variant needs n >= 2 and coefficients ξ^3..ξ^n".into()));
    }
    let r = order_of(l).max(0) as u32;
    let mut idx = MultiIndex::all_up_to(n, 1, r);
    idx.sort_by_key(omega_order_key);
    let mut cache = HashMap::new();
    let mut inverse: HashMap<Var, Expr> = HashMap::new();
    for a in &idx {
        let w = omega_expression(a, xi, ctx, &mut cache);
        let ua = Var::jet(*a);
        if !w.diff(&ua).is_one() {
            return Err(Error::ChangeOfJetCoordinatesFailed(format!("pivot for ω{a} is not one")));
        }
        let rest = w - Expr::var(ua.clone());
        for v in rest.all_vars() {
            if let Var::Jet(b) = &v {
                if omega_order_key(b) >= omega_order_key(a) && rest.depends_on(&v) {
                    return Err(Error::ChangeOfJetCoordinatesFailed(format!("ω{a} is not triangular in u{b}")));
                }
            }
        }
        let rest = rest.substitute(&inverse)?;
        inverse.insert(ua, Expr::var(Var::Omega(*a)) - rest);
    }
    l.substitute(&inverse)
}

fn omega_hat_scan(e: &Expr, split: &Split) -> (i32, Vec<MultiIndex>) {
    if e.is_zero() {
        return (-1, Vec::new());
    }
    let mut best = 0;
    let mut cert = Vec::new();
    for v in e.all_vars() {
        let a = match &v {
            Var::Omega(a) | Var::Jet(a) => *a,
            _ => continue,
        };
        if !e.depends_on(&v) {
            continue;
        }
        let k = split.hat_weight(&a) as i32;
        if k > best {
            best = k;
            cert.clear();
        }
        if k == best && k > 0 {
            cert.push(a);
        }
    }
    if best == 0 && e.depends_on(&Var::U) {
        cert.push(MultiIndex::zero(split.n));
    }
    cert.sort();
    (best, cert)
}

/// Meta-singularity co-order of `l` for the `(p+1)`-dimensional module whose
/// family of `p`-dimensional submodules is given by the split and variant, in
/// the current coordinates.
pub fn meta_singularity_coorder(l: &Expr, split: &Split, variant: &MetaVariant, ctx: &JetContext) -> Result<MetaReport> {
    if l.is_zero() {
        return Err(Error::NotMetaSingular);
    }
    let order = order_of(l);
    let (form, multiplier, split) = match variant {
        MetaVariant::Involutive => (l.clone(), Expr::one(), split.clone()),
        MetaVariant::Weak => {
            let (m, core) = factor_nonvanishing(l, ctx);
            (core, m, split.clone())
        }
        MetaVariant::Special(xi) => (to_omega_coordinates(l, xi, ctx)?, Expr::one(), special_split(ctx.n)),
    };
    let (k, certificate) = omega_hat_scan(&form, &split);
    Ok(MetaReport { coorder: k, order, certificate, reduced_form: form, multiplier })
}

/// `(Q^Φ_1)^{α_1}⋯(Q^Φ_p)^{α_p} u` as a function of `(x, u)`.
pub struct PhiFamily {
    split: Split,
    fields: Vec<VectorField>,
    cache: HashMap<MultiIndex, Expr>,
}

impl PhiFamily {
    pub fn new(phi: &Expr, split: &Split, special: Option<&[Expr]>, ctx: &JetContext) -> Result<Self> {
        let n = ctx.n;
        let fields = match special {
            None => return Self::from_etas(split, &phi_etas(phi, &split.checked)?),
            Some(xi) => {
                if split.checked != [0] || xi.len() + 2 != n {
                    return Err(Error::InvalidInput("special variant needs checked = {x1} and ξ^3..ξ^n".into()));
                }
                let theta = phi_etas(phi, &[0])?.remove(0);
                let mut c = vec![Expr::one(), Expr::u()];
                c.extend(xi.iter().cloned());
                vec![VectorField::new(c, theta)?]
            }
        };
        Ok(PhiFamily { split: split.clone(), fields, cache: HashMap::new() })
    }

    /// Family with `Q_s = ∂_s + η^s ∂_u` over the checked slots.
    pub fn from_etas(split: &Split, etas: &[Expr]) -> Result<Self> {
        if etas.len() != split.p() {
            return Err(Error::InvalidInput(format!("expected {} η coefficients, found {}", split.p(), etas.len())));
        }
        let fields = split
            .checked
            .iter()
            .zip(etas)
            .map(|(&s, eta)| {
                let mut v = VectorField::partial(split.n, s);
                v.eta = eta.clone();
                v
            })
            .collect();
        Ok(PhiFamily { split: split.clone(), fields, cache: HashMap::new() })
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    /// `h^{α̌}` for the checked part of `a`.
    pub fn h(&mut self, a: &MultiIndex) -> Expr {
        let key = a.without(&self.split.hat);
        if let Some(e) = self.cache.get(&key) {
            return e.clone();
        }
        let e = match self.split.checked.iter().position(|&s| key.get(s) > 0) {
            None => Expr::u(),
            Some(pos) => {
                let lower = self.h(&key.sub_delta(self.split.checked[pos]).expect("positive"));
                self.fields[pos].apply(&lower)
            }
        };
        self.cache.insert(key, e.clone());
        e
    }

    /// `e` with every jet variable that has a checked component replaced by `ψ^α`.
    pub fn restrict(&mut self, e: &Expr, ctx: &JetContext) -> Result<Expr> {
        let mut b = HashMap::new();
        for v in e.all_vars() {
            if let Var::Jet(a) = &v {
                if self.split.check_weight(a) > 0 {
                    b.insert(v.clone(), self.psi(a, ctx));
                }
            }
        }
        e.substitute(&b)
    }

    /// `ψ^α = D^{α̂} h^{α̌}`.
    pub fn psi(&mut self, a: &MultiIndex, ctx: &JetContext) -> Expr {
        let mut e = self.h(a);
        for &i in &self.split.hat {
            for _ in 0..a.get(i) {
                e = total_derivative(&e, i, ctx);
            }
        }
        e
    }
}

fn family_bindings(
    form: &Expr,
    fam: &mut PhiFamily,
    omega: bool,
    ctx: &JetContext,
) -> HashMap<Var, Expr> {
    let mut b = HashMap::new();
    for v in form.all_vars() {
        let a = match (&v, omega) {
            (Var::Omega(a), true) | (Var::Jet(a), false) => *a,
            _ => continue,
        };
        b.insert(v.clone(), fam.psi(&a, ctx));
    }
    b
}

/// `L̃^Φ`: every `ω_α` of the reduced form replaced by `ψ^α` for the member
/// `Q^Φ` of the family.
pub fn family_reduced_function(
    l: &Expr,
    phi: &Expr,
    split: &Split,
    k: i32,
    variant: &MetaVariant,
    ctx: &JetContext,
) -> Result<Expr> {
    let (form, omega, split, special) = match variant {
        MetaVariant::Involutive | MetaVariant::Weak => (l.clone(), false, split.clone(), None),
        MetaVariant::Special(xi) => (to_omega_coordinates(l, xi, ctx)?, true, special_split(ctx.n), Some(xi.as_slice())),
    };
    let mut fam = PhiFamily::new(phi, &split, special, ctx)?;
    let b = family_bindings(&form, &mut fam, omega, ctx);
    let out = form.substitute(&b)?;
    ctx.check_size(&out, "family reduced function")?;
    if order_of(&out) > k.max(0) {
        return Err(Error::Internal(format!("family reduced function has order {} > {k}", order_of(&out))));
    }
    Ok(out)
}

/// Residuals whose simultaneous vanishing singles out the members `Q^Φ` of
/// co-order below `k`: for each `α̂` with `|α̂| = k`,
/// `Σ_{α̌} L_{ω_(α̌,α̂)}(x, Ω̃) ∂_u h^{α̌}`.
pub fn sub_maximal_residuals(
    l: &Expr,
    phi: &Expr,
    split: &Split,
    k: i32,
    variant: &MetaVariant,
    ctx: &JetContext,
) -> Result<Vec<(MultiIndex, Expr)>> {
    let (form, omega, split, special) = match variant {
        MetaVariant::Involutive | MetaVariant::Weak => (l.clone(), false, split.clone(), None),
        MetaVariant::Special(xi) => (to_omega_coordinates(l, xi, ctx)?, true, special_split(ctx.n), Some(xi.as_slice())),
    };
    let mut fam = PhiFamily::new(phi, &split, special, ctx)?;
    let b = family_bindings(&form, &mut fam, omega, ctx);
    let mut by_hat: BTreeMap<MultiIndex, Expr> = BTreeMap::new();
    for v in form.all_vars() {
        let a = match (&v, omega) {
            (Var::Omega(a), true) | (Var::Jet(a), false) => *a,
            _ => continue,
        };
        if split.hat_weight(&a) as i32 != k {
            continue;
        }
        let coeff = form.diff(&v).substitute(&b)? * fam.h(&a).diff(&Var::U);
        let key = a.without(&split.checked);
        let acc = by_hat.remove(&key).unwrap_or_else(Expr::zero);
        by_hat.insert(key, acc + coeff);
    }
    Ok(by_hat.into_iter().collect())
}
