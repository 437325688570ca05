//! Acceptance suite: one PASS/FAIL line per criterion.

use std::time::{Duration, Instant};

use redmod_core::classify2::{
    eiconal_residual, eiconal_submodule, elliptic_coorder, is_submodule, meta_module_from_eiconal, Kind, QuasiLinear2,
};
use redmod_core::evolution::{
    determining_system_evolution, phi_residual_evolution, tilde_extension, EvolutionEquation,
};
use redmod_core::expr::{sample_agrees, SampleConfig};
use redmod_core::gen::Gen;
use redmod_core::jet::{JetContext, Split};
use redmod_core::manifold::{strong_coorder, weak_coorder, ElimChoice, RewriteSystem};
use redmod_core::reduction::{conditional_invariance_check, is_solution, ndim_reduce, ultra_module_from_family, PhiInverse};
use redmod_core::vfmod::{phi_etas, phi_family_member, PhiVariant, VFModule};
use redmod_core::{Expr, Var};

const GOLDEN_LIMIT: Duration = Duration::from_secs(5);
const EVOLUTION_LIMIT: Duration = Duration::from_secs(120);
const ELLIPTIC_LIMIT: Duration = Duration::from_secs(120);
const ZERO_TEST_LIMIT: Duration = Duration::from_secs(60);

const EVOLUTION_EQUATIONS: usize = 30;
const EVOLUTION_MODULES: usize = 30;
const ELLIPTIC_EQUATIONS: usize = 20;
const ELLIPTIC_MODULES: usize = 20;
const ELIMINATION_MODULES: usize = 25;
const EICONAL_SUBMODULES: usize = 10;
const ZERO_TEST_EXPRESSIONS: usize = 1000;
const SAMPLE_POINTS: usize = 20;

const SEED: u64 = 20_240_601;

struct Outcome {
    ok: bool,
    detail: String,
}

fn report(id: u32, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let tag = if o.ok { "PASS" } else { "FAIL" };
    println!("{tag} [{id}] {name}: {} ({:.2?})", o.detail, start.elapsed());
    o.ok
}

fn within(start: Instant, limit: Duration) -> (bool, String) {
    let t = start.elapsed();
    (t < limit, format!("{t:.2?} of {limit:.0?}"))
}

fn golden_pair() -> Outcome {
    let ctx = JetContext::new(3);
    let m = VFModule::shifts(3, &[0, 1]);
    let mut ok = true;
    let mut detail = Vec::new();
    for (eq, want) in [
        ("x2*u[3,0,0]+x1*u[0,3,0]-exp(u[0,0,2])*(u[0,0,1]+u)", (3, 2, 1)),
        ("x2*u[2,0,0]+x1*u[0,2,0]-exp(u[0,0,2])*(u[0,0,1]+u)", (2, 2, 1)),
    ] {
        let start = Instant::now();
        let l = ctx.parse(eq).expect("golden equation");
        let rep = weak_coorder(&l, &m, &ctx).expect("golden analysis");
        let got = (rep.order, rep.strong_coorder, rep.weak_coorder.unwrap_or(-2));
        let (fast, t) = within(start, GOLDEN_LIMIT);
        ok &= got == want && fast;
        detail.push(format!("order/strong/weak = {got:?}, want {want:?}, {t}"));
    }
    Outcome { ok, detail: detail.join("; ") }
}

fn evolution_suite() -> Outcome {
    let start = Instant::now();
    let mut g = Gen::new(SEED);
    let mut hits = 0;
    let mut total = 0;
    let mut failures = Vec::new();
    for k in 0..EVOLUTION_EQUATIONS {
        let n = 1 + k % 2;
        let order = 2 + (k / 2) as u32 % 2;
        let ctx = JetContext::with_time(n);
        let h = g.evolution_h(n, order);
        let l = Expr::jet(ctx.delta(0)) - &h;
        let spatial: Vec<usize> = (1..=n).collect();
        let split = Split::from_checked(n + 1, &spatial);
        for _ in 0..EVOLUTION_MODULES {
            let phi = g.phi(n + 1);
            total += 1;
            let got = phi_family_member(&phi, &split, &PhiVariant::Involutive)
                .and_then(|m| strong_coorder(&l, &m, &ctx))
                .map(|r| r.strong_coorder);
            match got {
                Ok(1) => hits += 1,
                other => failures.push(format!("H = {}, Φ = {}: {other:?}", ctx.show(&h), ctx.show(&phi))),
            }
        }
    }
    let (fast, t) = within(start, EVOLUTION_LIMIT);
    let mut detail = format!("{hits}/{total} co-order 1, {t}");
    if let Some(f) = failures.first() {
        detail.push_str(&format!("; first failure {f}"));
    }
    Outcome { ok: hits == total && fast, detail }
}

fn elliptic_suite() -> Outcome {
    let start = Instant::now();
    let mut g = Gen::new(SEED + 1);
    let mut hits = 0;
    let mut total = 0;
    let mut failures = Vec::new();
    for k in 0..ELLIPTIC_EQUATIONS {
        let n = 2 + k % 2;
        let ctx = JetContext::new(n);
        let e = g.elliptic(n, &ctx).expect("elliptic instance");
        for _ in 0..ELLIPTIC_MODULES {
            let m = g.elliptic_module(n).expect("admissible module");
            total += 1;
            match elliptic_coorder(&e, &m, &ctx).map(|r| r.report.strong_coorder) {
                Ok(2) => hits += 1,
                other => failures.push(format!("a = {:?}, module {:?}: {other:?}", e.a, m.basis())),
            }
        }
    }
    let (fast, t) = within(start, ELLIPTIC_LIMIT);
    let mut detail = format!("{hits}/{total} co-order 2, {t}");
    if let Some(f) = failures.first() {
        detail.push_str(&format!("; first failure {f}"));
    }
    Outcome { ok: hits == total && fast, detail }
}

fn heat_correspondence() -> Outcome {
    let ctx = JetContext::with_time(1);
    let heat = EvolutionEquation::new(ctx.parse("u[0,2]").unwrap(), &ctx).unwrap();
    let phi = ctx.parse("u*exp(-t-x)").unwrap();
    let r = phi_residual_evolution(&heat, &phi, &ctx).unwrap();
    let etas = phi_etas(&phi, &[1]).unwrap();
    let d = determining_system_evolution(&heat, &etas, &ctx).unwrap();
    let residuals_zero = d.involutivity.iter().all(|(_, e)| e.is_zero()) && d.invariance.iter().all(Expr::is_zero);
    let m = phi_family_member(&phi, &Split::from_checked(2, &[1]), &PhiVariant::Involutive).unwrap();
    let cic = conditional_invariance_check(&heat.equation(&ctx), &m, &ctx).unwrap();
    let x = tilde_extension(&heat, &etas, &ctx).unwrap();
    let ok = r.residual.is_zero() && residuals_zero && cic.is_reduction_module == Some(true) && x.agree();
    Outcome {
        ok,
        detail: format!(
            "phi residual {}, determining residuals zero {residuals_zero}, conditional invariance {:?}, verdicts (reduction {}, involutive {}, ultra {}) agree {}",
            ctx.show(&r.residual),
            cic.is_reduction_module,
            x.reduction,
            x.involutive,
            x.ultra,
            x.agree()
        ),
    }
}

fn elimination_consistency() -> Outcome {
    let ctx = JetContext::new(3);
    let mut g = Gen::new(SEED + 2);
    let mut pass = 0;
    let mut rules = 0;
    for _ in 0..ELIMINATION_MODULES {
        let c = g.involutive_canonical(3, 2).expect("random module");
        let first = RewriteSystem::build(&c, 3, ElimChoice::First, &ctx).expect("first rules");
        let last = RewriteSystem::build(&c, 3, ElimChoice::Last, &ctx).expect("last rules");
        rules += first.rules.len();
        let same = first.rules.len() == last.rules.len()
            && first.rules.iter().all(|(k, e)| last.rules.get(k).is_some_and(|f| (e - f).is_zero()));
        pass += usize::from(same);
    }
    Outcome { ok: pass == ELIMINATION_MODULES, detail: format!("{pass}/{ELIMINATION_MODULES} modules, {rules} rules compared") }
}

fn algebraic_reduction() -> Outcome {
    let ctx = JetContext::new(2).with_symbol("k");
    let l = ctx.parse("u[1,0]+u[0,1]-2").unwrap();
    let phi = ctx.parse("u-x1-x2").unwrap();
    let inv = PhiInverse { psi: ctx.parse("x1+x2+k").unwrap(), kappa: Var::sym("k") };
    let r = ndim_reduce(&l, &phi, Some(&inv), &ctx).unwrap();
    let v = ultra_module_from_family(&l, &phi, &ctx).unwrap();
    let annihilates = v.module.basis().iter().all(|f| f.apply(&phi).is_zero());
    let family_solves = is_solution(&l, &inv.psi, &ctx).unwrap();
    let ok = r.ultra && r.l_phi.is_zero() && v.ultra && annihilates && family_solves && inv.round_trips(&phi).unwrap_or(false);
    Outcome {
        ok,
        detail: format!(
            "L^Φ = {}, ultra {}, module annihilates Φ {annihilates}, u = x1+x2+k solves {family_solves}",
            ctx.show(&r.l_phi),
            v.ultra
        ),
    }
}

fn eiconal_wave() -> Outcome {
    let ctx = JetContext::with_time(1);
    let w = QuasiLinear2::new(Kind::Wave, vec![vec![Expr::one()]], Expr::zero(), &ctx).unwrap();
    let psi = ctx.parse("t+x").unwrap();
    let residual = eiconal_residual(&w, &psi, &ctx).unwrap();
    let Ok(m) = meta_module_from_eiconal(&w, &psi, &ctx) else {
        return Outcome { ok: false, detail: "meta module construction failed".into() };
    };
    let l = w.equation(&ctx);
    let mut g = Gen::new(SEED + 3);
    let mut good = 0;
    let mut orders = Vec::new();
    for _ in 0..EICONAL_SUBMODULES {
        let phi = g.phi(2);
        let sub = eiconal_submodule(&psi, &phi, &ctx).expect("submodule");
        let co = strong_coorder(&l, &sub, &ctx).map(|r| r.strong_coorder).unwrap_or(i32::MAX);
        orders.push(co);
        if sub.is_involutive() && is_submodule(&sub, &m) && co <= 1 {
            good += 1;
        }
    }
    Outcome {
        ok: residual.is_zero() && good == EICONAL_SUBMODULES,
        detail: format!("residual {}, {good}/{EICONAL_SUBMODULES} submodules with co-order <= 1 {orders:?}", ctx.show(&residual)),
    }
}

fn zero_test() -> Outcome {
    let start = Instant::now();
    let mut g = Gen::new(SEED + 4);
    let mut disagree = 0;
    let mut zeros = 0;
    let mut skipped = 0;
    for k in 0..ZERO_TEST_EXPRESSIONS {
        let node = g.zero_test_case(2 + k % 2, 3);
        let canonical = node.normalize().expect("generated expressions are defined").is_zero();
        let cfg = SampleConfig { points: SAMPLE_POINTS, seed: SEED + k as u64, ..SampleConfig::default() };
        match sample_agrees(&node, &cfg) {
            Some(s) if s != canonical => disagree += 1,
            Some(_) => {}
            None => skipped += 1,
        }
        zeros += usize::from(canonical);
    }
    let (fast, t) = within(start, ZERO_TEST_LIMIT);
    Outcome {
        ok: disagree == 0 && skipped == 0 && fast,
        detail: format!("{disagree} disagreements, {zeros} zeros, {skipped} unevaluable, {t}"),
    }
}

#[test]
fn acceptance() {
    let results = [
        report(1, "golden pair", golden_pair),
        report(2, "evolution co-order one", evolution_suite),
        report(3, "elliptic co-order two", elliptic_suite),
        report(4, "heat equation correspondence", heat_correspondence),
        report(5, "elimination consistency", elimination_consistency),
        report(6, "algebraic reduction", algebraic_reduction),
        report(7, "eiconal and wave", eiconal_wave),
        report(8, "zero-test soundness", zero_test),
    ];
    let passed = results.iter().filter(|&&b| b).count();
    println!("{passed}/{} criteria passed", results.len());
    assert_eq!(passed, results.len());
}
