use redmod_core::evolution::{
    coorder1_determining, coorder1_g, determining_system_evolution, involutivity_residuals, phi_residual_evolution, tilde_extension,
    tilde_h, EvolutionEquation,
};
use redmod_core::jet::JetContext;
use redmod_core::{Error, Expr};

fn ctx1() -> JetContext {
    JetContext::with_time(1).with_symbol("c")
}

fn evo(ctx: &JetContext, h: &str) -> EvolutionEquation {
    EvolutionEquation::new(ctx.parse(h).unwrap(), ctx).unwrap()
}

fn exprs(ctx: &JetContext, xs: &[&str]) -> Vec<Expr> {
    xs.iter().map(|s| ctx.parse(s).unwrap()).collect()
}

#[test]
fn validation() {
    let ctx = ctx1();
    assert!(EvolutionEquation::new(ctx.parse("u[1,1]").unwrap(), &ctx).is_err());
    assert!(EvolutionEquation::new(ctx.parse("u[0,1]").unwrap(), &ctx).is_err());
    let e = EvolutionEquation::from_equation(&ctx.parse("2*u[1,0] - 2*u[0,2] - u").unwrap(), &ctx).unwrap();
    assert_eq!(e.h, ctx.parse("u[0,2] + u/2").unwrap());
}

#[test]
fn tilde_h_examples() {
    let ctx = ctx1();
    let heat = evo(&ctx, "u[0,2]");
    assert_eq!(tilde_h(&heat, &exprs(&ctx, &["u"]), &ctx).unwrap(), ctx.parse("u").unwrap());
    assert!(tilde_h(&heat, &exprs(&ctx, &["0"]), &ctx).unwrap().is_zero());
    let burgers = evo(&ctx, "u[0,1]*u[0,2]");
    assert!(tilde_h(&burgers, &exprs(&ctx, &["c"]), &ctx).unwrap().is_zero());
}

#[test]
fn tilde_h_needs_involutive_etas() {
    let ctx = JetContext::with_time(2);
    let e = evo(&ctx, "u[0,2,0] + u[0,0,2]");
    assert!(matches!(tilde_h(&e, &exprs(&ctx, &["0", "x1"]), &ctx), Err(Error::NotInvolutive(_))));
    let r = involutivity_residuals(&exprs(&ctx, &["0", "x1"]));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].1, Expr::int(-1));
}

#[test]
fn determining_systems() {
    let ctx = ctx1();
    let heat = evo(&ctx, "u[0,2]");
    let d = determining_system_evolution(&heat, &exprs(&ctx, &["u"]), &ctx).unwrap();
    assert!(d.is_reduction_module());
    let d = determining_system_evolution(&heat, &exprs(&ctx, &["t"]), &ctx).unwrap();
    assert_eq!(d.invariance, vec![Expr::one()]);
    assert!(!d.is_reduction_module());

    let ctx = JetContext::with_time(2);
    let e = evo(&ctx, "u[0,2,0] + u[0,0,2] + x1*u");
    let d = determining_system_evolution(&e, &exprs(&ctx, &["0", "0"]), &ctx).unwrap();
    assert_eq!(d.residual_count(), 3);
    assert_eq!(d.reduced_rhs, Some(ctx.parse("x1*u").unwrap()));
    assert_eq!(d.invariance, exprs(&ctx, &["-u", "0"]));
}

#[test]
fn phi_residuals() {
    let ctx = ctx1();
    let heat = evo(&ctx, "u[0,2]");
    let r = phi_residual_evolution(&heat, &ctx.parse("u*exp(-t-x)").unwrap(), &ctx).unwrap();
    assert!(r.residual.is_zero());
    assert!(r.identity_holds());

    let r = phi_residual_evolution(&heat, &ctx.parse("u-t").unwrap(), &ctx).unwrap();
    assert_eq!(r.residual, Expr::int(-1));
    assert!(r.chi_repairable);
    assert!(r.is_reduction_module());

    let r = phi_residual_evolution(&heat, &ctx.parse("u-t*x").unwrap(), &ctx).unwrap();
    assert!(!r.chi_repairable);
    assert!(r.identity_holds());

    let err = phi_residual_evolution(&heat, &ctx.parse("t+x").unwrap(), &ctx).unwrap_err();
    assert_eq!(err, Error::DegenerateInvariant);
}

#[test]
fn phi_identity_on_nonlinear_equation() {
    let ctx = JetContext::with_time(2);
    let e = evo(&ctx, "u*u[0,2,0] + u[0,1,0]*u[0,0,2] + t*u^2");
    for phi in ["u^2*x1 + t*x2", "u*exp(x1-t) + x2^2", "(u+x1)/(1+t^2+u^2)"] {
        let r = phi_residual_evolution(&e, &ctx.parse(phi).unwrap(), &ctx).unwrap();
        assert!(r.identity_holds(), "{phi}");
    }
}

#[test]
fn tilde_extensions() {
    let ctx = ctx1();
    let heat = evo(&ctx, "u[0,2]");
    let x = tilde_extension(&heat, &exprs(&ctx, &["u"]), &ctx).unwrap();
    assert!(x.reduction && x.involutive && x.ultra);
    assert_eq!(x.module.basis()[0].eta, ctx.parse("u").unwrap());

    let x = tilde_extension(&heat, &exprs(&ctx, &["t*u"]), &ctx).unwrap();
    assert!(!x.reduction && !x.involutive && !x.ultra);

    let e = evo(&ctx, "u[0,2] + t*u^3");
    let x = tilde_extension(&e, &exprs(&ctx, &["0"]), &ctx).unwrap();
    assert!(x.agree() && x.reduction);
}

#[test]
fn coorder_one_right_hand_sides() {
    let ctx = ctx1();
    let l = ctx.parse("u[1,0] - u[0,2]").unwrap();
    let g = coorder1_g(&l, &ctx.parse("u*exp(-x)").unwrap(), Some(0), &ctx).unwrap();
    let heat = evo(&ctx, "u[0,2]");
    assert_eq!(g, tilde_h(&heat, &exprs(&ctx, &["u"]), &ctx).unwrap());

    let ctx = JetContext::new(2);
    let l = ctx.parse("u[0,1] - u[2,0]").unwrap();
    assert_eq!(coorder1_g(&l, &ctx.parse("u*exp(-x1)").unwrap(), None, &ctx).unwrap(), Expr::u());
    let r = coorder1_determining(&l, &ctx.parse("u*exp(-x1-x2)").unwrap(), None, &ctx).unwrap();
    assert!(r.residual.is_zero());
    let r = coorder1_determining(&l, &ctx.parse("u*exp(-x1)").unwrap(), None, &ctx).unwrap();
    assert_eq!(r.residual, ctx.parse("u*exp(-x1)").unwrap());
    assert!(r.chi_repairable);
    let r = coorder1_determining(&l, &ctx.parse("u - x1^2 - 2*x2").unwrap(), None, &ctx).unwrap();
    assert!(r.residual.is_zero());
}

#[test]
fn coorder_one_errors() {
    let ctx = JetContext::new(2);
    let l = ctx.parse("u[0,1]*(u[1,0]-u) + u[2,0] - u").unwrap();
    let err = coorder1_g(&l, &ctx.parse("u*exp(-x1)").unwrap(), None, &ctx).unwrap_err();
    assert_eq!(err, Error::SingularPhi);
    let l = ctx.parse("u[0,1]^2 - u[2,0]").unwrap();
    assert!(matches!(coorder1_g(&l, &ctx.parse("u").unwrap(), None, &ctx), Err(Error::NotSolvable(_))));
}
